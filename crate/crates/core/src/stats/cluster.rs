use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One agglomeration step. Cluster ids below `n` are leaves; step `k`
/// creates cluster `n + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    /// Leaf order, left to right.
    pub order: Vec<usize>,
}

impl Dendrogram {
    /// Member leaves of every internal cluster, in merge order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let n = self.order.len();
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut out = Vec::with_capacity(self.merges.len());
        for m in &self.merges {
            let mut joined = members[m.left].clone();
            joined.extend_from_slice(&members[m.right]);
            joined.sort_unstable();
            out.push(joined.clone());
            members.push(joined);
        }
        out
    }
}

struct Active {
    id: usize,
    leaves: Vec<usize>,
    min_leaf: usize,
}

/// Average-linkage clustering on `1 − |r|`; missing correlations count as 0.
///
/// Ties on distance go to the pair whose lowest original indices are
/// smallest, and within a merge the cluster holding the lower index is
/// placed on the left.
pub fn cluster_tree(corr: &[Vec<Option<f64>>]) -> Result<Dendrogram> {
    let n = corr.len();
    for row in corr {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
    }

    // distances between active clusters, indexed by slot
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let r = corr[i][j].unwrap_or(0.0);
                        let r = if r.is_finite() { r.abs().min(1.0) } else { 0.0 };
                        1.0 - r
                    }
                })
                .collect()
        })
        .collect();
    let mut active: Vec<Option<Active>> = (0..n)
        .map(|i| {
            Some(Active {
                id: i,
                leaves: vec![i],
                min_leaf: i,
            })
        })
        .collect();

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            let Some(a) = &active[i] else { continue };
            for j in i + 1..n {
                let Some(b) = &active[j] else { continue };
                let d = dist[i][j];
                let (lo, hi) = if a.min_leaf < b.min_leaf {
                    (a.min_leaf, b.min_leaf)
                } else {
                    (b.min_leaf, a.min_leaf)
                };
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, i, j));
                }
            }
        }
        let (d, _, _, i, j) = best.expect("at least two active clusters");
        let a = active[i].take().unwrap();
        let b = active[j].take().unwrap();
        let (sa, sb) = (a.leaves.len() as f64, b.leaves.len() as f64);
        // slot i now holds the merged cluster; Lance-Williams average update
        for k in 0..n {
            if k == i || k == j || active[k].is_none() {
                continue;
            }
            let dk = (sa * dist[i][k] + sb * dist[j][k]) / (sa + sb);
            dist[i][k] = dk;
            dist[k][i] = dk;
        }
        let (left, right) = if a.min_leaf < b.min_leaf { (a, b) } else { (b, a) };
        merges.push(Merge {
            left: left.id,
            right: right.id,
            distance: d,
            size: left.leaves.len() + right.leaves.len(),
        });
        let mut leaves = left.leaves;
        leaves.extend(right.leaves);
        active[i] = Some(Active {
            id: n + step,
            leaves,
            min_leaf: left.min_leaf,
        });
    }

    let order = active
        .into_iter()
        .flatten()
        .next()
        .map(|a| a.leaves)
        .unwrap_or_default();
    Ok(Dendrogram { merges, order })
}

/// Dendrogram leaf order for a correlation matrix.
pub fn cluster_order(corr: &[Vec<Option<f64>>]) -> Result<Vec<usize>> {
    Ok(cluster_tree(corr)?.order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(m: &[&[f64]]) -> Vec<Vec<Option<f64>>> {
        m.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect()
    }

    #[test]
    fn identity_keeps_index_order() {
        let m: Vec<Vec<Option<f64>>> = (0..5)
            .map(|i| (0..5).map(|j| Some(if i == j { 1.0 } else { 0.0 })).collect())
            .collect();
        assert_eq!(cluster_order(&m).unwrap(), [0, 1, 2, 3, 4]);
    }

    #[test]
    fn strongly_correlated_pair_is_adjacent() {
        // 0 and 2 correlate; 1 is independent
        let m = some(&[&[1.0, 0.1, 0.9], &[0.1, 1.0, 0.05], &[0.9, 0.05, 1.0]]);
        let tree = cluster_tree(&m).unwrap();
        assert_eq!(tree.merges[0].left, 0);
        assert_eq!(tree.merges[0].right, 2);
        assert!((tree.merges[0].distance - 0.1).abs() < 1e-12);
        // {0,2} to 1: mean(0.9, 0.95)
        assert!((tree.merges[1].distance - 0.925).abs() < 1e-12);
        assert_eq!(tree.order, [0, 2, 1]);
    }

    #[test]
    fn negative_correlation_counts_as_close() {
        let m = some(&[&[1.0, -0.95, 0.2], &[-0.95, 1.0, 0.1], &[0.2, 0.1, 1.0]]);
        assert_eq!(cluster_tree(&m).unwrap().merges[0].left, 0);
        assert_eq!(cluster_tree(&m).unwrap().merges[0].right, 1);
    }

    #[test]
    fn missing_is_zero() {
        let m = vec![
            vec![Some(1.0), None, Some(0.8)],
            vec![None, Some(1.0), None],
            vec![Some(0.8), None, Some(1.0)],
        ];
        assert_eq!(cluster_order(&m).unwrap(), [0, 2, 1]);
    }

    #[test]
    fn rejects_non_square() {
        let m = vec![vec![Some(1.0), Some(0.0)], vec![Some(0.0)]];
        assert!(matches!(cluster_order(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn trivial_sizes() {
        assert!(cluster_order(&[]).unwrap().is_empty());
        assert_eq!(cluster_order(&[vec![Some(1.0)]]).unwrap(), [0]);
    }
}
