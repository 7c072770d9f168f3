//! Exact Euclidean k-NN search on a static KD-tree.
//!
//! Distances are accumulated exactly as in [`Metric::Euclidean`], and a
//! subtree is skipped only when the squared gap along its splitting axis is
//! strictly larger than the current k-th best squared distance. Since every
//! accumulated squared distance is at least its largest single term in IEEE
//! arithmetic, the returned radii are bit-identical to a full sort.
//!
//! [`Metric::Euclidean`]: crate::geometry::Metric::Euclidean

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{squared_euclidean, OrdDist, PointSet};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    d: usize,
    /// Points in tree order, row-major.
    points: Vec<f64>,
    /// Original index of each point in tree order.
    index: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(ps: &PointSet) -> Self {
        let d = ps.dim();
        let mut order: Vec<usize> = (0..ps.len()).collect();
        let mut nodes = Vec::new();
        if !order.is_empty() {
            build(ps, &mut order, 0, &mut nodes);
        }
        let mut points = Vec::with_capacity(ps.len() * d);
        for &i in &order {
            points.extend_from_slice(ps.point(i));
        }
        Self {
            d,
            points,
            index: order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The `k` smallest distances from `x`, nondecreasing.
    pub fn nearest(&self, x: &[f64], k: usize) -> Result<Vec<f64>> {
        self.search(x, k, None)
    }

    /// The `k` smallest distances from sample point `i` to the other points.
    pub fn nearest_excluding(&self, x: &[f64], exclude: usize, k: usize) -> Result<Vec<f64>> {
        self.search(x, k, Some(exclude))
    }

    fn search(&self, x: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::Shape {
                expected: self.d,
                got: x.len(),
            });
        }
        let available = self.len() - usize::from(exclude.is_some());
        if k == 0 || k > available {
            return Err(Error::Range(format!("k = {k} outside 1..={available}")));
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.visit(0, x, k, exclude, &mut heap);
        let mut out: Vec<f64> = heap.into_iter().map(|OrdDist(s)| s.sqrt()).collect();
        out.sort_unstable_by(f64::total_cmp);
        Ok(out)
    }

    fn visit(
        &self,
        node: usize,
        x: &[f64],
        k: usize,
        exclude: Option<usize>,
        heap: &mut BinaryHeap<OrdDist>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    if Some(self.index[slot]) == exclude {
                        continue;
                    }
                    let p = &self.points[slot * self.d..(slot + 1) * self.d];
                    let s = squared_euclidean(p, x);
                    if heap.len() < k {
                        heap.push(OrdDist(s));
                    } else if s < heap.peek().map_or(f64::INFINITY, |t| t.0) {
                        heap.pop();
                        heap.push(OrdDist(s));
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let gap = x[axis] - value;
                let (near, far) = if gap < 0.0 { (left, right) } else { (right, left) };
                self.visit(near, x, k, exclude, heap);
                let worst = if heap.len() < k {
                    f64::INFINITY
                } else {
                    heap.peek().map_or(f64::INFINITY, |t| t.0)
                };
                if gap * gap <= worst {
                    self.visit(far, x, k, exclude, heap);
                }
            }
        }
    }
}

/// Builds the subtree over `order` (a slice of the permutation starting at
/// tree slot `offset`) and returns its node id.
fn build(ps: &PointSet, order: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + order.len(),
        });
        return id;
    }
    let axis = widest_axis(ps, order);
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| ps.point(a)[axis].total_cmp(&ps.point(b)[axis]));
    let value = ps.point(order[mid])[axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build(ps, lo, offset, nodes);
    let right = build(ps, hi, offset + mid, nodes);
    nodes[id] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

fn widest_axis(ps: &PointSet, order: &[usize]) -> usize {
    (0..ps.dim())
        .map(|a| {
            let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = ps.point(i)[a];
                (lo.min(v), hi.max(v))
            });
            (a, hi - lo)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{knn_radius, leave_one_out_radius, Metric};
    use rand::Rng;

    #[test]
    fn matches_brute_force_including_ties() {
        let mut rng = crate::rng::from_seed(5);
        for trial in 0..60 {
            let d = 1 + trial % 4;
            let n = 20 + trial * 7;
            // Coarse grid so that duplicate distances are common.
            let data: Vec<f64> = (0..n * d).map(|_| f64::from(rng.random_range(0..6u8))).collect();
            let ps = PointSet::new(data, d).unwrap();
            let tree = KdTree::new(&ps);
            let x: Vec<f64> = (0..d).map(|_| f64::from(rng.random_range(0..12u8)) / 2.0).collect();
            let got = tree.nearest(&x, n).unwrap();
            for k in 1..=n {
                assert_eq!(got[k - 1], knn_radius(&ps, &x, k, Metric::Euclidean).unwrap());
            }
            let i = trial % n;
            let loo = tree.nearest_excluding(ps.point(i), i, n - 1).unwrap();
            for k in 1..n {
                assert_eq!(loo[k - 1], leave_one_out_radius(&ps, i, k, Metric::Euclidean).unwrap());
            }
        }
    }

    #[test]
    fn rejects_out_of_range_k() {
        let ps = PointSet::new(vec![0.0, 1.0, 2.0], 1).unwrap();
        let tree = KdTree::new(&ps);
        assert!(tree.nearest(&[0.5], 0).is_err());
        assert!(tree.nearest(&[0.5], 4).is_err());
        assert!(tree.nearest_excluding(&[0.0], 0, 3).is_err());
        assert!(tree.nearest(&[0.5, 1.0], 1).is_err());
    }
}
