//! Exact k-NN radii and the local counting process.
//!
//! `R_{n,k}(x)` is the k-th order statistic of the distance multiset
//! `{‖X_i − x‖}`, so it is unique even when the identity of the k-th
//! neighbor is not. `N_n(x, r)` counts points in the closed ball, and the two
//! are linked by `R_{n,k}(x) > r ⟺ N_n(x, r) < k`.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Row-major collection of `n` points in ℝ^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    pub fn new(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::Shape {
                expected: d,
                got: data.len() % d,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite coordinate at point {}, axis {}",
                pos / d,
                pos % d
            )));
        }
        let n = data.len() / d;
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Shape {
                    expected: d,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, d.max(1))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// The first `m` points, i.e. a nested prefix of the same realization.
    pub fn prefix(&self, m: usize) -> PointSet {
        let m = m.min(self.n);
        PointSet {
            data: self.data[..m * self.d].to_vec(),
            n: m,
            d: self.d,
        }
    }

    /// The points at `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.point(i));
        }
        PointSet {
            data,
            n: idx.len(),
            d: self.d,
        }
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter().map(|p| p[j]).collect()
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Shape {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

impl Metric {
    /// Euclidean sums squared differences left to right and takes one square root.
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
            Metric::Manhattan => a
                .iter()
                .zip(b)
                .fold(0.0, |acc, (x, y)| acc + (x - y).abs()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "manhattan" | "l1" => Ok(Metric::Manhattan),
            other => Err(Error::Parameter(format!("unknown metric `{other}`"))),
        }
    }
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| {
        let t = x - y;
        acc + t * t
    })
}

/// Sorted distances from a query to every point of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusProfile {
    pub query: Vec<f64>,
    pub sorted_dists: Vec<f64>,
}

impl RadiusProfile {
    /// `R_{n,k}` for 1-indexed `k`.
    pub fn radius(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.sorted_dists.get(i).copied())
    }
}

fn distances(ps: &PointSet, x: &[f64], m: Metric) -> Vec<f64> {
    ps.iter().map(|p| m.distance(p, x)).collect()
}

fn kth_smallest(mut dists: Vec<f64>, k: usize) -> f64 {
    let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::Range(format!("k = {k} outside 1..={max}")));
    }
    Ok(())
}

/// `R_{n,k}(x)`: the k-th smallest distance from `x` to the sample.
pub fn knn_radius(ps: &PointSet, x: &[f64], k: usize, m: Metric) -> Result<f64> {
    ps.check_query(x)?;
    check_k(k, ps.len())?;
    Ok(kth_smallest(distances(ps, x, m), k))
}

/// All radii at once: `sorted_dists[k−1] == knn_radius(ps, x, k, m)`.
pub fn radius_profile(ps: &PointSet, x: &[f64], m: Metric) -> Result<RadiusProfile> {
    ps.check_query(x)?;
    let mut sorted_dists = distances(ps, x, m);
    sorted_dists.sort_unstable_by(f64::total_cmp);
    Ok(RadiusProfile {
        query: x.to_vec(),
        sorted_dists,
    })
}

/// The `kmax` smallest distances in nondecreasing order, via partial selection.
pub fn nearest_distances(ps: &PointSet, x: &[f64], kmax: usize, m: Metric) -> Result<Vec<f64>> {
    ps.check_query(x)?;
    check_k(kmax, ps.len())?;
    let mut dists = distances(ps, x, m);
    if kmax < dists.len() {
        dists.select_nth_unstable_by(kmax - 1, f64::total_cmp);
        dists.truncate(kmax);
    }
    dists.sort_unstable_by(f64::total_cmp);
    Ok(dists)
}

/// `N_n(x, r)`: number of sample points in the closed ball `B(x, r)`.
pub fn counting_process(ps: &PointSet, x: &[f64], r: f64, m: Metric) -> Result<usize> {
    ps.check_query(x)?;
    if !(r >= 0.0) {
        return Err(Error::Range(format!("radius must be nonnegative, got {r}")));
    }
    Ok(ps.iter().filter(|p| m.distance(p, x) <= r).count())
}

/// k-NN radius of point `i` against the other `n − 1` points.
pub fn leave_one_out_radius(ps: &PointSet, i: usize, k: usize, m: Metric) -> Result<f64> {
    if i >= ps.len() {
        return Err(Error::Range(format!("index {i} outside 0..{}", ps.len())));
    }
    check_k(k, ps.len().saturating_sub(1))?;
    let x = ps.point(i);
    let dists: Vec<f64> = ps
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| m.distance(p, x))
        .collect();
    Ok(kth_smallest(dists, k))
}

/// Total order on distances for heaps and sorts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrdDist(pub f64);

impl Eq for OrdDist {}

impl PartialOrd for OrdDist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdDist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(xs.to_vec(), 1).unwrap()
    }

    fn brute_sorted(ps: &PointSet, x: &[f64], m: Metric) -> Vec<f64> {
        let mut v: Vec<f64> = (0..ps.len()).map(|i| m.distance(ps.point(i), x)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn radii_on_two_points() {
        let ps = line(&[0.0, 1.0]);
        assert_eq!(knn_radius(&ps, &[0.3], 1, Metric::Euclidean).unwrap(), 0.3);
        assert_eq!(knn_radius(&ps, &[0.3], 2, Metric::Euclidean).unwrap(), 0.7);
        let prof = radius_profile(&ps, &[0.3], Metric::Euclidean).unwrap();
        assert_eq!(prof.sorted_dists, vec![0.3, 0.7]);
    }

    #[test]
    fn closed_ball_counts_boundary() {
        let ps = line(&[0.0, 1.0]);
        assert_eq!(counting_process(&ps, &[0.3], 0.3, Metric::Euclidean).unwrap(), 1);
        assert_eq!(counting_process(&ps, &[0.3], 0.7, Metric::Euclidean).unwrap(), 2);
        assert!(counting_process(&ps, &[0.3], -0.1, Metric::Euclidean).is_err());
    }

    #[test]
    fn leave_one_out_on_three_points() {
        let ps = line(&[0.0, 0.5, 2.0]);
        assert_eq!(leave_one_out_radius(&ps, 1, 1, Metric::Euclidean).unwrap(), 0.5);
        assert_eq!(leave_one_out_radius(&ps, 1, 2, Metric::Euclidean).unwrap(), 1.5);
        assert!(leave_one_out_radius(&ps, 1, 3, Metric::Euclidean).is_err());
    }

    #[test]
    fn errors_on_bad_k_and_shape() {
        let ps = line(&[0.0, 1.0]);
        assert!(matches!(knn_radius(&ps, &[0.3], 0, Metric::Euclidean), Err(Error::Range(_))));
        assert!(matches!(knn_radius(&ps, &[0.3], 3, Metric::Euclidean), Err(Error::Range(_))));
        assert!(matches!(
            knn_radius(&ps, &[0.3, 0.1], 1, Metric::Euclidean),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(PointSet::new(vec![0.0, f64::NAN], 1).is_err());
        assert!(PointSet::new(vec![0.0, 1.0, 2.0], 2).is_err());
    }

    #[test]
    fn uniform_square_all_k_match_full_sort() {
        let mut rng = crate::rng::from_seed(11);
        let data: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let ps = PointSet::new(data, 2).unwrap();
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        let oracle = brute_sorted(&ps, &x, Metric::Euclidean);
        for k in 1..=200 {
            assert_eq!(knn_radius(&ps, &x, k, Metric::Euclidean).unwrap(), oracle[k - 1]);
        }
    }

    #[test]
    fn profile_matches_independent_queries() {
        let mut rng = crate::rng::from_seed(12);
        let data: Vec<f64> = (0..1500).map(|_| rng.random::<f64>()).collect();
        let ps = PointSet::new(data, 3).unwrap();
        let x = [0.2, 0.5, 0.9];
        for m in [Metric::Euclidean, Metric::Manhattan] {
            let prof = radius_profile(&ps, &x, m).unwrap();
            assert!(prof.sorted_dists.windows(2).all(|w| w[0] <= w[1]));
            for k in 1..=ps.len() {
                assert_eq!(prof.radius(k).unwrap(), knn_radius(&ps, &x, k, m).unwrap());
            }
            let head = nearest_distances(&ps, &x, 37, m).unwrap();
            assert_eq!(&head[..], &prof.sorted_dists[..37]);
        }
    }

    #[test]
    fn leave_one_out_matches_removed_point_oracle() {
        let mut rng = crate::rng::from_seed(13);
        let data: Vec<f64> = (0..300 * 2).map(|_| rng.random::<f64>()).collect();
        let ps = PointSet::new(data, 2).unwrap();
        for i in 0..ps.len() {
            let rest: Vec<&[f64]> = (0..ps.len()).filter(|&j| j != i).map(|j| ps.point(j)).collect();
            let rest = PointSet::from_rows(&rest).unwrap();
            let oracle = brute_sorted(&rest, ps.point(i), Metric::Euclidean);
            for k in [1, 2, 7, 150, 299] {
                assert_eq!(
                    leave_one_out_radius(&ps, i, k, Metric::Euclidean).unwrap(),
                    oracle[k - 1]
                );
            }
        }
    }

    fn small_instance() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, f64)> {
        (1usize..=4, 1usize..=60).prop_flat_map(|(d, n)| {
            (
                Just(d),
                prop::collection::vec(-5.0f64..5.0, n * d),
                prop::collection::vec(-5.0f64..5.0, d),
                0.0f64..6.0,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn duality_and_monotonicity((d, data, x, r) in small_instance()) {
            let ps = PointSet::new(data, d).unwrap();
            for m in [Metric::Euclidean, Metric::Manhattan] {
                let count = counting_process(&ps, &x, r, m).unwrap();
                let mut prev = 0.0;
                for k in 1..=ps.len() {
                    let rk = knn_radius(&ps, &x, k, m).unwrap();
                    prop_assert_eq!(count < k, rk > r);
                    prop_assert!(rk >= prev);
                    prev = rk;
                }
            }
        }

        #[test]
        fn translation_invariance(
            (d, data, x, _r) in small_instance(),
            shift in -100i32..100,
        ) {
            // Dyadic coordinates and integer shifts make every shifted value exact,
            // so only summation order could perturb the radii.
            let snap = |v: f64| (v * 1048576.0).round() / 1048576.0;
            let data: Vec<f64> = data.into_iter().map(snap).collect();
            let x: Vec<f64> = x.into_iter().map(snap).collect();
            let shift = f64::from(shift);
            let ps = PointSet::new(data.clone(), d).unwrap();
            let moved = PointSet::new(data.iter().map(|v| v + shift).collect(), d).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v + shift).collect();
            for k in 1..=ps.len() {
                let a = knn_radius(&ps, &x, k, Metric::Euclidean).unwrap();
                let b = knn_radius(&moved, &xs, k, Metric::Euclidean).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(f64::MIN_POSITIVE), "k={} a={} b={}", k, a, b);
            }
        }
    }
}
