//! Closed-form probabilities for randomly labeled GIG digraphs.
//!
//! Everything here is generic over [`Scalar`]; instantiate with
//! [`crate::Rational`] for exact values, or `f64` for quick estimates of the
//! same expressions. No routine in this module samples or enumerates labelings.

use std::collections::BTreeSet;

use crate::error::{GigError, Result};
use crate::lattice::{
    self, k_sequence, squared_distance, Coord, GridDims, LatticePath, NeighborTable,
};
use crate::scalar::Scalar;

/// Default largest vertex set accepted by [`multi_sink_probability`].
pub const DEFAULT_SINK_SET_CAP: usize = 8;

/// Probability that a random labeling contains `path` as a directed path:
/// `1/K_1 * ... * 1/K_{i-1}`, or zero when two non-consecutive vertices are
/// lattice neighbors, since labels increase along a directed path and the
/// earlier vertex would point at the later one instead.
pub fn path_probability<S: Scalar>(path: &LatticePath, dims: GridDims) -> Result<S> {
    let ks = k_sequence(path, dims)?;
    if has_chord(path) {
        return Ok(S::zero());
    }
    let used = &ks.values()[..path.edge_count()];
    Ok(used.iter().fold(S::one(), |acc, &k| acc * S::recip_count(k as u64)))
}

/// True when some pair of vertices at least two steps apart along the path are lattice neighbors.
pub fn has_chord(path: &LatticePath) -> bool {
    let v = path.vertices();
    (0..v.len()).any(|i| v.iter().skip(i + 2).any(|&w| squared_distance(v[i], w) == 1))
}

pub fn multi_sink_probability<S: Scalar>(vertices: &[Coord], dims: GridDims) -> Result<S> {
    multi_sink_probability_capped(vertices, dims, DEFAULT_SINK_SET_CAP)
}

/// Probability that every vertex in `vertices` is a sink.
///
/// Sums `prod_j 1/|N(first j)|` over all orderings of the set by label. The
/// ordering sum factors through prefixes, so it is accumulated over subsets:
/// `f(S) = (1/|N(S)|) * sum_{v in S} f(S \ v)`.
pub fn multi_sink_probability_capped<S: Scalar>(vertices: &[Coord], dims: GridDims, cap: usize) -> Result<S> {
    if vertices.is_empty() {
        return Err(GigError::EmptySet);
    }
    for &v in vertices {
        dims.check(v)?;
    }
    let set: Vec<Coord> = vertices.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if set.len() > cap {
        return Err(GigError::CapExceeded {
            what: "joint sink probability",
            requested: format!("{} vertices", set.len()),
            cap: cap as u64,
            hint: "",
        });
    }
    for (i, &a) in set.iter().enumerate() {
        if set[i + 1..].iter().any(|&b| squared_distance(a, b) == 1) {
            return Ok(S::zero());
        }
    }

    let table = NeighborTable::new(dims);
    let closed: Vec<Vec<usize>> = set
        .iter()
        .map(|&v| {
            let i = dims.index_of(v);
            std::iter::once(i).chain(table.neighbors(i).iter().copied()).collect()
        })
        .collect();
    let full = 1usize << set.len();
    let mut f: Vec<S> = vec![S::zero(); full];
    f[0] = S::one();
    let mut covered = vec![false; dims.cell_count()];
    for mask in 1..full {
        covered.iter_mut().for_each(|x| *x = false);
        let mut size = 0u64;
        let mut inner = S::zero();
        for (bit, cells) in closed.iter().enumerate() {
            if mask & (1 << bit) == 0 {
                continue;
            }
            inner = inner + f[mask & !(1 << bit)].clone();
            for &c in cells {
                if !covered[c] {
                    covered[c] = true;
                    size += 1;
                }
            }
        }
        f[mask] = inner / S::from_count(size);
    }
    Ok(f[full - 1].clone())
}

fn distinct(a: Coord, b: Coord, dims: GridDims) -> Result<()> {
    dims.check(a)?;
    dims.check(b)?;
    if a == b {
        return Err(GigError::SameVertex(a));
    }
    Ok(())
}

/// Sink events at `a` and `b` are independent iff the cells are more than 2 apart.
pub fn sinks_independent(a: Coord, b: Coord, dims: GridDims) -> Result<bool> {
    distinct(a, b, dims)?;
    Ok(squared_distance(a, b) > 4)
}

/// `Cov(X_a, X_b)` for the sink indicators of two distinct cells.
pub fn sink_covariance<S: Scalar>(a: Coord, b: Coord, dims: GridDims) -> Result<S> {
    distinct(a, b, dims)?;
    let na = lattice::neighbors(a, dims)?;
    let nb = lattice::neighbors(b, dims)?;
    let ka = na.len() as u64 + 1;
    let kb = nb.len() as u64 + 1;
    if na.contains(&b) {
        return Ok(S::zero() - S::recip_count(ka * kb));
    }
    Ok(match na.intersection(&nb).count() {
        0 => S::zero(),
        1 => S::recip_count((ka + kb - 1) * ka * kb),
        2 => S::ratio(2, (ka + kb - 2) * ka * kb),
        shared => unreachable!("lattice cells share at most two neighbors, got {shared}"),
    })
}

fn require_at_least(dims: GridDims, min: usize, quantity: &'static str, requirement: &'static str) -> Result<()> {
    if dims.rows() < min || dims.cols() < min {
        return Err(GigError::Domain { quantity, requirement, dims });
    }
    Ok(())
}

/// `mn/5 + (m+n)/10 + 2/15`, valid for `m, n >= 3`.
pub fn expected_sinks<S: Scalar>(dims: GridDims) -> Result<S> {
    require_at_least(dims, 3, "expected sink count", "m >= 3 and n >= 3")?;
    let (m, n) = (dims.rows() as u64, dims.cols() as u64);
    Ok(S::ratio(m * n, 5) + S::ratio(m + n, 10) + S::ratio(2, 15))
}

/// `13mn/225 + (m+n)/150 + 52/1575`, valid for `m, n >= 6`.
pub fn variance_sinks_closed<S: Scalar>(dims: GridDims) -> Result<S> {
    require_at_least(dims, 6, "sink count variance", "m >= 6 and n >= 6")?;
    let (m, n) = (dims.rows() as u64, dims.cols() as u64);
    Ok(S::ratio(13 * m * n, 225) + S::ratio(m + n, 150) + S::ratio(52, 1575))
}

/// Bernoulli variance `p(1-p)` of one cell's sink indicator, `p = 1/|N(v)|`.
pub fn sink_indicator_variance<S: Scalar>(v: Coord, dims: GridDims) -> Result<S> {
    let k = lattice::neighbors(v, dims)?.len() as u64 + 1;
    Ok(S::ratio(k - 1, k * k))
}

/// `sum_i Var(X_i) + sum_{i != j} Cov(X_i, X_j)`, valid for `m, n >= 3`.
pub fn variance_sinks_by_pairs<S: Scalar>(dims: GridDims) -> Result<S> {
    require_at_least(dims, 3, "pairwise sink count variance", "m >= 3 and n >= 3")?;
    let mut total = S::zero();
    for a in dims.cells() {
        total = total + sink_indicator_variance::<S>(a, dims)?;
        // Covariance vanishes beyond squared distance 4.
        for dr in -2isize..=2 {
            for dc in -2isize..=2 {
                if (dr, dc) == (0, 0) || dr * dr + dc * dc > 4 {
                    continue;
                }
                let (r, c) = (a.row as isize + dr, a.col as isize + dc);
                if r < 1 || c < 1 {
                    continue;
                }
                let b = Coord::new(r as usize, c as usize);
                if dims.contains(b) {
                    total = total + sink_covariance::<S>(a, b, dims)?;
                }
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityBound<S> {
    pub shortest_length: usize,
    pub path_count: u64,
    /// Smallest probability among the shortest paths (the `L` of the count bound).
    pub min_path_prob: S,
    pub least_likely_path: LatticePath,
    /// `path_count * min_path_prob`.
    pub count_times_min: S,
    /// Sum of all shortest-path probabilities; paths from one source are mutually exclusive.
    pub sum_over_paths: S,
}

pub fn connectivity_lower_bound<S: Scalar>(a: Coord, b: Coord, dims: GridDims) -> Result<ConnectivityBound<S>> {
    connectivity_lower_bound_capped(a, b, dims, lattice::DEFAULT_PATH_CAP)
}

/// Lower bounds on the probability that `a`'s out-path reaches `b`.
pub fn connectivity_lower_bound_capped<S: Scalar>(
    a: Coord,
    b: Coord,
    dims: GridDims,
    cap: u64,
) -> Result<ConnectivityBound<S>> {
    let paths = lattice::monotone_paths_capped(a, b, dims, cap)?;
    let mut sum = S::zero();
    let mut least: Option<(S, &LatticePath)> = None;
    for p in &paths {
        let prob: S = path_probability(p, dims)?;
        sum = sum + prob.clone();
        if least.as_ref().is_none_or(|(m, _)| prob < *m) {
            least = Some((prob, p));
        }
    }
    let (min, path) = least.expect("distinct endpoints have at least one shortest path");
    let count = paths.len() as u64;
    Ok(ConnectivityBound {
        shortest_length: path.edge_count(),
        path_count: count,
        count_times_min: S::from_count(count) * min.clone(),
        min_path_prob: min,
        least_likely_path: path.clone(),
        sum_over_paths: sum,
    })
}

/// `t_l = binom(l, ceil(l/2)) * prod_{i=1}^{l} 1/(2+i)` for `l = 1..=last`, at index `l - 1`.
///
/// Built from the exact ratio `t_{l+1}/t_l = c_l/(l+3)` with `c_l = 2` for odd
/// `l` and `(l+1)/(l/2+1)` for even `l`.
pub fn path_weight_terms<S: Scalar>(last: usize) -> Vec<S> {
    let mut terms = Vec::with_capacity(last);
    if last == 0 {
        return terms;
    }
    let mut t = S::recip_count(3);
    terms.push(t.clone());
    for l in 1..last as u64 {
        let step = if l % 2 == 1 {
            S::ratio(2, l + 3)
        } else {
            S::ratio(l + 1, (l / 2 + 1) * (l + 3))
        };
        t = t * step;
        terms.push(t.clone());
    }
    terms
}

/// `sum_{n=1}^{M} 4n sum_{l=n}^{M^2} binom(l, ceil(l/2)) prod_{i=1}^{l} 1/(2+i)` with `M = max(m, n)`.
pub fn component_size_bound<S: Scalar>(dims: GridDims) -> S {
    let big_m = dims.max_side();
    let terms = path_weight_terms::<S>(big_m * big_m);
    // suffix[n-1] = sum_{l=n}^{M^2} t_l
    let mut suffix = vec![S::zero(); terms.len() + 1];
    for l in (0..terms.len()).rev() {
        suffix[l] = suffix[l + 1].clone() + terms[l].clone();
    }
    (1..=big_m).fold(S::zero(), |acc, n| acc + S::from_count(4 * n as u64) * suffix[n - 1].clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBoundResult<S> {
    pub truncated_value: S,
    pub tail_bound: S,
    pub certified_upper: S,
    /// Outer terms `n = 1..=terms_used` were summed explicitly.
    pub terms_used: usize,
    /// Inner sums were truncated at `l = inner_terms`.
    pub inner_terms: usize,
}

/// Truncation of `sum_{n>=1} 4n b_n`, `b_n = sum_{l>=n} t_l`, with a rigorous tail.
///
/// Inner tails use `t_{l+1}/t_l <= 2/(l+3)`, so `sum_{l>L} t_l <= t_{L+1} (L+4)/(L+2)`.
/// The outer tail uses `b_{n+1} <= (2/3) b_n` for `n >= 2`, which gives
/// `sum_{k>=1} 4(N+k) b_{N+k} <= 4 b_N (2N + 6)`.
pub fn series_truncation<S: Scalar>(outer_terms: usize, inner_terms: usize) -> SeriesBoundResult<S> {
    let outer = outer_terms.max(2);
    let inner = inner_terms.max(outer);
    let terms = path_weight_terms::<S>(inner + 1);
    let next = terms[inner].clone();
    let inner_tail = next * S::ratio(inner as u64 + 4, inner as u64 + 2);

    let mut suffix = vec![S::zero(); inner + 1];
    for l in (0..inner).rev() {
        suffix[l] = suffix[l + 1].clone() + terms[l].clone();
    }
    let truncated = (1..=outer).fold(S::zero(), |acc, n| acc + S::from_count(4 * n as u64) * suffix[n - 1].clone());

    let n = outer as u64;
    let weight_sum = S::from_count(2 * n * (n + 1));
    let b_outer_upper = suffix[outer - 1].clone() + inner_tail.clone();
    let tail = weight_sum * inner_tail + S::from_count(4 * (2 * n + 6)) * b_outer_upper;

    SeriesBoundResult {
        certified_upper: truncated.clone() + tail.clone(),
        truncated_value: truncated,
        tail_bound: tail,
        terms_used: outer,
        inner_terms: inner,
    }
}

/// Smallest truncation (over `N = 2, 3, ...` with inner cut `2N + 8`) whose tail is at most `eps`.
pub fn series_bound<S: Scalar>(eps: &S) -> Result<SeriesBoundResult<S>> {
    if *eps <= S::zero() {
        return Err(GigError::NonPositiveTolerance);
    }
    let mut outer = 2;
    loop {
        let r = series_truncation::<S>(outer, 2 * outer + 8);
        if r.tail_bound <= *eps {
            return Ok(r);
        }
        outer += 1;
    }
}
