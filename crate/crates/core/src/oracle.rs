//! Ground truth by exhaustive enumeration.
//!
//! [`Oracle::enumerate_events`] walks all `(mn)!` labelings of a grid.
//! [`Oracle::relative_order_events`] walks only the `|N(R)|!` relative orders
//! of the labels on the closed neighborhood of a region `R`; every out-edge
//! leaving a vertex of `R` depends on nothing else, so events over those
//! edges get exactly the same probability at a fraction of the cost.
//!
//! The permutation space is split into shards by the label of the first
//! cell. Shards return integer counts that are merged by addition, so results
//! do not depend on whether shards run in parallel.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::digraph::{GigDigraph, Labeling, OutEdges};
use crate::error::{GigError, Result};
use crate::lattice::{closed_neighborhood, Coord, GridDims, NeighborTable};
use crate::Rational;

/// Largest grid (in cells) the full oracle accepts by default: 9! labelings.
pub const DEFAULT_FULL_CAP: usize = 9;
/// Largest closed neighborhood the relative-order oracle accepts by default.
pub const DEFAULT_REGION_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub favorable: BigUint,
    pub total: BigUint,
    pub probability: Rational,
}

impl OracleResult {
    fn new(favorable: u64, total: &BigUint) -> Self {
        let probability = Rational::new(BigInt::from(favorable), BigInt::from(total.clone()));
        Self {
            favorable: BigUint::from(favorable),
            total: total.clone(),
            probability,
        }
    }
}

/// Exact distributional summary of one grid size over all labelings.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactStatistics {
    pub total_labelings: BigUint,
    pub expected_sinks: Rational,
    pub variance_sinks: Rational,
    pub sink_count_pmf: BTreeMap<usize, Rational>,
    pub expected_max_component: Rational,
    /// Total component mass over total sink count: the size of a uniformly
    /// chosen component, pooled over all labelings.
    pub expected_component_size_per_sink: Rational,
    /// `max_s E[|C(s)| | s is a sink]` over sink positions `s`.
    pub max_conditional_component_size: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub full_cap: usize,
    pub region_cap: usize,
    pub parallel: bool,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            full_cap: DEFAULT_FULL_CAP,
            region_cap: DEFAULT_REGION_CAP,
            parallel: true,
        }
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// Lexicographic successor; returns false after the last permutation.
fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).expect("successor exists");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Visits every permutation of `1..=k`, one shard per leading value, and
/// returns the shard accumulators in shard order.
fn sharded_permutations<A, I, V>(k: usize, parallel: bool, init: I, visit: V) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &[u32]) + Sync,
{
    let run_shard = |lead: u32| {
        let mut acc = init();
        let mut perm: Vec<u32> = std::iter::once(lead)
            .chain((1..=k as u32).filter(|&v| v != lead))
            .collect();
        loop {
            visit(&mut acc, &perm);
            if !next_permutation(&mut perm[1..]) {
                break;
            }
        }
        acc
    };
    if parallel {
        (1..=k as u32).into_par_iter().map(run_shard).collect()
    } else {
        (1..=k as u32).map(run_shard).collect()
    }
}

fn sum_counts(shards: Vec<Vec<u64>>, width: usize) -> Vec<u64> {
    shards.into_iter().fold(vec![0; width], |mut acc, s| {
        acc.iter_mut().zip(s).for_each(|(a, b)| *a += b);
        acc
    })
}

/// Greatest-increase out-edges of the vertices of a region, computed from the
/// labels on the region's closed neighborhood only.
#[derive(Clone, Debug)]
pub struct RegionEdges {
    cells: Vec<Coord>,
    region: Vec<usize>,
    region_neighbors: Vec<Vec<usize>>,
    labels: Vec<u32>,
    out: Vec<Option<usize>>,
}

impl RegionEdges {
    fn new(region: &[Coord], dims: GridDims) -> Result<Self> {
        let hood = closed_neighborhood(region, dims)?;
        let cells: Vec<Coord> = hood.into_iter().collect();
        let local = |c: Coord| cells.binary_search(&c).expect("neighborhood is closed");
        let mut region_sorted = region.to_vec();
        region_sorted.sort();
        region_sorted.dedup();
        let region_neighbors = region_sorted
            .iter()
            .map(|&v| {
                crate::lattice::neighbors(v, dims)
                    .expect("checked by closed_neighborhood")
                    .into_iter()
                    .map(local)
                    .collect()
            })
            .collect();
        let region_idx: Vec<usize> = region_sorted.iter().map(|&v| local(v)).collect();
        Ok(Self {
            labels: vec![0; cells.len()],
            out: vec![None; region_idx.len()],
            cells,
            region: region_idx,
            region_neighbors,
        })
    }

    fn assign(&mut self, perm: &[u32]) {
        self.labels.copy_from_slice(perm);
        for (slot, (&v, nbs)) in self.region.iter().zip(&self.region_neighbors).enumerate() {
            let mut best = v;
            for &nb in nbs {
                if self.labels[nb] > self.labels[best] {
                    best = nb;
                }
            }
            self.out[slot] = (best != v).then_some(best);
        }
    }

    /// Cells of the closed neighborhood, sorted.
    pub fn cells(&self) -> &[Coord] {
        &self.cells
    }

    /// Relative label (`1..=|N(R)|`) of a neighborhood cell.
    pub fn label(&self, c: Coord) -> Option<u32> {
        self.cells.binary_search(&c).ok().map(|i| self.labels[i])
    }
}

impl OutEdges for RegionEdges {
    /// # Panics
    /// If `c` is not a vertex of the region; its out-edge is not determined.
    fn out_edge(&self, c: Coord) -> Option<Coord> {
        let idx = self.cells.binary_search(&c).ok();
        let slot = idx
            .and_then(|i| self.region.iter().position(|&r| r == i))
            .unwrap_or_else(|| panic!("{c} is not a vertex of the enumerated region"));
        self.out[slot].map(|t| self.cells[t])
    }
}

#[derive(Default)]
struct StatsAcc {
    sink_hist: Vec<u64>,
    max_component_sum: u64,
    size_sum_by_cell: Vec<u64>,
    sink_times_by_cell: Vec<u64>,
}

impl Oracle {
    pub fn sequential(self) -> Self {
        Self { parallel: false, ..self }
    }

    pub fn with_full_cap(self, full_cap: usize) -> Self {
        Self { full_cap, ..self }
    }

    fn check_full(&self, dims: GridDims) -> Result<()> {
        let n = dims.cell_count();
        if n > self.full_cap {
            return Err(GigError::CapExceeded {
                what: "full labeling enumeration",
                requested: format!("{n} cells ({n}! labelings)"),
                cap: self.full_cap as u64,
                hint: "; use the Monte Carlo simulator for larger grids",
            });
        }
        Ok(())
    }

    pub fn enumerate_event<E>(&self, dims: GridDims, event: E) -> Result<OracleResult>
    where
        E: Fn(&GigDigraph) -> bool + Sync,
    {
        Ok(self.enumerate_events(dims, &[event])?.remove(0))
    }

    /// Counts, in one pass over all labelings, how many satisfy each event.
    pub fn enumerate_events<E>(&self, dims: GridDims, events: &[E]) -> Result<Vec<OracleResult>>
    where
        E: Fn(&GigDigraph) -> bool + Sync,
    {
        self.check_full(dims)?;
        let n = dims.cell_count();
        let table = NeighborTable::new(dims);
        let seed = (1..=n as u32).collect::<Vec<_>>();
        let shards = sharded_permutations(
            n,
            self.parallel,
            || {
                let g = GigDigraph::new(Labeling::new(dims, seed.clone()).expect("identity labeling"));
                (g, vec![0u64; events.len()])
            },
            |(g, counts), perm| {
                g.relabel(&table, perm);
                for (count, event) in counts.iter_mut().zip(events) {
                    *count += u64::from(event(g));
                }
            },
        );
        let counts = sum_counts(shards.into_iter().map(|(_, c)| c).collect(), events.len());
        let total = factorial(n);
        Ok(counts.into_iter().map(|c| OracleResult::new(c, &total)).collect())
    }

    pub fn relative_order_event<E>(&self, region: &[Coord], dims: GridDims, event: E) -> Result<OracleResult>
    where
        E: Fn(&RegionEdges) -> bool + Sync,
    {
        Ok(self.relative_order_events(region, dims, &[event])?.remove(0))
    }

    /// Enumerates the relative orders of labels on `N(region)` only.
    pub fn relative_order_events<E>(&self, region: &[Coord], dims: GridDims, events: &[E]) -> Result<Vec<OracleResult>>
    where
        E: Fn(&RegionEdges) -> bool + Sync,
    {
        let view = RegionEdges::new(region, dims)?;
        let k = view.cells.len();
        if k > self.region_cap {
            return Err(GigError::CapExceeded {
                what: "relative-order enumeration",
                requested: format!("a closed neighborhood of {k} cells"),
                cap: self.region_cap as u64,
                hint: "",
            });
        }
        let shards = sharded_permutations(
            k,
            self.parallel,
            || (view.clone(), vec![0u64; events.len()]),
            |(v, counts), perm| {
                v.assign(perm);
                for (count, event) in counts.iter_mut().zip(events) {
                    *count += u64::from(event(v));
                }
            },
        );
        let counts = sum_counts(shards.into_iter().map(|(_, c)| c).collect(), events.len());
        let total = factorial(k);
        Ok(counts.into_iter().map(|c| OracleResult::new(c, &total)).collect())
    }

    /// Sink-count distribution and component statistics from one full pass.
    pub fn exact_statistics(&self, dims: GridDims) -> Result<ExactStatistics> {
        self.check_full(dims)?;
        let n = dims.cell_count();
        let table = NeighborTable::new(dims);
        let seed = (1..=n as u32).collect::<Vec<_>>();
        let shards = sharded_permutations(
            n,
            self.parallel,
            || {
                let g = GigDigraph::new(Labeling::new(dims, seed.clone()).expect("identity labeling"));
                let acc = StatsAcc {
                    sink_hist: vec![0; n + 1],
                    size_sum_by_cell: vec![0; n],
                    sink_times_by_cell: vec![0; n],
                    ..StatsAcc::default()
                };
                (g, acc, vec![0u64; n])
            },
            |(g, acc, sizes), perm| {
                g.relabel(&table, perm);
                sizes.iter_mut().for_each(|s| *s = 0);
                for r in g.sink_indices() {
                    sizes[r] += 1;
                }
                let mut sinks = 0;
                let mut biggest = 0;
                for (i, out) in g.out_indices().iter().enumerate() {
                    if out.is_none() {
                        sinks += 1;
                        biggest = biggest.max(sizes[i]);
                        acc.size_sum_by_cell[i] += sizes[i];
                        acc.sink_times_by_cell[i] += 1;
                    }
                }
                acc.sink_hist[sinks] += 1;
                acc.max_component_sum += biggest;
            },
        );

        let mut hist = vec![0u64; n + 1];
        let mut max_sum = 0u64;
        let mut size_sum = vec![0u64; n];
        let mut sink_times = vec![0u64; n];
        for (_, acc, _) in shards {
            hist.iter_mut().zip(acc.sink_hist).for_each(|(a, b)| *a += b);
            max_sum += acc.max_component_sum;
            size_sum.iter_mut().zip(acc.size_sum_by_cell).for_each(|(a, b)| *a += b);
            sink_times.iter_mut().zip(acc.sink_times_by_cell).for_each(|(a, b)| *a += b);
        }

        let total = factorial(n);
        let total_int = BigInt::from(total.clone());
        let frac = |num: u64| Rational::new(BigInt::from(num), total_int.clone());
        let mut pmf = BTreeMap::new();
        let (mut first, mut second) = (0u64, 0u64);
        for (k, &count) in hist.iter().enumerate().filter(|(_, &c)| c > 0) {
            pmf.insert(k, frac(count));
            first += k as u64 * count;
            second += (k * k) as u64 * count;
        }
        let mean = frac(first);
        let variance = frac(second) - &mean * &mean;
        let conditional = size_sum
            .iter()
            .zip(&sink_times)
            .filter(|(_, &t)| t > 0)
            .map(|(&s, &t)| Rational::new(BigInt::from(s), BigInt::from(t)))
            .max()
            .expect("some cell is always a sink");
        // Every labeling's components partition all n cells.
        let pooled = Rational::new(BigInt::from(n as u64) * &total_int, BigInt::from(first));

        Ok(ExactStatistics {
            total_labelings: total,
            expected_sinks: mean,
            variance_sinks: variance,
            sink_count_pmf: pmf,
            expected_max_component: frac(max_sum),
            expected_component_size_per_sink: pooled,
            max_conditional_component_size: conditional,
        })
    }
}

pub fn enumerate_event<E>(dims: GridDims, event: E) -> Result<OracleResult>
where
    E: Fn(&GigDigraph) -> bool + Sync,
{
    Oracle::default().enumerate_event(dims, event)
}

pub fn relative_order_event<E>(region: &[Coord], dims: GridDims, event: E) -> Result<OracleResult>
where
    E: Fn(&RegionEdges) -> bool + Sync,
{
    Oracle::default().relative_order_event(region, dims, event)
}

pub fn exact_statistics(dims: GridDims) -> Result<ExactStatistics> {
    Oracle::default().exact_statistics(dims)
}
