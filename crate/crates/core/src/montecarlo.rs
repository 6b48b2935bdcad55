//! Seeded simulation of random labelings.
//!
//! Trials are split across a fixed number of shards. Shard `s` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `s`, and every shard reports
//! integer tallies only. Floating-point statistics are derived once from the
//! merged tallies, so output is bit-identical for a given
//! `(seed, trials, shards)` regardless of thread scheduling.

use std::collections::BTreeMap;

use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{GigDigraph, Labeling, OutEdges};
use crate::error::{GigError, Result};
use crate::lattice::{Coord, GridDims, LatticePath, NeighborTable};

pub const DEFAULT_SHARDS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimulationConfig {
    pub dims: GridDims,
    pub trials: u64,
    pub seed: u64,
    pub shards: usize,
}

impl SimulationConfig {
    pub fn new(dims: GridDims, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(GigError::NoTrials);
        }
        Ok(Self { dims, trials, seed, shards: DEFAULT_SHARDS })
    }

    pub fn with_shards(self, shards: usize) -> Self {
        Self { shards: shards.max(1), ..self }
    }
}

/// Events whose frequency the simulator can track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrackedEvent {
    /// The digraph contains this directed path.
    Path(LatticePath),
    /// Every listed cell is a sink.
    Sinks(Vec<Coord>),
    /// The out-path of the first cell passes through the second.
    Connected(Coord, Coord),
}

impl TrackedEvent {
    fn check(&self, dims: GridDims) -> Result<()> {
        match self {
            TrackedEvent::Path(p) => p.check_within(dims),
            TrackedEvent::Sinks(cells) if cells.is_empty() => Err(GigError::EmptySet),
            TrackedEvent::Sinks(cells) => cells.iter().try_for_each(|&c| dims.check(c)),
            TrackedEvent::Connected(a, b) => dims.check(*a).and(dims.check(*b)),
        }
    }

    pub fn holds(&self, g: &GigDigraph) -> bool {
        match self {
            TrackedEvent::Path(p) => g.contains_path(p),
            TrackedEvent::Sinks(cells) => g.all_sinks(cells),
            TrackedEvent::Connected(a, b) => g.reaches(*a, *b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedEvent {
    pub name: String,
    pub event: TrackedEvent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventFrequency<F> {
    pub hits: u64,
    pub estimate: F,
    pub stderr: F,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationStats<F> {
    pub trials: u64,
    pub mean_sinks: F,
    pub var_sinks: F,
    pub stderr_mean: F,
    /// Component size -> number of components of that size over all trials.
    pub component_size_histogram: BTreeMap<usize, u64>,
    pub mean_max_component: F,
    pub stderr_max_component: F,
    pub event_frequencies: BTreeMap<String, EventFrequency<F>>,
}

/// Uniform labeling: a Fisher-Yates shuffle of `1..=mn` laid out row-major.
pub fn sample_labeling<R: Rng + ?Sized>(dims: GridDims, rng: &mut R) -> Labeling {
    let mut labels: Vec<u32> = (1..=dims.cell_count() as u32).collect();
    labels.shuffle(rng);
    Labeling::new(dims, labels).expect("a shuffled identity is a permutation")
}

/// The generator used by shard `shard` of a simulation seeded with `seed`.
pub fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

#[derive(Clone, Debug, Default)]
struct Tally {
    trials: u64,
    sink_sum: u64,
    sink_sq_sum: u64,
    max_sum: u64,
    max_sq_sum: u64,
    histogram: BTreeMap<usize, u64>,
    hits: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.sink_sum += other.sink_sum;
        self.sink_sq_sum += other.sink_sq_sum;
        self.max_sum += other.max_sum;
        self.max_sq_sum += other.max_sq_sum;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        if self.hits.is_empty() {
            self.hits = other.hits;
        } else {
            self.hits.iter_mut().zip(other.hits).for_each(|(a, b)| *a += b);
        }
        self
    }
}

fn run_shard(cfg: &SimulationConfig, shard: usize, trials: u64, events: &[NamedEvent]) -> Tally {
    let dims = cfg.dims;
    let n = dims.cell_count();
    let table = NeighborTable::new(dims);
    let mut rng = shard_rng(cfg.seed, shard);
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    let mut g = GigDigraph::new(Labeling::new(dims, labels.clone()).expect("identity labeling"));
    let mut sizes = vec![0u64; n];
    let mut tally = Tally {
        trials,
        hits: vec![0; events.len()],
        ..Tally::default()
    };
    for _ in 0..trials {
        labels.shuffle(&mut rng);
        g.relabel(&table, &labels);
        sizes.iter_mut().for_each(|s| *s = 0);
        for r in g.sink_indices() {
            sizes[r] += 1;
        }
        let mut sinks = 0u64;
        let mut biggest = 0u64;
        for (i, out) in g.out_indices().iter().enumerate() {
            if out.is_none() {
                sinks += 1;
                biggest = biggest.max(sizes[i]);
                *tally.histogram.entry(sizes[i] as usize).or_default() += 1;
            }
        }
        tally.sink_sum += sinks;
        tally.sink_sq_sum += sinks * sinks;
        tally.max_sum += biggest;
        tally.max_sq_sum += biggest * biggest;
        for (hit, e) in tally.hits.iter_mut().zip(events) {
            *hit += u64::from(e.event.holds(&g));
        }
    }
    tally
}

/// Sample mean, unbiased variance and standard error of the mean from exact sums.
fn moments<F: Float + FromPrimitive>(n: u64, sum: u64, sq_sum: u64) -> (F, F, F) {
    let nf = F::from_u64(n).expect("trial count fits a float");
    let mean = F::from_u64(sum).expect("sum fits a float") / nf;
    if n < 2 {
        return (mean, F::zero(), F::zero());
    }
    // n * sum(x^2) - (sum x)^2 is exact in integers.
    let spread = (n as u128) * (sq_sum as u128) - (sum as u128) * (sum as u128);
    let var = F::from_u128(spread).expect("spread fits a float") / (nf * (nf - F::one()));
    (mean, var, (var / nf).sqrt())
}

pub fn simulate<F>(cfg: &SimulationConfig, events: &[NamedEvent]) -> Result<SimulationStats<F>>
where
    F: Float + FromPrimitive,
{
    if cfg.trials == 0 {
        return Err(GigError::NoTrials);
    }
    for e in events {
        e.event.check(cfg.dims)?;
    }
    let shards = cfg.shards.max(1);
    let base = cfg.trials / shards as u64;
    let extra = cfg.trials % shards as u64;
    let tallies: Vec<Tally> = (0..shards)
        .into_par_iter()
        .map(|s| run_shard(cfg, s, base + u64::from((s as u64) < extra), events))
        .collect();
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let (mean_sinks, var_sinks, stderr_mean) = moments::<F>(tally.trials, tally.sink_sum, tally.sink_sq_sum);
    let (mean_max, _, stderr_max) = moments::<F>(tally.trials, tally.max_sum, tally.max_sq_sum);
    let event_frequencies = events
        .iter()
        .zip(&tally.hits)
        .map(|(e, &hits)| {
            // Indicator: sum of squares equals the sum.
            let (estimate, _, stderr) = moments::<F>(tally.trials, hits, hits);
            (e.name.clone(), EventFrequency { hits, estimate, stderr })
        })
        .collect();

    Ok(SimulationStats {
        trials: tally.trials,
        mean_sinks,
        var_sinks,
        stderr_mean,
        component_size_histogram: tally.histogram,
        mean_max_component: mean_max,
        stderr_max_component: stderr_max,
        event_frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: usize, n: usize) -> GridDims {
        GridDims::new(m, n).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_labeling(d(4, 5), &mut shard_rng(7, 0));
        let b = sample_labeling(d(4, 5), &mut shard_rng(7, 0));
        let other = sample_labeling(d(4, 5), &mut shard_rng(7, 1));
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_eq!(sample_labeling(d(1, 1), &mut shard_rng(3, 0)).as_slice(), [1]);
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(SimulationConfig::new(d(3, 3), 0, 1), Err(GigError::NoTrials));
    }

    #[test]
    fn moments_from_integer_sums() {
        // Samples 1, 2, 3: mean 2, unbiased variance 1.
        let (m, v, se): (f64, f64, f64) = moments(3, 6, 14);
        assert_eq!((m, v), (2.0, 1.0));
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let (m, v, se): (f64, f64, f64) = moments(1, 5, 25);
        assert_eq!((m, v, se), (5.0, 0.0, 0.0));
    }

    #[test]
    fn component_sizes_sum_to_grid_size() {
        let cfg = SimulationConfig::new(d(4, 4), 500, 11).unwrap().with_shards(3);
        let s: SimulationStats<f64> = simulate(&cfg, &[]).unwrap();
        let mass: u64 = s.component_size_histogram.iter().map(|(&k, &v)| k as u64 * v).sum();
        assert_eq!(mass, 500 * 16);
        let comps: u64 = s.component_size_histogram.values().sum();
        assert!((comps as f64 / 500.0 - s.mean_sinks).abs() < 1e-12);
    }

    #[test]
    fn bad_events_are_rejected() {
        let cfg = SimulationConfig::new(d(3, 3), 10, 1).unwrap();
        let ev = NamedEvent {
            name: "far".into(),
            event: TrackedEvent::Sinks(vec![Coord::new(9, 9)]),
        };
        assert!(simulate::<f64>(&cfg, &[ev]).is_err());
    }

    #[test]
    fn identical_config_gives_identical_stats() {
        let cfg = SimulationConfig::new(d(5, 5), 2_000, 42).unwrap();
        let ev = vec![NamedEvent {
            name: "corner".into(),
            event: TrackedEvent::Sinks(vec![Coord::new(1, 1)]),
        }];
        let a: SimulationStats<f64> = simulate(&cfg, &ev).unwrap();
        let b: SimulationStats<f64> = simulate(&cfg, &ev).unwrap();
        assert_eq!(a, b);
        let c: SimulationStats<f32> = simulate(&cfg, &ev).unwrap();
        assert_eq!(c.event_frequencies["corner"].hits, a.event_frequencies["corner"].hits);
    }
}
