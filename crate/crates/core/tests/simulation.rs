mod common;

use common::{c, d, path};
use gig::exact;
use gig::montecarlo::{sample_labeling, shard_rng, simulate, NamedEvent, SimulationConfig, TrackedEvent};
use gig::oracle::Oracle;
use gig::{GridDims, Rational, SimulationStats64};
use num_traits::ToPrimitive;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn f(r: &Rational) -> f64 {
    r.to_f64().unwrap()
}

fn run(dims: GridDims, trials: u64, seed: u64, events: &[NamedEvent]) -> SimulationStats64 {
    simulate(&SimulationConfig::new(dims, trials, seed).unwrap(), events).unwrap()
}

fn within(estimate: f64, exact: f64, stderr: f64, sigmas: f64) -> bool {
    (estimate - exact).abs() <= sigmas * stderr
}

#[test]
fn estimates_converge_to_exact_values_on_small_grids() {
    for (dims, seed) in [(d(2, 3), 5), (d(3, 3), 6)] {
        let stats = Oracle::default().exact_statistics(dims).unwrap();
        let events = vec![
            NamedEvent { name: "step".into(), event: TrackedEvent::Path(path(&[(2, 1), (2, 2)])) },
            NamedEvent { name: "corners".into(), event: TrackedEvent::Sinks(vec![c(1, 1), c(2, 3)]) },
            NamedEvent { name: "reach".into(), event: TrackedEvent::Connected(c(1, 1), c(2, 2)) },
        ];
        let exact_events: Vec<Rational> = events
            .iter()
            .map(|e| Oracle::default().enumerate_event(dims, |g| e.event.holds(g)).unwrap().probability)
            .collect();
        let s = run(dims, 1_000_000, seed, &events);
        assert!(within(s.mean_sinks, f(&stats.expected_sinks), s.stderr_mean, 5.0), "{dims} mean");
        assert!((s.var_sinks / f(&stats.variance_sinks) - 1.0).abs() < 0.02, "{dims} variance");
        assert!(
            within(s.mean_max_component, f(&stats.expected_max_component), s.stderr_max_component, 5.0),
            "{dims} max component"
        );
        for (e, p) in events.iter().zip(&exact_events) {
            let est = &s.event_frequencies[&e.name];
            assert!(within(est.estimate, f(p), est.stderr, 5.0), "{dims} {}", e.name);
        }
    }
}

#[test]
fn component_histogram_matches_sink_count() {
    let s = run(d(4, 6), 3_000, 9, &[]);
    let components: u64 = s.component_size_histogram.values().sum();
    let cells: u64 = s.component_size_histogram.iter().map(|(&k, &v)| k as u64 * v).sum();
    assert_eq!(cells, 3_000 * 24);
    assert!((components as f64 / 3_000.0 - s.mean_sinks).abs() < 1e-12);
}

#[test]
fn largest_label_position_is_uniform() {
    let dims = d(3, 3);
    let draws = 100_000;
    let mut rng = shard_rng(2024, 0);
    let mut counts = [0u64; 9];
    for _ in 0..draws {
        let lab = sample_labeling(dims, &mut rng);
        counts[dims.index_of(lab.cell_with_label(9).unwrap())] += 1;
    }
    let expected = draws as f64 / 9.0;
    let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(8.0).unwrap().inverse_cdf(0.999);
    assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
}

#[test]
fn result_does_not_depend_on_thread_count() {
    let cfg = SimulationConfig::new(d(5, 5), 5_000, 77).unwrap().with_shards(4);
    let many: SimulationStats64 = simulate(&cfg, &[]).unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| simulate::<f64>(&cfg, &[]).unwrap());
    assert_eq!(many, one);
}

#[test]
fn mean_component_size_per_sink_stays_under_component_bound() {
    for m in 2..=8 {
        let dims = d(m, m);
        let s = run(dims, 5_000, m as u64, &[]);
        let components: u64 = s.component_size_histogram.values().sum();
        let per_sink = (5_000 * dims.cell_count()) as f64 / components as f64;
        let bound: Rational = exact::component_size_bound(dims);
        assert!(per_sink <= f(&bound), "{dims}: {per_sink} > {bound}");
    }
}

/// The largest basin is not covered by the component bound from 3x3 upward.
#[test]
fn mean_max_component_exceeds_component_bound_from_three_by_three() {
    let s2 = run(d(2, 2), 20_000, 1, &[]);
    assert!(s2.mean_max_component <= f(&exact::component_size_bound(d(2, 2))));
    for m in 3..=8 {
        let dims = d(m, m);
        let s = run(dims, 20_000, m as u64, &[]);
        let bound = f(&exact::component_size_bound(dims));
        assert!(s.mean_max_component - 5.0 * s.stderr_max_component > bound, "{dims}");
    }
}
