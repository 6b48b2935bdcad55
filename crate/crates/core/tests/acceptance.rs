//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{c, d, non_adjacent_sets, p1, p2, p3, path, q, recip};
use gig::exact::{self, SeriesBoundResult};
use gig::lattice::{all_paths_up_to, squared_distance};
use gig::montecarlo::{simulate, SimulationConfig};
use gig::oracle::Oracle;
use gig::{GigDigraph, OutEdges, Rational, SimulationStats64};
use num_traits::ToPrimitive;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn worked_path_example() -> Outcome {
    let start = Instant::now();
    let dims = d(3, 3);
    let p = path(&[(2, 1), (2, 2), (1, 2)]);
    let formula: Rational = exact::path_probability(&p, dims).map_err(|e| e.to_string())?;
    ensure(formula == q(1, 28), format!("formula gave {formula}"))?;
    let r = Oracle::default()
        .sequential()
        .enumerate_event(dims, |g| g.contains_path(&p))
        .map_err(|e| e.to_string())?;
    ensure(r.total == 362_880u32.into(), format!("enumerated {} labelings", r.total))?;
    ensure(r.favorable == 12_960u32.into(), format!("favorable count {}", r.favorable))?;
    ensure(r.probability == formula, format!("oracle {} vs formula {formula}", r.probability))?;
    let t = within_time(start, Duration::from_secs(30))?;
    Ok(format!("1/28 formula, 12960/362880 by sequential enumeration in {t:.2?}"))
}

fn three_shortest_paths() -> Outcome {
    let dims = d(5, 5);
    let prob = |p| exact::path_probability::<Rational>(&p, dims).map_err(|e| e.to_string());
    let (a, b, c3) = (prob(p1())?, prob(p2())?, prob(p3())?);
    let expect = [
        recip(4 * 7 * 10 * 13 * 15 * 18),
        recip(4 * 7 * 10 * 12 * 14 * 16),
        recip(4 * 7 * 9 * 11 * 14 * 16),
    ];
    ensure([&a, &b, &c3] == [&expect[0], &expect[1], &expect[2]], format!("got {a}, {b}, {c3}"))?;
    ensure(c3 > b && b > a, "ordering P3 > P2 > P1 violated")?;
    Ok(format!("P1 = {a}, P2 = {b}, P3 = {c3}, P3 > P2 > P1"))
}

fn shared_neighbor_pair() -> Outcome {
    let start = Instant::now();
    let dims = d(3, 4);
    let pair = [c(2, 2), c(3, 3)];
    let formula: Rational = exact::multi_sink_probability(&pair, dims).map_err(|e| e.to_string())?;
    ensure(formula == q(9, 140), format!("formula gave {formula}"))?;
    ensure(formula == recip(35) + recip(28), "not 1/35 + 1/28")?;
    let r = Oracle::default()
        .relative_order_event(&pair, dims, |v| v.all_sinks(&pair))
        .map_err(|e| e.to_string())?;
    ensure(r.total == 5_040u32.into(), format!("enumerated {} orders", r.total))?;
    ensure(r.probability == formula, format!("oracle {}", r.probability))?;
    let t = within_time(start, Duration::from_secs(1))?;
    Ok(format!("9/140 formula and over 7! relative orders in {t:.2?}"))
}

fn expected_sink_count() -> Outcome {
    let dims = d(3, 3);
    let stats = Oracle::default().exact_statistics(dims).map_err(|e| e.to_string())?;
    let closed: Rational = exact::expected_sinks(dims).map_err(|e| e.to_string())?;
    ensure(stats.expected_sinks == q(38, 15), format!("enumeration gave {}", stats.expected_sinks))?;
    ensure(closed == stats.expected_sinks, format!("closed form gave {closed}"))?;
    for m in 3..=8 {
        for n in 3..=8 {
            let dims = d(m, n);
            let by_vertex = dims
                .cells()
                .map(|v| exact::multi_sink_probability::<Rational>(&[v], dims))
                .sum::<gig::Result<Rational>>()
                .map_err(|e| e.to_string())?;
            let closed: Rational = exact::expected_sinks(dims).map_err(|e| e.to_string())?;
            ensure(by_vertex == closed, format!("{dims}: {by_vertex} != {closed}"))?;
        }
    }
    Ok("3x3 enumeration 38/15 == closed form; vertex sums match for 3..8 x 3..8".into())
}

fn sink_count_variance() -> Outcome {
    let start = Instant::now();
    for m in 6..=10 {
        for n in 6..=10 {
            let dims = d(m, n);
            let pairs: Rational = exact::variance_sinks_by_pairs(dims).map_err(|e| e.to_string())?;
            let closed: Rational = exact::variance_sinks_closed(dims).map_err(|e| e.to_string())?;
            ensure(pairs == closed, format!("{dims}: {pairs} != {closed}"))?;
        }
    }
    let small = Oracle::default().exact_statistics(d(3, 3)).map_err(|e| e.to_string())?;
    let pairs: Rational = exact::variance_sinks_by_pairs(d(3, 3)).map_err(|e| e.to_string())?;
    ensure(pairs == small.variance_sinks, format!("3x3: {pairs} != {}", small.variance_sinks))?;

    let dims = d(6, 6);
    let cfg = SimulationConfig::new(dims, 100_000, 20_240_601).map_err(|e| e.to_string())?;
    let s: SimulationStats64 = simulate(&cfg, &[]).map_err(|e| e.to_string())?;
    let mean = q(128, 15).to_f64().unwrap();
    let var = q(3454, 1575).to_f64().unwrap();
    let z = (s.mean_sinks - mean) / s.stderr_mean;
    ensure(z.abs() <= 4.0, format!("6x6 mean {} is {z:.2} stderr from {mean}", s.mean_sinks))?;
    let rel = (s.var_sinks - var).abs() / var;
    ensure(rel <= 0.05, format!("6x6 variance {} off by {:.2}%", s.var_sinks, rel * 100.0))?;
    let t = within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "pairwise == closed for 6..10; 3x3 == enumeration; 6x6 MC mean {:.4} (z {z:.2}), variance {:.4} ({:.2}% off) in {t:.2?}",
        s.mean_sinks,
        s.var_sinks,
        rel * 100.0
    ))
}

fn independence_iff() -> Outcome {
    let oracle = Oracle::default();
    let mut checked = 0;
    for dims in [d(3, 3), d(2, 5)] {
        let cells: Vec<_> = dims.cells().collect();
        let single = cells
            .iter()
            .map(|&v| oracle.relative_order_event(&[v], dims, |e| e.is_sink(v)).map(|r| r.probability))
            .collect::<gig::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let (a, b) = (cells[i], cells[j]);
                let joint = oracle
                    .relative_order_event(&[a, b], dims, |e| e.all_sinks(&[a, b]))
                    .map_err(|e| e.to_string())?;
                let factorizes = joint.probability == &single[i] * &single[j];
                ensure(factorizes == (squared_distance(a, b) > 4), format!("{dims} {a} {b}: factorizes={factorizes}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs on 3x3 and 2x5"))
}

fn formulas_match_enumeration() -> Outcome {
    let mut paths_checked = 0;
    let mut sets_checked = 0;
    for dims in [d(2, 2), d(2, 3), d(3, 3)] {
        let paths = all_paths_up_to(dims, 3);
        let events: Vec<_> = paths.iter().map(|p| move |g: &GigDigraph| g.contains_path(p)).collect();
        let results = Oracle::default().enumerate_events(dims, &events).map_err(|e| e.to_string())?;
        for (p, r) in paths.iter().zip(&results) {
            let f: Rational = exact::path_probability(p, dims).map_err(|e| e.to_string())?;
            ensure(f == r.probability, format!("{dims} path {p}: {f} != {}", r.probability))?;
        }
        paths_checked += paths.len();

        let sets: Vec<_> = non_adjacent_sets(dims).into_iter().filter(|s| s.len() >= 2).collect();
        let events: Vec<_> = sets.iter().map(|s| move |g: &GigDigraph| g.all_sinks(s)).collect();
        let results = Oracle::default().enumerate_events(dims, &events).map_err(|e| e.to_string())?;
        for (s, r) in sets.iter().zip(&results) {
            let f: Rational = exact::multi_sink_probability(s, dims).map_err(|e| e.to_string())?;
            ensure(f == r.probability, format!("{dims} sinks {s:?}: {f} != {}", r.probability))?;
        }
        sets_checked += sets.len();
    }
    Ok(format!("{paths_checked} paths and {sets_checked} non-adjacent pairs/triples on 2x2, 2x3, 3x3"))
}

fn connectivity_bounds_hold() -> Outcome {
    let mut checked = 0;
    for dims in [d(2, 3), d(3, 3)] {
        let pairs: Vec<_> = dims
            .cells()
            .flat_map(|a| dims.cells().filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let events: Vec<_> = pairs.iter().map(|&(a, b)| move |g: &GigDigraph| g.reaches(a, b)).collect();
        let results = Oracle::default().enumerate_events(dims, &events).map_err(|e| e.to_string())?;
        for (&(a, b), r) in pairs.iter().zip(&results) {
            let cb = exact::connectivity_lower_bound::<Rational>(a, b, dims).map_err(|e| e.to_string())?;
            ensure(
                r.probability >= cb.sum_over_paths && cb.sum_over_paths >= cb.count_times_min,
                format!("{dims} {a}->{b}: {} / {} / {}", r.probability, cb.sum_over_paths, cb.count_times_min),
            )?;
        }
        checked += pairs.len();
    }
    Ok(format!("{checked} ordered pairs on 2x3 and 3x3"))
}

fn component_bounds() -> Outcome {
    let bound = |m| exact::component_size_bound::<Rational>(d(m, m));
    ensure(bound(1) == q(4, 3), format!("1x1 bound {}", bound(1)))?;
    let values: Vec<Rational> = (1..=12).map(bound).collect();
    ensure(values.windows(2).all(|w| w[0] <= w[1]), "bound decreases in M")?;

    let eps = Rational::new(1.into(), 1_000_000.into());
    let s: SeriesBoundResult<Rational> = exact::series_bound(&eps).map_err(|e| e.to_string())?;
    ensure(s.tail_bound <= eps, format!("tail {}", s.tail_bound))?;
    ensure(s.certified_upper == &s.truncated_value + &s.tail_bound, "certificate is not truncation + tail")?;
    let upper = s.certified_upper.to_f64().filter(|x| x.is_finite());
    ensure(upper.is_some(), "certified upper value is not finite")?;
    let truncations: Vec<SeriesBoundResult<Rational>> =
        (2..=s.terms_used).map(|n| exact::series_truncation(n, 2 * n + 8)).collect();
    ensure(
        truncations.windows(2).all(|w| w[0].truncated_value <= w[1].truncated_value),
        "truncations are not monotone",
    )?;
    ensure(
        truncations.iter().all(|t| t.truncated_value <= s.certified_upper),
        "a truncation exceeds the certified upper value",
    )?;

    let stats = Oracle::default().exact_statistics(d(3, 3)).map_err(|e| e.to_string())?;
    let b3 = bound(3);
    ensure(
        stats.expected_max_component <= b3,
        format!(
            "1x1, monotonicity and series clauses pass, but 3x3 expected max component {} (~{:.4}) exceeds component size bound {} (~{:.4})",
            stats.expected_max_component,
            stats.expected_max_component.to_f64().unwrap(),
            b3,
            b3.to_f64().unwrap()
        ),
    )?;
    Ok(format!(
        "1x1 bound 4/3, nondecreasing to M=12, series upper ~{:.6} with tail <= 1e-6 after {} terms",
        upper.unwrap(),
        s.terms_used
    ))
}

fn simulate_is_deterministic() -> Outcome {
    let args = ["simulate", "--dims", "6x6", "--trials", "20000", "--seed", "314", "--shards", "8", "--events", "sinks:1,1 3,3"];
    let run = || Command::new(env!("CARGO_BIN_EXE_gig")).args(args).output().map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), "simulate exited with an error")?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, "outputs differ")?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked 3x3 path example", worked_path_example),
        ("three shortest 5x5 paths", three_shortest_paths),
        ("shared-neighbor sink pair", shared_neighbor_pair),
        ("expected sink count", expected_sink_count),
        ("sink count variance", sink_count_variance),
        ("sink independence iff squared distance > 4", independence_iff),
        ("path and sink formulas vs enumeration", formulas_match_enumeration),
        ("connectivity lower bounds", connectivity_bounds_hold),
        ("component size bound and series", component_bounds),
        ("simulation determinism", simulate_is_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

