//! Command implementations behind the `gig` binary.
//!
//! Every command returns its standard-output text or a [`CliError`] carrying
//! the process exit code, which keeps the binary a thin argument parser and
//! lets tests drive commands without spawning processes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::digraph::{GigDigraph, Labeling, OutEdges};
use crate::error::GigError;
use crate::exact::{self, ConnectivityBound, SeriesBoundResult};
use crate::lattice::{self, squared_distance, Coord, GridDims, LatticePath};
use crate::montecarlo::{self, NamedEvent, SimulationConfig, SimulationStats, TrackedEvent};
use crate::oracle::Oracle;
use crate::Rational;

pub mod exit {
    pub const OK: u8 = 0;
    pub const MISMATCH: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const DOMAIN: u8 = 3;
    pub const CAP: u8 = 4;
}

/// Environment variable overriding the full oracle's cell cap.
pub const ORACLE_CAP_ENV: &str = "GIG_ORACLE_CAP";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: exit::INPUT, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<GigError> for CliError {
    fn from(e: GigError) -> Self {
        let code = if e.is_domain() {
            exit::DOMAIN
        } else if e.is_cap() {
            exit::CAP
        } else {
            exit::INPUT
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exact rational as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRational {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for JsonRational {
    fn from(r: &Rational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<&JsonRational> for Rational {
    type Error = CliError;

    fn try_from(j: &JsonRational) -> CliResult<Rational> {
        let num: BigInt = j.num.parse().map_err(|_| CliError::input(format!("bad numerator {:?}", j.num)))?;
        let den: BigInt = j.den.parse().map_err(|_| CliError::input(format!("bad denominator {:?}", j.den)))?;
        if den.is_zero() {
            return Err(CliError::input("denominator is zero"));
        }
        Ok(Rational::new(num, den))
    }
}

fn jr(r: &Rational) -> serde_json::Value {
    serde_json::to_value(JsonRational::from(r)).expect("plain strings serialize")
}

pub fn parse_dims(s: &str) -> CliResult<GridDims> {
    let bad = || CliError::input(format!("dimensions must look like MxN, got {s:?}"));
    let (m, n) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    Ok(GridDims::new(m, n)?)
}

pub fn parse_coord(token: &str) -> CliResult<Coord> {
    let bad = || CliError::input(format!("coordinates must look like row,col, got {token:?}"));
    let (r, c) = token.split_once(',').ok_or_else(bad)?;
    Ok(Coord::new(r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

/// Whitespace-separated `row,col` tokens.
pub fn parse_coords(s: &str) -> CliResult<Vec<Coord>> {
    let coords = s.split_whitespace().map(parse_coord).collect::<CliResult<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(CliError::input("expected at least one row,col coordinate"));
    }
    Ok(coords)
}

/// Parses `a/b`, plain decimals and scientific notation exactly.
pub fn parse_rational_literal(s: &str) -> CliResult<Rational> {
    let bad = || CliError::input(format!("not a number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

#[derive(Deserialize)]
struct LabelingJson {
    labels: Vec<Vec<u32>>,
}

/// Reads a labeling from CSV rows (row 1 first) or from the JSON emitted by `build --format json`.
pub fn parse_labeling(text: &str) -> CliResult<Labeling> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim_start().starts_with('{') {
        let parsed: LabelingJson =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("labeling JSON: {e}")))?;
        return Ok(Labeling::from_rows(&parsed.labels)?);
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for field in line.split(',') {
            let value = field.trim().parse::<u32>().map_err(|_| {
                CliError::input(format!(
                    "line {}, column {}: {:?} is not a positive integer label",
                    lineno + 1,
                    column,
                    field.trim()
                ))
            })?;
            row.push(value);
            column += field.chars().count() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::input(format!(
                    "line {}: expected {} labels like the first row, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input("labeling file has no rows"));
    }
    Ok(Labeling::from_rows(&rows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Json,
}

fn node_id(c: Coord) -> String {
    format!("\"{},{}\"", c.row, c.col)
}

/// Graphviz rendering; sinks carry `sink=true` and a double outline.
pub fn render_dot(g: &GigDigraph) -> String {
    let lab = g.labeling();
    let sinks = g.sinks();
    let mut out = String::from("digraph gig {\n  node [shape=circle];\n");
    for c in g.dims().cells() {
        let extra = if sinks.contains(&c) { ", sink=true, peripheries=2" } else { "" };
        let _ = writeln!(
            out,
            "  {} [label=\"{}\", pos=\"{},{}!\"{}];",
            node_id(c),
            lab.label(c),
            c.col - 1,
            g.dims().rows() - c.row,
            extra
        );
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {} -> {};", node_id(a), node_id(b));
    }
    out.push_str("}\n");
    out
}

fn cell_json(g: &GigDigraph, c: Coord) -> serde_json::Value {
    json!({ "row": c.row, "col": c.col, "label": g.labeling().label(c) })
}

pub fn render_json(g: &GigDigraph) -> String {
    let value = json!({
        "dims": { "rows": g.dims().rows(), "cols": g.dims().cols() },
        "labels": g.labeling().rows(),
        "edges": g.edges().into_iter().map(|(a, b)| json!({
            "from": cell_json(g, a),
            "to": cell_json(g, b),
        })).collect::<Vec<_>>(),
        "sinks": g.sinks().into_iter().map(|c| cell_json(g, c)).collect::<Vec<_>>(),
    });
    pretty(&value)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn cmd_build(labeling_text: &str, format: RenderFormat) -> CliResult<String> {
    let g = GigDigraph::new(parse_labeling(labeling_text)?);
    Ok(match format {
        RenderFormat::Dot => render_dot(&g),
        RenderFormat::Json => render_json(&g),
    })
}

pub fn cmd_path_prob(dims: GridDims, path: &str) -> CliResult<String> {
    let path = LatticePath::new(parse_coords(path)?)?;
    let p: Rational = exact::path_probability(&path, dims)?;
    Ok(format!("{}\n", serde_json::to_string(&JsonRational::from(&p)).expect("strings serialize")))
}

pub fn cmd_sink_set(dims: GridDims, vertices: &str) -> CliResult<String> {
    let cells = parse_coords(vertices)?;
    let p: Rational = exact::multi_sink_probability(&cells, dims)?;
    let set: BTreeSet<Coord> = cells.iter().copied().collect();
    let adjacent: Vec<String> = set
        .iter()
        .flat_map(|&a| set.range(a..).skip(1).map(move |&b| (a, b)))
        .filter(|&(a, b)| squared_distance(a, b) == 1)
        .map(|(a, b)| format!("{a}-{b}"))
        .collect();
    let mut value = json!({
        "dims": dims.to_string(),
        "vertices": set.iter().map(|c| json!({"row": c.row, "col": c.col})).collect::<Vec<_>>(),
        "probability": jr(&p),
    });
    if !adjacent.is_empty() {
        value["warning"] = json!(format!(
            "adjacent vertices cannot both be sinks: {}",
            adjacent.join(", ")
        ));
    }
    Ok(pretty(&value))
}

fn moment_json(r: crate::error::Result<Rational>) -> CliResult<serde_json::Value> {
    match r {
        Ok(v) => Ok(jr(&v)),
        Err(GigError::Domain { requirement, .. }) => Ok(json!({ "domain": format!("requires {requirement}") })),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_moments(dims: GridDims) -> CliResult<String> {
    let expected = exact::expected_sinks::<Rational>(dims)?;
    let value = json!({
        "dims": dims.to_string(),
        "expected": jr(&expected),
        "variance_by_pairs": moment_json(exact::variance_sinks_by_pairs(dims))?,
        "variance_closed": moment_json(exact::variance_sinks_closed(dims))?,
    });
    Ok(pretty(&value))
}

fn connectivity_json(a: Coord, b: Coord, cb: &ConnectivityBound<Rational>) -> serde_json::Value {
    json!({
        "from": {"row": a.row, "col": a.col},
        "to": {"row": b.row, "col": b.col},
        "shortest_length": cb.shortest_length,
        "path_count": cb.path_count,
        "min_path_prob": jr(&cb.min_path_prob),
        "least_likely_path": cb.least_likely_path.to_string(),
        "count_times_min": jr(&cb.count_times_min),
        "sum_over_paths": jr(&cb.sum_over_paths),
    })
}

fn series_json(eps: &Rational, s: &SeriesBoundResult<Rational>) -> serde_json::Value {
    json!({
        "eps": jr(eps),
        "truncated_value": jr(&s.truncated_value),
        "tail_bound": jr(&s.tail_bound),
        "certified_upper": jr(&s.certified_upper),
        "terms_used": s.terms_used,
        "inner_terms": s.inner_terms,
    })
}

pub fn cmd_bounds(dims: Option<GridDims>, connect: Option<&str>, series_eps: Option<&str>) -> CliResult<String> {
    let mut value = serde_json::Map::new();
    if let Some(dims) = dims {
        value.insert("dims".into(), json!(dims.to_string()));
        value.insert("component_size_bound".into(), jr(&exact::component_size_bound(dims)));
    }
    if let Some(ends_text) = connect {
        let dims = dims.ok_or_else(|| CliError::input("--connect requires --dims"))?;
        let ends = parse_coords(ends_text)?;
        let [a, b] = ends[..] else {
            return Err(CliError::input("--connect expects exactly two coordinates"));
        };
        let cb = exact::connectivity_lower_bound::<Rational>(a, b, dims)?;
        value.insert("connectivity".into(), connectivity_json(a, b, &cb));
    }
    if let Some(eps) = series_eps {
        let eps = parse_rational_literal(eps)?;
        let s = exact::series_bound(&eps)?;
        value.insert("series".into(), series_json(&eps, &s));
    }
    if value.is_empty() {
        return Err(CliError::input("nothing to compute: pass --dims, --connect or --series-eps"));
    }
    Ok(pretty(&serde_json::Value::Object(value)))
}

/// Outcome of running every formula-versus-oracle check on one grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl VerifyReport {
    fn check(&mut self, ok: bool, line: String) {
        self.failures += usize::from(!ok);
        self.lines.push(format!("{} {line}", if ok { "PASS" } else { "FAIL" }));
    }

    fn info(&mut self, line: String) {
        self.lines.push(format!("INFO {line}"));
    }

    pub fn exit_code(&self) -> u8 {
        if self.failures == 0 {
            exit::OK
        } else {
            exit::MISMATCH
        }
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        let _ = write!(s, "\n{} checks failed\n", self.failures);
        s
    }
}

type BoxedEvent = Box<dyn Fn(&GigDigraph) -> bool + Sync>;

fn eq_line(name: &str, formula: &Rational, oracle: &Rational) -> (bool, String) {
    let ok = formula == oracle;
    let op = if ok { "==" } else { "!=" };
    (ok, format!("{name}: {formula} {op} {oracle}"))
}

/// Pairwise non-adjacent vertex sets of size 1 to 3.
fn independent_sets(dims: GridDims) -> Vec<Vec<Coord>> {
    let cells: Vec<Coord> = dims.cells().collect();
    let free = |set: &[Coord], c: Coord| set.iter().all(|&s| squared_distance(s, c) > 1);
    let mut out = Vec::new();
    for (i, &a) in cells.iter().enumerate() {
        out.push(vec![a]);
        for (j, &b) in cells.iter().enumerate().skip(i + 1) {
            if !free(&[a], b) {
                continue;
            }
            out.push(vec![a, b]);
            for &c in &cells[j + 1..] {
                if free(&[a, b], c) {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

pub fn verify(dims: GridDims, oracle: &Oracle) -> CliResult<VerifyReport> {
    let mut report = VerifyReport::default();
    let stats = oracle.exact_statistics(dims)?;
    report.info(format!("{dims} grid, {} labelings enumerated", stats.total_labelings));

    let sum_single = dims
        .cells()
        .map(|v| exact::multi_sink_probability::<Rational>(&[v], dims))
        .sum::<crate::error::Result<Rational>>()?;
    let (ok, line) = eq_line("sum of single-vertex sink probabilities", &sum_single, &stats.expected_sinks);
    report.check(ok, line);

    match exact::expected_sinks::<Rational>(dims) {
        Ok(v) => {
            let (ok, line) = eq_line("expected sinks", &v, &stats.expected_sinks);
            report.check(ok, line);
        }
        Err(e) => report.info(format!("expected sinks closed form skipped: {e}")),
    }
    match exact::variance_sinks_by_pairs::<Rational>(dims) {
        Ok(v) => {
            let (ok, line) = eq_line("sink count variance (pairwise)", &v, &stats.variance_sinks);
            report.check(ok, line);
        }
        Err(e) => report.info(format!("pairwise variance skipped: {e}")),
    }
    if let Err(e) = exact::variance_sinks_closed::<Rational>(dims) {
        report.info(format!("closed-form variance skipped: {e}"));
    }

    let paths: Vec<LatticePath> = lattice::all_paths_up_to(dims, 3)
        .into_iter()
        .filter(|p| p.edge_count() >= 1)
        .collect();
    let sets = independent_sets(dims);
    let pairs: Vec<(Coord, Coord)> = dims
        .cells()
        .flat_map(|a| dims.cells().filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let cells: Vec<Coord> = dims.cells().collect();
    let all_pairs: Vec<(Coord, Coord)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| cells[i + 1..].iter().map(move |&b| (a, b)))
        .collect();

    let mut events: Vec<BoxedEvent> = Vec::new();
    for p in &paths {
        let p = p.clone();
        events.push(Box::new(move |g| g.contains_path(&p)));
    }
    for s in &sets {
        let s = s.clone();
        events.push(Box::new(move |g| g.all_sinks(&s)));
    }
    for &(a, b) in &all_pairs {
        events.push(Box::new(move |g| g.all_sinks(&[a, b])));
    }
    for &(a, b) in &pairs {
        events.push(Box::new(move |g| g.reaches(a, b)));
    }
    let results = oracle.enumerate_events(dims, &events)?;
    let (path_res, rest) = results.split_at(paths.len());
    let (set_res, rest) = rest.split_at(sets.len());
    let (pair_res, reach_res) = rest.split_at(all_pairs.len());

    let mut bad = Vec::new();
    for (p, r) in paths.iter().zip(path_res) {
        let f: Rational = exact::path_probability(p, dims)?;
        if f != r.probability {
            bad.push(format!("{p}: {f} != {}", r.probability));
        }
    }
    report.check(
        bad.is_empty(),
        format!("directed path probability: {} paths of 1 to 3 edges{}", paths.len(), detail(&bad)),
    );

    let mut bad = Vec::new();
    let mut single = std::collections::BTreeMap::new();
    for (s, r) in sets.iter().zip(set_res) {
        let f: Rational = exact::multi_sink_probability(s, dims)?;
        if s.len() == 1 {
            single.insert(s[0], r.probability.clone());
        }
        if f != r.probability {
            bad.push(format!("{s:?}: {f} != {}", r.probability));
        }
    }
    report.check(
        bad.is_empty(),
        format!("joint sink probability: {} non-adjacent sets of 1 to 3 vertices{}", sets.len(), detail(&bad)),
    );

    let mut bad = Vec::new();
    for (&(a, b), r) in all_pairs.iter().zip(pair_res) {
        let factorizes = r.probability == &single[&a] * &single[&b];
        if factorizes != exact::sinks_independent(a, b, dims)? {
            bad.push(format!("{a}-{b}: factorizes={factorizes}"));
        }
    }
    report.check(
        bad.is_empty(),
        format!("sink independence iff squared distance > 4: {} pairs{}", all_pairs.len(), detail(&bad)),
    );

    let mut bad = Vec::new();
    for (&(a, b), r) in pairs.iter().zip(reach_res) {
        let cb = exact::connectivity_lower_bound::<Rational>(a, b, dims)?;
        if !(r.probability >= cb.sum_over_paths && cb.sum_over_paths >= cb.count_times_min) {
            bad.push(format!(
                "{a}->{b}: {} vs {} vs {}",
                r.probability, cb.sum_over_paths, cb.count_times_min
            ));
        }
    }
    report.check(
        bad.is_empty(),
        format!("connection probability >= shortest-path sum >= count x min: {} ordered pairs{}", pairs.len(), detail(&bad)),
    );

    let bound: Rational = exact::component_size_bound(dims);
    for (name, value) in [
        ("expected max component", &stats.expected_max_component),
        ("pooled component size per sink", &stats.expected_component_size_per_sink),
        ("max conditional component size", &stats.max_conditional_component_size),
    ] {
        let rel = if *value <= bound { "<=" } else { ">" };
        report.info(format!("{name} {value} {rel} component size bound {bound}"));
    }
    Ok(report)
}

fn detail(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!(" [{}]", bad.join("; "))
    }
}

pub fn cmd_verify(dims: GridDims, oracle: &Oracle) -> CliResult<(u8, String)> {
    let report = verify(dims, oracle)?;
    Ok((report.exit_code(), report.render()))
}

/// `path:r,c r,c ...`, `sinks:r,c ...` or `connect:r,c r,c`.
pub fn parse_event(text: &str) -> CliResult<NamedEvent> {
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| CliError::input(format!("event {text:?} must look like kind:coords")))?;
    let coords = parse_coords(body)?;
    let event = match kind.trim() {
        "path" => TrackedEvent::Path(LatticePath::new(coords)?),
        "sinks" => TrackedEvent::Sinks(coords),
        "connect" => match coords[..] {
            [a, b] => TrackedEvent::Connected(a, b),
            _ => return Err(CliError::input("connect events take exactly two coordinates")),
        },
        other => return Err(CliError::input(format!("unknown event kind {other:?}"))),
    };
    Ok(NamedEvent { name: text.trim().to_string(), event })
}

pub fn cmd_simulate(dims: GridDims, trials: u64, seed: u64, shards: usize, events: &[String]) -> CliResult<String> {
    let cfg = SimulationConfig::new(dims, trials, seed)?.with_shards(shards);
    let events = events.iter().map(|e| parse_event(e)).collect::<CliResult<Vec<_>>>()?;
    let stats: SimulationStats<f64> = montecarlo::simulate(&cfg, &events)?;
    let value = json!({
        "dims": dims.to_string(),
        "seed": seed,
        "shards": cfg.shards,
        "stats": stats,
    });
    Ok(pretty(&value))
}

/// Reads the oracle cap override, if set.
pub fn oracle_from_env(var: Option<String>) -> CliResult<Oracle> {
    let mut oracle = Oracle::default();
    if let Some(v) = var {
        let cap: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("{ORACLE_CAP_ENV} must be a cell count, got {v:?}")))?;
        oracle = oracle.with_full_cap(cap);
    }
    Ok(oracle)
}

/// Sign-aware check used by tests on emitted JSON.
pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}
