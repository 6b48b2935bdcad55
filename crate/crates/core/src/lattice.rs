//! Lattice geometry on an `m x n` grid with north/south/east/west adjacency.
//!
//! Coordinates are 1-based `(row, col)` with row 1 at the top.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GigError, Result};

/// Default ceiling on the number of paths [`monotone_paths`] will materialize.
pub const DEFAULT_PATH_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    rows: usize,
    cols: usize,
}

impl GridDims {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(GigError::InvalidDims { rows, cols });
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `M = max(m, n)`.
    pub fn max_side(&self) -> usize {
        self.rows.max(self.cols)
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, c: Coord) -> bool {
        (1..=self.rows).contains(&c.row) && (1..=self.cols).contains(&c.col)
    }

    pub fn check(&self, c: Coord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(GigError::OutOfBounds { coord: c, dims: *self })
        }
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (1..=self.rows).flat_map(move |row| (1..=self.cols).map(move |col| Coord { row, col }))
    }

    /// Row-major, 0-based index of an in-bounds cell.
    pub fn index_of(&self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        (c.row - 1) * self.cols + (c.col - 1)
    }

    pub fn coord_at(&self, index: usize) -> Coord {
        debug_assert!(index < self.cell_count());
        Coord {
            row: index / self.cols + 1,
            col: index % self.cols + 1,
        }
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// `(Δrow)² + (Δcol)²`.
pub fn squared_distance(a: Coord, b: Coord) -> u64 {
    let dr = a.row.abs_diff(b.row) as u64;
    let dc = a.col.abs_diff(b.col) as u64;
    dr * dr + dc * dc
}

fn raw_neighbors(c: Coord, dims: GridDims) -> impl Iterator<Item = Coord> {
    let Coord { row, col } = c;
    [
        (row > 1).then(|| Coord::new(row - 1, col)),
        (row < dims.rows).then(|| Coord::new(row + 1, col)),
        (col > 1).then(|| Coord::new(row, col - 1)),
        (col < dims.cols).then(|| Coord::new(row, col + 1)),
    ]
    .into_iter()
    .flatten()
}

/// Lattice neighbors of `c`, excluding `c` itself.
pub fn neighbors(c: Coord, dims: GridDims) -> Result<BTreeSet<Coord>> {
    dims.check(c)?;
    Ok(raw_neighbors(c, dims).collect())
}

/// `N(W)`: the set itself plus every lattice neighbor of its members.
pub fn closed_neighborhood(set: &[Coord], dims: GridDims) -> Result<BTreeSet<Coord>> {
    if set.is_empty() {
        return Err(GigError::EmptySet);
    }
    let mut out = BTreeSet::new();
    for &c in set {
        dims.check(c)?;
        out.insert(c);
        out.extend(raw_neighbors(c, dims));
    }
    Ok(out)
}

/// Precomputed neighbor lists indexed by row-major cell index.
#[derive(Clone, Debug)]
pub struct NeighborTable {
    dims: GridDims,
    slots: Vec<([usize; 4], u8)>,
}

impl NeighborTable {
    pub fn new(dims: GridDims) -> Self {
        let slots = dims
            .cells()
            .map(|c| {
                let mut arr = [0usize; 4];
                let mut len = 0u8;
                for nb in raw_neighbors(c, dims) {
                    arr[len as usize] = dims.index_of(nb);
                    len += 1;
                }
                (arr, len)
            })
            .collect();
        Self { dims, slots }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        let (arr, len) = &self.slots[index];
        &arr[..*len as usize]
    }

    /// `|N({v})|` for the cell at `index`.
    pub fn closed_size(&self, index: usize) -> usize {
        self.slots[index].1 as usize + 1
    }
}

/// A self-avoiding walk of unit lattice steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    vertices: Vec<Coord>,
}

impl LatticePath {
    /// Validates unit steps, distinctness and 1-based coordinates.
    pub fn new(vertices: Vec<Coord>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GigError::InvalidPath("a path needs at least one vertex".into()));
        }
        if let Some(c) = vertices.iter().find(|c| c.row == 0 || c.col == 0) {
            return Err(GigError::InvalidPath(format!("coordinate {c} is not 1-based")));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if squared_distance(w[0], w[1]) != 1 {
                return Err(GigError::InvalidPath(format!(
                    "step {} from {} to {} is not a unit step",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for &c in &vertices {
            if !seen.insert(c) {
                return Err(GigError::InvalidPath(format!("vertex {c} is repeated")));
            }
        }
        Ok(Self { vertices })
    }

    pub fn single(c: Coord) -> Self {
        Self { vertices: vec![c] }
    }

    pub fn vertices(&self) -> &[Coord] {
        &self.vertices
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Coord {
        self.vertices[0]
    }

    pub fn last(&self) -> Coord {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn check_within(&self, dims: GridDims) -> Result<()> {
        self.vertices.iter().try_for_each(|&c| dims.check(c))
    }

    /// Same shape shifted by `(drow, dcol)`.
    pub fn translated(&self, drow: isize, dcol: isize) -> Result<Self> {
        let shift = |v: usize, d: isize| -> Option<usize> {
            let s = v as isize + d;
            (s >= 1).then_some(s as usize)
        };
        let vertices = self
            .vertices
            .iter()
            .map(|c| match (shift(c.row, drow), shift(c.col, dcol)) {
                (Some(row), Some(col)) => Ok(Coord { row, col }),
                _ => Err(GigError::InvalidPath(format!("translating {c} leaves the lattice"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vertices })
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str("->")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `K_1, K_2, ...`: sizes of the closed neighborhoods of growing path prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSequence(Vec<usize>);

impl KSequence {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

pub fn k_sequence(path: &LatticePath, dims: GridDims) -> Result<KSequence> {
    path.check_within(dims)?;
    let mut covered = vec![false; dims.cell_count()];
    let mut size = 0usize;
    let mut values = Vec::with_capacity(path.len());
    for &v in path.vertices() {
        for c in std::iter::once(v).chain(raw_neighbors(v, dims)) {
            let idx = dims.index_of(c);
            if !covered[idx] {
                covered[idx] = true;
                size += 1;
            }
        }
        values.push(size);
    }
    Ok(KSequence(values))
}

/// 1-based positions of vertices where the incoming and outgoing edges are perpendicular.
pub fn turns(path: &LatticePath) -> Vec<usize> {
    let direction = |a: Coord, b: Coord| a.row == b.row;
    path.vertices()
        .windows(3)
        .enumerate()
        .filter(|(_, w)| direction(w[0], w[1]) != direction(w[1], w[2]))
        .map(|(i, _)| i + 2)
        .collect()
}

/// `binom(n, k)`, or `None` on `u64` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of shortest lattice paths between two cells.
pub fn monotone_path_count(a: Coord, b: Coord) -> Option<u64> {
    let dr = a.row.abs_diff(b.row) as u64;
    let dc = a.col.abs_diff(b.col) as u64;
    binomial(dr + dc, dr)
}

/// All shortest lattice paths from `a` to `b`, capped at [`DEFAULT_PATH_CAP`].
pub fn monotone_paths(a: Coord, b: Coord, dims: GridDims) -> Result<Vec<LatticePath>> {
    monotone_paths_capped(a, b, dims, DEFAULT_PATH_CAP)
}

pub fn monotone_paths_capped(a: Coord, b: Coord, dims: GridDims, cap: u64) -> Result<Vec<LatticePath>> {
    dims.check(a)?;
    dims.check(b)?;
    if a == b {
        return Err(GigError::SameVertex(a));
    }
    let count = monotone_path_count(a, b);
    if count.is_none_or(|n| n > cap) {
        return Err(GigError::CapExceeded {
            what: "monotone path enumeration",
            requested: count.map_or_else(|| "more than 2^64 paths".into(), |n| format!("{n} paths")),
            cap,
            hint: "",
        });
    }
    let row_step: isize = if b.row >= a.row { 1 } else { -1 };
    let col_step: isize = if b.col >= a.col { 1 } else { -1 };
    let mut out = Vec::with_capacity(count.unwrap_or(0) as usize);
    let mut current = vec![a];
    extend_monotone(&mut current, b, row_step, col_step, &mut out);
    Ok(out)
}

fn extend_monotone(current: &mut Vec<Coord>, target: Coord, row_step: isize, col_step: isize, out: &mut Vec<LatticePath>) {
    let here = *current.last().expect("nonempty");
    if here == target {
        out.push(LatticePath { vertices: current.clone() });
        return;
    }
    if here.row != target.row {
        current.push(Coord::new((here.row as isize + row_step) as usize, here.col));
        extend_monotone(current, target, row_step, col_step, out);
        current.pop();
    }
    if here.col != target.col {
        current.push(Coord::new(here.row, (here.col as isize + col_step) as usize));
        extend_monotone(current, target, row_step, col_step, out);
        current.pop();
    }
}

/// Every self-avoiding lattice path with at most `max_edges` edges, including single vertices.
pub fn all_paths_up_to(dims: GridDims, max_edges: usize) -> Vec<LatticePath> {
    fn grow(current: &mut Vec<Coord>, dims: GridDims, max_edges: usize, out: &mut Vec<LatticePath>) {
        out.push(LatticePath { vertices: current.clone() });
        if current.len() > max_edges {
            return;
        }
        let here = *current.last().expect("nonempty");
        for nb in raw_neighbors(here, dims) {
            if !current.contains(&nb) {
                current.push(nb);
                grow(current, dims, max_edges, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    for start in dims.cells() {
        grow(&mut vec![start], dims, max_edges, &mut out);
    }
    out
}
