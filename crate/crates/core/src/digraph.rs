//! Greatest-increase digraph of a labeled grid, its sinks and basins.

use std::collections::BTreeSet;

use crate::error::{GigError, Result};
use crate::lattice::{Coord, GridDims, LatticePath, NeighborTable};

/// A bijection from grid cells onto `1..=mn`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    dims: GridDims,
    labels: Vec<u32>,
}

impl Labeling {
    /// Validates that `labels` (row-major) is a permutation of `1..=mn`.
    pub fn new(dims: GridDims, labels: Vec<u32>) -> Result<Self> {
        let n = dims.cell_count();
        if labels.len() != n {
            return Err(GigError::InvalidLabeling(format!(
                "expected {n} labels for a {dims} grid, got {}",
                labels.len()
            )));
        }
        let mut first_seen: Vec<Option<usize>> = vec![None; n + 1];
        let mut problems = Vec::new();
        for (idx, &v) in labels.iter().enumerate() {
            let cell = dims.coord_at(idx);
            if v == 0 || v as usize > n {
                problems.push(format!("label {v} at {cell} is outside 1..={n}"));
                continue;
            }
            match first_seen[v as usize] {
                Some(prev) => problems.push(format!(
                    "label {v} at {cell} duplicates {}",
                    dims.coord_at(prev)
                )),
                None => first_seen[v as usize] = Some(idx),
            }
        }
        if !problems.is_empty() {
            return Err(GigError::InvalidLabeling(problems.join("; ")));
        }
        Ok(Self { dims, labels })
    }

    /// Builds from rows listed top to bottom.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(GigError::InvalidLabeling(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
        let dims = GridDims::new(m, n)?;
        Self::new(dims, rows.concat())
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn label(&self, c: Coord) -> u32 {
        self.labels[self.dims.index_of(c)]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.labels.chunks(self.dims.cols()).map(<[u32]>::to_vec).collect()
    }

    pub fn cell_with_label(&self, label: u32) -> Option<Coord> {
        self.labels.iter().position(|&v| v == label).map(|i| self.dims.coord_at(i))
    }
}

/// Read access to greatest-increase out-edges.
///
/// Implemented by full digraphs and by the region views of the relative-order
/// oracle, so path and sink events can be evaluated against either.
pub trait OutEdges {
    fn out_edge(&self, c: Coord) -> Option<Coord>;

    fn is_sink(&self, c: Coord) -> bool {
        self.out_edge(c).is_none()
    }

    /// True iff every consecutive pair of `path` is an out-edge.
    fn contains_path(&self, path: &LatticePath) -> bool {
        path.vertices().windows(2).all(|w| self.out_edge(w[0]) == Some(w[1]))
    }

    fn all_sinks(&self, cells: &[Coord]) -> bool {
        cells.iter().all(|&c| self.is_sink(c))
    }
}

/// Fills `out[i]` with the index of the largest neighbor of cell `i` when that
/// neighbor's label exceeds `labels[i]`.
pub(crate) fn fill_out_edges(table: &NeighborTable, labels: &[u32], out: &mut [Option<usize>]) {
    for (i, slot) in out.iter_mut().enumerate() {
        let mut best = i;
        for &nb in table.neighbors(i) {
            if labels[nb] > labels[best] {
                best = nb;
            }
        }
        *slot = (best != i).then_some(best);
    }
}

#[derive(Clone, Debug)]
pub struct GigDigraph {
    labeling: Labeling,
    out: Vec<Option<usize>>,
}

/// A sink and every vertex whose out-path ends there, sink included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub sink: Coord,
    pub members: BTreeSet<Coord>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

pub fn build_gig(labeling: &Labeling) -> GigDigraph {
    GigDigraph::new(labeling.clone())
}

impl GigDigraph {
    pub fn new(labeling: Labeling) -> Self {
        let table = NeighborTable::new(labeling.dims());
        let mut out = vec![None; labeling.dims().cell_count()];
        fill_out_edges(&table, labeling.as_slice(), &mut out);
        Self { labeling, out }
    }

    /// Validating convenience constructor.
    pub fn from_labels(dims: GridDims, labels: Vec<u32>) -> Result<Self> {
        Ok(Self::new(Labeling::new(dims, labels)?))
    }

    /// Recomputes the digraph in place for a new permutation of the same grid.
    /// `labels` must already be a permutation of `1..=mn`.
    pub(crate) fn relabel(&mut self, table: &NeighborTable, labels: &[u32]) {
        debug_assert_eq!(labels.len(), self.out.len());
        self.labeling.labels.copy_from_slice(labels);
        fill_out_edges(table, labels, &mut self.out);
    }

    pub fn dims(&self) -> GridDims {
        self.labeling.dims()
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub(crate) fn out_indices(&self) -> &[Option<usize>] {
        &self.out
    }

    /// `(from, to)` pairs in row-major order of `from`.
    pub fn edges(&self) -> Vec<(Coord, Coord)> {
        let dims = self.dims();
        self.out
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (dims.coord_at(i), dims.coord_at(t))))
            .collect()
    }

    pub fn sinks(&self) -> BTreeSet<Coord> {
        let dims = self.dims();
        self.out
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_none())
            .map(|(i, _)| dims.coord_at(i))
            .collect()
    }

    /// The hill-climbing trajectory from `start` up to its local maximum.
    pub fn out_path(&self, start: Coord) -> Result<LatticePath> {
        let dims = self.dims();
        dims.check(start)?;
        let mut cells = vec![start];
        let mut here = dims.index_of(start);
        while let Some(next) = self.out[here] {
            cells.push(dims.coord_at(next));
            here = next;
        }
        LatticePath::new(cells)
    }

    /// Row-major index of the sink each cell drains to.
    pub(crate) fn sink_indices(&self) -> Vec<usize> {
        let labels = self.labeling.as_slice();
        // Out-edges point to larger labels, so resolving cells in descending
        // label order always finds the target already resolved.
        let mut by_label = vec![0usize; labels.len()];
        for (i, &v) in labels.iter().enumerate() {
            by_label[v as usize - 1] = i;
        }
        let mut root = vec![usize::MAX; labels.len()];
        for &i in by_label.iter().rev() {
            root[i] = match self.out[i] {
                Some(t) => root[t],
                None => i,
            };
        }
        root
    }

    /// One component per sink, ordered by sink position (row-major).
    pub fn components(&self) -> Vec<Component> {
        let dims = self.dims();
        let root = self.sink_indices();
        let mut slot_of_sink = vec![usize::MAX; root.len()];
        let mut comps: Vec<Component> = Vec::new();
        for (i, t) in self.out.iter().enumerate() {
            if t.is_none() {
                slot_of_sink[i] = comps.len();
                comps.push(Component {
                    sink: dims.coord_at(i),
                    members: BTreeSet::new(),
                });
            }
        }
        for (i, &r) in root.iter().enumerate() {
            comps[slot_of_sink[r]].members.insert(dims.coord_at(i));
        }
        comps
    }

    /// Whether the out-path of `from` passes through `to`.
    pub fn reaches(&self, from: Coord, to: Coord) -> bool {
        let dims = self.dims();
        let target = dims.index_of(to);
        let mut here = dims.index_of(from);
        loop {
            if here == target {
                return true;
            }
            match self.out[here] {
                Some(next) => here = next,
                None => return false,
            }
        }
    }
}

impl OutEdges for GigDigraph {
    fn out_edge(&self, c: Coord) -> Option<Coord> {
        let dims = self.dims();
        self.out[dims.index_of(c)].map(|t| dims.coord_at(t))
    }
}
