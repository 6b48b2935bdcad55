#![allow(dead_code)]

use gig::{Coord, GridDims, LatticePath, Rational};

pub fn c(row: usize, col: usize) -> Coord {
    Coord::new(row, col)
}

pub fn d(m: usize, n: usize) -> GridDims {
    GridDims::new(m, n).unwrap()
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn recip(den: u64) -> Rational {
    Rational::new(1.into(), den.into())
}

pub fn path(cells: &[(usize, usize)]) -> LatticePath {
    LatticePath::new(cells.iter().map(|&(r, col)| c(r, col)).collect()).unwrap()
}

/// Three shortest paths from (4,1) to (1,4) on a 5x5 grid, turning progressively earlier.
pub fn p1() -> LatticePath {
    path(&[(4, 1), (4, 2), (4, 3), (4, 4), (3, 4), (2, 4), (1, 4)])
}

pub fn p2() -> LatticePath {
    path(&[(4, 1), (4, 2), (4, 3), (3, 3), (3, 4), (2, 4), (1, 4)])
}

pub fn p3() -> LatticePath {
    path(&[(4, 1), (4, 2), (3, 2), (3, 3), (3, 4), (2, 4), (1, 4)])
}

/// Vertex sets of size 1 to 3 with no two members lattice-adjacent.
pub fn non_adjacent_sets(dims: GridDims) -> Vec<Vec<Coord>> {
    let cells: Vec<Coord> = dims.cells().collect();
    let free = |set: &[Coord], x: Coord| set.iter().all(|&s| gig::lattice::squared_distance(s, x) > 1);
    let mut out = Vec::new();
    for (i, &a) in cells.iter().enumerate() {
        out.push(vec![a]);
        for (j, &b) in cells.iter().enumerate().skip(i + 1) {
            if free(&[a], b) {
                out.push(vec![a, b]);
                for &x in &cells[j + 1..] {
                    if free(&[a, b], x) {
                        out.push(vec![a, b, x]);
                    }
                }
            }
        }
    }
    out
}
