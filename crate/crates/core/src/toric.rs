//! One error sector of the toric code.
//!
//! Anyons live on the `L x L` cells of the syndrome lattice (the faces of the
//! toric-code lattice). Every pair of adjacent cells is separated by exactly
//! one qubit, so a qubit is addressed by the link joining two cells:
//!
//! - `horizontal[x + L*y]` is the qubit between cell `(x, y)` and `(x+1, y)`,
//! - `vertical[x + L*y]` is the qubit between cell `(x, y)` and `(x, y+1)`.
//!
//! An X error on a qubit toggles the parity of both cells it separates, so
//! the syndrome of a cell is the XOR of its four incident links. The smallest
//! closed loop, and hence a stabilizer, is the four links around a unit
//! square of cells.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::TorusIndex;

/// In-plane hop direction, in the crate-wide neighbor order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PlusX = 0,
    MinusX = 1,
    PlusY = 2,
    MinusY = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::PlusX,
        Direction::MinusX,
        Direction::PlusY,
        Direction::MinusY,
    ];

    #[inline]
    pub fn from_slot(slot: usize) -> Self {
        Self::ALL[slot]
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::PlusX => Direction::MinusX,
            Direction::MinusX => Direction::PlusX,
            Direction::PlusY => Direction::MinusY,
            Direction::MinusY => Direction::PlusY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Flat cell index of the in-plane neighbor of `cell` in direction `dir`.
#[inline]
pub fn step(size: usize, cell: usize, dir: Direction) -> usize {
    let (x, y) = (cell % size, cell / size);
    match dir {
        Direction::PlusX => (x + 1) % size + size * y,
        Direction::MinusX => (x + size - 1) % size + size * y,
        Direction::PlusY => x + size * ((y + 1) % size),
        Direction::MinusY => x + size * ((y + size - 1) % size),
    }
}

/// The link crossed when leaving `cell` in direction `dir`.
#[inline]
pub fn link(size: usize, cell: usize, dir: Direction) -> (Orientation, usize) {
    match dir {
        Direction::PlusX => (Orientation::Horizontal, cell),
        Direction::MinusX => (Orientation::Horizontal, step(size, cell, Direction::MinusX)),
        Direction::PlusY => (Orientation::Vertical, cell),
        Direction::MinusY => (Orientation::Vertical, step(size, cell, Direction::MinusY)),
    }
}

/// Per-qubit X-error indicator of one sector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorConfig {
    size: usize,
    horizontal: Vec<bool>,
    vertical: Vec<bool>,
}

impl ErrorConfig {
    pub fn empty(size: usize) -> Self {
        assert!(size >= 3, "lattice size {size} below 3");
        Self {
            size,
            horizontal: vec![false; size * size],
            vertical: vec![false; size * size],
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn horizontal(&self) -> &[bool] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[bool] {
        &self.vertical
    }

    /// Number of addressable qubits, `2 L^2`.
    pub fn num_edges(&self) -> usize {
        2 * self.size * self.size
    }

    pub fn weight(&self) -> usize {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .filter(|&&b| b)
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.weight() == 0
    }

    pub fn get(&self, orientation: Orientation, index: usize) -> bool {
        match orientation {
            Orientation::Horizontal => self.horizontal[index],
            Orientation::Vertical => self.vertical[index],
        }
    }

    pub fn toggle(&mut self, orientation: Orientation, index: usize) {
        let slot = match orientation {
            Orientation::Horizontal => &mut self.horizontal[index],
            Orientation::Vertical => &mut self.vertical[index],
        };
        *slot = !*slot;
    }

    /// Toggles the qubit between `cell` and its neighbor in direction `dir`.
    #[inline]
    pub fn toggle_link(&mut self, cell: usize, dir: Direction) {
        let (o, i) = link(self.size, cell, dir);
        self.toggle(o, i);
    }

    /// Returns a copy with the qubit between `face` and its neighbor in
    /// direction `dir` flipped.
    pub fn flip_edge(&self, face: &TorusIndex, dir: Direction) -> Result<ErrorConfig> {
        let cell = self.cell_of(face)?;
        let mut out = self.clone();
        out.toggle_link(cell, dir);
        Ok(out)
    }

    pub fn xor(&self, other: &ErrorConfig) -> Result<ErrorConfig> {
        if self.size != other.size {
            return Err(Error::LatticeMismatch(self.size, 2, other.size, 2));
        }
        let zip = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| x ^ y).collect();
        Ok(ErrorConfig {
            size: self.size,
            horizontal: zip(&self.horizontal, &other.horizontal),
            vertical: zip(&self.vertical, &other.vertical),
        })
    }

    pub fn xor_assign(&mut self, other: &ErrorConfig) {
        assert_eq!(self.size, other.size);
        for (a, b) in self.horizontal.iter_mut().zip(&other.horizontal) {
            *a ^= b;
        }
        for (a, b) in self.vertical.iter_mut().zip(&other.vertical) {
            *a ^= b;
        }
    }

    /// Toggles the four links around the unit square whose lower-left cell
    /// is `cell`. This is a stabilizer: it never changes the syndrome.
    pub fn apply_stabilizer(&mut self, cell: usize) {
        let right = step(self.size, cell, Direction::PlusX);
        let up = step(self.size, cell, Direction::PlusY);
        self.horizontal[cell] ^= true;
        self.horizontal[up] ^= true;
        self.vertical[cell] ^= true;
        self.vertical[right] ^= true;
    }

    pub fn syndrome(&self) -> ChargeField {
        let l = self.size;
        let mut q = vec![false; l * l];
        for (cell, slot) in q.iter_mut().enumerate() {
            let left = step(l, cell, Direction::MinusX);
            let down = step(l, cell, Direction::MinusY);
            *slot = self.horizontal[cell]
                ^ self.horizontal[left]
                ^ self.vertical[cell]
                ^ self.vertical[down];
        }
        ChargeField { size: l, q }
    }

    /// Winding parities `(along x, along y)`: the number of flipped links
    /// crossing the cut between columns 0 and 1, and between rows 0 and 1.
    pub fn winding_parity(&self) -> (bool, bool) {
        let l = self.size;
        let wx = (0..l).fold(false, |acc, y| acc ^ self.horizontal[l * y]);
        let wy = (0..l).fold(false, |acc, x| acc ^ self.vertical[x]);
        (wx, wy)
    }

    /// Whether a syndrome-free configuration wraps the torus an odd number of
    /// times along either cycle.
    pub fn logical_failure(&self) -> Result<bool> {
        let anyons = self.syndrome().count();
        if anyons != 0 {
            return Err(Error::NonzeroSyndrome(anyons));
        }
        let (wx, wy) = self.winding_parity();
        Ok(wx || wy)
    }

    /// ASCII picture, one text row pair per lattice row `y` (top row first).
    ///
    /// Cells are `.` (no anyon) or `o` (anyon). A flipped horizontal link is
    /// drawn as `-` right of its cell, a flipped vertical link as `|` above
    /// its cell. Lines end with `\n`.
    pub fn ascii(&self) -> String {
        let l = self.size;
        let q = self.syndrome();
        let mut s = String::new();
        for y in (0..l).rev() {
            for x in 0..l {
                s.push(if self.vertical[x + l * y] { '|' } else { ' ' });
                s.push(' ');
            }
            s.push('\n');
            for x in 0..l {
                s.push(if q.q[x + l * y] { 'o' } else { '.' });
                s.push(if self.horizontal[x + l * y] { '-' } else { ' ' });
            }
            s.push('\n');
        }
        let _ = writeln!(s, "weight={} anyons={}", self.weight(), q.count());
        s
    }

    fn cell_of(&self, face: &TorusIndex) -> Result<usize> {
        if face.size() != self.size || face.dim() != 2 {
            return Err(Error::LatticeMismatch(
                self.size,
                2,
                face.size(),
                face.dim(),
            ));
        }
        Ok(face.coords()[0] + self.size * face.coords()[1])
    }
}

/// Binary anyon indicator over the `L x L` cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChargeField {
    size: usize,
    q: Vec<bool>,
}

impl ChargeField {
    pub fn empty(size: usize) -> Self {
        Self {
            size,
            q: vec![false; size * size],
        }
    }

    /// Charges at the given flat cells. Duplicates cancel.
    pub fn from_cells(size: usize, cells: &[usize]) -> Self {
        let mut out = Self::empty(size);
        for &c in cells {
            out.q[c] ^= true;
        }
        out
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.q
    }

    #[inline]
    pub fn get(&self, cell: usize) -> bool {
        self.q[cell]
    }

    #[inline]
    pub fn toggle(&mut self, cell: usize) {
        self.q[cell] ^= true;
    }

    pub fn count(&self) -> usize {
        self.q.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.q.iter().any(|&b| b)
    }

    /// Flat indices of the anyon cells in ascending order.
    pub fn anyons(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.anyons_into(&mut out);
        out
    }

    pub fn anyons_into(&self, out: &mut Vec<usize>) {
        out.clear();
        out.extend(
            self.q
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i),
        );
    }

    pub fn xor(&self, other: &ChargeField) -> ChargeField {
        assert_eq!(self.size, other.size);
        ChargeField {
            size: self.size,
            q: self.q.iter().zip(&other.q).map(|(a, b)| a ^ b).collect(),
        }
    }
}

pub fn syndrome(e: &ErrorConfig) -> ChargeField {
    e.syndrome()
}

pub fn logical_failure(e: &ErrorConfig) -> Result<bool> {
    e.logical_failure()
}

/// Flips each of the `2 L^2` qubits independently with probability `p`.
///
/// Horizontal links are drawn first, then vertical links, each in flat order.
pub fn sample_iid_noise<R: Rng + ?Sized>(size: usize, p: f64, rng: &mut R) -> Result<ErrorConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut e = ErrorConfig::empty(size);
    for b in e.horizontal.iter_mut().chain(e.vertical.iter_mut()) {
        *b = rng.gen_bool(p);
    }
    Ok(e)
}
