//! Periodic hypercubic lattices.
//!
//! Cells are stored row-major with axis 0 fastest: the flat index of
//! `(x0, x1, x2)` is `x0 + L*x1 + L*L*x2`. A consequence used throughout the
//! crate is that the plane `x2 = 0` of a 3D lattice has exactly the flat
//! indices of the matching 2D lattice.
//!
//! Neighbors are always enumerated in the order `+e0, -e0, +e1, -e1, +e2, -e2`.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// A cell of a periodic lattice of linear size `size` and dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusIndex {
    coords: [usize; MAX_DIM],
    size: usize,
    dim: usize,
}

impl TorusIndex {
    /// Builds an index, reducing every coordinate modulo `size`.
    pub fn new(coords: &[i64], size: usize) -> Result<Self> {
        check_shape(size, coords.len())?;
        let mut c = [0usize; MAX_DIM];
        for (slot, &x) in c.iter_mut().zip(coords) {
            *slot = x.rem_euclid(size as i64) as usize;
        }
        Ok(Self {
            coords: c,
            size,
            dim: coords.len(),
        })
    }

    /// Builds an index from coordinates that must already lie in `[0, size)`.
    pub fn from_coords(coords: &[usize], size: usize) -> Result<Self> {
        check_shape(size, coords.len())?;
        if coords.iter().any(|&x| x >= size) {
            return Err(Error::InvalidIndex {
                coords: coords.to_vec(),
                size,
                dim: coords.len(),
            });
        }
        let mut c = [0usize; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: c,
            size,
            dim: coords.len(),
        })
    }

    pub fn origin(size: usize, dim: usize) -> Result<Self> {
        Self::from_coords(&[0; MAX_DIM][..dim], size)
    }

    #[inline]
    pub fn coords(&self) -> &[usize] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Moves `delta` steps along `axis`, wrapping around.
    pub fn shifted(&self, axis: usize, delta: i64) -> Self {
        assert!(
            axis < self.dim,
            "axis {axis} out of range for D={}",
            self.dim
        );
        let mut out = *self;
        let l = self.size as i64;
        out.coords[axis] = (self.coords[axis] as i64 + delta).rem_euclid(l) as usize;
        out
    }

    /// Component-wise difference `self - other`, wrapped into `[0, L)`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = *self;
        for j in 0..self.dim {
            out.coords[j] = (self.coords[j] + self.size - other.coords[j]) % self.size;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = *self;
        for j in 0..self.dim {
            out.coords[j] = (self.size - self.coords[j]) % self.size;
        }
        out
    }

    /// The 2D neighbors in the order `+e0, -e0, +e1, -e1, ...`.
    pub fn neighbors(&self) -> Vec<TorusIndex> {
        (0..self.dim)
            .flat_map(|axis| [self.shifted(axis, 1), self.shifted(axis, -1)])
            .collect()
    }

    /// Minimal-image offsets per axis, each in `[0, L/2]`.
    pub fn minimal_offsets(&self, other: &Self) -> Result<[usize; MAX_DIM]> {
        self.check_same(other)?;
        let mut d = [0usize; MAX_DIM];
        for j in 0..self.dim {
            let raw = self.coords[j].abs_diff(other.coords[j]);
            d[j] = raw.min(self.size - raw);
        }
        Ok(d)
    }

    /// Euclidean distance under the minimal-image convention.
    pub fn torus_distance(&self, other: &Self) -> Result<f64> {
        let d = self.minimal_offsets(other)?;
        Ok(d.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt())
    }

    /// Manhattan distance under the minimal-image convention.
    pub fn torus_distance_l1(&self, other: &Self) -> Result<usize> {
        Ok(self.minimal_offsets(other)?.iter().sum())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.size != other.size || self.dim != other.dim {
            return Err(Error::LatticeMismatch(
                self.size, self.dim, other.size, other.dim,
            ));
        }
        Ok(())
    }
}

pub fn neighbors(x: &TorusIndex) -> Vec<TorusIndex> {
    x.neighbors()
}

pub fn torus_distance(x: &TorusIndex, y: &TorusIndex) -> Result<f64> {
    x.torus_distance(y)
}

pub fn torus_distance_l1(x: &TorusIndex, y: &TorusIndex) -> Result<usize> {
    x.torus_distance_l1(y)
}

fn check_shape(size: usize, dim: usize) -> Result<()> {
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if size < 3 {
        return Err(Error::LatticeTooSmall(size));
    }
    Ok(())
}

/// A periodic `L^D` lattice with a precomputed neighbor table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    size: usize,
    dim: usize,
    strides: [usize; MAX_DIM],
    neighbors: Vec<u32>,
}

impl Lattice {
    pub fn new(size: usize, dim: usize) -> Result<Self> {
        check_shape(size, dim)?;
        let mut strides = [0usize; MAX_DIM];
        let mut s = 1;
        for stride in strides.iter_mut().take(dim) {
            *stride = s;
            s *= size;
        }
        let mut lattice = Self {
            size,
            dim,
            strides,
            neighbors: Vec::new(),
        };
        let cells = lattice.cells();
        let mut table = Vec::with_capacity(cells * 2 * dim);
        for idx in 0..cells {
            let x = lattice.index_of(idx);
            for axis in 0..dim {
                table.push(lattice.flat(&x.shifted(axis, 1)) as u32);
                table.push(lattice.flat(&x.shifted(axis, -1)) as u32);
            }
        }
        lattice.neighbors = table;
        Ok(lattice)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Number of neighbors of every cell, `2D`.
    #[inline]
    pub fn degree(&self) -> usize {
        2 * self.dim
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Flat index of a cell. Panics if `x` belongs to another lattice.
    #[inline]
    pub fn flat(&self, x: &TorusIndex) -> usize {
        debug_assert!(x.size == self.size && x.dim == self.dim);
        x.coords()
            .iter()
            .zip(&self.strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn try_flat(&self, x: &TorusIndex) -> Result<usize> {
        if x.size != self.size || x.dim != self.dim {
            return Err(Error::LatticeMismatch(self.size, self.dim, x.size, x.dim));
        }
        Ok(self.flat(x))
    }

    pub fn index_of(&self, mut flat: usize) -> TorusIndex {
        debug_assert!(flat < self.cells());
        let mut coords = [0usize; MAX_DIM];
        for c in coords.iter_mut().take(self.dim) {
            *c = flat % self.size;
            flat /= self.size;
        }
        TorusIndex {
            coords,
            size: self.size,
            dim: self.dim,
        }
    }

    /// Flat indices of the neighbors of `flat`, in the fixed axis order.
    #[inline]
    pub fn neighbor_table(&self, flat: usize) -> &[u32] {
        let d = self.degree();
        &self.neighbors[flat * d..(flat + 1) * d]
    }

    pub fn neighbors(&self, x: &TorusIndex) -> Vec<TorusIndex> {
        x.neighbors()
    }

    pub fn iter(&self) -> impl Iterator<Item = TorusIndex> + '_ {
        (0..self.cells()).map(|i| self.index_of(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(c: &[usize], l: usize) -> TorusIndex {
        TorusIndex::from_coords(c, l).unwrap()
    }

    #[test]
    fn neighbors_2d_wrap() {
        let got = idx(&[0, 0], 4).neighbors();
        let want = [[1, 0], [3, 0], [0, 1], [0, 3]].map(|c| idx(&c, 4));
        assert_eq!(got, want);
    }

    #[test]
    fn neighbors_3d_corner() {
        let x = idx(&[2, 2, 2], 3);
        let got = x.neighbors();
        assert_eq!(got.len(), 6);
        for (n, axis) in got.iter().zip([0, 0, 1, 1, 2, 2]) {
            assert_eq!(x.torus_distance_l1(n).unwrap(), 1);
            for j in 0..3 {
                if j != axis {
                    assert_eq!(n.coords()[j], 2);
                }
            }
        }
        assert_eq!(got[0].coords(), &[0, 2, 2]);
        assert_eq!(got[1].coords(), &[1, 2, 2]);
    }

    #[test]
    fn neighbors_1d_wrap() {
        let got = idx(&[4], 5).neighbors();
        assert_eq!(got, vec![idx(&[0], 5), idx(&[3], 5)]);
    }

    #[test]
    fn distances() {
        let d = torus_distance(&idx(&[0, 0], 8), &idx(&[7, 0], 8)).unwrap();
        assert_eq!(d, 1.0);
        let d = torus_distance(&idx(&[0, 0], 8), &idx(&[4, 4], 8)).unwrap();
        assert_eq!(d, 32f64.sqrt());
        let d = torus_distance(&idx(&[1, 1], 6), &idx(&[1, 1], 6)).unwrap();
        assert_eq!(d, 0.0);
        let d1 = torus_distance_l1(&idx(&[0, 1], 8), &idx(&[6, 4], 8)).unwrap();
        assert_eq!(d1, 2 + 3);
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let a = idx(&[0, 0], 8);
        assert!(matches!(
            a.torus_distance(&idx(&[0, 0], 6)),
            Err(Error::LatticeMismatch(8, 2, 6, 2))
        ));
        assert!(a.torus_distance(&idx(&[0, 0, 0], 8)).is_err());
    }

    #[test]
    fn invalid_shapes() {
        assert_eq!(Lattice::new(2, 2), Err(Error::LatticeTooSmall(2)));
        assert_eq!(Lattice::new(4, 4), Err(Error::UnsupportedDimension(4)));
        assert!(TorusIndex::from_coords(&[4, 0], 4).is_err());
        assert_eq!(TorusIndex::new(&[-1, 9], 4).unwrap().coords(), &[3, 1]);
    }

    #[test]
    fn table_matches_enumeration() {
        for (l, d) in [(3, 1), (5, 2), (4, 3)] {
            let lat = Lattice::new(l, d).unwrap();
            for (i, x) in lat.iter().enumerate() {
                assert_eq!(lat.flat(&x), i);
                let want: Vec<u32> = x.neighbors().iter().map(|n| lat.flat(n) as u32).collect();
                assert_eq!(lat.neighbor_table(i), want.as_slice());
            }
        }
    }

    #[test]
    fn plane_of_3d_matches_2d_indexing() {
        let l2 = Lattice::new(5, 2).unwrap();
        let l3 = Lattice::new(5, 3).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(l2.flat(&idx(&[x, y], 5)), l3.flat(&idx(&[x, y, 0], 5)));
            }
        }
    }
}
