//! Geometry of the periodic lattice: sizes, channel labels and vertex labels.
//!
//! A `d`-dimensional torus with `n` sites per axis carries `2d` directed
//! channels per vertex, one for each of the `±` directions along every axis.
//! States live in a space of dimension `N = 2d · n^d`, laid out vertex-major
//! with the `2d` channels of a vertex stored contiguously:
//!
//! ```text
//! flat(channel, vertex) = vertex.flat() * 2d + channel.flat()
//! channel.flat()        = 2 * axis + (sign == Minus) as usize
//! vertex.flat()         = row-major over coordinates, axis 0 slowest
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size description of a `d`-dimensional periodic lattice.
///
/// The lattice constant is fixed to one; all times are measured in walk steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    dim: usize,
    side: usize,
    vertex_count: usize,
    state_dim: usize,
}

impl LatticeSpec {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidLattice(format!(
                "dimension must be at least 1, got {dim}"
            )));
        }
        if side < 2 {
            return Err(Error::InvalidLattice(format!(
                "side length must be at least 2, got {side}"
            )));
        }
        let overflow = || Error::DimensionOverflow { dim, side };
        let exp = u32::try_from(dim).map_err(|_| overflow())?;
        let vertex_count = side.checked_pow(exp).ok_or_else(overflow)?;
        let state_dim = vertex_count
            .checked_mul(2 * dim)
            .filter(|&n| n <= isize::MAX as usize / std::mem::size_of::<[f64; 2]>())
            .ok_or_else(overflow)?;
        Ok(LatticeSpec {
            dim,
            side,
            vertex_count,
            state_dim,
        })
    }

    /// Number of axes `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sites per axis `n`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Directed channels per vertex, `2d`.
    pub fn channel_count(&self) -> usize {
        2 * self.dim
    }

    /// Number of vertices `n^d`.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Dimension of the state space, `2d · n^d`.
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn lattice_constant(&self) -> f64 {
        1.0
    }

    /// Largest number of marked vertices accepted by a [`MarkedSet`](crate::MarkedSet).
    pub fn max_marks(&self) -> usize {
        self.state_dim / (4 * self.dim)
    }

    /// Row-major stride of `axis` in the flat vertex index.
    pub fn stride(&self, axis: usize) -> usize {
        self.side.pow((self.dim - 1 - axis) as u32)
    }

    pub fn vertex(&self, coords: &[usize]) -> Result<VertexIndex> {
        if coords.len() != self.dim {
            return Err(Error::WrongArity {
                expected: self.dim,
                got: coords.len(),
            });
        }
        let mut flat = 0;
        for (axis, &c) in coords.iter().enumerate() {
            if c >= self.side {
                return Err(Error::CoordinateOutOfRange {
                    axis,
                    value: c as i64,
                    side: self.side,
                });
            }
            flat = flat * self.side + c;
        }
        Ok(VertexIndex {
            coords: coords.to_vec(),
            flat,
        })
    }

    /// Like [`vertex`](Self::vertex) but accepts signed coordinates, still
    /// rejecting anything outside `[0, n)`.
    pub fn vertex_signed(&self, coords: &[i64]) -> Result<VertexIndex> {
        if let Some((axis, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, &c)| c < 0 || c >= self.side as i64)
        {
            return Err(Error::CoordinateOutOfRange {
                axis,
                value,
                side: self.side,
            });
        }
        let coords: Vec<usize> = coords.iter().map(|&c| c as usize).collect();
        self.vertex(&coords)
    }

    pub fn vertex_from_flat(&self, flat: usize) -> VertexIndex {
        assert!(flat < self.vertex_count, "flat vertex index out of range");
        let mut coords = vec![0; self.dim];
        let mut rest = flat;
        for c in coords.iter_mut().rev() {
            *c = rest % self.side;
            rest /= self.side;
        }
        VertexIndex { coords, flat }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexIndex> + '_ {
        (0..self.vertex_count).map(|f| self.vertex_from_flat(f))
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelIndex> {
        (0..self.channel_count()).map(ChannelIndex::from_flat)
    }

    /// Flat state index of `(channel, vertex)`.
    pub fn flat_index(&self, channel: ChannelIndex, vertex: &VertexIndex) -> usize {
        vertex.flat * self.channel_count() + channel.flat()
    }

    /// Vertex reached from `vertex` by one step along `axis` in direction `sign`.
    pub fn neighbor(&self, vertex: &VertexIndex, axis: usize, sign: Sign) -> VertexIndex {
        let mut coords = vertex.coords.clone();
        coords[axis] = match sign {
            Sign::Plus => (coords[axis] + 1) % self.side,
            Sign::Minus => (coords[axis] + self.side - 1) % self.side,
        };
        self.vertex(&coords).expect("wrapped coordinates are in range")
    }

    /// `vertex + shift` with periodic wrap-around.
    pub fn translate(&self, vertex: &VertexIndex, shift: &[i64]) -> VertexIndex {
        assert_eq!(shift.len(), self.dim);
        let n = self.side as i64;
        let coords: Vec<usize> = vertex
            .coords
            .iter()
            .zip(shift)
            .map(|(&c, &s)| (c as i64 + s).rem_euclid(n) as usize)
            .collect();
        self.vertex(&coords).expect("wrapped coordinates are in range")
    }

    /// The shift carrying `from` onto `to`.
    pub fn displacement(&self, from: &VertexIndex, to: &VertexIndex) -> Vec<i64> {
        from.coords
            .iter()
            .zip(&to.coords)
            .map(|(&a, &b)| b as i64 - a as i64)
            .collect()
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} n={} (N={})", self.dim, self.side, self.state_dim)
    }
}

pub fn build_lattice(dim: usize, side: usize) -> Result<LatticeSpec> {
    LatticeSpec::new(dim, side)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Direction label `i±` of a channel at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelIndex {
    pub axis: usize,
    pub sign: Sign,
}

impl ChannelIndex {
    pub fn new(axis: usize, sign: Sign) -> Self {
        ChannelIndex { axis, sign }
    }

    pub fn flat(self) -> usize {
        2 * self.axis + usize::from(self.sign == Sign::Minus)
    }

    pub fn from_flat(flat: usize) -> Self {
        ChannelIndex {
            axis: flat / 2,
            sign: if flat % 2 == 0 { Sign::Plus } else { Sign::Minus },
        }
    }
}

/// A lattice site. Only constructible through a [`LatticeSpec`], so the
/// coordinates are always in range for the lattice that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexIndex {
    coords: Vec<usize>,
    flat: usize,
}

impl VertexIndex {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn flat(&self) -> usize {
        self.flat
    }
}

impl fmt::Display for VertexIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
