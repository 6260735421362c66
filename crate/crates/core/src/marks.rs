use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, VertexIndex};

/// A marked vertex and its phase parameter `λ`; the marked coin adds
/// `(e^{iπλ} − 1)|s⟩⟨s|` to the Grover coin at this vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub vertex: VertexIndex,
    pub lambda: f64,
}

impl Mark {
    /// `e^{iπλ} − 1`, the weight of the rank-one correction.
    pub fn phase_shift(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI * self.lambda) - 1.0
    }
}

/// Ordered list of distinct marked vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarkedSet {
    entries: Vec<Mark>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(())
}

impl MarkedSet {
    pub fn empty() -> Self {
        MarkedSet::default()
    }

    pub fn new(spec: &LatticeSpec, entries: impl IntoIterator<Item = (VertexIndex, f64)>) -> Result<Self> {
        let mut set = MarkedSet::empty();
        for (vertex, lambda) in entries {
            set.push(spec, vertex, lambda)?;
        }
        Ok(set)
    }

    pub fn single(spec: &LatticeSpec, vertex: VertexIndex, lambda: f64) -> Result<Self> {
        MarkedSet::new(spec, [(vertex, lambda)])
    }

    /// All `vertices` marked with the same `lambda`.
    pub fn uniform(spec: &LatticeSpec, vertices: &[VertexIndex], lambda: f64) -> Result<Self> {
        MarkedSet::new(spec, vertices.iter().map(|v| (v.clone(), lambda)))
    }

    pub fn push(&mut self, spec: &LatticeSpec, vertex: VertexIndex, lambda: f64) -> Result<()> {
        check_lambda(lambda)?;
        if vertex.coords().len() != spec.dim() || vertex.flat() >= spec.vertex_count() {
            return Err(Error::WrongArity {
                expected: spec.dim(),
                got: vertex.coords().len(),
            });
        }
        if self.entries.iter().any(|m| m.vertex == vertex) {
            return Err(Error::DuplicateMark(vertex.coords().to_vec()));
        }
        if self.entries.len() + 1 > spec.max_marks() {
            return Err(Error::TooManyMarks {
                count: self.entries.len() + 1,
                limit: spec.max_marks(),
            });
        }
        self.entries.push(Mark { vertex, lambda });
        Ok(())
    }

    pub fn set_lambda(&mut self, index: usize, lambda: f64) -> Result<()> {
        check_lambda(lambda)?;
        let len = self.entries.len();
        self.entries
            .get_mut(index)
            .ok_or(Error::MarkIndex { index, len })?
            .lambda = lambda;
        Ok(())
    }

    /// Sets every mark to the same `lambda`.
    pub fn set_all_lambdas(&mut self, lambda: f64) -> Result<()> {
        check_lambda(lambda)?;
        for m in &mut self.entries {
            m.lambda = lambda;
        }
        Ok(())
    }

    /// Moves the mark at `index` to `to`: the old vertex keeps its entry with
    /// `λ = 0` (inert) and `to` is appended with the old `λ`. Indices of the
    /// existing marks stay valid. Returns the index of the new entry.
    pub fn relocate(&mut self, spec: &LatticeSpec, index: usize, to: VertexIndex) -> Result<usize> {
        let len = self.entries.len();
        let lambda = self.entries.get(index).ok_or(Error::MarkIndex { index, len })?.lambda;
        if let Some(existing) = self.entries.iter().position(|m| m.vertex == to) {
            self.entries[existing].lambda = lambda;
            self.entries[index].lambda = 0.0;
            return Ok(existing);
        }
        self.push(spec, to, lambda)?;
        self.entries[index].lambda = 0.0;
        Ok(self.entries.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mark> {
        self.entries.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Mark> {
        self.entries.get(index)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexIndex> {
        self.entries.iter().map(|m| &m.vertex)
    }

    pub fn all_lambdas_equal(&self, lambda: f64) -> bool {
        self.entries.iter().all(|m| (m.lambda - lambda).abs() < 1e-12)
    }

    pub fn position(&self, vertex: &VertexIndex) -> Option<usize> {
        self.entries.iter().position(|m| &m.vertex == vertex)
    }
}

impl<'a> IntoIterator for &'a MarkedSet {
    type Item = &'a Mark;
    type IntoIter = std::slice::Iter<'a, Mark>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
