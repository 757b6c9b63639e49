//! Dense pointwise tensor values.
//!
//! A [`TensorValue`] is the value of a tensor field at one chart point:
//! a dense `dim^rank` array in row-major order (last index fastest) with a
//! variance marker per slot and an optional list of declared symmetries.
//! Components are read and written through full multi-indices; nothing here
//! knows about coordinates or fields.

use std::fmt;

/// Whether a slot is contravariant (`Up`, takes a covector) or covariant
/// (`Down`, takes a vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

/// Declared index symmetry between two slots (checkable, not enforced by
/// storage).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

#[derive(Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
    symmetries: Vec<Symmetry>,
}

impl TensorValue {
    /// Zero tensor with the given slot variances.
    pub fn zeros(dim: usize, variance: &[Variance]) -> TensorValue {
        let size = dim.pow(variance.len() as u32);
        TensorValue {
            dim,
            variance: variance.to_vec(),
            data: vec![0.0; size],
            symmetries: Vec::new(),
        }
    }

    /// Builder-style declaration of a symmetry the producer believes holds.
    pub fn with_symmetry(mut self, sym: Symmetry) -> TensorValue {
        let (Symmetry::Symmetric(a, b) | Symmetry::Antisymmetric(a, b)) = sym;
        assert!(a < self.rank() && b < self.rank() && a != b, "bad symmetry slots");
        self.symmetries.push(sym);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    #[inline]
    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    #[inline]
    pub fn add_to(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] += v;
    }

    /// Flat view of the components (row-major, last index fastest).
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute componentwise difference against `other`.
    ///
    /// Panics if shapes differ — comparing tensors of different shape is a
    /// programming error, not a numerical event.
    pub fn max_abs_diff(&self, other: &TensorValue) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.rank(), other.rank(), "rank mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Worst violation of the declared symmetries, as a max-abs residual.
    /// Zero for a tensor with no declared symmetries.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for &sym in &self.symmetries {
            let (a, b, sign) = match sym {
                Symmetry::Symmetric(a, b) => (a, b, 1.0),
                Symmetry::Antisymmetric(a, b) => (a, b, -1.0),
            };
            let mut idx = vec![0usize; self.rank()];
            loop {
                let mut swapped = idx.clone();
                swapped.swap(a, b);
                let r = (self.get(&idx) - sign * self.get(&swapped)).abs();
                worst = worst.max(r);
                if !increment(&mut idx, self.dim) {
                    break;
                }
            }
        }
        worst
    }

    /// Iterate over all multi-indices of this tensor in row-major order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.dim, self.rank())
    }
}

impl fmt::Debug for TensorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TensorValue(dim={}, variance={:?}, max_abs={:.3e})",
            self.dim,
            self.variance,
            self.max_abs()
        )
    }
}

/// Advance a multi-index in row-major order; false when it wraps to zero.
#[inline]
pub(crate) fn increment(idx: &mut [usize], dim: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Row-major iterator over all rank-length multi-indices.
pub struct MultiIndexIter {
    dim: usize,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    fn new(dim: usize, rank: usize) -> MultiIndexIter {
        let next = if dim == 0 && rank > 0 {
            None
        } else {
            Some(vec![0; rank])
        };
        MultiIndexIter { dim, next }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        let mut succ = current.clone();
        if succ.is_empty() || !increment(&mut succ, self.dim) {
            self.next = None;
        } else {
            self.next = Some(succ);
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_row_major() {
        let mut t = TensorValue::zeros(3, &[Variance::Down, Variance::Down]);
        t.set(&[1, 2], 5.0);
        assert_eq!(t.as_slice()[1 * 3 + 2], 5.0);
        assert_eq!(t.get(&[1, 2]), 5.0);
        assert_eq!(t.get(&[2, 1]), 0.0);
    }

    #[test]
    fn symmetry_residual_detects_violations() {
        let mut t = TensorValue::zeros(2, &[Variance::Down, Variance::Down])
            .with_symmetry(Symmetry::Symmetric(0, 1));
        t.set(&[0, 1], 1.0);
        t.set(&[1, 0], 1.0);
        assert_eq!(t.symmetry_residual(), 0.0);
        t.set(&[1, 0], 0.25);
        assert!((t.symmetry_residual() - 0.75).abs() < 1e-15);

        let mut a = TensorValue::zeros(2, &[Variance::Down, Variance::Down])
            .with_symmetry(Symmetry::Antisymmetric(0, 1));
        a.set(&[0, 1], 2.0);
        a.set(&[1, 0], -2.0);
        assert_eq!(a.symmetry_residual(), 0.0);
        a.set(&[0, 0], 0.5); // diagonal must vanish for antisymmetry
        assert_eq!(a.symmetry_residual(), 1.0);
    }

    #[test]
    fn index_iteration_covers_everything_once() {
        let t = TensorValue::zeros(3, &[Variance::Down; 3]);
        let all: Vec<_> = t.indices().collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all[0], vec![0, 0, 0]);
        assert_eq!(all[26], vec![2, 2, 2]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 27);
    }

    #[test]
    fn rank_zero_yields_single_empty_index() {
        let t = TensorValue::zeros(3, &[]);
        let all: Vec<_> = t.indices().collect();
        assert_eq!(all, vec![Vec::<usize>::new()]);
    }
}
