//! Truncated Fock-space operator algebra.
//!
//! A [`HilbertSpace`] is an ordered list of subsystems: an optional spin
//! (dimension 2) followed by up to three bosonic modes `a`, `b`, `c`, each
//! truncated at `n_max` (dimension `n_max + 1`). Operators are sparse complex
//! matrices on the full tensor product; ladder operators obey
//! ⟨n−1|â|n⟩ = √n with hard truncation at the top level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::C64;

/// Subsystem label. Declaration order is the canonical subsystem order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Spin,
    A,
    B,
    C,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Label::Spin => "spin",
            Label::A => "a",
            Label::B => "b",
            Label::C => "c",
        };
        f.write_str(s)
    }
}

/// Internal spin state of the ion; `Down` is index 0, `Up` is index 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinState {
    Down,
    Up,
}

impl SpinState {
    pub fn index(self) -> usize {
        match self {
            SpinState::Down => 0,
            SpinState::Up => 1,
        }
    }
}

/// Ordered tensor product of subsystems with row-major index arithmetic
/// (first subsystem most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    subsystems: Vec<(Label, usize)>,
}

impl HilbertSpace {
    /// Build a space from `(label, dimension)` pairs. Subsystems are put in
    /// canonical order (spin, a, b, c) regardless of input order so that
    /// serialized indices are reproducible.
    pub fn new(subsystems: &[(Label, usize)]) -> Result<Self> {
        let mut subs = subsystems.to_vec();
        subs.sort_by_key(|&(l, _)| l);
        for w in subs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateLabel(w[0].0));
            }
        }
        for &(label, dim) in &subs {
            if dim == 0 {
                return Err(Error::InvalidDimension { label, dim });
            }
            if label == Label::Spin && dim != 2 {
                return Err(Error::InvalidDimension { label, dim });
            }
        }
        Ok(Self { subsystems: subs })
    }

    /// The three bosonic modes (a, b, c), each truncated at `n_max`.
    pub fn three_modes(n_max: usize) -> Self {
        Self::new(&[
            (Label::A, n_max + 1),
            (Label::B, n_max + 1),
            (Label::C, n_max + 1),
        ])
        .expect("static layout")
    }

    /// Spin plus the three bosonic modes, each truncated at `n_max`.
    pub fn spin_three_modes(n_max: usize) -> Self {
        Self::new(&[
            (Label::Spin, 2),
            (Label::A, n_max + 1),
            (Label::B, n_max + 1),
            (Label::C, n_max + 1),
        ])
        .expect("static layout")
    }

    /// Two bosonic modes with a common truncation.
    pub fn two_modes(first: Label, second: Label, n_max: usize) -> Result<Self> {
        Self::new(&[(first, n_max + 1), (second, n_max + 1)])
    }

    pub fn subsystems(&self) -> &[(Label, usize)] {
        &self.subsystems
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|&(_, d)| d).product()
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.subsystems.iter().position(|&(l, _)| l == label)
    }

    pub fn contains(&self, label: Label) -> bool {
        self.position(label).is_some()
    }

    pub fn has_spin(&self) -> bool {
        self.contains(Label::Spin)
    }

    pub fn dim_of(&self, label: Label) -> Result<usize> {
        self.position(label)
            .map(|p| self.subsystems[p].1)
            .ok_or(Error::UnknownLabel(label))
    }

    /// Largest Fock occupation representable on a bosonic mode.
    pub fn n_max_of(&self, label: Label) -> Result<usize> {
        if label == Label::Spin {
            return Err(Error::NotBosonic(label));
        }
        Ok(self.dim_of(label)? - 1)
    }

    /// Stride of subsystem `pos`: the product of all later dimensions.
    fn stride(&self, pos: usize) -> usize {
        self.subsystems[pos + 1..].iter().map(|&(_, d)| d).product()
    }

    /// Linear index of a multi-index given in subsystem order.
    pub fn index_of(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.subsystems.len());
        let mut idx = 0;
        for (k, &(_, d)) in self.subsystems.iter().enumerate() {
            debug_assert!(multi[k] < d);
            idx = idx * d + multi[k];
        }
        idx
    }

    /// Multi-index (in subsystem order) of a linear index.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut multi = vec![0; self.subsystems.len()];
        for (k, &(_, d)) in self.subsystems.iter().enumerate().rev() {
            multi[k] = idx % d;
            idx /= d;
        }
        multi
    }
}

/// Sparse complex operator tied to a [`HilbertSpace`]. Immutable after
/// construction; all algebra returns new operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CsrMatrix,
}

impl Operator {
    pub fn from_matrix(space: HilbertSpace, matrix: CsrMatrix) -> Self {
        assert_eq!(space.dim(), matrix.dim(), "matrix size must match space");
        Self { space, matrix }
    }

    pub fn from_triplets(space: HilbertSpace, triplets: Vec<(usize, usize, C64)>) -> Self {
        let dim = space.dim();
        Self::from_matrix(space, CsrMatrix::from_triplets(dim, triplets))
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        Self::from_matrix(space.clone(), CsrMatrix::zeros(space.dim()))
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        Self::from_matrix(space.clone(), CsrMatrix::identity(space.dim()))
    }

    /// Annihilation operator on mode `label`, embedded with identities on
    /// every other subsystem: ⟨…, n−1, …|â|…, n, …⟩ = √n.
    pub fn annihilation(space: &HilbertSpace, label: Label) -> Result<Self> {
        if label == Label::Spin {
            return Err(Error::NotBosonic(label));
        }
        let pos = space.position(label).ok_or(Error::UnknownLabel(label))?;
        let (_, d) = space.subsystems[pos];
        let stride = space.stride(pos);
        let dim = space.dim();
        let mut triplets = Vec::with_capacity(dim - dim / d);
        for idx in 0..dim {
            let occ = (idx / stride) % d;
            if occ >= 1 {
                triplets.push((idx - stride, idx, C64::new((occ as f64).sqrt(), 0.0)));
            }
        }
        Ok(Self::from_triplets(space.clone(), triplets))
    }

    /// Creation operator: the exact adjoint of [`Operator::annihilation`].
    pub fn creation(space: &HilbertSpace, label: Label) -> Result<Self> {
        Ok(Self::annihilation(space, label)?.adjoint())
    }

    /// Number operator on mode `label`; diagonal with exact integer entries.
    pub fn number(space: &HilbertSpace, label: Label) -> Result<Self> {
        if label == Label::Spin {
            return Err(Error::NotBosonic(label));
        }
        let pos = space.position(label).ok_or(Error::UnknownLabel(label))?;
        let (_, d) = space.subsystems[pos];
        let stride = space.stride(pos);
        let dim = space.dim();
        let mut triplets = Vec::with_capacity(dim);
        for idx in 0..dim {
            let occ = (idx / stride) % d;
            if occ > 0 {
                triplets.push((idx, idx, C64::new(occ as f64, 0.0)));
            }
        }
        Ok(Self::from_triplets(space.clone(), triplets))
    }

    /// Diagonal operator with entry `f(multi-index)` on each basis state;
    /// exact zeros are not stored.
    pub fn diagonal_from_fn(space: &HilbertSpace, f: impl Fn(&[usize]) -> C64) -> Self {
        let dim = space.dim();
        let mut triplets = Vec::with_capacity(dim);
        for idx in 0..dim {
            let v = f(&space.multi_index(idx));
            if v != C64::new(0.0, 0.0) {
                triplets.push((idx, idx, v));
            }
        }
        Self::from_triplets(space.clone(), triplets)
    }

    /// Projector onto one spin state, embedded on the full space.
    pub fn spin_projector(space: &HilbertSpace, spin: SpinState) -> Result<Self> {
        let pos = space.position(Label::Spin).ok_or(Error::MissingSpin)?;
        let stride = space.stride(pos);
        let dim = space.dim();
        let mut triplets = Vec::with_capacity(dim / 2);
        for idx in 0..dim {
            if (idx / stride) % 2 == spin.index() {
                triplets.push((idx, idx, C64::new(1.0, 0.0)));
            }
        }
        Ok(Self::from_triplets(space.clone(), triplets))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    /// max_ij |H_ij − conj(H_ji)|; zero for operators built as X + X†.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn inf_norm(&self) -> f64 {
        self.matrix.inf_norm()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.matrix.matvec(&state.amps, &mut out);
        Ok(StateVector {
            space: self.space.clone(),
            amps: out,
        })
    }
}

macro_rules! op_binop {
    ($trait:ident, $fn:ident, $impl:ident) => {
        impl std::ops::$trait for &Operator {
            type Output = Operator;
            fn $fn(self, rhs: &Operator) -> Operator {
                assert_eq!(self.space, rhs.space, "operator spaces differ");
                Operator {
                    space: self.space.clone(),
                    matrix: self.matrix.$impl(&rhs.matrix),
                }
            }
        }
    };
}

op_binop!(Add, add, add);
op_binop!(Mul, mul, matmul);

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self + &rhs.scaled(C64::new(-1.0, 0.0))
    }
}

impl std::ops::Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, s: C64) -> Operator {
        self.scaled(s)
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, s: f64) -> Operator {
        self.scaled(C64::new(s, 0.0))
    }
}

impl std::ops::Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scaled(C64::new(-1.0, 0.0))
    }
}

/// Pure state on a [`HilbertSpace`]; unit norm within 1e−12 at construction.
#[derive(Debug, Clone)]
pub struct StateVector {
    space: HilbertSpace,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wrap an amplitude vector, rejecting norms off unity by more than 1e−8.
    pub fn from_amplitudes(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        assert_eq!(space.dim(), amps.len(), "amplitude length must match space");
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NormDeviation { norm });
        }
        Ok(Self { space, amps })
    }

    /// Wrap and normalize an amplitude vector.
    pub fn from_amplitudes_normalized(space: HilbertSpace, mut amps: Vec<C64>) -> Result<Self> {
        assert_eq!(space.dim(), amps.len(), "amplitude length must match space");
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NormDeviation { norm });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { space, amps })
    }

    /// Basis state |…, n_a, n_b, n_c⟩ with the given mode occupations (modes
    /// not listed are left in vacuum) and, when the space has a spin
    /// subsystem, the given spin state.
    pub fn fock(
        space: &HilbertSpace,
        occupations: &[(Label, usize)],
        spin: Option<SpinState>,
    ) -> Result<Self> {
        let mut multi = vec![0usize; space.subsystems.len()];
        for &(label, occ) in occupations {
            if label == Label::Spin {
                return Err(Error::NotBosonic(label));
            }
            let pos = space.position(label).ok_or(Error::UnknownLabel(label))?;
            let d = space.subsystems[pos].1;
            if occ >= d {
                return Err(Error::OccupationExceedsTruncation {
                    label,
                    occ,
                    n_max: d - 1,
                });
            }
            multi[pos] = occ;
        }
        match (space.position(Label::Spin), spin) {
            (Some(pos), Some(s)) => multi[pos] = s.index(),
            (Some(_), None) => return Err(Error::MissingSpin),
            (None, Some(_)) => return Err(Error::UnknownLabel(Label::Spin)),
            (None, None) => {}
        }
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        amps[space.index_of(&multi)] = C64::new(1.0, 0.0);
        Ok(Self {
            space: space.clone(),
            amps,
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, idx: usize) -> C64 {
        self.amps[idx]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// ⟨ψ|X|ψ⟩.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        self.inner(&op.apply(self)?)
    }

    /// Reduced density matrix over the retained subsystems (canonical order
    /// preserved); the complement is traced out.
    pub fn partial_trace(&self, keep: &[Label]) -> Result<DensityMatrix> {
        let plan = TracePlan::new(&self.space, keep)?;
        let mut entries = vec![C64::new(0.0, 0.0); plan.keep_dim * plan.keep_dim];
        let mut gathered = vec![C64::new(0.0, 0.0); plan.keep_dim];
        for rest in 0..plan.rest_dim {
            for k in 0..plan.keep_dim {
                gathered[k] = self.amps[plan.full_index(k, rest)];
            }
            for (i, gi) in gathered.iter().enumerate() {
                for (j, gj) in gathered.iter().enumerate() {
                    entries[i * plan.keep_dim + j] += gi * gj.conj();
                }
            }
        }
        Ok(DensityMatrix {
            space: plan.keep_space,
            entries,
        })
    }

    /// ⟨target| Tr_rest |ψ⟩⟨ψ| |target⟩ without forming the reduced matrix;
    /// equals `self.partial_trace(...)` followed by `fidelity`.
    pub fn reduced_fidelity(&self, target: &Self) -> Result<f64> {
        let keep: Vec<Label> = target.space.subsystems.iter().map(|&(l, _)| l).collect();
        let plan = TracePlan::new(&self.space, &keep)?;
        if plan.keep_space != target.space {
            return Err(Error::SpaceMismatch);
        }
        let mut total = 0.0;
        for rest in 0..plan.rest_dim {
            let mut overlap = C64::new(0.0, 0.0);
            for k in 0..plan.keep_dim {
                overlap += target.amps[k].conj() * self.amps[plan.full_index(k, rest)];
            }
            total += overlap.norm_sqr();
        }
        Ok(total)
    }

    /// Marginal Fock distribution p_n of one mode: p_n = Σ |ψ|² over all
    /// basis states with occupation n on that mode.
    pub fn mode_distribution(&self, label: Label) -> Result<Vec<f64>> {
        if label == Label::Spin {
            return Err(Error::NotBosonic(label));
        }
        let pos = self.space.position(label).ok_or(Error::UnknownLabel(label))?;
        let (_, d) = self.space.subsystems[pos];
        let stride = self.space.stride(pos);
        let mut p = vec![0.0; d];
        for (idx, a) in self.amps.iter().enumerate() {
            p[(idx / stride) % d] += a.norm_sqr();
        }
        Ok(p)
    }

    pub fn index_of_largest(&self) -> usize {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        best
    }

    /// Rotate the global phase so the amplitude at `pivot` is real-positive.
    /// States with zero amplitude at `pivot` are returned unchanged.
    pub fn phase_aligned(&self, pivot: usize) -> Self {
        let a = self.amps[pivot];
        let m = a.norm();
        if m == 0.0 {
            return self.clone();
        }
        let rot = a.conj() / m;
        Self {
            space: self.space.clone(),
            amps: self.amps.iter().map(|x| x * rot).collect(),
        }
    }
}

/// Precomputed index split for partial traces. Each subsystem contributes a
/// digit read from either the keep index or the rest index; the full index is
/// the stride-weighted sum of those digits.
struct TracePlan {
    keep_space: HilbertSpace,
    keep_dim: usize,
    rest_dim: usize,
    /// Per subsystem: (full-space stride, dimension, own stride, kept?).
    terms: Vec<(usize, usize, usize, bool)>,
}

impl TracePlan {
    fn new(space: &HilbertSpace, keep: &[Label]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        for &l in keep {
            if !space.contains(l) {
                return Err(Error::UnknownLabel(l));
            }
        }
        let kept: Vec<(Label, usize)> = space
            .subsystems
            .iter()
            .copied()
            .filter(|&(l, _)| keep.contains(&l))
            .collect();
        let keep_space = HilbertSpace::new(&kept)?;
        let keep_dim = keep_space.dim();
        let rest_dim = space.dim() / keep_dim;
        let mut terms = Vec::with_capacity(space.subsystems.len());
        let mut keep_stride = keep_dim;
        let mut rest_stride = rest_dim;
        for (pos, &(l, d)) in space.subsystems.iter().enumerate() {
            let is_kept = keep.contains(&l);
            let own = if is_kept {
                keep_stride /= d;
                keep_stride
            } else {
                rest_stride /= d;
                rest_stride
            };
            terms.push((space.stride(pos), d, own, is_kept));
        }
        Ok(Self {
            keep_space,
            keep_dim,
            rest_dim,
            terms,
        })
    }

    #[inline]
    fn full_index(&self, keep_idx: usize, rest_idx: usize) -> usize {
        let mut full = 0;
        for &(full_stride, d, own_stride, kept) in &self.terms {
            let src = if kept { keep_idx } else { rest_idx };
            full += ((src / own_stride) % d) * full_stride;
        }
        full
    }
}

/// Dense reduced density matrix on the retained subsystems.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    entries: Vec<C64>, // row-major, dim x dim
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.space.dim();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = state.amps[i] * state.amps[j].conj();
            }
        }
        Self {
            space: state.space.clone(),
            entries,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                max = max.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        max
    }

    /// Trace out further subsystems of an already-reduced state.
    pub fn partial_trace(&self, keep: &[Label]) -> Result<DensityMatrix> {
        let plan = TracePlan::new(&self.space, keep)?;
        let dim = self.dim();
        let mut entries = vec![C64::new(0.0, 0.0); plan.keep_dim * plan.keep_dim];
        for i in 0..plan.keep_dim {
            for j in 0..plan.keep_dim {
                let mut acc = C64::new(0.0, 0.0);
                for rest in 0..plan.rest_dim {
                    acc += self.entries[plan.full_index(i, rest) * dim + plan.full_index(j, rest)];
                }
                entries[i * plan.keep_dim + j] = acc;
            }
        }
        Ok(DensityMatrix {
            space: plan.keep_space,
            entries,
        })
    }

    /// ⟨target|ρ|target⟩; real within 1e−12 for Hermitian ρ.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        if self.space != target.space {
            return Err(Error::SpaceMismatch);
        }
        let dim = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..dim {
                row += self.entries[i * dim + j] * target.amps[j];
            }
            acc += target.amps[i].conj() * row;
        }
        debug_assert!(acc.im.abs() < 1e-10, "fidelity has imaginary part {}", acc.im);
        Ok(acc.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn space_dims_and_ordering() {
        let s = HilbertSpace::three_modes(20);
        assert_eq!(s.dim(), 9261);
        let s = HilbertSpace::new(&[(Label::A, 5), (Label::Spin, 2), (Label::C, 5), (Label::B, 5)])
            .unwrap();
        assert_eq!(s.dim(), 250);
        let labels: Vec<Label> = s.subsystems().iter().map(|&(l, _)| l).collect();
        assert_eq!(labels, vec![Label::Spin, Label::A, Label::B, Label::C]);
    }

    #[test]
    fn space_rejects_bad_input() {
        assert!(matches!(
            HilbertSpace::new(&[(Label::A, 21), (Label::A, 21)]),
            Err(Error::DuplicateLabel(Label::A))
        ));
        assert!(matches!(
            HilbertSpace::new(&[(Label::B, 0)]),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            HilbertSpace::new(&[(Label::Spin, 3)]),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn index_roundtrip_is_bijective() {
        let s = HilbertSpace::new(&[(Label::Spin, 2), (Label::A, 3), (Label::C, 4)]).unwrap();
        for idx in 0..s.dim() {
            assert_eq!(s.index_of(&s.multi_index(idx)), idx);
        }
    }

    #[test]
    fn annihilation_matrix_elements() {
        let s = HilbertSpace::new(&[(Label::A, 3)]).unwrap();
        let a = Operator::annihilation(&s, Label::A).unwrap();
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert!((a.get(1, 2) - c(2.0f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(a.nnz(), 2);
        assert!(matches!(
            Operator::annihilation(&s, Label::B),
            Err(Error::UnknownLabel(Label::B))
        ));
        let sp = HilbertSpace::new(&[(Label::Spin, 2), (Label::A, 3)]).unwrap();
        assert!(matches!(
            Operator::annihilation(&sp, Label::Spin),
            Err(Error::NotBosonic(Label::Spin))
        ));
    }

    #[test]
    fn commutator_deviates_only_at_truncation_level() {
        let s = HilbertSpace::new(&[(Label::B, 21)]).unwrap();
        let a = Operator::annihilation(&s, Label::B).unwrap();
        let ad = a.adjoint();
        let comm = &(&a * &ad) - &(&ad * &a);
        for n in 0..20 {
            assert!((comm.get(n, n) - c(1.0, 0.0)).norm() < 1e-13);
        }
        // top level: a†|20⟩ = 0 under hard truncation, so [a, a†]|20⟩ = −20|20⟩
        assert!((comm.get(20, 20) - c(-20.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn number_operator_is_exact_and_matches_ladder_product() {
        let s = HilbertSpace::new(&[(Label::A, 6), (Label::B, 4)]).unwrap();
        let n_a = Operator::number(&s, Label::A).unwrap();
        for idx in 0..s.dim() {
            let occ = s.multi_index(idx)[0];
            assert_eq!(n_a.get(idx, idx), c(occ as f64, 0.0));
        }
        let a = Operator::annihilation(&s, Label::A).unwrap();
        let prod = &a.adjoint() * &a;
        for idx in 0..s.dim() {
            assert!((prod.get(idx, idx) - n_a.get(idx, idx)).norm() < 1e-12);
        }
    }

    #[test]
    fn operators_on_disjoint_subsystems_commute_exactly() {
        let s = HilbertSpace::three_modes(4);
        let a = Operator::annihilation(&s, Label::A).unwrap();
        let b_dag = Operator::creation(&s, Label::B).unwrap();
        let ab = &a * &b_dag;
        let ba = &b_dag * &a;
        assert_eq!(ab.matrix().max_abs_diff(ba.matrix()), 0.0);
    }

    #[test]
    fn adjoint_involution_exact() {
        let s = HilbertSpace::three_modes(3);
        let a = Operator::annihilation(&s, Label::C).unwrap();
        let x = &a.scaled(c(0.3, -0.7)) + &Operator::number(&s, Label::A).unwrap();
        assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn fock_state_placement() {
        let s = HilbertSpace::three_modes(4);
        let psi = StateVector::fock(&s, &[(Label::A, 2), (Label::C, 2)], None).unwrap();
        let idx = s.index_of(&[2, 0, 2]);
        assert_eq!(psi.amp(idx), c(1.0, 0.0));
        assert!((psi.norm() - 1.0).abs() < 1e-15);

        let sp = HilbertSpace::new(&[(Label::Spin, 2), (Label::A, 3), (Label::C, 3)]).unwrap();
        let up10 = StateVector::fock(&sp, &[(Label::A, 1)], Some(SpinState::Up)).unwrap();
        assert_eq!(up10.amp(sp.index_of(&[1, 1, 0])), c(1.0, 0.0));

        assert!(matches!(
            StateVector::fock(&s, &[(Label::A, 25)], None),
            Err(Error::OccupationExceedsTruncation { occ: 25, n_max: 4, .. })
        ));
        assert!(matches!(
            StateVector::fock(&sp, &[(Label::A, 1)], None),
            Err(Error::MissingSpin)
        ));
    }

    #[test]
    fn partial_trace_of_product_state_is_pure() {
        let s = HilbertSpace::two_modes(Label::A, Label::B, 3).unwrap();
        let psi = StateVector::fock(&s, &[(Label::A, 1)], None).unwrap();
        let rho = psi.partial_trace(&[Label::A]).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!((rho.get(1, 1) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_keep_all_is_projector() {
        let s = HilbertSpace::two_modes(Label::B, Label::C, 2).unwrap();
        let psi = StateVector::from_amplitudes_normalized(
            s.clone(),
            (0..s.dim()).map(|k| c(1.0 + k as f64, 0.5)).collect(),
        )
        .unwrap();
        let rho = psi.partial_trace(&[Label::B, Label::C]).unwrap();
        let proj = DensityMatrix::from_pure(&psi);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert!((rho.get(i, j) - proj.get(i, j)).norm() < 1e-14);
            }
        }
    }

    /// Two-mode squeezed amplitudes traced over one mode give the geometric
    /// (thermal-like) distribution p_n = tanh²ⁿ(r)/cosh²(r).
    #[test]
    fn tmss_partial_trace_matches_geometric_populations() {
        let r: f64 = 0.5;
        let n_max = 20;
        let s = HilbertSpace::two_modes(Label::B, Label::C, n_max).unwrap();
        let mut amps = vec![c(0.0, 0.0); s.dim()];
        for n in 0..=n_max {
            amps[s.index_of(&[n, n])] = c(r.tanh().powi(n as i32) / r.cosh(), 0.0);
        }
        let psi = StateVector::from_amplitudes_normalized(s, amps).unwrap();
        let rho = psi.partial_trace(&[Label::B]).unwrap();
        for n in 0..=n_max {
            let expect = r.tanh().powi(2 * n as i32) / r.cosh().powi(2);
            assert!((rho.get(n, n).re - expect).abs() < 1e-12);
            assert!(rho.get(n, n).im.abs() < 1e-15);
        }
        // off-diagonals vanish after tracing the partner mode
        assert!((rho.get(0, 1)).norm() < 1e-15);
    }

    #[test]
    fn fidelity_basic_cases() {
        let s = HilbertSpace::new(&[(Label::A, 2)]).unwrap();
        let zero = StateVector::fock(&s, &[], None).unwrap();
        let one = StateVector::fock(&s, &[(Label::A, 1)], None).unwrap();
        let rho0 = DensityMatrix::from_pure(&zero);
        assert!((rho0.fidelity(&zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(rho0.fidelity(&one).unwrap().abs() < 1e-15);

        // maximally mixed qubit
        let mixed = DensityMatrix {
            space: s.clone(),
            entries: vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        };
        let plus =
            StateVector::from_amplitudes_normalized(s, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((mixed.fidelity(&plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expectation_of_number_operator() {
        let s = HilbertSpace::new(&[(Label::B, 6)]).unwrap();
        let n_op = Operator::number(&s, Label::B).unwrap();
        let vac = StateVector::fock(&s, &[], None).unwrap();
        assert!(vac.expectation(&n_op).unwrap().norm() < 1e-15);
        for n in 1..=5 {
            let psi = StateVector::fock(&s, &[(Label::B, n)], None).unwrap();
            let e = psi.expectation(&n_op).unwrap();
            assert!((e - c(n as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn tmss_mean_phonon_number_is_sinh_squared() {
        let r: f64 = 0.5;
        let n_max = 25;
        let s = HilbertSpace::two_modes(Label::B, Label::C, n_max).unwrap();
        let mut amps = vec![c(0.0, 0.0); s.dim()];
        for n in 0..=n_max {
            amps[s.index_of(&[n, n])] = c(r.tanh().powi(n as i32) / r.cosh(), 0.0);
        }
        let psi = StateVector::from_amplitudes_normalized(s.clone(), amps).unwrap();
        let n_b = Operator::number(&s, Label::B).unwrap();
        let got = psi.expectation(&n_b).unwrap().re;
        assert!((got - r.sinh().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_errors() {
        let s = HilbertSpace::two_modes(Label::A, Label::C, 2).unwrap();
        let psi = StateVector::fock(&s, &[], None).unwrap();
        assert!(matches!(psi.partial_trace(&[]), Err(Error::EmptyKeep)));
        assert!(matches!(
            psi.partial_trace(&[Label::B]),
            Err(Error::UnknownLabel(Label::B))
        ));
    }

    /// Random-state properties: unit trace, Hermitian, positive semidefinite
    /// reduced matrices, fidelity within [0, 1].
    #[test]
    fn random_state_partial_trace_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = HilbertSpace::new(&[(Label::Spin, 2), (Label::A, 4), (Label::B, 3)]).unwrap();
        for _ in 0..25 {
            let amps: Vec<C64> = (0..s.dim())
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let psi = StateVector::from_amplitudes_normalized(s.clone(), amps).unwrap();
            for keep in [&[Label::A][..], &[Label::Spin, Label::B][..]] {
                let rho = psi.partial_trace(keep).unwrap();
                assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
                assert!(rho.hermiticity_defect() < 1e-12);

                let dim = rho.dim();
                let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| rho.get(i, j));
                let eig = m.symmetric_eigenvalues();
                assert!(eig.iter().all(|&e| e > -1e-10));

                let target = StateVector::fock(
                    rho.space(),
                    &[],
                    if rho.space().has_spin() {
                        Some(SpinState::Down)
                    } else {
                        None
                    },
                )
                .unwrap();
                let f = rho.fidelity(&target).unwrap();
                assert!((-1e-10..=1.0 + 1e-10).contains(&f));
                let fast = psi.reduced_fidelity(&target).unwrap();
                assert!((f - fast).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mode_distribution_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = HilbertSpace::three_modes(3);
        let amps: Vec<C64> = (0..s.dim())
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let psi = StateVector::from_amplitudes_normalized(s, amps).unwrap();
        let p = psi.mode_distribution(Label::B).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
