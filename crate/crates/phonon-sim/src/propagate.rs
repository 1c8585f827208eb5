//! Time evolution |ψ(t)⟩ = e^{−iHt}|ψ(0)⟩ for time-independent sparse
//! Hamiltonians.
//!
//! The workhorse is a short-iterate Lanczos (Krylov) approximation of the
//! matrix exponential acting on a vector, with full reorthogonalization and
//! adaptive substeps driven by an a-posteriori error estimate. Because the
//! Krylov basis is kept orthonormal and the projected propagator is exactly
//! unitary, norm is conserved to machine precision regardless of the step
//! size; the tolerance budget controls distance to the exact state.
//!
//! A dense eigendecomposition path ([`propagator_dense`]) serves as an oracle
//! for small dimensions.

use indexmap::IndexMap;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{Label, Operator, StateVector};
use crate::sparse::CsrMatrix;
use crate::C64;

/// Krylov subspace dimension used by [`evolve`].
pub const KRYLOV_DIM: usize = 30;

/// Default per-time-point propagation tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest dimension accepted by [`propagator_dense`].
pub const DENSE_DIM_MAX: usize = 200;

/// Evenly spaced time grid from `start` to `stop` inclusive.
pub fn time_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(stop > start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::BadTimeGrid);
    }
    let span = stop - start;
    Ok((0..count)
        .map(|k| start + span * k as f64 / (count - 1) as f64)
        .collect())
}

/// States at the requested output times plus named real-valued records
/// (probabilities, mean occupations, fidelities) keyed by column name.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    records: IndexMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &StateVector {
        &self.states[k]
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least one time")
    }

    pub fn records(&self) -> &IndexMap<String, Vec<f64>> {
        &self.records
    }

    pub fn record(&self, name: &str) -> Option<&[f64]> {
        self.records.get(name).map(|v| v.as_slice())
    }

    /// Attach a precomputed column; its length must match the time grid.
    pub fn push_record(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::Config(format!(
                "record '{name}' has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        self.records.insert(name.to_string(), values);
        Ok(())
    }

    /// Record p(t) = |⟨target|ψ(t)⟩|² when `target` lives on the full space,
    /// or the reduced-state probability ⟨target|Tr_rest ρ(t)|target⟩ when it
    /// lives on a subsystem.
    pub fn record_probability(&mut self, name: &str, target: &StateVector) -> Result<()> {
        let same_space = self
            .states
            .first()
            .map(|s| s.space() == target.space())
            .unwrap_or(true);
        let values: Result<Vec<f64>> = self
            .states
            .iter()
            .map(|psi| {
                if same_space {
                    Ok(psi.inner(target)?.norm_sqr())
                } else {
                    psi.reduced_fidelity(target)
                }
            })
            .collect();
        self.push_record(name, values?)
    }

    /// Record ⟨n̂⟩(t) of one bosonic mode.
    pub fn record_nbar(&mut self, name: &str, label: Label) -> Result<()> {
        let values: Result<Vec<f64>> = self
            .states
            .iter()
            .map(|psi| {
                let p = psi.mode_distribution(label)?;
                Ok(p.iter().enumerate().map(|(n, &pn)| n as f64 * pn).sum())
            })
            .collect();
        self.push_record(name, values?)
    }

    /// Record Re⟨ψ(t)|X|ψ(t)⟩.
    pub fn record_expectation(&mut self, name: &str, op: &Operator) -> Result<()> {
        let values: Result<Vec<f64>> = self
            .states
            .iter()
            .map(|psi| Ok(psi.expectation(op)?.re))
            .collect();
        self.push_record(name, values?)
    }
}

/// Evolve `psi0` under the time-independent Hermitian `h` from t = 0,
/// reporting the state at each entry of `times` (strictly increasing, first
/// entry ≥ 0). The error budget is `tol` per reported time point.
pub fn evolve(h: &Operator, psi0: &StateVector, times: &[f64], tol: f64) -> Result<Trajectory> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidTolerance(tol));
    }
    if psi0.space() != h.space() {
        return Err(Error::SpaceMismatch);
    }
    if times.is_empty()
        || times[0] < 0.0
        || times.windows(2).any(|w| !(w[1] > w[0]))
        || times.iter().any(|t| !t.is_finite())
    {
        return Err(Error::BadTimeGrid);
    }
    let scale = h.inf_norm();
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale.max(1.0) {
        return Err(Error::NotHermitian { defect });
    }

    let mut states = Vec::with_capacity(times.len());
    if scale == 0.0 {
        // H = 0: exact identity evolution, no iteration.
        for _ in times {
            states.push(psi0.clone());
        }
        return Ok(Trajectory {
            times: times.to_vec(),
            states,
            records: IndexMap::new(),
        });
    }

    let mut psi: Vec<C64> = psi0.amps().to_vec();
    let mut prev_t = 0.0;
    let mut tau_hint = f64::INFINITY;
    for &t in times {
        let dt = t - prev_t;
        if dt > 0.0 {
            propagate_interval(h.matrix(), &mut psi, dt, tol, scale, &mut tau_hint)
                .map_err(|e| match e {
                    Error::StepUnderflow { dt: sub, .. } => Error::StepUnderflow { t, dt: sub },
                    other => other,
                })?;
        }
        states.push(StateVector::from_amplitudes(
            h.space().clone(),
            psi.clone(),
        )?);
        prev_t = t;
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        records: IndexMap::new(),
    })
}

/// Advance `psi` by `dt` with total error budget `tol`, splitting into
/// adaptive Krylov substeps. `tau_hint` carries the last accepted substep
/// across intervals to avoid rediscovering the step size.
fn propagate_interval(
    h: &CsrMatrix,
    psi: &mut Vec<C64>,
    dt: f64,
    tol: f64,
    scale: f64,
    tau_hint: &mut f64,
) -> Result<()> {
    let mut remaining = dt;
    while remaining > 0.0 {
        let krylov = lanczos(h, psi, KRYLOV_DIM, scale);
        let eig = SymmetricEigen::new(krylov.tridiagonal());
        let mut tau = remaining.min(*tau_hint);
        loop {
            let x = propagated_coeffs(&eig, tau);
            let err = krylov.beta0 * krylov.beta_res * x[x.len() - 1].norm();
            if err <= tol * tau / dt || krylov.beta_res == 0.0 {
                krylov.assemble(&x, psi);
                remaining -= tau;
                if remaining > 0.0 && remaining < 1e-12 * dt {
                    remaining = 0.0; // absorb roundoff residue of the split
                }
                *tau_hint = 2.0 * tau;
                break;
            }
            tau *= 0.5;
            if tau < 1e-12 * dt {
                return Err(Error::StepUnderflow { t: 0.0, dt: tau });
            }
        }
    }
    Ok(())
}

/// Lanczos factorization H V ≈ V T + β_res v_next e_kᵀ with full
/// reorthogonalization; T is real symmetric tridiagonal because H is
/// Hermitian.
struct Lanczos {
    vectors: Vec<Vec<C64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    beta0: f64,
    beta_res: f64,
}

fn lanczos(h: &CsrMatrix, psi: &[C64], m: usize, scale: f64) -> Lanczos {
    let dim = psi.len();
    let m = m.min(dim);
    let beta0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut vectors = vec![psi.iter().map(|a| a / beta0).collect::<Vec<C64>>()];
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut beta_res = 0.0;
    let mut w = vec![C64::new(0.0, 0.0); dim];
    for j in 0..m {
        h.matvec(&vectors[j], &mut w);
        let alpha = dot(&vectors[j], &w).re;
        axpy(&mut w, C64::new(-alpha, 0.0), &vectors[j]);
        if j > 0 {
            axpy(&mut w, C64::new(-betas[j - 1], 0.0), &vectors[j - 1]);
        }
        // full reorthogonalization against the whole basis
        for v in &vectors {
            let c = dot(v, &w);
            axpy(&mut w, -c, v);
        }
        let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        alphas.push(alpha);
        if beta <= 1e-13 * scale {
            break; // happy breakdown: Krylov space is invariant, beta_res = 0
        }
        if j + 1 == m {
            beta_res = beta;
            break;
        }
        betas.push(beta);
        vectors.push(w.iter().map(|a| a / beta).collect());
    }
    Lanczos {
        vectors,
        alphas,
        betas,
        beta0,
        beta_res,
    }
}

impl Lanczos {
    fn tridiagonal(&self) -> DMatrix<f64> {
        let k = self.alphas.len();
        DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                self.alphas[i]
            } else if i + 1 == j || j + 1 == i {
                self.betas[i.min(j)]
            } else {
                0.0
            }
        })
    }

    /// psi ← β₀ · V x.
    fn assemble(&self, x: &[C64], psi: &mut [C64]) {
        for a in psi.iter_mut() {
            *a = C64::new(0.0, 0.0);
        }
        for (j, v) in self.vectors.iter().enumerate() {
            let coeff = self.beta0 * x[j];
            axpy(psi, coeff, v);
        }
    }
}

/// x(τ) = exp(−iτT) e₁ from the eigendecomposition T = Q Λ Qᵀ.
fn propagated_coeffs(eig: &SymmetricEigen<f64, nalgebra::Dyn>, tau: f64) -> Vec<C64> {
    let k = eig.eigenvalues.len();
    let q = &eig.eigenvectors;
    (0..k)
        .map(|j| {
            (0..k)
                .map(|l| {
                    let phase = C64::from_polar(1.0, -tau * eig.eigenvalues[l]);
                    q[(j, l)] * phase * q[(0, l)]
                })
                .sum()
        })
        .collect()
}

#[inline]
fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

#[inline]
fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Dense propagator U = e^{−iHt} via Hermitian eigendecomposition; the
/// oracle path for [`evolve`]. Restricted to dim ≤ [`DENSE_DIM_MAX`].
pub fn propagator_dense(h: &Operator, t: f64) -> Result<Operator> {
    let dim = h.dim();
    if dim > DENSE_DIM_MAX {
        return Err(Error::DimensionTooLarge {
            dim,
            max: DENSE_DIM_MAX,
        });
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * h.inf_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let dense = DMatrix::from_fn(dim, dim, |i, j| h.get(i, j));
    let eig = SymmetricEigen::new(dense);
    let mut scaled = eig.eigenvectors.clone();
    for (l, mut col) in scaled.column_iter_mut().enumerate() {
        let phase = C64::from_polar(1.0, -t * eig.eigenvalues[l]);
        for v in col.iter_mut() {
            *v *= phase;
        }
    }
    let u = &scaled * eig.eigenvectors.adjoint();
    let mut triplets = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = u[(i, j)];
            if v != C64::new(0.0, 0.0) {
                triplets.push((i, j, v));
            }
        }
    }
    Ok(Operator::from_triplets(h.space().clone(), triplets))
}
