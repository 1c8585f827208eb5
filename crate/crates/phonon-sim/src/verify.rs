//! Built-in verification suite: nine numbered criteria covering the
//! squeezer and beam-splitter dynamics (A1–A4), the spin-conditional gate
//! (A5–A6), oracle equivalences (A7), metrology closed forms (A8) and Fock
//! truncation convergence (A9). Each criterion reports named checks with
//! pinned tolerances; the CLI `verify` subcommand prints one line per
//! criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    bs_coefficient, gate_time, tmss_prob, tmss_state, tmss_state_with_tail, SqueezeParams,
};
use crate::error::Result;
use crate::fock::{HilbertSpace, Label, Operator, SpinState, StateVector};
use crate::hamiltonians::{khz_to_rad_per_ms, HamiltonianKind, HamiltonianSpec};
use crate::metrology::{cfi, closed_form_qfi, qfi_generator, qfi_pure_numeric, ClosedFormQfi};
use crate::propagate::{evolve, propagator_dense, time_grid, DEFAULT_TOL};
use crate::C64;

/// Default Fock truncations per criterion; A1/A2 use the figure value, the
/// rest are sized so the top level stays empty to well below the stated
/// tolerances (A9 certifies this by re-running at `n_max + 3`).
pub const A1_N_MAX: usize = 20;
pub const A3_N_MAX: usize = 12;
pub const A4_N_MAX: usize = 12;
pub const A5_N_MAX: usize = 6;
pub const A6_N_MAX: usize = 8;
const BUMP: usize = 3;

/// Direction of a check's comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    AtMost,
    AtLeast,
}

/// One observed value compared against a pinned bound.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub kind: CheckKind,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.kind {
            CheckKind::AtMost => self.observed <= self.bound,
            CheckKind::AtLeast => self.observed >= self.bound,
        }
    }
}

/// One scalar outcome of a criterion run together with its tolerance and
/// the drift allowed when the truncation is raised (half the tolerance).
#[derive(Debug, Clone)]
struct Metric {
    name: String,
    value: f64,
    bound: f64,
    kind: CheckKind,
    drift_budget: f64,
}

impl Metric {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            kind: CheckKind::AtMost,
            drift_budget: bound / 2.0,
        }
    }

    /// Lower bound on a probability-like quantity; the implied tolerance is
    /// the gap to 1, so the drift budget defaults to half that gap.
    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            kind: CheckKind::AtLeast,
            drift_budget: (1.0 - bound) / 2.0,
        }
    }

    fn with_drift(mut self, budget: f64) -> Self {
        self.drift_budget = budget;
        self
    }

    fn check(&self) -> Check {
        Check {
            name: self.name.clone(),
            observed: self.value,
            bound: self.bound,
            kind: self.kind,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    fn from_metrics(id: &str, title: &str, metrics: &[Metric]) -> Self {
        Self {
            id: id.to_string(),
            title: title.to_string(),
            checks: metrics.iter().map(Metric::check).collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// One-line pass/fail summary, e.g. `A1 PASS — …`.
    pub fn status_line(&self) -> String {
        if self.passed() {
            format!("{} PASS — {}", self.id, self.title)
        } else {
            let failing: Vec<&Check> = self.checks.iter().filter(|c| !c.passed()).collect();
            let worst = failing[0];
            let rel = match worst.kind {
                CheckKind::AtMost => format!("{:.3e} > {:.3e}", worst.observed, worst.bound),
                CheckKind::AtLeast => format!("{:.3e} < {:.3e}", worst.observed, worst.bound),
            };
            format!(
                "{} FAIL — {} [{}/{} checks failed; first: {} ({})]",
                self.id,
                self.title,
                failing.len(),
                self.checks.len(),
                worst.name,
                rel
            )
        }
    }
}

/// Suite-wide knobs: an optional truncation override for A1–A6/A9 and the
/// propagation error budget per reported time.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub n_max_override: Option<usize>,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_max_override: None,
            tol: DEFAULT_TOL,
        }
    }
}

impl VerifyOptions {
    fn n_max(&self, default: usize) -> usize {
        self.n_max_override.unwrap_or(default)
    }
}

fn khz(v: f64) -> Result<f64> {
    khz_to_rad_per_ms(v)
}

// ---------------------------------------------------------------------------
// A1/A2: driven-a squeezer dynamics against the analytic squeezing law.

fn driven_a_spec(n_max: usize, omega_khz: f64) -> Result<HamiltonianSpec> {
    Ok(HamiltonianSpec::new(HamiltonianKind::DrivenA, n_max)
        .with_drive(khz(3.5)?)
        .with_xi(khz(0.2)?)
        .with_omega(khz(omega_khz)?))
}

fn a1_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let spec = driven_a_spec(n_max, 20.0)?;
    let h = spec.build()?;
    let psi0 = StateVector::fock(h.space(), &[], None)?;
    let times = time_grid(0.0, 4.0, 81)?;
    let traj = evolve(&h, &psi0, &times, tol)?;
    let rate = spec.drive_amp * spec.xi / spec.omega; // r(t) = rate·t
    let bc = HilbertSpace::two_modes(Label::B, Label::C, n_max)?;

    let mut metrics = Vec::new();
    for n in 0..3 {
        let target = StateVector::fock(&bc, &[(Label::B, n), (Label::C, n)], None)?;
        let mut dev: f64 = 0.0;
        for (k, psi) in traj.states().iter().enumerate() {
            let p = psi.reduced_fidelity(&target)?;
            dev = dev.max((p - tmss_prob(n, rate * times[k])).abs());
        }
        metrics.push(Metric::at_most(
            format!("max_t |p_{n} − tanh^{}r/cosh²r|", 2 * n),
            dev,
            0.02,
        ));
    }

    let mut nbar_dev: f64 = 0.0;
    for (k, psi) in traj.states().iter().enumerate() {
        let dist = psi.mode_distribution(Label::B)?;
        let nbar: f64 = dist.iter().enumerate().map(|(m, &p)| m as f64 * p).sum();
        let sinh2 = (rate * times[k]).sinh().powi(2);
        nbar_dev = nbar_dev.max((nbar - sinh2).abs() / (1.0 + sinh2));
    }
    metrics.push(Metric::at_most(
        "max_t |⟨n̂_b⟩ − sinh²r| / (1 + sinh²r)",
        nbar_dev,
        0.05,
    ));
    Ok(metrics)
}

/// Truncation-tail budget for the squeezed-state targets: at ω/2π = 14 kHz
/// and t = 4 ms the target's tail mass is ≈ 1e−3, absorbed here and in the
/// fidelity tolerance.
const A2_TAIL_BUDGET: f64 = 5e-3;

fn a2_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let t_max = 4.0;
    let mut fidelity = Vec::new();
    let mut fidelity_ref = Vec::new();
    for omega_khz in [14.0, 17.0, 20.0] {
        let spec = driven_a_spec(n_max, omega_khz)?;
        let h = spec.build()?;
        let psi0 = StateVector::fock(h.space(), &[], None)?;
        let traj = evolve(&h, &psi0, &[t_max], tol)?;
        let params =
            SqueezeParams::from_drive(spec.drive_amp, spec.xi, spec.omega, spec.phi, t_max)?;
        let target = tmss_state_with_tail(&params, n_max, A2_TAIL_BUDGET)?;
        let rho_bc = traj.final_state().partial_trace(&[Label::B, Label::C])?;
        fidelity.push(rho_bc.fidelity(&target.state)?);
        // Same comparison with the squeezing phase referenced to the
        // second-order frame.  The residual −(ξ²/ω)n̂_bn̂_c advances the
        // phase of |n,n⟩ by (ξ²/ω)t·n² ≈ (ξ²/ω)t·n on the populated ladder,
        // i.e. a deterministic drift θ → θ + (ξ²/ω)t (verified numerically:
        // the drift scales as ξ²t/ω and the residual infidelity as its
        // square when ξ is halved at fixed r).
        let drift = spec.xi * spec.xi / spec.omega * t_max;
        let params_ref = SqueezeParams::new(params.r, params.theta + drift)?;
        let target_ref = tmss_state_with_tail(&params_ref, n_max, A2_TAIL_BUDGET)?;
        fidelity_ref.push(rho_bc.fidelity(&target_ref.state)?);
    }
    // The leading-order check fails by construction: the exact value at
    // these drive parameters is 8.3e−3 (and the effective model with its
    // residual term gives 8.7e−3), dominated by the (ξ²/ω)t phase drift.
    // The bound is kept as stated rather than widened; the phase-referenced
    // metric below documents that the squeezing itself meets the budget.
    Ok(vec![
        Metric::at_most(
            "1 − F(4 ms) at ω/2π = 20 kHz",
            1.0 - fidelity[2],
            5e-3,
        ),
        Metric::at_most(
            "1 − F(4 ms), phase-referenced target, ω/2π = 20 kHz",
            1.0 - fidelity_ref[2],
            5e-3,
        ),
        Metric::at_least(
            "F(4 ms) gap, ω/2π 17 vs 14 kHz",
            fidelity[1] - fidelity[0],
            0.0,
        )
        .with_drift(2.5e-3),
        Metric::at_least(
            "F(4 ms) gap, ω/2π 20 vs 17 kHz",
            fidelity[2] - fidelity[1],
            0.0,
        )
        .with_drift(2.5e-3),
    ])
}

// ---------------------------------------------------------------------------
// A3: driven-b beam splitter against the closed-form coefficients.

fn a3_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let spec = HamiltonianSpec::new(HamiltonianKind::DrivenB, n_max)
        .with_drive(khz(6.5)?)
        .with_xi(khz(0.2)?)
        .with_omega(khz(17.0)?);
    let h = spec.build()?;
    let psi0 = StateVector::fock(h.space(), &[(Label::A, 2), (Label::C, 2)], None)?;
    let times = time_grid(0.0, 6.5, 131)?;
    let traj = evolve(&h, &psi0, &times, tol)?;
    let eps = spec.drive_amp * spec.xi / spec.omega;
    let ac = HilbertSpace::two_modes(Label::A, Label::C, n_max)?;

    let outcomes = [(2usize, 2usize), (3, 1), (1, 3), (4, 0), (0, 4)];
    let mut probs = vec![Vec::with_capacity(times.len()); outcomes.len()];
    for psi in traj.states() {
        for (slot, &(n1, n2)) in outcomes.iter().enumerate() {
            let target = StateVector::fock(&ac, &[(Label::A, n1), (Label::C, n2)], None)?;
            probs[slot].push(psi.reduced_fidelity(&target)?);
        }
    }

    let mut metrics = Vec::new();
    for (slot, &(n1, n2)) in outcomes.iter().enumerate() {
        let dev = probs[slot]
            .iter()
            .zip(&times)
            .map(|(&p, &t)| (p - bs_coefficient(2, 2, n1, n2, eps * t).powi(2)).abs())
            .fold(0.0f64, f64::max);
        metrics.push(Metric::at_most(
            format!("max_t |p_{n1},{n2} − |C²,²_{n1},{n2}|²|"),
            dev,
            0.03,
        ));
    }
    // the four-phonon bunching peaks of the two outcomes must coincide; the
    // pointwise curves differ by up to ≈ 5e−3 from the third-order a↔c
    // asymmetry of the trilinear term, so the symmetry statement is about
    // the feature heights
    let peak40 = probs[3].iter().copied().fold(0.0f64, f64::max);
    let peak04 = probs[4].iter().copied().fold(0.0f64, f64::max);
    metrics.push(Metric::at_most(
        "|peak p_4,0 − peak p_0,4|",
        (peak40 - peak04).abs(),
        2e-3,
    ));
    Ok(metrics)
}

// ---------------------------------------------------------------------------
// A4: Fock-measurement CFI of the beam splitter at the Heisenberg form.

fn a4_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let spec = HamiltonianSpec::new(HamiltonianKind::DrivenB, n_max)
        .with_drive(khz(4.5)?)
        .with_xi(khz(0.2)?)
        .with_omega(khz(20.0)?);
    let t_f = 1.0;

    let mut metrics = Vec::new();
    for n in 0..=5usize {
        let psi0 = StateVector::fock(&spec.space(), &[(Label::A, n), (Label::C, n)], None)?;
        // λ = εt_f is varied through the drive amplitude (ε = Ω_bξ/ω) at
        // fixed interrogation time, as in the estimation protocol; varying
        // the time instead would differentiate the detuning-scale
        // oscillations on top of the beam-splitter rotation
        let model = |lambda: f64| -> Result<Vec<f64>> {
            let drive = (lambda / t_f) * spec.omega / spec.xi;
            let h = spec.clone().with_drive(drive).build()?;
            let traj = evolve(&h, &psi0, &[t_f], tol)?;
            traj.final_state().mode_distribution(Label::C)
        };
        let eps = spec.drive_amp * spec.xi / spec.omega;
        let est = cfi(&model, eps * t_f, crate::metrology::DEFAULT_FD_STEP)?;
        let target = closed_form_qfi(ClosedFormQfi::BsPhase { n });
        metrics.push(Metric::at_most(
            format!("|CFI − 8n(n+1)| for n = {n}"),
            (est.value - target).abs(),
            0.1 * target + 0.5,
        ));
    }
    Ok(metrics)
}

// ---------------------------------------------------------------------------
// A5/A6: spin-conditional gate at the gate time.

fn spin_conditional_spec(
    n_max: usize,
    g_b_khz: f64,
    omega_khz: f64,
    xi_khz: f64,
    eta_b: f64,
) -> Result<HamiltonianSpec> {
    Ok(HamiltonianSpec::new(HamiltonianKind::SpinConditional, n_max)
        .with_g_b(khz(g_b_khz)?)
        .with_omega(khz(omega_khz)?)
        .with_xi(khz(xi_khz)?)
        .with_eta_b(eta_b))
}

fn a5_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let spec = spin_conditional_spec(n_max, 5.5, 18.0, 0.2, 0.06)?;
    let h = spec.build()?;
    let t_g = gate_time(spec.g_b * spec.xi / spec.omega)?;
    let sac = HilbertSpace::new(&[
        (Label::Spin, 2),
        (Label::A, n_max + 1),
        (Label::C, n_max + 1),
    ])?;

    let prob_at_gate = |initial: &StateVector, occ_a: usize, occ_c: usize, spin: SpinState| {
        let traj = evolve(&h, initial, &[t_g], tol)?;
        let target =
            StateVector::fock(&sac, &[(Label::A, occ_a), (Label::C, occ_c)], Some(spin))?;
        traj.final_state().reduced_fidelity(&target)
    };

    let up10 = StateVector::fock(h.space(), &[(Label::A, 1)], Some(SpinState::Up))?;
    let dn10 = StateVector::fock(h.space(), &[(Label::A, 1)], Some(SpinState::Down))?;
    let up11 = StateVector::fock(
        h.space(),
        &[(Label::A, 1), (Label::C, 1)],
        Some(SpinState::Up),
    )?;
    Ok(vec![
        Metric::at_least(
            "p_{↑,0,1}(t_g) from |↑,1,0⟩",
            prob_at_gate(&up10, 0, 1, SpinState::Up)?,
            0.97,
        ),
        Metric::at_least(
            "p_{↓,1,0}(t_g) from |↓,1,0⟩",
            prob_at_gate(&dn10, 1, 0, SpinState::Down)?,
            0.99,
        ),
        Metric::at_least(
            "p_{↑,1,1}(t_g) from |↑,1,1⟩",
            prob_at_gate(&up11, 1, 1, SpinState::Up)?,
            0.95,
        ),
    ])
}

fn a6_metrics(n_max: usize, tol: f64) -> Result<Vec<Metric>> {
    let spec = spin_conditional_spec(n_max, 6.3, 15.8, 0.3, 0.05)?.with_ac_stark(true);
    let h = spec.build()?;
    let t_g = gate_time(spec.g_b * spec.xi / spec.omega)?;

    let space = h.space();
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    amps[space.index_of(&[SpinState::Down.index(), 2, 0, 0])] = w;
    amps[space.index_of(&[SpinState::Up.index(), 2, 0, 0])] = w;
    let psi0 = StateVector::from_amplitudes(space.clone(), amps)?;

    let traj = evolve(&h, &psi0, &[t_g], tol)?;
    let target = crate::analytic::noon_state(2, n_max)?;
    let rho = traj
        .final_state()
        .partial_trace(&[Label::Spin, Label::A, Label::C])?;
    let f_g = rho.fidelity(&target)?;
    Ok(vec![Metric::at_most("1 − F_G(t_g)", 1.0 - f_g, 2e-2)])
}

// ---------------------------------------------------------------------------
// A7: analytic forms and the Krylov propagator against dense oracles.

/// Amplitudes ⟨n,n|e^{ζb̂†ĉ†−ζ*b̂ĉ}|0,0⟩ from a dense eigendecomposition of
/// the squeeze generator restricted to the twin-Fock ladder, where it acts
/// as the tridiagonal map e_n ↦ iζ(n+1)e_{n+1} − iζ*n e_{n−1}.
fn twin_ladder_oracle(r: f64, theta: f64, levels: usize) -> Result<Vec<C64>> {
    let space = HilbertSpace::new(&[(Label::B, levels)])?;
    let zeta = C64::from_polar(r, theta);
    let i = C64::new(0.0, 1.0);
    let mut triplets = Vec::new();
    for n in 0..levels - 1 {
        let lower = i * zeta * (n as f64 + 1.0);
        triplets.push((n + 1, n, lower));
        triplets.push((n, n + 1, lower.conj()));
    }
    let h = Operator::from_triplets(space.clone(), triplets);
    let u = propagator_dense(&h, 1.0)?;
    let e0 = StateVector::fock(&space, &[(Label::B, 0)], None)?;
    Ok(u.apply(&e0)?.amps().to_vec())
}

fn a7_metrics(tol: f64) -> Result<Vec<Metric>> {
    // beam-splitter coefficients vs the dense exponential of â†ĉ + âĉ†:
    // ⟨N1,N2|e^{−iθ(â†ĉ+âĉ†)}|n1,n2⟩ = i^{n1−N1} C^{n1,n2}_{N1,N2}(θ)
    let n_max = 6;
    let space = HilbertSpace::two_modes(Label::A, Label::C, n_max)?;
    let x = &Operator::creation(&space, Label::A)? * &Operator::annihilation(&space, Label::C)?;
    let g = &x + &x.adjoint();
    let mut bs_dev: f64 = 0.0;
    for j in 0..16 {
        let angle = j as f64 * std::f64::consts::PI / 15.0;
        let u = propagator_dense(&g, angle)?;
        for n1 in 0..=n_max {
            for n2 in 0..=(n_max - n1) {
                let col = space.index_of(&[n1, n2]);
                for big_n1 in 0..=(n1 + n2) {
                    let big_n2 = n1 + n2 - big_n1;
                    let row = space.index_of(&[big_n1, big_n2]);
                    let phase = C64::from_polar(
                        1.0,
                        std::f64::consts::FRAC_PI_2 * (n1 as f64 - big_n1 as f64),
                    );
                    let analytic = phase * bs_coefficient(n1, n2, big_n1, big_n2, angle);
                    bs_dev = bs_dev.max((u.get(row, col) - analytic).norm());
                }
            }
        }
    }

    // squeezed-state amplitudes vs the dense ladder exponential; 100 ladder
    // levels keep the generator-truncation error below tanh(1)^100 ≈ 1e−12
    let tmss_n_max = 45;
    let bc = HilbertSpace::two_modes(Label::B, Label::C, tmss_n_max)?;
    let mut tmss_dev: f64 = 0.0;
    for k in 1..=10 {
        let r = k as f64 / 10.0;
        for theta in [0.0, 0.7] {
            let ladder = twin_ladder_oracle(r, theta, 100)?;
            let params = SqueezeParams::new(r, theta)?;
            let analytic = tmss_state(&params, tmss_n_max)?;
            for n in 0..=tmss_n_max {
                let idx = bc.index_of(&[n, n]);
                tmss_dev = tmss_dev.max((analytic.state.amp(idx) - ladder[n]).norm());
            }
        }
    }

    // Krylov propagation vs dense eigendecomposition on random Hermitian
    // instances (fixed seed; tol below the 1e−9 agreement bound)
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
    let mut krylov_dev: f64 = 0.0;
    for _ in 0..50 {
        let dim = rng.gen_range(2..=200usize);
        let space = HilbertSpace::new(&[(Label::A, dim)])?;
        let mut triplets = Vec::new();
        for i in 0..dim {
            triplets.push((i, i, C64::new(3.0 * (rng.gen::<f64>() - 0.5), 0.0)));
            for j in i + 1..dim {
                if rng.gen::<f64>() < 0.15 {
                    let v = C64::new(
                        3.0 * (rng.gen::<f64>() - 0.5),
                        3.0 * (rng.gen::<f64>() - 0.5),
                    );
                    triplets.push((i, j, v));
                    triplets.push((j, i, v.conj()));
                }
            }
        }
        let h = Operator::from_triplets(space.clone(), triplets);
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let psi0 = StateVector::from_amplitudes_normalized(space, amps)?;
        let t = 0.1 + 1.9 * rng.gen::<f64>();
        let traj = evolve(&h, &psi0, &[t], tol.min(1e-10))?;
        let exact = propagator_dense(&h, t)?.apply(&psi0)?;
        let err: f64 = traj
            .final_state()
            .amps()
            .iter()
            .zip(exact.amps())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        krylov_dev = krylov_dev.max(err);
    }

    Ok(vec![
        Metric::at_most("max |C − dense BS exponential|, n1+n2 ≤ 6, 16 angles", bs_dev, 1e-8),
        Metric::at_most("max |TMSS amp − dense squeeze exponential|, r ≤ 1", tmss_dev, 1e-8),
        Metric::at_most("max ‖Krylov − dense‖₂, 50 random dim ≤ 200", krylov_dev, 1e-9),
    ])
}

// ---------------------------------------------------------------------------
// A8: metrology estimators against closed forms.

fn a8_metrics() -> Result<Vec<Metric>> {
    // CFI of the twin-Fock (Fock-pair) measurement on the ideal squeezed
    // state: exactly 4, independent of r. The high-n outcomes still carry
    // Fisher weight ∝ n²tanh^{2n}r, so the model keeps 81 outcomes to push
    // the omitted information below 1e−9 at r = 1.2.
    let n_top = 80usize;
    let model = |r: f64| -> Result<Vec<f64>> { Ok((0..=n_top).map(|n| tmss_prob(n, r)).collect()) };
    let mut cfi_dev: f64 = 0.0;
    for k in 1..=12 {
        let r = k as f64 * 0.1;
        let est = cfi(&model, r, crate::metrology::DEFAULT_FD_STEP)?;
        cfi_dev = cfi_dev.max((est.value - closed_form_qfi(ClosedFormQfi::TmssR)).abs());
    }

    // numeric QFI of the phase family θ ↦ |tmss(r, θ)⟩ vs 4n̄(n̄+1); the
    // deviation is normalized by 1 + target
    let mut qfi_dev: f64 = 0.0;
    for r in [0.3, 0.7, 1.0] {
        let family = move |theta: f64| -> Result<StateVector> {
            Ok(tmss_state_with_tail(&SqueezeParams::new(r, theta)?, 45, 1e-8)?.state)
        };
        let q = qfi_pure_numeric(family, 0.6, 1e-4)?;
        let target = closed_form_qfi(ClosedFormQfi::TmssTheta { r });
        qfi_dev = qfi_dev.max((q - target).abs() / (1.0 + target));
    }

    // generator QFI on twin Fock inputs of the beam splitter: 8n(n+1) to
    // machine precision
    let mut gen_dev: f64 = 0.0;
    for n in 0..=10usize {
        let space = HilbertSpace::two_modes(Label::A, Label::C, n + 2)?;
        let x = &Operator::creation(&space, Label::A)?
            * &Operator::annihilation(&space, Label::C)?;
        let g = &x + &x.adjoint();
        let psi = StateVector::fock(&space, &[(Label::A, n), (Label::C, n)], None)?;
        let q = qfi_generator(&g, &psi)?;
        let target = closed_form_qfi(ClosedFormQfi::BsPhase { n });
        gen_dev = gen_dev.max((q - target).abs() / target.max(1.0));
    }

    Ok(vec![
        Metric::at_most("max |CFI − 4| on ideal TMSS, r ∈ [0.1, 1.2]", cfi_dev, 1e-4),
        Metric::at_most("max relative |QFI − 4n̄(n̄+1)| over θ-families", qfi_dev, 1e-3),
        Metric::at_most("max relative |4ΔĜ² − 8n(n+1)|, n ≤ 10", gen_dev, 1e-12),
    ])
}

// ---------------------------------------------------------------------------
// Criterion entry points.

const A1_TITLE: &str = "twin-Fock populations and ⟨n̂_b⟩ track the squeezing law";
const A2_TITLE: &str = "squeezed-state fidelity after tracing out the a-mode";
const A3_TITLE: &str = "beam-splitter outcome probabilities match the closed form";
const A4_TITLE: &str = "Fock-measurement CFI reaches the Heisenberg closed form";
const A5_TITLE: &str = "spin-conditional swap acts correctly at the gate time";
const A6_TITLE: &str = "spin-entangled N00N state forms with AC-Stark compensation";
const A7_TITLE: &str = "analytic forms and Krylov propagation agree with dense oracles";
const A8_TITLE: &str = "metrology estimators reproduce closed forms";
const A9_TITLE: &str = "dynamic results are converged in the Fock truncation";

pub fn criterion_a1(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a1_metrics(opts.n_max(A1_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A1", A1_TITLE, &m))
}

pub fn criterion_a2(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a2_metrics(opts.n_max(A1_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A2", A2_TITLE, &m))
}

pub fn criterion_a3(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a3_metrics(opts.n_max(A3_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A3", A3_TITLE, &m))
}

pub fn criterion_a4(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a4_metrics(opts.n_max(A4_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A4", A4_TITLE, &m))
}

pub fn criterion_a5(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a5_metrics(opts.n_max(A5_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A5", A5_TITLE, &m))
}

pub fn criterion_a6(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a6_metrics(opts.n_max(A6_N_MAX), opts.tol)?;
    Ok(CriterionReport::from_metrics("A6", A6_TITLE, &m))
}

pub fn criterion_a7(opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a7_metrics(opts.tol)?;
    Ok(CriterionReport::from_metrics("A7", A7_TITLE, &m))
}

pub fn criterion_a8(_opts: &VerifyOptions) -> Result<CriterionReport> {
    let m = a8_metrics()?;
    Ok(CriterionReport::from_metrics("A8", A8_TITLE, &m))
}

/// Re-runs every A1–A6 metric at `n_max + 3` and requires the shift to stay
/// under half the metric's stated tolerance.
pub fn criterion_a9(opts: &VerifyOptions) -> Result<CriterionReport> {
    type MetricsFn = fn(usize, f64) -> Result<Vec<Metric>>;
    let parts: [(&str, usize, MetricsFn); 6] = [
        ("A1", A1_N_MAX, a1_metrics),
        ("A2", A1_N_MAX, a2_metrics),
        ("A3", A3_N_MAX, a3_metrics),
        ("A4", A4_N_MAX, a4_metrics),
        ("A5", A5_N_MAX, a5_metrics),
        ("A6", A6_N_MAX, a6_metrics),
    ];
    let mut checks = Vec::new();
    for (id, default, f) in parts {
        let n_max = opts.n_max(default);
        let base = f(n_max, opts.tol)?;
        let bumped = f(n_max + BUMP, opts.tol)?;
        for (b, u) in base.iter().zip(&bumped) {
            checks.push(Check {
                name: format!("{id} shift of {} at n_max + {BUMP}", b.name),
                observed: (u.value - b.value).abs(),
                bound: b.drift_budget,
                kind: CheckKind::AtMost,
            });
        }
    }
    Ok(CriterionReport {
        id: "A9".to_string(),
        title: A9_TITLE.to_string(),
        checks,
    })
}

/// Run A1–A9 in order, collecting every report (criterion failures do not
/// abort the suite; infrastructure errors do).
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<CriterionReport>> {
    let criteria = [
        criterion_a1,
        criterion_a2,
        criterion_a3,
        criterion_a4,
        criterion_a5,
        criterion_a6,
        criterion_a7,
        criterion_a8,
        criterion_a9,
    ];
    criteria.iter().map(|f| f(opts)).collect()
}
