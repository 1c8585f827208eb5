//! Closed-form targets the simulations are checked against: two-mode
//! squeezed-state amplitudes, beam-splitter transition coefficients, the
//! ideal phonon Fredkin gate, and spin-entangled N00N states.

use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Label, SpinState, StateVector};
use crate::C64;

/// Squeeze parameter ζ = r e^{iθ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub r: f64,
    pub theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if r < 0.0 || !r.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze amplitude must be finite and non-negative, got r={r}, theta={theta}"
            )));
        }
        Ok(Self { r, theta })
    }

    /// Squeezing accumulated by the driven-a scheme after time `t`:
    /// r = (Ω_a ξ/ω)t and θ = φ + π/2.
    pub fn from_drive(drive_amp: f64, xi: f64, omega: f64, phi: f64, t: f64) -> Result<Self> {
        if omega <= 0.0 {
            return Err(Error::InvalidParameter(
                "drive-induced squeezing requires omega > 0".into(),
            ));
        }
        Self::new(
            drive_amp * xi / omega * t,
            phi + std::f64::consts::FRAC_PI_2,
        )
    }
}

/// Beam-splitter drive: rate ε = Ω_b ξ/ω (or ε_b = g_b ξ/ω for the
/// spin-conditional variant) and drive phase φ; the mixing angle after
/// time t is εt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams {
    pub epsilon: f64,
    pub phi: f64,
}

impl BsParams {
    pub fn new(epsilon: f64, phi: f64) -> Result<Self> {
        if epsilon < 0.0 || !epsilon.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beam-splitter rate must be finite and non-negative, got epsilon={epsilon}"
            )));
        }
        Ok(Self { epsilon, phi })
    }

    /// ε = Ω ξ/ω for a drive amplitude Ω (use g_b for the spin-conditional
    /// beam splitter).
    pub fn from_drive(drive_amp: f64, xi: f64, omega: f64, phi: f64) -> Result<Self> {
        if omega <= 0.0 {
            return Err(Error::InvalidParameter(
                "beam-splitter rate requires omega > 0".into(),
            ));
        }
        Self::new(drive_amp * xi / omega, phi)
    }

    /// Mixing angle εt.
    pub fn angle(&self, t: f64) -> f64 {
        self.epsilon * t
    }
}

/// Twin-Fock population of the two-mode squeezed state:
/// p_n = tanh²ⁿ(r)/cosh²(r).
pub fn tmss_prob(n: usize, r: f64) -> f64 {
    r.tanh().powi(2 * n as i32) / r.cosh().powi(2)
}

/// Default ceiling on the discarded tail mass of a truncated TMSS.
pub const TMSS_TAIL_TOL: f64 = 1e-10;

/// A two-mode squeezed state truncated at `n_max`, renormalized, together
/// with the discarded tail mass (never silently absorbed).
#[derive(Debug, Clone)]
pub struct TruncatedTmss {
    /// Renormalized state on the (b, c) pair.
    pub state: StateVector,
    /// Σ_{n>n_max} p_n = tanh^{2(n_max+1)}(r), the analytic geometric tail.
    pub tail_mass: f64,
    /// Factor applied to each amplitude during renormalization.
    pub renormalization: f64,
}

/// Truncated TMSS with the strict default tail ceiling [`TMSS_TAIL_TOL`].
pub fn tmss_state(params: &SqueezeParams, n_max: usize) -> Result<TruncatedTmss> {
    tmss_state_with_tail(params, n_max, TMSS_TAIL_TOL)
}

/// Truncated TMSS with amplitudes (e^{iθ}tanh r)ⁿ/cosh r on |n,n⟩,
/// renormalized after truncation. Errors when the discarded tail exceeds
/// `tail_budget`; fidelity comparisons at large r may need a looser budget
/// than the [`TMSS_TAIL_TOL`] default, chosen explicitly by the caller.
pub fn tmss_state_with_tail(
    params: &SqueezeParams,
    n_max: usize,
    tail_budget: f64,
) -> Result<TruncatedTmss> {
    let tail_mass = params.r.tanh().powi(2 * (n_max as i32 + 1));
    if tail_mass > tail_budget {
        return Err(Error::TailMassTooLarge {
            mass: tail_mass,
            budget: tail_budget,
        });
    }
    let space = HilbertSpace::two_modes(Label::B, Label::C, n_max)?;
    let base = C64::from_polar(params.r.tanh(), params.theta);
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    let mut amp = C64::new(1.0 / params.r.cosh(), 0.0);
    for n in 0..=n_max {
        amps[space.index_of(&[n, n])] = amp;
        amp *= base;
    }
    let norm_before = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state = StateVector::from_amplitudes_normalized(space, amps)?;
    Ok(TruncatedTmss {
        state,
        tail_mass,
        renormalization: 1.0 / norm_before,
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Pairwise summation; the beam-splitter sum alternates in sign and is
/// mildly cancellation-prone.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1..=4 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Beam-splitter transition coefficient C^{n1,n2}_{N1,N2} at mixing angle εt:
///
/// C = Σ_{k,l} (−1)^{n1−k} sin^{n1+n2−k−l}(εt) cos^{k+l}(εt)
///       · √(n1!n2!N1!N2!)/(k!(n1−k)!l!(n2−l)!) δ_{N1,n2+k−l} δ_{N2,n1−k+l}.
///
/// Real by construction; zero unless N1+N2 = n1+n2. At angle 0 the map is
/// the identity, at π/2 a full swap (up to phase) — the convention is pinned
/// by the dense-exponential cross-check in the test suite.
pub fn bs_coefficient(n1: usize, n2: usize, big_n1: usize, big_n2: usize, angle: f64) -> f64 {
    if n1 + n2 != big_n1 + big_n2 {
        return 0.0;
    }
    let s = angle.sin();
    let c = angle.cos();
    let prefactor =
        0.5 * (ln_factorial(n1) + ln_factorial(n2) + ln_factorial(big_n1) + ln_factorial(big_n2));
    let mut terms = Vec::with_capacity(n1 + 1);
    for k in 0..=n1 {
        // δ_{N1,n2+k−l} fixes l; δ_{N2,n1−k+l} then holds automatically.
        let l_signed = n2 as i64 + k as i64 - big_n1 as i64;
        if l_signed < 0 || l_signed > n2 as i64 {
            continue;
        }
        let l = l_signed as usize;
        let sign = if (n1 - k) % 2 == 0 { 1.0 } else { -1.0 };
        let ln_mag = prefactor
            - ln_factorial(k)
            - ln_factorial(n1 - k)
            - ln_factorial(l)
            - ln_factorial(n2 - l);
        terms.push(
            sign * ln_mag.exp()
                * s.powi((n1 + n2 - k - l) as i32)
                * c.powi((k + l) as i32),
        );
    }
    pairwise_sum(&terms)
}

/// Final state of the beam splitter acting on |n1,n2⟩ of the (a, c) pair:
/// |ψ_f⟩ = Σ e^{−i(φ−π/2)(n1−N1)} C^{n1,n2}_{N1,N2}|N1,N2⟩.
pub fn bs_final_state(
    n1: usize,
    n2: usize,
    params: &BsParams,
    t: f64,
    n_max: usize,
) -> Result<StateVector> {
    let total = n1 + n2;
    if total > n_max {
        return Err(Error::OccupationExceedsTruncation {
            label: Label::A,
            occ: total,
            n_max,
        });
    }
    let space = HilbertSpace::two_modes(Label::A, Label::C, n_max)?;
    let angle = params.angle(t);
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    for big_n1 in 0..=total {
        let big_n2 = total - big_n1;
        let coeff = bs_coefficient(n1, n2, big_n1, big_n2, angle);
        let phase = C64::from_polar(
            1.0,
            -(params.phi - std::f64::consts::FRAC_PI_2) * (n1 as f64 - big_n1 as f64),
        );
        amps[space.index_of(&[big_n1, big_n2])] = phase * coeff;
    }
    StateVector::from_amplitudes(space, amps)
}

fn minus_i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Ideal phonon Fredkin (controlled-SWAP) gate on a (spin, a, c) state:
/// Û_F|↑,n,m⟩ = (−i)^{n+m}|↑,m,n⟩ and Û_F|↓,n,m⟩ = |↓,n,m⟩, extended
/// linearly. The a- and c-modes must share a truncation.
pub fn fredkin_apply(state: &StateVector) -> Result<StateVector> {
    let space = state.space();
    let subs = space.subsystems();
    let ok = subs.len() == 3
        && subs[0].0 == Label::Spin
        && subs[1].0 == Label::A
        && subs[2].0 == Label::C
        && subs[1].1 == subs[2].1;
    if !ok {
        return Err(Error::SpaceMismatch);
    }
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    for (idx, &a) in state.amps().iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let multi = space.multi_index(idx);
        if multi[0] == SpinState::Down.index() {
            amps[idx] += a;
        } else {
            let swapped = space.index_of(&[multi[0], multi[2], multi[1]]);
            amps[swapped] += minus_i_pow(multi[1] + multi[2]) * a;
        }
    }
    StateVector::from_amplitudes(space.clone(), amps)
}

/// Spin-entangled N00N state (|↓⟩|n,0⟩ + (−i)ⁿ|↑⟩|0,n⟩)/√2 on (spin, a, c).
pub fn noon_state(n: usize, n_max: usize) -> Result<StateVector> {
    if n > n_max {
        return Err(Error::OccupationExceedsTruncation {
            label: Label::A,
            occ: n,
            n_max,
        });
    }
    let space = HilbertSpace::new(&[
        (Label::Spin, 2),
        (Label::A, n_max + 1),
        (Label::C, n_max + 1),
    ])?;
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    let w = std::f64::consts::FRAC_1_SQRT_2;
    amps[space.index_of(&[SpinState::Down.index(), n, 0])] = C64::new(w, 0.0);
    amps[space.index_of(&[SpinState::Up.index(), 0, n])] = minus_i_pow(n) * w;
    StateVector::from_amplitudes(space, amps)
}

/// Fredkin gate time t_g = π/(2 ε_b).
pub fn gate_time(eps_b: f64) -> Result<f64> {
    if eps_b <= 0.0 || !eps_b.is_finite() {
        return Err(Error::ZeroRate);
    }
    Ok(std::f64::consts::FRAC_PI_2 / eps_b)
}
