//! Classical and quantum Fisher information.
//!
//! The classical estimator differentiates a measured probability
//! distribution p_k(λ) by central differences; the quantum estimators use
//! either a differentiable family of pure states or the generator variance
//! F_Q = 4 Var(G). Closed forms for the squeezing and beam-splitter schemes
//! are provided for cross-checks, together with Cramér–Rao bound reporting.

use crate::error::{Error, Result};
use crate::fock::{Operator, StateVector};
use crate::C64;

/// Probabilities below this floor are excluded from CFI sums (their mass is
/// reported instead) to avoid 0/0 amplification from truncation-level
/// populations.
pub const P_FLOOR: f64 = 1e-12;

/// Default central-difference step in the natural units of λ.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// A measurement model: outcome probabilities as a function of the estimated
/// parameter λ. Vectors may be sub-normalized when outcomes are truncated;
/// the deficit is reported by the estimator. Implemented by any
/// `Fn(f64) -> Result<Vec<f64>>`.
pub trait ProbabilityModel {
    fn probabilities(&self, lambda: f64) -> Result<Vec<f64>>;
}

impl<F> ProbabilityModel for F
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    fn probabilities(&self, lambda: f64) -> Result<Vec<f64>> {
        self(lambda)
    }
}

/// Classical Fisher information estimate with its exclusion diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfiEstimate {
    /// Σ_k (dp_k/dλ)²/p_k over the retained outcomes.
    pub value: f64,
    /// Probability mass (at the center point) of outcomes dropped by the
    /// [`P_FLOOR`] cut.
    pub excluded_mass: f64,
    /// 1 − Σ_k p_k at the center point when the model is sub-normalized.
    pub normalization_deficit: f64,
}

fn checked_probabilities<M: ProbabilityModel + ?Sized>(
    model: &M,
    lambda: f64,
) -> Result<Vec<f64>> {
    let mut p = model.probabilities(lambda)?;
    for (k, v) in p.iter_mut().enumerate() {
        if *v < -1e-12 {
            return Err(Error::NegativeProbability { index: k, p: *v });
        }
        *v = v.max(0.0);
    }
    let sum: f64 = p.iter().sum();
    if sum > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "probability vector sums to {sum} > 1 at lambda = {lambda}"
        )));
    }
    Ok(p)
}

/// Central-difference classical Fisher information
/// F_C(λ) = Σ_k (1/p_k)(dp_k/dλ)².
pub fn cfi<M: ProbabilityModel + ?Sized>(
    model: &M,
    lambda: f64,
    step: f64,
) -> Result<CfiEstimate> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let center = checked_probabilities(model, lambda)?;
    let minus = checked_probabilities(model, lambda - step)?;
    let plus = checked_probabilities(model, lambda + step)?;
    if minus.len() != center.len() || plus.len() != center.len() {
        return Err(Error::InvalidParameter(
            "probability model changed its outcome count across lambda".into(),
        ));
    }
    let mut value = 0.0;
    let mut excluded_mass = 0.0;
    for k in 0..center.len() {
        if center[k] < P_FLOOR {
            excluded_mass += center[k];
            continue;
        }
        let d = (plus[k] - minus[k]) / (2.0 * step);
        value += d * d / center[k];
    }
    Ok(CfiEstimate {
        value,
        excluded_mass,
        normalization_deficit: (1.0 - center.iter().sum::<f64>()).max(0.0),
    })
}

/// Richardson-extrapolated CFI: combines estimates at `step` and `step/2`
/// to cancel the leading O(step²) differencing error.
pub fn cfi_richardson<M: ProbabilityModel + ?Sized>(
    model: &M,
    lambda: f64,
    step: f64,
) -> Result<CfiEstimate> {
    let coarse = cfi(model, lambda, step)?;
    let fine = cfi(model, lambda, step / 2.0)?;
    Ok(CfiEstimate {
        value: (4.0 * fine.value - coarse.value) / 3.0,
        excluded_mass: fine.excluded_mass,
        normalization_deficit: fine.normalization_deficit,
    })
}

/// Pure-state quantum Fisher information by central differences:
/// F_Q(λ) = 4(⟨∂_λψ|∂_λψ⟩ − |⟨ψ|∂_λψ⟩|²).
///
/// Before differencing, every state is rotated so the amplitude at the
/// center state's largest-magnitude component is real-positive; the QFI
/// formula assumes a differentiable phase gauge and this pins one.
pub fn qfi_pure_numeric<F>(family: F, lambda: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<StateVector>,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let center = family(lambda)?;
    let minus = family(lambda - step)?;
    let plus = family(lambda + step)?;
    for s in [&center, &minus, &plus] {
        if s.space() != center.space() {
            return Err(Error::SpaceMismatch);
        }
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NormDeviation { norm });
        }
    }
    let pivot = center.index_of_largest();
    let center = center.phase_aligned(pivot);
    let minus = minus.phase_aligned(pivot);
    let plus = plus.phase_aligned(pivot);

    let inv = 1.0 / (2.0 * step);
    let deriv: Vec<C64> = plus
        .amps()
        .iter()
        .zip(minus.amps())
        .map(|(p, m)| (p - m) * inv)
        .collect();
    let dd: f64 = deriv.iter().map(|a| a.norm_sqr()).sum();
    let overlap: C64 = center
        .amps()
        .iter()
        .zip(&deriv)
        .map(|(a, d)| a.conj() * d)
        .sum();
    Ok(4.0 * (dd - overlap.norm_sqr()))
}

/// Generator form of the pure-state QFI for |ψ_λ⟩ = e^{−iλG}|ψ₀⟩:
/// F_Q = 4(⟨G²⟩ − ⟨G⟩²).
pub fn qfi_generator(g: &Operator, psi0: &StateVector) -> Result<f64> {
    let defect = g.hermiticity_defect();
    if defect > 1e-12 * g.inf_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let g_psi = g.apply(psi0)?;
    let mean = psi0.inner(&g_psi)?.re;
    let second = g_psi.inner(&g_psi)?.re;
    Ok(4.0 * (second - mean * mean).max(0.0))
}

/// The closed-form QFI values quoted for the squeezing and beam-splitter
/// estimation schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormQfi {
    /// Squeezing-amplitude estimation on a TMSS: F_Q(r) = 4.
    TmssR,
    /// Squeezing-phase estimation: F_Q(θ) = 4n̄(n̄+1) with n̄ = sinh²(r).
    TmssTheta { r: f64 },
    /// Beam-splitter phase estimation from |n,n⟩: F_Q = 8n(n+1).
    BsPhase { n: usize },
}

pub fn closed_form_qfi(which: ClosedFormQfi) -> f64 {
    match which {
        ClosedFormQfi::TmssR => 4.0,
        ClosedFormQfi::TmssTheta { r } => {
            let nbar = r.sinh().powi(2);
            4.0 * nbar * (nbar + 1.0)
        }
        ClosedFormQfi::BsPhase { n } => 8.0 * n as f64 * (n as f64 + 1.0),
    }
}

/// Cramér–Rao bound on the estimator variance, δλ² ≥ 1/F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CramerRao {
    Bound(f64),
    /// Zero Fisher information: the parameter is not identifiable.
    Unbounded,
}

impl CramerRao {
    pub fn value(self) -> Option<f64> {
        match self {
            CramerRao::Bound(v) => Some(v),
            CramerRao::Unbounded => None,
        }
    }
}

impl std::fmt::Display for CramerRao {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CramerRao::Bound(v) => write!(f, "{v}"),
            CramerRao::Unbounded => f.write_str("unbounded"),
        }
    }
}

pub fn cramer_rao(fisher: f64) -> Result<CramerRao> {
    if fisher < 0.0 || !fisher.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Fisher information must be finite and non-negative, got {fisher}"
        )));
    }
    if fisher == 0.0 {
        Ok(CramerRao::Unbounded)
    } else {
        Ok(CramerRao::Bound(1.0 / fisher))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{tmss_prob, tmss_state_with_tail, SqueezeParams};
    use crate::fock::{HilbertSpace, Label};

    #[test]
    fn constant_model_has_zero_cfi() {
        let model = |_lambda: f64| Ok(vec![0.25, 0.5, 0.25]);
        let est = cfi(&model, 0.7, 1e-4).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.excluded_mass, 0.0);
        assert!(est.normalization_deficit.abs() < 1e-15);
    }

    #[test]
    fn binary_model_cfi_is_four() {
        let model = |l: f64| Ok(vec![l.sin().powi(2), l.cos().powi(2)]);
        for lambda in [0.3, 0.7, 1.1] {
            let est = cfi(&model, lambda, 1e-4).unwrap();
            assert!((est.value - 4.0).abs() < 1e-6, "lambda={lambda}");
        }
    }

    #[test]
    fn tmss_fock_measurement_cfi_is_four_in_r() {
        let model = |r: f64| Ok((0..=40).map(|n| tmss_prob(n, r)).collect());
        for r in [0.3, 0.6, 0.9] {
            let est = cfi(&model, r, 1e-4).unwrap();
            assert!((est.value - 4.0).abs() < 1e-4, "r={r}: {}", est.value);
            // the 41-outcome truncation is sub-normalized; deficit is the tail
            assert!((est.normalization_deficit - r.tanh().powi(82)).abs() < 1e-12);
        }
    }

    #[test]
    fn richardson_consistent_with_plain_estimate() {
        let model = |l: f64| Ok(vec![l.sin().powi(2), l.cos().powi(2)]);
        let plain = cfi(&model, 0.9, 1e-3).unwrap();
        let halved = cfi(&model, 0.9, 5e-4).unwrap();
        assert!((plain.value - halved.value).abs() < 0.01 * plain.value.abs());
        let rich = cfi_richardson(&model, 0.9, 1e-3).unwrap();
        assert!((rich.value - 4.0).abs() < 1e-8);
    }

    #[test]
    fn cfi_rejects_bad_models() {
        let negative = |_l: f64| Ok(vec![-0.2, 0.5]);
        assert!(matches!(
            cfi(&negative, 0.3, 1e-4),
            Err(Error::NegativeProbability { .. })
        ));
        let oversized = |_l: f64| Ok(vec![0.8, 0.7]);
        assert!(cfi(&oversized, 0.3, 1e-4).is_err());
        let fine = |_l: f64| Ok(vec![1.0]);
        assert!(cfi(&fine, 0.3, 0.0).is_err());
    }

    #[test]
    fn floor_exclusion_reports_mass() {
        let model = |l: f64| {
            let p = l.sin().powi(2);
            Ok(vec![p, 1.0 - p - 5e-13, 5e-13])
        };
        let est = cfi(&model, 0.4, 1e-4).unwrap();
        assert!((est.excluded_mass - 5e-13).abs() < 1e-15);
    }

    #[test]
    fn qfi_of_constant_family_is_zero() {
        let space = HilbertSpace::new(&[(Label::A, 3)]).unwrap();
        let family = |_l: f64| StateVector::fock(&space, &[(Label::A, 1)], None);
        let f = qfi_pure_numeric(family, 0.5, 1e-4).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn phase_family_qfi_is_four_times_number_variance() {
        // |ψ_λ⟩ = e^{iλn̂}|v⟩ for a fixed test vector v
        let space = HilbertSpace::new(&[(Label::B, 6)]).unwrap();
        let weights = [0.5f64, 1.0, 0.7, 0.3, 0.4, 0.2];
        let base: Vec<C64> = weights.iter().map(|&w| C64::new(w, 0.0)).collect();
        let norm: f64 = base.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let base: Vec<C64> = base.iter().map(|a| a / norm).collect();
        let family = |l: f64| {
            let amps: Vec<C64> = base
                .iter()
                .enumerate()
                .map(|(n, a)| a * C64::from_polar(1.0, l * n as f64))
                .collect();
            StateVector::from_amplitudes(space.clone(), amps)
        };
        let f = qfi_pure_numeric(family, 0.8, 1e-4).unwrap();
        let p: Vec<f64> = base.iter().map(|a| a.norm_sqr()).collect();
        let mean: f64 = p.iter().enumerate().map(|(n, &pn)| n as f64 * pn).sum();
        let second: f64 = p
            .iter()
            .enumerate()
            .map(|(n, &pn)| (n * n) as f64 * pn)
            .sum();
        let var = second - mean * mean;
        assert!((f - 4.0 * var).abs() < 1e-6, "{f} vs {}", 4.0 * var);
    }

    #[test]
    fn tmss_theta_family_reproduces_closed_form() {
        let r = 0.7;
        let family = |theta: f64| {
            Ok(tmss_state_with_tail(&SqueezeParams::new(r, theta)?, 30, 1e-10)?.state)
        };
        let f = qfi_pure_numeric(family, 0.4, 1e-4).unwrap();
        let expect = closed_form_qfi(ClosedFormQfi::TmssTheta { r });
        assert!((f - expect).abs() < 1e-4, "{f} vs {expect}");
    }

    #[test]
    fn generator_qfi_on_twin_fock_is_heisenberg_limited() {
        for n in 0..=10usize {
            let n_max = n + 1;
            let space = HilbertSpace::two_modes(Label::A, Label::C, n_max).unwrap();
            let x = &Operator::creation(&space, Label::A).unwrap()
                * &Operator::annihilation(&space, Label::C).unwrap();
            let g = &x + &x.adjoint();
            let psi = StateVector::fock(&space, &[(Label::A, n), (Label::C, n)], None).unwrap();
            let f = qfi_generator(&g, &psi).unwrap();
            let expect = closed_form_qfi(ClosedFormQfi::BsPhase { n });
            assert!(
                (f - expect).abs() <= 1e-12 * (1.0 + expect),
                "n={n}: {f} vs {expect}"
            );
        }
    }

    #[test]
    fn generator_qfi_invariances() {
        let space = HilbertSpace::two_modes(Label::A, Label::C, 3).unwrap();
        let x = &Operator::creation(&space, Label::A).unwrap()
            * &Operator::annihilation(&space, Label::C).unwrap();
        let g = &x + &x.adjoint();
        let psi = StateVector::fock(&space, &[(Label::A, 1), (Label::C, 1)], None).unwrap();
        let f = qfi_generator(&g, &psi).unwrap();

        // shift G → G + cI
        let shifted = &g + &Operator::identity(&space).scaled(C64::new(2.5, 0.0));
        let f_shift = qfi_generator(&shifted, &psi).unwrap();
        assert!((f - f_shift).abs() < 1e-12 * (1.0 + f.abs()));

        // global phase of ψ
        let rotated = StateVector::from_amplitudes(
            space.clone(),
            psi.amps()
                .iter()
                .map(|a| a * C64::from_polar(1.0, 1.234))
                .collect(),
        )
        .unwrap();
        let f_rot = qfi_generator(&g, &rotated).unwrap();
        assert!((f - f_rot).abs() < 1e-12 * (1.0 + f.abs()));

        // eigenstate → zero variance
        let n_op = Operator::number(&space, Label::A).unwrap();
        let f_eig = qfi_generator(&n_op, &psi).unwrap();
        assert!(f_eig.abs() < 1e-12);
    }

    #[test]
    fn squeeze_generator_qfi_on_vacuum_is_four() {
        // G = i(e^{iθ}b̂†ĉ† − e^{−iθ}b̂ĉ): F_Q on |0,0⟩ is 4
        let space = HilbertSpace::two_modes(Label::B, Label::C, 2).unwrap();
        let x = (&Operator::creation(&space, Label::B).unwrap()
            * &Operator::creation(&space, Label::C).unwrap())
            .scaled(C64::from_polar(1.0, 0.7) * C64::new(0.0, 1.0));
        let g = &x + &x.adjoint();
        let vac = StateVector::fock(&space, &[], None).unwrap();
        let f = qfi_generator(&g, &vac).unwrap();
        assert!((f - 4.0).abs() < 1e-12);
    }

    #[test]
    fn data_processing_bound_on_qubit_family() {
        let space = HilbertSpace::new(&[(Label::A, 2)]).unwrap();
        let family = |l: f64| {
            StateVector::from_amplitudes(
                space.clone(),
                vec![C64::new(l.cos(), 0.0), C64::new(l.sin(), 0.0)],
            )
        };
        let model = |l: f64| Ok(vec![l.cos().powi(2), l.sin().powi(2)]);
        let lambda = 0.6;
        let classical = cfi(&model, lambda, 1e-4).unwrap().value;
        let quantum = qfi_pure_numeric(family, lambda, 1e-4).unwrap();
        assert!(classical <= quantum + 1e-3);
        assert!((classical - 4.0).abs() < 1e-6);
        assert!((quantum - 4.0).abs() < 1e-6);
    }

    #[test]
    fn closed_forms_and_cramer_rao() {
        assert_eq!(closed_form_qfi(ClosedFormQfi::TmssR), 4.0);
        assert_eq!(closed_form_qfi(ClosedFormQfi::BsPhase { n: 0 }), 0.0);
        assert_eq!(closed_form_qfi(ClosedFormQfi::BsPhase { n: 3 }), 96.0);

        assert_eq!(cramer_rao(4.0).unwrap(), CramerRao::Bound(0.25));
        assert_eq!(
            cramer_rao(closed_form_qfi(ClosedFormQfi::BsPhase { n: 1 })).unwrap(),
            CramerRao::Bound(1.0 / 16.0)
        );
        assert_eq!(cramer_rao(0.0).unwrap(), CramerRao::Unbounded);
        assert!(cramer_rao(-1.0).is_err());
        assert_eq!(format!("{}", CramerRao::Unbounded), "unbounded");
    }

    #[test]
    fn qfi_rejects_unnormalized_and_mismatched_states() {
        let space = HilbertSpace::new(&[(Label::A, 2)]).unwrap();
        let family = |_l: f64| {
            StateVector::from_amplitudes_normalized(
                space.clone(),
                vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            )
        };
        assert!(qfi_pure_numeric(family, 0.1, 1e-4).is_ok());

        let skew = Operator::from_triplets(
            space.clone(),
            vec![(0, 1, C64::new(1.0, 0.0)), (1, 0, C64::new(-1.0, 0.0))],
        );
        let psi = StateVector::fock(&space, &[], None).unwrap();
        assert!(matches!(
            qfi_generator(&skew, &psi),
            Err(Error::NotHermitian { .. })
        ));
    }
}
