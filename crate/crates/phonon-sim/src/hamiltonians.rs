//! Rotating-frame and effective Hamiltonians of the trilinear three-mode
//! system.
//!
//! All builders take a [`HamiltonianSpec`] with rates as angular frequencies
//! in rad/ms (ħ = 1, so Hamiltonian entries are angular frequencies too) and
//! produce exactly Hermitian sparse operators: every non-Hermitian piece is
//! inserted as X + X†, which cancels bitwise in `H − H†`.
//!
//! The mode self-energies ω_a n̂_a + ω_b n̂_b + ω_c n̂_c never appear here;
//! the rotating frame absorbs them under the resonance condition
//! ω_a = ω_b + ω_c + ω, and only the detuning ω survives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Label, Operator, SpinState};
use crate::C64;

/// Convert a laboratory frequency ν/2π quoted in kHz to an angular frequency
/// in rad/ms (1 kHz → 2π rad/ms).
pub fn khz_to_rad_per_ms(value_khz: f64) -> Result<f64> {
    if value_khz < 0.0 || !value_khz.is_finite() {
        return Err(Error::NegativeFrequency(value_khz));
    }
    Ok(2.0 * std::f64::consts::PI * value_khz)
}

/// Inverse of [`khz_to_rad_per_ms`].
pub fn rad_per_ms_to_khz(value: f64) -> f64 {
    value / (2.0 * std::f64::consts::PI)
}

/// Which Hamiltonian a [`HamiltonianSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Bare trilinear coupling ξ(â†b̂ĉ + âb̂†ĉ†).
    Trilinear,
    /// Resonant drive on mode a: ω n̂_a + Ω_a(â†e^{iφ} + âe^{−iφ}) + trilinear.
    DrivenA,
    /// Resonant drive on mode b: −ω n̂_b + Ω_b(b̂†e^{iφ} + b̂e^{−iφ}) + trilinear.
    DrivenB,
    /// Spin-dependent drive on mode b with Lamb-Dicke corrections.
    SpinConditional,
    /// Second-order effective two-mode squeezer on (b, c).
    EffectiveTmss,
    /// Second-order effective beam splitter on (a, c).
    EffectiveBs,
}

/// Parameter record for every Hamiltonian builder. Rates are angular
/// frequencies in rad/ms; use [`khz_to_rad_per_ms`] when transcribing
/// laboratory values quoted as ν/2π in kHz.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    /// Fock truncation per mode; each mode has dimension `n_max + 1`.
    pub n_max: usize,
    /// Trilinear phonon-phonon coupling ξ (rad/ms).
    #[serde(default)]
    pub xi: f64,
    /// Rotating-frame detuning ω = ω_a − ω_b − ω_c (rad/ms).
    #[serde(default)]
    pub omega: f64,
    /// Drive amplitude Ω_a (driven-a) or Ω_b (driven-b) (rad/ms).
    #[serde(default)]
    pub drive_amp: f64,
    /// Drive phase φ (rad).
    #[serde(default)]
    pub phi: f64,
    /// Spin-phonon coupling g_b (rad/ms).
    #[serde(default)]
    pub g_b: f64,
    /// Lamb-Dicke parameter η_b of the spin-dependent drive.
    #[serde(default)]
    pub eta_b: f64,
    /// Include the second-order residual H_a′ / H_b′ in effective models.
    #[serde(default)]
    pub include_residual: bool,
    /// Include the AC-Stark compensation −(g_b²/ω)|↑⟩⟨↑|.
    #[serde(default)]
    pub include_ac_stark: bool,
}

impl HamiltonianSpec {
    pub fn new(kind: HamiltonianKind, n_max: usize) -> Self {
        Self {
            kind,
            n_max,
            xi: 0.0,
            omega: 0.0,
            drive_amp: 0.0,
            phi: 0.0,
            g_b: 0.0,
            eta_b: 0.0,
            include_residual: false,
            include_ac_stark: false,
        }
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_drive(mut self, drive_amp: f64) -> Self {
        self.drive_amp = drive_amp;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_g_b(mut self, g_b: f64) -> Self {
        self.g_b = g_b;
        self
    }

    pub fn with_eta_b(mut self, eta_b: f64) -> Self {
        self.eta_b = eta_b;
        self
    }

    pub fn with_residual(mut self, on: bool) -> Self {
        self.include_residual = on;
        self
    }

    pub fn with_ac_stark(mut self, on: bool) -> Self {
        self.include_ac_stark = on;
        self
    }

    /// The Hilbert space the built operator acts on: (a, b, c), plus spin for
    /// the spin-conditional model.
    pub fn space(&self) -> HilbertSpace {
        match self.kind {
            HamiltonianKind::SpinConditional => HilbertSpace::spin_three_modes(self.n_max),
            _ => HilbertSpace::three_modes(self.n_max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        for (name, v) in [
            ("xi", self.xi),
            ("omega", self.omega),
            ("drive_amp", self.drive_amp),
            ("g_b", self.g_b),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a finite non-negative rate, got {v}"
                )));
            }
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi must be finite, got {}",
                self.phi
            )));
        }
        if !(0.0..1.0).contains(&self.eta_b) {
            return Err(Error::InvalidParameter(format!(
                "eta_b must lie in [0, 1), got {}",
                self.eta_b
            )));
        }
        Ok(())
    }

    /// Diagnostic (not an error): the effective models assume
    /// Ω, ξ, g_b ≪ ω. Returns a message when max(Ω, ξ, g_b) > ω/3.
    pub fn weak_coupling_advisory(&self) -> Option<String> {
        let strongest = self.drive_amp.max(self.xi).max(self.g_b);
        if strongest > self.omega / 3.0 {
            Some(format!(
                "weak-coupling assumption strained: max(drive, xi, g_b) = {:.4} rad/ms \
                 exceeds omega/3 = {:.4} rad/ms; second-order effective models may be inaccurate",
                strongest,
                self.omega / 3.0
            ))
        } else {
            None
        }
    }

    /// Build the Hamiltonian selected by `kind`.
    pub fn build(&self) -> Result<Operator> {
        match self.kind {
            HamiltonianKind::Trilinear => build_trilinear(self),
            HamiltonianKind::DrivenA => build_driven_a(self),
            HamiltonianKind::DrivenB => build_driven_b(self),
            HamiltonianKind::SpinConditional => build_spin_conditional(self),
            HamiltonianKind::EffectiveTmss => build_effective_tmss(self),
            HamiltonianKind::EffectiveBs => build_effective_bs(self),
        }
    }
}

fn check_kind(spec: &HamiltonianSpec, expected: HamiltonianKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != expected {
        return Err(Error::InvalidParameter(format!(
            "spec kind {:?} does not match requested builder {:?}",
            spec.kind, expected
        )));
    }
    Ok(())
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// ξ(â†b̂ĉ + h.c.) on `space`, as X + X† for exact Hermiticity.
fn trilinear_term(space: &HilbertSpace, xi: f64) -> Result<Operator> {
    let a_dag = Operator::creation(space, Label::A)?;
    let b = Operator::annihilation(space, Label::B)?;
    let ch = Operator::annihilation(space, Label::C)?;
    let x = (&(&a_dag * &b) * &ch).scaled(c(xi, 0.0));
    Ok(&x + &x.adjoint())
}

/// Ω(d̂†e^{iφ} + d̂e^{−iφ}) on mode `label`, as X + X†.
fn drive_term(space: &HilbertSpace, label: Label, amp: f64, phi: f64) -> Result<Operator> {
    let x = Operator::creation(space, label)?.scaled(C64::from_polar(amp, phi));
    Ok(&x + &x.adjoint())
}

/// Trilinear interaction ξ(â†b̂ĉ + âb̂†ĉ†); the rotating frame absorbs all
/// mode self-energies, so this is the full Hamiltonian between drives.
pub fn build_trilinear(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::Trilinear)?;
    trilinear_term(&spec.space(), spec.xi)
}

/// Drive on mode a: H = ω n̂_a + Ω_a(â†e^{iφ} + âe^{−iφ}) + trilinear.
pub fn build_driven_a(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::DrivenA)?;
    let space = spec.space();
    let free = Operator::number(&space, Label::A)?.scaled(c(spec.omega, 0.0));
    let drive = drive_term(&space, Label::A, spec.drive_amp, spec.phi)?;
    Ok(&(&free + &drive) + &trilinear_term(&space, spec.xi)?)
}

/// Drive on mode b: H = −ω n̂_b + Ω_b(b̂†e^{iφ} + b̂e^{−iφ}) + trilinear.
/// The detuning enters with the opposite sign to [`build_driven_a`].
pub fn build_driven_b(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::DrivenB)?;
    let space = spec.space();
    let free = Operator::number(&space, Label::B)?.scaled(c(-spec.omega, 0.0));
    let drive = drive_term(&space, Label::B, spec.drive_amp, spec.phi)?;
    Ok(&(&free + &drive) + &trilinear_term(&space, spec.xi)?)
}

/// Diagonal entries f_m of the Lamb-Dicke correction
/// F(n̂) = e^{−η²/2} Σ_n (−η²)ⁿ/(n!(n+1)!) b̂†ⁿb̂ⁿ:
/// f_m = e^{−η²/2} Σ_{n=0}^{m} (−η²)ⁿ m!/(n!(n+1)!(m−n)!).
pub fn lamb_dicke_diagonal(eta: f64, n_max: usize) -> Vec<f64> {
    let eta2 = eta * eta;
    let envelope = (-eta2 / 2.0).exp();
    (0..=n_max)
        .map(|m| {
            // term(n+1)/term(n) = −η²(m−n)/((n+1)(n+2)); finite sum, no
            // truncation heuristic needed.
            let mut term = 1.0;
            let mut sum = 1.0;
            for n in 0..m {
                term *= -eta2 * (m - n) as f64 / ((n + 1) as f64 * (n + 2) as f64);
                sum += term;
            }
            envelope * sum
        })
        .collect()
}

/// F(n̂_b) as a diagonal operator on a single b-mode of truncation `n_max`.
pub fn lamb_dicke_operator(eta: f64, n_max: usize) -> Result<Operator> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in [0, 1), got {eta}"
        )));
    }
    let space = HilbertSpace::new(&[(Label::B, n_max + 1)])?;
    let f = lamb_dicke_diagonal(eta, n_max);
    Ok(Operator::diagonal_from_fn(&space, |multi| {
        c(f[multi[0]], 0.0)
    }))
}

/// Spin-dependent drive on mode b:
/// H = −ω n̂_b + g_b(b̂†F(n̂_b) + F(n̂_b)b̂)|↑⟩⟨↑| + trilinear,
/// optionally plus the AC-Stark compensation −(g_b²/ω)|↑⟩⟨↑|.
/// Block-diagonal in spin; the |↓⟩ block carries only −ω n̂_b and ξ terms.
pub fn build_spin_conditional(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::SpinConditional)?;
    let space = spec.space();
    let free = Operator::number(&space, Label::B)?.scaled(c(-spec.omega, 0.0));

    let b_pos = space.position(Label::B).expect("space has mode b");
    let f = lamb_dicke_diagonal(spec.eta_b, spec.n_max);
    let f_op = Operator::diagonal_from_fn(&space, |multi| c(f[multi[b_pos]], 0.0));
    let b_dag = Operator::creation(&space, Label::B)?;
    let up = Operator::spin_projector(&space, SpinState::Up)?;
    // b̂†F is scaled then symmetrized; multiplying by the 0/1 projector
    // afterwards keeps Hermiticity exact because spin and mode factors commute.
    let x = (&b_dag * &f_op).scaled(c(spec.g_b, 0.0));
    let drive = &(&x + &x.adjoint()) * &up;

    let mut h = &(&free + &drive) + &trilinear_term(&space, spec.xi)?;
    if spec.include_ac_stark {
        if spec.omega <= 0.0 {
            return Err(Error::InvalidParameter(
                "AC-Stark compensation requires omega > 0".into(),
            ));
        }
        h = &h + &up.scaled(c(-spec.g_b * spec.g_b / spec.omega, 0.0));
    }
    Ok(h)
}

/// H_a′ / −H_b′ share this operator: n̂_a + n̂_a n̂_b + n̂_a n̂_c − n̂_b n̂_c,
/// diagonal with exact integer entries.
fn residual_number_terms(space: &HilbertSpace) -> Result<Operator> {
    let a_pos = space.position(Label::A).ok_or(Error::UnknownLabel(Label::A))?;
    let b_pos = space.position(Label::B).ok_or(Error::UnknownLabel(Label::B))?;
    let c_pos = space.position(Label::C).ok_or(Error::UnknownLabel(Label::C))?;
    Ok(Operator::diagonal_from_fn(space, |multi| {
        let (na, nb, nc) = (multi[a_pos], multi[b_pos], multi[c_pos]);
        c((na + na * nb + na * nc) as f64 - (nb * nc) as f64, 0.0)
    }))
}

/// Effective two-mode squeezer obtained by adiabatic elimination of the
/// driven a-mode:
/// H = ω n̂_a − (Ω_aξ/ω)(e^{iφ}b̂†ĉ† + e^{−iφ}b̂ĉ) [+ H_a′],
/// H_a′ = −Ω_a²/ω + (ξ²/ω)(n̂_a + n̂_an̂_b + n̂_an̂_c − n̂_bn̂_c).
pub fn build_effective_tmss(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::EffectiveTmss)?;
    if spec.omega <= 0.0 {
        return Err(Error::InvalidParameter(
            "effective models require omega > 0".into(),
        ));
    }
    let space = spec.space();
    let free = Operator::number(&space, Label::A)?.scaled(c(spec.omega, 0.0));
    let rate = spec.drive_amp * spec.xi / spec.omega;
    let x = (&Operator::creation(&space, Label::B)? * &Operator::creation(&space, Label::C)?)
        .scaled(C64::from_polar(-rate, spec.phi));
    let mut h = &(&free + &x) + &x.adjoint();
    if spec.include_residual {
        let shift = Operator::identity(&space)
            .scaled(c(-spec.drive_amp * spec.drive_amp / spec.omega, 0.0));
        let numbers = residual_number_terms(&space)?.scaled(c(spec.xi * spec.xi / spec.omega, 0.0));
        h = &(&h + &shift) + &numbers;
    }
    Ok(h)
}

/// Effective beam splitter obtained by adiabatic elimination of the driven
/// b-mode:
/// H = −ω n̂_b + (Ω_bξ/ω)(â†ĉe^{iφ} + âĉ†e^{−iφ}) [+ H_b′],
/// H_b′ = Ω_b²/ω − (ξ²/ω)(n̂_a + n̂_an̂_b + n̂_an̂_c − n̂_bn̂_c).
/// Without the residual it commutes with n̂_a + n̂_c exactly.
pub fn build_effective_bs(spec: &HamiltonianSpec) -> Result<Operator> {
    check_kind(spec, HamiltonianKind::EffectiveBs)?;
    if spec.omega <= 0.0 {
        return Err(Error::InvalidParameter(
            "effective models require omega > 0".into(),
        ));
    }
    let space = spec.space();
    let free = Operator::number(&space, Label::B)?.scaled(c(-spec.omega, 0.0));
    let rate = spec.drive_amp * spec.xi / spec.omega;
    let x = (&Operator::creation(&space, Label::A)? * &Operator::annihilation(&space, Label::C)?)
        .scaled(C64::from_polar(rate, spec.phi));
    let mut h = &(&free + &x) + &x.adjoint();
    if spec.include_residual {
        let shift = Operator::identity(&space)
            .scaled(c(spec.drive_amp * spec.drive_amp / spec.omega, 0.0));
        let numbers =
            residual_number_terms(&space)?.scaled(c(-spec.xi * spec.xi / spec.omega, 0.0));
        h = &(&h + &shift) + &numbers;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;

    const TAU: f64 = std::f64::consts::TAU;

    fn elem(h: &Operator, bra: &[(Label, usize)], ket: &[(Label, usize)]) -> C64 {
        let space = h.space();
        let b = StateVector::fock(space, bra, None).unwrap();
        let k = StateVector::fock(space, ket, None).unwrap();
        b.inner(&h.apply(&k).unwrap()).unwrap()
    }

    #[test]
    fn unit_conversion_round_trip() {
        let w = khz_to_rad_per_ms(20.0).unwrap();
        assert!((w - 125.66370614359172).abs() < 1e-12);
        assert_eq!(khz_to_rad_per_ms(0.0).unwrap(), 0.0);
        for v in [0.2, 3.5, 17.0, 20.0] {
            assert!((rad_per_ms_to_khz(khz_to_rad_per_ms(v).unwrap()) - v).abs() < 1e-15);
        }
        assert!(matches!(
            khz_to_rad_per_ms(-1.0),
            Err(Error::NegativeFrequency(_))
        ));
    }

    #[test]
    fn trilinear_matrix_elements() {
        let xi = 0.7;
        let spec = HamiltonianSpec::new(HamiltonianKind::Trilinear, 4).with_xi(xi);
        let h = build_trilinear(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        // ⟨0,1,1|H|1,0,0⟩ = ξ: one a-phonon converts into a (b,c) pair
        let e = elem(&h, &[(Label::B, 1), (Label::C, 1)], &[(Label::A, 1)]);
        assert!((e - C64::new(xi, 0.0)).norm() < 1e-14);
        // ⟨2,0,0|H|1,1,1⟩ = √2 ξ
        let e = elem(
            &h,
            &[(Label::A, 2)],
            &[(Label::A, 1), (Label::B, 1), (Label::C, 1)],
        );
        assert!((e - C64::new(2.0f64.sqrt() * xi, 0.0)).norm() < 1e-14);
        // vacuum is dark
        let vac = StateVector::fock(h.space(), &[], None).unwrap();
        assert!(h.apply(&vac).unwrap().amps().iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn driven_a_limits_and_elements() {
        let spec = HamiltonianSpec::new(HamiltonianKind::DrivenA, 3).with_omega(2.5);
        let h = build_driven_a(&spec).unwrap();
        let n_a = Operator::number(h.space(), Label::A).unwrap().scaled(C64::new(2.5, 0.0));
        assert_eq!(h.matrix().max_abs_diff(n_a.matrix()), 0.0);

        let spec = spec.with_drive(1.3).with_xi(0.2);
        let h = build_driven_a(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        let e = elem(&h, &[(Label::A, 1)], &[]);
        assert!((e - C64::new(1.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn driven_b_detuning_sign_and_phase() {
        let spec = HamiltonianSpec::new(HamiltonianKind::DrivenB, 3).with_omega(4.0);
        let h = build_driven_b(&spec).unwrap();
        let n_b = Operator::number(h.space(), Label::B).unwrap().scaled(C64::new(-4.0, 0.0));
        assert_eq!(h.matrix().max_abs_diff(n_b.matrix()), 0.0);

        let phi = 0.9;
        let spec = spec.with_drive(2.0).with_phi(phi);
        let h = build_driven_b(&spec).unwrap();
        let e = elem(&h, &[(Label::B, 1)], &[]);
        assert!((e - C64::from_polar(2.0, phi)).norm() < 1e-14);
    }

    #[test]
    fn lamb_dicke_identity_at_zero_eta() {
        let f = lamb_dicke_operator(0.0, 10).unwrap();
        let id = Operator::identity(f.space());
        assert_eq!(f.matrix().max_abs_diff(id.matrix()), 0.0);
    }

    #[test]
    fn lamb_dicke_ground_entry() {
        // f_0 = e^{−η²/2} = e^{−0.0018} at η = 0.06
        let f = lamb_dicke_diagonal(0.06, 0);
        assert!((f[0] - (-0.0036f64 / 2.0).exp()).abs() < 1e-15);
        assert!((f[0] - 0.99820).abs() < 1e-5);
    }

    /// Generalized-Laguerre oracle: f_m = e^{−η²/2} L¹_m(η²)/(m+1), with
    /// L¹ computed by the three-term recurrence.
    #[test]
    fn lamb_dicke_matches_laguerre_closed_form() {
        fn laguerre1(m: usize, x: f64) -> f64 {
            let mut lm1 = 1.0; // L¹_0
            if m == 0 {
                return lm1;
            }
            let mut lm = 2.0 - x; // L¹_1
            for k in 1..m {
                let kf = k as f64;
                let next = ((2.0 * kf + 2.0 - x) * lm - (kf + 1.0) * lm1) / (kf + 1.0);
                lm1 = lm;
                lm = next;
            }
            lm
        }
        for &eta in &[0.02, 0.05, 0.06, 0.1] {
            let x: f64 = eta * eta;
            let f = lamb_dicke_diagonal(eta, 20);
            for (m, &fm) in f.iter().enumerate() {
                let oracle = (-x / 2.0).exp() * laguerre1(m, x) / (m as f64 + 1.0);
                assert!(
                    (fm - oracle).abs() < 1e-12,
                    "eta={eta} m={m}: {fm} vs {oracle}"
                );
                assert!(fm.abs() <= 1.0);
            }
        }
    }

    #[test]
    fn spin_conditional_block_structure() {
        let spec = HamiltonianSpec::new(HamiltonianKind::SpinConditional, 3)
            .with_omega(khz_to_rad_per_ms(18.0).unwrap())
            .with_g_b(khz_to_rad_per_ms(5.5).unwrap())
            .with_xi(khz_to_rad_per_ms(0.2).unwrap())
            .with_eta_b(0.06);
        let h = build_spin_conditional(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        let space = h.space();
        let spin_pos = space.position(Label::Spin).unwrap();
        for (i, j, _) in h.matrix().iter() {
            assert_eq!(
                space.multi_index(i)[spin_pos],
                space.multi_index(j)[spin_pos],
                "off-block entry at ({i}, {j})"
            );
        }
        // ↓ block sees no drive: ⟨↓,0,1,0|H|↓,0,0,0⟩ = 0
        let down1 =
            StateVector::fock(space, &[(Label::B, 1)], Some(SpinState::Down)).unwrap();
        let down0 = StateVector::fock(space, &[], Some(SpinState::Down)).unwrap();
        assert_eq!(down1.inner(&h.apply(&down0).unwrap()).unwrap().norm(), 0.0);
        // ↑ block drive element carries the Lamb-Dicke factor f_0
        let up1 = StateVector::fock(space, &[(Label::B, 1)], Some(SpinState::Up)).unwrap();
        let up0 = StateVector::fock(space, &[], Some(SpinState::Up)).unwrap();
        let f0 = lamb_dicke_diagonal(0.06, 3)[0];
        let e = up1.inner(&h.apply(&up0).unwrap()).unwrap();
        assert!((e - C64::new(spec.g_b * f0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ac_stark_shift_value() {
        let g = khz_to_rad_per_ms(6.3).unwrap();
        let w = khz_to_rad_per_ms(15.8).unwrap();
        let base = HamiltonianSpec::new(HamiltonianKind::SpinConditional, 2)
            .with_omega(w)
            .with_g_b(g)
            .with_eta_b(0.05);
        let without = build_spin_conditional(&base).unwrap();
        let with = build_spin_conditional(&base.clone().with_ac_stark(true)).unwrap();
        let diff = &with - &without;
        let space = with.space();
        let up0 = StateVector::fock(space, &[], Some(SpinState::Up)).unwrap();
        let down0 = StateVector::fock(space, &[], Some(SpinState::Down)).unwrap();
        let shift = up0.expectation(&diff).unwrap();
        // −g²/ω = −(2π·6.3)²/(2π·15.8) rad/ms = −2π·(6.3²/15.8) rad/ms
        let expect = -TAU * 6.3 * 6.3 / 15.8;
        assert!((shift.re - expect).abs() < 1e-10);
        assert!(down0.expectation(&diff).unwrap().norm() == 0.0);
    }

    #[test]
    fn effective_tmss_elements_and_conservation() {
        let (omega, drive, xi, phi) = (10.0, 1.5, 0.3, 0.4);
        let spec = HamiltonianSpec::new(HamiltonianKind::EffectiveTmss, 4)
            .with_omega(omega)
            .with_drive(drive)
            .with_xi(xi)
            .with_phi(phi);
        let h = build_effective_tmss(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        // ⟨0,1,1|H|0,0,0⟩ = −(Ω_aξ/ω)e^{iφ}
        let e = elem(&h, &[(Label::B, 1), (Label::C, 1)], &[]);
        assert!((e - C64::from_polar(-drive * xi / omega, phi)).norm() < 1e-14);
        // commutes with n̂_b − n̂_c exactly (pair creation is balanced)
        let space = h.space();
        let d = &Operator::number(space, Label::B).unwrap()
            - &Operator::number(space, Label::C).unwrap();
        let comm = &(&h * &d) - &(&d * &h);
        assert_eq!(comm.inf_norm(), 0.0);
    }

    #[test]
    fn effective_tmss_zero_drive_reduces_to_free_term() {
        let spec = HamiltonianSpec::new(HamiltonianKind::EffectiveTmss, 3).with_omega(7.0);
        let h = build_effective_tmss(&spec).unwrap();
        let n_a = Operator::number(h.space(), Label::A).unwrap().scaled(C64::new(7.0, 0.0));
        assert_eq!(h.matrix().max_abs_diff(n_a.matrix()), 0.0);
    }

    #[test]
    fn effective_bs_elements_and_conservation() {
        let (omega, drive, xi, phi) = (12.0, 2.0, 0.25, 1.1);
        let spec = HamiltonianSpec::new(HamiltonianKind::EffectiveBs, 4)
            .with_omega(omega)
            .with_drive(drive)
            .with_xi(xi)
            .with_phi(phi);
        let h = build_effective_bs(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        // ⟨1,0,0|H|0,0,1⟩ = (Ω_bξ/ω)e^{iφ}
        let e = elem(&h, &[(Label::A, 1)], &[(Label::C, 1)]);
        assert!((e - C64::from_polar(drive * xi / omega, phi)).norm() < 1e-14);
        // hopping conserves n̂_a + n̂_c exactly
        let space = h.space();
        let total = &Operator::number(space, Label::A).unwrap()
            + &Operator::number(space, Label::C).unwrap();
        let comm = &(&h * &total) - &(&total * &h);
        assert_eq!(comm.inf_norm(), 0.0);
    }

    #[test]
    fn residual_terms_differ_by_documented_signs() {
        // H_a′ = −Ω²/ω + (ξ²/ω)(…): vacuum expectation −Ω²/ω
        let spec = HamiltonianSpec::new(HamiltonianKind::EffectiveTmss, 2)
            .with_omega(5.0)
            .with_drive(1.0)
            .with_xi(0.5)
            .with_residual(true);
        let h = build_effective_tmss(&spec).unwrap();
        let vac = StateVector::fock(h.space(), &[], None).unwrap();
        let e = vac.expectation(&h).unwrap();
        assert!((e.re - (-1.0 / 5.0)).abs() < 1e-14);
        // ⟨1,1,0|H_a′ numbers|1,1,0⟩ = (ξ²/ω)(1 + 1 + 0 − 0) = 2ξ²/ω on top of −Ω²/ω
        let psi = StateVector::fock(h.space(), &[(Label::A, 1), (Label::B, 1)], None).unwrap();
        let e = psi.expectation(&h).unwrap();
        assert!((e.re - (5.0 - 1.0 / 5.0 + 2.0 * 0.25 / 5.0)).abs() < 1e-12);

        // H_b′ = +Ω²/ω − (ξ²/ω)(…)
        let spec = HamiltonianSpec::new(HamiltonianKind::EffectiveBs, 2)
            .with_omega(5.0)
            .with_drive(1.0)
            .with_xi(0.5)
            .with_residual(true);
        let h = build_effective_bs(&spec).unwrap();
        let vac = StateVector::fock(h.space(), &[], None).unwrap();
        assert!((vac.expectation(&h).unwrap().re - 1.0 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn validation_and_advisory() {
        let bad = HamiltonianSpec::new(HamiltonianKind::Trilinear, 0);
        assert!(bad.validate().is_err());
        let bad = HamiltonianSpec::new(HamiltonianKind::Trilinear, 4).with_eta_b(1.0);
        assert!(bad.validate().is_err());

        let fig1 = HamiltonianSpec::new(HamiltonianKind::DrivenA, 20)
            .with_omega(khz_to_rad_per_ms(20.0).unwrap())
            .with_drive(khz_to_rad_per_ms(3.5).unwrap())
            .with_xi(khz_to_rad_per_ms(0.2).unwrap());
        assert!(fig1.validate().is_ok());
        assert!(fig1.weak_coupling_advisory().is_none());

        let strained = fig1.with_drive(khz_to_rad_per_ms(8.0).unwrap());
        assert!(strained.weak_coupling_advisory().is_some());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let spec = HamiltonianSpec::new(HamiltonianKind::DrivenA, 2);
        assert!(build_trilinear(&spec).is_err());
        assert!(spec.build().is_ok());
    }
}
