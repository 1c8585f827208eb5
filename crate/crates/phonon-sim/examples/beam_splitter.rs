//! Phononic beam splitter: driving mode `b` couples `a` and `c` at rate
//! ε = Ωξ/ω. From |n₁,n₂⟩ the outcome amplitudes are the closed-form
//! C^{n1,n2}_{N1,N2}(εt); at εt = π/4 two single phonons show the
//! Hong-Ou-Mandel dip, and at εt = π/2 the modes swap.

use phonon_sim::analytic::bs_coefficient;
use phonon_sim::hamiltonians::{khz_to_rad_per_ms, HamiltonianKind, HamiltonianSpec};
use phonon_sim::propagate::evolve;
use phonon_sim::{HilbertSpace, Label, StateVector};

fn outcome_probs(
    psi: &phonon_sim::StateVector,
    space: &HilbertSpace,
    pairs: &[(usize, usize)],
) -> phonon_sim::Result<Vec<f64>> {
    pairs
        .iter()
        .map(|&(n1, n2)| {
            let target = StateVector::fock(space, &[(Label::A, n1), (Label::C, n2)], None)?;
            psi.reduced_fidelity(&target)
        })
        .collect()
}

fn main() -> phonon_sim::Result<()> {
    let spec = HamiltonianSpec::new(HamiltonianKind::DrivenB, 8)
        .with_drive(khz_to_rad_per_ms(6.5)?)
        .with_xi(khz_to_rad_per_ms(0.2)?)
        .with_omega(khz_to_rad_per_ms(17.0)?);
    let h = spec.build()?;
    let eps = spec.drive_amp * spec.xi / spec.omega;
    let ac = HilbertSpace::two_modes(Label::A, Label::C, spec.n_max)?;

    // Hong-Ou-Mandel: |1,0,1⟩ at εt = π/4 → p₁₁ = 0, p₂₀ = p₀₂ = 1/2.
    let hom_pairs = [(1, 1), (2, 0), (0, 2)];
    let psi0 = StateVector::fock(h.space(), &[(Label::A, 1), (Label::C, 1)], None)?;
    let t_hom = std::f64::consts::FRAC_PI_4 / eps;
    let traj = evolve(&h, &psi0, &[t_hom], 1e-9)?;
    let probs = outcome_probs(traj.final_state(), &ac, &hom_pairs)?;
    println!("Hong-Ou-Mandel from |1,0,1⟩ at εt = π/4 (t = {t_hom:.3} ms):");
    for (&(n1, n2), &p) in hom_pairs.iter().zip(&probs) {
        let exact = bs_coefficient(1, 1, n1, n2, std::f64::consts::FRAC_PI_4).powi(2);
        println!("  p_{n1}{n2}: {p:.6}   closed form {exact:.6}");
    }

    // Twin pairs |2,0,2⟩ through half-swap and full-swap.
    let pairs = [(2, 2), (3, 1), (1, 3), (4, 0), (0, 4)];
    let psi0 = StateVector::fock(h.space(), &[(Label::A, 2), (Label::C, 2)], None)?;
    for (label, angle) in [("εt = π/4", std::f64::consts::FRAC_PI_4), (
        "εt = π/2 (swap)",
        std::f64::consts::FRAC_PI_2,
    )] {
        let t = angle / eps;
        let traj = evolve(&h, &psi0, &[t], 1e-9)?;
        let probs = outcome_probs(traj.final_state(), &ac, &pairs)?;
        println!();
        println!("|2,0,2⟩ at {label}, t = {t:.3} ms:");
        for (&(n1, n2), &p) in pairs.iter().zip(&probs) {
            let exact = bs_coefficient(2, 2, n1, n2, angle).powi(2);
            println!("  p_{n1}{n2}: {p:.6}   closed form {exact:.6}");
        }
    }
    Ok(())
}
