//! Heisenberg-limited phase estimation with twin Fock inputs: the Fock
//! measurement on mode `c` after the beam splitter carries classical Fisher
//! information 8n(n+1) about λ = εt — quadratic in n, beating the n-phonon
//! shot-noise limit 2n. λ is varied through the drive amplitude at fixed
//! interrogation time, as in the estimation protocol.

use phonon_sim::hamiltonians::{khz_to_rad_per_ms, HamiltonianKind, HamiltonianSpec};
use phonon_sim::metrology::{cfi, closed_form_qfi, ClosedFormQfi, DEFAULT_FD_STEP};
use phonon_sim::propagate::evolve;
use phonon_sim::{Label, StateVector};

fn main() -> phonon_sim::Result<()> {
    let spec = HamiltonianSpec::new(HamiltonianKind::DrivenB, 10)
        .with_drive(khz_to_rad_per_ms(4.5)?)
        .with_xi(khz_to_rad_per_ms(0.2)?)
        .with_omega(khz_to_rad_per_ms(20.0)?);
    let t_f = 1.0;
    let lambda0 = spec.drive_amp * spec.xi / spec.omega * t_f;

    println!("Fock-measurement CFI on mode c from |n,0,n⟩ at λ₀ = {lambda0:.4}");
    println!();
    println!(
        "{:>3} {:>14} {:>14} {:>12} {:>12}",
        "n", "CFI(λ)", "8n(n+1)", "rel. dev", "shot noise"
    );
    for n in 0..=4usize {
        let psi0 = StateVector::fock(&spec.space(), &[(Label::A, n), (Label::C, n)], None)?;
        let model = |lambda: f64| -> phonon_sim::Result<Vec<f64>> {
            let drive = (lambda / t_f) * spec.omega / spec.xi;
            let h = spec.clone().with_drive(drive).build()?;
            let traj = evolve(&h, &psi0, &[t_f], 1e-9)?;
            traj.final_state().mode_distribution(Label::C)
        };
        let est = cfi(&model, lambda0, DEFAULT_FD_STEP)?;
        let target = closed_form_qfi(ClosedFormQfi::BsPhase { n });
        let rel = if target > 0.0 {
            (est.value - target).abs() / target
        } else {
            est.value.abs()
        };
        println!(
            "{n:>3} {:>14.4} {target:>14.1} {rel:>12.2e} {:>12}",
            est.value,
            2 * n,
        );
    }
    Ok(())
}
