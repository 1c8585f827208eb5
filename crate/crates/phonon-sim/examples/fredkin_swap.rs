//! Phonon Fredkin gate: a spin-conditional drive on mode `b` swaps the
//! `a` and `c` phonons only when the ion is in |↑⟩, realizing
//! U_F|↑,n,m⟩ = (−i)^{n+m}|↑,m,n⟩ at t_g = π/(2ε_b), ε_b = g_bξ/ω.

use phonon_sim::analytic::{fredkin_apply, gate_time};
use phonon_sim::hamiltonians::{khz_to_rad_per_ms, HamiltonianKind, HamiltonianSpec};
use phonon_sim::propagate::evolve;
use phonon_sim::{HilbertSpace, Label, SpinState, StateVector};

fn main() -> phonon_sim::Result<()> {
    let spec = HamiltonianSpec::new(HamiltonianKind::SpinConditional, 4)
        .with_g_b(khz_to_rad_per_ms(5.5)?)
        .with_xi(khz_to_rad_per_ms(0.2)?)
        .with_omega(khz_to_rad_per_ms(18.0)?)
        .with_eta_b(0.06);
    let h = spec.build()?;
    let t_g = gate_time(spec.g_b * spec.xi / spec.omega)?;
    println!("conditional swap: g_b/2π = 5.5 kHz, ξ/2π = 0.2 kHz, ω/2π = 18 kHz");
    println!("gate time t_g = π/(2ε_b) = {t_g:.4} ms");
    println!();

    let sac = HilbertSpace::new(&[
        (Label::Spin, 2),
        (Label::A, spec.n_max + 1),
        (Label::C, spec.n_max + 1),
    ])?;
    println!(
        "{:<12} {:>22} {:>14}",
        "input", "swapped outcome", "probability"
    );
    for (spin, n, m) in [
        (SpinState::Up, 1, 0),
        (SpinState::Up, 2, 1),
        (SpinState::Up, 1, 1),
        (SpinState::Down, 1, 0),
        (SpinState::Down, 2, 1),
    ] {
        let psi0 = StateVector::fock(h.space(), &[(Label::A, n), (Label::C, m)], Some(spin))?;
        let traj = evolve(&h, &psi0, &[t_g], 1e-9)?;
        // |↑⟩ swaps (a, c); |↓⟩ is a spectator and keeps (n, m).
        let (out_n, out_m) = match spin {
            SpinState::Up => (m, n),
            SpinState::Down => (n, m),
        };
        let target =
            StateVector::fock(&sac, &[(Label::A, out_n), (Label::C, out_m)], Some(spin))?;
        let p = traj.final_state().reduced_fidelity(&target)?;
        let arrow = match spin {
            SpinState::Up => "↑",
            SpinState::Down => "↓",
        };
        println!(
            "|{arrow},{n},{m}⟩ {:>20} {p:>14.6}",
            format!("|{arrow},{out_n},{out_m}⟩"),
        );
    }

    // The ideal-gate phases: U_F acting on a superposition reproduces the
    // (−i)^{n+m} pattern of the closed-form map.
    let plus = {
        let a = StateVector::fock(&sac, &[(Label::A, 1), (Label::C, 0)], Some(SpinState::Up))?;
        let b = StateVector::fock(&sac, &[(Label::A, 0), (Label::C, 2)], Some(SpinState::Up))?;
        let amps = a
            .amps()
            .iter()
            .zip(b.amps())
            .map(|(x, y)| (x + y) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        StateVector::from_amplitudes(sac.clone(), amps)?
    };
    let ideal = fredkin_apply(&plus)?;
    println!();
    println!("ideal U_F on (|↑,1,0⟩ + |↑,0,2⟩)/√2:");
    for (idx, amp) in ideal.amps().iter().enumerate() {
        if amp.norm() > 1e-12 {
            let multi = sac.multi_index(idx);
            println!(
                "  |↑,{},{}⟩: {:+.4} {:+.4}i",
                multi[1], multi[2], amp.re, amp.im
            );
        }
    }
    Ok(())
}
