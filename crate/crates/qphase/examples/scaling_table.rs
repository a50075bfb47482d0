//! Reproduces the headline scaling numbers at desk scale and prints them
//! as a small table.
//!
//! Run with: cargo run --release -p qphase --example scaling_table

use qphase::montecarlo::{derive_seed, run_batch, sweep};
use qphase::oracles::{canonical_holevo_variance, flat_state, optimal_state, phase_limits};
use qphase::policies::Protocol;

fn main() {
    println!("exact references");
    for n in [15usize, 63, 255] {
        let l = phase_limits(n);
        println!(
            "  N={n:>4}: SQL {:.3e}  HL {:.3e}  flat-state {:.3e}",
            l.sql,
            l.heisenberg,
            canonical_holevo_variance(&flat_state(n))
        );
    }
    let v1 = canonical_holevo_variance(&optimal_state(1));
    println!("  optimal state at N=1: V = {v1} (tan² π/3 = 3)");

    println!("\nsimulated protocols (3000 trials per point)");
    let trials = 3000;

    let qpea = run_batch(&Protocol::Qpea { max_level: 5 }, 10_000, 7).unwrap();
    println!(
        "  register algorithm K=5 (N=63): V = {:.4e}, exact (2N+1)/N² = {:.4e}",
        qpea.holevo_variance,
        127.0 / 3969.0
    );

    for m in [2u32, 5, 6] {
        let family: Vec<Protocol> = (4..=8)
            .map(|k| Protocol::Gqpea { max_level: k, shots_per_level: m })
            .collect();
        let (_, fit) = sweep(&family, trials, 100 + u64::from(m)).unwrap();
        println!(
            "  generalized, {m} shots/level: exponent {:+.2}, fixed-slope sqrt(V)·N = {:.2}",
            fit.exponent, fit.constant
        );
    }

    let family: Vec<Protocol> = (4..=8)
        .map(|k| Protocol::Nala { max_level: k, base_shots: 2, ramp: 3.0 })
        .collect();
    let (_, fit) = sweep(&family, trials, 55).unwrap();
    println!(
        "  ramped non-adaptive (2, 3): exponent {:+.2}, fixed-slope sqrt(V)·N = {:.2}",
        fit.exponent, fit.constant
    );

    for n in [47u64, 191, 767] {
        let b = run_batch(
            &Protocol::Hybrid { resources: n, qpea_fraction: 2.0 / 3.0 },
            trials,
            derive_seed(11, n),
        )
        .unwrap();
        println!(
            "  hybrid N={n:>3}: V·N^1.5 = {:.2}",
            b.holevo_variance * (n as f64).powf(1.5)
        );
    }

    let std100 = run_batch(&Protocol::Standard { qubits: 100 }, 10_000, 21).unwrap();
    println!("  standard sweep N=100: V·N = {:.2}", std100.holevo_variance * 100.0);
}
