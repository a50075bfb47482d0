//! Acceptance suite: one test per headline claim, each printing a
//! PASS/FAIL line with the measured numbers.
//!
//! Every tolerance is pinned here, not computed. Seeds are fixed so the
//! whole suite is reproducible bit for bit; statistical checks are sized
//! so that a correct implementation passes with wide margin at these
//! seeds.

use qphase::discrimination::{adaptive_local_run, dolinar_qubit_pair, helstrom_bound, QubitPair};
use qphase::montecarlo::{derive_seed, run_batch, sweep, trial_rng};
use qphase::oracles::{
    canonical_holevo_variance, flat_state, holevo_variance_by_quadrature, optimal_state,
    phase_limits, qpea_error_density, qpea_error_mass, qpea_hwhm,
};
use qphase::policies::{Protocol, ProtocolRun, ProtocolSchedule};
use qphase::posterior::{grid_bayes_posterior, PhasePosterior};
use qphase::stats::{chi_square_p_value, chi_square_statistic, wrap_to_signed};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

#[test]
fn criterion_01_exact_heisenberg_limit() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=200usize {
        let v = canonical_holevo_variance(&optimal_state(n));
        let hl = phase_limits(n).heisenberg;
        worst = worst.max((v - hl).abs());
    }
    println!(
        "criterion 1 [canonical variance of optimal state = tan²(π/(N+2)), N = 1..200]: \
         PASS (worst |Δ| = {worst:.2e}, tolerance 1e-10, {:?})",
        t0.elapsed()
    );
    assert!(worst < 1e-10);
}

#[test]
fn criterion_02_qpea_equals_sql_three_ways() {
    let t0 = Instant::now();
    let batch = run_batch(&Protocol::Qpea { max_level: 5 }, 10_000, 7).unwrap();
    let n = batch.resources();
    assert_eq!(n, 63);
    let analytic = (2 * n + 1) as f64 / (n * n) as f64;

    let in_ci = batch.ci_low <= analytic && analytic <= batch.ci_high;
    let quadrature =
        holevo_variance_by_quadrature(|d| qpea_error_density(d, n as usize + 1), 4096);
    let quad_err = (quadrature - analytic).abs();

    println!(
        "criterion 2 [QPEA K=5: simulated V = {:.5} CI [{:.5}, {:.5}] ∋ (2N+1)/N² = {:.5}; \
         kernel quadrature Δ = {quad_err:.2e} ≤ 1e-8]: {} ({:?})",
        batch.holevo_variance,
        batch.ci_low,
        batch.ci_high,
        analytic,
        if in_ci && quad_err < 1e-8 { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(in_ci, "analytic value outside the bootstrap CI");
    assert!(quad_err < 1e-8);
}

#[test]
fn criterion_03_qpea_peak_width() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for n in [31usize, 63, 127] {
        let hwhm = qpea_hwhm(n);
        let target = (2.81 / n as f64).powi(2);
        let rel = (hwhm * hwhm / target - 1.0).abs();
        worst = worst.max(rel);
    }
    println!(
        "criterion 3 [kernel HWHM² vs (2.81/N)², N ∈ {{31, 63, 127}}]: PASS \
         (worst relative deviation {worst:.4}, tolerance 0.02, {:?})",
        t0.elapsed()
    );
    assert!(worst <= 0.02);
}

#[test]
fn criterion_04_gqpea_heisenberg_constants() {
    let t0 = Instant::now();
    let family5: Vec<Protocol> = (4..=8)
        .map(|k| Protocol::Gqpea { max_level: k, shots_per_level: 5 })
        .collect();
    let (_, fit5) = sweep(&family5, 3000, 105).unwrap();

    let family6: Vec<Protocol> = (4..=8)
        .map(|k| Protocol::Gqpea { max_level: k, shots_per_level: 6 })
        .collect();
    let (_, fit6) = sweep(&family6, 3000, 106).unwrap();
    let overhead6 = fit6.constant / PI;

    let ok5 = (4.3..=5.3).contains(&fit5.constant);
    let ok6 = (1.4..=1.8).contains(&overhead6);
    println!(
        "criterion 4 [M=5 fixed-slope C = {:.3} ∈ [4.3, 5.3]; M=6 √V·N/π = {:.3} ∈ [1.4, 1.8]]: {} ({:?})",
        fit5.constant,
        overhead6,
        if ok5 && ok6 { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(ok5, "M=5 constant {} out of band", fit5.constant);
    assert!(ok6, "M=6 overhead {overhead6} out of band");
}

#[test]
fn criterion_05_gqpea_small_m_exponents() {
    let t0 = Instant::now();
    let family2: Vec<Protocol> = (4..=8)
        .map(|k| Protocol::Gqpea { max_level: k, shots_per_level: 2 })
        .collect();
    let (_, fit2) = sweep(&family2, 50_000, 52).unwrap();
    let ok2 = (-1.2..=-0.8).contains(&fit2.exponent);
    println!(
        "criterion 5a [M=2 exponent = {:.3} ∈ [-1.2, -0.8]]: {}",
        fit2.exponent,
        if ok2 { "PASS" } else { "FAIL" }
    );

    let family3: Vec<Protocol> = (4..=9)
        .map(|k| Protocol::Gqpea { max_level: k, shots_per_level: 3 })
        .collect();
    let (_, fit3) = sweep(&family3, 3000, 53).unwrap();
    let ok3 = (-1.7..=-1.3).contains(&fit3.exponent);
    println!(
        "criterion 5b [M=3 exponent = {:.3} ∈ [-1.7, -1.3]]: {} ({:?})",
        fit3.exponent,
        if ok3 { "PASS" } else { "FAIL" },
        t0.elapsed()
    );

    assert!(ok2, "M=2 exponent {} out of band", fit2.exponent);
    // Known red. Under the expected-sharpness feedback that reproduces the
    // M = 1, 2, 5, 6 results, the M = 3 total variance keeps slope ≈ −2
    // with √V·N ≈ 10 at every size checked (to N ≈ 5·10⁴); an intermediate
    // N^{-3/2} component of plausible magnitude would stay subdominant in
    // this range. The band is asserted as stated rather than widened.
    assert!(ok3, "M=3 exponent {} out of band", fit3.exponent);
}

#[test]
fn criterion_06_hybrid_intermediate_scaling() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for n in [47u64, 95, 191, 383, 767] {
        let batch = run_batch(
            &Protocol::Hybrid { resources: n, qpea_fraction: 2.0 / 3.0 },
            30_000,
            derive_seed(11, n),
        )
        .unwrap();
        let w = batch.holevo_variance * (n as f64).powf(1.5);
        all_ok &= (4.3..=6.7).contains(&w);
        lines.push(format!("N={n}: {w:.2}"));
    }
    println!(
        "criterion 6 [hybrid V·N^1.5 ∈ [4.3, 6.7]: {}]: {} ({:?})",
        lines.join(", "),
        if all_ok { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(all_ok);
}

#[test]
fn criterion_07_nonadaptive_schedules() {
    let t0 = Instant::now();
    let family: Vec<Protocol> = (4..=8)
        .map(|k| Protocol::Nala { max_level: k, base_shots: 2, ramp: 3.0 })
        .collect();
    let (_, fit) = sweep(&family, 3000, 55).unwrap();
    let ok_nala = (5.8..=7.2).contains(&fit.constant);

    let mut bound_ok = true;
    let mut lines = Vec::new();
    for k in 3..=5u32 {
        let protocol = Protocol::NalaTwoTheta { max_level: k };
        let n = protocol.total_resources();
        let batch = run_batch(&protocol, 1000, derive_seed(70, u64::from(k))).unwrap();
        let bound = (150.0 / n as f64).powi(2);
        bound_ok &= batch.holevo_variance <= bound;
        lines.push(format!(
            "K={k}: V = {:.2e} ≤ {:.2e}",
            batch.holevo_variance, bound
        ));
    }
    println!(
        "criterion 7 [ramped schedule C = {:.3} ∈ [5.8, 7.2]; two-phase bound {}]: {} ({:?})",
        fit.constant,
        lines.join(", "),
        if ok_nala && bound_ok { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(ok_nala, "fixed-slope constant {} out of band", fit.constant);
    assert!(bound_ok);
}

#[test]
fn criterion_08_single_shot_generalization_reproduces_register_algorithm() {
    let t0 = Instant::now();
    let trials = 100_000;
    let batch = run_batch(
        &Protocol::Gqpea { max_level: 4, shots_per_level: 1 },
        trials,
        2024,
    )
    .unwrap();
    let order = batch.resources() as usize + 1;
    let bins = 64;
    let mut observed = vec![0.0; bins];
    for &e in &batch.errors {
        let idx = (((e + PI) / TAU * bins as f64) as usize).min(bins - 1);
        observed[idx] += 1.0;
    }
    let expected: Vec<f64> = (0..bins)
        .map(|i| {
            let a = -PI + TAU * i as f64 / bins as f64;
            let b = -PI + TAU * (i + 1) as f64 / bins as f64;
            trials as f64 * qpea_error_mass(a, b, order)
        })
        .collect();
    let chi2 = chi_square_statistic(&observed, &expected);
    let p = chi_square_p_value(chi2, bins - 1);
    println!(
        "criterion 8 [single-shot generalized algorithm vs exact kernel, 64 bins: \
         χ² = {chi2:.1}, p = {p:.3} > 0.01]: {} ({:?})",
        if p > 0.01 { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(p > 0.01);
}

#[test]
fn criterion_09_posterior_property_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sequences = 500;
    let mut equivariance_checked = 0;
    for _ in 0..sequences {
        let phi = rng.gen::<f64>() * TAU;
        let len = rng.gen_range(1..=20);
        let mut post = PhasePosterior::uniform_prior();
        let mut shots = Vec::with_capacity(len);
        for _ in 0..len {
            let setting = qphase::interferometer::MeasurementSetting {
                passes: [1u32, 2, 4, 8][rng.gen_range(0..4)],
                theta: rng.gen::<f64>() * TAU,
            };
            let u = qphase::interferometer::sample_outcome(phi, &setting, &mut rng);
            post = post.bayes_update(setting.passes, setting.theta, u).unwrap();
            shots.push(qphase::interferometer::Shot { setting, outcome: u });
        }
        let budget: usize = shots.iter().map(|s| s.setting.passes as usize).sum();

        // normalization and harmonic budget
        assert_eq!(post.moment(0), num_complex::Complex64::new(1.0, 0.0));
        assert_eq!(post.max_harmonic(), budget);
        for n in 0..=budget {
            assert!(post.moment(n as i64).norm() <= 1.0 + 1e-12);
        }

        // grid-oracle equivalence
        let oracle = grid_bayes_posterior(&shots, 4096).unwrap();
        for n in 0..=budget {
            assert!(
                (post.moment(n as i64) - oracle.moment(n as i64)).norm() < 1e-8,
                "grid oracle disagrees at harmonic {n}"
            );
        }

        // mixture identity at a random follow-up setting
        let passes = [1u32, 2, 4, 8][rng.gen_range(0..4)];
        let theta = rng.gen::<f64>() * TAU;
        let p0 = post.outcome_probability(passes, theta, 0);
        let p1 = post.outcome_probability(passes, theta, 1);
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
        let post0 = post.bayes_update(passes, theta, 0).unwrap();
        let post1 = post.bayes_update(passes, theta, 1).unwrap();
        for n in 0..=(budget + passes as usize) {
            let mixed = p0 * post0.moment(n as i64) + p1 * post1.moment(n as i64);
            assert!(
                (mixed - post.moment(n as i64)).norm() < 1e-12,
                "mixture identity violated at harmonic {n}"
            );
        }

        // shift equivariance: rebuild from jointly shifted shots
        let delta = rng.gen::<f64>() * TAU;
        let mut shifted = PhasePosterior::uniform_prior();
        for s in &shots {
            shifted = shifted
                .bayes_update(
                    s.setting.passes,
                    (s.setting.theta + f64::from(s.setting.passes) * delta).rem_euclid(TAU),
                    s.outcome,
                )
                .unwrap();
        }
        for n in 0..=budget {
            let rotated = post.moment(n as i64)
                * num_complex::Complex64::from_polar(1.0, n as f64 * delta);
            assert!(
                (shifted.moment(n as i64) - rotated).norm() < 1e-12,
                "shift equivariance violated at harmonic {n}"
            );
        }
        let c1 = post.moment(1).norm();
        if c1 > 0.3 {
            equivariance_checked += 1;
            let mean_shift =
                wrap_to_signed(shifted.circular_mean().unwrap() - post.circular_mean().unwrap() - delta);
            assert!(mean_shift.abs() < 1e-12);
            assert!((shifted.holevo_variance() - post.holevo_variance()).abs() < 1e-12);
        }
    }
    println!(
        "criterion 9 [500 random sequences: grid oracle ≤ 1e-8, exact normalization and \
         harmonic budget, mixture identity ≤ 1e-12, shift equivariance ≤ 1e-12 \
         ({equivariance_checked} sharp-posterior mean/variance checks)]: PASS ({:?})",
        t0.elapsed()
    );
    assert!(equivariance_checked > 300);
}

#[test]
fn criterion_10_discrimination_reaches_helstrom() {
    let t0 = Instant::now();
    let trials = 100_000;
    let mut worst_pull = 0.0f64;
    for (qi, q) in [0.3f64, 0.5].into_iter().enumerate() {
        for copies in 1..=10usize {
            let pair = QubitPair::from_overlap(0.8, q).unwrap();
            let seed = derive_seed(9000, (qi * 16 + copies) as u64);
            let mut errors = 0usize;
            for t in 0..trials {
                let mut rng = trial_rng(seed, t);
                if adaptive_local_run(&pair, copies, &mut rng).is_error() {
                    errors += 1;
                }
            }
            let rate = errors as f64 / trials as f64;
            let bound = helstrom_bound(q, 0.8f64.powi(copies as i32));
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            let pull = ((rate - bound) / sigma).abs();
            worst_pull = worst_pull.max(pull);
            assert!(
                pull <= 3.0,
                "q={q}, copies={copies}: rate {rate} vs bound {bound} ({pull:.2}σ)"
            );
        }
    }

    // The receiver check uses more trials: its target rate is 4.6e-3, so
    // 1e5 trials leave a 4.7% relative σ against a 10% tolerance.
    let setup = dolinar_qubit_pair(2.0, 400).unwrap();
    let seed = derive_seed(9000, 999);
    let dolinar_trials = 400_000;
    let mut errors = 0usize;
    for t in 0..dolinar_trials {
        let mut rng = trial_rng(seed, t);
        if adaptive_local_run(&setup.pair, setup.segments, &mut rng).is_error() {
            errors += 1;
        }
    }
    let rate = errors as f64 / dolinar_trials as f64;
    let rel = (rate - setup.predicted_error).abs() / setup.predicted_error;
    println!(
        "criterion 10 [adaptive local Helstrom ≤ 3σ of bound over q ∈ {{0.3, 0.5}}, M = 1..10 \
         (worst {worst_pull:.2}σ); receiver limit rate {rate:.5} vs {:.5} (rel {rel:.3} ≤ 0.1)]: {} ({:?})",
        setup.predicted_error,
        if rel <= 0.10 { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(rel <= 0.10);
}

/// Exact-binary determinism: dyadic phases are recovered with certainty
/// when the random offset is removed.
#[test]
fn register_algorithm_is_exact_on_dyadic_phases() {
    for k in [2u32, 3] {
        for m in 0..(1u64 << (k + 1)) {
            let phi = m as f64 * PI / (1u64 << k) as f64;
            let mut run = ProtocolRun::new(ProtocolSchedule {
                protocol: Protocol::Qpea { max_level: k },
                theta_init: 0.0,
            })
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m);
            let est = run.run_to_completion(phi, &mut rng).unwrap();
            assert!(
                wrap_to_signed(est - phi).abs() < 1e-9,
                "K={k}, φ={phi}: estimate {est}"
            );
        }
    }
}

/// The flat-state canonical variance route agrees with the kernel
/// quadrature route for every register size used above.
#[test]
fn kernel_and_state_routes_agree() {
    for n in [15usize, 31, 63, 127] {
        let state_route = canonical_holevo_variance(&flat_state(n));
        let kernel_route =
            holevo_variance_by_quadrature(|d| qpea_error_density(d, n + 1), 4096);
        assert!((state_route - kernel_route).abs() < 1e-8);
    }
}
