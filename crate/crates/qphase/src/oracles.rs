//! Closed-form and exactly computable references.
//!
//! The canonical phase measurement on a symmetric `N`-resource state
//! `Σ ψ_n |n, N−n⟩` produces the error density
//! `f(δ) = (1/2π) |Σ ψ_n e^{inδ}|²`. For real nonnegative amplitudes its
//! sharpness has the closed form `S = Σ ψ_n ψ_{n+1}`, which yields the exact
//! Heisenberg limit `tan²(π/(N+2))` for the optimal state and
//! `(2N+1)/N²` for the flat state. These are the validation targets for the
//! protocol simulations in [`crate::policies`] and [`crate::montecarlo`].

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{PI, TAU};

use crate::posterior::holevo_variance_from_sharpness;

/// Real amplitude vector `ψ_0..ψ_N` over the symmetrized number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    amps: Vec<f64>,
}

impl SymmetricState {
    /// Normalizes `amps` to unit square sum. Panics on an all-zero vector.
    pub fn new(amps: Vec<f64>) -> Self {
        assert!(!amps.is_empty(), "state needs at least one amplitude");
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(norm > 0.0, "state must have a nonzero amplitude");
        Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        }
    }

    /// Total resource count `N` (one less than the number of amplitudes).
    pub fn resources(&self) -> usize {
        self.amps.len() - 1
    }

    /// Normalized amplitudes.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    /// `A(δ) = Σ ψ_n e^{inδ}`, the characteristic polynomial whose squared
    /// magnitude is `2π` times the canonical error density.
    fn characteristic(&self, delta: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, delta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.amps.iter().rev() {
            acc = acc * rot + a;
        }
        acc
    }

    /// Canonical error density at `delta = Φ − φ`.
    pub fn canonical_density(&self, delta: f64) -> f64 {
        self.characteristic(delta).norm_sqr() / TAU
    }
}

/// Minimum-variance input state: `ψ_n ∝ sin[(n+1)π/(N+2)]`.
pub fn optimal_state(resources: usize) -> SymmetricState {
    assert!(resources >= 1);
    let step = PI / (resources + 2) as f64;
    SymmetricState::new((0..=resources).map(|n| ((n + 1) as f64 * step).sin()).collect())
}

/// Flat number distribution: `ψ_n = (N+1)^{-1/2}`.
pub fn flat_state(resources: usize) -> SymmetricState {
    SymmetricState::new(vec![1.0; resources + 1])
}

/// Equal superposition of the extreme number states, `(1, 0, …, 0, 1)/√2`.
/// Maximal Fisher information, divergent Holevo variance for `N ≥ 2`.
pub fn noon_state(resources: usize) -> SymmetricState {
    assert!(resources >= 1);
    let mut amps = vec![0.0; resources + 1];
    amps[0] = 1.0;
    amps[resources] = 1.0;
    SymmetricState::new(amps)
}

/// Sharpness `S = Σ ψ_n ψ_{n+1}` of the canonical measurement.
///
/// Valid for real nonnegative amplitude states (every state used here);
/// general states go through [`holevo_variance_by_quadrature`].
pub fn canonical_sharpness(state: &SymmetricState) -> f64 {
    state
        .amps
        .windows(2)
        .map(|w| w[0] * w[1])
        .sum()
}

/// Holevo variance `S⁻² − 1` of the canonical measurement;
/// `f64::INFINITY` when the sharpness vanishes.
pub fn canonical_holevo_variance(state: &SymmetricState) -> f64 {
    holevo_variance_from_sharpness(canonical_sharpness(state))
}

/// Reference limits for `N` resources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLimits {
    /// Standard quantum limit `1/N`.
    pub sql: f64,
    /// Exact Heisenberg limit `tan²(π/(N+2))`.
    pub heisenberg: f64,
    /// Large-`N` form `(π/N)²`.
    pub heisenberg_asymptotic: f64,
}

/// SQL and Heisenberg-limit variances for `N ≥ 1` resources.
pub fn phase_limits(resources: usize) -> PhaseLimits {
    assert!(resources >= 1);
    let n = resources as f64;
    PhaseLimits {
        sql: 1.0 / n,
        heisenberg: (PI / (n + 2.0)).tan().powi(2),
        heisenberg_asymptotic: (PI / n).powi(2),
    }
}

/// Fejér error kernel `sin²(m δ/2) / (m sin²(δ/2))`, the phase-estimation
/// error distribution of a flat register; normalized over `(−π, π]` with
/// weight `1/2π`. The removable singularity at `δ = 0` evaluates to `m`.
///
/// The kernel order `m` equals the number of register basis states: a run
/// with `N` resources produces the kernel of order `N + 1`.
pub fn qpea_error_density(delta_phi: f64, order: usize) -> f64 {
    assert!(order >= 1);
    let m = order as f64;
    if delta_phi.abs() < 1e-6 {
        // sin(ma)/sin(a) ≈ m(1 − (m²−1)a²/6) with a = δ/2.
        return m * (1.0 - (m * m - 1.0) * delta_phi * delta_phi / 12.0);
    }
    let half = 0.5 * delta_phi;
    (m * half).sin().powi(2) / (m * half.sin().powi(2))
}

/// Exact probability mass of the order-`m` Fejér error kernel on `[a, b]`
/// (with `−π ≤ a ≤ b ≤ π`), via its Fourier series
/// `F_m(x) = Σ_{|j|<m} (1 − |j|/m) e^{ijx}`.
pub fn qpea_error_mass(a: f64, b: f64, order: usize) -> f64 {
    let m = order as f64;
    let mut acc = (b - a) / TAU;
    for j in 1..order {
        let jf = j as f64;
        acc += (1.0 - jf / m) * ((jf * b).sin() - (jf * a).sin()) / (jf * PI);
    }
    acc
}

/// Half-width at half-maximum of [`qpea_error_density`] of order `m`,
/// found by bisection inside the central lobe.
pub fn qpea_hwhm(order: usize) -> f64 {
    let m = order as f64;
    let target = m / 2.0;
    let mut lo = 0.0;
    let mut hi = TAU / m; // first zero of the kernel
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qpea_error_density(mid, order) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Holevo variance of a density on `(−π, π]` given as `2π · f` (a kernel with
/// weight `1/2π`), computed by uniform-grid quadrature. Exact for
/// trigonometric polynomials of degree below `points`.
pub fn holevo_variance_by_quadrature(kernel: impl Fn(f64) -> f64, points: usize) -> f64 {
    let sharpness = moment_by_quadrature(&kernel, points, 1).norm();
    holevo_variance_from_sharpness(sharpness)
}

/// `E[e^{i n δ}]` of a kernel by uniform-grid quadrature.
pub fn moment_by_quadrature(kernel: &impl Fn(f64) -> f64, points: usize, n: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let delta = -PI + TAU * j as f64 / points as f64;
        acc += kernel(delta) * Complex64::from_polar(1.0, n as f64 * delta);
    }
    acc / points as f64
}

/// Total mass of a kernel (should be 1 for a normalized density).
pub fn mass_by_quadrature(kernel: &impl Fn(f64) -> f64, points: usize) -> f64 {
    (0..points)
        .map(|j| kernel(-PI + TAU * j as f64 / points as f64))
        .sum::<f64>()
        / points as f64
}

/// Classical Fisher information of the canonical outcome distribution with
/// respect to the phase, by quadrature of `(∂_φ ln P)² P`.
///
/// The NOON state maximizes this at `N²`; the optimal state reaches about
/// `0.13 N²` (exactly `4 Var(n)`, its quantum Fisher information).
pub fn fisher_information(state: &SymmetricState) -> f64 {
    let n = state.resources();
    if n == 0 {
        return 0.0;
    }
    let points = 1 << 17;
    let mut acc = 0.0;
    for j in 0..points {
        let delta = -PI + TAU * j as f64 / points as f64;
        let a = state.characteristic(delta);
        let norm_sq = a.norm_sqr();
        // A'(δ) = Σ i n ψ_n e^{inδ}
        let mut deriv = Complex64::new(0.0, 0.0);
        for (k, &amp) in state.amplitudes().iter().enumerate() {
            deriv += Complex64::new(0.0, k as f64) * amp * Complex64::from_polar(1.0, k as f64 * delta);
        }
        let g = if norm_sq < 1e-8 {
            // removable singularity: (d|A|²)²/|A|² → 4|A'|²
            4.0 * deriv.norm_sqr()
        } else {
            let d = 2.0 * (deriv * a.conj()).re;
            d * d / norm_sq
        };
        acc += g;
    }
    acc / points as f64
}

/// Inverse sensitivity scale `√F`: the resolvable phase change per shot is
/// `1/√F`. The NOON state reaches `N` on this scale, the optimal state
/// about `0.36 N` — a modest sacrifice in peak sensitivity that buys a
/// finite variance.
pub fn fisher_sensitivity(state: &SymmetricState) -> f64 {
    fisher_information(state).sqrt()
}

/// Inverse-CDF sampler for the canonical error density of a state.
///
/// The error distribution does not depend on the true phase, so one table
/// serves an entire batch of samples.
#[derive(Debug, Clone)]
pub struct CanonicalSampler {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl CanonicalSampler {
    /// Tabulates the CDF on a uniform grid (2¹⁴ points minimum, doubled
    /// until the quadrature normalization error drops below 1e−6).
    pub fn new(state: &SymmetricState) -> Self {
        let mut points = 1 << 14;
        loop {
            let grid: Vec<f64> = (0..=points).map(|j| -PI + TAU * j as f64 / points as f64).collect();
            let density: Vec<f64> = grid.iter().map(|&d| state.canonical_density(d)).collect();
            let mut cdf = Vec::with_capacity(points + 1);
            let mut acc = 0.0;
            cdf.push(0.0);
            for j in 1..=points {
                acc += 0.5 * (density[j - 1] + density[j]) * TAU / points as f64;
                cdf.push(acc);
            }
            let total = cdf[points];
            if (total - 1.0).abs() < 1e-6 || points >= 1 << 20 {
                for v in &mut cdf {
                    *v /= total;
                }
                return Self { grid, cdf };
            }
            points *= 2;
        }
    }

    /// Draws one error `δ = Φ − φ` from the tabulated distribution.
    pub fn sample_error<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c < v);
        if idx == 0 {
            return self.grid[0];
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let (g0, g1) = (self.grid[idx - 1], self.grid[idx]);
        if c1 > c0 {
            g0 + (v - c0) / (c1 - c0) * (g1 - g0)
        } else {
            g0
        }
    }

    /// CDF of the error distribution at `delta`, linearly interpolated.
    pub fn cdf(&self, delta: f64) -> f64 {
        if delta <= self.grid[0] {
            return 0.0;
        }
        if delta >= *self.grid.last().unwrap() {
            return 1.0;
        }
        let step = TAU / (self.grid.len() - 1) as f64;
        let pos = (delta + PI) / step;
        let idx = (pos.floor() as usize).min(self.grid.len() - 2);
        let frac = pos - idx as f64;
        self.cdf[idx] + frac * (self.cdf[idx + 1] - self.cdf[idx])
    }
}

/// Draws one canonical measurement result `Φ ∈ [0, 2π)` for a state with
/// true phase `phi`. Builds a sampler per call; use [`CanonicalSampler`]
/// directly when drawing many samples from one state.
pub fn canonical_sample<R: Rng + ?Sized>(state: &SymmetricState, phi: f64, rng: &mut R) -> f64 {
    let sampler = CanonicalSampler::new(state);
    (phi + sampler.sample_error(rng)).rem_euclid(TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::holevo_variance_of_samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn optimal_state_small_cases() {
        let s1 = optimal_state(1);
        for &a in s1.amplitudes() {
            assert!((a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let s2 = optimal_state(2);
        assert!((s2.amplitudes()[0] - 0.5).abs() < 1e-15);
        assert!((s2.amplitudes()[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s2.amplitudes()[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn states_are_normalized() {
        for n in 1..40 {
            for state in [optimal_state(n), flat_state(n), noon_state(n)] {
                let norm: f64 = state.amplitudes().iter().map(|a| a * a).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimal_state_reaches_heisenberg_limit() {
        for n in 1..=64 {
            let v = canonical_holevo_variance(&optimal_state(n));
            let hl = phase_limits(n).heisenberg;
            assert!((v - hl).abs() < 1e-10, "N = {n}: {v} vs {hl}");
        }
        // N = 1: tan²(π/3) = 3 exactly.
        assert!((canonical_holevo_variance(&optimal_state(1)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_state_variance_matches_quadrature() {
        let state = optimal_state(12);
        let v_closed = canonical_holevo_variance(&state);
        let v_quad = holevo_variance_by_quadrature(|d| TAU * state.canonical_density(d), 1 << 12);
        assert!((v_closed - v_quad).abs() < 1e-10);
    }

    #[test]
    fn flat_state_variance() {
        // S = N/(N+1) → V = (2N+1)/N²; N = 3 gives 7/9.
        let v = canonical_holevo_variance(&flat_state(3));
        assert!((v - 7.0 / 9.0).abs() < 1e-14);

        for n in [63usize, 255] {
            let v = canonical_holevo_variance(&flat_state(n));
            let expect = (2 * n + 1) as f64 / (n * n) as f64;
            assert!((v - expect).abs() < 1e-12);
            assert!((v - 2.0 / n as f64).abs() < 3.0 / (n * n) as f64);
        }
    }

    #[test]
    fn noon_state_variance_diverges() {
        for n in 2..12 {
            assert!(canonical_holevo_variance(&noon_state(n)).is_infinite());
        }
    }

    #[test]
    fn sharpness_matches_cosine_quadrature_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(1..=64);
            let amps: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>()).collect();
            let state = SymmetricState::new(amps);
            let closed = canonical_sharpness(&state);
            let quad = moment_by_quadrature(&|d| TAU * state.canonical_density(d), 1 << 12, 1);
            assert!((closed - quad.re).abs() < 1e-9);
            assert!(quad.im.abs() < 1e-9);
        }
    }

    #[test]
    fn fejer_kernel_normalization_and_peak() {
        for order in [1usize, 2, 31, 64, 128] {
            assert!((qpea_error_density(0.0, order) - order as f64).abs() < 1e-9);
            let mass = mass_by_quadrature(&|d| qpea_error_density(d, order), 4096);
            assert!((mass - 1.0).abs() < 1e-10, "order {order}: mass {mass}");
        }
    }

    #[test]
    fn fejer_kernel_variance_matches_flat_state() {
        // Kernel of order N+1 is the canonical error density of the flat
        // state with N resources: both give (2N+1)/N².
        for n in [3usize, 15, 63] {
            let v_kernel = holevo_variance_by_quadrature(|d| qpea_error_density(d, n + 1), 4096);
            let v_state = canonical_holevo_variance(&flat_state(n));
            assert!((v_kernel - v_state).abs() < 1e-8, "N = {n}");
        }
    }

    #[test]
    fn fejer_mass_matches_quadrature() {
        for order in [5usize, 32] {
            assert!((qpea_error_mass(-PI, PI, order) - 1.0).abs() < 1e-12);
            let (a, b) = (-0.4, 0.7);
            let quad: f64 = (0..20_000)
                .map(|j| {
                    let x = a + (b - a) * (j as f64 + 0.5) / 20_000.0;
                    qpea_error_density(x, order) / TAU * (b - a) / 20_000.0
                })
                .sum();
            assert!((qpea_error_mass(a, b, order) - quad).abs() < 1e-6);
        }
    }

    #[test]
    fn fejer_series_expansion_is_continuous() {
        for order in [7usize, 64] {
            let a = qpea_error_density(9.999e-7, order);
            let b = qpea_error_density(1.0001e-6, order);
            assert!((a - b).abs() < 1e-6 * order as f64);
        }
    }

    #[test]
    fn fisher_information_reference_values() {
        // NOON raw information is N², i.e. N on the sensitivity scale.
        assert!((fisher_information(&noon_state(4)) - 16.0).abs() < 1e-6);
        assert!((fisher_sensitivity(&noon_state(4)) - 4.0).abs() < 1e-6);
        assert_eq!(fisher_information(&SymmetricState::new(vec![1.0])), 0.0);
        let s = fisher_sensitivity(&optimal_state(100));
        assert!((s - 36.0).abs() < 0.05 * 36.0, "got {s}");
    }

    #[test]
    fn limits_table() {
        let l1 = phase_limits(1);
        assert!((l1.heisenberg - 3.0).abs() < 1e-12);
        // (π/N)² agrees with the exact limit to 3% on the deviation scale.
        let l100 = phase_limits(100);
        let ratio = (l100.heisenberg_asymptotic / l100.heisenberg).sqrt();
        assert!((ratio - 1.0).abs() < 0.03);
        assert!((l100.heisenberg_asymptotic / l100.heisenberg - 1.0).abs() < 0.05);
        let mut prev = f64::INFINITY;
        for n in 1..=50 {
            let hl = phase_limits(n).heisenberg;
            assert!(hl < prev);
            prev = hl;
        }
    }

    #[test]
    fn canonical_sampler_matches_expected_variance() {
        let state = optimal_state(10);
        let sampler = CanonicalSampler::new(&state);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let errs: Vec<f64> = (0..100_000).map(|_| sampler.sample_error(&mut rng)).collect();
        let v = holevo_variance_of_samples(&errs).unwrap();
        let expect = (PI / 12.0).tan().powi(2);
        assert!((v - expect).abs() < 0.05 * expect, "{v} vs {expect}");
    }

    #[test]
    fn zero_resource_state_samples_uniformly() {
        let state = SymmetricState::new(vec![1.0]);
        let sampler = CanonicalSampler::new(&state);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let errs: Vec<f64> = (0..50_000).map(|_| sampler.sample_error(&mut rng)).collect();
        // Uniform on (−π, π]: mean resultant length ~ 1/√n.
        let v = holevo_variance_of_samples(&errs).unwrap();
        assert!(v > 1e4);
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn one_shot_sampler_wraps_around_the_true_phase() {
        let state = optimal_state(6);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let phi = rng.gen::<f64>() * TAU;
            let result = canonical_sample(&state, phi, &mut rng);
            assert!((0.0..TAU).contains(&result));
        }
    }

    #[test]
    fn sampler_cdf_tracks_quadrature_cdf() {
        let state = flat_state(63);
        let sampler = CanonicalSampler::new(&state);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut errs: Vec<f64> = (0..100_000).map(|_| sampler.sample_error(&mut rng)).collect();

        // flat-state variance 127/3969 within a few percent at 1e5 samples
        let v = holevo_variance_of_samples(&errs).unwrap();
        let expect = 127.0 / 3969.0;
        assert!((v - expect).abs() < 0.1 * expect, "{v} vs {expect}");

        errs.sort_by(f64::total_cmp);
        let n = errs.len() as f64;
        let mut d_max: f64 = 0.0;
        for (i, &e) in errs.iter().enumerate() {
            let empirical_hi = (i + 1) as f64 / n;
            let empirical_lo = i as f64 / n;
            let model = sampler.cdf(e);
            d_max = d_max.max((empirical_hi - model).abs()).max((model - empirical_lo).abs());
        }
        assert!(d_max < 0.01, "KS distance {d_max}");
    }
}
