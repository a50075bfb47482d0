//! Small statistics helpers: angle wrapping, percentile bootstrap,
//! two-sample Kolmogorov–Smirnov distance, and the chi-square tail
//! probability via the regularized incomplete gamma function.

use rand::Rng;

use crate::posterior::holevo_variance_of_samples;

/// Wraps an angle to `(−π, π]`.
pub fn wrap_to_signed(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = angle.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r - tau
    } else {
        r
    }
}

/// Linear-interpolation percentile (q in `[0, 1]`) of a sorted slice.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Percentile-bootstrap confidence interval for the Holevo variance of a
/// set of angular errors. Resamples with replacement `resamples` times and
/// returns the `(lo, hi)` quantiles (e.g. 0.025 and 0.975 for 95%).
pub fn bootstrap_holevo_ci<R: Rng + ?Sized>(
    errors: &[f64],
    resamples: usize,
    lo_q: f64,
    hi_q: f64,
    rng: &mut R,
) -> (f64, f64) {
    let n = errors.len();
    let mut stats = Vec::with_capacity(resamples);
    let mut scratch = vec![0.0; n];
    for _ in 0..resamples {
        for slot in scratch.iter_mut() {
            *slot = errors[rng.gen_range(0..n)];
        }
        stats.push(holevo_variance_of_samples(&scratch).expect("resample is nonempty"));
    }
    stats.sort_by(f64::total_cmp);
    (percentile_sorted(&stats, lo_q), percentile_sorted(&stats, hi_q))
}

/// Two-sample Kolmogorov–Smirnov statistic `D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let fa = i as f64 / xs.len() as f64;
        let fb = j as f64 / ys.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Critical value for the two-sample KS test: reject equality at level
/// `alpha` when `D` exceeds this.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Pearson chi-square statistic for observed counts against expected counts.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            debug_assert!(e > 0.0);
            (o - e) * (o - e) / e
        })
        .sum()
}

/// Upper-tail probability `P(X > x)` for a chi-square distribution with
/// `dof` degrees of freedom.
pub fn chi_square_p_value(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_upper(dof as f64 / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma `Q(a, x)`, series for `x < a + 1`
/// and continued fraction otherwise.
pub fn regularized_gamma_upper(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_continued_fraction(a, x)
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7.
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (std::f64::consts::TAU).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut k = a;
    for _ in 0..500 {
        k += 1.0;
        term *= x / k;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_gamma_continued_fraction(a: f64, x: f64) -> f64 {
    // Lentz's method.
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}
