//! Pearson product-moment correlation with a two-sided Student-t p-value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    /// Infinite when |r| = 1 (serialized as `null`).
    pub t_stat: f64,
    pub p_two_sided: f64,
    pub n: usize,
}

/// Correlation of two equally long series of at least three points, neither
/// constant. Means and co-moments are accumulated in one pass.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2x, mut m2y, mut cxy) = (0.0, 0.0, 0.0);
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let count = (k + 1) as f64;
        let dx = x - mean_x;
        let dy = y - mean_y;
        mean_x += dx / count;
        mean_y += dy / count;
        m2x += dx * (x - mean_x);
        m2y += dy * (y - mean_y);
        cxy += dx * (y - mean_y);
    }
    if m2x == 0.0 || m2y == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let r = (cxy / (m2x.sqrt() * m2y.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let (t_stat, p_two_sided) = if r.abs() == 1.0 {
        (r.signum() * f64::INFINITY, 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        (t, student_t_two_sided(t, df))
    };
    Ok(CorrelationResult {
        r,
        t_stat,
        p_two_sided,
        n,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// `I_x(a, b)` via the continued fraction, using the symmetry
/// `I_x(a, b) = 1 - I_{1-x}(b, a)` where it converges faster.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation (g = 7, 9 terms), with reflection below 0.5.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
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
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `(n, r, p)`: two-sided p-values for Pearson r with n points, computed
    /// by quadrature of the t density (see [`t_tail_by_quadrature`]).
    pub(crate) const P_VALUE_TABLE: &[(usize, f64, f64)] = &[
        (10, 0.632, 0.049_951_112_184_977),
        (5, 0.5, 0.391_002_218_955_771),
        (20, 0.3, 0.198_757_717_344_554),
        (30, -0.45, 0.012_591_071_275_197),
        (100, 0.2, 0.046_036_286_460_054),
        (4, 0.8, 0.2),
        (3, 0.9, 0.287_132_586_257_412),
        (12, 0.0, 1.0),
        (50, 0.7, 1.538_206_628_399e-8),
        (8, 0.95, 0.000_300_898_437_5),
        (1000, 0.05, 0.114_072_595_551_073),
        (15, -0.1, 0.722_897_325_279_118),
    ];

    /// ln Gamma(x2 / 2) for positive integer `x2`, by the recurrence
    /// Gamma(x + 1) = x Gamma(x) down to Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
    fn ln_gamma_half_integer(x2: u32) -> f64 {
        let mut x2 = x2;
        let mut acc = 0.0;
        while x2 > 2 {
            x2 -= 2;
            acc += (x2 as f64 / 2.0).ln();
        }
        acc + if x2 == 1 {
            0.5 * std::f64::consts::PI.ln()
        } else {
            0.0
        }
    }

    /// Two-sided tail mass of Student's t by composite Simpson quadrature of
    /// the density over `[|t|, inf)`, mapped to `[0, 1)` by `x = |t| + s/(1-s)`.
    pub(crate) fn t_tail_by_quadrature(t: f64, df: u32) -> f64 {
        let nu = df as f64;
        let norm = (ln_gamma_half_integer(df + 1) - ln_gamma_half_integer(df)).exp()
            / (nu * std::f64::consts::PI).sqrt();
        let density = |x: f64| norm * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
        let g = |s: f64| {
            let x = t.abs() + s / (1.0 - s);
            density(x) / ((1.0 - s) * (1.0 - s))
        };
        let upper = 1.0 - 1e-9;
        let steps = 200_000;
        let h = upper / steps as f64;
        let mut sum = g(0.0) + g(upper);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * g(k as f64 * h);
        }
        2.0 * sum * h / 3.0
    }

    #[test]
    fn frozen_table_agrees_with_quadrature() {
        for &(n, r, p) in P_VALUE_TABLE {
            let df = (n - 2) as u32;
            let t: f64 = r * (df as f64 / (1.0 - r * r)).sqrt();
            let q = t_tail_by_quadrature(t, df);
            assert!(
                (q - p).abs() < 1e-7,
                "n={n} r={r}: quadrature {q} vs table {p}"
            );
        }
    }

    #[test]
    fn p_values_match_table() {
        for &(n, r, p) in P_VALUE_TABLE {
            let df = (n - 2) as f64;
            let t = r * (df / (1.0 - r * r)).sqrt();
            let got = student_t_two_sided(t, df);
            assert!((got - p).abs() < 1e-6, "n={n} r={r}: {got} vs {p}");
        }
    }

    #[test]
    fn hand_computed_r() {
        let c = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((c.r - 0.8).abs() < 1e-15);
        assert!((c.p_two_sided - 0.2).abs() < 1e-12);
    }

    #[test]
    fn perfect_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let c = pearson(&xs, &ys).unwrap();
        assert_eq!(c.r, 1.0);
        assert_eq!(c.p_two_sided, 0.0);
        assert!(c.t_stat.is_infinite());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewPoints(2))
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ConstantSeries)
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(Error::ConstantSeries)
        ));
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn p_decreases_with_r_on_grid() {
        for n in [4usize, 10, 30, 200] {
            let df = (n - 2) as f64;
            let mut last = f64::INFINITY;
            for k in 0..99 {
                let r = k as f64 / 100.0;
                let p = student_t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df);
                assert!(p < last || (k == 0 && p == 1.0), "n={n} r={r}");
                last = p;
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_in_arguments(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..50)) {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let (Ok(a), Ok(b)) = (pearson(&xs, &ys), pearson(&ys, &xs)) {
                prop_assert!((a.r - b.r).abs() < 1e-12);
                prop_assert!(a.r.abs() <= 1.0);
                prop_assert!((0.0..=1.0).contains(&a.p_two_sided));
            }
        }
    }
}
