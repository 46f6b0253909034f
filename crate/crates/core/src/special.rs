//! Riemann zeta function and the Bose functions `F_σ(x) = Σ_n n^{-σ} e^{-nx}`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Below this argument the Bose function is evaluated from its expansion
/// around `x = 0` (radius of convergence `2π`); above it the series in `n`
/// converges geometrically.
const SMALL_X: f64 = 0.5;
const EM_TERMS: usize = 20;

// B_2, B_4, ..., B_24
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Euler–Maclaurin summation, valid for `s > 0`, `s != 1`.
fn zeta_em(s: f64) -> f64 {
    let n = EM_TERMS as f64;
    let mut sum: f64 = (1..EM_TERMS).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) and (2k)!
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let term = b / factorial * rising * power;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * (k as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        factorial *= (m + 1.0) * (m + 2.0);
        power /= n * n;
    }
    sum
}

/// Riemann zeta function for real `s != 1`; negative arguments go through the
/// functional equation.
pub fn zeta(s: f64) -> Result<f64> {
    if !s.is_finite() || s == 1.0 {
        return Err(Error::Domain(format!("zeta is undefined at {s}")));
    }
    if s >= 0.5 {
        return Ok(zeta_em(s));
    }
    if s == s.floor() && s < 0.0 && (s as i64) % 2 == 0 {
        return Ok(0.0);
    }
    if s == 0.0 {
        return Ok(-0.5);
    }
    let reflected = 1.0 - s;
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(reflected) * zeta_em(reflected))
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Expansion around `x = 0`:
/// `F_σ(x) = Γ(1-σ) x^{σ-1} + Σ_k ζ(σ-k) (-x)^k / k!` for non-integer `σ`,
/// with the `k = σ - 1` term replaced by `(-x)^{σ-1}/(σ-1)! (H_{σ-1} - ln x)` for integer `σ`.
fn small_x(sigma: f64, x: f64) -> Result<f64> {
    let integer = sigma == sigma.round();
    let special = if integer { Some(sigma as i64 - 1) } else { None };
    let mut sum = match special {
        Some(_) => 0.0,
        None => gamma(1.0 - sigma) * x.powf(sigma - 1.0),
    };
    let mut power: f64 = 1.0; // (-x)^k / k!
    // ζ vanishes at negative even integers, so wait for two small terms in a row
    let mut small_run = 0;
    for k in 0..200usize {
        let term = match special {
            Some(m) if m >= 0 && k as i64 == m => {
                // (-x)^m / m! (H_m - ln x)
                power * (harmonic(k) - x.ln())
            }
            _ => zeta(sigma - k as f64)? * power,
        };
        sum += term;
        if k > sigma as usize + 2 && term.abs() < 1e-18 * sum.abs().max(1e-300) {
            small_run += 1;
            if small_run == 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        power *= -x / (k as f64 + 1.0);
    }
    Ok(sum)
}

/// `F_σ(x) = Σ_{n≥1} n^{-σ} e^{-nx}` for `x ≥ 0`; `F_σ(0) = ζ(σ)` needs `σ > 1`.
pub fn polylog_f(sigma: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("F_{sigma}({x}) needs x >= 0")));
    }
    if x == 0.0 {
        if sigma <= 1.0 {
            return Err(Error::Domain(format!("F_{sigma}(0) diverges for sigma <= 1")));
        }
        return zeta(sigma);
    }
    if x < SMALL_X {
        return small_x(sigma, x);
    }
    let q = (-x).exp();
    let mut sum = 0.0;
    let mut qn = 1.0;
    for n in 1..100_000usize {
        qn *= q;
        let term = (n as f64).powf(-sigma) * qn;
        sum += term;
        // remaining terms are bounded by a geometric series
        if term * q / (1.0 - q) < 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_zeta_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-14);
        assert!((zeta(2.5).unwrap() - 1.341_487_257_250_917_2).abs() < 1e-14);
        assert!((zeta(0.5).unwrap() + 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!((zeta(-1.0).unwrap() + 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(zeta(-2.0).unwrap(), 0.0);
        assert!((zeta(-3.0).unwrap() - 1.0 / 120.0).abs() < 1e-15);
        assert!((zeta(-0.5).unwrap() + 0.207_886_224_977_354_57).abs() < 1e-14);
        assert!(zeta(1.0).is_err());
    }

    // direct summation of a million terms plus the integral tail bound
    fn brute_zeta(s: f64) -> f64 {
        let n = 1_000_000usize;
        let head: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
        let nf = n as f64;
        head + nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s)
    }

    #[test]
    fn zeta_against_series_oracle() {
        for s in [1.5, 2.5, 3.7] {
            assert!((zeta(s).unwrap() - brute_zeta(s)).abs() < 1e-12, "s={s}");
        }
    }

    fn direct(sigma: f64, x: f64) -> f64 {
        (1..2_000_000).map(|n| (n as f64).powf(-sigma) * (-(n as f64) * x).exp()).sum()
    }

    #[test]
    fn expansion_and_series_agree() {
        for sigma in [0.5, 1.5, 2.5, 1.0, 2.0, 3.0] {
            for x in [1e-4, 1e-2, 0.2, 0.49, 0.5, 0.51, 1.0, 3.0] {
                let got = polylog_f(sigma, x).unwrap();
                let expect = direct(sigma, x);
                assert!((got - expect).abs() < 1e-12 * expect.max(1.0), "σ={sigma} x={x}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn continuous_across_switch() {
        for sigma in [0.5, 1.5, 2.5] {
            let below = small_x(sigma, SMALL_X).unwrap();
            let above = polylog_f(sigma, SMALL_X).unwrap();
            assert!((below - above).abs() < 1e-14, "σ={sigma}");
        }
    }

    #[test]
    fn closed_forms() {
        // F_1(x) = -ln(1 - e^{-x})
        for x in [1e-6, 0.1, 2.0] {
            assert!((polylog_f(1.0, x).unwrap() + (-(-x).exp_m1()).ln()).abs() < 1e-13);
        }
        // leading small-x behaviour F_{3/2}(x) ≈ ζ(3/2) - 2√(πx)
        let x = 1e-8;
        let approx = zeta(1.5).unwrap() - 2.0 * (PI * x).sqrt();
        assert!((polylog_f(1.5, x).unwrap() - approx).abs() < 1e-7);
        // first term dominates at large x
        let x = 40.0;
        assert!((polylog_f(2.5, x).unwrap() / (-x as f64).exp() - 1.0).abs() < 1e-15 + 2f64.powf(-2.5) * (-x as f64).exp());
    }

    #[test]
    fn domain_errors() {
        assert!(polylog_f(1.5, -0.1).is_err());
        assert!(polylog_f(1.0, 0.0).is_err());
        assert!(polylog_f(0.5, 0.0).is_err());
        assert!((polylog_f(1.5, 0.0).unwrap() - 2.612_375_348_685_488).abs() < 1e-14);
    }
}
