//! Evaluation of L(s, chi), its derivative and logarithmic derivative, the
//! completed function Lambda(s, chi) = q^{s/2} Gamma_R(s + a) L(s, chi), the
//! von Mangoldt coefficients, and the analytic conductor.
//!
//! Everything in the strip goes through the Hurwitz decomposition
//! L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q); the direct Dirichlet series
//! (with an Abel tail correction) is kept as an independent route for
//! cross-checks at Re s > 1.5.

use num_complex::Complex64;

use crate::character::PrimitiveCharacter;
use crate::error::{Error, Result};
use crate::hurwitz::hurwitz_zeta;
use crate::quad::KahanComplex;
use crate::sieve;
use crate::special::{digamma, gamma_r, ln_gamma_r};

/// Distance below which the logarithmic derivative refuses to evaluate.
pub const ZERO_PROXIMITY_TOL: f64 = 1e-8;

/// L(s, chi) through the Hurwitz continuation; entire in s.
pub fn eval_l(s: Complex64, chi: &PrimitiveCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-8 {
        // Each zeta(s, a/q) has a simple pole at s = 1 whose residues cancel
        // in the character sum; evaluate the finite limit by digamma instead.
        let mut acc = KahanComplex::new();
        for a in 1..q {
            let v = chi.eval(a as i64);
            if v.norm_sqr() > 0.0 {
                acc.add(v * digamma(Complex64::new(a as f64 / q as f64, 0.0)));
            }
        }
        return Ok(-acc.value() / q as f64);
    }
    let mut acc = KahanComplex::new();
    for a in 1..q {
        let v = chi.eval(a as i64);
        if v.norm_sqr() > 0.0 {
            acc.add(v * hurwitz_zeta(s, a as f64 / q as f64)?.value);
        }
    }
    Ok((-s * (q as f64).ln()).exp() * acc.value())
}

/// (L, L') in one pass; the derivative uses the term-differentiated
/// Euler-Maclaurin route of the Hurwitz layer.
pub fn eval_l_both(s: Complex64, chi: &PrimitiveCharacter) -> Result<(Complex64, Complex64)> {
    let q = chi.modulus();
    let mut acc = KahanComplex::new();
    let mut dacc = KahanComplex::new();
    for a in 1..q {
        let v = chi.eval(a as i64);
        if v.norm_sqr() > 0.0 {
            let h = hurwitz_zeta(s, a as f64 / q as f64)?;
            acc.add(v * h.value);
            dacc.add(v * h.deriv);
        }
    }
    let lnq = (q as f64).ln();
    let scale = (-s * lnq).exp();
    let l = scale * acc.value();
    let lp = -lnq * l + scale * dacc.value();
    Ok((l, lp))
}

/// L'(s, chi).
pub fn eval_l_prime(s: Complex64, chi: &PrimitiveCharacter) -> Result<Complex64> {
    Ok(eval_l_both(s, chi)?.1)
}

/// L'/L(s, chi). Refuses evaluation when the Newton step |L/L'| signals a
/// zero closer than `ZERO_PROXIMITY_TOL`.
pub fn eval_log_deriv(s: Complex64, chi: &PrimitiveCharacter) -> Result<Complex64> {
    let (l, lp) = eval_l_both(s, chi)?;
    let distance = if lp.norm() > 0.0 { l.norm() / lp.norm() } else { 0.0 };
    if l.norm() == 0.0 || distance < ZERO_PROXIMITY_TOL {
        return Err(Error::ZeroProximity {
            distance,
            tolerance: ZERO_PROXIMITY_TOL,
        });
    }
    Ok(lp / l)
}

/// Direct Dirichlet series with an Abel tail correction; valid (and used as
/// the independent oracle) for Re s > 1.5.
///
/// The partial sum runs over complete periods n <= N; since the character
/// sums to zero over a period, the tail telescopes to
/// -(w1/q) N^{-s} + s (w2/(2q) - w1/2) N^{-s-1} + O(|s|^3 q^2 N^{-Re s - 2})
/// with w_j = sum_{r=1}^{q} chi(r) r^j.
pub fn eval_l_series(s: Complex64, chi: &PrimitiveCharacter) -> Complex64 {
    let q = chi.modulus() as u64;
    let n_terms: u64 = {
        let periods = (50_000 + q - 1) / q;
        periods * q
    };
    let mut acc = KahanComplex::new();
    for n in 1..=n_terms {
        let v = chi.eval(n as i64);
        if v.norm_sqr() > 0.0 {
            acc.add(v * (-s * (n as f64).ln()).exp());
        }
    }
    let mut w1 = Complex64::new(0.0, 0.0);
    let mut w2 = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let v = chi.eval(r as i64);
        w1 += v * r as f64;
        w2 += v * (r * r) as f64;
    }
    let nf = n_terms as f64;
    let n_pow = (-s * nf.ln()).exp();
    let tail = -(w1 / q as f64) * n_pow + s * (w2 / (2.0 * q as f64) - w1 * 0.5) * n_pow / nf;
    acc.value() + tail
}

/// -sum_{2 <= n <= x_max} Lambda_chi(n) n^{-s}: the Dirichlet series of
/// L'/L truncated at x_max. Absolutely convergent for Re s > 1.
pub fn log_deriv_series(s: Complex64, chi: &PrimitiveCharacter, x_max: u64) -> Complex64 {
    let mut acc = KahanComplex::new();
    for c in von_mangoldt_table(x_max, chi) {
        acc.add(c.lambda_chi * (-s * (c.n as f64).ln()).exp());
    }
    -acc.value()
}

/// Lambda(s, chi) = q^{s/2} Gamma_R(s + a) L(s, chi). Underflows to zero for
/// |Im s| beyond ~2500; use `ln_completed` there.
pub fn eval_completed(s: Complex64, chi: &PrimitiveCharacter) -> Result<Complex64> {
    let q = chi.modulus() as f64;
    let a = chi.parity() as f64;
    let l = eval_l(s, chi)?;
    Ok((s * 0.5 * q.ln()).exp() * gamma_r(s + a) * l)
}

/// log Lambda(s, chi) as (log|Lambda|, phase). The phase is assembled from
/// principal branches of the three factors, so it is meaningful modulo 2 pi.
pub fn ln_completed(s: Complex64, chi: &PrimitiveCharacter) -> Result<(f64, f64)> {
    let q = chi.modulus() as f64;
    let a = chi.parity() as f64;
    let l = eval_l(s, chi)?;
    if l.norm() == 0.0 {
        return Err(Error::Domain {
            module: "lfunc",
            message: format!("log of vanishing L at s = {s}"),
        });
    }
    let lg = s * 0.5 * q.ln() + ln_gamma_r(s + a) + Complex64::new(l.norm().ln(), l.arg());
    Ok((lg.re, lg.im))
}

/// Analytic conductor C(t, chi) = q (|it + a| + 3) for degree 1; always >= 3q.
pub fn analytic_conductor(t: f64, chi: &PrimitiveCharacter) -> f64 {
    let a = chi.parity() as f64;
    chi.modulus() as f64 * (t.hypot(a) + 3.0)
}

/// One nonzero von Mangoldt coefficient: n = p^k, Lambda_chi(n) =
/// chi(p)^k log p, together with the classical Lambda(n) = log p.
#[derive(Debug, Clone, Copy)]
pub struct VonMangoldtCoefficient {
    pub n: u64,
    pub lambda_chi: Complex64,
    pub lambda: f64,
}

/// All n <= x_max with Lambda_chi(n) != 0, ascending. Generated by sieve;
/// the coefficient at p^k stores exactly Lambda(n) as its magnitude, so the
/// bound |Lambda_chi(n)| <= Lambda(n) holds by construction.
pub fn von_mangoldt_table(x_max: u64, chi: &PrimitiveCharacter) -> Vec<VonMangoldtCoefficient> {
    sieve::prime_powers_up_to(x_max)
        .into_iter()
        .filter_map(|pp| {
            let unit = chi.eval(pp.n as i64); // chi(p^k) = chi(p)^k
            if unit.norm_sqr() > 0.0 {
                Some(VonMangoldtCoefficient {
                    n: pp.n,
                    lambda_chi: unit * pp.log_p,
                    lambda: pp.log_p,
                })
            } else {
                None
            }
        })
        .collect()
}

/// Chunked variant for x_max beyond the table memory budget.
pub fn von_mangoldt_for_each<F: FnMut(VonMangoldtCoefficient)>(
    x_max: u64,
    chi: &PrimitiveCharacter,
    mut f: F,
) {
    sieve::for_each_prime_power_chunked(x_max, 1 << 22, |pp| {
        let unit = chi.eval(pp.n as i64);
        if unit.norm_sqr() > 0.0 {
            f(VonMangoldtCoefficient {
                n: pp.n,
                lambda_chi: unit * pp.log_p,
                lambda: pp.log_p,
            });
        }
    });
}

/// Riemann zeta at a real point > 1 (used by the coefficient bound checks).
pub fn zeta_real(x: f64) -> f64 {
    hurwitz_zeta(Complex64::new(x, 0.0), 1.0)
        .expect("x > 1 is off the pole")
        .value
        .re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi4() -> PrimitiveCharacter {
        PrimitiveCharacter::by_index(4, 1).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn catalan_constant() {
        // Independent oracle: G = sum (-1)^k (2k+1)^{-2} with the alternating
        // series error bound.
        let mut g = 0.0;
        let k_max = 100_000i64;
        for k in (0..k_max).rev() {
            let term = 1.0 / ((2 * k + 1) * (2 * k + 1)) as f64;
            g += if k % 2 == 0 { term } else { -term };
        }
        let bound = 1.0 / ((2 * k_max + 1) * (2 * k_max + 1)) as f64;
        let l = eval_l(c(2.0, 0.0), &chi4()).unwrap();
        assert!((l.re - g).abs() < bound + 1e-12, "L(2,chi4)={} oracle={g}", l.re);
        assert!(l.im.abs() < 1e-14);
        // Reference digits of the Catalan constant as a second anchor.
        assert!((l.re - 0.915_965_594_177_219).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_route_matches_series_route() {
        let chi = chi4();
        for &(re, im) in &[(1.6, 0.0), (1.8, 7.3), (2.5, -20.0), (3.0, 100.0)] {
            let s = c(re, im);
            let a = eval_l(s, &chi).unwrap();
            let b = eval_l_series(s, &chi);
            assert!((a - b).norm() < 1e-10, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn log_bound_in_absolute_convergence_region() {
        // |log|L(s)|| <= log zeta(Re s) for Re s >= 3/2.
        let chi = chi4();
        for &re in &[1.5, 2.0, 3.0] {
            let bound = zeta_real(re).ln();
            for i in 0..20 {
                let s = c(re, i as f64 * 1.7);
                let l = eval_l(s, &chi).unwrap().norm().ln();
                assert!(l.abs() <= bound + 1e-12, "s={s} log|L|={l} bound={bound}");
            }
        }
    }

    #[test]
    fn log_deriv_matches_sieve_series() {
        let chi = chi4();
        let lhs = eval_log_deriv(c(2.0, 0.0), &chi).unwrap();
        let rhs = log_deriv_series(c(2.0, 0.0), &chi, 1_000_000);
        // Truncation bound: sum_{n > 1e6} Lambda(n)/n^2 <= (log 1e6 + 1)/1e6.
        let trunc = (1e6f64.ln() + 1.0) / 1e6;
        assert!((lhs - rhs).norm() < trunc + 1e-12);
    }

    #[test]
    fn functional_equation_residual() {
        for q in [3u32, 4, 5, 7, 8] {
            for chi in PrimitiveCharacter::enumerate(q).unwrap() {
                let kappa = chi.root_number();
                for &(re, im) in &[(0.7, 5.0), (0.3, -2.0), (1.2, 11.0), (0.5, 0.7)] {
                    let s = c(re, im);
                    let lhs = eval_completed(s, &chi).unwrap();
                    let rhs = kappa * eval_completed(Complex64::new(1.0, 0.0) - s.conj(), &chi).unwrap().conj();
                    assert!(
                        (lhs - rhs).norm() <= 1e-9 * lhs.norm(),
                        "q={q} idx={} s={s}: residual {:e}",
                        chi.index(),
                        (lhs - rhs).norm() / lhs.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn completed_real_on_critical_line_after_rotation() {
        for q in [3u32, 5] {
            for chi in PrimitiveCharacter::enumerate(q).unwrap() {
                let rot = chi.rotation();
                for i in 0..25 {
                    let t = -12.0 + i as f64;
                    let z = rot * eval_completed(c(0.5, t), &chi).unwrap();
                    assert!(z.im.abs() <= 1e-9 * (1.0 + z.norm()), "q={q} t={t}");
                }
            }
        }
    }

    #[test]
    fn no_zero_of_completed_function_at_edge_points() {
        // Axiom smoke test: Lambda(s, chi) has no zeros at s = 0 and s = 1.
        // At s = 1 that is |L(1)| > 0 directly. At s = 0 the statement is
        // about the completed function: for odd chi it is |L(0)| > 0, while
        // for even chi L itself has a trivial zero at 0 that the Gamma_R pole
        // cancels, so the check is |L'(0)| > 0 there.
        for q in [3u32, 4, 5] {
            for chi in PrimitiveCharacter::enumerate(q).unwrap() {
                assert!(eval_l(c(1.0, 0.0), &chi).unwrap().norm() > 1e-6);
                if chi.parity() == 1 {
                    assert!(eval_l(c(0.0, 0.0), &chi).unwrap().norm() > 1e-6);
                } else {
                    assert!(eval_l(c(0.0, 0.0), &chi).unwrap().norm() < 1e-12);
                    assert!(eval_l_prime(c(0.0, 0.0), &chi).unwrap().norm() > 1e-6);
                }
            }
        }
    }

    #[test]
    fn l_at_one_branch_consistent_with_nearby() {
        // The digamma branch at s = 1 must join continuously with the Hurwitz
        // route just off the point.
        let chi = chi4();
        let at = eval_l(c(1.0, 0.0), &chi).unwrap();
        let near = eval_l(c(1.0 + 2e-7, 0.0), &chi).unwrap();
        assert!((at - near).norm() < 1e-5);
        // And L(1, chi4) = pi/4 classically.
        assert!((at.re - std::f64::consts::PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn conductor_values() {
        let chi4 = chi4();
        assert_eq!(analytic_conductor(0.0, &chi4), 16.0);
        let chi3 = PrimitiveCharacter::by_index(3, 1).unwrap();
        assert_eq!(analytic_conductor(0.0, &chi3), 12.0);
        let chi5_even = PrimitiveCharacter::enumerate(5)
            .unwrap()
            .into_iter()
            .find(|c| c.parity() == 0)
            .unwrap();
        assert_eq!(analytic_conductor(4.0, &chi5_even), 35.0);
        // Monotone in t >= 0.
        let mut prev = 0.0;
        for i in 0..100 {
            let c = analytic_conductor(i as f64 * 0.37, &chi4);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn von_mangoldt_table_contents() {
        let chi = chi4();
        let table = von_mangoldt_table(100, &chi);
        // n = 8: chi(2)^3 log 2 = 0 since 2 | 4; so 8 is absent here.
        assert!(table.iter().all(|c| c.n % 2 != 0));
        // For q = 5 and n = 8 the value is chi(2)^3 log 2 = chi(8) log 2.
        let chi5 = PrimitiveCharacter::enumerate(5).unwrap()[0].clone();
        let t5 = von_mangoldt_table(10, &chi5);
        let at8 = t5.iter().find(|c| c.n == 8).unwrap();
        let expect = chi5.eval(2).powu(3) * 2.0f64.ln();
        assert!((at8.lambda_chi - expect).norm() < 1e-14);
        // n = 6 is not a prime power: never present.
        assert!(!t5.iter().any(|c| c.n == 6));
    }

    #[test]
    fn coefficient_bound_exact() {
        let chi = chi4();
        for c in von_mangoldt_table(100_000, &chi) {
            assert!(c.lambda_chi.norm() <= c.lambda * (1.0 + 4.0 * f64::EPSILON));
        }
    }

    #[test]
    fn coefficient_sum_matches_psi_oracle() {
        // sum_{n <= 1e4} |Lambda_chi(n)| equals psi(1e4) minus the prime
        // powers sharing a factor with q.
        let chi = chi4();
        let sum: f64 = von_mangoldt_table(10_000, &chi).iter().map(|c| c.lambda).sum();
        let psi = sieve::chebyshev_psi(10_000);
        // Remove powers of 2 up to 1e4: 2,4,...,8192 -> 13 terms of log 2.
        let expected = psi - 13.0 * 2.0f64.ln();
        assert!((sum - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_proximity_guard() {
        // First zero of L(s, chi4) is near 1/2 + 6.0209 i; directly on top of
        // it the Newton distance collapses.
        let chi = chi4();
        let near = eval_log_deriv(c(0.5, 6.020_948_6), &chi);
        match near {
            Err(Error::ZeroProximity { distance, .. }) => assert!(distance < 1e-6),
            Ok(_) => {
                // Not exactly on the zero: must be at a safe distance.
                let (l, lp) = eval_l_both(c(0.5, 6.020_948_6), &chi).unwrap();
                assert!(l.norm() / lp.norm() >= ZERO_PROXIMITY_TOL);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn chunked_table_matches_direct() {
        let chi = chi4();
        let direct = von_mangoldt_table(5000, &chi);
        let mut chunked = Vec::new();
        von_mangoldt_for_each(5000, &chi, |c| chunked.push(c));
        assert_eq!(direct.len(), chunked.len());
        for (a, b) in direct.iter().zip(chunked.iter()) {
            assert_eq!(a.n, b.n);
            assert!((a.lambda_chi - b.lambda_chi).norm() < 1e-15);
        }
    }
}
