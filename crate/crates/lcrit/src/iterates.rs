//! Iterates of the argument function:
//!
//!   S_{n,sigma}(t) = -(1/pi) Im{ (i^n/n!) int_sigma^infty (u-sigma)^n (L'/L)(u+it) du },  n >= 0
//!   S_{-1,sigma}(t) = (1/pi) Re (L'/L)(sigma+it)
//!
//! The integral is split at u0 = 4 into adaptive Gauss-Kronrod quadrature on
//! [sigma, u0] plus a termwise analytic tail on [u0, infty): swapping sum and
//! integral (absolute convergence for Re s > 1) each Dirichlet term closes as
//! an upper incomplete gamma,
//!
//!   int_{u0}^infty (u-sigma)^n m^{-u-it} du = m^{-it} m^{-sigma} Gamma(n+1, b log m)/(log m)^{n+1},
//!
//! b = u0 - sigma, and the series is truncated once the classical-Lambda
//! majorant bound of the remainder is below 1e-12.

use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::character::PrimitiveCharacter;
use crate::error::{Error, Result};
use crate::lfunc::{eval_log_deriv, von_mangoldt_table};
use crate::quad::{integrate, KahanComplex};
use crate::special::{factorial, upper_incomplete_gamma_int};

/// Split point between quadrature and the analytic tail. The tail series
/// decays like Lambda(m) m^{-u0}; at u0 = 4 the 1e-12 truncation target is
/// reached near m ~ 1e5, whereas the absolute-convergence edge u0 = 3/2
/// would need astronomically many terms.
pub const SPLIT_U0: f64 = 4.0;

/// Tail truncation target.
const TAIL_TOL: f64 = 1e-12;

/// Quadrature absolute tolerance on [sigma, u0].
const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct IterateValue {
    pub n: i32,
    pub sigma: f64,
    pub t: f64,
    pub value: f64,
    /// Covers quadrature error and tail truncation.
    pub error_estimate: f64,
    /// Set when the half-limit convention produced the value.
    pub at_zero_ordinate: bool,
}

struct TailEntry {
    ln_n: f64,
    /// Lambda_chi(n) = unit * log_p with |unit| = 1.
    unit: Complex64,
    log_p: f64,
}

struct TailTable {
    x_max: u64,
    entries: Vec<TailEntry>,
}

fn build_table(chi: &PrimitiveCharacter, x_max: u64) -> TailTable {
    let entries = von_mangoldt_table(x_max, chi)
        .into_iter()
        .map(|c| TailEntry {
            ln_n: (c.n as f64).ln(),
            unit: c.lambda_chi / c.lambda,
            log_p: c.lambda,
        })
        .collect();
    TailTable { x_max, entries }
}

type TableCache = Mutex<HashMap<(u32, u32), Arc<TailTable>>>;
static TABLES: OnceLock<TableCache> = OnceLock::new();

fn table_for(chi: &PrimitiveCharacter, x_max: u64) -> Arc<TailTable> {
    let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (chi.modulus(), chi.index());
    let mut guard = cache.lock().expect("tail table lock");
    match guard.get(&key) {
        Some(t) if t.x_max >= x_max => Arc::clone(t),
        _ => {
            let t = Arc::new(build_table(chi, x_max));
            guard.insert(key, Arc::clone(&t));
            t
        }
    }
}

/// Truncation point: smallest power-of-two M with the majorant remainder
/// bound (n+1) b^n / ln M * M^{1-u0} (ln M/(u0-1) + (u0-1)^{-2}) below tol,
/// also at least e^{n/b} so the incomplete-gamma terms are in their
/// decreasing regime.
fn tail_cutoff(n: u32, b: f64, u0: f64, tol: f64) -> u64 {
    let mut m = 1024u64;
    loop {
        let mf = m as f64;
        let lead = (n as f64 + 1.0) * b.powi(n as i32) / mf.ln();
        let integral = mf.powf(1.0 - u0) * (mf.ln() / (u0 - 1.0) + 1.0 / ((u0 - 1.0) * (u0 - 1.0)));
        if lead * integral < tol && mf > (n as f64 / b).exp() {
            return m;
        }
        m *= 2;
        if m > (1 << 24) {
            return m;
        }
    }
}

/// The analytic tail int_{u0}^infty (u-sigma)^n (L'/L)(u+it) du together with
/// its truncation bound, summed over the von Mangoldt table to the tolerance
/// cutoff. Exposed so tests can pit the incomplete-gamma closed form against
/// per-term numerical quadrature at any split point >= 3/2.
pub fn analytic_tail(
    n: u32,
    sigma: f64,
    t: f64,
    chi: &PrimitiveCharacter,
    u0: f64,
    x_max: Option<u64>,
) -> (Complex64, f64) {
    let b = u0 - sigma;
    let m_cut = x_max.unwrap_or_else(|| tail_cutoff(n, b, u0, TAIL_TOL));
    let table = table_for(chi, m_cut);
    let mut acc = KahanComplex::new();
    for e in &table.entries {
        if e.ln_n > (m_cut as f64).ln() + 1e-12 {
            break;
        }
        let gamma_term = upper_incomplete_gamma_int(n, b * e.ln_n) / e.ln_n.powi(n as i32 + 1);
        let phase = Complex64::from_polar((-sigma * e.ln_n).exp(), -t * e.ln_n);
        acc.add(e.unit * e.log_p * phase * gamma_term);
    }
    let mf = m_cut as f64;
    let bound = (n as f64 + 1.0) * b.powi(n as i32) / mf.ln()
        * mf.powf(1.0 - u0)
        * (mf.ln() / (u0 - 1.0) + 1.0 / ((u0 - 1.0) * (u0 - 1.0)));
    (-acc.value(), bound)
}

/// Shared evaluation context at fixed (chi, t): caches L'/L(u + it) keyed on
/// the u node so the quadratures for different n reuse each other's values.
pub struct IterateEvaluator<'a> {
    chi: &'a PrimitiveCharacter,
    t: f64,
    cache: RefCell<HashMap<u64, Complex64>>,
}

impl<'a> IterateEvaluator<'a> {
    pub fn new(chi: &'a PrimitiveCharacter, t: f64) -> Self {
        Self {
            chi,
            t,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn log_deriv(&self, u: f64) -> Result<Complex64> {
        let key = u.to_bits();
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = eval_log_deriv(Complex64::new(u, self.t), self.chi)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// S_{n,sigma}(t) for n >= -1.
    pub fn s(&self, n: i32, sigma: f64) -> Result<IterateValue> {
        validate_params(n, sigma)?;
        if n == -1 {
            let ld = eval_log_deriv(Complex64::new(sigma, self.t), self.chi)?;
            return Ok(IterateValue {
                n,
                sigma,
                t: self.t,
                value: ld.re / PI,
                error_estimate: 1e-13 * (1.0 + ld.norm()),
                at_zero_ordinate: false,
            });
        }
        let n_u = n as u32;
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |u: f64| -> Complex64 {
            match self.log_deriv(u) {
                Ok(v) => (u - sigma).powi(n) * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let (quad_val, quad_err) = integrate(integrand, sigma, SPLIT_U0, QUAD_TOL, 2048)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let (tail, tail_bound) = analytic_tail(n_u, sigma, self.t, self.chi, SPLIT_U0, None);
        let rotate = match n.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let nf = factorial(n_u);
        let value = -(rotate * (quad_val + tail)).im / (PI * nf);
        Ok(IterateValue {
            n,
            sigma,
            t: self.t,
            value,
            error_estimate: (quad_err + tail_bound) / (PI * nf),
            at_zero_ordinate: false,
        })
    }
}

fn validate_params(n: i32, sigma: f64) -> Result<()> {
    if n < -1 {
        return Err(Error::Domain {
            module: "iterates",
            message: format!("n = {n} below -1"),
        });
    }
    let lo_open = n == -1 || n == 0;
    let ok = if lo_open {
        sigma > 0.5 && sigma <= 1.0
    } else {
        (0.5..=1.0).contains(&sigma)
    };
    if !ok {
        return Err(Error::Domain {
            module: "iterates",
            message: format!(
                "sigma = {sigma} outside {} for n = {n}",
                if lo_open { "(1/2, 1]" } else { "[1/2, 1]" }
            ),
        });
    }
    Ok(())
}

/// One-shot S_{n,sigma}(t).
pub fn s_iterate(n: i32, sigma: f64, t: f64, chi: &PrimitiveCharacter) -> Result<IterateValue> {
    IterateEvaluator::new(chi, t).s(n, sigma)
}

/// Half-limit convention at a zero ordinate:
/// lim_{eps->0} (S_0(gamma+eps) + S_0(gamma-eps))/2 by Richardson
/// extrapolation over eps in {1e-2, 5e-3, 2.5e-3}.
pub fn s_half_limit(sigma: f64, gamma: f64, chi: &PrimitiveCharacter) -> Result<IterateValue> {
    validate_params(0, sigma)?;
    let eps = [1e-2, 5e-3, 2.5e-3];
    let mut avg = [0.0; 3];
    for (i, &e) in eps.iter().enumerate() {
        let plus = s_iterate(0, sigma, gamma + e, chi)?.value;
        let minus = s_iterate(0, sigma, gamma - e, chi)?.value;
        avg[i] = 0.5 * (plus + minus);
    }
    // Quadratic model A(eps) = A0 + c1 eps + c2 eps^2 on the 2:1 ladder.
    let extrap = (8.0 * avg[2] - 6.0 * avg[1] + avg[0]) / 3.0;
    let d1 = (avg[1] - avg[0]).abs();
    let d2 = (avg[2] - avg[1]).abs();
    if d2 > 0.75 * d1 + 1e-9 {
        return Err(Error::NonConvergentExtrapolation {
            samples: avg.to_vec(),
        });
    }
    Ok(IterateValue {
        n: 0,
        sigma,
        t: gamma,
        value: extrap,
        error_estimate: d2.max(1e-12),
        at_zero_ordinate: true,
    })
}
