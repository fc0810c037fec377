//! Primitive Dirichlet characters mod q with exact root-of-unity values.
//!
//! Characters are stored as an exponent table: chi(a) = e^{2 pi i k(a) / R}
//! with integer k(a) and R the value order, so multiplicativity and
//! conjugation are exact integer arithmetic. Principal and imprimitive
//! characters are rejected at construction; the crate works with entire
//! L-functions only.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn euler_phi(mut n: u32) -> u32 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of a mod m (a coprime to m).
fn mult_order(a: u32, m: u32) -> u32 {
    let mut x = a as u64 % m as u64;
    let mut k = 1;
    while x != 1 {
        x = x * a as u64 % m as u64;
        k += 1;
    }
    k
}

/// Smallest primitive root mod p^e for odd prime p.
fn primitive_root_odd_prime_power(p: u32, e: u32) -> u32 {
    let phi_p = p - 1;
    let mut g = 2;
    loop {
        if gcd(g, p) == 1 && mult_order(g, p) == phi_p {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // Lift: g generates mod p^e unless g^{p-1} = 1 mod p^2, in which case g+p does.
    let p2 = (p as u64) * (p as u64);
    if pow_mod(g as u64, (p - 1) as u64, p2) == 1 {
        g += p;
    }
    g
}

/// Structure of (Z/q)* as a product of cyclic groups with explicit generators.
struct UnitGroup {
    /// (generator, order) pairs; the group is the direct product.
    gens: Vec<(u32, u32)>,
    /// Discrete logarithms: dlog[a] = exponent vector of a, None for non-units.
    dlog: Vec<Option<Vec<u32>>>,
}

impl UnitGroup {
    fn new(q: u32) -> Self {
        let mut gens: Vec<(u32, u32)> = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => gens.push((crt_lift(3, pe, q), 2)),
                    _ => {
                        gens.push((crt_lift(pe - 1, pe, q), 2));
                        gens.push((crt_lift(5, pe, q), pe / 4));
                    }
                }
            } else {
                let g = primitive_root_odd_prime_power(p, e);
                gens.push((crt_lift(g, pe, q), euler_phi(pe)));
            }
        }
        // Brute-force discrete logs by enumerating the group.
        let mut dlog: Vec<Option<Vec<u32>>> = vec![None; q as usize];
        let k = gens.len();
        let mut exps = vec![0u32; k];
        loop {
            let mut a = 1u64;
            for (i, &(g, _)) in gens.iter().enumerate() {
                a = a * pow_mod(g as u64, exps[i] as u64, q as u64) % q as u64;
            }
            dlog[a as usize] = Some(exps.clone());
            // Odometer increment over the exponent ranges.
            let mut i = 0;
            loop {
                if i == k {
                    return Self { gens, dlog };
                }
                exps[i] += 1;
                if exps[i] < gens[i].1 {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if k == 0 {
                return Self { gens, dlog };
            }
        }
    }
}

/// Lift x mod pe to the residue mod q that is x mod pe and 1 mod q/pe.
fn crt_lift(x: u32, pe: u32, q: u32) -> u32 {
    let other = q / pe;
    for cand in 0..q {
        if cand % pe == x % pe && (other == 1 || cand % other == 1) {
            return cand;
        }
    }
    unreachable!("crt lift must exist")
}

/// A primitive (non-principal) Dirichlet character mod q, with the data the
/// L-function layer needs: parity, Gauss sum, root number. Degree d = 1 and
/// conductor N = q throughout.
#[derive(Clone)]
pub struct PrimitiveCharacter {
    q: u32,
    index: u32,
    /// chi(a) = e^{2 pi i exps[a] / order_r}; None encodes chi(a) = 0.
    exps: Vec<Option<u32>>,
    order_r: u32,
    /// Order of chi in the character group.
    char_order: u32,
    parity: u8,
    values: Vec<Complex64>,
    gauss: Complex64,
    root_number: Complex64,
    /// Fixed branch of kappa^{-1/2}, chosen once at construction.
    inv_sqrt_root_number: Complex64,
}

impl std::fmt::Debug for PrimitiveCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PrimitiveCharacter(q={}, index={}, order={}, parity={})",
            self.q, self.index, self.char_order, self.parity
        )
    }
}

impl PrimitiveCharacter {
    /// All primitive characters mod q, deterministically indexed (1-based).
    ///
    /// The listing order is the lexicographic order of the exponent tables,
    /// so it is stable across runs and versions.
    pub fn enumerate(q: u32) -> Result<Vec<PrimitiveCharacter>> {
        if q < 3 {
            return Err(Error::Domain {
                module: "character",
                message: format!("q = {q} < 3 has no primitive non-principal characters"),
            });
        }
        let group = UnitGroup::new(q);
        let k = group.gens.len();
        let orders: Vec<u32> = group.gens.iter().map(|&(_, d)| d).collect();
        let r_all = orders.iter().copied().fold(1u32, lcm);
        let mut raw: Vec<Vec<Option<u32>>> = Vec::new();
        let mut tuple = vec![0u32; k];
        loop {
            // chi(a) exponent in units of 1/r_all.
            let mut table: Vec<Option<u32>> = vec![None; q as usize];
            for a in 0..q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let x = group.dlog[a as usize].as_ref().expect("unit has dlog");
                let mut e = 0u64;
                for i in 0..k {
                    e += tuple[i] as u64 * x[i] as u64 * (r_all / orders[i]) as u64;
                }
                table[a as usize] = Some((e % r_all as u64) as u32);
            }
            raw.push(table);
            let mut i = 0;
            loop {
                if i == k {
                    tuple = Vec::new();
                    break;
                }
                tuple[i] += 1;
                if tuple[i] < orders[i] {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if tuple.is_empty() {
                break;
            }
        }
        raw.sort_by(|a, b| {
            let ka: Vec<i64> = a.iter().map(|x| x.map(|v| v as i64).unwrap_or(-1)).collect();
            let kb: Vec<i64> = b.iter().map(|x| x.map(|v| v as i64).unwrap_or(-1)).collect();
            ka.cmp(&kb)
        });
        let mut out = Vec::new();
        for table in raw {
            if is_principal(&table) || !is_primitive(q, &table, r_all) {
                continue;
            }
            let index = out.len() as u32 + 1;
            out.push(Self::from_exponent_table(q, index, table, r_all));
        }
        Ok(out)
    }

    /// The primitive character with the given 1-based enumeration index.
    pub fn by_index(q: u32, index: u32) -> Result<PrimitiveCharacter> {
        let all = Self::enumerate(q)?;
        all.into_iter()
            .find(|chi| chi.index == index)
            .ok_or_else(|| Error::BadCharacter {
                message: format!("no primitive character with index {index} mod {q}"),
            })
    }

    fn from_exponent_table(q: u32, index: u32, exps: Vec<Option<u32>>, order_r: u32) -> Self {
        // Reduce to the character's own order for exactness of reports.
        let char_order = exps
            .iter()
            .flatten()
            .map(|&e| {
                if e == 0 {
                    1
                } else {
                    order_r / gcd(e, order_r)
                }
            })
            .fold(1, lcm);
        let values: Vec<Complex64> = exps
            .iter()
            .map(|e| match e {
                None => Complex64::new(0.0, 0.0),
                Some(k) => Complex64::from_polar(1.0, 2.0 * PI * *k as f64 / order_r as f64),
            })
            .collect();
        let parity = match exps[(q - 1) as usize] {
            Some(0) => 0u8,
            _ => 1u8,
        };
        let mut gauss = crate::quad::KahanComplex::new();
        for a in 1..q {
            if exps[a as usize].is_some() {
                let e = Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64);
                gauss.add(values[a as usize] * e);
            }
        }
        let gauss = gauss.value();
        let i_pow_a = if parity == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let root_number = gauss / (i_pow_a * (q as f64).sqrt());
        let inv_sqrt_root_number = Complex64::from_polar(1.0, -0.5 * root_number.arg());
        Self {
            q,
            index,
            exps,
            order_r,
            char_order,
            parity,
            values,
            gauss,
            root_number,
            inv_sqrt_root_number,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Conductor N; equals the modulus for a primitive character.
    pub fn conductor(&self) -> u32 {
        self.q
    }

    /// Degree d of the L-function; 1 for Dirichlet.
    pub fn degree(&self) -> u32 {
        1
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Order of chi in the character group mod q.
    pub fn order(&self) -> u32 {
        self.char_order
    }

    /// Parity a in {0, 1}: a = 0 iff chi(-1) = 1. This is the single
    /// archimedean parameter mu_1 of the completed L-function.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// chi(n) for any integer n (reduced mod q).
    pub fn eval(&self, n: i64) -> Complex64 {
        let a = n.rem_euclid(self.q as i64) as usize;
        self.values[a]
    }

    /// Exact root-of-unity exponent of chi(n): Some(k) meaning
    /// e^{2 pi i k / value_order()}, or None when chi(n) = 0.
    pub fn exponent(&self, n: i64) -> Option<u32> {
        let a = n.rem_euclid(self.q as i64) as usize;
        self.exps[a]
    }

    /// R such that every nonzero value is an R-th root of unity.
    pub fn value_order(&self) -> u32 {
        self.order_r
    }

    pub fn is_real(&self) -> bool {
        self.char_order <= 2
    }

    /// Gauss sum tau(chi) = sum_a chi(a) e^{2 pi i a / q}.
    pub fn gauss_sum(&self) -> Complex64 {
        self.gauss
    }

    /// Root number kappa = tau(chi) / (i^a sqrt(q)); |kappa| = 1.
    pub fn root_number(&self) -> Complex64 {
        self.root_number
    }

    /// The fixed branch of kappa^{-1/2} used by the rotated Z-function.
    pub fn rotation(&self) -> Complex64 {
        self.inv_sqrt_root_number
    }

    /// The conjugate character chi-bar (also primitive mod q).
    pub fn conjugate(&self) -> PrimitiveCharacter {
        let exps: Vec<Option<u32>> = self
            .exps
            .iter()
            .map(|e| e.map(|k| (self.order_r - k) % self.order_r))
            .collect();
        // Recover the enumeration index of the conjugate for reporting.
        let index = Self::enumerate(self.q)
            .expect("q already validated")
            .into_iter()
            .find(|c| c.exps == exps)
            .map(|c| c.index)
            .expect("conjugate of a primitive character is primitive");
        Self::from_exponent_table(self.q, index, exps, self.order_r)
    }
}

fn is_principal(table: &[Option<u32>]) -> bool {
    table.iter().flatten().all(|&e| e == 0)
}

/// chi mod q is primitive iff no proper divisor d | q is an induced modulus,
/// i.e. iff chi is nontrivial on every kernel {a = 1 mod d, gcd(a, q) = 1}.
fn is_primitive(q: u32, table: &[Option<u32>], _r: u32) -> bool {
    for d in 1..q {
        if q % d != 0 {
            continue;
        }
        let mut trivial_on_kernel = true;
        for a in 1..q {
            if a % d == 1 % d && table[a as usize].is_some() && table[a as usize] != Some(0) {
                trivial_on_kernel = false;
                break;
            }
        }
        if trivial_on_kernel {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q3_single_odd_quadratic() {
        let chars = PrimitiveCharacter::enumerate(3).unwrap();
        assert_eq!(chars.len(), 1);
        let chi = &chars[0];
        assert_eq!(chi.parity(), 1);
        assert_eq!(chi.order(), 2);
        // tau(chi_3) = i sqrt(3) by direct 2-term summation
        let tau = chi.gauss_sum();
        assert!((tau - Complex64::new(0.0, 3.0f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn q4_single_character() {
        let chars = PrimitiveCharacter::enumerate(4).unwrap();
        assert_eq!(chars.len(), 1);
        let chi = &chars[0];
        assert_eq!(chi.parity(), 1);
        assert!((chi.eval(3) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        // tau(chi_4) = i - e^{3 pi i / 2} = 2i
        assert!((chi.gauss_sum() - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        // kappa = 2i / (i * 2) = 1
        assert!((chi.root_number() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn q5_three_primitive() {
        let chars = PrimitiveCharacter::enumerate(5).unwrap();
        assert_eq!(chars.len(), 3);
        let quadratic: Vec<_> = chars.iter().filter(|c| c.order() == 2).collect();
        let quartic: Vec<_> = chars.iter().filter(|c| c.order() == 4).collect();
        assert_eq!(quadratic.len(), 1);
        assert_eq!(quartic.len(), 2);
        assert_eq!(quadratic[0].parity(), 0);
        assert!(quartic.iter().all(|c| c.parity() == 1));
    }

    #[test]
    fn gauss_sum_modulus_identity() {
        for q in [3u32, 4, 5, 7, 8, 9, 11, 12, 13, 15, 16, 19, 20] {
            for chi in PrimitiveCharacter::enumerate(q).unwrap() {
                let tau = chi.gauss_sum();
                assert!(
                    (tau.norm_sqr() - q as f64).abs() < 1e-10,
                    "q={q} idx={} |tau|^2={}",
                    chi.index(),
                    tau.norm_sqr()
                );
                assert!((chi.root_number().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multiplicative_on_units() {
        for q in [5u32, 12, 13] {
            for chi in PrimitiveCharacter::enumerate(q).unwrap() {
                for m in 1..1000i64 {
                    for n in [1i64, 7, 11, 13, 101] {
                        let lhs = chi.eval(m * n);
                        let rhs = chi.eval(m) * chi.eval(n);
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_exponent_multiplicativity() {
        let chi = &PrimitiveCharacter::enumerate(5).unwrap()[0];
        let r = chi.value_order();
        for m in 1..100i64 {
            for n in 1..50i64 {
                if gcd((m % 5).rem_euclid(5) as u32, 5) == 1 && gcd((n % 5).rem_euclid(5) as u32, 5) == 1 {
                    let lhs = chi.exponent(m * n).unwrap();
                    let rhs = (chi.exponent(m).unwrap() + chi.exponent(n).unwrap()) % r;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn q_too_small_rejected() {
        assert!(PrimitiveCharacter::enumerate(2).is_err());
        assert!(PrimitiveCharacter::enumerate(1).is_err());
    }

    #[test]
    fn imprimitive_filtered() {
        // mod 8 the character induced from chi_4 is excluded: only the two
        // conductor-8 characters remain.
        let chars = PrimitiveCharacter::enumerate(8).unwrap();
        assert_eq!(chars.len(), 2);
        // mod 9: phi(9) = 6 characters, one principal, one induced from mod 3,
        // leaving 4 primitive.
        assert_eq!(PrimitiveCharacter::enumerate(9).unwrap().len(), 4);
        // mod 15 = 3*5: primitive iff primitive on both factors: 1 * 3 ... the
        // mod-5 factor contributes its 3 primitives and the mod-3 factor its 1.
        assert_eq!(PrimitiveCharacter::enumerate(15).unwrap().len(), 3);
    }

    #[test]
    fn conjugate_is_primitive_with_conjugate_values() {
        let chars = PrimitiveCharacter::enumerate(5).unwrap();
        let quartic = chars.iter().find(|c| c.order() == 4).unwrap();
        let conj = quartic.conjugate();
        for a in 0..5 {
            assert!((conj.eval(a) - quartic.eval(a).conj()).norm() < 1e-15);
        }
        assert!((conj.gauss_sum().norm_sqr() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn by_index_roundtrip() {
        for chi in PrimitiveCharacter::enumerate(13).unwrap() {
            let again = PrimitiveCharacter::by_index(13, chi.index()).unwrap();
            assert_eq!(again.exps, chi.exps);
        }
        assert!(PrimitiveCharacter::by_index(13, 99).is_err());
    }
}
