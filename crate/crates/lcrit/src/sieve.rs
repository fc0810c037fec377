//! Prime sieving and the classical von Mangoldt function Lambda(n).

/// Primes up to `limit` inclusive, by a simple sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// A prime power n = p^k <= x with Lambda(n) = log p.
#[derive(Debug, Clone, Copy)]
pub struct PrimePower {
    pub n: u64,
    pub p: u64,
    pub k: u32,
    /// log p = Lambda(n)
    pub log_p: f64,
}

/// All prime powers up to `x_max`, ascending in n. Memory is O(pi(x_max)),
/// an order of magnitude below a full 0..x table; callers needing larger
/// ranges iterate chunks via `for_each_prime_power_chunked`.
pub fn prime_powers_up_to(x_max: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    for p in primes_up_to(x_max) {
        let log_p = (p as f64).ln();
        let mut n = p;
        let mut k = 1u32;
        loop {
            out.push(PrimePower { n, p, k, log_p });
            match n.checked_mul(p) {
                Some(next) if next <= x_max => {
                    n = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_by_key(|pp| pp.n);
    out
}

/// Visit prime powers in [2, x_max] in ascending order of n, in chunks whose
/// prime tables stay within `chunk` bytes-ish of sieve memory.
pub fn for_each_prime_power_chunked<F: FnMut(PrimePower)>(x_max: u64, chunk: u64, mut f: F) {
    let mut lo = 2u64;
    while lo <= x_max {
        let hi = (lo + chunk - 1).min(x_max);
        let mut block: Vec<PrimePower> = segment_primes(lo, hi)
            .into_iter()
            .map(|p| PrimePower { n: p, p, k: 1, log_p: (p as f64).ln() })
            .collect();
        // Higher powers p^k landing in [lo, hi] come from p <= sqrt(hi).
        for p in primes_up_to((hi as f64).sqrt() as u64 + 1) {
            let mut n = p * p;
            let mut k = 2u32;
            while n <= hi {
                if n >= lo {
                    block.push(PrimePower { n, p, k, log_p: (p as f64).ln() });
                }
                match n.checked_mul(p) {
                    Some(next) => {
                        n = next;
                        k += 1;
                    }
                    None => break,
                }
            }
        }
        block.sort_by_key(|pp| pp.n);
        for pp in block {
            f(pp);
        }
        lo = hi + 1;
    }
}

/// Primes in [lo, hi] by segmented sieve.
fn segment_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_up_to((hi as f64).sqrt() as u64 + 1);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        let start = ((lo + p - 1) / p).max(2) * p;
        let mut m = start;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i] && lo + i as u64 >= 2)
        .map(|i| lo + i as u64)
        .collect()
}

/// Chebyshev psi(x) = sum_{n <= x} Lambda(n), used as a brute-force oracle.
pub fn chebyshev_psi(x: u64) -> f64 {
    let mut acc = 0.0;
    for pp in prime_powers_up_to(x) {
        acc += pp.log_p;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn prime_powers_small() {
        let pps: Vec<u64> = prime_powers_up_to(32).iter().map(|pp| pp.n).collect();
        assert_eq!(pps, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]);
    }

    #[test]
    fn chunked_matches_direct() {
        let mut ns = Vec::new();
        for_each_prime_power_chunked(1000, 64, |pp| ns.push(pp.n));
        let direct: Vec<u64> = prime_powers_up_to(1000).iter().map(|pp| pp.n).collect();
        assert_eq!(ns, direct);
    }

    #[test]
    fn psi_by_hand_enumeration() {
        // Prime powers <= 30: powers of 2 (2,4,8,16), of 3 (3,9,27), of 5
        // (5,25), and the primes 7..29 once each.
        let by_hand = 4.0 * 2.0f64.ln()
            + 3.0 * 3.0f64.ln()
            + 2.0 * 5.0f64.ln()
            + [7.0f64, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0]
                .iter()
                .map(|p| p.ln())
                .sum::<f64>();
        assert!((chebyshev_psi(30) - by_hand).abs() < 1e-12);
    }
}
