//! Numerical integration: adaptive Gauss-Kronrod (15-point rule),
//! Clenshaw-Curtis nodes/weights with FFT-built weight tables, and
//! compensated summation.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::BinaryHeap;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Kronrod abscissae for the 15-point rule on [-1, 1] (positive half).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK15`.
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights embedded in the rule (odd-indexed abscissae).
const WG7: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Scalar type an integrand may return: `f64` or `Complex64`.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        num_complex::Complex::norm(self)
    }
}

/// One Gauss-Kronrod pass over [a, b]: returns (kronrod value, error estimate).
fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = V::zero();
    let mut gauss = V::zero();
    for (i, &x) in XGK15.iter().enumerate() {
        if x == 0.0 {
            let fc = f(center);
            kronrod = kronrod.add(fc.scale(WGK15[7]));
            gauss = gauss.add(fc.scale(WG7[3]));
        } else {
            let f1 = f(center - half * x);
            let f2 = f(center + half * x);
            let sum = f1.add(f2);
            kronrod = kronrod.add(sum.scale(WGK15[i]));
            if i % 2 == 1 {
                gauss = gauss.add(sum.scale(WG7[i / 2]));
            }
        }
    }
    let err = kronrod.add(gauss.scale(-1.0)).norm() * half.abs();
    (kronrod.scale(half), err)
}

#[derive(PartialEq)]
struct Segment<V> {
    err: f64,
    a: f64,
    b: f64,
    value: V,
}

impl<V: PartialEq> Eq for Segment<V> {}
impl<V: PartialEq> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| self.a.partial_cmp(&other.a).unwrap_or(std::cmp::Ordering::Equal))
    }
}
impl<V: PartialEq> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Adaptive Gauss-Kronrod on [a, b] to absolute tolerance `abs_tol`.
///
/// Bisects the worst segment until the summed error estimate is below
/// tolerance. Returns the integral and the final error estimate. The
/// final sum is accumulated in left-to-right segment order so results
/// are reproducible.
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, abs_tol: f64, max_segments: usize) -> Result<(V, f64)>
where
    V: QuadValue + PartialEq,
    F: FnMut(f64) -> V,
{
    let (v0, e0) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err: e0, a, b, value: v0 });
    let mut total_err = e0;
    while total_err > abs_tol && heap.len() < max_segments {
        let worst = heap.pop().expect("heap nonempty");
        // Bail out if a segment has collapsed to machine width.
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        total_err -= worst.err;
        let (vl, el) = gk15(&mut f, worst.a, mid);
        let (vr, er) = gk15(&mut f, mid, worst.b);
        total_err += el + er;
        heap.push(Segment { err: el, a: worst.a, b: mid, value: vl });
        heap.push(Segment { err: er, a: mid, b: worst.b, value: vr });
    }
    let mut segs: Vec<Segment<V>> = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
    let mut acc = V::zero();
    for s in &segs {
        acc = acc.add(s.value);
    }
    if total_err > abs_tol.max(1e-300) * 16.0 {
        return Err(Error::Accuracy {
            module: "quad",
            requested: abs_tol,
            achieved: total_err,
        });
    }
    Ok((acc, total_err))
}

/// Convenience wrapper that panics on failure; for integrands known smooth.
pub fn integrate_or_panic<V, F>(f: F, a: f64, b: f64, abs_tol: f64) -> V
where
    V: QuadValue + PartialEq,
    F: FnMut(f64) -> V,
{
    integrate(f, a, b, abs_tol, 4096).expect("quadrature failed").0
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values (componentwise Neumaier).
#[derive(Clone, Copy, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

/// In-place forward FFT of `buf` using a shared planner.
pub fn fft_forward(buf: &mut [Complex64]) {
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let fft = planner.lock().expect("fft planner lock").plan_fft_forward(buf.len());
    fft.process(buf);
}

static CC_WEIGHTS: OnceLock<Mutex<HashMap<usize, Arc<Vec<f64>>>>> = OnceLock::new();

/// Clenshaw-Curtis weights for the N+1 nodes x_j = cos(j pi / N) on [-1, 1],
/// N even. Built with a single FFT of size 2N and cached per N.
pub fn clenshaw_curtis_weights(n: usize) -> Arc<Vec<f64>> {
    assert!(n >= 2 && n % 2 == 0, "CC rule needs even N >= 2");
    let cache = CC_WEIGHTS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(w) = cache.lock().expect("cc cache lock").get(&n) {
        return Arc::clone(w);
    }
    // v_k = 2 m_k / gamma_k for even k (m_k = 2/(1-k^2)), 0 for odd k,
    // with gamma halving at k = 0 and k = N.
    let mut v = vec![0.0f64; n + 1];
    v[0] = 2.0;
    let mut k = 2;
    while k < n {
        v[k] = 4.0 / (1.0 - (k * k) as f64);
        k += 2;
    }
    v[n] = 2.0 / (1.0 - (n * n) as f64);
    // S_j = sum_k v_k cos(k j pi / N) for all j via FFT of the even extension.
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (k, &vk) in v.iter().enumerate() {
        buf[k] = Complex64::new(vk, 0.0);
    }
    for k in 1..n {
        buf[2 * n - k] = Complex64::new(v[k], 0.0);
    }
    fft_forward(&mut buf);
    let mut w = vec![0.0f64; n + 1];
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let s_j = 0.5 * (buf[j].re + v[0] + sign * v[n]);
        let eps = if j == 0 || j == n { 0.5 } else { 1.0 };
        w[j] = eps * s_j / n as f64;
    }
    let arc = Arc::new(w);
    cache
        .lock()
        .expect("cc cache lock")
        .insert(n, Arc::clone(&arc));
    arc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gk_polynomial_exact() {
        let (v, e) = integrate(|x: f64| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 64).unwrap();
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12, "v={v} exact={exact} err={e}");
    }

    #[test]
    fn gk_oscillatory() {
        let (v, _) = integrate(|x: f64| (20.0 * x).cos(), 0.0, PI, 1e-12, 512).unwrap();
        let exact = (20.0 * PI).sin() / 20.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn gk_complex_integrand() {
        // int_0^1 e^{i t x} dx = (e^{i t} - 1)/(i t)
        let t = 3.7;
        let (v, _) = integrate(
            |x: f64| Complex64::new(0.0, t * x).exp(),
            0.0,
            1.0,
            1e-13,
            128,
        )
        .unwrap();
        let i = Complex64::new(0.0, 1.0);
        let exact = ((i * t).exp() - 1.0) / (i * t);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn gk_near_singular_peak() {
        // Lorentzian with small width: adaptive subdivision must find it.
        let eps = 1e-4;
        let (v, _) = integrate(|x: f64| eps / (eps * eps + x * x), -1.0, 1.0, 1e-10, 4096).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn gk_accuracy_error_reported() {
        // Discontinuous integrand at fixed low budget cannot converge.
        let r = integrate(|x: f64| if x > 0.123456 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-15, 8);
        assert!(r.is_err());
    }

    #[test]
    fn cc_weights_small_n_against_direct() {
        // Direct O(N^2) construction for N = 8.
        let n = 8usize;
        let w = clenshaw_curtis_weights(n);
        for j in 0..=n {
            let mut direct = 0.0;
            let mut k = 0;
            while k <= n {
                let gamma = if k == 0 || k == n { 2.0 } else { 1.0 };
                let m_k = 2.0 / (1.0 - (k * k) as f64);
                direct += 2.0 * m_k / gamma * (k as f64 * j as f64 * PI / n as f64).cos();
                k += 2;
            }
            let eps = if j == 0 || j == n { 0.5 } else { 1.0 };
            direct *= eps / n as f64;
            assert!((w[j] - direct).abs() < 1e-14, "j={j}");
        }
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cc_integrates_smooth_functions() {
        let n = 64usize;
        let w = clenshaw_curtis_weights(n);
        let mut acc = 0.0;
        for j in 0..=n {
            let x = (j as f64 * PI / n as f64).cos();
            acc += w[j] * (x.exp());
        }
        let exact = 1.0f64.exp() - (-1.0f64).exp();
        assert!((acc - exact).abs() < 1e-13);
    }

    #[test]
    fn kahan_beats_naive() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..10_000_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-9)).abs() < 1e-15);
    }
}
