//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature for complex
//! integrands on finite and semi-infinite intervals.
//!
//! The subinterval with the largest error estimate is bisected until the
//! summed estimate drops below `max(rel_tol·|I|, abs_floor)`. Besides the
//! integral the routine tracks `∫|f|`, which callers use to judge how much
//! cancellation an oscillatory integrand suffered.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_3,
    0.973_906_528_517_171_720_077_964,
    0.930_157_491_355_708_226_001_207_2,
    0.865_063_366_688_984_510_732_096_7,
    0.780_817_726_586_416_897_063_717_6,
    0.679_409_568_299_024_406_234_327_4,
    0.562_757_134_668_604_683_339_000_1,
    0.433_395_394_129_247_190_799_265_9,
    0.294_392_862_701_460_198_131_126_6,
    0.148_874_338_981_631_210_884_826,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_4,
    0.032_558_162_307_964_727_478_818_97,
    0.054_755_896_574_351_996_031_381_3,
    0.075_039_674_810_919_952_767_043_14,
    0.093_125_454_583_697_605_535_065_47,
    0.109_387_158_802_297_641_899_210_6,
    0.123_491_976_262_065_851_077_958_1,
    0.134_709_217_311_473_325_928_054,
    0.142_775_938_577_060_080_797_094_3,
    0.147_739_104_901_338_491_374_841_5,
    0.149_445_554_002_916_905_664_936_5,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], ...`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_81,
    0.149_451_349_150_580_593_145_776_3,
    0.219_086_362_515_982_043_995_534_9,
    0.269_266_719_309_996_355_091_226_9,
    0.295_524_224_714_752_870_173_893,
];

/// Tolerances and subdivision budget.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute floor relative to `∫|f|`, guarding against integrals that
    /// cancel to (nearly) zero.
    pub l1_floor: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            l1_floor: 1e-14,
            max_intervals: 2000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    /// Approximation of `∫|f|` over the same range.
    pub l1: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    l1: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    let mut l1 = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += (f1 + f2) * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).norm();
    Segment {
        a,
        b,
        value,
        error,
        l1: l1 * h.abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions, what: &'static str) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("{what}: interval [{a}, {b}] is not finite")));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let (mut value, mut error, mut l1) = (first.value, first.error, first.l1);
    heap.push(first);

    loop {
        let target = (opts.rel_tol * value.norm()).max(opts.l1_floor * l1);
        if error <= target {
            break;
        }
        if heap.len() >= opts.max_intervals || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Numerical {
                what,
                estimate: error,
                value: value.norm(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval can no longer be split in floating point.
            return Err(Error::Numerical {
                what,
                estimate: error,
                value: value.norm(),
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    let (mut v, mut e, mut s) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    let intervals = heap.len();
    for seg in heap {
        v += seg.value;
        e += seg.error;
        s += seg.l1;
    }
    Ok(Quadrature {
        value: v,
        error: e,
        l1: s,
        intervals,
    })
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F>(f: F, a: f64, opts: QuadOptions, what: &'static str) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let g = |t: f64| {
        if t >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let u = 1.0 - t;
        let v = f(a + t / u) / (u * u);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    integrate(g, 0.0, 1.0, opts, what)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: QuadOptions, what: &'static str) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let q = integrate(|x| Complex64::new(f(x), 0.0), a, b, opts, what)?;
    Ok((q.value.re, q.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadOptions {
        QuadOptions {
            rel_tol: 1e-13,
            ..QuadOptions::default()
        }
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        // Degree 31 is integrated exactly by a single 21-point panel.
        let s = kronrod(&|x: f64| Complex64::new(x.powi(30), 0.0), -1.0, 1.0);
        assert!((s.value.re - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_complex() {
        let q = integrate(|x| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 3.0, opts(), "t").unwrap();
        let exact = (Complex64::new(0.0, 120.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((q.value - exact).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x| Complex64::new(x.powf(-0.5), 0.0), 0.0, 1.0, opts(), "t").unwrap();
        assert!((q.value.re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let q = integrate_to_infinity(|x| Complex64::new((-x * x).exp(), 0.0), 0.0, opts(), "t").unwrap();
        assert!((q.value.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((q.l1 - q.value.re).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let o = QuadOptions {
            max_intervals: 4,
            ..opts()
        };
        let r = integrate(|x| Complex64::new((1.0 / x).sin(), 0.0), 1e-6, 1.0, o, "wild");
        match r {
            Err(Error::Numerical { what, estimate, .. }) => {
                assert_eq!(what, "wild");
                assert!(estimate > 0.0);
            }
            other => panic!("expected numerical error, got {other:?}"),
        }
    }
}
