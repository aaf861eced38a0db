//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! Globally adaptive bisection in the style of QUADPACK's QAG: the interval
//! with the largest error estimate is split until the summed error meets
//! `max(abs_tol, rel_tol * |I|)` or the subdivision budget is exhausted.
//! Integrands may be real or complex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_576,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadTol {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
}

/// One application of the 21-point rule.
#[derive(Debug, Clone, Copy)]
pub struct RuleResult<T> {
    /// Kronrod estimate.
    pub value: T,
    /// Rescaled Gauss-Kronrod difference with a roundoff floor (QUADPACK).
    pub err: f64,
    /// Kronrod estimate of the integral of `|f|`.
    pub res_abs: f64,
}

pub fn gk21<T, F>(f: &F, a: f64, b: f64) -> RuleResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [T::zero(); 21];
    fv[10] = f(center);
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        fv[j] = f(center - dx);
        fv[20 - j] = f(center + dx);
    }
    let mut kronrod = fv[10] * WGK[10];
    let mut gauss = T::zero();
    let mut res_abs = WGK[10] * fv[10].magnitude();
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        kronrod = kronrod + pair * WGK[j];
        res_abs += WGK[j] * (fv[j].magnitude() + fv[20 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fv[10] - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[20 - j] - mean).magnitude());
    }
    let scale = half.abs();
    let kronrod = kronrod * half;
    let diff = ((kronrod - gauss * half).magnitude()).abs();
    RuleResult {
        value: kronrod,
        err: rescale_error(diff, res_abs * scale, res_asc * scale),
        res_abs: res_abs * scale,
    }
}

fn rescale_error(diff: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = diff;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    res_abs: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over `[a, b]`; `a > b` gives the negated integral over `[b, a]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: QuadTol) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a > b {
        let r = integrate_breaks(f, &[b, a], tol)?;
        return Ok(Integral { value: r.value * -1.0, ..r });
    }
    integrate_breaks(f, &[a, b], tol)
}

/// Integrates `f` over the union of consecutive intervals given by
/// `breaks` (sorted, at least two points). Breakpoints are placed where the
/// integrand changes scale so the initial panels already resolve it.
pub fn integrate_breaks<T, F>(f: F, breaks: &[f64], tol: QuadTol) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if breaks.len() < 2 {
        return Err(Error::Domain("integration needs at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    if breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("breakpoints must be sorted and finite".into()));
    }
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a {
            continue;
        }
        let r = gk21(&f, a, b);
        evaluations += 21;
        heap.push(Panel {
            a,
            b,
            value: r.value,
            err: r.err,
            res_abs: r.res_abs,
        });
    }
    let sum = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter().fold((T::zero(), 0.0, 0.0), |(v, e, m), p| {
            (v + p.value, e + p.err, m + p.res_abs)
        })
    };
    let (mut total, mut total_err, mut total_abs) = sum(&heap);

    let mut splits = 0;
    loop {
        // The last term is the roundoff floor: once every panel sits at its
        // floor, more bisection cannot help.
        let target = tol
            .abs_tol
            .max(tol.rel_tol * total.magnitude())
            .max(100.0 * f64::EPSILON * total_abs);
        if total_err <= target {
            break;
        }
        if splits >= tol.max_subdivisions {
            return Err(Error::Convergence {
                context: "adaptive quadrature",
                last: total.magnitude(),
                previous: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Too narrow to split in double precision; freeze it.
            heap.push(Panel { err: 0.0, ..worst });
            (total, total_err, total_abs) = sum(&heap);
            splits += 1;
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evaluations += 42;
        total = total - worst.value + left.value + right.value;
        total_err += left.err + right.err - worst.err;
        total_abs += left.res_abs + right.res_abs - worst.res_abs;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: left.value,
            err: left.err,
            res_abs: left.res_abs,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: right.value,
            err: right.err,
            res_abs: right.res_abs,
        });
        splits += 1;
        if splits % 64 == 0 {
            // Re-sum to stop drift in the running totals.
            (total, total_err, total_abs) = sum(&heap);
        }
    }
    let (value, abs_err, _) = sum(&heap);
    Ok(Integral {
        value,
        abs_err,
        evaluations,
    })
}
