//! Adaptive Gauss-Kronrod (10/21-point) quadrature on finite and
//! semi-infinite intervals.
//!
//! Besides the integral, every adaptive run returns the final partition.
//! Re-evaluating a nearby integrand on that frozen partition yields values
//! that vary smoothly with the integrand's parameters, which is what the
//! finite-difference temperature derivatives rely on.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

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
    0.123_491_976_262_065_851_077_943_064_004,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// Weights of the embedded 10-point Gauss rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Stopping rule for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_segments: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Self {
            abs,
            rel,
            max_segments: 4000,
        }
    }

    fn target(&self, value: T) -> T {
        self.abs.max(self.rel * value.abs())
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-14), T::lit(1e-11))
    }
}

/// Segments of an adaptive run, in the variable the rule was applied in.
///
/// For a semi-infinite integral the segments live in the mapped variable
/// t ∈ [0, 1), x = a + t / (1 − t).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    pub segments: Vec<(T, T)>,
    pub semi_infinite_from: Option<T>,
}

impl<T: Real> Partition<T> {
    /// Applies the 21-point rule on every frozen segment.
    pub fn evaluate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        match self.semi_infinite_from {
            None => self
                .segments
                .iter()
                .map(|&(a, b)| kronrod(&mut f, a, b).value)
                .fold(T::zero(), |s, v| s + v),
            Some(a) => {
                let mut g = |t: T| mapped(&mut f, a, t);
                self.segments
                    .iter()
                    .map(|&(l, r)| kronrod(&mut g, l, r).value)
                    .fold(T::zero(), |s, v| s + v)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub partition: Partition<T>,
}

struct Estimate<T> {
    value: T,
    error: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Estimate<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = (f_center * T::lit(WGK[10])).abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let r = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if r < T::one() { res_asc * r } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if floor > err {
        err = floor;
    }
    Estimate { value, error: err }
}

fn mapped<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, t: T) -> T {
    let one = T::one();
    let s = one - t;
    let x = a + t / s;
    let v = f(x) / (s * s);
    if v.is_finite() {
        v
    } else {
        T::zero()
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.as_f64().total_cmp(&other.error.as_f64())
    }
}

fn adapt<T: Real, F: FnMut(T) -> T>(
    f: &mut F,
    points: &[T],
    tol: &Tolerance<T>,
) -> Result<(T, T, usize, Vec<(T, T)>)> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment<T>> = Vec::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let e = kronrod(f, a, b);
        evaluations += 21;
        heap.push(Segment {
            a,
            b,
            value: e.value,
            error: e.error,
        });
    }

    let total = |heap: &BinaryHeap<Segment<T>>, frozen: &[Segment<T>]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error))
    };

    let half = T::lit(0.5);
    loop {
        let (value, error) = total(&heap, &frozen);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        if error <= tol.target(value) {
            break;
        }
        if heap.len() + frozen.len() >= tol.max_segments {
            return Err(Error::Quadrature {
                estimate: value.as_f64(),
                error: error.as_f64(),
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            // Every remaining segment is at the resolution limit.
            if error <= T::lit(1e3) * tol.target(value) {
                break;
            }
            return Err(Error::Quadrature {
                estimate: value.as_f64(),
                error: error.as_f64(),
                evaluations,
            });
        };
        let mid = half * (worst.a + worst.b);
        let width = worst.b - worst.a;
        let resolution = T::lit(100.0) * T::epsilon() * worst.a.abs().max(worst.b.abs()).max(T::min_positive_value());
        if width <= resolution || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        evaluations += 42;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
        });
    }
    let (value, error) = total(&heap, &frozen);
    let mut segments: Vec<(T, T)> = heap
        .into_iter()
        .chain(frozen)
        .map(|s| (s.a, s.b))
        .collect();
    segments.sort_by(|x, y| x.0.as_f64().total_cmp(&y.0.as_f64()));
    Ok((value, error, evaluations, segments))
}

/// Adaptive integral of `f` over the interval spanned by `points`, which
/// must be sorted; interior points become forced breakpoints.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    tol: &Tolerance<T>,
) -> Result<Integral<T>> {
    if points.len() < 2 {
        return Err(Error::invalid("points", points.len() as f64, "need at least two points"));
    }
    let (value, error, evaluations, segments) = adapt(&mut f, points, tol)?;
    Ok(Integral {
        value,
        error,
        evaluations,
        partition: Partition {
            segments,
            semi_infinite_from: None,
        },
    })
}

/// Adaptive integral of `f` over [a, ∞) through x = a + t/(1 − t).
pub fn integrate_to_infinity<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    tol: &Tolerance<T>,
) -> Result<Integral<T>> {
    let mut g = |t: T| mapped(&mut f, a, t);
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let points = [T::zero(), quarter, half, T::lit(0.75), T::one()];
    let (value, error, evaluations, segments) = adapt(&mut g, &points, tol)?;
    Ok(Integral {
        value,
        error,
        evaluations,
        partition: Partition {
            segments,
            semi_infinite_from: Some(a),
        },
    })
}
