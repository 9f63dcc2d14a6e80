//! Adaptive Gauss–Kronrod (7/15) integration with user breakpoints.
//!
//! The integrand may return a fixed-size vector so that several moments
//! (photon number and energy, say) share one subdivision. Intervals are
//! bisected in a fixed order, so results do not depend on thread count even
//! when node evaluations run on the rayon pool.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and domain options shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Integrate the one-sided tail strips outside the cutoff rectangle.
    pub include_tails: bool,
    /// Outer edge of the tail strips; only read when `include_tails` is set.
    pub tail_upper_bound: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            include_tails: false,
            tail_upper_bound: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rel_tol) {
            return Err(Error::domain("rel_tol", "finite and > 0", self.rel_tol));
        }
        if !ok(self.abs_tol) {
            return Err(Error::domain("abs_tol", "finite and > 0", self.abs_tol));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be >= 1".into()));
        }
        if self.include_tails && !ok(self.tail_upper_bound) {
            return Err(Error::domain(
                "tail_upper_bound",
                "finite and > 0 when tails are included",
                self.tail_upper_bound,
            ));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
}

fn gauss_kronrod<const K: usize>(a: f64, b: f64, fv: &[[f64; K]; 15]) -> Segment<K> {
    // fv layout: [center, f(c - h x_0), f(c + h x_0), …, f(c ± h x_6)]
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        let fc = fv[0][k];
        let mut resk = WGK[7] * fc;
        let mut resg = WG[3] * fc;
        let mut resabs = (WGK[7] * fc).abs();
        for j in 0..7 {
            let (f1, f2) = (fv[1 + 2 * j][k], fv[2 + 2 * j][k]);
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            let (f1, f2) = (fv[1 + 2 * j][k], fv[2 + 2 * j][k]);
            resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let resabs = resabs * abs_half;
        let resasc = resasc * abs_half;
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value[k] = resk * half;
        error[k] = err;
    }
    Segment { a, b, value, error }
}

fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [c; 15];
    for j in 0..7 {
        x[1 + 2 * j] = c - h * XGK[j];
        x[2 + 2 * j] = c + h * XGK[j];
    }
    x
}

fn rule<const K: usize, F>(f: &F, a: f64, b: f64, parallel: bool) -> Segment<K>
where
    F: Fn(f64) -> [f64; K] + Sync,
{
    let x = nodes(a, b);
    let mut fv = [[0.0; K]; 15];
    if parallel {
        let vals: Vec<[f64; K]> = x.par_iter().map(|&t| f(t)).collect();
        fv.copy_from_slice(&vals);
    } else {
        for (slot, &t) in fv.iter_mut().zip(&x) {
            *slot = f(t);
        }
    }
    gauss_kronrod(a, b, &fv)
}

/// Neumaier-compensated sum over segments, component-wise.
fn compensated<const K: usize>(segs: &[Segment<K>], pick: impl Fn(&Segment<K>) -> [f64; K]) -> [f64; K] {
    let mut sum = [0.0; K];
    let mut comp = [0.0; K];
    for s in segs {
        let v = pick(s);
        for k in 0..K {
            let t = sum[k] + v[k];
            if sum[k].abs() >= v[k].abs() {
                comp[k] += (sum[k] - t) + v[k];
            } else {
                comp[k] += (v[k] - t) + sum[k];
            }
            sum[k] = t;
        }
    }
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = sum[k] + comp[k];
    }
    out
}

fn sorted_points(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p.is_finite() && p > a && p < b)
        .collect();
    inner.sort_by(|p, q| p.total_cmp(q));
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

/// Integrates a vector-valued `f` over `[a, b]`, splitting first at every
/// breakpoint strictly inside the interval.
///
/// Every component must meet `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_vec<const K: usize, F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
    parallel: bool,
) -> Result<Estimate<K>>
where
    F: Fn(f64) -> [f64; K] + Sync,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limit", "finite", if a.is_finite() { b } else { a }));
    }
    if a == b {
        return Ok(Estimate {
            value: [0.0; K],
            error: [0.0; K],
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let pts = sorted_points(lo, hi, breakpoints);
    let mut segs: Vec<Segment<K>> = pts
        .windows(2)
        .map(|w| rule(&f, w[0], w[1], parallel))
        .collect();

    loop {
        let value = compensated(&segs, |s| s.value);
        let error = compensated(&segs, |s| s.error);
        let converged = (0..K).all(|k| error[k] <= spec.tolerance(value[k]));
        if converged {
            return Ok(Estimate {
                value: value.map(|v| sign * v),
                error,
                intervals: segs.len(),
            });
        }

        let scale: [f64; K] = std::array::from_fn(|k| spec.tolerance(value[k]));
        let priority = |s: &Segment<K>| {
            (0..K)
                .map(|k| s.error[k] / scale[k])
                .fold(0.0_f64, f64::max)
        };
        // Linear scan; ties resolve to the leftmost segment.
        let mut worst = 0;
        let mut worst_p = priority(&segs[0]);
        for (i, s) in segs.iter().enumerate().skip(1) {
            let p = priority(s);
            if p > worst_p {
                worst = i;
                worst_p = p;
            }
        }

        let s = segs[worst];
        let mid = 0.5 * (s.a + s.b);
        let too_narrow = !(mid > s.a && mid < s.b)
            || (s.b - s.a) <= 1e3 * f64::EPSILON * s.a.abs().max(s.b.abs());
        if segs.len() >= spec.max_subdivisions || too_narrow {
            let k = (0..K)
                .max_by(|&i, &j| (error[i] / scale[i]).total_cmp(&(error[j] / scale[j])))
                .unwrap_or(0);
            return Err(Error::Quadrature {
                estimate: sign * value[k],
                achieved: error[k],
                requested: scale[k],
            });
        }
        let left = rule(&f, s.a, mid, parallel);
        let right = rule(&f, mid, s.b, parallel);
        segs[worst] = left;
        segs.insert(worst + 1, right);
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let est = integrate_vec::<1, _>(|x| [f(x)], a, b, breakpoints, spec, false)?;
    Ok((est.value[0], est.error[0]))
}
