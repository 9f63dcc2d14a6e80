//! The angular-momentum kernel
//! `F(x, y) = Σ_{l≥1} (2l+1) |A_l^in|² |A_l^out|² W̃_ν(x,y)² / (x² - y²)²`,
//! its diagonal `D(x) = F(x, x)`, the fitted factorized form, and the step
//! dispersion profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::matching::{coefficient_a_sq, MediumConfig};
use crate::special_functions::{
    diagonal_term_from, ln_large_order_quotient, pseudo_wronskian_from, HalfOrderTable, ModeOrder,
    LARGE_ORDER_SAFETY,
};

/// `1/(2π²)`, the large-argument limit of `D(x)`.
pub const D_ASYMPTOTE: f64 = 1.0 / (2.0 * PI * PI);

/// Hard ceiling on the adaptive angular-momentum sum.
pub const ADAPTIVE_L_LIMIT: u32 = 200;

/// Relative tail tolerance for the angular-momentum sum.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Cutoff rectangle `[0, x_*] × [0, y_*]` of the step dispersion model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub x_star: f64,
    pub y_star: f64,
}

impl CutoffProfile {
    pub fn new(x_star: f64, y_star: f64) -> Result<Self> {
        require_positive("x_star", x_star)?;
        require_positive("y_star", y_star)?;
        Ok(Self { x_star, y_star })
    }

    /// `x_* = y_* = (n_gas_out / n_liquid) · ⌊R K⌋`.
    pub fn from_config(cfg: &MediumConfig) -> Self {
        let s = cfg.x_star();
        Self { x_star: s, y_star: s }
    }

    pub fn with_overrides(cfg: &MediumConfig, x_star: Option<f64>, y_star: Option<f64>) -> Result<Self> {
        let base = Self::from_config(cfg);
        Self::new(x_star.unwrap_or(base.x_star), y_star.unwrap_or(base.y_star))
    }
}

/// Gas index before the transition; left-continuous at `y_*`.
pub fn refractive_in(y: f64, cfg: &MediumConfig, cut: &CutoffProfile) -> f64 {
    if y <= cut.y_star {
        cfg.n_gas_in
    } else {
        1.0
    }
}

/// Gas index after the transition; left-continuous at `x_*`.
pub fn refractive_out(x: f64, cfg: &MediumConfig, cut: &CutoffProfile) -> f64 {
    if x <= cut.x_star {
        cfg.n_gas_out
    } else {
        1.0
    }
}

/// How far to carry the sum over `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Stop at this `l`, or earlier once the tail bound is met.
    Fixed(u32),
    /// Continue until the tail bound is met; fail past [`ADAPTIVE_L_LIMIT`].
    Adaptive,
}

/// Whether the matching factors `|A^in|² |A^out|²` enter `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AFactors {
    /// `A ≡ 1`.
    #[default]
    Unit,
    /// `|A|²` from the matching conditions below the cutoff, 1 above it.
    Matched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub l_used: u32,
    pub truncation_error_estimate: f64,
}

/// Context for evaluating `F` with matched `A` factors.
#[derive(Debug, Clone, Copy)]
pub struct MatchedContext<'a> {
    pub cfg: &'a MediumConfig,
    pub cut: &'a CutoffProfile,
}

fn a_product(ctx: Option<MatchedContext<'_>>, l: u32, x: f64, y: f64) -> Result<f64> {
    let Some(MatchedContext { cfg, cut }) = ctx else {
        return Ok(1.0);
    };
    let order = ModeOrder::new(l)?;
    let a_in = if y <= cut.y_star {
        coefficient_a_sq(order, y, cfg.index_ratio_in())?
    } else {
        1.0
    };
    let a_out = if x <= cut.x_star {
        coefficient_a_sq(order, x, cfg.index_ratio_out())?
    } else {
        1.0
    };
    Ok(a_in * a_out)
}

/// Per-step growth allowance for `|A^in|²|A^out|²` in the tail bound.
fn a_growth(ctx: Option<MatchedContext<'_>>) -> f64 {
    match ctx {
        None => 1.0,
        Some(MatchedContext { cfg, .. }) => {
            let g = |n: f64| (n * n).max(1.0);
            g(cfg.index_ratio_in()) * g(cfg.index_ratio_out())
        }
    }
}

/// First `l` with `ν > e·max(x,y)/2`.
fn regime_onset(x: f64, y: f64) -> u32 {
    let need = std::f64::consts::E * x.max(y) / 2.0 - 0.5;
    (need.floor().max(0.0) as u32 + 1).max(1)
}

/// Majorant of `Σ_{l' > l} (2l'+1) a (W̃/(x²-y²))²` for `l` in the
/// large-order regime, `a` growing by `growth` per step.
fn tail_bound(l: u32, x: f64, y: f64, a_at_l: f64, growth: f64) -> f64 {
    let mut acc = 0.0;
    let mut a = a_at_l;
    for lp in (l + 1)..(l + 2000) {
        a *= growth;
        let q = LARGE_ORDER_SAFETY * ln_large_order_quotient(lp as f64 + 0.5, x, y).exp();
        let term = (2 * lp + 1) as f64 * a * q * q;
        acc += term;
        if term <= 1e-17 * acc || term == 0.0 {
            break;
        }
    }
    acc
}

/// `ε_diag = 1e-3 · max(x, y, 1)`.
fn near_diagonal(x: f64, y: f64) -> bool {
    (x - y).abs() < 1e-3 * x.max(y).max(1.0)
}

/// Sum of the kernel terms for precomputed tables; the workhorse behind
/// [`f_exact`] and the spectrum integrand.
pub(crate) fn exact_sum(
    tx: &HalfOrderTable,
    ty: &HalfOrderTable,
    truncation: Truncation,
    ctx: Option<MatchedContext<'_>>,
) -> Result<KernelValue> {
    let (x, y) = (tx.z(), ty.z());
    let diag = near_diagonal(x, y);
    let mid = if diag {
        Some(HalfOrderTable::new(tx.l_max().min(ty.l_max()), 0.5 * (x + y))?)
    } else {
        None
    };
    let denom = if diag { (x + y) * (x + y) } else { (x * x - y * y).powi(2) };
    let onset = regime_onset(x, y);
    let growth = a_growth(ctx);
    let (cap, hard) = match truncation {
        Truncation::Fixed(l) => (l, false),
        Truncation::Adaptive => (ADAPTIVE_L_LIMIT, true),
    };
    let avail = tx.l_max().min(ty.l_max());
    if cap > avail {
        return Err(Error::Config(format!(
            "kernel tables hold l <= {avail}, truncation requested {cap}"
        )));
    }

    let term_at = |l: u32| -> Result<(f64, f64)> {
        let w = match &mid {
            Some(t) => diagonal_term_from(t, l),
            None => pseudo_wronskian_from(tx, ty, l),
        };
        let a = a_product(ctx, l, x, y)?;
        Ok(((2 * l + 1) as f64 * a * w * w / denom, a))
    };

    let mut sum = 0.0;
    let mut last_a = 1.0;
    for l in 1..=cap {
        let (t, a) = term_at(l)?;
        sum += t;
        last_a = a;
        if l >= onset {
            let tail = tail_bound(l, x, y, a, growth);
            if tail <= TAIL_TOLERANCE * sum {
                return Ok(KernelValue {
                    value: sum,
                    l_used: l,
                    truncation_error_estimate: tail,
                });
            }
        }
    }
    if hard {
        let tail = tail_bound(cap, x, y, last_a, growth);
        return Err(Error::SeriesNonConvergence {
            l: cap,
            tail,
            partial: sum,
        });
    }

    // Fixed cap reached first: omitted terms up to the onset are summed
    // directly, the rest bounded asymptotically.
    let mut est = 0.0;
    let mut a_tail = last_a;
    for l in (cap + 1)..onset.max(cap + 1) {
        let (t, a) = term_at(l)?;
        est += t;
        a_tail = a;
    }
    est += tail_bound(onset.max(cap + 1) - 1, x, y, a_tail, growth);
    Ok(KernelValue {
        value: sum,
        l_used: cap,
        truncation_error_estimate: est,
    })
}

/// Order of the Bessel tables for a given truncation at `(x, y)`.
///
/// Rounded up to a multiple of 32 so that nearby truncations share the same
/// Miller start and partial sums stay exactly monotone in `l_max`.
pub(crate) fn table_order(truncation: Truncation, x: f64, y: f64) -> u32 {
    let onset = regime_onset(x, y);
    let need = match truncation {
        Truncation::Fixed(l) => l.max(onset),
        Truncation::Adaptive => ADAPTIVE_L_LIMIT,
    };
    need.div_ceil(32) * 32
}

/// `F(x, y)` with `A ≡ 1`, truncated at `min(l_max, adaptive bound)`.
pub fn f_exact(x: f64, y: f64, cfg: &MediumConfig, l_max: u32) -> Result<KernelValue> {
    cfg.validate()?;
    f_exact_with(x, y, Truncation::Fixed(l_max.max(1)), AFactors::Unit, cfg, &CutoffProfile::from_config(cfg))
}

/// `F(x, y)` with explicit truncation and `A`-factor policy.
pub fn f_exact_with(
    x: f64,
    y: f64,
    truncation: Truncation,
    a_factors: AFactors,
    cfg: &MediumConfig,
    cut: &CutoffProfile,
) -> Result<KernelValue> {
    require_positive("x", x)?;
    require_positive("y", y)?;
    if let Truncation::Fixed(0) = truncation {
        return Err(Error::domain("l_max", ">= 1", 0.0));
    }
    let lt = table_order(truncation, x, y);
    let tx = HalfOrderTable::new(lt, x)?;
    let ty = HalfOrderTable::new(lt, y)?;
    let ctx = match a_factors {
        AFactors::Unit => None,
        AFactors::Matched => Some(MatchedContext { cfg, cut }),
    };
    exact_sum(&tx, &ty, truncation, ctx)
}

/// `D(x) = Σ (2l+1) [(2l+1) J_{l+½} J_{l-½} - x (J²_{l+½} + J²_{l-½})]² / (4x²)`
/// with `A ≡ 1`.
pub fn d_exact(x: f64, truncation: Truncation) -> Result<KernelValue> {
    require_positive("x", x)?;
    if let Truncation::Fixed(0) = truncation {
        return Err(Error::domain("l_max", ">= 1", 0.0));
    }
    let t = HalfOrderTable::new(table_order(truncation, x, x), x)?;
    d_exact_from(&t, truncation)
}

fn d_exact_from(t: &HalfOrderTable, truncation: Truncation) -> Result<KernelValue> {
    let x = t.z();
    let denom = 4.0 * x * x;
    let onset = regime_onset(x, x);
    let (cap, hard) = match truncation {
        Truncation::Fixed(l) => (l, false),
        Truncation::Adaptive => (ADAPTIVE_L_LIMIT, true),
    };
    let term = |l: u32| {
        let g = diagonal_term_from(t, l);
        (2 * l + 1) as f64 * g * g / denom
    };
    let mut sum = 0.0;
    for l in 1..=cap {
        sum += term(l);
        if l >= onset {
            let tail = tail_bound(l, x, x, 1.0, 1.0);
            if tail <= TAIL_TOLERANCE * sum {
                return Ok(KernelValue {
                    value: sum,
                    l_used: l,
                    truncation_error_estimate: tail,
                });
            }
        }
    }
    if hard {
        return Err(Error::SeriesNonConvergence {
            l: cap,
            tail: tail_bound(cap, x, x, 1.0, 1.0),
            partial: sum,
        });
    }
    let stop = onset.max(cap + 1);
    let est = ((cap + 1)..stop).map(term).sum::<f64>() + tail_bound(stop - 1, x, x, 1.0, 1.0);
    Ok(KernelValue {
        value: sum,
        l_used: cap,
        truncation_error_estimate: est,
    })
}

/// Fitted diagonal `(1/2π²) x⁶ / (250 + x⁶)`.
pub fn d_approx(x: f64) -> f64 {
    let x6 = x.powi(6);
    D_ASYMPTOTE * x6 / (250.0 + x6)
}

/// `sin²(t)/t²`, equal to 1 at `t = 0`.
pub fn sinc_sq(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 3.0
    } else {
        let s = t.sin() / t;
        s * s
    }
}

/// Factorized kernel
/// `(1/2π²) (x+y)⁶/(16000 + (x+y)⁶) · sin²(3(x-y)/4) / (3(x-y)/4)²`.
pub fn f_factorized(x: f64, y: f64) -> f64 {
    let s6 = (x + y).powi(6);
    D_ASYMPTOTE * s6 / (16000.0 + s6) * sinc_sq(0.75 * (x - y))
}
