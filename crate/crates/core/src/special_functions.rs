//! Half-integer order Bessel and Neumann functions.
//!
//! For `ν = l + 1/2` the cylinder functions reduce to spherical ones,
//! `J_ν(z) = √(2z/π) j_l(z)` and `N_ν(z) = √(2z/π) y_l(z)`. The spherical
//! `j_l` are produced by Miller's downward recurrence normalised against the
//! larger of the closed forms `j_0 = sin z / z` and `j_{-1} = cos z / z`;
//! the `y_l` come from upward recurrence started at `y_{-1} = sin z / z`,
//! `y_0 = -cos z / z`. Each direction is the stable one for its function.
//!
//! Derivatives are never differenced numerically: `z J'_ν = z J_{ν-1} - ν J_ν`.

use std::f64::consts::{E, FRAC_2_PI, PI};

use crate::error::{require_positive, Error, Result};

/// Values of `|J_ν|` below this are reported as exact zeros with a
/// saturation flag instead of subnormal noise.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// `|N_ν|` above this is reported as an overflow error.
pub const OVERFLOW_THRESHOLD: f64 = 1e300;

/// Largest angular momentum accepted by the evaluators.
pub const MAX_ORDER: u32 = 2000;

/// Safety factor applied to the large-order asymptotic pseudo-Wronskian.
pub const LARGE_ORDER_SAFETY: f64 = 10.0;

/// Angular momentum `l` and the associated Bessel order `ν = l + 1/2`.
///
/// `l = 0` is representable for internal checks; photon modes start at
/// `l = 1` (see [`ModeOrder::photon`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeOrder {
    l: u32,
}

impl ModeOrder {
    pub fn new(l: u32) -> Result<Self> {
        if l > MAX_ORDER {
            return Err(Error::domain(
                "angular momentum l",
                "<= MAX_ORDER",
                l as f64,
            ));
        }
        Ok(Self { l })
    }

    /// A radiating mode; there is no monopole radiation so `l >= 1`.
    pub fn photon(l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::domain("photon angular momentum l", ">= 1", 0.0));
        }
        Self::new(l)
    }

    pub fn l(self) -> u32 {
        self.l
    }

    pub fn nu(self) -> f64 {
        self.l as f64 + 0.5
    }
}

/// `J_ν`, `N_ν`, `J_{ν-1}`, `N_{ν-1}` at a single argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub order: ModeOrder,
    pub z: f64,
    pub j: f64,
    pub n: f64,
    pub j_prev: f64,
    pub n_prev: f64,
    /// Set when `J_ν` or `J_{ν-1}` fell below [`UNDERFLOW_THRESHOLD`] and was
    /// flushed to zero.
    pub j_saturated: bool,
}

impl BesselPair {
    /// `z J'_ν(z)`.
    pub fn z_dj(&self) -> f64 {
        self.z * self.j_prev - self.order.nu() * self.j
    }

    /// `z N'_ν(z)`.
    pub fn z_dn(&self) -> f64 {
        self.z * self.n_prev - self.order.nu() * self.n
    }

    /// `z (J_ν N_{ν-1} - J_{ν-1} N_ν)`, which equals `2/π` identically.
    pub fn scaled_wronskian(&self) -> f64 {
        self.z * (self.j * self.n_prev - self.j_prev * self.n)
    }
}

/// Start index for Miller's recurrence: walk past `max(l_max, z)` until the
/// WKB decay of `j_n` has accumulated twenty decades.
fn miller_start(l_max: usize, z: f64) -> usize {
    const TARGET: f64 = 46.0; // ln(1e20)
    let mut n = (l_max as f64).max(z.ceil());
    let mut log_decay = 0.0;
    while log_decay < TARGET {
        let nu = n + 1.5;
        if nu > z {
            let ratio = z / (nu + (nu * nu - z * z).sqrt());
            log_decay -= ratio.ln();
        }
        n += 1.0;
    }
    n as usize + 8
}

/// Unnormalised Miller sequence rescaled against overflow, returned as
/// `j_{-1}, j_0, …, j_{l_max}` after normalisation.
fn spherical_j_sequence(l_max: usize, z: f64) -> Vec<f64> {
    const RESCALE_AT: f64 = 1e250;
    const RESCALE_BY: f64 = 1e-250;

    let start = miller_start(l_max, z);
    // stored[k] holds f_{k-1}
    let mut stored = vec![0.0; l_max + 2];
    let mut upper = 0.0_f64; // f_{n+1}
    let mut current = 1e-30_f64; // f_n
    let mut n = start;
    loop {
        if n <= l_max {
            stored[n + 1] = current;
        }
        let lower = (2 * n + 1) as f64 / z * current - upper;
        upper = current;
        current = lower;
        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            for s in stored.iter_mut().skip(n.min(l_max + 1)) {
                *s *= RESCALE_BY;
            }
        }
        if n == 0 {
            break;
        }
        n -= 1;
    }
    // current = f_{-1}
    stored[0] = current;

    let (sin, cos) = z.sin_cos();
    let j0 = sin / z;
    let jm1 = cos / z;
    let scale = if j0.abs() >= jm1.abs() {
        j0 / stored[1]
    } else {
        jm1 / stored[0]
    };
    for s in &mut stored {
        *s *= scale;
    }
    stored
}

/// Spherical Bessel function `j_l(z)`.
pub fn spherical_jn(l: u32, z: f64) -> Result<f64> {
    require_positive("argument z", z)?;
    ModeOrder::new(l)?;
    let seq = spherical_j_sequence(l as usize, z);
    Ok(seq[l as usize + 1])
}

/// Spherical Neumann function `y_l(z)`, by upward recurrence.
pub fn spherical_yn(l: u32, z: f64) -> Result<f64> {
    require_positive("argument z", z)?;
    ModeOrder::new(l)?;
    let seq = spherical_y_sequence(l as usize, z)?;
    Ok(seq[l as usize + 1])
}

/// `y_{-1}, y_0, …, y_{l_max}`.
fn spherical_y_sequence(l_max: usize, z: f64) -> Result<Vec<f64>> {
    let (sin, cos) = z.sin_cos();
    let mut out = Vec::with_capacity(l_max + 2);
    out.push(sin / z);
    out.push(-cos / z);
    for n in 0..l_max {
        let next = (2 * n + 1) as f64 / z * out[n + 1] - out[n];
        if !next.is_finite() || (half_scale(z) * next).abs() > OVERFLOW_THRESHOLD {
            return Err(Error::NeumannOverflow {
                nu: n as f64 + 1.5,
                z,
            });
        }
        out.push(next);
    }
    Ok(out)
}

fn half_scale(z: f64) -> f64 {
    (FRAC_2_PI * z).sqrt()
}

fn flush(v: f64, saturated: &mut bool) -> f64 {
    if v.abs() < UNDERFLOW_THRESHOLD {
        if v != 0.0 || !v.is_finite() {
            *saturated = true;
        }
        0.0
    } else {
        v
    }
}

/// `J_{k-1/2}(z)` for `k = 0..=l_max+1`, i.e. every half-integer order from
/// `-1/2` up to `l_max + 1/2`, from a single Miller pass.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfOrderTable {
    z: f64,
    values: Vec<f64>,
    saturated: bool,
}

impl HalfOrderTable {
    pub fn new(l_max: u32, z: f64) -> Result<Self> {
        require_positive("argument z", z)?;
        ModeOrder::new(l_max)?;
        let s = half_scale(z);
        let mut saturated = false;
        let values = spherical_j_sequence(l_max as usize, z)
            .into_iter()
            .map(|j| flush(s * j, &mut saturated))
            .collect();
        Ok(Self {
            z,
            values,
            saturated,
        })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn l_max(&self) -> u32 {
        (self.values.len() - 2) as u32
    }

    /// `J_{l+1/2}(z)`.
    pub fn j(&self, l: u32) -> f64 {
        self.values[l as usize + 1]
    }

    /// `J_{l-1/2}(z)`.
    pub fn j_prev(&self, l: u32) -> f64 {
        self.values[l as usize]
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }
}

/// `J_ν`, `N_ν` and their order-`ν-1` partners for `ν = l + 1/2`.
///
/// Fails for `z <= 0` and when `N_ν` leaves the representable range (tiny
/// `z` at large order). Underflowing `J` values are flushed to zero and
/// flagged in [`BesselPair::j_saturated`].
pub fn bessel_jn_half(order: ModeOrder, z: f64) -> Result<BesselPair> {
    require_positive("argument z", z)?;
    let l = order.l() as usize;
    let s = half_scale(z);
    let js = spherical_j_sequence(l, z);
    let ys = spherical_y_sequence(l, z)?;
    let n = s * ys[l + 1];
    let n_prev = s * ys[l];
    if !n.is_finite() || n.abs() > OVERFLOW_THRESHOLD {
        return Err(Error::NeumannOverflow { nu: order.nu(), z });
    }
    let mut j_saturated = false;
    let j = flush(s * js[l + 1], &mut j_saturated);
    let j_prev = flush(s * js[l], &mut j_saturated);
    Ok(BesselPair {
        order,
        z,
        j,
        n,
        j_prev,
        n_prev,
        j_saturated,
    })
}

/// `(J_ν(z), J_{ν-1}(z))` without touching the Neumann functions.
pub fn bessel_j_pair(order: ModeOrder, z: f64) -> Result<(f64, f64)> {
    let table = HalfOrderTable::new(order.l(), z)?;
    Ok((table.j(order.l()), table.j_prev(order.l())))
}

/// `y J_ν(x) J_{ν-1}(y) - x J_ν(y) J_{ν-1}(x)` in the orientation given.
#[inline]
fn wronskian_raw(x: f64, jx: f64, jx_prev: f64, y: f64, jy: f64, jy_prev: f64) -> f64 {
    y * jx * jy_prev - x * jy * jx_prev
}

/// Pseudo-Wronskian from precomputed tables; antisymmetric by construction.
pub fn pseudo_wronskian_from(tx: &HalfOrderTable, ty: &HalfOrderTable, l: u32) -> f64 {
    let (x, y) = (tx.z(), ty.z());
    if x <= y {
        wronskian_raw(x, tx.j(l), tx.j_prev(l), y, ty.j(l), ty.j_prev(l))
    } else {
        -wronskian_raw(y, ty.j(l), ty.j_prev(l), x, tx.j(l), tx.j_prev(l))
    }
}

/// `W̃_ν(x, y) = det[[J_ν(x), J_ν(y)], [x J'_ν(x), y J'_ν(y)]]`.
///
/// The `ν J_ν` parts of the derivative cancel, leaving
/// `y J_ν(x) J_{ν-1}(y) - x J_ν(y) J_{ν-1}(x)`.
pub fn pseudo_wronskian(order: ModeOrder, x: f64, y: f64) -> Result<f64> {
    require_positive("argument x", x)?;
    require_positive("argument y", y)?;
    let tx = HalfOrderTable::new(order.l(), x)?;
    let ty = HalfOrderTable::new(order.l(), y)?;
    Ok(pseudo_wronskian_from(&tx, &ty, order.l()))
}

/// `lim_{y→x} W̃_ν(x, y) / (x - y)` from a table at `x`.
pub fn diagonal_term_from(t: &HalfOrderTable, l: u32) -> f64 {
    let x = t.z();
    let nu = l as f64 + 0.5;
    let (a, b) = (t.j(l), t.j_prev(l));
    x * (a * a + b * b) - 2.0 * nu * a * b
}

/// `lim_{y→x} W̃_ν(x, y) / (x - y) = x [J_ν² + J_{ν-1}²] - 2ν J_ν J_{ν-1}`.
///
/// Only its square enters the kernel, so the overall sign is a convention.
pub fn diagonal_kernel_term(order: ModeOrder, x: f64) -> Result<f64> {
    require_positive("argument x", x)?;
    let t = HalfOrderTable::new(order.l(), x)?;
    Ok(diagonal_term_from(&t, order.l()))
}

/// Natural log of the leading large-order estimate of `|W̃_ν(x,y)| / |x² - y²|`.
pub(crate) fn ln_large_order_quotient(nu: f64, x: f64, y: f64) -> f64 {
    let ln_half_e = (E / 2.0).ln();
    -(2.0 * PI).ln() - 0.5 * nu.ln() - 1.5 * (nu + 1.0).ln()
        + nu * ((x * y).ln() - (nu * (nu + 1.0)).ln())
        + (2.0 * nu + 1.0) * ln_half_e
}

/// Whether `ν > e·max(x, y)/2`.
pub fn in_large_order_regime(nu: f64, x: f64, y: f64) -> bool {
    nu > E * x.max(y) / 2.0
}

/// Upper bound on `|W̃_ν(x, y)|` for orders past the turning point.
///
/// Returns [`LARGE_ORDER_SAFETY`] times the leading asymptotic form
/// `|x²-y²| / (2π ν^{1/2} (ν+1)^{3/2}) · (xy/(ν(ν+1)))^ν · (e/2)^{2ν+1}`.
pub fn large_order_bound(order: ModeOrder, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::domain("arguments x, y", "finite and >= 0", x.min(y)));
    }
    let nu = order.nu();
    if !in_large_order_regime(nu, x, y) {
        return Err(Error::AsymptoticRegime {
            nu,
            required: E * x.max(y) / 2.0,
        });
    }
    let diff = (x * x - y * y).abs();
    if diff == 0.0 || x == 0.0 || y == 0.0 {
        return Ok(0.0);
    }
    Ok(LARGE_ORDER_SAFETY * diff * ln_large_order_quotient(nu, x, y).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(l: u32) -> ModeOrder {
        ModeOrder::new(l).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn mode_order_nu_is_l_plus_half() {
        for l in [0, 1, 7, 60] {
            let o = order(l);
            assert_eq!(o.nu() - o.l() as f64, 0.5);
        }
        assert!(ModeOrder::photon(0).is_err());
        assert!(ModeOrder::new(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn closed_forms_low_order() {
        for &z in &[0.3, 1.0, 2.0, 7.5, 40.0] {
            let p = bessel_jn_half(order(0), z).unwrap();
            let s = (2.0 / (PI * z)).sqrt();
            assert!(rel(p.j, s * z.sin()) < 1e-14);
            assert!(rel(p.j_prev, s * z.cos()) < 1e-14);
            assert!(rel(p.n, -s * z.cos()) < 1e-14);
            assert!(rel(p.n_prev, s * z.sin()) < 1e-14);

            let p1 = bessel_jn_half(order(1), z).unwrap();
            let j32 = s * (z.sin() / z - z.cos());
            assert!(rel(p1.j, j32) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn j_half_vanishes_at_pi() {
        let p = bessel_jn_half(order(0), PI).unwrap();
        assert!(p.j.abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(matches!(
            bessel_jn_half(order(2), 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(bessel_jn_half(order(2), -1.0).is_err());
        assert!(bessel_jn_half(order(2), f64::NAN).is_err());
        assert!(pseudo_wronskian(order(2), 0.0, 1.0).is_err());
    }

    #[test]
    fn neumann_overflow_is_reported() {
        let err = bessel_jn_half(order(200), 1e-3).unwrap_err();
        assert!(matches!(err, Error::NeumannOverflow { .. }), "{err:?}");
    }

    #[test]
    fn tiny_j_is_flushed_and_flagged() {
        let t = HalfOrderTable::new(120, 1e-3).unwrap();
        assert_eq!(t.j(120), 0.0);
        assert!(t.saturated());
        assert!(t.j(1) > 0.0);
        for k in 0..=120 {
            assert!(t.j(k).is_finite());
        }
    }

    #[test]
    fn wronskian_spot_checks() {
        for &(l, z) in &[(1, 0.1), (10, 3.0), (30, 0.5), (60, 100.0), (5, 1e3)] {
            let p = bessel_jn_half(order(l), z).unwrap();
            assert!(rel(p.scaled_wronskian(), FRAC_2_PI) < 1e-12, "l={l} z={z}");
        }
    }

    #[test]
    fn recurrence_consistency() {
        // J_{ν+1} = (2ν/z) J_ν - J_{ν-1}
        let z = 4.3;
        let t = HalfOrderTable::new(20, z).unwrap();
        for l in 1..20 {
            let nu = l as f64 + 0.5;
            let lhs = t.j(l + 1);
            let rhs = 2.0 * nu / z * t.j(l) - t.j_prev(l);
            assert!(rel(lhs, rhs) < 1e-9 || (lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn pseudo_wronskian_antisymmetric_and_zero_on_diagonal() {
        let o = order(3);
        assert_eq!(pseudo_wronskian(o, 2.2, 2.2).unwrap(), 0.0);
        let a = pseudo_wronskian(o, 1.3, 5.9).unwrap();
        let b = pseudo_wronskian(o, 5.9, 1.3).unwrap();
        assert_eq!(a + b, 0.0);
    }

    #[test]
    fn pseudo_wronskian_matches_upper_order_form() {
        // W̃ = -det[[J_ν(x), J_ν(y)], [x J_{ν+1}(x), y J_{ν+1}(y)]]
        let l = 2;
        let (x, y) = (3.0, 4.0);
        let tx = HalfOrderTable::new(l + 1, x).unwrap();
        let ty = HalfOrderTable::new(l + 1, y).unwrap();
        let upper = -(tx.j(l) * y * ty.j(l + 1) - ty.j(l) * x * tx.j(l + 1));
        let w = pseudo_wronskian(order(l), x, y).unwrap();
        assert!(rel(w, upper) < 1e-13, "{w} vs {upper}");
    }

    #[test]
    fn diagonal_term_matches_upper_order_form() {
        // x [J_ν² + J_{ν+1}²] - 2ν J_ν J_{ν+1} is the same limit
        for &x in &[0.7, 3.0, 11.0, 25.0] {
            for l in 1..12 {
                let t = HalfOrderTable::new(l + 1, x).unwrap();
                let nu = l as f64 + 0.5;
                let (a, c) = (t.j(l), t.j(l + 1));
                let upper = x * (a * a + c * c) - 2.0 * nu * a * c;
                let d = diagonal_term_from(&t, l);
                assert!((d - upper).abs() < 1e-13 * (x + 1.0), "x={x} l={l}");
            }
        }
    }

    #[test]
    fn diagonal_term_vanishes_at_origin() {
        for l in 1..6 {
            assert!(diagonal_kernel_term(order(l), 1e-6).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn large_order_bound_requires_regime() {
        let err = large_order_bound(order(3), 3.0, 4.0).unwrap_err();
        assert!(matches!(err, Error::AsymptoticRegime { .. }));
        let b = large_order_bound(order(30), 3.0, 4.0).unwrap();
        let w = pseudo_wronskian(order(30), 3.0, 4.0).unwrap();
        assert!(b >= w.abs());
    }

    #[test]
    fn large_order_bound_decreases_with_order() {
        let mut prev = f64::INFINITY;
        for l in 6..80 {
            let b = large_order_bound(order(l), 3.0, 4.0).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 1e-60);
    }
}
