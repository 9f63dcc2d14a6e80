//! Static mode structure at the bubble wall.
//!
//! Inside the bubble a radial mode is `A J_ν(y r/R)`; in the liquid it is
//! `B J_ν(𝒩 y r/R) + C N_ν(𝒩 y r/R)` with `𝒩 = n_liquid / n_gas`. Continuity
//! of the field and its radial derivative at `r = R` fixes `B, C` in terms of
//! `A`, and `B² + C² = 1` fixes `|A|`.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::special_functions::{bessel_jn_half, ModeOrder};

/// Physical scenario: refractive indices, bubble radius, observed cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumConfig {
    /// Gas index before the transition.
    pub n_gas_in: f64,
    /// Gas index after the transition.
    pub n_gas_out: f64,
    pub n_liquid: f64,
    /// Radius of the light-emitting region in nm.
    pub radius: f64,
    /// Observed momentum cutoff at infinity in rad/nm.
    pub k_observed: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            n_gas_in: 2.0e4,
            n_gas_out: 1.0,
            n_liquid: 1.3,
            radius: 500.0,
            k_observed: 2.0 * std::f64::consts::PI / 200.0,
        }
    }
}

impl MediumConfig {
    /// Default geometry and liquid with the given gas indices.
    pub fn with_indices(n_gas_in: f64, n_gas_out: f64) -> Self {
        Self {
            n_gas_in,
            n_gas_out,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("n_gas_in", self.n_gas_in)?;
        require_positive("n_gas_out", self.n_gas_out)?;
        require_positive("n_liquid", self.n_liquid)?;
        require_positive("radius", self.radius)?;
        require_positive("k_observed", self.k_observed)?;
        Ok(())
    }

    /// Largest angular momentum seen at infinity: the integer part of `R·K`.
    ///
    /// With the default geometry `R·K = 5π ≈ 15.7`, giving 15.
    pub fn l_max_outside(&self) -> u32 {
        (self.radius * self.k_observed).floor() as u32
    }

    /// `x_* = y_* = (n_gas_out / n_liquid) · l_max_outside`.
    pub fn x_star(&self) -> f64 {
        self.n_gas_out / self.n_liquid * self.l_max_outside() as f64
    }

    /// Default angular-momentum truncation for the exact kernel.
    pub fn default_l_max(&self) -> u32 {
        (self.x_star().round() as u32).max(1)
    }

    /// `𝒩_in = n_liquid / n_gas_in`.
    pub fn index_ratio_in(&self) -> f64 {
        self.n_liquid / self.n_gas_in
    }

    /// `𝒩_out = n_liquid / n_gas_out`.
    pub fn index_ratio_out(&self) -> f64 {
        self.n_liquid / self.n_gas_out
    }
}

/// `|A|²`, `B`, `C` and `|Ξ|` for one static mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingCoefficients {
    pub a_sq: f64,
    pub b: f64,
    pub c: f64,
    pub xi_abs: f64,
}

impl MatchingCoefficients {
    pub fn new(order: ModeOrder, y: f64, index_ratio: f64, kappa: f64, n_liquid: f64) -> Result<Self> {
        let d = Determinants::new(order, y, index_ratio)?;
        let (b, c) = d.bc();
        Ok(Self {
            a_sq: d.a_sq(),
            b,
            c,
            xi_abs: normalization_xi(kappa, n_liquid)?,
        })
    }
}

/// The two 2×2 determinants shared by `A`, `B` and `C`.
struct Determinants {
    /// `det[J_ν(y), N_ν(u); y J_{ν-1}(y), u N_{ν-1}(u)]`
    d1: f64,
    /// `det[J_ν(y), J_ν(u); y J_{ν-1}(y), u J_{ν-1}(u)]`
    d2: f64,
}

impl Determinants {
    fn new(order: ModeOrder, y: f64, index_ratio: f64) -> Result<Self> {
        require_positive("argument y", y)?;
        require_positive("index ratio", index_ratio)?;
        let u = index_ratio * y;
        let inner = bessel_jn_half(order, y)?;
        let outer = bessel_jn_half(order, u)?;
        let (jy, yjy) = (inner.j, y * inner.j_prev);
        Ok(Self {
            d1: jy * u * outer.n_prev - outer.n * yjy,
            d2: jy * u * outer.j_prev - outer.j * yjy,
        })
    }

    fn a_sq(&self) -> f64 {
        let norm = self.d1.hypot(self.d2);
        let a = (2.0 / std::f64::consts::PI) / norm;
        a * a
    }

    fn bc(&self) -> (f64, f64) {
        let norm = self.d1.hypot(self.d2);
        (self.d1 / norm, -self.d2 / norm)
    }
}

/// `|A_ν|² = (4/π²) / (d1² + d2²)`.
pub fn coefficient_a_sq(order: ModeOrder, y: f64, index_ratio: f64) -> Result<f64> {
    Ok(Determinants::new(order, y, index_ratio)?.a_sq())
}

/// `(B, C)` normalised to `B² + C² = 1`, with `A > 0` so `B = 1` when `𝒩 = 1`.
pub fn coefficients_bc(order: ModeOrder, y: f64, index_ratio: f64) -> Result<(f64, f64)> {
    Ok(Determinants::new(order, y, index_ratio)?.bc())
}

/// `|Ξ| = 1/(√(2 n_liquid) κ)`.
pub fn normalization_xi(kappa: f64, n_liquid: f64) -> Result<f64> {
    require_positive("kappa", kappa)?;
    require_positive("n_liquid", n_liquid)?;
    Ok(1.0 / ((2.0 * n_liquid).sqrt() * kappa))
}

/// Residuals of the two matching equations for `(A, B, C)`, each relative to
/// the largest term in its row.
///
/// Row one is continuity of the field, row two of `y J'` (reduced with the
/// `ν J_ν` part of the derivative removed).
pub fn matching_residuals(order: ModeOrder, y: f64, index_ratio: f64) -> Result<[f64; 2]> {
    let d = Determinants::new(order, y, index_ratio)?;
    let a = d.a_sq().sqrt();
    let (b, c) = d.bc();
    let u = index_ratio * y;
    let inner = bessel_jn_half(order, y)?;
    let outer = bessel_jn_half(order, u)?;
    let row = |terms: [f64; 3]| {
        let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        if scale == 0.0 {
            0.0
        } else {
            (terms[0] - terms[1] - terms[2]).abs() / scale
        }
    };
    Ok([
        row([a * inner.j, b * outer.j, c * outer.n]),
        row([a * inner.z_dj(), b * outer.z_dj(), c * outer.z_dn()]),
    ])
}

/// Envelope of the large-argument form of `|A|²`: `[1/M, M]`, `M = max(𝒩, 1/𝒩)`.
pub fn large_argument_envelope(index_ratio: f64) -> Result<(f64, f64)> {
    require_positive("index ratio", index_ratio)?;
    let m = index_ratio.max(1.0 / index_ratio);
    Ok((1.0 / m, m))
}

impl std::str::FromStr for MediumConfig {
    type Err = Error;

    /// `n_in,n_out` shorthand with default geometry.
    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split(',').map(|t| t.trim().parse::<f64>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => {
                let cfg = Self::with_indices(a, b);
                cfg.validate()?;
                Ok(cfg)
            }
            _ => Err(Error::Config(format!("expected `n_in,n_out`, got `{s}`"))),
        }
    }
}
