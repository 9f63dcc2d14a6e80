//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use bubblecasimir::kernel::CutoffProfile;
use bubblecasimir::spectrum::SpectrumModel;
use bubblecasimir::{AFactors, KernelMode, MediumConfig, QuadratureSpec};

use crate::CliError;

pub const DEFAULT_GRID_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub medium: MediumConfig,
    pub quad: QuadratureSpec,
    pub kernel_mode: KernelMode,
    pub a_factors: AFactors,
    pub l_max_override: Option<u32>,
    pub x_star_override: Option<f64>,
    pub y_star_override: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub grid_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            medium: MediumConfig::default(),
            quad: QuadratureSpec::default(),
            kernel_mode: KernelMode::default(),
            a_factors: AFactors::Unit,
            l_max_override: None,
            x_star_override: None,
            y_star_override: None,
            output_path: None,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and `#` comments are ignored; unknown or repeated keys
    /// are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config(format!("line {line}: expected `key = value`")));
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {line}: `{key}` given twice")));
            }
            match key {
                "n_gas_in" => cfg.medium.n_gas_in = parse_num(key, value, line)?,
                "n_gas_out" => cfg.medium.n_gas_out = parse_num(key, value, line)?,
                "n_liquid" => cfg.medium.n_liquid = parse_num(key, value, line)?,
                "radius" => cfg.medium.radius = parse_num(key, value, line)?,
                "k_observed" => cfg.medium.k_observed = parse_num(key, value, line)?,
                "rel_tol" => cfg.quad.rel_tol = parse_num(key, value, line)?,
                "abs_tol" => cfg.quad.abs_tol = parse_num(key, value, line)?,
                "max_subdivisions" => cfg.quad.max_subdivisions = parse_num(key, value, line)?,
                "include_tails" => cfg.quad.include_tails = parse_num(key, value, line)?,
                "tail_upper_bound" => cfg.quad.tail_upper_bound = parse_num(key, value, line)?,
                "kernel" => {
                    cfg.kernel_mode = value
                        .parse()
                        .map_err(|e| CliError::Config(format!("line {line}: {e}")))?
                }
                "a_factors" => {
                    cfg.a_factors = match value {
                        "unit" => AFactors::Unit,
                        "matched" => AFactors::Matched,
                        _ => {
                            return Err(CliError::Config(format!(
                                "line {line}: a_factors must be `unit` or `matched`"
                            )))
                        }
                    }
                }
                "l_max" => cfg.l_max_override = Some(parse_num(key, value, line)?),
                "x_star" => cfg.x_star_override = Some(parse_num(key, value, line)?),
                "y_star" => cfg.y_star_override = Some(parse_num(key, value, line)?),
                "output" => cfg.output_path = Some(PathBuf::from(value)),
                "grid_points" => cfg.grid_points = parse_num(key, value, line)?,
                _ => return Err(CliError::Config(format!("line {line}: unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_points < 2 {
            return Err(CliError::Config("grid_points must be >= 2".into()));
        }
        if self.l_max_override == Some(0) {
            return Err(CliError::Config("l_max must be >= 1".into()));
        }
        for (name, v) in [("x_star", self.x_star_override), ("y_star", self.y_star_override)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        self.medium.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.quad.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn cutoff(&self) -> Result<CutoffProfile, CliError> {
        CutoffProfile::with_overrides(&self.medium, self.x_star_override, self.y_star_override)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn model(&self) -> Result<SpectrumModel, CliError> {
        let mut m = SpectrumModel::new(self.medium).map_err(|e| CliError::Config(e.to_string()))?;
        m.cut = self.cutoff()?;
        m.quad = self.quad;
        m.kernel = self.kernel_mode;
        m.a_factors = self.a_factors;
        if let Some(l) = self.l_max_override {
            m.l_max = l;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_fields_and_comments() {
        let cfg = RunConfig::parse(
            "# scenario\nn_gas_in = 71\nn_gas_out=25 # trailing\nkernel = exact\nl_max = 9\ngrid_points = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.medium.n_gas_in, 71.0);
        assert_eq!(cfg.medium.n_gas_out, 25.0);
        assert_eq!(cfg.kernel_mode, KernelMode::Exact);
        assert_eq!(cfg.model().unwrap().l_max, 9);
        assert_eq!(cfg.grid_points, 3);
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        assert!(matches!(RunConfig::parse("radus = 3"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("radius = 3\nradius = 4"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("radius"), Err(CliError::Config(_))));
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(RunConfig::parse("grid_points = 1").is_err());
        assert!(RunConfig::parse("x_star = -2").is_err());
        assert!(RunConfig::parse("radius = abc").is_err());
        assert!(RunConfig::parse("n_liquid = 0").is_err());
    }

    #[test]
    fn overrides_reach_the_model() {
        let m = RunConfig::parse("x_star = 8\ny_star = 9").unwrap().model().unwrap();
        assert_eq!((m.cut.x_star, m.cut.y_star), (8.0, 9.0));
    }
}
