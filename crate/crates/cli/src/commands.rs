use std::fs::File;
use std::io::{self, BufWriter, Write};

use bubblecasimir::kernel::{d_approx, d_exact, f_exact_with, f_factorized};
use bubblecasimir::oracles::{run_all, IdentityReport};
use bubblecasimir::spectrum::{
    infinite_volume_total, SpectrumModel, INFINITE_VOLUME_MEAN_RATIO, REFERENCE_CASES,
    TABLE_PHOTON_TOLERANCE, TABLE_RATIO_TOLERANCE,
};
use bubblecasimir::{MediumConfig, Truncation};
use serde_json::json;

use crate::config::RunConfig;
use crate::CliError;

/// `LO:HI` with `0 <= LO < HI`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("range must be `LO:HI` with 0 <= LO < HI, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Cell centres of `n` equal cells, so a range starting at 0 never hits `x = 0`.
fn centred_grid((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn csv_sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Summaries go to stdout unless the CSV already does.
fn summary(cfg: &RunConfig, line: &str) {
    if cfg.output_path.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn truncation(cfg: &RunConfig) -> Truncation {
    cfg.l_max_override.map_or(Truncation::Adaptive, Truncation::Fixed)
}

pub fn spectrum(cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    let m = cfg.model()?;
    let r = m.totals(cfg.grid_points)?;
    let mut out = csv_sink(cfg)?;
    writeln!(out, "x,dn_dx,dn_dx_infinite_volume,frequency_phz")?;
    for (&x, &d) in r.x_grid.iter().zip(&r.dn_dx) {
        writeln!(out, "{x},{d},{},{}", m.infinite_volume_dn_dx(x), m.frequency_phz(x))?;
    }
    out.flush()?;
    let line = if json {
        json!({
            "n_gas_in": m.cfg.n_gas_in,
            "n_gas_out": m.cfg.n_gas_out,
            "kernel": m.kernel,
            "x_star": m.cut.x_star,
            "y_star": m.cut.y_star,
            "total_photons": r.total_photons,
            "mean_x_over_xstar": r.mean_x_over_xstar,
            "energy_ev": r.energy_ev,
            "mean_energy_ev": r.mean_energy_ev,
            "quadrature_error": r.quadrature_error,
        })
        .to_string()
    } else {
        format!(
            "N = {:.6e}  <E>/hOmega_max = {:.6}  <E> = {:.6} eV  (x_* = {}, quadrature error {:.1e})",
            r.total_photons, r.mean_x_over_xstar, r.mean_energy_ev, m.cut.x_star, r.quadrature_error
        )
    };
    summary(cfg, &line);
    Ok(())
}

pub fn table(cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut failed = 0;
    for row in REFERENCE_CASES {
        let mut m = SpectrumModel::new(MediumConfig::with_indices(row.n_in, row.n_out))?;
        m.quad = cfg.quad;
        m.kernel = cfg.kernel_mode;
        if let Some(l) = cfg.l_max_override {
            m.l_max = l;
        }
        let r = m.totals(2)?;
        let dn = (r.total_photons - row.photons) / row.photons;
        let dr = r.mean_x_over_xstar - row.mean_ratio;
        let ok = dn.abs() <= TABLE_PHOTON_TOLERANCE && dr.abs() <= TABLE_RATIO_TOLERANCE;
        if !ok {
            failed += 1;
        }
        rows.push((row, r.total_photons, r.mean_x_over_xstar, dn, dr, ok));
    }
    if json {
        let recs: Vec<_> = rows
            .iter()
            .map(|(row, n, ratio, dn, dr, ok)| {
                json!({
                    "n_in": row.n_in, "n_out": row.n_out,
                    "photons": n, "mean_ratio": ratio,
                    "reference_photons": row.photons, "reference_mean_ratio": row.mean_ratio,
                    "photons_rel_dev": dn, "mean_ratio_abs_dev": dr, "passed": ok,
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(recs));
    } else {
        println!(
            "{:>8} {:>6} {:>12} {:>8} {:>10} {:>8} {:>9} {:>9}  status",
            "n_in", "n_out", "N", "<E>/hW", "N ref", "ref", "dN", "d<E>"
        );
        for (row, n, ratio, dn, dr, ok) in &rows {
            println!(
                "{:>8} {:>6} {:>12.4e} {:>8.4} {:>10.3e} {:>8.3} {:>+8.2}% {:>+9.4}  {}",
                row.n_in,
                row.n_out,
                n,
                ratio,
                row.photons,
                row.mean_ratio,
                100.0 * dn,
                dr,
                if *ok { "ok" } else { "OUT OF TOLERANCE" }
            );
        }
    }
    if failed > 0 {
        return Err(CliError::CheckFailed(format!(
            "{failed} row(s) outside ±{}% in N or ±{} in <E>/hOmega_max",
            100.0 * TABLE_PHOTON_TOLERANCE,
            TABLE_RATIO_TOLERANCE
        )));
    }
    Ok(())
}

pub fn kernel_dump(
    cfg: &RunConfig,
    xr: (f64, f64),
    yr: (f64, f64),
    steps: usize,
) -> Result<(), CliError> {
    if steps == 0 {
        return Err(CliError::Usage("steps must be >= 1".into()));
    }
    let cut = cfg.cutoff()?;
    let trunc = truncation(cfg);
    let xs = centred_grid(xr, steps);
    let ys = centred_grid(yr, steps);
    let mut out = csv_sink(cfg)?;
    writeln!(out, "x,y,f_exact,f_factorized")?;
    for &x in &xs {
        for &y in &ys {
            let f = f_exact_with(x, y, trunc, cfg.a_factors, &cfg.medium, &cut)?;
            writeln!(out, "{x},{y},{},{}", f.value, f_factorized(x, y))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn diagonal(cfg: &RunConfig, range: (f64, f64)) -> Result<(), CliError> {
    let trunc = truncation(cfg);
    let mut out = csv_sink(cfg)?;
    writeln!(out, "x,d_exact,d_approx,l_used,truncation_error")?;
    for x in centred_grid(range, cfg.grid_points) {
        let d = d_exact(x, trunc)?;
        writeln!(out, "{x},{},{},{},{}", d.value, d_approx(x), d.l_used, d.truncation_error_estimate)?;
    }
    out.flush()?;
    Ok(())
}

pub fn infinite_volume(cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    let m = cfg.model()?;
    let x_hi = m.cut.x_star + bubblecasimir::spectrum::SMEAR_WIDTH;
    let mut out = csv_sink(cfg)?;
    writeln!(out, "x,dn_dx_infinite_volume,frequency_phz")?;
    let n = cfg.grid_points;
    for i in 0..n {
        let x = x_hi * i as f64 / (n - 1) as f64;
        writeln!(out, "{x},{},{}", m.infinite_volume_dn_dx(x), m.frequency_phz(x))?;
    }
    out.flush()?;
    let total = infinite_volume_total(&m.cfg, &m.cut);
    let line = if json {
        json!({
            "total_photons": total,
            "mean_x_over_xstar": INFINITE_VOLUME_MEAN_RATIO,
            "x_star": m.cut.x_star,
        })
        .to_string()
    } else {
        format!("N = {total:.6e}  <E>/hOmega_max = {INFINITE_VOLUME_MEAN_RATIO}  (x_* = {})", m.cut.x_star)
    };
    summary(cfg, &line);
    Ok(())
}

pub fn check(threshold_scale: f64, seed: u64, json: bool) -> Result<(), CliError> {
    if !(threshold_scale.is_finite() && threshold_scale > 0.0) {
        return Err(CliError::Usage("threshold scale must be positive".into()));
    }
    let reports = run_all(threshold_scale, seed)?;
    if json {
        for r in &reports {
            println!("{}", serde_json::to_string(r).expect("report serializes"));
        }
    } else {
        for r in &reports {
            println!("{r}");
        }
    }
    let mut failed: Vec<&IdentityReport> = reports.iter().filter(|r| !r.passed).collect();
    if failed.is_empty() {
        return Ok(());
    }
    failed.sort_by(|a, b| {
        let ka = a.max_rel_error / a.threshold;
        let kb = b.max_rel_error / b.threshold;
        kb.total_cmp(&ka)
    });
    let worst: Vec<String> = failed
        .iter()
        .take(5)
        .map(|r| format!("{} ({:.2e} > {:.1e})", r.name, r.max_rel_error, r.threshold))
        .collect();
    Err(CliError::CheckFailed(format!(
        "{} of {} checks failed; worst: {}",
        failed.len(),
        reports.len(),
        worst.join(", ")
    )))
}
