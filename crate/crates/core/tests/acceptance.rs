//! Acceptance criteria, one test per criterion. Each prints a single
//! `AC<n> PASS|FAIL` line with the measured figures before asserting.

use std::f64::consts::PI;

use bubblecasimir::kernel::{d_approx, d_exact, D_ASYMPTOTE};
use bubblecasimir::oracles::{
    hankel_suite, matching_suite, spectral_delta_checks, wronskian_suite, DEFAULT_SEED,
};
use bubblecasimir::spectrum::{
    infinite_volume_dn_dx, infinite_volume_total, SpectrumModel, INFINITE_VOLUME_MEAN_RATIO,
    REFERENCE_CASES, TABLE_PHOTON_TOLERANCE, TABLE_RATIO_TOLERANCE,
};
use bubblecasimir::{KernelMode, MediumConfig, Truncation};

fn report(id: u32, ok: bool, detail: &str) {
    println!("AC{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn ac1_table_reproduction() {
    let start = std::time::Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for row in REFERENCE_CASES {
        let m = SpectrumModel::new(MediumConfig::with_indices(row.n_in, row.n_out)).unwrap();
        let r = m.totals(2).unwrap();
        let dn = (r.total_photons - row.photons) / row.photons;
        let dr = r.mean_x_over_xstar - row.mean_ratio;
        let row_ok = dn.abs() <= TABLE_PHOTON_TOLERANCE && dr.abs() <= TABLE_RATIO_TOLERANCE;
        ok &= row_ok;
        lines.push(format!(
            "({}, {}): N={:.4e} ({:+.2}%) ratio={:.4} ({:+.4})",
            row.n_in,
            row.n_out,
            r.total_photons,
            100.0 * dn,
            r.mean_x_over_xstar,
            dr
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    report(1, ok, &format!("{} [{secs:.1}s]", lines.join("; ")));
    assert!(ok);
}

#[test]
fn ac2_infinite_volume_oracle() {
    let mut worst = 0.0_f64;
    for row in REFERENCE_CASES {
        let m = SpectrumModel::new(MediumConfig::with_indices(row.n_in, row.n_out))
            .unwrap()
            .with_kernel(KernelMode::DeltaReplacement);
        let r = m.totals(2).unwrap();
        let closed = infinite_volume_total(&m.cfg, &m.cut);
        worst = worst
            .max((r.total_photons - closed).abs() / closed)
            .max((r.mean_x_over_xstar - INFINITE_VOLUME_MEAN_RATIO).abs() / INFINITE_VOLUME_MEAN_RATIO);
    }
    let ok = worst <= 1e-6;
    report(2, ok, &format!("max relative deviation {worst:.2e} (tolerance 1e-6)"));
    assert!(ok);
}

#[test]
fn ac3_wronskian_identity() {
    let r = wronskian_suite(10_000, DEFAULT_SEED, 1e-10).unwrap();
    report(3, r.passed, &format!("{} samples, max rel {:.2e} (tolerance 1e-10)", r.samples, r.max_rel_error));
    assert!(r.passed);
}

#[test]
fn ac4_matching_invariant() {
    let [norm, res] = matching_suite(1_000, DEFAULT_SEED, 1e-12, 1e-10).unwrap();
    let ok = norm.passed && res.passed;
    report(
        4,
        ok,
        &format!(
            "|B²+C²-1| max {:.2e} (1e-12), residual max {:.2e} (1e-10)",
            norm.max_abs_error, res.max_abs_error
        ),
    );
    assert!(ok);
}

#[test]
fn ac5_diagonal_asymptote() {
    let d40 = d_exact(40.0, Truncation::Adaptive).unwrap();
    let asym_dev = (d40.value - D_ASYMPTOTE).abs() / D_ASYMPTOTE;
    let mut worst = (0.0_f64, 0.0_f64);
    let mut band_fail = Vec::new();
    for i in 0..=120 {
        let x = 2.0 + 0.1 * i as f64;
        let d = d_exact(x, Truncation::Adaptive).unwrap().value;
        let dev = (d - d_approx(x)).abs() / d_approx(x);
        if dev > worst.1 {
            worst = (x, dev);
        }
        if dev > 0.15 {
            band_fail.push(x);
        }
    }
    let ok = asym_dev <= 0.02 && band_fail.is_empty();
    let span = match (band_fail.first(), band_fail.last()) {
        (Some(a), Some(b)) => format!(", outside band for x in [{a:.1}, {b:.1}]"),
        _ => String::new(),
    };
    report(
        5,
        ok,
        &format!(
            "D(40)={:.6} vs 1/2π²={:.6} ({:.2}%); worst D/D_approx deviation {:.1}% at x={:.1}{span}",
            d40.value,
            D_ASYMPTOTE,
            100.0 * asym_dev,
            100.0 * worst.1,
            worst.0
        ),
    );
    assert!(ok);
}

/// Measured relative gap between exact and factorized totals, pinned.
const PINNED_FACTORIZATION_GAP: f64 = -0.0512;

#[test]
fn ac6_factorization_validation() {
    let base = SpectrumModel::new(MediumConfig::with_indices(2.0e4, 1.0)).unwrap();
    let fact = base.totals(2).unwrap();
    let exact = base.with_kernel(KernelMode::Exact).totals(2).unwrap();
    let gap = (exact.total_photons - fact.total_photons) / fact.total_photons;
    let ok = gap.abs() <= 0.10;
    let pinned = (gap - PINNED_FACTORIZATION_GAP).abs() <= 0.005;
    report(
        6,
        ok && pinned,
        &format!(
            "N exact={:.4e} factorized={:.4e} gap {:+.2}% (limit 10%, pinned {:+.2}%)",
            exact.total_photons,
            fact.total_photons,
            100.0 * gap,
            100.0 * PINNED_FACTORIZATION_GAP
        ),
    );
    assert!(ok);
    assert!(pinned, "factorization gap drifted from its pinned value");
}

#[test]
fn ac7_hankel_and_delta_suites() {
    let hankel = hankel_suite(100, DEFAULT_SEED, 1e-8).unwrap();
    let delta = spectral_delta_checks().unwrap();
    let ok = hankel.iter().chain(&delta).all(|r| r.passed);
    let parts: Vec<String> = hankel
        .iter()
        .chain(&delta)
        .map(|r| format!("{} {:.2e}", r.name, r.max_rel_error))
        .collect();
    report(7, ok, &parts.join("; "));
    assert!(ok);
}

#[test]
fn ac8_null_production() {
    let mut ok = true;
    for kernel in [KernelMode::Factorized, KernelMode::Exact, KernelMode::DeltaReplacement] {
        let m = SpectrumModel::new(MediumConfig::with_indices(1.7, 1.7)).unwrap().with_kernel(kernel);
        let r = m.totals(25).unwrap();
        ok &= r.total_photons == 0.0 && r.dn_dx.iter().all(|&v| v == 0.0);
    }
    report(8, ok, "n_in = n_out gives identically zero dN/dx and N for all kernels");
    assert!(ok);
}

#[test]
fn ac9_finite_volume_smearing() {
    let m = SpectrumModel::new(MediumConfig::with_indices(2.0e4, 1.0)).unwrap();
    let x_star = m.cut.x_star;
    let mut worst = (0.0_f64, 0.0_f64);
    for i in 0..=60 {
        let x = 2.0 + 0.1 * i as f64;
        let fin = m.dn_dx(x).unwrap().0;
        let inf = infinite_volume_dn_dx(x, &m.cfg, &m.cut);
        let dev = (fin - inf).abs() / inf;
        if dev > worst.1 {
            worst = (x, dev);
        }
    }
    let bulk_ok = worst.1 <= 0.10;

    let samples: Vec<(f64, f64)> = (0..=290)
        .map(|i| {
            let x = 0.05 * i as f64;
            (x, m.dn_dx(x).unwrap().0)
        })
        .collect();
    let peak = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let at_end = m.dn_dx(14.5).unwrap().0;
    let past: Vec<f64> = samples.iter().filter(|s| s.0 >= x_star).map(|s| s.1).collect();
    let smooth = past.windows(2).all(|w| w[1] <= w[0]);
    let decay_ok = at_end < 0.10 * peak && smooth;

    let step_ok = infinite_volume_dn_dx(x_star + 1e-12, &m.cfg, &m.cut) == 0.0
        && infinite_volume_dn_dx(x_star, &m.cfg, &m.cut) > 0.0;

    let ok = bulk_ok && decay_ok && step_ok;
    report(
        9,
        ok,
        &format!(
            "worst finite/infinite deviation on [2,8] {:.1}% at x={:.1} (limit 10%); dN/dx(14.5)/peak = {:.1}% (limit 10%); monotone past x* {smooth}; infinite step at x* {step_ok}",
            100.0 * worst.1,
            worst.0,
            100.0 * at_end / peak
        ),
    );
    assert!(ok);
}

#[test]
fn ac9_reference_points() {
    // x² law of the closed form itself.
    let cfg = MediumConfig::default();
    let m = SpectrumModel::new(cfg).unwrap();
    let a = infinite_volume_dn_dx(2.0, &cfg, &m.cut);
    let b = infinite_volume_dn_dx(4.0, &cfg, &m.cut);
    assert!((b / a - 4.0).abs() < 1e-12);
    assert!((a - (2.0e4 - 1.0_f64).powi(2) / 2.0e4 * 4.0 / (3.0 * PI)).abs() < 1e-9 * a);
}
