//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p qsource-core --release --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsource_core::airy::airy_all;
use qsource_core::green::{green_oracle_scaled, green_scaled, ORACLE_DELTA0};
use qsource_core::scaling::{PhysicalSystem, ScaledEnergy, ScaledPoint};
use qsource_core::scenarios::{
    beam_profile_family, current_transition_scan, linspace, local_maxima, AtomLaserPreset, PhotodetachmentPreset,
};
use qsource_core::sources::{
    current_density_gauss, current_density_point, detector_flux, psi_gauss_far, psi_gauss_quadrature, psi_point,
    sum_rule_check, total_current, total_current_gauss, total_current_point, GaussianScaled, GaussianSource,
    PointSource, SourceModel,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let origin = ScaledPoint::new(0.0, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho: f64 = rng.random_range(0.1..10.0);
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let k: f64 = rng.random_range(-10.0..10.0);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let r = ScaledPoint::new(rho * sin_t * phi.cos(), rho * sin_t * phi.sin(), rho * cos_t);
        let eps = ScaledEnergy(r.zeta - k);
        let closed = match green_scaled(&r, &origin, eps) {
            Ok(v) => v,
            Err(e) => return outcome(false, format!("closed form failed: {e}")),
        };
        match green_oracle_scaled(&r, &origin, eps, ORACLE_DELTA0) {
            Ok((v, _)) => worst = worst.max(crel(v, closed)),
            Err(e) => return outcome(false, format!("oracle failed at rho={rho}, k={k}: {e}")),
        }
    }
    outcome(
        worst <= 1e-6,
        format!("50 points, worst relative difference {worst:.2e} (tol 1e-6)"),
    )
}

fn sum_rule() -> Outcome {
    let preset = AtomLaserPreset::rb87();
    let sys = preset.system().unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for a in [0.2e-6, 0.5e-6, 1.0e-6, 2.8e-6] {
        let src = SourceModel::Gaussian(GaussianSource::new(a, preset.omega).unwrap());
        let span = (sys.energy_of_hz(preset.nu_min), sys.energy_of_hz(preset.nu_max));
        match sum_rule_check(&sys, &src, span, 1e-6) {
            Ok((lhs, rhs)) => {
                let ratio = lhs / rhs;
                pass &= (ratio - 1.0).abs() <= 0.005;
                parts.push(format!("a={:.1}um ratio={ratio:.6}", a * 1e6));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("a={:.1}um error: {e}", a * 1e6));
            }
        }
    }
    outcome(pass, format!("{} (tol 0.005)", parts.join(", ")))
}

trait HzEnergy {
    fn energy_of_hz(&self, nu: f64) -> f64;
}

impl HzEnergy for PhysicalSystem {
    fn energy_of_hz(&self, nu: f64) -> f64 {
        2.0 * PI * self.hbar() * nu
    }
}

fn point_limit() -> Outcome {
    let preset = AtomLaserPreset::rb87();
    let sys = preset.system().unwrap();
    let a = 1e-4 / sys.inverse_length();
    let g = GaussianSource::new(a, preset.omega).unwrap();
    let p = g.point_equivalent(&sys);
    let mut worst: f64 = 0.0;
    for eps in [-8.0, -2.5, 0.0, 1.5, 4.0] {
        let e = sys.unscale_energy(ScaledEnergy(eps));
        for (x, z) in [(0.7, 1.3), (2.0, -0.4), (0.0, 3.0), (1.1, 0.0), (4.0, 6.0)] {
            let r = [sys.unscale_length(x), 0.0, sys.unscale_length(z)];
            let pairs = [
                (psi_gauss_far(&sys, &g, r, e), psi_point(&sys, &p, r, e)),
                (
                    current_density_gauss(&sys, &g, r, e).map(|v| Complex64::new(v, 0.0)),
                    current_density_point(&sys, &p, r, e).map(|v| Complex64::new(v, 0.0)),
                ),
            ];
            for (u, v) in pairs {
                match (u, v) {
                    (Ok(u), Ok(v)) => worst = worst.max(crel(u, v)),
                    (u, v) => return outcome(false, format!("evaluation failed: {u:?} {v:?}")),
                }
            }
        }
        match (total_current_gauss(&sys, &g, e), total_current_point(&sys, &p, e)) {
            (Ok(u), Ok(v)) => worst = worst.max(rel(u, v)),
            (u, v) => return outcome(false, format!("total current failed: {u:?} {v:?}")),
        }
    }
    outcome(
        worst <= 1e-6,
        format!("alpha=1e-4, psi/j/J worst relative difference {worst:.2e} (tol 1e-6)"),
    )
}

fn algebraic_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mass = 10f64.powf(rng.random_range(-30.5..-24.0));
        let force = 10f64.powf(rng.random_range(-26.0..-16.0));
        let sys = PhysicalSystem::new(mass, force, qsource_core::scaling::HBAR).unwrap();
        let alpha: f64 = rng.random_range(0.01..1.5);
        let eps: f64 = rng.random_range(-30.0..10.0);
        let omega = 10f64.powf(rng.random_range(0.0..5.0));
        let g = GaussianSource::new(sys.unscale_length(alpha), omega).unwrap();
        let e = sys.unscale_energy(ScaledEnergy(eps));
        let gs = GaussianScaled::new(&sys, &g, [0.0, 0.0, 1.0], e);
        let virt = PointSource::new(Complex64::new(gs.lambda(), 0.0));
        let e_tilde = sys.unscale_energy(ScaledEnergy(gs.epsilon_tilde));
        match (
            total_current_gauss(&sys, &g, e),
            total_current_point(&sys, &virt, e_tilde),
        ) {
            (Ok(u), Ok(v)) => worst = worst.max(rel(u, v)),
            (u, v) => return outcome(false, format!("evaluation failed: {u:?} {v:?}")),
        }
    }
    outcome(
        worst <= 1e-12,
        format!("1000 tuples, worst relative difference {worst:.2e} (tol 1e-12)"),
    )
}

fn flux_conservation() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let o = PhotodetachmentPreset::o_minus();
    let osys = o.system().unwrap();
    let osrc = SourceModel::Point(o.source());
    let rb = AtomLaserPreset::rb87();
    let rsys = rb.system().unwrap();
    let rsrc = SourceModel::Gaussian(GaussianSource::new(0.4e-6, rb.family_omega).unwrap());
    let re = rb.energy_of(&rsys, rb.nu_profile);
    let cases = [
        ("O-", &osys, &osrc, o.energy, [o.z, 0.5 * o.z]),
        ("Rb a=0.4um", &rsys, &rsrc, re, [rb.z, 0.5 * rb.z]),
    ];
    for (name, sys, src, e, planes) in cases {
        let j = total_current(sys, src, e).unwrap();
        for z in planes {
            match detector_flux(sys, src, z, e) {
                Ok((flux, _)) => {
                    let d = rel(flux, j);
                    pass &= d <= 1e-3;
                    parts.push(format!("{name} z={z}m {d:.1e}"));
                }
                Err(err) => {
                    pass = false;
                    parts.push(format!("{name} z={z}m error: {err}"));
                }
            }
        }
    }
    outcome(pass, format!("relative differences: {} (tol 1e-3)", parts.join(", ")))
}

fn wigner_law() -> Outcome {
    let preset = PhotodetachmentPreset::s_minus();
    let sys = preset.system().unwrap();
    let src = preset.source();
    // Scan to ε = −1000, far above the field-induced oscillation scale |ε| ~ 1.
    let e_top = sys.unscale_energy(ScaledEnergy(-1000.0));
    let grid = linspace(0.1 * e_top, e_top, 500).unwrap();
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&e| total_current_point(&sys, &src, e).unwrap() / e.sqrt())
        .collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    let spread = (hi - lo) / (0.5 * (hi + lo));
    outcome(
        spread <= 0.02,
        format!(
            "J/sqrt(E) spread {spread:.2e} over {:.0}..{:.0} ueV (tol 0.02)",
            grid[0] / 1.602_176_634e-25,
            e_top / 1.602_176_634e-25
        ),
    )
}

fn transition() -> Outcome {
    let preset = AtomLaserPreset::rb87();
    let nus = linspace(preset.transition_nu.0, preset.transition_nu.1, 1101).unwrap();
    let entries = match current_transition_scan(&preset, &preset.transition_widths, &nus) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("scan failed: {e}")),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for t in &entries {
        let a_um = t.width * 1e6;
        if a_um >= 1.0 - 1e-9 {
            pass &= t.deviation <= 0.05;
        } else if a_um <= 0.4 + 1e-9 {
            pass &= t.deviation > 0.20 && t.maxima >= 2;
        }
        parts.push(format!("a={a_um:.1}um dev={:.3} maxima={}", t.deviation, t.maxima));
    }
    let mean = entries.iter().map(|t| t.area).sum::<f64>() / entries.len() as f64;
    let area_spread = entries.iter().map(|t| rel(t.area, mean)).fold(0.0, f64::max);
    pass &= area_spread <= 0.01;
    outcome(
        pass,
        format!(
            "{}; area spread {area_spread:.2e} (dev <= 0.05 for a >= 1um; dev > 0.2 and >= 2 maxima for a <= 0.4um; areas 1%)",
            parts.join(", ")
        ),
    )
}

fn ring_counts() -> Outcome {
    let preset = AtomLaserPreset::rb87();
    let profiles = match beam_profile_family(&preset, &preset.profile_widths, preset.nu_profile, preset.z, 2001) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("profiles failed: {e}")),
    };
    let counts: Vec<usize> = profiles
        .iter()
        .map(|p| {
            local_maxima(&p.values)
                .into_iter()
                .filter(|&i| p.abscissa[i] >= 0.0)
                .count()
        })
        .collect();
    let monotone = counts.windows(2).all(|w| w[1] <= w[0]);
    let by_08 = preset
        .profile_widths
        .iter()
        .zip(&counts)
        .filter(|(w, _)| **w >= 0.8e-6 - 1e-12)
        .all(|(_, c)| *c == 1);
    outcome(
        monotone && by_08,
        format!("ring counts {counts:?} for widths {:?} um", um(&preset.profile_widths)),
    )
}

fn um(v: &[f64]) -> Vec<f64> {
    v.iter().map(|w| (w * 1e7).round() / 10.0).collect()
}

fn special_functions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut worst_w: f64 = 0.0;
    for _ in 0..10_000 {
        let x: f64 = rng.random_range(-100.0..8.0);
        let v = airy_all(x).unwrap();
        worst_w = worst_w.max((v.wronskian() - 1.0 / PI).abs() * PI);
    }
    let mut worst_ai: f64 = 0.0;
    for k in 0..100 {
        let p = -200 + 3 * k;
        let r = common::airy_reference(p, 10);
        let v = airy_all(p as f64 / 10.0).unwrap();
        worst_ai = worst_ai.max(rel(v.ai, r[0]));
    }
    outcome(
        worst_w <= 1e-10 && worst_ai <= 1e-10,
        format!("Wronskian worst {worst_w:.2e}·(1/pi) at 10000 points; Ai worst relative {worst_ai:.2e} on 100 points (tol 1e-10)"),
    )
}

/// Fourth-order central Laplacian of `psi` at `r` with step `h` (metres).
fn laplacian<F: Fn([f64; 3]) -> qsource_core::Result<Complex64>>(
    psi: &F,
    r: [f64; 3],
    h: f64,
) -> qsource_core::Result<Complex64> {
    let c = psi(r)?;
    let mut sum = c * (-3.0 * 30.0);
    for axis in 0..3 {
        for (d, w) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            let mut q = r;
            q[axis] += d * h;
            sum += psi(q)? * w;
        }
    }
    Ok(sum / (12.0 * h * h))
}

fn continuity() -> Outcome {
    let preset = AtomLaserPreset::rb87();
    let sys = preset.system().unwrap();
    let src = GaussianSource::new(0.4e-6, preset.family_omega).unwrap();
    let a = src.width();
    let zv = src.virtual_source_offset(&sys);
    let e = preset.energy_of(&sys, preset.nu_profile);
    let psi = |r: [f64; 3]| psi_gauss_quadrature(&sys, &src, r, e);
    // Truncation error falls as h⁴ down to ~1e-9 at h = 0.003 (scaled).
    let h = 0.01 / sys.inverse_length();
    // Ten points inside the source core, ten well outside it.
    let mut points = Vec::new();
    for k in 0..10 {
        let t = k as f64 / 10.0 * 2.0 * PI;
        points.push([
            0.6 * a * t.cos() + 0.1 * a,
            0.3 * a * t.sin(),
            zv + 0.8 * a * (t + 0.4).cos(),
        ]);
    }
    for k in 0..10 {
        let t = k as f64 / 10.0 * PI;
        let d = (3.0 + k as f64 * 0.7) * a;
        points.push([d * t.sin(), 0.2 * d, zv + d * t.cos()]);
    }
    let mut worst: f64 = 0.0;
    for r in points {
        let (v, lap) = match (psi(r), laplacian(&psi, r, h)) {
            (Ok(v), Ok(l)) => (v, l),
            (u, w) => return outcome(false, format!("evaluation failed at {r:?}: {u:?} {w:?}")),
        };
        let sigma = src.sigma(&sys, r);
        let div_j = sys.hbar() / sys.mass() * (v.conj() * lap).im;
        let source = -2.0 / sys.hbar() * sigma * v.im;
        let scale = sys.hbar() / sys.mass() * v.norm() * lap.norm() + 2.0 / sys.hbar() * sigma.abs() * v.norm();
        worst = worst.max((div_j - source).abs() / scale);
    }
    outcome(
        worst <= 1e-4,
        format!("20 points, worst normalized residual {worst:.2e} (tol 1e-4)"),
    )
}

fn cli_binary() -> Result<PathBuf, String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let profile_dir = exe
        .parent()
        .and_then(Path::parent)
        .ok_or("cannot locate target directory")?
        .to_path_buf();
    let bin = profile_dir.join(format!("qsource{}", std::env::consts::EXE_SUFFIX));
    if !bin.exists() {
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let mut cmd = Command::new(cargo);
        cmd.args(["build", "-q", "-p", "qsource-cli"]);
        if profile_dir.file_name().is_some_and(|n| n == "release") {
            cmd.arg("--release");
        }
        let status = cmd.status().map_err(|e| e.to_string())?;
        if !status.success() || !bin.exists() {
            return Err(format!("could not build {}", bin.display()));
        }
    }
    Ok(bin)
}

fn determinism() -> Outcome {
    let bin = match cli_binary() {
        Ok(b) => b,
        Err(e) => return outcome(false, e),
    };
    let runs: [&[&str]; 3] = [
        &[
            "total-current",
            "--preset",
            "s-minus",
            "--emin",
            "-50ueV",
            "--emax",
            "300ueV",
            "--n",
            "400",
            "-o",
            "tc.csv",
        ],
        &["detector-image", "--preset", "o-minus", "--n", "128", "-o", "rings.pgm"],
        &[
            "atom-laser",
            "--preset",
            "rb-atom-laser",
            "--n",
            "201",
            "-o",
            "laser.csv",
        ],
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        for args in runs {
            let out = Command::new(&bin).args(args).current_dir(dir.path()).output();
            match out {
                Ok(o) if o.status.success() => {}
                Ok(o) => {
                    return outcome(
                        false,
                        format!(
                            "`qsource {}` failed: {}",
                            args.join(" "),
                            String::from_utf8_lossy(&o.stderr).trim()
                        ),
                    )
                }
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
        if a != b {
            return outcome(false, format!("{} differs between runs", name.to_string_lossy()));
        }
    }
    // tc.csv, rings.pgm + sidecar, laser.csv
    if names.len() < 4 {
        return outcome(
            false,
            format!("expected at least 4 output files, found {}", names.len()),
        );
    }
    outcome(
        true,
        format!("{} files byte-identical across two CLI runs", names.len()),
    )
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("sum rule", sum_rule),
        ("point-source limit", point_limit),
        ("algebraic identity", algebraic_identity),
        ("flux conservation", flux_conservation),
        ("Wigner-law limit", wigner_law),
        ("current transition (exact vs slicing)", transition),
        ("ring-count monotonicity", ring_counts),
        ("special functions", special_functions),
        ("continuity with source term", continuity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
