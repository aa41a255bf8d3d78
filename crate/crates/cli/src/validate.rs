//! `validate`: sum rule, closed form against the propagator oracle, and
//! detector-plane flux conservation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsource_core::green::{green_oracle_scaled, green_scaled, ORACLE_DELTA0};
use qsource_core::sources::{detector_flux, sum_rule_check, total_current, GaussianSource, SourceModel};
use qsource_core::{AtomLaserPreset, PhotodetachmentPreset, ScaledEnergy, ScaledPoint};

use crate::args::Suite;
use crate::commands::Failure;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn sum_rule() -> Result<Check, Failure> {
    let p = AtomLaserPreset::rb87();
    let sys = p.system()?;
    let span = (p.energy_of(&sys, p.nu_min), p.energy_of(&sys, p.nu_max));
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for a in [0.2e-6, 0.5e-6, 1.0e-6, 2.8e-6] {
        let src = SourceModel::Gaussian(GaussianSource::new(a, p.omega)?);
        let (lhs, rhs) = sum_rule_check(&sys, &src, (span.0.min(span.1), span.0.max(span.1)), 1e-6)?;
        worst = worst.max((lhs / rhs - 1.0).abs());
        parts.push(format!("{:.1}um {:.6}", a * 1e6, lhs / rhs));
    }
    Ok(Check {
        name: "sum-rule",
        pass: worst <= 5e-3,
        detail: format!("ratios {} (tol 5e-3)", parts.join(", ")),
    })
}

fn oracle() -> Result<Check, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let origin = ScaledPoint::new(0.0, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho: f64 = rng.random_range(0.1..10.0);
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        let k: f64 = rng.random_range(-10.0..10.0);
        let r = ScaledPoint::new(rho * (1.0 - cos_t * cos_t).sqrt(), 0.0, rho * cos_t);
        let eps = ScaledEnergy(r.zeta - k);
        let closed = green_scaled(&r, &origin, eps)?;
        let (q, _) = green_oracle_scaled(&r, &origin, eps, ORACLE_DELTA0)?;
        worst = worst.max((q - closed).norm() / closed.norm());
    }
    Ok(Check {
        name: "oracle",
        pass: worst <= 1e-6,
        detail: format!("50 points, worst relative difference {worst:.2e} (tol 1e-6)"),
    })
}

fn flux() -> Result<Check, Failure> {
    let o = PhotodetachmentPreset::o_minus();
    let osys = o.system()?;
    let rb = AtomLaserPreset::rb87();
    let rsys = rb.system()?;
    let cases = [
        ("O-", osys, SourceModel::Point(o.source()), o.energy, o.z),
        (
            "Rb 0.4um",
            rsys,
            SourceModel::Gaussian(GaussianSource::new(0.4e-6, rb.family_omega)?),
            rb.energy_of(&rsys, rb.nu_profile),
            rb.z,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (_, sys, src, e, z) in &cases {
        let j = total_current(sys, src, *e)?;
        for plane in [*z, 0.5 * z] {
            let (f, _) = detector_flux(sys, src, plane, *e)?;
            worst = worst.max((f / j - 1.0).abs());
        }
    }
    Ok(Check {
        name: "flux",
        pass: worst <= 1e-3,
        detail: format!("O- and Rb 0.4um at two planes each, worst relative difference {worst:.2e} (tol 1e-3)"),
    })
}

pub fn run(suite: Suite) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::SumRule) {
        out.push(sum_rule()?);
    }
    if matches!(suite, Suite::All | Suite::Oracle) {
        out.push(oracle()?);
    }
    if matches!(suite, Suite::All | Suite::Flux) {
        out.push(flux()?);
    }
    Ok(out)
}
