//! Fixtures shared by the benchmarks.

use qsource_core::sources::GaussianSource;
use qsource_core::{AtomLaserPreset, PhotodetachmentPreset, PhysicalSystem, ScaledPoint};

/// O⁻ photodetachment system.
pub fn o_minus() -> (PhotodetachmentPreset, PhysicalSystem) {
    let p = PhotodetachmentPreset::o_minus();
    let sys = p.system().expect("preset is valid");
    (p, sys)
}

/// Rb-87 atom laser with a Gaussian source of the given width (m).
pub fn atom_laser(width: f64) -> (AtomLaserPreset, PhysicalSystem, GaussianSource) {
    let p = AtomLaserPreset::rb87();
    let sys = p.system().expect("preset is valid");
    let src = GaussianSource::new(width, p.family_omega).expect("width is positive");
    (p, sys, src)
}

/// Scaled field points spread over the range the scenarios use.
pub fn field_points() -> Vec<ScaledPoint> {
    (0..16)
        .map(|k| {
            let t = k as f64 / 16.0 * std::f64::consts::PI;
            let r = 0.5 + 0.6 * k as f64;
            ScaledPoint::new(r * t.sin(), 0.0, r * t.cos())
        })
        .collect()
}
