//! Presets and observables for photodetachment in an electric field and for
//! a gravity-driven atom laser.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::{RasterImage, ScanResult};
use crate::scaling::{PhysicalSystem, ScaledEnergy, ELECTRON_MASS, ELEMENTARY_CHARGE, GRAVITY, RB87_MASS};
use crate::sources::{
    current_density, total_current_gauss, total_current_point, total_current_slicing, GaussianScaled, GaussianSource,
    PointSource, SourceModel,
};

const MICRO_EV: f64 = 1e-6 * ELEMENTARY_CHARGE;

/// Negative-ion photodetachment in a static electric field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotodetachmentPreset {
    pub species: String,
    /// Field strength times electron charge, in eV/m.
    pub field_ev_per_m: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Scan range (J).
    pub e_min: f64,
    pub e_max: f64,
    /// Energy for single-energy observables (J).
    pub energy: f64,
    /// Detector distance (m).
    pub z: f64,
    /// Overall scale `|C|²` of the point-source strength.
    pub strength_sq: f64,
}

impl PhotodetachmentPreset {
    /// S⁻ at 2.205·10⁴ eV/m. The scan spans several field-induced steps.
    pub fn s_minus() -> Self {
        PhotodetachmentPreset {
            species: "S-".into(),
            field_ev_per_m: 2.205e4,
            mass: ELECTRON_MASS,
            e_min: -1000.0 * MICRO_EV,
            e_max: 5000.0 * MICRO_EV,
            energy: 1000.0 * MICRO_EV,
            z: 0.514,
            strength_sq: 1.0,
        }
    }

    /// O⁻ at 423 eV/m, detector 0.514 m downstream, E = 100.5 µeV.
    pub fn o_minus() -> Self {
        PhotodetachmentPreset {
            species: "O-".into(),
            field_ev_per_m: 423.0,
            mass: ELECTRON_MASS,
            e_min: -50.0 * MICRO_EV,
            e_max: 300.0 * MICRO_EV,
            energy: 100.5 * MICRO_EV,
            z: 0.514,
            strength_sq: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("field_ev_per_m", self.field_ev_per_m)?;
        positive("mass", self.mass)?;
        positive("z", self.z)?;
        if !(self.strength_sq >= 0.0 && self.strength_sq.is_finite()) {
            return Err(Error::Domain {
                field: "strength_sq",
                value: self.strength_sq,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    pub fn system(&self) -> Result<PhysicalSystem> {
        self.validate()?;
        PhysicalSystem::new(self.mass, self.field_ev_per_m * ELEMENTARY_CHARGE, crate::scaling::HBAR)
    }

    pub fn source(&self) -> PointSource {
        PointSource::new(num_complex::Complex64::new(self.strength_sq.sqrt(), 0.0))
    }
}

/// Atom laser: Rb-87 released from a Gaussian condensate and falling under gravity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomLaserPreset {
    pub mass: f64,
    pub g: f64,
    /// Condensate width `a` (m).
    pub width: f64,
    /// Outcoupling strength `Ω` (rad/s).
    pub omega: f64,
    /// Detuning scan (Hz).
    pub nu_min: f64,
    pub nu_max: f64,
    /// Operation time `T` (s).
    pub time: f64,
    /// Initial atom number `N(0)`; 1 reports fractions.
    pub n0: f64,
    /// Profile plane (m).
    pub z: f64,
    /// Detuning used for beam profiles (Hz).
    pub nu_profile: f64,
    /// Coupling used for the width families (rad/s).
    pub family_omega: f64,
    /// Widths for the total-current transition (m).
    pub transition_widths: Vec<f64>,
    /// Detuning range of the transition scan (Hz).
    pub transition_nu: (f64, f64),
    /// Widths for the beam-profile family (m).
    pub profile_widths: Vec<f64>,
    /// Map `ν → −ν` before converting to energy.
    pub flip_detuning: bool,
}

impl AtomLaserPreset {
    pub fn rb87() -> Self {
        AtomLaserPreset {
            mass: RB87_MASS,
            g: GRAVITY,
            width: 2.8e-6,
            omega: 2.0 * PI * 105.585,
            nu_min: -20e3,
            nu_max: 20e3,
            time: 20e-3,
            n0: 1.0,
            z: 1e-3,
            nu_profile: 2.5e3,
            family_omega: 2.0 * PI * 100.0,
            transition_widths: vec![0.2e-6, 0.4e-6, 0.8e-6, 1.0e-6, 1.6e-6],
            transition_nu: (-15e3, 40e3),
            profile_widths: vec![0.2e-6, 0.4e-6, 0.8e-6, 1.6e-6],
            flip_detuning: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("g", self.g)?;
        positive("width", self.width)?;
        positive("omega", self.omega)?;
        positive("z", self.z)?;
        positive("n0", self.n0)?;
        positive("family_omega", self.family_omega)?;
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return Err(Error::Domain {
                field: "time",
                value: self.time,
                reason: "must be finite and >= 0",
            });
        }
        for &w in self.transition_widths.iter().chain(&self.profile_widths) {
            positive("widths", w)?;
        }
        Ok(())
    }

    pub fn system(&self) -> Result<PhysicalSystem> {
        self.validate()?;
        PhysicalSystem::gravity(self.mass, self.g)
    }

    pub fn source(&self) -> Result<GaussianSource> {
        GaussianSource::new(self.width, self.omega)
    }

    /// `E = 2πħν`, with the sign flipped if requested.
    pub fn energy_of(&self, sys: &PhysicalSystem, nu: f64) -> f64 {
        let s = if self.flip_detuning { -1.0 } else { 1.0 };
        2.0 * PI * sys.hbar() * nu * s
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            field,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(a < b) {
        return Err(Error::Argument(format!(
            "grid needs n >= 2 and min < max, got n={n}, [{a}, {b}]"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect())
}

fn meta_system(r: &mut ScanResult, sys: &PhysicalSystem) {
    r.push_meta("mass_kg", sys.mass());
    r.push_meta("force_N", sys.force());
    r.push_meta("hbar_Js", sys.hbar());
    r.push_meta("beta_per_J", sys.beta());
    r.push_meta("beta_F_per_m", sys.inverse_length());
}

// ---------------------------------------------------------------------------
// Photodetachment

/// `J(E)` of a point source over an energy grid (J), scaled by `|C|²`.
pub fn photodetachment_cross_section(preset: &PhotodetachmentPreset, energies: &[f64]) -> Result<ScanResult> {
    let sys = preset.system()?;
    let src = preset.source();
    let values: Vec<f64> = energies
        .par_iter()
        .map(|&e| total_current_point(&sys, &src, e))
        .collect::<Result<_>>()?;
    let x: Vec<f64> = energies.iter().map(|e| e / MICRO_EV).collect();
    let mut r = ScanResult::new("energy_ueV", "total_current_per_s", x, values)?;
    r.push_meta("observable", "total_current_point");
    r.push_meta("species", preset.species.as_str());
    r.push_meta("field_eV_per_m", preset.field_ev_per_m);
    r.push_meta("strength_sq", preset.strength_sq);
    meta_system(&mut r, &sys);
    r.push_meta("epsilon_min", sys.scale_energy(energies[energies.len() - 1]).0);
    r.push_meta("epsilon_max", sys.scale_energy(energies[0]).0);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Lateral profiles and detector images

/// Lateral radius beyond which `j_z` has decayed by roughly `e^{−20}` from the
/// fringe region, in metres.
pub fn default_lateral_extent(sys: &PhysicalSystem, src: &SourceModel, energy: f64, z: f64) -> f64 {
    let (zeta, eps) = match src {
        SourceModel::Point(_) => (sys.scale_length(z), sys.scale_energy(energy).0),
        SourceModel::Gaussian(g) => {
            let gs = GaussianScaled::new(sys, g, [0.0, 0.0, z], energy);
            (gs.zeta_tilde, gs.epsilon_tilde)
        }
    };
    let c = eps.max(0.0) + 6.0 - eps;
    sys.unscale_length((c * (2.0 * zeta.max(0.0) + c)).sqrt())
}

/// Radial profile `j_z(ρ)` on `n` points in `[0, r_max]` at height `z`.
pub fn radial_profile(
    sys: &PhysicalSystem,
    src: &SourceModel,
    energy: f64,
    z: f64,
    r_max: f64,
    n: usize,
) -> Result<ScanResult> {
    positive("z", z)?;
    let rs = linspace(0.0, r_max, n)?;
    let values: Vec<f64> = rs
        .par_iter()
        .map(|&r| current_density(sys, src, [r, 0.0, z], energy))
        .collect::<Result<_>>()?;
    let mut out = ScanResult::new("radius_m", "current_density_per_m2_s", rs, values)?;
    out.push_meta("observable", "current_density_radial");
    out.push_meta("z_m", z);
    out.push_meta("energy_J", energy);
    out.push_meta("epsilon", sys.scale_energy(energy).0);
    out.push_meta("zeta", sys.scale_length(z));
    meta_system(&mut out, sys);
    Ok(out)
}

/// Even lateral profile `j_z(x, 0, z)` on `n` points in `[−half_width, half_width]`.
pub fn lateral_profile(
    sys: &PhysicalSystem,
    src: &SourceModel,
    energy: f64,
    z: f64,
    half_width: f64,
    n: usize,
) -> Result<ScanResult> {
    positive("z", z)?;
    positive("half_width", half_width)?;
    let xs = linspace(-half_width, half_width, n)?;
    // Evaluate |x| so that mirrored samples are bitwise equal.
    let values: Vec<f64> = xs
        .par_iter()
        .map(|&x| current_density(sys, src, [x.abs(), 0.0, z], energy))
        .collect::<Result<_>>()?;
    let mut out = ScanResult::new("x_m", "current_density_per_m2_s", xs, values)?;
    out.push_meta("observable", "current_density_lateral");
    out.push_meta("z_m", z);
    out.push_meta("energy_J", energy);
    meta_system(&mut out, sys);
    Ok(out)
}

/// Square raster of `j_z` over the detector plane at height `z`.
///
/// The pattern is rotationally symmetric, so `j_z` is computed on a fine
/// radial grid and revolved with linear interpolation.
pub fn detector_image(
    sys: &PhysicalSystem,
    src: &SourceModel,
    energy: f64,
    z: f64,
    half_width: f64,
    resolution: usize,
) -> Result<RasterImage> {
    if resolution == 0 {
        return Err(Error::Argument("image resolution must be positive".into()));
    }
    positive("half_width", half_width)?;
    positive("z", z)?;
    let r_max = half_width * 2f64.sqrt() * 1.0001;
    let nr = (8 * resolution).max(256);
    let profile = radial_profile(sys, src, energy, z, r_max, nr)?;
    let dr = r_max / (nr - 1) as f64;
    let pixel = 2.0 * half_width / resolution as f64;
    let data: Vec<f64> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (row, col) = (k / resolution, k % resolution);
            let x = -half_width + (col as f64 + 0.5) * pixel;
            let y = half_width - (row as f64 + 0.5) * pixel;
            let t = x.hypot(y) / dr;
            let i = (t.floor() as usize).min(nr - 2);
            let f = t - i as f64;
            let v = profile.values[i] * (1.0 - f) + profile.values[i + 1] * f;
            v.max(0.0)
        })
        .collect();
    let mut img = RasterImage::new(
        resolution,
        resolution,
        [-half_width, half_width, -half_width, half_width],
        data,
    )?;
    img.push_meta("observable", "current_density_image");
    img.push_meta("z_m", z);
    img.push_meta("energy_J", energy);
    img.push_meta("epsilon", sys.scale_energy(energy).0);
    img.push_meta("beta_per_J", sys.beta());
    img.push_meta("beta_F_per_m", sys.inverse_length());
    Ok(img)
}

/// Positions of strict interior local maxima (plateaus count once).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Atom laser

/// Remaining fraction `N(T)/N(0) = e^{−J T}` per detuning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepletionCurve {
    pub detuning_hz: Vec<f64>,
    pub fraction: Vec<f64>,
    pub current: Vec<f64>,
}

impl DepletionCurve {
    /// Converts to a scan of the remaining atom number `N(0)·fraction`.
    pub fn to_scan(&self, preset: &AtomLaserPreset) -> Result<ScanResult> {
        let values = self.fraction.iter().map(|f| f * preset.n0).collect();
        let mut r = ScanResult::new("detuning_Hz", "remaining_atoms", self.detuning_hz.clone(), values)?;
        r.push_meta("observable", "remaining_atoms");
        r.push_meta("width_m", preset.width);
        r.push_meta("omega_rad_per_s", preset.omega);
        r.push_meta("time_s", preset.time);
        r.push_meta("n0", preset.n0);
        r.push_meta("flip_detuning", preset.flip_detuning);
        Ok(r)
    }
}

/// Depletion of the condensate after operating for `preset.time`.
pub fn atom_laser_depletion(preset: &AtomLaserPreset, detunings: &[f64]) -> Result<DepletionCurve> {
    let sys = preset.system()?;
    let src = preset.source()?;
    let current: Vec<f64> = detunings
        .par_iter()
        .map(|&nu| total_current_gauss(&sys, &src, preset.energy_of(&sys, nu)))
        .collect::<Result<_>>()?;
    let fraction = current.iter().map(|j| (-j * preset.time).exp()).collect();
    Ok(DepletionCurve {
        detuning_hz: detunings.to_vec(),
        fraction,
        current,
    })
}

/// Exact and slicing total currents over a detuning grid (Hz).
pub fn total_current_scan(
    sys: &PhysicalSystem,
    preset: &AtomLaserPreset,
    src: &GaussianSource,
    detunings: &[f64],
) -> Result<(ScanResult, ScanResult)> {
    let exact: Vec<f64> = detunings
        .par_iter()
        .map(|&nu| total_current_gauss(sys, src, preset.energy_of(sys, nu)))
        .collect::<Result<_>>()?;
    let slicing: Vec<f64> = detunings
        .iter()
        .map(|&nu| total_current_slicing(sys, src, preset.energy_of(sys, nu)))
        .collect();
    let alpha = src.alpha(sys);
    let mut a = ScanResult::new("detuning_Hz", "total_current_per_s", detunings.to_vec(), exact)?;
    let mut b = ScanResult::new("detuning_Hz", "total_current_per_s", detunings.to_vec(), slicing)?;
    let exact_peak = a.argmax().unwrap_or(f64::NAN);
    // J_sp peaks at E = 0; ε̃ = 0 marks the virtual-source threshold.
    let tilde_zero = sys.unscale_energy(ScaledEnergy(-4.0 * alpha.powi(4)));
    let tilde_zero_hz = tilde_zero / (2.0 * PI * sys.hbar()) * if preset.flip_detuning { -1.0 } else { 1.0 };
    for (r, kind) in [(&mut a, "exact"), (&mut b, "slicing")] {
        r.push_meta("observable", format!("total_current_gauss_{kind}"));
        r.push_meta("width_m", src.width());
        r.push_meta("omega_rad_per_s", src.omega());
        r.push_meta("alpha", alpha);
        r.push_meta("flip_detuning", preset.flip_detuning);
        r.push_meta("exact_peak_Hz", exact_peak);
        r.push_meta("slicing_peak_Hz", 0.0);
        r.push_meta("virtual_threshold_Hz", tilde_zero_hz);
        meta_system(r, sys);
    }
    Ok((a, b))
}

/// One width of the transition family.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionEntry {
    pub width: f64,
    pub alpha: f64,
    pub exact: ScanResult,
    pub slicing: ScanResult,
    /// Trapezoidal area of the exact curve (per Hz).
    pub area: f64,
    /// `max|J − J_sp| / max J` over the grid.
    pub deviation: f64,
    /// Local maxima of the exact curve.
    pub maxima: usize,
}

/// Exact vs slicing currents for a family of widths at `preset.family_omega`.
pub fn current_transition_scan(
    preset: &AtomLaserPreset,
    widths: &[f64],
    detunings: &[f64],
) -> Result<Vec<TransitionEntry>> {
    let sys = preset.system()?;
    widths
        .iter()
        .map(|&w| {
            let src = GaussianSource::new(w, preset.family_omega)?;
            let (exact, slicing) = total_current_scan(&sys, preset, &src, detunings)?;
            let peak = exact.values.iter().copied().fold(0.0, f64::max);
            let deviation = exact
                .values
                .iter()
                .zip(&slicing.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / peak;
            Ok(TransitionEntry {
                width: w,
                alpha: src.alpha(&sys),
                area: exact.trapezoid(),
                maxima: local_maxima(&exact.values).len(),
                deviation,
                exact,
                slicing,
            })
        })
        .collect()
}

/// Lateral current-density profiles for several widths at detuning `nu`,
/// height `z`, coupling `preset.family_omega`.
pub fn beam_profile_family(
    preset: &AtomLaserPreset,
    widths: &[f64],
    nu: f64,
    z: f64,
    n: usize,
) -> Result<Vec<ScanResult>> {
    let sys = preset.system()?;
    let energy = preset.energy_of(&sys, nu);
    widths
        .iter()
        .map(|&w| {
            let g = GaussianSource::new(w, preset.family_omega)?;
            let src = SourceModel::Gaussian(g);
            let half = default_lateral_extent(&sys, &src, energy, z);
            let mut p = lateral_profile(&sys, &src, energy, z, half, n)?;
            p.push_meta("width_m", w);
            p.push_meta("alpha", g.alpha(&sys));
            p.push_meta("detuning_Hz", nu);
            p.push_meta("omega_rad_per_s", preset.family_omega);
            Ok(p)
        })
        .collect()
}
