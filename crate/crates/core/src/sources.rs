//! Point and Gaussian sources: wavefunctions, current densities and total
//! currents.
//!
//! A point source `σ = C·δ(r)` radiates `ψ = C·G(r, 0; E)`. A Gaussian
//! source `σ = ħΩ N₀ e^{−r²/2a²}` (normalised so that `∫|σ|² = (ħΩ)²`) has
//! a far field identical to a point source displaced upstream to
//! `ζ' = −2α⁴`, carrying the energy-dependent weight
//! `Λ(ε̃) = ħΩ (2√π a)^{3/2} e^{2α²(ε̃ − 4α⁴/3)}`, with `α = βFa`,
//! `ζ̃ = ζ + 2α⁴` and `ε̃ = ε + 4α⁴`.
//!
//! Large widths drive `Λ` far outside the double range while the Airy
//! factors it multiplies become equally small, so all such products are
//! assembled in log space.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::airy::{airy_flux_scaled, airy_scaled};
use crate::error::{Error, Result};
use crate::green::{green_closed, green_kernel, green_oracle_scaled, GreenArgs, ORACLE_DELTA0};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::scaling::{PhysicalSystem, ScaledEnergy, ScaledPoint};

/// `σ(r) = C·δ(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSource {
    pub strength: Complex64,
}

impl PointSource {
    pub fn new(strength: Complex64) -> Self {
        PointSource { strength }
    }
}

/// `σ(r) = ħΩ N₀ e^{−r²/2a²}`, `N₀ = a^{−3/2} π^{−3/4}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSource {
    width: f64,
    omega: f64,
}

impl GaussianSource {
    /// `width` in metres, `omega` (coupling) in rad/s.
    pub fn new(width: f64, omega: f64) -> Result<Self> {
        for (field, value) in [("width", width), ("omega", omega)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain {
                    field,
                    value,
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(GaussianSource { width, omega })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn normalization(&self) -> f64 {
        self.width.powf(-1.5) * PI.powf(-0.75)
    }

    /// Source function at `r` (metres).
    pub fn sigma(&self, sys: &PhysicalSystem, r: [f64; 3]) -> f64 {
        let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        sys.hbar() * self.omega * self.normalization() * (-r2 / (2.0 * self.width * self.width)).exp()
    }

    /// Scaled width `α = βFa`.
    pub fn alpha(&self, sys: &PhysicalSystem) -> f64 {
        sys.scale_length(self.width)
    }

    /// Point source of the same strength, `C = ħΩ(2√π a)^{3/2}`.
    pub fn point_equivalent(&self, sys: &PhysicalSystem) -> PointSource {
        let c = sys.hbar() * self.omega * (2.0 * PI.sqrt() * self.width).powf(1.5);
        PointSource::new(Complex64::new(c, 0.0))
    }

    /// Position of the virtual point source, `−mFa⁴/(2ħ²)` along z (metres).
    pub fn virtual_source_offset(&self, sys: &PhysicalSystem) -> f64 {
        -sys.mass() * sys.force() * self.width.powi(4) / (2.0 * sys.hbar().powi(2))
    }
}

/// Either source model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceModel {
    Point(PointSource),
    Gaussian(GaussianSource),
}

/// Shifted scaled parameters of a Gaussian source at one field point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianScaled {
    pub alpha: f64,
    pub xi: f64,
    pub nu_y: f64,
    pub zeta_tilde: f64,
    pub epsilon_tilde: f64,
    pub rho_tilde: f64,
    /// `ln Λ(ε̃)`, with `Λ` in J·m^{3/2}.
    pub ln_lambda: f64,
}

impl GaussianScaled {
    pub fn new(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> Self {
        let p = sys.scale_point(r);
        let eps = sys.scale_energy(energy);
        let alpha = src.alpha(sys);
        let a4 = alpha.powi(4);
        let zeta_tilde = p.zeta + 2.0 * a4;
        let epsilon_tilde = eps.0 + 4.0 * a4;
        let shifted = ScaledPoint::new(p.xi, p.nu_y, zeta_tilde);
        GaussianScaled {
            alpha,
            xi: p.xi,
            nu_y: p.nu_y,
            zeta_tilde,
            epsilon_tilde,
            rho_tilde: shifted.rho,
            ln_lambda: ln_lambda(sys, src, epsilon_tilde),
        }
    }

    /// `Λ(ε̃)`; may overflow to infinity for very wide sources.
    pub fn lambda(&self) -> f64 {
        self.ln_lambda.exp()
    }

    /// Field point relative to the virtual source.
    pub fn shifted_point(&self) -> ScaledPoint {
        ScaledPoint::new(self.xi, self.nu_y, self.zeta_tilde)
    }
}

fn ln_lambda(sys: &PhysicalSystem, src: &GaussianSource, epsilon_tilde: f64) -> f64 {
    let alpha = src.alpha(sys);
    (sys.hbar() * src.omega).ln()
        + 1.5 * (2.0 * PI.sqrt() * src.width).ln()
        + 2.0 * alpha * alpha * (epsilon_tilde - 4.0 * alpha.powi(4) / 3.0)
}

const ORIGIN: ScaledPoint = ScaledPoint {
    xi: 0.0,
    nu_y: 0.0,
    zeta: 0.0,
    rho: 0.0,
};

/// Ratio `ρ̃/α` below which the far-field form is refused.
pub const FAR_FIELD_MIN: f64 = 3.0;

/// Ratio `ρ̃/α` below which the far-field form logs a warning.
pub const FAR_FIELD_WARN: f64 = 5.0;

// ---------------------------------------------------------------------------
// Point source

/// `ψ = C·G(r, 0; E)`.
pub fn psi_point(sys: &PhysicalSystem, src: &PointSource, r: [f64; 3], energy: f64) -> Result<Complex64> {
    Ok(src.strength * green_closed(sys, r, [0.0; 3], energy)?.si())
}

/// `ζ Ai'(α₋)² + [ζ(ζ−ε) + ρ²] Ai(α₋)²` divided by `ρ³`, as `(mantissa, log scale)`.
pub(crate) fn point_flux_braces(p: &ScaledPoint, eps: f64) -> Result<(f64, f64)> {
    if !(p.rho > 0.0) {
        return Err(Error::Domain {
            field: "r",
            value: p.rho,
            reason: "current density diverges at the point source",
        });
    }
    let args = GreenArgs::new(p, &ORIGIN, ScaledEnergy(eps));
    let a = airy_scaled(args.alpha_minus)?;
    let m = p.zeta * a.ai_prime * a.ai_prime + (p.zeta * (p.zeta - eps) + p.rho * p.rho) * a.ai * a.ai;
    Ok((m / p.rho.powi(3), -2.0 * a.exponent))
}

/// `m(βF)³/(2πħ³)`: converts the scaled braces into a current density.
fn density_unit(sys: &PhysicalSystem) -> f64 {
    sys.mass() * sys.inverse_length().powi(3) / (2.0 * PI * sys.hbar().powi(3))
}

/// z-component of the current density of a point source (m⁻² s⁻¹ per unit |C|² normalisation).
pub fn current_density_point(sys: &PhysicalSystem, src: &PointSource, r: [f64; 3], energy: f64) -> Result<f64> {
    let (m, l) = point_flux_braces(&sys.scale_point(r), sys.scale_energy(energy).0)?;
    Ok(src.strength.norm_sqr() * density_unit(sys) * m * l.exp())
}

/// `2mβF/ħ³`: converts `Ai'² − εAi²` into a total current.
fn total_unit(sys: &PhysicalSystem) -> f64 {
    2.0 * sys.mass() * sys.inverse_length() / sys.hbar().powi(3)
}

/// Total current `J = (2|C|²mβF/ħ³){Ai'(ε)² − εAi(ε)²}`.
///
/// Positive for every finite energy, though it underflows to zero deep in the
/// tunnelling regime (ε ≳ 60).
pub fn total_current_point(sys: &PhysicalSystem, src: &PointSource, energy: f64) -> Result<f64> {
    let (m, s) = airy_flux_scaled(sys.scale_energy(energy).0)?;
    Ok(src.strength.norm_sqr() * total_unit(sys) * m * (-2.0 * s).exp())
}

// ---------------------------------------------------------------------------
// Gaussian source

fn check_far_field(g: &GaussianScaled, what: &'static str) -> Result<()> {
    let ratio = g.rho_tilde / g.alpha;
    if !(ratio > FAR_FIELD_MIN) {
        return Err(Error::Precondition {
            what,
            detail: format!("rho_tilde/alpha = {ratio:.3} lies inside the source core (needs > {FAR_FIELD_MIN})"),
        });
    }
    if ratio < FAR_FIELD_WARN {
        warn!("{what}: rho_tilde/alpha = {ratio:.3}; the far-field form neglects the near-field term here");
    }
    Ok(())
}

/// Far-field wavefunction `Λ(ε̃)·G(ρ̃, 0; ε̃)`.
pub fn psi_gauss_far(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> Result<Complex64> {
    let g = GaussianScaled::new(sys, src, r, energy);
    check_far_field(&g, "psi_gauss_far")?;
    let p = g.shifted_point();
    let (m, l) = green_kernel(p.rho, GreenArgs::new(&p, &ORIGIN, ScaledEnergy(g.epsilon_tilde)))?;
    Ok(m * (g.ln_lambda + l).exp() * sys.green_unit())
}

/// Near-field wavefunction, leading term of the imaginary-axis segment.
///
/// With `S = 2α²` and `φ(s) = −ρ̃²/s + s(ζ̃−ε̃) + s³/12`, the segment
/// `2π^{−3/2} ∫₀^S s^{−3/2} e^{φ(s)} ds` is dominated by its endpoint:
/// `≈ 2π^{−3/2} S^{−3/2} e^{φ(S)} / φ'(S)`. Multiplied by `Λ` this is
/// proportional to `e^{−r²/2a²}`, the source profile itself. Real-valued.
pub fn psi_gauss_near(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> f64 {
    let g = GaussianScaled::new(sys, src, r, energy);
    let s = 2.0 * g.alpha * g.alpha;
    let r2 = g.rho_tilde * g.rho_tilde;
    let k = g.zeta_tilde - g.epsilon_tilde;
    let mut slope = r2 / (s * s) + k + s * s / 4.0;
    if slope <= 0.0 {
        slope = r2 / (s * s);
    }
    let ln = g.ln_lambda + (2.0 * PI.powf(-1.5) * s.powf(-1.5) / slope).ln() - r2 / s + s * k + s.powi(3) / 12.0;
    ln.exp() * sys.green_unit()
}

/// Imaginary-axis segment, evaluated by quadrature (scaled, without `Λ`).
fn near_segment_scaled(rho: f64, k: f64, s_end: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            field: "rho_tilde",
            value: rho,
            reason: "the near and far terms diverge separately at the virtual source",
        });
    }
    let r2 = rho * rho;
    // s = ρ²/w turns the essential singularity at s = 0 into e^{−w}.
    let q = integrate_to_infinity(
        |w: f64| {
            if w <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let u = r2 / w;
            Complex64::new(w.powf(-0.5) * (-w + u * k + u * u * u / 12.0).exp(), 0.0)
        },
        r2 / s_end,
        QuadOptions {
            rel_tol: 1e-12,
            l1_floor: 1e-15,
            max_intervals: 4000,
        },
        "psi_gauss_quadrature (imaginary-axis segment)",
    )?;
    Ok(2.0 * PI.powf(-1.5) / rho * q.value.re)
}

/// Imaginary-axis segment alone, by quadrature (real).
pub fn psi_gauss_near_exact(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> Result<f64> {
    let g = GaussianScaled::new(sys, src, r, energy);
    let v = near_segment_scaled(g.rho_tilde, g.zeta_tilde - g.epsilon_tilde, 2.0 * g.alpha * g.alpha)?;
    Ok(v * g.ln_lambda.exp() * sys.green_unit())
}

/// Full wavefunction from the complex-time integral.
///
/// The path from `u = −2iα²` to `∞` is split at `u = 0`: the imaginary-axis
/// piece is a real integral, the real-axis piece is evaluated by the
/// propagator-transform quadrature used for the Green function oracle.
pub fn psi_gauss_quadrature(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> Result<Complex64> {
    let g = GaussianScaled::new(sys, src, r, energy);
    let near = near_segment_scaled(g.rho_tilde, g.zeta_tilde - g.epsilon_tilde, 2.0 * g.alpha * g.alpha)?;
    let (far, _) = green_oracle_scaled(
        &g.shifted_point(),
        &ORIGIN,
        ScaledEnergy(g.epsilon_tilde),
        ORACLE_DELTA0,
    )?;
    Ok((far + near) * g.ln_lambda.exp() * sys.green_unit())
}

/// Far-field current density of a Gaussian source.
pub fn current_density_gauss(sys: &PhysicalSystem, src: &GaussianSource, r: [f64; 3], energy: f64) -> Result<f64> {
    let g = GaussianScaled::new(sys, src, r, energy);
    check_far_field(&g, "current_density_gauss")?;
    let (m, l) = point_flux_braces(&g.shifted_point(), g.epsilon_tilde)?;
    Ok(density_unit(sys) * m * (2.0 * g.ln_lambda + l).exp())
}

/// Exact total current
/// `J = 64π^{3/2} ħΩ²α³β e^{4α²(ε̃−4α⁴/3)} {Ai'(ε̃)² − ε̃ Ai(ε̃)²}`.
pub fn total_current_gauss(sys: &PhysicalSystem, src: &GaussianSource, energy: f64) -> Result<f64> {
    let alpha = src.alpha(sys);
    let et = sys.scale_energy(energy).0 + 4.0 * alpha.powi(4);
    let (m, s) = airy_flux_scaled(et)?;
    let exponent = 4.0 * alpha * alpha * (et - 4.0 * alpha.powi(4) / 3.0) - 2.0 * s;
    let pre = 64.0 * PI.powf(1.5) * sys.hbar() * src.omega.powi(2) * alpha.powi(3) * sys.beta();
    let ln = pre.ln() + m.ln() + exponent;
    if ln > 709.0 {
        return Err(Error::Range {
            what: "total_current_gauss",
            exponent: ln,
        });
    }
    Ok(ln.exp())
}

/// Saddle-point (slicing) total current `J_sp = (2√π ħΩ²β/α) e^{−ε²/4α²}`.
pub fn total_current_slicing(sys: &PhysicalSystem, src: &GaussianSource, energy: f64) -> f64 {
    let alpha = src.alpha(sys);
    let eps = sys.scale_energy(energy).0;
    2.0 * PI.sqrt() * sys.hbar() * src.omega.powi(2) * sys.beta() / alpha * (-eps * eps / (4.0 * alpha * alpha)).exp()
}

/// Total current of either model.
pub fn total_current(sys: &PhysicalSystem, src: &SourceModel, energy: f64) -> Result<f64> {
    match src {
        SourceModel::Point(p) => total_current_point(sys, p, energy),
        SourceModel::Gaussian(g) => total_current_gauss(sys, g, energy),
    }
}

/// Current density of either model (far-field form for Gaussians).
pub fn current_density(sys: &PhysicalSystem, src: &SourceModel, r: [f64; 3], energy: f64) -> Result<f64> {
    match src {
        SourceModel::Point(p) => current_density_point(sys, p, r, energy),
        SourceModel::Gaussian(g) => current_density_gauss(sys, g, r, energy),
    }
}

/// Compares `∫J(E) dE` with `(2π/ħ)∫|σ|² = 2πħΩ²`; returns `(lhs, rhs)`.
///
/// The integral starts on `e_range` (joules) and is widened on either side
/// until a further strip contributes less than `tol` of the running total.
pub fn sum_rule_check(sys: &PhysicalSystem, src: &SourceModel, e_range: (f64, f64), tol: f64) -> Result<(f64, f64)> {
    let g = match src {
        SourceModel::Point(_) => {
            return Err(Error::Unsupported(
                "the sum rule diverges for a delta-shaped source (infinite norm of sigma)",
            ))
        }
        SourceModel::Gaussian(g) => g,
    };
    if !(e_range.0 < e_range.1) || !(tol > 0.0) {
        return Err(Error::Argument(format!(
            "sum_rule_check needs emin < emax and tol > 0, got {e_range:?}, {tol}"
        )));
    }
    // Work in ε; dE = dε/(2β).
    let mut lo = sys.scale_energy(e_range.1).0;
    let mut hi = sys.scale_energy(e_range.0).0;
    let f = |eps: f64| -> Complex64 {
        let e = sys.unscale_energy(ScaledEnergy(eps));
        Complex64::new(total_current_gauss(sys, g, e).unwrap_or(f64::NAN), 0.0)
    };
    let opts = QuadOptions {
        rel_tol: (tol * 0.1).max(1e-13),
        l1_floor: 1e-15,
        max_intervals: 4000,
    };
    let piece = |a: f64, b: f64| -> Result<f64> {
        let q = integrate(f, a, b, opts, "sum_rule_check")?;
        if !q.value.re.is_finite() {
            return Err(Error::Numerical {
                what: "sum_rule_check",
                estimate: f64::INFINITY,
                value: q.value.re,
            });
        }
        Ok(q.value.re)
    };
    let mut total = piece(lo, hi)?;
    let step = (hi - lo).max(2.0);
    for _ in 0..200 {
        let left = piece(lo - step, lo)?;
        let right = piece(hi, hi + step)?;
        total += left + right;
        lo -= step;
        hi += step;
        if left.abs() <= tol * total.abs() && right.abs() <= tol * total.abs() {
            let lhs = total / (2.0 * sys.beta());
            let rhs = 2.0 * PI * sys.hbar() * g.omega().powi(2);
            return Ok((lhs, rhs));
        }
    }
    Err(Error::Numerical {
        what: "sum_rule_check (tail extension)",
        estimate: f64::NAN,
        value: total,
    })
}

// ---------------------------------------------------------------------------
// Detector-plane flux

/// Revolved integral `2π ∫ j_z ρ dρ` over the plane at height `z` (metres).
///
/// Returns the flux and the quadrature error estimate.
pub fn detector_flux(sys: &PhysicalSystem, src: &SourceModel, z: f64, energy: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(Error::Argument(format!(
            "detector plane must lie downstream, got z = {z}"
        )));
    }
    let zeta = sys.scale_length(z);
    let eps = sys.scale_energy(energy).0;
    let (zeta, eps, ln_weight) = match src {
        SourceModel::Point(p) => (zeta, eps, p.strength.norm_sqr().ln()),
        SourceModel::Gaussian(g) => {
            let gs = GaussianScaled::new(sys, g, [0.0, 0.0, z], energy);
            if gs.zeta_tilde <= FAR_FIELD_MIN * gs.alpha {
                return Err(Error::Precondition {
                    what: "detector_flux",
                    detail: "detector plane intersects the source core".into(),
                });
            }
            (gs.zeta_tilde, gs.epsilon_tilde, 2.0 * gs.ln_lambda)
        }
    };
    let (v, e) = radial_flux_scaled(zeta, eps)?;
    // Scaled radial integral to physical flux: ∫ξ(braces/ρ³)dξ · mβF/ħ³.
    let unit = sys.mass() * sys.inverse_length() / sys.hbar().powi(3);
    let w = (ln_weight + unit.ln()).exp();
    Ok((v * w, e * w))
}

/// `∫₀^∞ ξ·braces/ρ³ dξ` at height `zeta`, which equals `2(Ai'(ε)² − εAi(ε)²)`.
pub(crate) fn radial_flux_scaled(zeta: f64, eps: f64) -> Result<(f64, f64)> {
    // Beyond α₋ = max(ε, 0) + 40 the integrand has decayed by e^{−300} or more.
    let alpha_end = eps.max(0.0) + 40.0;
    let c = alpha_end - eps;
    let xi_max = (c * (2.0 * zeta + c)).sqrt();
    let (_, ln0) = point_flux_braces(&ScaledPoint::new(0.0, 0.0, zeta), eps)?;
    let f = |xi: f64| -> Complex64 {
        let (m, l) = point_flux_braces(&ScaledPoint::new(xi, 0.0, zeta), eps).unwrap_or((0.0, f64::NEG_INFINITY));
        Complex64::new(xi * m * (l - ln0).exp(), 0.0)
    };
    // About one panel per fringe, plus a base resolution.
    let fringes = (2.0 / 3.0 * (-eps).max(0.0).powf(1.5) / PI).ceil() as usize;
    let panels = 64 + 4 * fringes;
    let opts = QuadOptions {
        rel_tol: 1e-11,
        l1_floor: 1e-14,
        max_intervals: 2000,
    };
    let (mut v, mut e) = (0.0, 0.0);
    for i in 0..panels {
        let a = xi_max * i as f64 / panels as f64;
        let b = xi_max * (i + 1) as f64 / panels as f64;
        let q = integrate(f, a, b, opts, "detector_flux")?;
        v += q.value.re;
        e += q.error;
    }
    let scale = ln0.exp();
    Ok((v * scale, e * scale))
}
