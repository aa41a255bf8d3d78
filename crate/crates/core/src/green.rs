//! Retarded energy Green function of a particle in a uniform force field.
//!
//! In scaled units the Green function is `G = β(βF)³·g` with
//!
//! ```text
//! g = (2/ρ) [Ci(α₊) Ai'(α₋) − Ci'(α₊) Ai(α₋)],   α± = ε − (ζ+ζ') ∓ ρ,
//! ```
//!
//! where `ρ = βF|r − r'|`. [`green_oracle`] evaluates the same quantity as
//! the damped Laplace transform of the time propagator,
//!
//! ```text
//! g = −2i ∫₀^∞ dτ (iπτ)^{−3/2} exp(iρ²/τ + iτ(ζ−ε) − iτ³/12 − δτ),
//! ```
//!
//! on a deformed contour, followed by extrapolation `δ → 0`.

use std::f64::consts::{FRAC_PI_3, PI};

use num_complex::Complex64;

#[cfg(test)]
use crate::airy::airy_all;
use crate::airy::airy_scaled;
use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::scaling::{PhysicalSystem, ScaledEnergy, ScaledPoint};

/// Airy arguments of the closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenArgs {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl GreenArgs {
    /// Arguments for field point `r` and source `r_src` (both scaled).
    ///
    /// The differences `ρ ∓ (ζ−ζ')` are formed without cancellation so that
    /// far downstream (or upstream) the near-zero argument stays accurate.
    pub fn new(r: &ScaledPoint, r_src: &ScaledPoint, eps: ScaledEnergy) -> Self {
        let d = r.sub(r_src);
        let lat = d.lateral_sq();
        let rho = d.rho;
        let dz = d.zeta;
        let base = eps.0 - 2.0 * r_src.zeta;
        // ρ − dz and ρ + dz, one of which may cancel.
        let rho_minus_dz = if dz > 0.0 { lat / (rho + dz) } else { rho - dz };
        let rho_plus_dz = if dz < 0.0 { lat / (rho - dz) } else { rho + dz };
        GreenArgs {
            alpha_plus: base - rho_plus_dz,
            alpha_minus: base + rho_minus_dz,
        }
    }
}

/// Green function value in scaled form together with its SI unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenValue {
    /// Dimensionless `g`.
    pub g: Complex64,
    /// `β(βF)³`, converting `g` to SI (`kg·J⁻¹·s⁻²·m⁻¹`, i.e. `m/(ħ²·length)`).
    pub unit: f64,
    /// Error estimate on `g`; zero for the closed form.
    pub error: f64,
}

impl GreenValue {
    pub fn si(&self) -> Complex64 {
        self.g * self.unit
    }
}

/// Closed form as a mantissa and a non-positive log scale: `g = m·e^{l}`.
///
/// Keeps `Ai(α₋)` representable for arguments far beyond the overflow limit
/// of unscaled `Bi`.
pub fn green_kernel(rho: f64, args: GreenArgs) -> Result<(Complex64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            field: "r - r_src",
            value: rho,
            reason: "coincident points; use the diagonal-limit total current",
        });
    }
    let m = airy_scaled(args.alpha_minus)?;
    let p = airy_scaled(args.alpha_plus)?;
    // Ci(α₊) = e^{s₊}(bi_s + i ai_s e^{-2s₊}) and Ai(α₋) = ai_s e^{-s₋}.
    let damp = (-2.0 * p.exponent).exp();
    let ci = Complex64::new(p.bi, p.ai * damp);
    let ci_p = Complex64::new(p.bi_prime, p.ai_prime * damp);
    let mant = (ci * m.ai_prime - ci_p * m.ai) * (2.0 / rho);
    Ok((mant, p.exponent - m.exponent))
}

/// Dimensionless `g` for scaled field point, source point and energy.
pub fn green_scaled(r: &ScaledPoint, r_src: &ScaledPoint, eps: ScaledEnergy) -> Result<Complex64> {
    let rho = r.sub(r_src).rho;
    let (m, l) = green_kernel(rho, GreenArgs::new(r, r_src, eps))?;
    Ok(m * l.exp())
}

/// Closed-form Green function `G(r, r_src; E)`, positions in metres, energy in joules.
pub fn green_closed(sys: &PhysicalSystem, r: [f64; 3], r_src: [f64; 3], energy: f64) -> Result<GreenValue> {
    let g = green_scaled(&sys.scale_point(r), &sys.scale_point(r_src), sys.scale_energy(energy))?;
    Ok(GreenValue {
        g,
        unit: sys.green_unit(),
        error: 0.0,
    })
}

/// Propagator-transform oracle; `eta` is the initial damping energy.
pub fn green_oracle(sys: &PhysicalSystem, r: [f64; 3], r_src: [f64; 3], energy: f64, eta: f64) -> Result<GreenValue> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain {
            field: "eta",
            value: eta,
            reason: "damping must be positive",
        });
    }
    let delta0 = 2.0 * sys.beta() * eta;
    let (g, error) = green_oracle_scaled(
        &sys.scale_point(r),
        &sys.scale_point(r_src),
        sys.scale_energy(energy),
        delta0,
    )?;
    Ok(GreenValue {
        g,
        unit: sys.green_unit(),
        error,
    })
}

/// Default initial scaled damping `δ₀ = 2βη₀`.
pub const ORACLE_DELTA0: f64 = 0.1;

/// Number of halvings of the damping used in the extrapolation.
const ORACLE_LEVELS: usize = 6;

/// Oracle in scaled units; returns `(g, error estimate)`.
pub fn green_oracle_scaled(
    r: &ScaledPoint,
    r_src: &ScaledPoint,
    eps: ScaledEnergy,
    delta0: f64,
) -> Result<(Complex64, f64)> {
    let d = r.sub(r_src);
    if !(d.rho > 0.0) {
        return Err(Error::Domain {
            field: "r - r_src",
            value: d.rho,
            reason: "coincident points; use the diagonal-limit total current",
        });
    }
    // Shift symmetry: move the source to the origin.
    let shifted = ScaledEnergy(eps.0 - 2.0 * r_src.zeta);
    let path = Contour::choose(d.rho, d.zeta - shifted.0);

    let mut xs = Vec::with_capacity(ORACLE_LEVELS);
    let mut ys = Vec::with_capacity(ORACLE_LEVELS);
    let mut quad_err: f64 = 0.0;
    for k in 0..ORACLE_LEVELS {
        let delta = delta0 / f64::from(1u32 << k);
        let (v, e) = path.integrate(d.rho, d.zeta - shifted.0, delta)?;
        xs.push(delta);
        ys.push(v);
        quad_err = quad_err.max(e);
    }
    let (value, extrap_err) = neville_at_zero(&xs, &ys);
    Ok((value, extrap_err + quad_err))
}

/// Polynomial extrapolation to `x = 0`; error from the last two orders.
fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    let n = xs.len();
    let mut p = ys.to_vec();
    let mut prev_order = p[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (p[i] * (-xj) - p[i + 1] * (-xi)) / (xi - xj);
        }
        if m == n - 2 {
            prev_order = p[0];
        }
    }
    let est = (p[0] - prev_order).norm();
    (p[0], est)
}

/// Integration path: `0 → −iT` along the imaginary axis, then the ray
/// `−iT + s·e^{−iφ}`, `s ≥ 0`.
#[derive(Clone, Copy, Debug)]
struct Contour {
    t: f64,
    phi: f64,
}

impl Contour {
    /// Picks the path that minimises the peak log-magnitude of the integrand,
    /// which bounds the cancellation the quadrature has to resolve.
    fn choose(rho: f64, k: f64) -> Contour {
        let mut ts: Vec<f64> = vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0];
        let disc = k * k - rho * rho;
        if disc >= 0.0 {
            for sgn in [-1.0, 1.0] {
                let t2 = 2.0 * (-k + sgn * disc.sqrt());
                if t2 > 0.0 {
                    ts.push(t2.sqrt());
                }
            }
        }
        let phis = [0.0, PI / 12.0, PI / 6.0, PI / 4.0];
        let mut best = (f64::INFINITY, Contour { t: 1.0, phi: 0.0 });
        for &t in &ts {
            for &phi in &phis {
                let c = Contour { t, phi };
                let peak = c.peak_log_magnitude(rho, k);
                if peak < best.0 {
                    best = (peak, c);
                }
            }
        }
        best.1
    }

    fn peak_log_magnitude(&self, rho: f64, k: f64) -> f64 {
        let mut peak = f64::NEG_INFINITY;
        for i in 1..=64 {
            let tt = self.t * f64::from(i) / 64.0;
            let v = -1.5 * (PI * tt).ln() - rho * rho / tt + tt * k + tt.powi(3) / 12.0;
            peak = peak.max(v);
        }
        let reach = self.ray_scale() * 8.0;
        for i in 0..=128 {
            let s = reach * f64::from(i) / 128.0;
            let tau = self.ray_point(s);
            let v = log_integrand(tau, rho, k, 0.0).re;
            peak = peak.max(v);
        }
        peak
    }

    fn ray_point(&self, s: f64) -> Complex64 {
        Complex64::new(0.0, -self.t) + Complex64::from_polar(s, -self.phi)
    }

    /// Length over which the ray integrand decays appreciably.
    fn ray_scale(&self) -> f64 {
        let cubic = if self.phi > 0.0 {
            (12.0 / (3.0 * self.phi).sin()).cbrt()
        } else {
            f64::INFINITY
        };
        let gauss = (4.0 / self.t).sqrt();
        cubic.min(gauss).clamp(0.25, 20.0)
    }

    fn integrate(&self, rho: f64, k: f64, delta: f64) -> Result<(Complex64, f64)> {
        debug_assert!(self.phi < FRAC_PI_3);
        let opts = QuadOptions {
            rel_tol: 1e-12,
            l1_floor: 1e-15,
            max_intervals: 4000,
        };
        let r2 = rho * rho;
        // Imaginary-axis segment with t = ρ²/w.
        let vertical = integrate_to_infinity(
            |w: f64| {
                if w <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let u = r2 / w;
                let re = -w + u * k + u * u * u / 12.0;
                Complex64::from_polar(w.powf(-0.5) * re.exp(), delta * u)
            },
            r2 / self.t,
            opts,
            "green_oracle (imaginary-axis segment)",
        )?;
        let pre_v = -2.0 / (rho * PI.powf(1.5));

        let dir = Complex64::from_polar(1.0, -self.phi);
        let scale = self.ray_scale();
        let ray = integrate_to_infinity(
            |x: f64| {
                let tau = self.ray_point(scale * x);
                log_integrand(tau, rho, k, delta).exp() * dir * scale
            },
            0.0,
            opts,
            "green_oracle (ray segment)",
        )?;
        let pre_r = Complex64::new(0.0, -2.0);

        let value = vertical.value * pre_v + ray.value * pre_r;
        let err = vertical.error * pre_v.abs() + ray.error * 2.0;
        if err > 1e-8 * value.norm().max(1e-300) {
            return Err(Error::Numerical {
                what: "green_oracle",
                estimate: err,
                value: value.norm(),
            });
        }
        Ok((value, err))
    }
}

/// `ln[(iπτ)^{−3/2}] + iρ²/τ + iτk − iτ³/12 − δτ` with `k = ζ − ε`.
fn log_integrand(tau: Complex64, rho: f64, k: f64, delta: f64) -> Complex64 {
    let i = Complex64::i();
    let pre = (i * PI * tau).ln() * (-1.5);
    pre + i * (rho * rho) / tau + i * tau * k - i * tau * tau * tau / 12.0 - tau * delta
}

/// Closed form from unscaled Airy values; only valid below the overflow limit.
#[cfg(test)]
fn green_unscaled(rho: f64, args: GreenArgs) -> Result<Complex64> {
    let p = airy_all(args.alpha_plus)?;
    let m = airy_all(args.alpha_minus)?;
    Ok((p.ci * m.ai_prime - p.ci_prime * m.ai) * (2.0 / rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::{make_system, ELECTRON_MASS};
    use proptest::prelude::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn coincident_points_rejected() {
        let p = ScaledPoint::new(0.3, 0.0, 1.0);
        assert!(matches!(
            green_scaled(&p, &p, ScaledEnergy(0.0)),
            Err(Error::Domain { field: "r - r_src", .. })
        ));
    }

    #[test]
    fn args_ordered_and_equal_at_small_separation() {
        let a = GreenArgs::new(
            &ScaledPoint::new(0.3, -0.2, 2.0),
            &ScaledPoint::new(0.0, 0.0, 0.5),
            ScaledEnergy(1.0),
        );
        assert!(a.alpha_plus <= a.alpha_minus);
        let a = GreenArgs::new(
            &ScaledPoint::new(1e-9, 0.0, 0.5),
            &ScaledPoint::new(0.0, 0.0, 0.5),
            ScaledEnergy(1.0),
        );
        assert!((a.alpha_plus - a.alpha_minus).abs() < 1e-8);
    }

    #[test]
    fn stable_alpha_minus_far_downstream() {
        // ρ − ζ = ξ²/(ρ+ζ) for ζ = 1e8, ξ = 1.
        let a = GreenArgs::new(
            &ScaledPoint::new(1.0, 0.0, 1e8),
            &ScaledPoint::new(0.0, 0.0, 0.0),
            ScaledEnergy(0.0),
        );
        assert!((a.alpha_minus - 0.5e-8).abs() < 1e-20);
    }

    #[test]
    fn small_separation_limit() {
        let src = ScaledPoint::new(0.0, 0.0, 0.7);
        let r = ScaledPoint::new(1e-7, 0.0, 0.7);
        let g = green_scaled(&r, &src, ScaledEnergy(-0.4)).unwrap();
        // Ci Ai' − Ci' Ai = −1/π at coinciding arguments.
        assert!((g.re * 1e-7 + 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn scaled_kernel_matches_unscaled() {
        for (x, z, e) in [(0.5, 1.0, 0.0), (2.0, 3.0, -4.0), (0.1, -2.0, 3.0), (5.0, 10.0, 8.0)] {
            let r = ScaledPoint::new(x, 0.0, z);
            let o = ScaledPoint::new(0.0, 0.0, 0.0);
            let eps = ScaledEnergy(e);
            let a = green_scaled(&r, &o, eps).unwrap();
            let b = green_unscaled(r.rho, GreenArgs::new(&r, &o, eps)).unwrap();
            assert!(rel(a, b) < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn oracle_reference_point() {
        // ζ = 1, ξ = ν = 0, ε = 0.
        let r = ScaledPoint::new(0.0, 0.0, 1.0);
        let o = ScaledPoint::new(0.0, 0.0, 0.0);
        let c = green_scaled(&r, &o, ScaledEnergy(0.0)).unwrap();
        let (q, err) = green_oracle_scaled(&r, &o, ScaledEnergy(0.0), ORACLE_DELTA0).unwrap();
        assert!(rel(q, c) < 1e-6, "{q} vs {c}");
        assert!(err < 1e-6 * c.norm());
    }

    #[test]
    fn oracle_with_displaced_source() {
        let r = ScaledPoint::new(0.4, 0.3, 0.2);
        let s = ScaledPoint::new(0.0, -0.5, 1.1);
        let eps = ScaledEnergy(-1.5);
        let c = green_scaled(&r, &s, eps).unwrap();
        let (q, _) = green_oracle_scaled(&r, &s, eps, ORACLE_DELTA0).unwrap();
        assert!(rel(q, c) < 1e-6, "{q} vs {c}");
    }

    #[test]
    fn oracle_halved_damping_within_estimate() {
        let r = ScaledPoint::new(1.0, 0.0, 0.5);
        let o = ScaledPoint::new(0.0, 0.0, 0.0);
        let (a, ea) = green_oracle_scaled(&r, &o, ScaledEnergy(0.5), ORACLE_DELTA0).unwrap();
        let (b, eb) = green_oracle_scaled(&r, &o, ScaledEnergy(0.5), ORACLE_DELTA0 / 2.0).unwrap();
        assert!((a - b).norm() <= ea.max(eb).max(1e-12 * a.norm()) * 10.0);
    }

    #[test]
    fn oracle_rejects_bad_damping() {
        let sys = make_system(ELECTRON_MASS, 1e-20, 1.054_571_817e-34).unwrap();
        assert!(green_oracle(&sys, [1e-6, 0.0, 0.0], [0.0; 3], 0.0, 0.0).is_err());
    }

    #[test]
    fn weak_field_free_particle_limit() {
        // βF|r−r'| = 0.005 and E > 0: |G| → m/(2πħ²|r−r'|).
        let sys = make_system(2.0, 0.5, 1.0).unwrap();
        let scale = sys.inverse_length();
        let d = 0.005 / scale;
        let g = green_closed(&sys, [d, 0.0, 0.0], [0.0; 3], 1e-3).unwrap();
        let free = sys.mass() / (2.0 * PI * sys.hbar().powi(2) * d);
        assert!((g.si().norm() / free - 1.0).abs() < 1e-2);
    }

    #[test]
    fn outgoing_wave_downstream() {
        // Im ∂_z ln ψ > 0 downstream for E > 0 (ε < 0).
        let o = ScaledPoint::new(0.0, 0.0, 0.0);
        let eps = ScaledEnergy(-2.0);
        for i in 0..20 {
            let z = 5.0 + 3.0 * f64::from(i);
            let x = 0.3 * f64::from(i % 4);
            let h = 1e-5;
            let a = green_scaled(&ScaledPoint::new(x, 0.0, z + h), &o, eps).unwrap();
            let b = green_scaled(&ScaledPoint::new(x, 0.0, z - h), &o, eps).unwrap();
            let c = green_scaled(&ScaledPoint::new(x, 0.0, z), &o, eps).unwrap();
            let k = ((a - b) / (2.0 * h) / c).im;
            assert!(k > 0.0, "z={z}: {k}");
        }
    }

    proptest! {
        #[test]
        fn shift_symmetry(x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64,
                          xs in -5.0..5.0f64, ys in -5.0..5.0f64, zs in -5.0..5.0f64,
                          e in -8.0..8.0f64) {
            let r = ScaledPoint::new(x, y, z);
            let s = ScaledPoint::new(xs, ys, zs);
            prop_assume!(r.sub(&s).rho > 1e-3);
            let a = green_scaled(&r, &s, ScaledEnergy(e)).unwrap();
            let b = green_scaled(&r.sub(&s), &ScaledPoint::new(0.0, 0.0, 0.0), ScaledEnergy(e - 2.0 * zs)).unwrap();
            prop_assert!(rel(a, b) < 1e-12, "{} {}", a, b);
        }

        #[test]
        fn reciprocity(x in -5.0..5.0f64, z in -5.0..5.0f64, zs in -5.0..5.0f64, e in -8.0..8.0f64) {
            let r = ScaledPoint::new(x, 0.2, z);
            let s = ScaledPoint::new(0.0, 0.0, zs);
            prop_assume!(r.sub(&s).rho > 1e-3);
            let a = green_scaled(&r, &s, ScaledEnergy(e)).unwrap();
            let b = green_scaled(&s, &r, ScaledEnergy(e)).unwrap();
            prop_assert!(rel(a, b) < 1e-12);
        }
    }
}
