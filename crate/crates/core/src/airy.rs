//! Real-argument Airy functions Ai, Bi, their derivatives, and `Ci = Bi + i Ai`.
//!
//! Three branches:
//!
//! * `|x| <= X_SWITCH`: Maclaurin series summed in double-double arithmetic,
//!   which absorbs the cancellation between the even and odd auxiliary series
//!   (up to a factor `e^{2ζ} ≈ 10^13` at `x = 8`).
//! * `x > X_SWITCH`: exponentially scaled asymptotic expansions.
//! * `x < -X_SWITCH`: oscillatory asymptotic expansions.
//!
//! Here `ζ = (2/3)|x|^{3/2}`. The asymptotic series are truncated at their
//! smallest term, which at the switchover is of order `e^{-2ζ} ≈ 10^-13`.
//!
//! References: DLMF §9.4 (Maclaurin series), §9.7 (asymptotic expansions).

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Boundary between the series branch and the asymptotic branches.
pub const X_SWITCH: f64 = 8.0;

/// Largest positive argument for which unscaled `Bi` stays finite.
pub const X_MAX: f64 = 100.0;

/// Ai, Ai', Bi, Bi' at a real argument, plus `Ci = Bi + i Ai` and `Ci'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexAiryPair {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
    pub ci: Complex64,
    pub ci_prime: Complex64,
}

impl ComplexAiryPair {
    fn from_parts([ai, ai_prime, bi, bi_prime]: [f64; 4]) -> Self {
        ComplexAiryPair {
            ai,
            ai_prime,
            bi,
            bi_prime,
            ci: Complex64::new(bi, ai),
            ci_prime: Complex64::new(bi_prime, ai_prime),
        }
    }

    /// `Ai Bi' - Ai' Bi`, equal to `1/π`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// Exponentially scaled Airy values.
///
/// For `x > 0` the true values are `Ai = ai·e^{-s}`, `Ai' = ai_prime·e^{-s}`,
/// `Bi = bi·e^{s}` and `Bi' = bi_prime·e^{s}` with `s = (2/3) x^{3/2}`.
/// For `x <= 0` the scale `s` is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledAiry {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
    pub exponent: f64,
}

impl ScaledAiry {
    /// `ln|Ai(x)|`.
    pub fn ln_abs_ai(&self) -> f64 {
        self.ai.abs().ln() - self.exponent
    }
}

/// Ai, Ai', Bi, Bi' and `Ci`, `Ci'` at `x`.
///
/// Fails for NaN/infinite input and for `x > X_MAX`, where `Bi` overflows.
/// Negative arguments of any magnitude are accepted.
pub fn airy_all(x: f64) -> Result<ComplexAiryPair> {
    check_finite(x)?;
    if x > X_MAX {
        return Err(Error::Range {
            what: "airy_all (Bi overflows)",
            exponent: 2.0 / 3.0 * x * x.sqrt(),
        });
    }
    let parts = if x.abs() <= X_SWITCH {
        maclaurin(x)
    } else if x > 0.0 {
        let s = asymptotic_positive_scaled(x);
        let e = (2.0 / 3.0 * x * x.sqrt()).exp();
        [s[0] / e, s[1] / e, s[2] * e, s[3] * e]
    } else {
        asymptotic_negative(x)
    };
    Ok(ComplexAiryPair::from_parts(parts))
}

/// Exponentially scaled Airy values; valid for every finite `x`.
pub fn airy_scaled(x: f64) -> Result<ScaledAiry> {
    check_finite(x)?;
    let [ai, ai_prime, bi, bi_prime] = if x > X_SWITCH {
        asymptotic_positive_scaled(x)
    } else if x >= -X_SWITCH {
        let v = maclaurin(x);
        if x > 0.0 {
            let e = (2.0 / 3.0 * x * x.sqrt()).exp();
            [v[0] * e, v[1] * e, v[2] / e, v[3] / e]
        } else {
            v
        }
    } else {
        asymptotic_negative(x)
    };
    let exponent = if x > 0.0 { 2.0 / 3.0 * x * x.sqrt() } else { 0.0 };
    Ok(ScaledAiry {
        ai,
        ai_prime,
        bi,
        bi_prime,
        exponent,
    })
}

/// `Ai'(x)² − x·Ai(x)²` as `(mantissa, s)` with value `mantissa·e^{-2s}`.
///
/// This combination is positive and decreasing (its derivative is `−Ai²`).
/// For large positive `x` the two squares agree to leading orders, so the
/// difference is summed directly from the asymptotic series.
pub fn airy_flux_scaled(x: f64) -> Result<(f64, f64)> {
    check_finite(x)?;
    if x <= X_SWITCH {
        let s = airy_scaled(x)?;
        return Ok((s.ai_prime * s.ai_prime - x * s.ai * s.ai, s.exponent));
    }
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let w = 1.0 / zeta;
    let coeffs: Vec<(f64, f64)> = AsymptoticCoefficients::new().take(200).collect();
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let u = truncated_sum(coeffs.iter().enumerate().map(|(k, c)| alt(k) * c.0), w);
    let v = truncated_sum(coeffs.iter().enumerate().map(|(k, c)| alt(k) * c.1), w);
    // V − U has no constant term.
    let diff = w * truncated_sum(coeffs.iter().enumerate().skip(1).map(|(k, c)| alt(k) * (c.1 - c.0)), w);
    Ok((x.sqrt() / (4.0 * PI) * diff * (u + v), zeta))
}

/// Oscillatory-region expansions `(Ai, Ai', Bi, Bi')` for `x <= -X_SWITCH`.
pub fn airy_modulus_asymptotic(x: f64) -> Result<(f64, f64, f64, f64)> {
    check_finite(x)?;
    if x > -X_SWITCH {
        return Err(Error::Domain {
            field: "x",
            value: x,
            reason: "oscillatory asymptotics need x <= -X_SWITCH",
        });
    }
    let [a, ap, b, bp] = asymptotic_negative(x);
    Ok((a, ap, b, bp))
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            field: "x",
            value: x,
            reason: "Airy argument must be finite",
        })
    }
}

// Ai(0), -Ai'(0) and √3 as unevaluated double-double sums.
const AI0: Dd = Dd(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
const MINUS_AIP0: Dd = Dd(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);
const SQRT3: Dd = Dd(1.732_050_807_568_877_2, 1.003_508_422_180_690_3e-16);

/// Maclaurin series `Ai = c1 f - c2 g`, `Bi = √3 (c1 f + c2 g)`.
pub(crate) fn maclaurin(x: f64) -> [f64; 4] {
    let x2 = Dd::two_prod(x, x);
    let x3 = x2.mul_f(x);

    // f, g and their derivatives, term by term.
    let mut tf = Dd::from(1.0);
    let mut tg = Dd::from(x);
    let mut tfp = Dd::from(0.0);
    let mut tgp = Dd::from(1.0);
    let (mut f, mut g, mut fp, mut gp) = (tf, tg, tfp, tgp);

    for k in 1..300u32 {
        let k3 = 3.0 * f64::from(k);
        tf = tf.mul(x3).div_f((k3 - 1.0) * k3);
        tg = tg.mul(x3).div_f(k3 * (k3 + 1.0));
        tfp = if k == 1 {
            x2.div_f(2.0)
        } else {
            tfp.mul(x3).div_f((k3 - 3.0) * (k3 - 1.0))
        };
        tgp = tgp.mul(x3).div_f((k3 - 2.0) * k3);
        f = f.add(tf);
        g = g.add(tg);
        fp = fp.add(tfp);
        gp = gp.add(tgp);

        let small = |t: Dd, s: Dd| t.0.abs() <= 1e-33 * s.0.abs().max(1e-300);
        if k > 2 && small(tf, f) && small(tg, g) && small(tfp, fp) && small(tgp, gp) {
            break;
        }
    }

    let cf = AI0.mul(f);
    let cg = MINUS_AIP0.mul(g);
    let cfp = AI0.mul(fp);
    let cgp = MINUS_AIP0.mul(gp);
    [
        cf.sub(cg).to_f64(),
        cfp.sub(cgp).to_f64(),
        SQRT3.mul(cf.add(cg)).to_f64(),
        SQRT3.mul(cfp.add(cgp)).to_f64(),
    ]
}

/// Iterates the asymptotic coefficients `(u_k, v_k)`, DLMF 9.7.2.
struct AsymptoticCoefficients {
    k: u32,
    u: f64,
}

impl AsymptoticCoefficients {
    fn new() -> Self {
        AsymptoticCoefficients { k: 0, u: 1.0 }
    }
}

impl Iterator for AsymptoticCoefficients {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        if self.k > 0 {
            let k = f64::from(self.k);
            self.u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        }
        let k = f64::from(self.k);
        let v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * self.u;
        self.k += 1;
        Some((self.u, v))
    }
}

/// Sums `Σ c_k w^k` with optimal truncation; `sign` alternates if negative.
fn truncated_sum(terms: impl Iterator<Item = f64>, w: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut prev = f64::INFINITY;
    for c in terms.take(200) {
        let t = c * pow;
        if t.abs() > prev {
            break;
        }
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
        prev = t.abs();
        pow *= w;
    }
    sum
}

fn asymptotic_positive_scaled(x: f64) -> [f64; 4] {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let w = 1.0 / zeta;
    let coeffs: Vec<(f64, f64)> = AsymptoticCoefficients::new().take(200).collect();
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let su_alt = truncated_sum(coeffs.iter().enumerate().map(|(k, c)| alt(k) * c.0), w);
    let sv_alt = truncated_sum(coeffs.iter().enumerate().map(|(k, c)| alt(k) * c.1), w);
    let su = truncated_sum(coeffs.iter().map(|c| c.0), w);
    let sv = truncated_sum(coeffs.iter().map(|c| c.1), w);
    let q = x.sqrt().sqrt();
    let rsp = 1.0 / PI.sqrt();
    [
        0.5 * rsp / q * su_alt,
        -0.5 * rsp * q * sv_alt,
        rsp / q * su,
        rsp * q * sv,
    ]
}

fn asymptotic_negative(x: f64) -> [f64; 4] {
    let z = -x;
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let w = 1.0 / zeta;
    // Even and odd parts with alternating signs: Σ(-1)^k c_{2k} w^{2k} and
    // Σ(-1)^k c_{2k+1} w^{2k+1}.
    let coeffs: Vec<(f64, f64)> = AsymptoticCoefficients::new().take(200).collect();
    let split = |pick: fn(&(f64, f64)) -> f64, parity: usize| -> f64 {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == parity)
            .enumerate()
            .map(|(j, (_, c))| if j % 2 == 0 { pick(c) } else { -pick(c) });
        let lead = if parity == 0 { 1.0 } else { w };
        lead * truncated_sum(terms, w * w)
    };
    let pe = split(|c| c.0, 0);
    let qo = split(|c| c.0, 1);
    let re = split(|c| c.1, 0);
    let so = split(|c| c.1, 1);

    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = z.sqrt().sqrt();
    let rsp = 1.0 / PI.sqrt();
    [
        rsp / q * (c * pe + s * qo),
        rsp * q * (s * re - c * so),
        rsp / q * (-s * pe + c * qo),
        rsp * q * (c * re + s * so),
    ]
}

/// Unevaluated sum `hi + lo` carrying roughly 32 significant digits.
#[derive(Clone, Copy, Debug)]
struct Dd(f64, f64);

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }
}

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd(s, e)
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd(s, b - (s - a))
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let t = Dd::two_sum(self.1, o.1);
        let s = Dd::quick_two_sum(s.0, s.1 + t.0);
        Dd::quick_two_sum(s.0, s.1 + t.1)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::two_prod(self.0, o.0);
        Dd::quick_two_sum(p.0, p.1 + (self.0 * o.1 + self.1 * o.0))
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = Dd::two_prod(self.0, b);
        Dd::quick_two_sum(p.0, p.1 + self.1 * b)
    }

    fn div_f(self, b: f64) -> Dd {
        let q1 = self.0 / b;
        let r = self.sub(Dd::two_prod(q1, b));
        let q2 = r.0 / b;
        let r = r.sub(Dd::two_prod(q2, b));
        let q3 = r.0 / b;
        Dd::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}
