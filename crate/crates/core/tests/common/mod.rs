//! Shared test oracles.

#![allow(dead_code)]

use num_bigint::BigInt;

/// Fractional decimal digits carried by the fixed-point series.
const DIGITS: u32 = 120;

const AI0: &str = "0.35502805388781723926006318600418317639797917419917724058332651030081004245012671";
const MINUS_AIP0: &str = "0.25881940379280679840518356018920396347909113835493458221000181385610277267679028";
const SQRT3: &str = "1.7320508075688772935274463415058723669428052538103806280558069794519330169088";

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

/// Decimal literal to fixed point (digits beyond `DIGITS` are dropped).
fn fixed(lit: &str) -> BigInt {
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    let frac: String = frac.chars().take(DIGITS as usize).collect();
    let mut digits = String::from(int);
    digits.push_str(&frac);
    digits.push_str(&"0".repeat(DIGITS as usize - frac.len()));
    digits.parse().unwrap()
}

fn to_f64(v: &BigInt) -> f64 {
    // Keep 40 fractional digits, then let the float parser round once.
    let cut: BigInt = v / BigInt::from(10u32).pow(DIGITS - 40);
    let s = cut.to_string();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b.to_owned()),
        None => (false, s),
    };
    let body = format!("{:0>41}", body);
    let (i, f) = body.split_at(body.len() - 40);
    let text = format!("{}{}.{}", if neg { "-" } else { "" }, i, f);
    text.parse().unwrap()
}

/// `[Ai, Ai', Bi, Bi']` at `x = p/q` from the Maclaurin series in exact
/// fixed-point arithmetic. Accurate to ~1e-30 relative for |x| ≤ 25.
pub fn airy_reference(p: i64, q: i64) -> [f64; 4] {
    let s = scale();
    let c1 = fixed(AI0);
    let c2 = fixed(MINUS_AIP0);
    let sqrt3 = fixed(SQRT3);

    let p = BigInt::from(p);
    let q = BigInt::from(q);
    let p3 = &p * &p * &p;
    let q3 = &q * &q * &q;
    let x = &p * &s / &q;
    let x2 = &p * &p * &s / (&q * &q);

    let zero = BigInt::from(0);
    let (mut f, mut g, mut fp, mut gp) = (s.clone(), x.clone(), zero.clone(), s.clone());
    let (mut tf, mut tg, mut tfp, mut tgp) = (s.clone(), x.clone(), zero.clone(), s.clone());
    for k in 1..400i64 {
        let k3 = BigInt::from(3 * k);
        tf = &tf * &p3 / (&q3 * (&k3 - 1) * &k3);
        tg = &tg * &p3 / (&q3 * &k3 * (&k3 + 1));
        tfp = if k == 1 {
            &x2 / 2
        } else {
            &tfp * &p3 / (&q3 * (&k3 - 3) * (&k3 - 1))
        };
        tgp = &tgp * &p3 / (&q3 * (&k3 - 2) * &k3);
        f += &tf;
        g += &tg;
        fp += &tfp;
        gp += &tgp;
        if k > 10 && tf == zero && tg == zero && tfp == zero && tgp == zero {
            break;
        }
    }
    let cf = &c1 * &f / &s;
    let cg = &c2 * &g / &s;
    let cfp = &c1 * &fp / &s;
    let cgp = &c2 * &gp / &s;
    [
        to_f64(&(&cf - &cg)),
        to_f64(&(&cfp - &cgp)),
        to_f64(&(&sqrt3 * (&cf + &cg) / &s)),
        to_f64(&(&sqrt3 * (&cfp + &cgp) / &s)),
    ]
}
