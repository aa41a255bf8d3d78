//! Strict parsing of dimensioned flag values such as `-50ueV`, `2.5kHz` or `0.4um`.
//!
//! A bare number is rejected for every dimensioned quantity.

use qsource_core::Energy;

/// Splits `"-1.5e3kHz"` into `("-1.5e3", "kHz")` and checks the number.
fn split(input: &str) -> Result<(&str, &str), String> {
    let s = input.trim();
    let cut = s
        .char_indices()
        .find(|&(i, c)| {
            let numeric = c.is_ascii_digit() || c == '.' || c == '+' || c == '-';
            // An exponent marker belongs to the number only if a digit or sign follows.
            let exponent = (c == 'e' || c == 'E')
                && i > 0
                && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+');
            !(numeric || exponent)
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(cut);
    if num.is_empty() {
        return Err(format!("`{input}` has no numeric value"));
    }
    let value: f64 = num.parse().map_err(|_| format!("`{num}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{input}` is not finite"));
    }
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(format!("`{input}` needs a unit suffix"));
    }
    Ok((num, unit))
}

/// `num·10^exp`, rounded once: the exponent is folded into the decimal text.
fn decimal(num: &str, exp: i32) -> f64 {
    let (mantissa, e) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().unwrap_or(0)),
        None => (num, 0),
    };
    format!("{mantissa}e{}", e + exp).parse().unwrap_or(f64::NAN)
}

fn lookup(input: &str, table: &[(&str, i32)], kind: &str) -> Result<f64, String> {
    let (value, unit) = split(input)?;
    match table.iter().find(|(u, _)| *u == unit) {
        Some((_, exp)) => Ok(decimal(value, *exp)),
        None => {
            let known: Vec<&str> = table.iter().map(|(u, _)| *u).collect();
            Err(format!(
                "unknown {kind} unit `{unit}` (expected one of {})",
                known.join(", ")
            ))
        }
    }
}

/// Length in metres.
pub fn length(input: &str) -> Result<f64, String> {
    lookup(
        input,
        &[("nm", -9), ("um", -6), ("mm", -3), ("cm", -2), ("m", 0)],
        "length",
    )
}

/// Time in seconds.
pub fn time(input: &str) -> Result<f64, String> {
    lookup(input, &[("us", -6), ("ms", -3), ("s", 0)], "time")
}

/// Frequency in Hz.
pub fn frequency(input: &str) -> Result<f64, String> {
    lookup(input, &[("Hz", 0), ("kHz", 3), ("MHz", 6)], "frequency")
}

/// Energy, either in electron volts / joules or as a frequency `E = hν`.
pub fn energy(input: &str) -> Result<Energy, String> {
    let (value, unit) = split(input)?;
    let ev = match unit {
        "neV" => Some(-9),
        "ueV" => Some(-6),
        "meV" => Some(-3),
        "eV" => Some(0),
        _ => None,
    };
    if let Some(exp) = ev {
        return Ok(Energy::ElectronVolts(decimal(value, exp)));
    }
    if unit == "J" {
        return Ok(Energy::Joules(decimal(value, 0)));
    }
    frequency(input)
        .map(Energy::Frequency)
        .map_err(|_| format!("unknown energy unit `{unit}` (expected neV, ueV, meV, eV, J, Hz, kHz or MHz)"))
}

/// Force per elementary charge in eV/m (equivalently the field in V/m).
pub fn field(input: &str) -> Result<f64, String> {
    lookup(input, &[("V/m", 0), ("eV/m", 0), ("kV/m", 3), ("V/cm", 2)], "field")
}

/// Coupling `Ω` in rad/s; a frequency `f` means `Ω = 2πf`.
pub fn coupling(input: &str) -> Result<f64, String> {
    if let Ok(f) = frequency(input) {
        return Ok(2.0 * std::f64::consts::PI * f);
    }
    lookup(input, &[("rad/s", 0)], "coupling").map_err(|_| format!("`{input}`: expected Hz, kHz or rad/s"))
}

/// Comma-separated lengths, e.g. `0.2um,0.4um`.
pub fn length_list(input: &str) -> Result<Vec<f64>, String> {
    input.split(',').map(length).collect()
}

/// Mass in kilograms (`kg`) or atomic mass units (`u`).
pub fn mass(input: &str) -> Result<f64, String> {
    match split(input)? {
        (v, "kg") => Ok(decimal(v, 0)),
        (v, "u") => Ok(decimal(v, 0) * qsource_core::scaling::ATOMIC_MASS_UNIT),
        (_, unit) => Err(format!("unknown mass unit `{unit}` (expected kg or u)")),
    }
}

/// Acceleration in m/s².
pub fn acceleration(input: &str) -> Result<f64, String> {
    lookup(input, &[("m/s2", 0), ("m/s^2", 0)], "acceleration")
}
