//! Number parsing with optional unit suffixes. A bare number is taken as SI.

use std::f64::consts::SQRT_2;

/// (suffix, decimal exponent, extra factor)
type Table = &'static [(&'static str, i32, f64)];

const LENGTH: Table = &[
    ("mm", -3, 1.0),
    ("um", -6, 1.0),
    ("µm", -6, 1.0),
    ("nm", -9, 1.0),
    ("m", 0, 1.0),
];
const FREQUENCY: Table = &[("MHz", 6, 1.0), ("kHz", 3, 1.0), ("Hz", 0, 1.0)];
const DENSITY: Table = &[("g/cm3", 3, 1.0), ("kg/m3", 0, 1.0)];
const MODULUS: Table = &[
    ("kN/mm2", 9, 1.0),
    ("N/mm2", 6, 1.0),
    ("GPa", 9, 1.0),
    ("MPa", 6, 1.0),
    ("kPa", 3, 1.0),
    ("Pa", 0, 1.0),
];
const PRESSURE: Table = &[("MPa", 6, 1.0), ("kPa", 3, 1.0), ("Pa", 0, 1.0)];
const CAPACITANCE: Table = &[
    ("uF", -6, 1.0),
    ("µF", -6, 1.0),
    ("nF", -9, 1.0),
    ("pF", -12, 1.0),
    ("F", 0, 1.0),
];
const RESISTANCE: Table = &[
    ("kohm", 3, 1.0),
    ("kΩ", 3, 1.0),
    ("ohm", 0, 1.0),
    ("Ω", 0, 1.0),
];
// Voltages are RMS internally.
const VOLTAGE: Table = &[
    ("Vpp", 0, 0.5 / SQRT_2),
    ("Vpk", 0, 1.0 / SQRT_2),
    ("Vrms", 0, 1.0),
    ("V", 0, 1.0),
];
const VELOCITY: Table = &[("mm/s", -3, 1.0), ("m/s", 0, 1.0)];
const NONE: Table = &[];
const COUPLING: Table = &[("N/V", 0, 1.0)];

fn parse(s: &str, table: Table) -> Result<f64, String> {
    let s = s.trim();
    let mut longest: Vec<&(&str, i32, f64)> = table.iter().collect();
    longest.sort_by_key(|(suffix, ..)| std::cmp::Reverse(suffix.len()));
    let (number, exp, factor) = longest
        .into_iter()
        .find_map(|&(suffix, exp, factor)| s.strip_suffix(suffix).map(|n| (n.trim(), exp, factor)))
        .unwrap_or((s, 0, 1.0));
    let invalid = || {
        let units: Vec<&str> = table.iter().map(|(u, ..)| *u).collect();
        format!(
            "`{s}` is not a number with an optional unit ({})",
            units.join(", ")
        )
    };
    if number.contains(['e', 'E']) {
        let v: f64 = number.parse().map_err(|_| invalid())?;
        return finite(s, v * 10f64.powi(exp) * factor);
    }
    // Applying the prefix in decimal keeps "9.88nF" identical to 9.88e-9.
    let v: f64 = format!("{number}e{exp}").parse().map_err(|_| invalid())?;
    finite(s, v * factor)
}

fn finite(s: &str, v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn length(s: &str) -> Result<f64, String> {
    parse(s, LENGTH)
}

pub fn frequency(s: &str) -> Result<f64, String> {
    parse(s, FREQUENCY)
}

pub fn density(s: &str) -> Result<f64, String> {
    parse(s, DENSITY)
}

pub fn modulus(s: &str) -> Result<f64, String> {
    parse(s, MODULUS)
}

pub fn pressure(s: &str) -> Result<f64, String> {
    parse(s, PRESSURE)
}

pub fn capacitance(s: &str) -> Result<f64, String> {
    parse(s, CAPACITANCE)
}

pub fn resistance(s: &str) -> Result<f64, String> {
    parse(s, RESISTANCE)
}

pub fn voltage(s: &str) -> Result<f64, String> {
    parse(s, VOLTAGE)
}

pub fn velocity(s: &str) -> Result<f64, String> {
    parse(s, VELOCITY)
}

pub fn coupling(s: &str) -> Result<f64, String> {
    parse(s, COUPLING)
}

pub fn plain(s: &str) -> Result<f64, String> {
    parse(s, NONE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(length("0.3mm").unwrap(), 0.3e-3);
        assert_eq!(length("3e-6").unwrap(), 3e-6);
        assert_eq!(length("3 um").unwrap(), 3e-6);
        assert_eq!(frequency("30kHz").unwrap(), 30e3);
        assert_eq!(density("7.9g/cm3").unwrap(), 7900.0);
        assert_eq!(modulus("84kN/mm2").unwrap(), 84e9);
        assert_eq!(capacitance("9.88nF").unwrap(), 9.88e-9);
        assert!((voltage("40Vpk").unwrap() - 40.0 / SQRT_2).abs() < 1e-12);
        assert_eq!(voltage("40").unwrap(), 40.0);
        assert_eq!(resistance("2.15kohm").unwrap(), 2150.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(length("3 parsecs").is_err());
        assert!(frequency("inf").is_err());
        assert!(plain("").is_err());
        assert!(plain("1kHz").is_err());
    }
}
