//! Equivalent electrical network of the plate: a static capacitor C₀ in
//! parallel with a series L–C–R motional branch, driven from a voltage source
//! through a shunt resistor R₀.
//!
//! Reactances follow the usual sign convention inside complex impedances
//! (X₀ = −1/(C₀ω)). The scalar divider and power formulas use |X₀|.
//! Voltages are RMS, so ΔP = U_g²/R with no factor of ½.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvdParams {
    /// L, H
    pub inductance: f64,
    /// C, F
    pub capacitance: f64,
    /// R, Ω
    pub resistance: f64,
    /// C₀, F
    pub static_capacitance: f64,
}

impl BvdParams {
    pub fn new(
        inductance: f64,
        capacitance: f64,
        resistance: f64,
        static_capacitance: f64,
    ) -> Result<Self> {
        let p = BvdParams {
            inductance,
            capacitance,
            resistance,
            static_capacitance,
        };
        p.validate()?;
        Ok(p)
    }

    /// Picks L so that the motional branch resonates at `frequency`.
    pub fn from_resonance(
        frequency: f64,
        capacitance: f64,
        resistance: f64,
        static_capacitance: f64,
    ) -> Result<Self> {
        ensure_positive("frequency", frequency)?;
        ensure_positive("capacitance", capacitance)?;
        let w = TAU * frequency;
        Self::new(
            1.0 / (w * w * capacitance),
            capacitance,
            resistance,
            static_capacitance,
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("inductance", self.inductance)?;
        ensure_positive("capacitance", self.capacitance)?;
        ensure_positive("resistance", self.resistance)?;
        ensure_positive("static_capacitance", self.static_capacitance)
    }

    pub fn with_resistance(self, resistance: f64) -> Self {
        BvdParams { resistance, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    /// U_i, V RMS
    pub source_voltage: f64,
    /// R₀, Ω. Zero removes the divider.
    pub shunt_resistance: f64,
}

impl DriveConfig {
    pub fn new(source_voltage: f64, shunt_resistance: f64) -> Result<Self> {
        ensure_positive("source_voltage", source_voltage)?;
        if !(shunt_resistance.is_finite() && shunt_resistance >= 0.0) {
            return Err(Error::InvalidProperty {
                field: "shunt_resistance",
                value: shunt_resistance,
                reason: "must be finite and >= 0",
            });
        }
        Ok(DriveConfig {
            source_voltage,
            shunt_resistance,
        })
    }
}

/// Operating point of the network at motional resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitEvaluation {
    pub frequency: f64,
    /// |X₀| = 1/(C₀ω), Ω
    pub x0: f64,
    /// X₁ = Lω − 1/(Cω), Ω
    pub x1: f64,
    pub z: Complex64,
    /// Motional voltage from the scalar divider U_i·|Z|/(|Z|+R₀), V
    pub u_g: f64,
    /// U_g²/R, W
    pub delta_p: f64,
    /// U_g/R, A
    pub i_g: f64,
    /// Motional voltage from the complex divider U_i·|Z/(Z+R₀)|, V
    pub u_g_exact: f64,
    /// u_g_exact²/R, W
    pub delta_p_exact: f64,
}

impl CircuitEvaluation {
    /// Velocity of the motional branch i_g/γ for a coupling factor γ in N/V.
    pub fn velocity(&self, coupling: f64) -> f64 {
        self.i_g / coupling
    }
}

fn angular(frequency: f64) -> f64 {
    TAU * frequency
}

/// |X₀| = 1/(C₀ω).
pub fn static_reactance(p: &BvdParams, frequency: f64) -> f64 {
    1.0 / (p.static_capacitance * angular(frequency))
}

/// X₁ = Lω − 1/(Cω).
pub fn motional_reactance(p: &BvdParams, frequency: f64) -> f64 {
    let w = angular(frequency);
    p.inductance * w - 1.0 / (p.capacitance * w)
}

/// f_r = 1/(2π√(LC)).
pub fn resonant_frequency(p: &BvdParams) -> f64 {
    1.0 / (TAU * (p.inductance * p.capacitance).sqrt())
}

/// Two-terminal impedance from the closed-form real/imaginary split
/// Re = X₀²R / D, Im = X₀(R² + X₀X₁ + X₁²) / D with D = R² + (X₀+X₁)².
pub fn impedance(p: &BvdParams, frequency: f64) -> Complex64 {
    let x0 = -static_reactance(p, frequency);
    let x1 = motional_reactance(p, frequency);
    let r = p.resistance;
    let s = x0 + x1;
    let d = r * r + s * s;
    Complex64::new(x0 * x0 * r / d, x0 * (r * r + x0 * x1 + x1 * x1) / d)
}

/// Impedance at ω = 1/√(LC), where X₁ vanishes:
/// Z = X₀²R/(R²+X₀²) + j·X₀R²/(R²+X₀²).
pub fn impedance_at_resonance(p: &BvdParams) -> Complex64 {
    let x0 = -static_reactance(p, resonant_frequency(p));
    let r = p.resistance;
    let d = r * r + x0 * x0;
    Complex64::new(x0 * x0 * r / d, x0 * r * r / d)
}

/// U_g(s)/I(s) = (LCs² + RCs + 1) / (C₀LCs³ + C₀RCs² + (C₀+C)s), s = j2πf.
pub fn transfer_ug_over_i(p: &BvdParams, frequency: f64) -> Complex64 {
    let s = Complex64::new(0.0, angular(frequency));
    let (l, c, r, c0) = (
        p.inductance,
        p.capacitance,
        p.resistance,
        p.static_capacitance,
    );
    let num = s * s * (l * c) + s * (r * c) + 1.0;
    let den = s * s * s * (c0 * l * c) + s * s * (c0 * r * c) + s * (c0 + c);
    num / den
}

/// |Z| at resonance, X₀R/√(R²+X₀²).
fn resonant_magnitude(x0: f64, r: f64) -> f64 {
    x0 * r / (r * r + x0 * x0).sqrt()
}

/// U_g = U_i·|Z|/(|Z|+R₀), with |Z| taken at resonance. Phase of Z is ignored,
/// see [`CircuitEvaluation::u_g_exact`] for the complex divider.
pub fn motional_voltage(p: &BvdParams, d: &DriveConfig) -> f64 {
    let x0 = static_reactance(p, resonant_frequency(p));
    let z = resonant_magnitude(x0, p.resistance);
    d.source_voltage * z / (z + d.shunt_resistance)
}

/// ΔP = U_i² / (R·(1 + R₀·√(1/X₀² + 1/R²))²).
pub fn real_power(p: &BvdParams, d: &DriveConfig) -> f64 {
    let x0 = static_reactance(p, resonant_frequency(p));
    let r = p.resistance;
    let k = 1.0 + d.shunt_resistance * (1.0 / (x0 * x0) + 1.0 / (r * r)).sqrt();
    d.source_voltage * d.source_voltage / (r * k * k)
}

pub fn evaluate(p: &BvdParams, d: &DriveConfig) -> CircuitEvaluation {
    let frequency = resonant_frequency(p);
    let z = impedance_at_resonance(p);
    let u_g = motional_voltage(p, d);
    let u_g_exact = d.source_voltage * z.norm() / (z + d.shunt_resistance).norm();
    CircuitEvaluation {
        frequency,
        x0: static_reactance(p, frequency),
        x1: motional_reactance(p, frequency),
        z,
        u_g,
        delta_p: real_power(p, d),
        i_g: u_g / p.resistance,
        u_g_exact,
        delta_p_exact: u_g_exact * u_g_exact / p.resistance,
    }
}
