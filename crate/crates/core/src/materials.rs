//! Mechanical property records for cover glasses and the piezoelectric
//! actuator bonded to them.
//!
//! All stored values are SI: metres, kg/m³, pascals, farads.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Thickness range accepted for library entries.
pub const LIBRARY_THICKNESS_RANGE: (f64, f64) = (1e-4, 5e-3);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlassSpec {
    pub name: String,
    #[serde(rename = "thickness_m")]
    pub thickness: f64,
    #[serde(rename = "density_kg_m3")]
    pub density: f64,
    #[serde(rename = "youngs_modulus_pa")]
    pub youngs_modulus: f64,
}

impl GlassSpec {
    pub fn new(
        name: impl Into<String>,
        thickness: f64,
        density: f64,
        youngs_modulus: f64,
    ) -> Result<Self> {
        let glass = GlassSpec {
            name: name.into(),
            thickness,
            density,
            youngs_modulus,
        };
        glass.validate()?;
        Ok(glass)
    }

    /// Builds a record from the units used in glass datasheets:
    /// mm, g/cm³ and kN/mm² (= GPa).
    pub fn from_datasheet_units(
        name: impl Into<String>,
        thickness_mm: f64,
        density_g_cm3: f64,
        modulus_kn_mm2: f64,
    ) -> Result<Self> {
        Self::new(
            name,
            shift_decimal(thickness_mm, -3),
            shift_decimal(density_g_cm3, 3),
            shift_decimal(modulus_kn_mm2, 9),
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("thickness", self.thickness)?;
        ensure_positive("density", self.density)?;
        ensure_positive("youngs_modulus", self.youngs_modulus)
    }

    /// Stricter check applied to library entries: thickness must also lie in
    /// [`LIBRARY_THICKNESS_RANGE`].
    pub fn validate_library_entry(&self) -> Result<()> {
        self.validate()?;
        let (lo, hi) = LIBRARY_THICKNESS_RANGE;
        if !(lo..=hi).contains(&self.thickness) {
            return Err(Error::InvalidProperty {
                field: "thickness",
                value: self.thickness,
                reason: "library thickness must lie in [0.1 mm, 5 mm]",
            });
        }
        Ok(())
    }

    pub fn with_thickness(&self, thickness: f64) -> Self {
        GlassSpec {
            thickness,
            ..self.clone()
        }
    }

    pub fn with_density(&self, density: f64) -> Self {
        GlassSpec {
            density,
            ..self.clone()
        }
    }

    pub fn with_youngs_modulus(&self, youngs_modulus: f64) -> Self {
        GlassSpec {
            youngs_modulus,
            ..self.clone()
        }
    }
}

/// Piezoelectric actuator layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorSpec {
    pub thickness: f64,
    pub density: f64,
    pub youngs_modulus: f64,
    /// Clamped (static) capacitance C₀.
    pub static_capacitance: f64,
    /// Electromechanical coupling γ in N/V. Not known for the stock actuator.
    pub coupling: Option<f64>,
}

impl ActuatorSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("actuator.thickness", self.thickness)?;
        ensure_positive("actuator.density", self.density)?;
        ensure_positive("actuator.youngs_modulus", self.youngs_modulus)?;
        ensure_positive("actuator.static_capacitance", self.static_capacitance)?;
        if let Some(g) = self.coupling {
            ensure_positive("actuator.coupling", g)?;
        }
        Ok(())
    }
}

impl Default for ActuatorSpec {
    /// Hard PZT plate (Steminc SMPL60W5T03R112): 0.3 mm, 7.9 g/cm³,
    /// 84 kN/mm², C₀ = 9.88 nF.
    fn default() -> Self {
        ActuatorSpec {
            thickness: 0.3e-3,
            density: 7900.0,
            youngs_modulus: 84e9,
            static_capacitance: 9.88e-9,
            coupling: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LibraryEntry {
    pub glass: GlassSpec,
    pub actuator: ActuatorSpec,
    /// Resonant drive frequency of the assembled plate, when known.
    pub excitation_frequency: Option<f64>,
}

const TABLE: [(&str, f64, f64, f64); 8] = [
    ("SLG_0.4", 0.4, 2.483, 71.0),
    ("SLG_0.56", 0.56, 2.483, 71.0),
    ("SLG_0.7", 0.7, 2.483, 71.0),
    ("D263_0.4", 0.4, 2.51, 72.9),
    ("D263_0.56", 0.56, 2.51, 72.9),
    ("Gorilla_0.56", 0.56, 2.42, 71.5),
    ("Gorilla_0.8", 0.8, 2.42, 71.5),
    ("BoroFloat_0.7", 0.7, 2.2, 64.0),
];

/// x·10^exp computed on the decimal representation, so 0.56 mm becomes the
/// same double as the literal 0.56e-3.
fn shift_decimal(x: f64, exp: i32) -> f64 {
    format!("{x:e}")
        .split_once('e')
        .and_then(|(m, e)| format!("{m}e{}", e.parse::<i32>().ok()? + exp).parse().ok())
        .unwrap_or(x * 10f64.powi(exp))
}

/// The eight reference plates, in catalogue order, each paired with the
/// stock actuator.
pub fn builtin_library() -> Vec<LibraryEntry> {
    TABLE
        .iter()
        .map(|&(name, h_mm, rho, e)| LibraryEntry {
            glass: GlassSpec::from_datasheet_units(name, h_mm, rho, e)
                .expect("library values are positive"),
            actuator: ActuatorSpec::default(),
            excitation_frequency: None,
        })
        .collect()
}

pub fn lookup(name: &str) -> Option<LibraryEntry> {
    builtin_library().into_iter().find(|e| e.glass.name == name)
}

/// Finds `name` in the builtin library first, then in `extra`.
pub fn find_glass(name: &str, extra: &[GlassSpec]) -> Result<GlassSpec> {
    lookup(name)
        .map(|e| e.glass)
        .or_else(|| extra.iter().find(|g| g.name == name).cloned())
        .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
}

/// Parses a JSON array of glass records.
pub fn parse_material_json(text: &str) -> Result<Vec<GlassSpec>> {
    let records: Vec<GlassSpec> =
        serde_json::from_str(text).map_err(|e| Error::MalformedMaterialFile(e.to_string()))?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

pub fn load_material_file(path: impl AsRef<Path>) -> Result<Vec<GlassSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_material_json(&text)
}
