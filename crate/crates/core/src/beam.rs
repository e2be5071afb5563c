//! Bending-wave model of an actuator bonded to a glass plate.
//!
//! The bonded region is treated as a two-layer sandwich beam and the free
//! glass as a uniform beam. Balancing the shear force at the junction (taken
//! at a nodal point) gives the amplification number n = u_plate / u_actuator.
//! n² scales the plate impedance reflected onto the actuator, so under a
//! constant-voltage drive the real power of two designs compares as
//! ΔP₂/ΔP₁ = n₁²/n₂². That comparison assumes the reflected impedance
//! dominates the actuator's own impedance and that the glass impedances are
//! similar across designs.

use std::f64::consts::TAU;

use crate::error::{ensure_positive, Error, Result};
use crate::materials::{ActuatorSpec, GlassSpec};

/// Angular frequency at which [`AmplificationResult`] wavenumbers are reported.
pub const REFERENCE_ANGULAR_FREQUENCY: f64 = TAU * 30e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Beam width l_w, m.
    pub width: f64,
}

impl BeamGeometry {
    pub fn new(width: f64) -> Result<Self> {
        ensure_positive("width", width)?;
        Ok(BeamGeometry { width })
    }
}

impl Default for BeamGeometry {
    fn default() -> Self {
        BeamGeometry { width: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationResult {
    /// Sandwich stiffness per unit width D₁′, Pa·m³.
    pub d1_prime: f64,
    /// Plate stiffness per unit width D₂/l_w, Pa·m³.
    pub d2_per_width: f64,
    /// Sandwich wavenumber at [`REFERENCE_ANGULAR_FREQUENCY`], 1/m.
    pub beta_a: f64,
    /// Plate wavenumber at [`REFERENCE_ANGULAR_FREQUENCY`], 1/m.
    pub beta_p: f64,
    pub n: f64,
}

impl AmplificationResult {
    pub fn n_squared(&self) -> f64 {
        self.n * self.n
    }
}

/// Sandwich stiffness per unit width:
/// E_p·h_p³/3 + E_a·(h_a³/3 + h_p·h_a² + h_p²·h_a).
fn sandwich_stiffness_per_width(glass: &GlassSpec, actuator: &ActuatorSpec) -> f64 {
    let (hp, ha) = (glass.thickness, actuator.thickness);
    glass.youngs_modulus * hp.powi(3) / 3.0
        + actuator.youngs_modulus * (ha.powi(3) / 3.0 + hp * ha * ha + hp * hp * ha)
}

/// D₁ of the bonded actuator + glass section, Pa·m⁴.
pub fn flexural_stiffness_sandwich(
    glass: &GlassSpec,
    actuator: &ActuatorSpec,
    geom: &BeamGeometry,
) -> f64 {
    geom.width * sandwich_stiffness_per_width(glass, actuator)
}

/// D₂ = E_p·l_w·h_p³/12 of the bare glass, Pa·m⁴.
pub fn flexural_stiffness_plate(glass: &GlassSpec, geom: &BeamGeometry) -> f64 {
    glass.youngs_modulus * geom.width * glass.thickness.powi(3) / 12.0
}

/// Euler–Bernoulli wavenumbers (β_a, β_p) of the sandwich and the bare plate.
pub fn wavenumbers(
    glass: &GlassSpec,
    actuator: &ActuatorSpec,
    geom: &BeamGeometry,
    angular_frequency: f64,
) -> (f64, f64) {
    let w2 = angular_frequency * angular_frequency;
    let mass_per_length =
        geom.width * (actuator.density * actuator.thickness + glass.density * glass.thickness);
    let beta_a =
        (mass_per_length * w2 / flexural_stiffness_sandwich(glass, actuator, geom)).powf(0.25);
    let beta_p = (12.0 * w2 * glass.density
        / (glass.youngs_modulus * glass.thickness * glass.thickness))
        .powf(0.25);
    (beta_a, beta_p)
}

/// n from the shear balance written with explicit stiffnesses and
/// wavenumbers: n = 12·D₁/(E_p·h_p³·l_w) · (β_a/β_p)³.
pub fn amplification_via_wavenumbers(
    glass: &GlassSpec,
    actuator: &ActuatorSpec,
    geom: &BeamGeometry,
    angular_frequency: f64,
) -> f64 {
    let d1 = flexural_stiffness_sandwich(glass, actuator, geom);
    let (beta_a, beta_p) = wavenumbers(glass, actuator, geom, angular_frequency);
    12.0 * d1 / (glass.youngs_modulus * glass.thickness.powi(3) * geom.width)
        * (beta_a / beta_p).powi(3)
}

/// Closed form independent of width and frequency:
/// n = 12·[(1/12)·(D₁′/E_p)^⅓·(ρ_a·h_a/(h_p²·ρ_p) + 1/h_p)]^¾.
pub fn amplification_number(glass: &GlassSpec, actuator: &ActuatorSpec) -> AmplificationResult {
    let d1_prime = sandwich_stiffness_per_width(glass, actuator);
    let (hp, rho_p) = (glass.thickness, glass.density);
    let inner = (d1_prime / glass.youngs_modulus).cbrt()
        * (actuator.density * actuator.thickness / (hp * hp * rho_p) + 1.0 / hp)
        / 12.0;
    let n = 12.0 * inner.powf(0.75);
    let geom = BeamGeometry::default();
    let (beta_a, beta_p) = wavenumbers(glass, actuator, &geom, REFERENCE_ANGULAR_FREQUENCY);
    AmplificationResult {
        d1_prime,
        d2_per_width: flexural_stiffness_plate(glass, &geom),
        beta_a,
        beta_p,
        n,
    }
}

/// Predicted ΔP_other / ΔP_reference = n_ref² / n_other².
pub fn power_ratio(reference: &GlassSpec, other: &GlassSpec, actuator: &ActuatorSpec) -> f64 {
    let n_ref = amplification_number(reference, actuator).n_squared();
    let n_other = amplification_number(other, actuator).n_squared();
    n_ref / n_other
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Thickness,
    Density,
    YoungsModulus,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Thickness => "thickness",
            SweepAxis::Density => "density",
            SweepAxis::YoungsModulus => "youngs_modulus",
        }
    }

    fn apply(self, base: &GlassSpec, value: f64) -> GlassSpec {
        match self {
            SweepAxis::Thickness => base.with_thickness(value),
            SweepAxis::Density => base.with_density(value),
            SweepAxis::YoungsModulus => base.with_youngs_modulus(value),
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "thickness" => Ok(SweepAxis::Thickness),
            "density" => Ok(SweepAxis::Density),
            "youngs_modulus" | "modulus" => Ok(SweepAxis::YoungsModulus),
            other => Err(format!(
                "unknown axis `{other}` (expected thickness, density or youngs_modulus)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// SI value on the swept axis.
    pub axis_value: f64,
    pub n: f64,
    pub n_squared: f64,
}

/// Evaluates n² along one property axis with the others held at `base`.
pub fn sweep_amplification(
    base: &GlassSpec,
    actuator: &ActuatorSpec,
    axis: SweepAxis,
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &v in grid {
        ensure_positive(axis.name(), v)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProperty {
            field: "grid",
            value: f64::NAN,
            reason: "grid must be strictly increasing",
        });
    }
    Ok(grid
        .iter()
        .map(|&v| {
            let r = amplification_number(&axis.apply(base, v), actuator);
            SweepRow {
                axis_value: v,
                n: r.n,
                n_squared: r.n_squared(),
            }
        })
        .collect())
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::lookup;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn glass(name: &str) -> GlassSpec {
        lookup(name).unwrap().glass
    }

    #[test]
    fn sandwich_without_actuator() {
        let g = glass("SLG_0.4");
        let bare = ActuatorSpec {
            thickness: 0.0,
            ..ActuatorSpec::default()
        };
        let geom = BeamGeometry::new(0.06).unwrap();
        let d1 = flexural_stiffness_sandwich(&g, &bare, &geom);
        assert!(rel(d1, 71e9 * 0.06 * 0.4e-3f64.powi(3) / 3.0) < 1e-12);
        assert!(rel(d1, 4.0 * flexural_stiffness_plate(&g, &geom)) < 1e-12);
    }

    #[test]
    fn slg_04_stiffnesses() {
        // 71e9·6.4e-11/3 + 84e9·(9e-12 + 3.6e-11 + 4.8e-11) = 1.51467 + 7.812
        let g = glass("SLG_0.4");
        let a = ActuatorSpec::default();
        let d1 = flexural_stiffness_sandwich(&g, &a, &BeamGeometry::default());
        assert!(rel(d1, 9.326_666_666_7) < 1e-9);
        let d2 = flexural_stiffness_plate(&g, &BeamGeometry::default());
        assert!(rel(d2, 71e9 * 6.4e-11 / 12.0) < 1e-12);
        assert!((d2 - 0.3787).abs() < 1e-4);
    }

    #[test]
    fn stiffness_scaling() {
        let g = glass("SLG_0.56");
        let a = ActuatorSpec::default();
        let one = BeamGeometry::new(0.03).unwrap();
        let two = BeamGeometry::new(0.06).unwrap();
        assert!(
            rel(
                flexural_stiffness_sandwich(&g, &a, &two),
                2.0 * flexural_stiffness_sandwich(&g, &a, &one)
            ) < 1e-12
        );
        let thick = g.with_thickness(2.0 * g.thickness);
        assert!(
            rel(
                flexural_stiffness_plate(&thick, &one),
                8.0 * flexural_stiffness_plate(&g, &one)
            ) < 1e-12
        );
    }

    #[test]
    fn wavenumber_scaling() {
        let g = glass("D263_0.4");
        let a = ActuatorSpec::default();
        let geom = BeamGeometry::new(0.06).unwrap();
        let w = TAU * 25e3;
        let (ba1, bp1) = wavenumbers(&g, &a, &geom, w);
        let (ba2, bp2) = wavenumbers(&g, &a, &geom, 2.0 * w);
        let (ba4, bp4) = wavenumbers(&g, &a, &geom, 4.0 * w);
        assert!(rel(ba2, 2f64.sqrt() * ba1) < 1e-12);
        assert!(rel(bp2, 2f64.sqrt() * bp1) < 1e-12);
        assert!(rel(ba4, 2.0 * ba1) < 1e-12);
        assert!(rel(bp4, 2.0 * bp1) < 1e-12);
        assert!(rel(ba4 / bp4, ba1 / bp1) < 1e-12);
    }

    #[test]
    fn slg_04_plate_wavenumber() {
        // (12·(2π·3e4)²·2483 / (71e9·(4e-4)²))^¼ evaluated by hand.
        let (_, bp) = wavenumbers(
            &glass("SLG_0.4"),
            &ActuatorSpec::default(),
            &BeamGeometry::default(),
            TAU * 30e3,
        );
        assert!(rel(bp, 552.516_777_409) < 1e-9, "{bp}");
    }

    #[test]
    fn amplification_reference_values() {
        let a = ActuatorSpec::default();
        let slg = amplification_number(&glass("SLG_0.4"), &a);
        assert!(rel(slg.n, 5.561_018_403) < 1e-9, "{}", slg.n);
        assert!(rel(slg.n_squared(), 30.924_925_68) < 1e-9);
        let gor = amplification_number(&glass("Gorilla_0.8"), &a);
        assert!(rel(gor.n, 3.355_148_714) < 1e-9, "{}", gor.n);
        assert!(rel(gor.n_squared(), 11.257_022_89) < 1e-9);
        assert!(rel(slg.d1_prime, 9.326_666_666_7) < 1e-9);
    }

    #[test]
    fn power_ratio_cases() {
        let a = ActuatorSpec::default();
        let slg = glass("SLG_0.4");
        let gor = glass("Gorilla_0.8");
        assert_eq!(power_ratio(&slg, &slg, &a), 1.0);
        let r = power_ratio(&slg, &gor, &a);
        assert!(rel(r, 2.747_167_344) < 1e-9, "{r}");
        assert!((r * power_ratio(&gor, &slg, &a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_table_cases() {
        let a = ActuatorSpec::default();
        let slg = glass("SLG_0.4");
        let rows = sweep_amplification(
            &slg,
            &a,
            SweepAxis::Thickness,
            &[0.4e-3, 0.56e-3, 0.7e-3, 0.8e-3],
        )
        .unwrap();
        assert!(rows.windows(2).all(|w| w[1].n_squared < w[0].n_squared));

        let rows = sweep_amplification(
            &slg,
            &a,
            SweepAxis::Density,
            &[2200.0, 2420.0, 2483.0, 2510.0],
        )
        .unwrap();
        assert!(rows.windows(2).all(|w| w[1].n_squared < w[0].n_squared));

        let one = sweep_amplification(&slg, &a, SweepAxis::Thickness, &[0.4e-3]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].n, amplification_number(&slg, &a).n);

        assert!(matches!(
            sweep_amplification(&slg, &a, SweepAxis::Density, &[]),
            Err(Error::EmptyGrid)
        ));
        assert!(sweep_amplification(&slg, &a, SweepAxis::Density, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.3e-3, 1.0e-3, 8);
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 0.3e-3);
        assert!((v[7] - 1.0e-3).abs() < 1e-18);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    proptest! {
        #[test]
        fn two_routes_agree(h in 0.2e-3f64..2e-3, rho in 1500.0f64..4000.0,
                            e in 30e9f64..120e9, lw in 0.005f64..2.0,
                            f in 1e3f64..200e3) {
            let g = GlassSpec::new("g", h, rho, e).unwrap();
            let a = ActuatorSpec::default();
            let geom = BeamGeometry::new(lw).unwrap();
            let closed = amplification_number(&g, &a).n;
            let explicit = amplification_via_wavenumbers(&g, &a, &geom, TAU * f);
            prop_assert!(rel(explicit, closed) < 1e-9);
        }
    }
}
