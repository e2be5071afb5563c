//! Relative friction force μ′ (vibration on / vibration off) as a function of
//! the plate's transverse vibration.
//!
//! Two models are provided: a velocity model where μ′ depends on the product
//! f·α, and a squeeze-film model where μ′ depends on α² alone. A third
//! function gives an illustrative iso-friction contour in the (f, α) plane.

use crate::error::{ensure_positive, Error, Result};

/// Standard atmosphere, Pa.
pub const STANDARD_ATMOSPHERE: f64 = 101_325.0;

/// Frequency span over which the iso-friction contour is defined, Hz.
pub const CONTOUR_RANGE: (f64, f64) = (16e3, 160e3);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibrationState {
    /// Hz
    pub frequency: f64,
    /// Peak displacement, m
    pub amplitude: f64,
}

impl VibrationState {
    pub fn new(frequency: f64, amplitude: f64) -> Result<Self> {
        ensure_positive("frequency", frequency)?;
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidProperty {
                field: "amplitude",
                value: amplitude,
                reason: "must be finite and >= 0",
            });
        }
        Ok(VibrationState {
            frequency,
            amplitude,
        })
    }

    /// Peak transverse velocity 2πfα, m/s.
    pub fn peak_velocity(&self) -> f64 {
        std::f64::consts::TAU * self.frequency * self.amplitude
    }
}

/// Constants of the velocity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionParams {
    /// Finger exploration velocity U, m/s.
    pub explore_velocity: f64,
    /// Friction coefficient with vibration off.
    pub mu0: f64,
    /// Poisson ratio of the finger.
    pub poisson: f64,
    /// Characteristic value Ψ*.
    pub psi_star: f64,
}

impl Default for FrictionParams {
    fn default() -> Self {
        FrictionParams {
            explore_velocity: 0.05,
            mu0: 0.25,
            poisson: 0.33,
            psi_star: 4.69,
        }
    }
}

impl FrictionParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("explore_velocity", self.explore_velocity)?;
        ensure_positive("mu0", self.mu0)?;
        ensure_positive("psi_star", self.psi_star)?;
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return Err(Error::InvalidProperty {
                field: "poisson",
                value: self.poisson,
                reason: "must lie in (0, 0.5)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeFilmParams {
    /// Ambient pressure, Pa.
    pub p0: f64,
    /// Finger–plate gap at rest, m.
    pub u0: f64,
    /// Pressing pressure, Pa.
    pub ps: f64,
}

impl SqueezeFilmParams {
    pub fn new(p0: f64, u0: f64, ps: f64) -> Result<Self> {
        ensure_positive("p0", p0)?;
        ensure_positive("u0", u0)?;
        ensure_positive("ps", ps)?;
        Ok(SqueezeFilmParams { p0, u0, ps })
    }
}

/// Ψ = U / (f·α·μ₀·(1+ν)).
pub fn psi(vib: VibrationState, params: &FrictionParams) -> Result<f64> {
    if vib.amplitude == 0.0 {
        return Err(Error::DegenerateAmplitude);
    }
    Ok(params.explore_velocity
        / (vib.frequency * vib.amplitude * params.mu0 * (1.0 + params.poisson)))
}

/// μ′ = 1 − exp(−Ψ/Ψ*). Returns the vibration-off limit 1 when α = 0.
pub fn relative_friction_velocity(vib: VibrationState, params: &FrictionParams) -> f64 {
    match psi(vib, params) {
        Ok(psi) => -(-psi / params.psi_star).exp_m1(),
        Err(_) => 1.0,
    }
}

/// μ′ = exp(−5α²p₀ / (4u₀²pₛ)), normalized so that μ′(0) = 1.
pub fn relative_friction_squeeze(amplitude: f64, params: &SqueezeFilmParams) -> f64 {
    let a = amplitude / params.u0;
    (-1.25 * a * a * params.p0 / params.ps).exp()
}

/// Vibration amplitude in µm on the illustrative iso-friction contour at
/// `frequency` Hz: α = 1.755e4 · f^−0.797 − 0.937.
pub fn contour_amplitude(frequency: f64) -> Result<f64> {
    let (lo, hi) = CONTOUR_RANGE;
    if !(lo..=hi).contains(&frequency) {
        return Err(Error::OutOfContourRange(frequency));
    }
    Ok(1.755e4 * frequency.powf(-0.797) - 0.937)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vib(f: f64, a: f64) -> VibrationState {
        VibrationState::new(f, a).unwrap()
    }

    // Hand evaluation: 0.05 / (3e4 · 3e-6 · 0.25 · 1.33) = 0.05 / 0.029925.
    const PSI_30K_3UM: f64 = 1.670_843_776_106_934;

    #[test]
    fn psi_reference_point() {
        let p = psi(vib(30e3, 3e-6), &FrictionParams::default()).unwrap();
        assert!((p - PSI_30K_3UM).abs() < 1e-12);
        assert!((p - 1.671).abs() < 1e-3);
    }

    #[test]
    fn psi_halves_when_amplitude_doubles() {
        let params = FrictionParams::default();
        let a = psi(vib(30e3, 3e-6), &params).unwrap();
        let b = psi(vib(30e3, 6e-6), &params).unwrap();
        assert_eq!(a / 2.0, b);
    }

    #[test]
    fn psi_zero_amplitude() {
        assert!(matches!(
            psi(vib(30e3, 0.0), &FrictionParams::default()),
            Err(Error::DegenerateAmplitude)
        ));
    }

    #[test]
    fn velocity_model_reference_point() {
        let mu = relative_friction_velocity(vib(30e3, 3e-6), &FrictionParams::default());
        let expected = 1.0 - (-PSI_30K_3UM / 4.69).exp();
        assert!((mu - expected).abs() < 1e-14);
        assert!((mu - 0.300).abs() < 1e-3);
    }

    #[test]
    fn velocity_model_limits() {
        let params = FrictionParams::default();
        assert_eq!(relative_friction_velocity(vib(30e3, 0.0), &params), 1.0);
        assert!(relative_friction_velocity(vib(100e3, 100e-6), &params) < 0.01);
    }

    #[test]
    fn squeeze_reference_point() {
        let sp = SqueezeFilmParams::new(1e5, 1e-6, 1.25e5).unwrap();
        assert_eq!(relative_friction_squeeze(0.0, &sp), 1.0);
        let mu = relative_friction_squeeze(1e-6, &sp);
        assert!((mu - (-1.0f64).exp()).abs() < 1e-12);
        assert!((mu - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn squeeze_decreasing_spot_check() {
        let sp = SqueezeFilmParams::new(STANDARD_ATMOSPHERE, 2e-6, 1.25e5).unwrap();
        let m: Vec<f64> = [1e-6, 2e-6, 3e-6]
            .iter()
            .map(|&a| relative_friction_squeeze(a, &sp))
            .collect();
        assert!(m[0] > m[1] && m[1] > m[2]);
    }

    #[test]
    fn contour_points() {
        // At 16 kHz the coefficients give 6.890 µm, 0.02 µm above the
        // commonly quoted 6.87 µm.
        assert!((contour_amplitude(16e3).unwrap() - 6.889_966_853).abs() < 1e-6);
        for (f, a) in [(50e3, 2.21), (80e3, 1.23), (160e3, 0.31)] {
            assert!((contour_amplitude(f).unwrap() - a).abs() < 0.01, "{f}");
        }
    }

    #[test]
    fn contour_range_guard() {
        assert!(matches!(
            contour_amplitude(15_999.0),
            Err(Error::OutOfContourRange(_))
        ));
        assert!(contour_amplitude(160_001.0).is_err());
    }

    #[test]
    fn friction_params_validation() {
        FrictionParams::default().validate().unwrap();
        let bad = FrictionParams {
            poisson: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn velocity_model_bounded(f in 1.0f64..1e6, a in 0.0f64..1e-3,
                                  u in 1e-4f64..1.0, mu0 in 0.01f64..2.0,
                                  nu in 0.01f64..0.49, ps in 0.1f64..20.0) {
            let params = FrictionParams { explore_velocity: u, mu0, poisson: nu, psi_star: ps };
            let mu = relative_friction_velocity(vib(f, a), &params);
            prop_assert!((0.0..=1.0).contains(&mu));
        }

        #[test]
        fn velocity_model_decreasing_in_fa(f in 1e4f64..2e5, a in 1e-7f64..1e-4, k in 1.001f64..10.0) {
            let params = FrictionParams::default();
            let lo = relative_friction_velocity(vib(f, a), &params);
            let hi = relative_friction_velocity(vib(f, a * k), &params);
            prop_assert!(hi < lo);
        }

        #[test]
        fn contour_positive_in_range(f in 16e3f64..=160e3) {
            prop_assert!(contour_amplitude(f).unwrap() > 0.0);
        }
    }
}
