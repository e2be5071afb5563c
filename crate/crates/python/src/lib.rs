//! Python bindings. Quantities are SI throughout, as in the Rust API.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use tpadlab::{beam, bvdfit, circuit, dataio, friction, materials};

create_exception!(tpadlab, TpadlabError, PyException);
create_exception!(
    tpadlab,
    InputError,
    TpadlabError,
    "Unreadable or invalid input."
);
create_exception!(
    tpadlab,
    AnalysisError,
    TpadlabError,
    "Valid input that could not be analyzed."
);

fn py_err(e: tpadlab::Error) -> PyErr {
    if e.is_input_error() {
        InputError::new_err(e.to_string())
    } else {
        AnalysisError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for tpadlab::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

#[pyclass(name = "GlassSpec", module = "tpadlab", frozen, from_py_object)]
#[derive(Clone)]
struct GlassSpec(materials::GlassSpec);

#[pymethods]
impl GlassSpec {
    #[new]
    fn new(name: String, thickness: f64, density: f64, youngs_modulus: f64) -> PyResult<Self> {
        materials::GlassSpec::new(name, thickness, density, youngs_modulus)
            .map(GlassSpec)
            .or_py()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn thickness(&self) -> f64 {
        self.0.thickness
    }

    #[getter]
    fn density(&self) -> f64 {
        self.0.density
    }

    #[getter]
    fn youngs_modulus(&self) -> f64 {
        self.0.youngs_modulus
    }

    fn __repr__(&self) -> String {
        format!(
            "GlassSpec({:?}, thickness={}, density={}, youngs_modulus={})",
            self.0.name, self.0.thickness, self.0.density, self.0.youngs_modulus
        )
    }
}

#[pyclass(name = "ActuatorSpec", module = "tpadlab", frozen, from_py_object)]
#[derive(Clone)]
struct ActuatorSpec(materials::ActuatorSpec);

#[pymethods]
impl ActuatorSpec {
    /// Defaults are the stock hard-PZT actuator.
    #[new]
    #[pyo3(signature = (thickness=0.3e-3, density=7900.0, youngs_modulus=84e9, static_capacitance=9.88e-9, coupling=None))]
    fn new(
        thickness: f64,
        density: f64,
        youngs_modulus: f64,
        static_capacitance: f64,
        coupling: Option<f64>,
    ) -> PyResult<Self> {
        let a = materials::ActuatorSpec {
            thickness,
            density,
            youngs_modulus,
            static_capacitance,
            coupling,
        };
        a.validate().or_py()?;
        Ok(ActuatorSpec(a))
    }

    #[getter]
    fn thickness(&self) -> f64 {
        self.0.thickness
    }

    #[getter]
    fn density(&self) -> f64 {
        self.0.density
    }

    #[getter]
    fn youngs_modulus(&self) -> f64 {
        self.0.youngs_modulus
    }

    #[getter]
    fn static_capacitance(&self) -> f64 {
        self.0.static_capacitance
    }

    #[getter]
    fn coupling(&self) -> Option<f64> {
        self.0.coupling
    }
}

fn actuator_or_default(a: Option<ActuatorSpec>) -> materials::ActuatorSpec {
    a.map(|a| a.0).unwrap_or_default()
}

#[pyfunction]
fn builtin_library() -> Vec<GlassSpec> {
    materials::builtin_library()
        .into_iter()
        .map(|e| GlassSpec(e.glass))
        .collect()
}

#[pyfunction]
fn lookup(name: &str) -> Option<GlassSpec> {
    materials::lookup(name).map(|e| GlassSpec(e.glass))
}

#[pyfunction]
fn load_material_file(path: std::path::PathBuf) -> PyResult<Vec<GlassSpec>> {
    Ok(materials::load_material_file(path)
        .or_py()?
        .into_iter()
        .map(GlassSpec)
        .collect())
}

fn friction_params(
    explore_velocity: f64,
    mu0: f64,
    poisson: f64,
    psi_star: f64,
) -> PyResult<friction::FrictionParams> {
    let p = friction::FrictionParams {
        explore_velocity,
        mu0,
        poisson,
        psi_star,
    };
    p.validate().or_py()?;
    Ok(p)
}

#[pyfunction]
#[pyo3(signature = (frequency, amplitude, explore_velocity=0.05, mu0=0.25, poisson=0.33, psi_star=4.69))]
fn psi(
    frequency: f64,
    amplitude: f64,
    explore_velocity: f64,
    mu0: f64,
    poisson: f64,
    psi_star: f64,
) -> PyResult<f64> {
    let params = friction_params(explore_velocity, mu0, poisson, psi_star)?;
    let vib = friction::VibrationState::new(frequency, amplitude).or_py()?;
    friction::psi(vib, &params).or_py()
}

/// μ' of the velocity model; 1 when the amplitude is zero.
#[pyfunction]
#[pyo3(signature = (frequency, amplitude, explore_velocity=0.05, mu0=0.25, poisson=0.33, psi_star=4.69))]
fn relative_friction_velocity(
    frequency: f64,
    amplitude: f64,
    explore_velocity: f64,
    mu0: f64,
    poisson: f64,
    psi_star: f64,
) -> PyResult<f64> {
    let params = friction_params(explore_velocity, mu0, poisson, psi_star)?;
    let vib = friction::VibrationState::new(frequency, amplitude).or_py()?;
    Ok(friction::relative_friction_velocity(vib, &params))
}

#[pyfunction]
#[pyo3(signature = (amplitude, gap, pressing_pressure, ambient_pressure=friction::STANDARD_ATMOSPHERE))]
fn relative_friction_squeeze(
    amplitude: f64,
    gap: f64,
    pressing_pressure: f64,
    ambient_pressure: f64,
) -> PyResult<f64> {
    let params =
        friction::SqueezeFilmParams::new(ambient_pressure, gap, pressing_pressure).or_py()?;
    Ok(friction::relative_friction_squeeze(amplitude, &params))
}

/// Contour amplitude in µm at `frequency` Hz.
#[pyfunction]
fn contour_amplitude(frequency: f64) -> PyResult<f64> {
    friction::contour_amplitude(frequency).or_py()
}

#[pyclass(name = "BvdParams", module = "tpadlab", frozen, from_py_object)]
#[derive(Clone)]
struct BvdParams(circuit::BvdParams);

#[pymethods]
impl BvdParams {
    #[new]
    fn new(
        inductance: f64,
        capacitance: f64,
        resistance: f64,
        static_capacitance: f64,
    ) -> PyResult<Self> {
        circuit::BvdParams::new(inductance, capacitance, resistance, static_capacitance)
            .map(BvdParams)
            .or_py()
    }

    #[staticmethod]
    fn from_resonance(
        frequency: f64,
        capacitance: f64,
        resistance: f64,
        static_capacitance: f64,
    ) -> PyResult<Self> {
        circuit::BvdParams::from_resonance(frequency, capacitance, resistance, static_capacitance)
            .map(BvdParams)
            .or_py()
    }

    #[getter]
    fn inductance(&self) -> f64 {
        self.0.inductance
    }

    #[getter]
    fn capacitance(&self) -> f64 {
        self.0.capacitance
    }

    #[getter]
    fn resistance(&self) -> f64 {
        self.0.resistance
    }

    #[getter]
    fn static_capacitance(&self) -> f64 {
        self.0.static_capacitance
    }

    #[getter]
    fn resonant_frequency(&self) -> f64 {
        circuit::resonant_frequency(&self.0)
    }

    fn impedance(&self, frequency: f64) -> Complex64 {
        circuit::impedance(&self.0, frequency)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "BvdParams(inductance={}, capacitance={}, resistance={}, static_capacitance={})",
            p.inductance, p.capacitance, p.resistance, p.static_capacitance
        )
    }
}

#[pyclass(name = "DriveConfig", module = "tpadlab", frozen, from_py_object)]
#[derive(Clone)]
struct DriveConfig(circuit::DriveConfig);

#[pymethods]
impl DriveConfig {
    /// `source_voltage` is RMS.
    #[new]
    #[pyo3(signature = (source_voltage, shunt_resistance=100.0))]
    fn new(source_voltage: f64, shunt_resistance: f64) -> PyResult<Self> {
        circuit::DriveConfig::new(source_voltage, shunt_resistance)
            .map(DriveConfig)
            .or_py()
    }

    #[getter]
    fn source_voltage(&self) -> f64 {
        self.0.source_voltage
    }

    #[getter]
    fn shunt_resistance(&self) -> f64 {
        self.0.shunt_resistance
    }
}

#[pyclass(name = "CircuitEvaluation", module = "tpadlab", frozen, get_all)]
struct CircuitEvaluation {
    frequency: f64,
    x0: f64,
    x1: f64,
    z: Complex64,
    u_g: f64,
    delta_p: f64,
    i_g: f64,
    u_g_exact: f64,
    delta_p_exact: f64,
}

#[pyfunction]
fn evaluate(params: BvdParams, drive: DriveConfig) -> CircuitEvaluation {
    let e = circuit::evaluate(&params.0, &drive.0);
    CircuitEvaluation {
        frequency: e.frequency,
        x0: e.x0,
        x1: e.x1,
        z: e.z,
        u_g: e.u_g,
        delta_p: e.delta_p,
        i_g: e.i_g,
        u_g_exact: e.u_g_exact,
        delta_p_exact: e.delta_p_exact,
    }
}

#[pyfunction]
fn real_power(params: BvdParams, drive: DriveConfig) -> f64 {
    circuit::real_power(&params.0, &drive.0)
}

#[pyfunction]
fn motional_voltage(params: BvdParams, drive: DriveConfig) -> f64 {
    circuit::motional_voltage(&params.0, &drive.0)
}

#[pyclass(name = "ImpedanceSpectrum", module = "tpadlab", frozen, from_py_object)]
#[derive(Clone)]
struct ImpedanceSpectrum(bvdfit::ImpedanceSpectrum);

#[pymethods]
impl ImpedanceSpectrum {
    #[new]
    fn new(frequencies: Vec<f64>, impedances: Vec<Complex64>) -> PyResult<Self> {
        if frequencies.len() != impedances.len() {
            return Err(InputError::new_err(
                "frequencies and impedances differ in length",
            ));
        }
        let points = frequencies
            .into_iter()
            .zip(impedances)
            .map(|(frequency, impedance)| bvdfit::ImpedancePoint {
                frequency,
                impedance,
            })
            .collect();
        bvdfit::ImpedanceSpectrum::new(points)
            .map(ImpedanceSpectrum)
            .or_py()
    }

    #[staticmethod]
    #[pyo3(signature = (params, frequencies, series_resistance=None))]
    fn synthesize(
        params: BvdParams,
        frequencies: Vec<f64>,
        series_resistance: Option<f64>,
    ) -> PyResult<Self> {
        bvdfit::ImpedanceSpectrum::synthesize(&params.0, &frequencies, series_resistance)
            .map(ImpedanceSpectrum)
            .or_py()
    }

    #[staticmethod]
    fn load_csv(path: std::path::PathBuf) -> PyResult<Self> {
        bvdfit::ImpedanceSpectrum::load_csv(path)
            .map(ImpedanceSpectrum)
            .or_py()
    }

    /// Copy with multiplicative complex Gaussian noise of relative level `sigma`.
    fn with_noise(&self, sigma: f64, seed: u64) -> PyResult<Self> {
        self.0
            .with_noise(sigma, seed)
            .map(ImpedanceSpectrum)
            .or_py()
    }

    #[getter]
    fn frequencies(&self) -> Vec<f64> {
        self.0.points().iter().map(|p| p.frequency).collect()
    }

    #[getter]
    fn impedances(&self) -> Vec<Complex64> {
        self.0.points().iter().map(|p| p.impedance).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "FitResult", module = "tpadlab", frozen, get_all)]
struct FitResult {
    params: BvdParams,
    residual_norm: f64,
    iterations: usize,
    converged: bool,
}

#[pyfunction]
fn frequency_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    bvdfit::frequency_grid(lo, hi, count)
}

#[pyfunction]
fn initial_guess(spectrum: &ImpedanceSpectrum, static_capacitance: f64) -> PyResult<BvdParams> {
    bvdfit::initial_guess(&spectrum.0, static_capacitance)
        .map(BvdParams)
        .or_py()
}

#[pyfunction]
fn residual(params: BvdParams, spectrum: &ImpedanceSpectrum) -> f64 {
    bvdfit::residual(&params.0, &spectrum.0)
}

/// Fits L, C, R (and optionally C₀). Raises AnalysisError when the fit does
/// not converge.
#[pyfunction]
#[pyo3(signature = (spectrum, static_capacitance, fit_static_capacitance=false, series_resistance=None, start=None, max_iterations=500))]
fn fit_bvd(
    py: Python<'_>,
    spectrum: &ImpedanceSpectrum,
    static_capacitance: f64,
    fit_static_capacitance: bool,
    series_resistance: Option<f64>,
    start: Option<BvdParams>,
    max_iterations: usize,
) -> PyResult<FitResult> {
    let options = bvdfit::FitOptions {
        fit_static_capacitance,
        series_resistance,
        start: start.map(|s| s.0),
        max_iterations,
        ..bvdfit::FitOptions::default()
    };
    let fit = py
        .detach(|| bvdfit::fit_bvd(&spectrum.0, static_capacitance, &options))
        .or_py()?;
    Ok(FitResult {
        params: BvdParams(fit.params),
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

#[pyclass(name = "AmplificationResult", module = "tpadlab", frozen, get_all)]
struct AmplificationResult {
    d1_prime: f64,
    d2_per_width: f64,
    beta_a: f64,
    beta_p: f64,
    n: f64,
    n_squared: f64,
}

#[pyfunction]
#[pyo3(signature = (glass, actuator=None))]
fn amplification_number(glass: GlassSpec, actuator: Option<ActuatorSpec>) -> AmplificationResult {
    let r = beam::amplification_number(&glass.0, &actuator_or_default(actuator));
    AmplificationResult {
        d1_prime: r.d1_prime,
        d2_per_width: r.d2_per_width,
        beta_a: r.beta_a,
        beta_p: r.beta_p,
        n: r.n,
        n_squared: r.n_squared(),
    }
}

/// Predicted ΔP_other / ΔP_reference.
#[pyfunction]
#[pyo3(signature = (reference, other, actuator=None))]
fn power_ratio(reference: GlassSpec, other: GlassSpec, actuator: Option<ActuatorSpec>) -> f64 {
    beam::power_ratio(&reference.0, &other.0, &actuator_or_default(actuator))
}

/// Rows of (axis_value, n, n_squared) along "thickness", "density" or
/// "youngs_modulus".
#[pyfunction]
#[pyo3(signature = (base, axis, grid, actuator=None))]
fn sweep_amplification(
    base: GlassSpec,
    axis: &str,
    grid: Vec<f64>,
    actuator: Option<ActuatorSpec>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let axis: beam::SweepAxis = axis.parse().map_err(InputError::new_err)?;
    let rows =
        beam::sweep_amplification(&base.0, &actuator_or_default(actuator), axis, &grid).or_py()?;
    Ok(rows
        .iter()
        .map(|r| (r.axis_value, r.n, r.n_squared))
        .collect())
}

#[pyclass(name = "TimeTraces", module = "tpadlab", frozen)]
struct TimeTraces(dataio::TimeTraces);

fn ldv_channel(ldv: Option<Vec<f64>>, kind: &str) -> PyResult<Option<dataio::LdvChannel>> {
    let kind: dataio::LdvKind = kind.parse().map_err(InputError::new_err)?;
    Ok(ldv.map(|samples| dataio::LdvChannel { kind, samples }))
}

#[pymethods]
impl TimeTraces {
    /// `v_piezo` is the device voltage unless `source_node` is true, in which
    /// case the shunt drop is subtracted.
    #[new]
    #[pyo3(signature = (sample_rate, v_piezo, v_shunt, ldv=None, ldv_kind="displacement", source_node=false))]
    fn new(
        sample_rate: f64,
        v_piezo: Vec<f64>,
        v_shunt: Vec<f64>,
        ldv: Option<Vec<f64>>,
        ldv_kind: &str,
        source_node: bool,
    ) -> PyResult<Self> {
        let t = dataio::TimeTraces::new(sample_rate, v_piezo, v_shunt, ldv_channel(ldv, ldv_kind)?)
            .or_py()?;
        Ok(TimeTraces(if source_node {
            t.from_source_node()
        } else {
            t
        }))
    }

    #[staticmethod]
    #[pyo3(signature = (path, sample_rate, ldv_kind="displacement", source_node=false))]
    fn load_csv(
        path: std::path::PathBuf,
        sample_rate: f64,
        ldv_kind: &str,
        source_node: bool,
    ) -> PyResult<Self> {
        let kind: dataio::LdvKind = ldv_kind.parse().map_err(InputError::new_err)?;
        let t = dataio::load_traces_csv(path, sample_rate, kind).or_py()?;
        Ok(TimeTraces(if source_node {
            t.from_source_node()
        } else {
            t
        }))
    }

    #[getter]
    fn sample_rate(&self) -> f64 {
        self.0.sample_rate()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn drive_frequency(&self) -> PyResult<f64> {
        dataio::detect_drive_frequency(&self.0).or_py()
    }

    fn real_power(&self, shunt_resistance: f64) -> PyResult<f64> {
        dataio::real_power_from_traces(&self.0, shunt_resistance).or_py()
    }

    /// (amplitude m, noise floor m, low_confidence)
    #[pyo3(signature = (drive_frequency=None))]
    fn ldv_amplitude(&self, drive_frequency: Option<f64>) -> PyResult<(f64, f64, bool)> {
        let a = dataio::amplitude_from_ldv(&self.0, drive_frequency).or_py()?;
        Ok((a.vibration.amplitude, a.noise_floor, a.low_confidence))
    }

    fn summarize(&self, shunt_resistance: f64) -> PyResult<TrialSummary> {
        dataio::summarize_trial(&self.0, shunt_resistance)
            .map(TrialSummary::from)
            .or_py()
    }
}

#[pyclass(name = "TrialSummary", module = "tpadlab", frozen, get_all)]
struct TrialSummary {
    drive_frequency: f64,
    real_power: f64,
    amplitude: Option<f64>,
    rms_current: f64,
}

impl From<dataio::TrialSummary> for TrialSummary {
    fn from(s: dataio::TrialSummary) -> Self {
        TrialSummary {
            drive_frequency: s.drive_frequency,
            real_power: s.real_power,
            amplitude: s.amplitude,
            rms_current: s.rms_current,
        }
    }
}

#[pymodule]
#[pyo3(name = "tpadlab")]
fn tpadlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("TpadlabError", py.get_type::<TpadlabError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("AnalysisError", py.get_type::<AnalysisError>())?;
    m.add_class::<GlassSpec>()?;
    m.add_class::<ActuatorSpec>()?;
    m.add_class::<BvdParams>()?;
    m.add_class::<DriveConfig>()?;
    m.add_class::<CircuitEvaluation>()?;
    m.add_class::<ImpedanceSpectrum>()?;
    m.add_class::<FitResult>()?;
    m.add_class::<AmplificationResult>()?;
    m.add_class::<TimeTraces>()?;
    m.add_class::<TrialSummary>()?;
    m.add_function(wrap_pyfunction!(builtin_library, m)?)?;
    m.add_function(wrap_pyfunction!(lookup, m)?)?;
    m.add_function(wrap_pyfunction!(load_material_file, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(relative_friction_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(relative_friction_squeeze, m)?)?;
    m.add_function(wrap_pyfunction!(contour_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(real_power, m)?)?;
    m.add_function(wrap_pyfunction!(motional_voltage, m)?)?;
    m.add_function(wrap_pyfunction!(frequency_grid, m)?)?;
    m.add_function(wrap_pyfunction!(initial_guess, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(fit_bvd, m)?)?;
    m.add_function(wrap_pyfunction!(amplification_number, m)?)?;
    m.add_function(wrap_pyfunction!(power_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_amplification, m)?)?;
    Ok(())
}
