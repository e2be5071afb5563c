mod units;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tpadlab::beam::{self, SweepAxis};
use tpadlab::bvdfit::{self, FitOptions, ImpedanceSpectrum};
use tpadlab::circuit::{self, BvdParams, DriveConfig};
use tpadlab::dataio::{self, LdvKind};
use tpadlab::friction::{self, FrictionParams, SqueezeFilmParams, VibrationState};
use tpadlab::materials::{self, ActuatorSpec, GlassSpec};

const MATERIALS_ENV: &str = "TPADLAB_MATERIALS";

const MODEL_NOTE: &str = "note: predicted power ratios are model-conditional: they assume the \
reflected plate impedance dominates the actuator impedance and that all plates have similar \
impedance, so they compare designs rather than predict absolute watts";

#[derive(Parser)]
#[command(
    name = "tpadlab",
    version,
    about = "Friction, power and impedance analysis for ultrasonic friction-modulation displays",
    after_help = "Numeric flags take SI values; unit suffixes such as mm, um, kHz, nF, g/cm3, \
                  kN/mm2 or Vpk are also accepted where listed.\n\
                  Extra glass records are read from the JSON file named by TPADLAB_MATERIALS."
)]
struct Cli {
    /// Write CSV output to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the glass library (builtin plus TPADLAB_MATERIALS entries)
    Materials(MaterialsArgs),
    /// Evaluate relative friction μ' or the iso-friction contour
    Friction(FrictionArgs),
    /// Evaluate the equivalent circuit at motional resonance
    Circuit(CircuitArgs),
    /// Fit the motional branch (L, C, R) to an impedance spectrum
    Fit(FitArgs),
    /// Amplification number of a glass plate, or a sweep over one property
    Beam(BeamArgs),
    /// Predicted real-power ratios of several glasses against a reference
    PredictPower(PredictArgs),
    /// Reduce voltage/current/vibrometer traces to power and amplitude
    ReduceTraces(ReduceArgs),
    /// Emit the data behind a standard figure
    Repro(ReproArgs),
}

#[derive(Args)]
struct MaterialsArgs {
    /// List every glass (the default)
    #[arg(long)]
    list: bool,
    /// Show only the glass called NAME
    #[arg(long, value_name = "NAME", conflicts_with = "list")]
    name: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrictionModel {
    /// μ' = 1 − exp(−Ψ/Ψ*) from the vibration velocity
    Velocity,
    /// Squeeze-film levitation, μ' from amplitude only
    Squeeze,
    /// Amplitude needed on the iso-friction contour, in µm
    Contour,
}

#[derive(Args)]
struct FrictionArgs {
    #[arg(long, value_enum)]
    model: FrictionModel,
    /// Vibration frequency [Hz; kHz, MHz accepted]; comma-separated list allowed
    #[arg(long = "freq", value_name = "HZ", value_parser = units::frequency, value_delimiter = ',')]
    freq: Vec<f64>,
    /// Vibration amplitude [m; mm, um, nm accepted]; comma-separated list allowed
    #[arg(long = "amp", value_name = "M", value_parser = units::length, value_delimiter = ',')]
    amp: Vec<f64>,
    /// Finger exploration velocity U [m/s; mm/s accepted]
    #[arg(long, value_name = "M_PER_S", default_value = "0.05", value_parser = units::velocity)]
    explore_velocity: f64,
    /// Friction coefficient without vibration μ₀ [dimensionless]
    #[arg(long, value_name = "RATIO", default_value = "0.25", value_parser = units::plain)]
    mu0: f64,
    /// Poisson ratio of the fingertip ν [dimensionless]
    #[arg(long, value_name = "RATIO", default_value = "0.33", value_parser = units::plain)]
    poisson: f64,
    /// Characteristic Ψ* [dimensionless]
    #[arg(long, value_name = "RATIO", default_value = "4.69", value_parser = units::plain)]
    psi_star: f64,
    /// Ambient pressure p₀ for the squeeze model [Pa; kPa, MPa accepted]
    #[arg(long, value_name = "PA", default_value = "101325", value_parser = units::pressure)]
    ambient_pressure: f64,
    /// Finger–plate gap at rest u₀ for the squeeze model [m; um accepted]
    #[arg(long, value_name = "M", value_parser = units::length)]
    gap: Option<f64>,
    /// Pressing pressure pₛ for the squeeze model [Pa; kPa accepted]
    #[arg(long, value_name = "PA", value_parser = units::pressure)]
    pressing_pressure: Option<f64>,
}

#[derive(Args)]
struct CircuitArgs {
    /// Motional resistance R [Ω; kohm accepted]; comma-separated list allowed
    #[arg(long, value_name = "OHM", required = true, value_parser = units::resistance, value_delimiter = ',')]
    resistance: Vec<f64>,
    /// Applied voltage, RMS [V; Vpk and Vpp are converted to RMS]
    #[arg(long, value_name = "V", value_parser = units::voltage)]
    voltage: f64,
    /// Motional resonant frequency [Hz; kHz accepted]
    #[arg(long, value_name = "HZ", default_value = "30kHz", value_parser = units::frequency)]
    frequency: f64,
    /// Motional capacitance C [F; nF, pF accepted]; does not affect resonance values
    #[arg(long, value_name = "F", default_value = "1nF", value_parser = units::capacitance)]
    capacitance: f64,
    /// Static capacitance C₀ [F; nF accepted]
    #[arg(long, value_name = "F", default_value = "9.88nF", value_parser = units::capacitance)]
    static_capacitance: f64,
    /// Shunt resistance R₀ in series with the device [Ω]
    #[arg(long, value_name = "OHM", default_value = "100", value_parser = units::resistance)]
    shunt: f64,
    /// Coupling factor γ [N/V]; adds the motional velocity i_g/γ
    #[arg(long, value_name = "N_PER_V", value_parser = units::coupling)]
    coupling: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Impedance CSV with header frequency_hz,magnitude_ohm,phase_deg
    #[arg(
        long,
        value_name = "PATH",
        required_unless_present = "synthetic",
        conflicts_with = "synthetic"
    )]
    input: Option<PathBuf>,
    /// Fit a generated noisy spectrum instead of reading one
    #[arg(long)]
    synthetic: bool,
    /// Static capacitance C₀, held fixed unless --fit-c0 [F; nF accepted]
    #[arg(long, value_name = "F", default_value = "9.88nF", value_parser = units::capacitance)]
    static_capacitance: f64,
    /// Also fit C₀
    #[arg(long)]
    fit_c0: bool,
    /// Known resistance in series with the device [Ω]
    #[arg(long, value_name = "OHM", value_parser = units::resistance)]
    shunt: Option<f64>,
    /// Iteration cap [count]
    #[arg(long, value_name = "N", default_value_t = 500)]
    max_iterations: usize,
    /// Synthetic truth: resonant frequency [Hz; kHz accepted]
    #[arg(long, value_name = "HZ", default_value = "30kHz", value_parser = units::frequency)]
    true_frequency: f64,
    /// Synthetic truth: motional capacitance [F; nF, pF accepted]
    #[arg(long, value_name = "F", default_value = "50pF", value_parser = units::capacitance)]
    true_capacitance: f64,
    /// Synthetic truth: motional resistance [Ω; kohm accepted]
    #[arg(long, value_name = "OHM", default_value = "2150", value_parser = units::resistance)]
    true_resistance: f64,
    /// Synthetic: relative complex noise level σ [dimensionless]
    #[arg(long, value_name = "SIGMA", default_value = "0.01", value_parser = units::plain)]
    noise: f64,
    /// Synthetic: noise seed [integer]
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Synthetic: number of frequency points [count]
    #[arg(long, value_name = "N", default_value_t = 201)]
    points: usize,
    /// Synthetic: half-width of the window as a fraction of f_r [dimensionless]
    #[arg(long, value_name = "FRACTION", default_value = "0.1", value_parser = units::plain)]
    span: f64,
    /// Also write the spectrum that was fitted to PATH
    #[arg(long, value_name = "PATH")]
    spectrum_out: Option<PathBuf>,
}

#[derive(Args)]
struct ActuatorArgs {
    /// Actuator thickness [m; mm, um accepted]
    #[arg(long, value_name = "M", default_value = "0.3mm", value_parser = units::length)]
    actuator_thickness: f64,
    /// Actuator density [kg/m3; g/cm3 accepted]
    #[arg(long, value_name = "KG_PER_M3", default_value = "7900", value_parser = units::density)]
    actuator_density: f64,
    /// Actuator Young's modulus [Pa; GPa, kN/mm2 accepted]
    #[arg(long, value_name = "PA", default_value = "84GPa", value_parser = units::modulus)]
    actuator_modulus: f64,
}

impl ActuatorArgs {
    fn spec(&self) -> Result<ActuatorSpec, Failure> {
        let a = ActuatorSpec {
            thickness: self.actuator_thickness,
            density: self.actuator_density,
            youngs_modulus: self.actuator_modulus,
            ..ActuatorSpec::default()
        };
        a.validate()?;
        Ok(a)
    }
}

#[derive(Args)]
struct BeamArgs {
    /// Glass to evaluate (library name or material-file entry); base glass for --sweep
    #[arg(long, value_name = "NAME")]
    glass: Option<String>,
    /// Reference glass for the predicted power ratio
    #[arg(long, value_name = "NAME", default_value = "SLG_0.4")]
    reference: String,
    /// Sweep one property of the glass: thickness, density or youngs_modulus
    #[arg(long, value_name = "AXIS", value_parser = parse_axis)]
    sweep: Option<SweepAxis>,
    /// Sweep start [m, kg/m3 or Pa by axis; mm, g/cm3, GPa accepted]
    #[arg(long, value_name = "VALUE", requires = "sweep")]
    from: Option<String>,
    /// Sweep end [m, kg/m3 or Pa by axis; mm, g/cm3, GPa accepted]
    #[arg(long, value_name = "VALUE", requires = "sweep")]
    to: Option<String>,
    /// Sweep points [count]
    #[arg(long, value_name = "N", default_value_t = 50, requires = "sweep")]
    count: usize,
    #[command(flatten)]
    actuator: ActuatorArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Reference glass (ratio 1)
    #[arg(long, value_name = "NAME", default_value = "SLG_0.4")]
    reference: String,
    /// Glasses to compare, comma-separated; default is every known glass
    #[arg(long, value_name = "NAME", value_delimiter = ',')]
    glass: Vec<String>,
    #[command(flatten)]
    actuator: ActuatorArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum LdvKindArg {
    Displacement,
    Velocity,
}

#[derive(Clone, Copy, ValueEnum)]
enum PiezoNode {
    /// v_piezo is the voltage across the device
    Device,
    /// v_piezo is the source voltage; the shunt drop is subtracted
    Source,
}

#[derive(Args)]
struct ReduceArgs {
    /// Trace CSV files with header v_piezo,v_shunt[,ldv]
    #[arg(required = true, value_name = "FILE")]
    files: Vec<PathBuf>,
    /// Sampling rate [Hz; kHz accepted]
    #[arg(long, value_name = "HZ", default_value = "300kHz", value_parser = units::frequency)]
    sample_rate: f64,
    /// Shunt resistance R₀ [Ω]
    #[arg(long, value_name = "OHM", default_value = "100", value_parser = units::resistance)]
    shunt: f64,
    /// What the ldv column measures (displacement in m, velocity in m/s)
    #[arg(long, value_enum, default_value = "displacement")]
    ldv_kind: LdvKindArg,
    /// Which node the v_piezo column was logged at
    #[arg(long, value_enum, default_value = "device")]
    piezo_node: PiezoNode,
    /// Append a row with the mean over all files
    #[arg(long)]
    average: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    /// Iso-friction contour samples
    Fig4,
    /// n² against thickness, density and modulus
    Fig10,
    /// Predicted power ratios of the library against SLG_0.4
    Fig11,
}

#[derive(Args)]
struct ReproArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// fig10 only: also write one CSV per swept property into DIR
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Input(String),
    Analysis(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Input(_) => 2,
            Failure::Analysis(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Analysis(m) => m,
        }
    }
}

impl From<tpadlab::Error> for Failure {
    fn from(e: tpadlab::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Analysis(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let output = match &cli.command {
        Command::Materials(a) => materials_cmd(a)?,
        Command::Friction(a) => friction_cmd(a)?,
        Command::Circuit(a) => circuit_cmd(a)?,
        Command::Fit(a) => fit_cmd(a)?,
        Command::Beam(a) => beam_cmd(a)?,
        Command::PredictPower(a) => predict_cmd(a)?,
        Command::ReduceTraces(a) => reduce_cmd(a)?,
        Command::Repro(a) => repro_cmd(a)?,
    };
    match &cli.out {
        Some(path) => write_file(path, &output),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

/// Plain decimal for ordinary magnitudes, shortest exponent form otherwise.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Csv(String);

impl Csv {
    fn new(header: &str) -> Self {
        Csv(format!("{header}\n"))
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().map(|c| quote(&c)).collect();
        let _ = writeln!(self.0, "{}", cells.join(","));
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn extra_materials() -> Result<Vec<GlassSpec>, Failure> {
    match std::env::var_os(MATERIALS_ENV) {
        Some(path) if !path.is_empty() => Ok(materials::load_material_file(path)?),
        _ => Ok(Vec::new()),
    }
}

fn all_glasses() -> Result<Vec<(GlassSpec, &'static str)>, Failure> {
    let mut all: Vec<(GlassSpec, &str)> = materials::builtin_library()
        .into_iter()
        .map(|e| (e.glass, "builtin"))
        .collect();
    all.extend(extra_materials()?.into_iter().map(|g| (g, "file")));
    Ok(all)
}

fn find_glass(name: &str) -> Result<GlassSpec, Failure> {
    Ok(materials::find_glass(name, &extra_materials()?)?)
}

fn materials_cmd(a: &MaterialsArgs) -> Result<String, Failure> {
    let mut rows = all_glasses()?;
    if let Some(name) = &a.name {
        rows.retain(|(g, _)| &g.name == name);
        if rows.is_empty() {
            return Err(tpadlab::Error::UnknownMaterial(name.clone()).into());
        }
    }
    let mut out = Csv::new("name,thickness_m,density_kg_m3,youngs_modulus_pa,source");
    for (g, source) in rows {
        out.row([
            g.name,
            num(g.thickness),
            num(g.density),
            num(g.youngs_modulus),
            source.to_string(),
        ]);
    }
    Ok(out.0)
}

fn friction_cmd(a: &FrictionArgs) -> Result<String, Failure> {
    let require = |v: &[f64], flag: &str| {
        if v.is_empty() {
            Err(Failure::Usage(format!("--model needs {flag}")))
        } else {
            Ok(())
        }
    };
    match a.model {
        FrictionModel::Velocity => {
            require(&a.freq, "--freq")?;
            require(&a.amp, "--amp")?;
            let params = FrictionParams {
                explore_velocity: a.explore_velocity,
                mu0: a.mu0,
                poisson: a.poisson,
                psi_star: a.psi_star,
            };
            params.validate()?;
            let mut out = Csv::new("frequency_hz,amplitude_m,psi,relative_friction");
            for &f in &a.freq {
                for &amp in &a.amp {
                    let vib = VibrationState::new(f, amp)?;
                    let psi = friction::psi(vib, &params).map(num).unwrap_or_default();
                    let mu = friction::relative_friction_velocity(vib, &params);
                    out.row([num(f), num(amp), psi, num(mu)]);
                }
            }
            Ok(out.0)
        }
        FrictionModel::Squeeze => {
            require(&a.amp, "--amp")?;
            let (Some(gap), Some(ps)) = (a.gap, a.pressing_pressure) else {
                return Err(Failure::Usage(
                    "--model squeeze needs --gap and --pressing-pressure".into(),
                ));
            };
            let params = SqueezeFilmParams::new(a.ambient_pressure, gap, ps)?;
            let mut out = Csv::new("amplitude_m,relative_friction");
            for &amp in &a.amp {
                if amp.is_nan() || amp < 0.0 {
                    return Err(tpadlab::Error::InvalidProperty {
                        field: "amplitude",
                        value: amp,
                        reason: "must be non-negative",
                    }
                    .into());
                }
                out.row([
                    num(amp),
                    num(friction::relative_friction_squeeze(amp, &params)),
                ]);
            }
            Ok(out.0)
        }
        FrictionModel::Contour => {
            let freqs = if a.freq.is_empty() {
                contour_grid()
            } else {
                a.freq.clone()
            };
            contour_table(&freqs)
        }
    }
}

fn contour_grid() -> Vec<f64> {
    let (lo, hi) = friction::CONTOUR_RANGE;
    beam::linspace(lo, hi, 145)
}

fn contour_table(freqs: &[f64]) -> Result<String, Failure> {
    let mut out = Csv::new("frequency_hz,amplitude_um");
    for &f in freqs {
        out.row([num(f), num(friction::contour_amplitude(f)?)]);
    }
    Ok(out.0)
}

fn circuit_cmd(a: &CircuitArgs) -> Result<String, Failure> {
    let drive = DriveConfig::new(a.voltage, a.shunt)?;
    let mut out = Csv::new(
        "resistance_ohm,frequency_hz,x0_ohm,z_re_ohm,z_im_ohm,z_abs_ohm,u_g_v,i_g_a,delta_p_w,\
         u_g_exact_v,delta_p_exact_w,velocity_m_s",
    );
    for &r in &a.resistance {
        let p = BvdParams::from_resonance(a.frequency, a.capacitance, r, a.static_capacitance)?;
        let e = circuit::evaluate(&p, &drive);
        let velocity = a.coupling.map(|g| num(e.velocity(g))).unwrap_or_default();
        out.row([
            num(r),
            num(e.frequency),
            num(e.x0),
            num(e.z.re),
            num(e.z.im),
            num(e.z.norm()),
            num(e.u_g),
            num(e.i_g),
            num(e.delta_p),
            num(e.u_g_exact),
            num(e.delta_p_exact),
            velocity,
        ]);
    }
    Ok(out.0)
}

fn fit_cmd(a: &FitArgs) -> Result<String, Failure> {
    let spectrum = match &a.input {
        Some(path) => ImpedanceSpectrum::load_csv(path)?,
        None => {
            if !(a.span > 0.0 && a.span < 1.0) {
                return Err(Failure::Usage("--span must lie in (0, 1)".into()));
            }
            if a.noise.is_nan() || a.noise < 0.0 {
                return Err(Failure::Usage("--noise must be non-negative".into()));
            }
            let truth = BvdParams::from_resonance(
                a.true_frequency,
                a.true_capacitance,
                a.true_resistance,
                a.static_capacitance,
            )?;
            let fr = circuit::resonant_frequency(&truth);
            let grid = bvdfit::frequency_grid((1.0 - a.span) * fr, (1.0 + a.span) * fr, a.points);
            ImpedanceSpectrum::synthesize(&truth, &grid, a.shunt)?.with_noise(a.noise, a.seed)?
        }
    };
    if let Some(path) = &a.spectrum_out {
        let mut buf = Vec::new();
        spectrum.write_csv(&mut buf)?;
        std::fs::write(path, buf)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let options = FitOptions {
        fit_static_capacitance: a.fit_c0,
        series_resistance: a.shunt,
        max_iterations: a.max_iterations,
        ..FitOptions::default()
    };
    let mut out = Csv::new(
        "inductance_h,capacitance_f,resistance_ohm,static_capacitance_f,resonant_frequency_hz,\
         residual_norm,iterations,converged",
    );
    let fit = match bvdfit::fit_bvd(&spectrum, a.static_capacitance, &options) {
        Ok(fit) => fit,
        Err(tpadlab::Error::FitNotConverged { best }) => {
            fit_row(&mut out, &best);
            return Err(Failure::Analysis(format!(
                "fit did not converge after {} iterations; best so far:\n{}",
                best.iterations,
                out.0.trim_end()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    fit_row(&mut out, &fit);
    Ok(out.0)
}

fn fit_row(out: &mut Csv, fit: &bvdfit::FitResult) {
    let p = &fit.params;
    out.row([
        num(p.inductance),
        num(p.capacitance),
        num(p.resistance),
        num(p.static_capacitance),
        num(circuit::resonant_frequency(p)),
        num(fit.residual_norm),
        fit.iterations.to_string(),
        fit.converged.to_string(),
    ]);
}

/// Default sweep ranges, SI.
fn default_range(axis: SweepAxis) -> (f64, f64) {
    match axis {
        SweepAxis::Thickness => (0.3e-3, 1.0e-3),
        SweepAxis::Density => (2000.0, 2600.0),
        SweepAxis::YoungsModulus => (60e9, 80e9),
    }
}

fn axis_value(axis: SweepAxis, s: &str) -> Result<f64, Failure> {
    let parsed = match axis {
        SweepAxis::Thickness => units::length(s),
        SweepAxis::Density => units::density(s),
        SweepAxis::YoungsModulus => units::modulus(s),
    };
    parsed.map_err(Failure::Usage)
}

fn sweep_table(
    base: &GlassSpec,
    actuator: &ActuatorSpec,
    axis: SweepAxis,
    grid: &[f64],
) -> Result<Csv, Failure> {
    let mut out = Csv::new("axis_value,n,n_squared");
    for r in beam::sweep_amplification(base, actuator, axis, grid)? {
        out.row([num(r.axis_value), num(r.n), num(r.n_squared)]);
    }
    Ok(out)
}

fn beam_cmd(a: &BeamArgs) -> Result<String, Failure> {
    let actuator = a.actuator.spec()?;
    if let Some(axis) = a.sweep {
        let base = find_glass(a.glass.as_deref().unwrap_or("SLG_0.4"))?;
        let (lo, hi) = default_range(axis);
        let lo = a
            .from
            .as_deref()
            .map(|s| axis_value(axis, s))
            .transpose()?
            .unwrap_or(lo);
        let hi =
            a.to.as_deref()
                .map(|s| axis_value(axis, s))
                .transpose()?
                .unwrap_or(hi);
        return Ok(sweep_table(&base, &actuator, axis, &beam::linspace(lo, hi, a.count))?.0);
    }
    let Some(name) = &a.glass else {
        return Err(Failure::Usage("beam needs --glass or --sweep".into()));
    };
    let glass = find_glass(name)?;
    let reference = find_glass(&a.reference)?;
    let n = beam::amplification_number(&glass, &actuator);
    let n_ref = beam::amplification_number(&reference, &actuator);
    let mut out = Csv::new("name,n,n_squared,reference,reference_n_squared,predicted_power_ratio");
    out.row([
        glass.name.clone(),
        num(n.n),
        num(n.n_squared()),
        reference.name.clone(),
        num(n_ref.n_squared()),
        num(beam::power_ratio(&reference, &glass, &actuator)),
    ]);
    eprintln!("{MODEL_NOTE}");
    Ok(out.0)
}

fn prediction_table(
    reference: &GlassSpec,
    glasses: &[GlassSpec],
    actuator: &ActuatorSpec,
) -> String {
    let mut out = Csv::new("name,n_squared,predicted_power_ratio");
    for g in glasses {
        out.row([
            g.name.clone(),
            num(beam::amplification_number(g, actuator).n_squared()),
            num(beam::power_ratio(reference, g, actuator)),
        ]);
    }
    eprintln!("{MODEL_NOTE}");
    out.0
}

fn predict_cmd(a: &PredictArgs) -> Result<String, Failure> {
    let actuator = a.actuator.spec()?;
    let reference = find_glass(&a.reference)?;
    let glasses = if a.glass.is_empty() {
        all_glasses()?.into_iter().map(|(g, _)| g).collect()
    } else {
        a.glass
            .iter()
            .map(|n| find_glass(n))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(prediction_table(&reference, &glasses, &actuator))
}

fn reduce_cmd(a: &ReduceArgs) -> Result<String, Failure> {
    let kind = match a.ldv_kind {
        LdvKindArg::Displacement => LdvKind::Displacement,
        LdvKindArg::Velocity => LdvKind::Velocity,
    };
    let mut out = Csv::new("file,drive_frequency_hz,real_power_w,amplitude_m,rms_current_a");
    let mut summaries = Vec::with_capacity(a.files.len());
    for path in &a.files {
        let mut traces = dataio::load_traces_csv(path, a.sample_rate, kind)?;
        if let PiezoNode::Source = a.piezo_node {
            traces = traces.from_source_node();
        }
        let s = dataio::summarize_trial(&traces, a.shunt)?;
        summary_row(&mut out, &path.display().to_string(), &s);
        summaries.push(s);
    }
    if a.average {
        if let Some(mean) = dataio::average_trials(&summaries) {
            summary_row(&mut out, "mean", &mean);
        }
    }
    Ok(out.0)
}

fn summary_row(out: &mut Csv, label: &str, s: &dataio::TrialSummary) {
    out.row([
        label.to_string(),
        num(s.drive_frequency),
        num(s.real_power),
        s.amplitude.map(num).unwrap_or_default(),
        num(s.rms_current),
    ]);
}

/// The three property sweeps around SLG_0.4 with the stock actuator.
fn fig10_grids() -> [(SweepAxis, Vec<f64>); 3] {
    [
        (SweepAxis::Thickness, beam::linspace(0.3e-3, 1.0e-3, 71)),
        (SweepAxis::Density, beam::linspace(2000.0, 2600.0, 61)),
        (SweepAxis::YoungsModulus, beam::linspace(60e9, 80e9, 41)),
    ]
}

fn repro_cmd(a: &ReproArgs) -> Result<String, Failure> {
    if a.out_dir.is_some() && !matches!(a.figure, Figure::Fig10) {
        return Err(Failure::Usage("--out-dir only applies to fig10".into()));
    }
    let actuator = ActuatorSpec::default();
    let reference = find_glass("SLG_0.4")?;
    match a.figure {
        Figure::Fig4 => contour_table(&contour_grid()),
        Figure::Fig10 => {
            let mut out = Csv::new("axis,axis_value,n,n_squared");
            for (axis, grid) in fig10_grids() {
                let table = sweep_table(&reference, &actuator, axis, &grid)?;
                for line in table.0.lines().skip(1) {
                    let _ = writeln!(out.0, "{},{line}", axis.name());
                }
                if let Some(dir) = &a.out_dir {
                    write_file(&dir.join(format!("fig10_{}.csv", axis.name())), &table.0)?;
                }
            }
            Ok(out.0)
        }
        Figure::Fig11 => {
            let glasses: Vec<GlassSpec> = materials::builtin_library()
                .into_iter()
                .map(|e| e.glass)
                .collect();
            Ok(prediction_table(&reference, &glasses, &actuator))
        }
    }
}
