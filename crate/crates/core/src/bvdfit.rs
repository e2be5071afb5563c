//! Recovering the motional branch (L, C, R) of the equivalent network from a
//! measured impedance spectrum.
//!
//! The objective is the squared complex-log mismatch
//! Σ |ln Z_model(f) − ln Z_measured(f)|², i.e. log-magnitude and phase
//! residuals, so the impedance dip and peak around resonance carry equal
//! weight. Minimization is Levenberg–Marquardt in log-parameter space, which
//! keeps every component positive.

use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::{self, BvdParams};
use crate::error::{ensure_positive, Error, Result};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedancePoint {
    pub frequency: f64,
    pub impedance: Complex64,
}

/// Frequency-ordered impedance samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceSpectrum {
    points: Vec<ImpedancePoint>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    frequency_hz: f64,
    magnitude_ohm: f64,
    phase_deg: f64,
}

impl ImpedanceSpectrum {
    pub fn new(points: Vec<ImpedancePoint>) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::MalformedSpectrum(format!(
                "{} points, need at least {MIN_POINTS}",
                points.len()
            )));
        }
        for p in &points {
            if !(p.frequency.is_finite() && p.frequency > 0.0) {
                return Err(Error::MalformedSpectrum(format!(
                    "bad frequency {}",
                    p.frequency
                )));
            }
            let m = p.impedance.norm();
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::MalformedSpectrum(format!(
                    "bad impedance {} at {} Hz",
                    p.impedance, p.frequency
                )));
            }
        }
        if points.windows(2).any(|w| w[1].frequency <= w[0].frequency) {
            return Err(Error::MalformedSpectrum(
                "frequencies must be strictly increasing".into(),
            ));
        }
        Ok(ImpedanceSpectrum { points })
    }

    /// Noise-free spectrum of `params` (plus an optional series resistance)
    /// at the given frequencies.
    pub fn synthesize(
        params: &BvdParams,
        frequencies: &[f64],
        series_resistance: Option<f64>,
    ) -> Result<Self> {
        let r0 = series_resistance.unwrap_or(0.0);
        Self::new(
            frequencies
                .iter()
                .map(|&f| ImpedancePoint {
                    frequency: f,
                    impedance: circuit::impedance(params, f) + r0,
                })
                .collect(),
        )
    }

    /// Multiplies each sample by (1 + ε) with ε circular complex Gaussian,
    /// E|ε|² = σ² (each component has standard deviation σ/√2). Draws come
    /// from a generator seeded with `seed`.
    pub fn with_noise(&self, sigma: f64, seed: u64) -> Result<Self> {
        let mut rng = StdRng::seed_from_u64(seed);
        let sigma = sigma / std::f64::consts::SQRT_2;
        let points = self
            .points
            .iter()
            .map(|p| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                ImpedancePoint {
                    frequency: p.frequency,
                    impedance: p.impedance * Complex64::new(1.0 + sigma * re, sigma * im),
                }
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[ImpedancePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Reads `frequency_hz,magnitude_ohm,phase_deg` rows.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::MalformedSpectrum(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["frequency_hz", "magnitude_ohm", "phase_deg"] {
            return Err(Error::MalformedSpectrum(format!(
                "expected header frequency_hz,magnitude_ohm,phase_deg, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row.map_err(|e| Error::MalformedSpectrum(e.to_string()))?;
            if row.magnitude_ohm.is_nan() || row.magnitude_ohm <= 0.0 {
                return Err(Error::MalformedSpectrum(format!(
                    "non-positive magnitude at {} Hz",
                    row.frequency_hz
                )));
            }
            points.push(ImpedancePoint {
                frequency: row.frequency_hz,
                impedance: Complex64::from_polar(row.magnitude_ohm, row.phase_deg.to_radians()),
            });
        }
        Self::new(points)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let to_err = |e: csv::Error| Error::MalformedSpectrum(e.to_string());
        for p in &self.points {
            let (m, phase) = p.impedance.to_polar();
            wtr.serialize(CsvRow {
                frequency_hz: p.frequency,
                magnitude_ohm: m,
                phase_deg: phase.to_degrees(),
            })
            .map_err(to_err)?;
        }
        wtr.flush()
            .map_err(|e| Error::MalformedSpectrum(e.to_string()))
    }
}

/// `count` frequencies evenly spaced over [lo, hi].
pub fn frequency_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    crate::beam::linspace(lo, hi, count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Fit C₀ as a fourth parameter instead of holding it at the supplied value.
    pub fit_static_capacitance: bool,
    /// Known resistance in series with the device (e.g. the shunt), Ω.
    pub series_resistance: Option<f64>,
    /// Starting point; estimated from the spectrum when `None`.
    pub start: Option<BvdParams>,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub cost_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            fit_static_capacitance: false,
            series_resistance: None,
            start: None,
            max_iterations: 500,
            step_tolerance: 1e-10,
            cost_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: BvdParams,
    /// √(objective) at `params`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn model(p: &BvdParams, f: f64, series_resistance: f64) -> Complex64 {
    circuit::impedance(p, f) + series_resistance
}

fn log_mismatch(model: Complex64, measured: Complex64) -> Complex64 {
    (model / measured).ln()
}

fn objective(p: &BvdParams, spectrum: &ImpedanceSpectrum, series_resistance: f64) -> f64 {
    spectrum
        .points
        .iter()
        .map(|pt| log_mismatch(model(p, pt.frequency, series_resistance), pt.impedance).norm_sqr())
        .sum()
}

/// Objective minimized by [`fit_bvd`]: Σ |ln Z_model − ln Z_measured|².
pub fn residual(params: &BvdParams, spectrum: &ImpedanceSpectrum) -> f64 {
    objective(params, spectrum, 0.0)
}

/// Classic estimate C = C₀·((f_p/f_s)² − 1) from the series and parallel
/// resonance frequencies.
pub fn capacitance_from_resonances(f_series: f64, f_parallel: f64, c0: f64) -> f64 {
    let ratio = f_parallel / f_series;
    c0 * (ratio * ratio - 1.0)
}

/// Starting point for [`fit_bvd`] with C₀ known.
///
/// Subtracting the static branch leaves the motional admittance
/// 1/(R + jX₁), whose magnitude peaks at the series resonance. Around that
/// peak, Im(1/Y) = Lω − 1/(Cω) is linear in (L, 1/C) and Re(1/Y) = R.
pub fn initial_guess(spectrum: &ImpedanceSpectrum, c0: f64) -> Result<BvdParams> {
    guess(spectrum, c0, 0.0)
}

fn guess(spectrum: &ImpedanceSpectrum, c0: f64, series_resistance: f64) -> Result<BvdParams> {
    ensure_positive("static_capacitance", c0)?;
    let pts = &spectrum.points;
    let n = pts.len();
    let motional: Vec<Complex64> = pts
        .iter()
        .map(|p| {
            let w = TAU * p.frequency;
            1.0 / (p.impedance - series_resistance) - Complex64::new(0.0, w * c0)
        })
        .collect();
    let (peak_idx, peak) = motional.iter().map(|y| y.norm()).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, m)| if m > acc.1 { (i, m) } else { acc },
    );
    let static_admittance = TAU * pts[peak_idx].frequency * c0;
    if peak_idx == 0 || peak_idx == n - 1 || peak.is_nan() || peak <= 1e-3 * static_admittance {
        return Err(Error::NoResonanceFound);
    }

    let mut lo = peak_idx;
    while lo > 0 && motional[lo - 1].norm() >= 0.5 * peak {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < n && motional[hi + 1].norm() >= 0.5 * peak {
        hi += 1;
    }
    if hi - lo < 2 {
        lo = peak_idx - 1;
        hi = peak_idx + 1;
    }

    // Least squares for X₁(ω) = L·ω − S/ω with S = 1/C.
    let (mut a11, mut a12, mut a22, mut b1, mut b2, mut r_sum) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in lo..=hi {
        let w = TAU * pts[i].frequency;
        let z = 1.0 / motional[i];
        let (u, v) = (w, -1.0 / w);
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u * z.im;
        b2 += v * z.im;
        r_sum += z.re;
    }
    let det = a11 * a22 - a12 * a12;
    let l = (b1 * a22 - b2 * a12) / det;
    let s = (a11 * b2 - a12 * b1) / det;
    let r = r_sum / (hi - lo + 1) as f64;
    if l > 0.0 && s > 0.0 && r > 0.0 && l.is_finite() && s.is_finite() {
        return BvdParams::new(l, 1.0 / s, r, c0);
    }

    // Fall back on the magnitude extrema when the local fit is unusable.
    let f_series = pts[peak_idx].frequency;
    let (par_idx, _) = pts
        .iter()
        .enumerate()
        .skip(peak_idx + 1)
        .map(|(i, p)| (i, (p.impedance - series_resistance).norm()))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, m)| if m > acc.1 { (i, m) } else { acc },
        );
    if par_idx == 0 || par_idx == n - 1 {
        return Err(Error::NoResonanceFound);
    }
    let c = capacitance_from_resonances(f_series, pts[par_idx].frequency, c0);
    let ws = TAU * f_series;
    BvdParams::new(1.0 / (ws * ws * c), c, 1.0 / peak, c0)
}

struct Problem<'a> {
    spectrum: &'a ImpedanceSpectrum,
    c0: f64,
    fit_c0: bool,
    series_resistance: f64,
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        if self.fit_c0 {
            4
        } else {
            3
        }
    }

    fn params(&self, theta: &DVector<f64>) -> BvdParams {
        BvdParams {
            inductance: theta[0].exp(),
            capacitance: theta[1].exp(),
            resistance: theta[2].exp(),
            static_capacitance: if self.fit_c0 { theta[3].exp() } else { self.c0 },
        }
    }

    fn theta(&self, p: &BvdParams) -> DVector<f64> {
        let mut v = vec![p.inductance.ln(), p.capacitance.ln(), p.resistance.ln()];
        if self.fit_c0 {
            v.push(p.static_capacitance.ln());
        }
        DVector::from_vec(v)
    }

    fn cost(&self, theta: &DVector<f64>) -> f64 {
        let c = objective(&self.params(theta), self.spectrum, self.series_resistance);
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }

    /// Stacked real/imaginary residuals and their Jacobian in log parameters.
    fn linearize(&self, theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let p = self.params(theta);
        let m = self.spectrum.len();
        let mut r = DVector::zeros(2 * m);
        let mut jac = DMatrix::zeros(2 * m, self.dim());
        let j = Complex64::i();
        for (i, pt) in self.spectrum.points.iter().enumerate() {
            let w = TAU * pt.frequency;
            let branch = p.resistance + j * (w * p.inductance - 1.0 / (w * p.capacitance));
            let y = j * w * p.static_capacitance + 1.0 / branch;
            let z = 1.0 / y;
            let total = z + self.series_resistance;
            let e = log_mismatch(total, pt.impedance);
            r[2 * i] = e.re;
            r[2 * i + 1] = e.im;

            // d ln(total)/dθ = −Z²·(dY/dθ)/total, dY/dθ = −(dBranch/dθ)/branch².
            let dbranch = [
                j * w * p.inductance,
                j / (w * p.capacitance),
                Complex64::new(p.resistance, 0.0),
            ];
            let scale = z * z / (branch * branch * total);
            for (k, db) in dbranch.iter().enumerate() {
                let d = scale * db;
                jac[(2 * i, k)] = d.re;
                jac[(2 * i + 1, k)] = d.im;
            }
            if self.fit_c0 {
                let d = -z * z * (j * w * p.static_capacitance) / total;
                jac[(2 * i, 3)] = d.re;
                jac[(2 * i + 1, 3)] = d.im;
            }
        }
        (r, jac)
    }
}

/// Least-squares fit of the equivalent network to `spectrum`.
///
/// `c0` is the static capacitance: held fixed unless
/// [`FitOptions::fit_static_capacitance`] is set, in which case it seeds the
/// fourth parameter. Stops when the relative step falls below
/// `step_tolerance` or the relative cost improvement below `cost_tolerance`.
pub fn fit_bvd(spectrum: &ImpedanceSpectrum, c0: f64, options: &FitOptions) -> Result<FitResult> {
    let series_resistance = options.series_resistance.unwrap_or(0.0);
    let start = match options.start {
        Some(p) => {
            p.validate()?;
            p
        }
        None => guess(spectrum, c0, series_resistance)?,
    };
    let problem = Problem {
        spectrum,
        c0: start.static_capacitance,
        fit_c0: options.fit_static_capacitance,
        series_resistance,
    };
    let dim = problem.dim();

    let mut theta = problem.theta(&start);
    let mut cost = problem.cost(&theta);
    if !cost.is_finite() {
        return Err(Error::FitNotConverged {
            best: Box::new(FitResult {
                params: start,
                residual_norm: cost.sqrt(),
                iterations: 0,
                converged: false,
            }),
        });
    }

    let mut lambda = 1e-3;
    let mut nu = 2.0;
    let mut converged = cost == 0.0;
    let mut iterations = 0;
    let (mut r, mut jac) = problem.linearize(&theta);

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &r;

        let mut damped = jtj.clone();
        for k in 0..dim {
            damped[(k, k)] += lambda * jtj[(k, k)].max(1e-30);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&(-&grad))) else {
            lambda *= nu;
            nu *= 2.0;
            continue;
        };

        let step_small =
            step.norm() <= options.step_tolerance * (theta.norm() + options.step_tolerance);
        let trial = &theta + &step;
        let trial_cost = problem.cost(&trial);

        if trial_cost < cost {
            let predicted = -(step.dot(&grad) + 0.5 * step.dot(&(&jtj * &step)));
            let rho = if predicted > 0.0 {
                (cost - trial_cost) / predicted
            } else {
                1.0
            };
            let improvement = (cost - trial_cost) / cost;
            theta = trial;
            cost = trial_cost;
            (r, jac) = problem.linearize(&theta);
            lambda *= f64::max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
            if step_small || improvement < options.cost_tolerance || cost == 0.0 {
                converged = true;
            }
        } else if step_small {
            // No representable descent left at this precision.
            converged = true;
        } else {
            lambda *= nu;
            nu *= 2.0;
            if lambda > 1e20 {
                break;
            }
        }
    }

    let result = FitResult {
        params: problem.params(&theta),
        residual_norm: cost.sqrt(),
        iterations,
        converged,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::FitNotConverged {
            best: Box::new(result),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::resonant_frequency;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn truth() -> BvdParams {
        BvdParams::from_resonance(31.5e3, 0.25e-9, 1400.0, 9.88e-9).unwrap()
    }

    fn window(p: &BvdParams, count: usize) -> Vec<f64> {
        let fr = resonant_frequency(p);
        frequency_grid(0.9 * fr, 1.1 * fr, count)
    }

    #[test]
    fn spectrum_validation() {
        let pt = |f: f64| ImpedancePoint {
            frequency: f,
            impedance: Complex64::new(1.0, -1.0),
        };
        assert!(ImpedanceSpectrum::new((1..8).map(|i| pt(i as f64)).collect()).is_err());
        assert!(ImpedanceSpectrum::new((1..=8).map(|i| pt(i as f64)).collect()).is_ok());
        let mut pts: Vec<_> = (1..=8).map(|i| pt(i as f64)).collect();
        pts.swap(2, 3);
        assert!(ImpedanceSpectrum::new(pts).is_err());
        let mut pts: Vec<_> = (1..=8).map(|i| pt(i as f64)).collect();
        pts[4].impedance = Complex64::new(0.0, 0.0);
        assert!(ImpedanceSpectrum::new(pts).is_err());
    }

    #[test]
    fn guess_is_close_on_clean_data() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 201), None).unwrap();
        let g = initial_guess(&s, p.static_capacitance).unwrap();
        assert!(rel(g.inductance, p.inductance) < 0.2);
        assert!(rel(g.capacitance, p.capacitance) < 0.2);
        assert!(rel(g.resistance, p.resistance) < 0.2);
    }

    #[test]
    fn pure_capacitor_has_no_resonance() {
        let c0 = 9.88e-9;
        let pts = frequency_grid(20e3, 40e3, 101)
            .into_iter()
            .map(|f| ImpedancePoint {
                frequency: f,
                impedance: 1.0 / Complex64::new(0.0, TAU * f * c0),
            })
            .collect();
        let s = ImpedanceSpectrum::new(pts).unwrap();
        assert!(matches!(
            initial_guess(&s, c0),
            Err(Error::NoResonanceFound)
        ));
    }

    #[test]
    fn resonance_estimate_limit() {
        let c0 = 9.88e-9;
        assert_eq!(capacitance_from_resonances(30e3, 30e3, c0), 0.0);
        let c = capacitance_from_resonances(30e3, 30e3 * (1.0 + 1e-9), c0);
        assert!(c > 0.0 && c < 1e-16);
        assert!(capacitance_from_resonances(30e3, 31e3, c0) > c);
    }

    #[test]
    fn clean_round_trip() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 201), None).unwrap();
        let fit = fit_bvd(&s, p.static_capacitance, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(rel(fit.params.inductance, p.inductance) < 1e-6);
        assert!(rel(fit.params.capacitance, p.capacitance) < 1e-6);
        assert!(rel(fit.params.resistance, p.resistance) < 1e-6);
        assert!(fit.residual_norm < 1e-6);
    }

    #[test]
    fn four_parameter_round_trip() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 201), None).unwrap();
        let opts = FitOptions {
            fit_static_capacitance: true,
            ..Default::default()
        };
        let fit = fit_bvd(&s, 1.1 * p.static_capacitance, &opts).unwrap();
        assert!(rel(fit.params.static_capacitance, p.static_capacitance) < 1e-6);
        assert!(rel(fit.params.resistance, p.resistance) < 1e-6);
    }

    #[test]
    fn series_resistance_round_trip() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 201), Some(100.0)).unwrap();
        let opts = FitOptions {
            series_resistance: Some(100.0),
            ..Default::default()
        };
        let fit = fit_bvd(&s, p.static_capacitance, &opts).unwrap();
        assert!(rel(fit.params.resistance, p.resistance) < 1e-6);
        assert!(rel(fit.params.inductance, p.inductance) < 1e-6);
    }

    #[test]
    fn window_without_resonance() {
        let p = truth();
        let fr = resonant_frequency(&p);
        let s = ImpedanceSpectrum::synthesize(&p, &frequency_grid(1.5 * fr, 1.8 * fr, 101), None)
            .unwrap();
        match fit_bvd(&s, p.static_capacitance, &FitOptions::default()) {
            Err(Error::NoResonanceFound) | Err(Error::FitNotConverged { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_reports_best() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 201), None)
            .unwrap()
            .with_noise(0.01, 3)
            .unwrap();
        let opts = FitOptions {
            max_iterations: 1,
            start: Some(p.with_resistance(3.0 * p.resistance)),
            ..Default::default()
        };
        match fit_bvd(&s, p.static_capacitance, &opts) {
            Err(Error::FitNotConverged { best }) => {
                assert_eq!(best.iterations, 1);
                assert!(!best.converged);
                assert!(best.residual_norm.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn residual_properties() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 101), None).unwrap();
        assert!(residual(&p, &s) < 1e-24);
        let worse = residual(&p.with_resistance(1.1 * p.resistance), &s);
        assert!(worse > residual(&p, &s) && worse > 1e-6);

        // Reordering: objective of a shuffled copy (bypassing ordering
        // validation) is the same sum.
        let noisy = s.with_noise(0.01, 9).unwrap();
        let mut rev = noisy.points.clone();
        rev.reverse();
        let reversed = ImpedanceSpectrum { points: rev };
        assert!(rel(residual(&p, &reversed), residual(&p, &noisy)) < 1e-12);
    }

    #[test]
    fn noise_is_seeded() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 51), None).unwrap();
        assert_eq!(
            s.with_noise(0.01, 1).unwrap(),
            s.with_noise(0.01, 1).unwrap()
        );
        assert_ne!(
            s.with_noise(0.01, 1).unwrap(),
            s.with_noise(0.01, 2).unwrap()
        );
    }

    #[test]
    fn csv_round_trip() {
        let p = truth();
        let s = ImpedanceSpectrum::synthesize(&p, &window(&p, 21), None).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("frequency_hz,magnitude_ohm,phase_deg\n"));
        let back = ImpedanceSpectrum::read_csv(text.as_bytes()).unwrap();
        for (a, b) in back.points.iter().zip(s.points.iter()) {
            assert_eq!(a.frequency, b.frequency);
            assert!((a.impedance - b.impedance).norm() < 1e-9 * b.impedance.norm());
        }
    }

    #[test]
    fn csv_rejects_bad_input() {
        let bad_header = "f,m,p\n1,2,3\n";
        assert!(ImpedanceSpectrum::read_csv(bad_header.as_bytes()).is_err());
        let mut text = String::from("frequency_hz,magnitude_ohm,phase_deg\n");
        for i in 1..=8 {
            text.push_str(&format!(
                "{},{},-80\n",
                i * 1000,
                if i == 4 { -5 } else { 100 }
            ));
        }
        assert!(matches!(
            ImpedanceSpectrum::read_csv(text.as_bytes()),
            Err(Error::MalformedSpectrum(_))
        ));
    }
}
