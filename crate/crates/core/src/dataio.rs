//! Reduction of recorded drive traces: the voltage across the actuator, the
//! voltage across a series shunt resistor, and an optional laser vibrometer
//! channel, all sampled on one clock.
//!
//! Averages are taken over an integer number of drive periods (any trailing
//! partial period is discarded), which is exact for a single tone without a
//! window function.

use std::f64::consts::TAU;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ensure_positive, Error, Result};
use crate::friction::VibrationState;

/// Band in which the drive tone is expected, Hz.
pub const DRIVE_BAND: (f64, f64) = (15e3, 60e3);

/// What the vibrometer channel measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LdvKind {
    /// Displacement, m.
    #[default]
    Displacement,
    /// Velocity, m/s.
    Velocity,
}

impl std::str::FromStr for LdvKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "displacement" => Ok(LdvKind::Displacement),
            "velocity" => Ok(LdvKind::Velocity),
            other => Err(format!(
                "unknown LDV kind `{other}` (expected displacement or velocity)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdvChannel {
    pub kind: LdvKind,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeTraces {
    sample_rate: f64,
    v_piezo: Vec<f64>,
    v_shunt: Vec<f64>,
    ldv: Option<LdvChannel>,
}

impl TimeTraces {
    pub fn new(
        sample_rate: f64,
        v_piezo: Vec<f64>,
        v_shunt: Vec<f64>,
        ldv: Option<LdvChannel>,
    ) -> Result<Self> {
        ensure_positive("sample_rate", sample_rate)?;
        if sample_rate <= 2.0 * DRIVE_BAND.1 {
            return Err(Error::SampleRateTooLow(sample_rate));
        }
        let n = v_piezo.len();
        if v_shunt.len() != n || ldv.as_ref().is_some_and(|l| l.samples.len() != n) {
            return Err(Error::MalformedTraceFile(
                "channels have different lengths".into(),
            ));
        }
        let needed = Self::min_samples(sample_rate);
        if n < needed {
            return Err(Error::InsufficientSamples { got: n, needed });
        }
        Ok(TimeTraces {
            sample_rate,
            v_piezo,
            v_shunt,
            ldv,
        })
    }

    /// Two periods of the lowest expected drive frequency.
    pub fn min_samples(sample_rate: f64) -> usize {
        (2.0 * sample_rate / DRIVE_BAND.0).ceil() as usize
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.v_piezo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_piezo.is_empty()
    }

    pub fn v_piezo(&self) -> &[f64] {
        &self.v_piezo
    }

    pub fn v_shunt(&self) -> &[f64] {
        &self.v_shunt
    }

    pub fn ldv(&self) -> Option<&LdvChannel> {
        self.ldv.as_ref()
    }

    /// Converts a `v_piezo` channel logged at the source node (before the
    /// shunt) into the voltage across the device.
    pub fn from_source_node(mut self) -> Self {
        for (v, s) in self.v_piezo.iter_mut().zip(&self.v_shunt) {
            *v -= s;
        }
        self
    }

    /// Reads a `v_piezo,v_shunt[,ldv]` CSV.
    pub fn read_csv<R: Read>(reader: R, sample_rate: f64, ldv_kind: LdvKind) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::MalformedTraceFile(e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let has_ldv = match headers.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["v_piezo", "v_shunt"] => false,
            ["v_piezo", "v_shunt", "ldv"] => true,
            _ => {
                return Err(Error::MalformedTraceFile(format!(
                    "expected header v_piezo,v_shunt[,ldv], got {}",
                    headers.join(",")
                )))
            }
        };
        let (mut v_piezo, mut v_shunt, mut ldv) = (Vec::new(), Vec::new(), Vec::new());
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::MalformedTraceFile(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record[i].parse().map_err(|_| {
                    Error::MalformedTraceFile(format!(
                        "row {}: `{}` is not a number",
                        line + 2,
                        &record[i]
                    ))
                })
            };
            v_piezo.push(field(0)?);
            v_shunt.push(field(1)?);
            if has_ldv {
                ldv.push(field(2)?);
            }
        }
        let ldv = has_ldv.then_some(LdvChannel {
            kind: ldv_kind,
            samples: ldv,
        });
        Self::new(sample_rate, v_piezo, v_shunt, ldv)
    }
}

/// Loads a trace CSV; see [`TimeTraces::read_csv`].
pub fn load_traces_csv(
    path: impl AsRef<Path>,
    sample_rate: f64,
    ldv_kind: LdvKind,
) -> Result<TimeTraces> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    TimeTraces::read_csv(std::io::BufReader::new(file), sample_rate, ldv_kind)
}

/// Frequency of the strongest spectral component of `v_piezo`, refined by
/// Gaussian (log-parabolic) interpolation over a Hann-windowed FFT.
pub fn detect_drive_frequency(t: &TimeTraces) -> Result<f64> {
    dominant_frequency(&t.v_piezo, t.sample_rate)
}

fn dominant_frequency(signal: &[f64], sample_rate: f64) -> Result<f64> {
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos();
            Complex64::new(x * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..=n / 2].iter().map(|c| c.norm()).collect();
    let (k, peak) = mags
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    if peak == 0.0 {
        return Err(Error::DriveFrequencyNotFound(0.0));
    }
    let mut offset = 0.0;
    if k > 0 && k < mags.len() - 1 && mags[k - 1] > 0.0 && mags[k + 1] > 0.0 {
        let (a, b, c) = (mags[k - 1].ln(), mags[k].ln(), mags[k + 1].ln());
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            offset = 0.5 * (a - c) / denom;
        }
    }
    let f = (k as f64 + offset) * sample_rate / n as f64;
    if !(DRIVE_BAND.0..=DRIVE_BAND.1).contains(&f) {
        return Err(Error::DriveFrequencyNotFound(f));
    }
    Ok(f)
}

/// Number of samples spanning the largest whole number of periods of
/// `frequency` that fits in `len` samples.
fn whole_period_len(len: usize, sample_rate: f64, frequency: f64) -> Result<usize> {
    let period = sample_rate / frequency;
    let periods = (len as f64 / period).floor();
    let m = ((periods * period).round() as usize).min(len);
    if periods < 1.0 || m == 0 {
        return Err(Error::InsufficientSamples {
            got: len,
            needed: period.ceil() as usize,
        });
    }
    Ok(m)
}

/// Mean of v_piezo·v_shunt/R₀ over whole drive periods, W.
pub fn real_power_from_traces(t: &TimeTraces, shunt_resistance: f64) -> Result<f64> {
    ensure_positive("shunt_resistance", shunt_resistance)?;
    if t.v_shunt.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let f = detect_drive_frequency(t)?;
    power_at(t, shunt_resistance, f)
}

fn power_at(t: &TimeTraces, shunt_resistance: f64, frequency: f64) -> Result<f64> {
    let m = whole_period_len(t.len(), t.sample_rate, frequency)?;
    let sum: f64 = t.v_piezo[..m]
        .iter()
        .zip(&t.v_shunt[..m])
        .map(|(v, s)| v * s)
        .sum();
    Ok(sum / (m as f64 * shunt_resistance))
}

/// Single-tone amplitude from the vibrometer channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdvAmplitude {
    pub vibration: VibrationState,
    /// Median amplitude of off-tone projections, in displacement units.
    pub noise_floor: f64,
    /// Set when the tone is less than ten times the noise floor.
    pub low_confidence: bool,
}

/// 2|X(f)|/M for the Fourier projection of `x[..m]` at `frequency`.
fn projection_amplitude(x: &[f64], sample_rate: f64, frequency: f64) -> f64 {
    let step = Complex64::from_polar(1.0, -TAU * frequency / sample_rate);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        acc += phasor * v;
        phasor *= step;
        // Renormalize periodically to stop magnitude drift.
        if i % 1024 == 1023 {
            phasor /= phasor.norm();
        }
    }
    2.0 * acc.norm() / x.len() as f64
}

/// Displacement amplitude of the LDV channel at the drive frequency (detected
/// from `v_piezo` when not given). Velocity channels are divided by ω.
pub fn amplitude_from_ldv(t: &TimeTraces, drive_frequency: Option<f64>) -> Result<LdvAmplitude> {
    let ldv = t.ldv.as_ref().ok_or(Error::NoLdvChannel)?;
    let f = match drive_frequency {
        Some(f) => {
            ensure_positive("drive_frequency", f)?;
            f
        }
        None => detect_drive_frequency(t)?,
    };
    let m = whole_period_len(t.len(), t.sample_rate, f)?;
    let x = &ldv.samples[..m];
    let to_displacement = |a: f64, freq: f64| match ldv.kind {
        LdvKind::Displacement => a,
        LdvKind::Velocity => a / (TAU * freq),
    };

    let amplitude = to_displacement(projection_amplitude(x, t.sample_rate, f), f);

    let bin = t.sample_rate / m as f64;
    let mut floor: Vec<f64> = (3..=22)
        .flat_map(|k| [f - k as f64 * bin, f + k as f64 * bin])
        .filter(|&g| g > 0.0 && g < 0.5 * t.sample_rate)
        .map(|g| to_displacement(projection_amplitude(x, t.sample_rate, g), g))
        .collect();
    floor.sort_by(f64::total_cmp);
    let noise_floor = if floor.is_empty() {
        0.0
    } else {
        floor[floor.len() / 2]
    };

    Ok(LdvAmplitude {
        vibration: VibrationState {
            frequency: f,
            amplitude,
        },
        noise_floor,
        low_confidence: amplitude < 10.0 * noise_floor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    /// Hz; zero for a trial with no excitation.
    pub drive_frequency: f64,
    /// W
    pub real_power: f64,
    /// Displacement amplitude, m; `None` without an LDV channel.
    pub amplitude: Option<f64>,
    /// RMS(v_shunt)/R₀, A
    pub rms_current: f64,
}

pub fn summarize_trial(t: &TimeTraces, shunt_resistance: f64) -> Result<TrialSummary> {
    ensure_positive("shunt_resistance", shunt_resistance)?;
    let rms_current =
        (t.v_shunt.iter().map(|v| v * v).sum::<f64>() / t.len() as f64).sqrt() / shunt_resistance;
    let silent = |x: &[f64]| x.iter().all(|&v| v == 0.0);
    if silent(&t.v_piezo) && silent(&t.v_shunt) {
        return Ok(TrialSummary {
            drive_frequency: 0.0,
            real_power: 0.0,
            amplitude: t.ldv.as_ref().map(|_| 0.0),
            rms_current,
        });
    }
    let f = detect_drive_frequency(t)?;
    let real_power = power_at(t, shunt_resistance, f)?;
    let amplitude = match t.ldv {
        Some(_) => Some(amplitude_from_ldv(t, Some(f))?.vibration.amplitude),
        None => None,
    };
    Ok(TrialSummary {
        drive_frequency: f,
        real_power,
        amplitude,
        rms_current,
    })
}

/// Field-wise mean of repeated trials. Amplitude is averaged only when every
/// trial has one.
pub fn average_trials(trials: &[TrialSummary]) -> Option<TrialSummary> {
    if trials.is_empty() {
        return None;
    }
    let n = trials.len() as f64;
    let mean = |f: fn(&TrialSummary) -> f64| trials.iter().map(f).sum::<f64>() / n;
    let amplitude = trials
        .iter()
        .map(|t| t.amplitude)
        .sum::<Option<f64>>()
        .map(|s| s / n);
    Some(TrialSummary {
        drive_frequency: mean(|t| t.drive_frequency),
        real_power: mean(|t| t.real_power),
        amplitude,
        rms_current: mean(|t| t.rms_current),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 300e3;
    const N: usize = 30_000;

    fn tone(n: usize, f: f64, amp: f64, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (TAU * f * i as f64 / FS + phase).sin())
            .collect()
    }

    fn traces(v: Vec<f64>, s: Vec<f64>, ldv: Option<LdvChannel>) -> TimeTraces {
        TimeTraces::new(FS, v, s, ldv).unwrap()
    }

    /// 40 V across the device, 0.1 A through a 100 Ω shunt lagging by `lag`.
    fn drive(f: f64, lag: f64, n: usize) -> TimeTraces {
        traces(tone(n, f, 40.0, 0.0), tone(n, f, 10.0, -lag), None)
    }

    #[test]
    fn detects_single_tone() {
        let t = traces(tone(N, 33.1e3, 1.0, 0.3), vec![0.0; N], None);
        let f = detect_drive_frequency(&t).unwrap();
        assert!((f - 33.1e3).abs() < 5.0, "{f}");
    }

    #[test]
    fn detects_off_bin_tone() {
        let t = traces(tone(N, 27_345.6, 1.0, 1.0), vec![0.0; N], None);
        let f = detect_drive_frequency(&t).unwrap();
        assert!((f - 27_345.6).abs() < 5.0, "{f}");
    }

    #[test]
    fn dc_has_no_drive() {
        let t = traces(vec![3.0; N], vec![0.0; N], None);
        assert!(matches!(
            detect_drive_frequency(&t),
            Err(Error::DriveFrequencyNotFound(_))
        ));
    }

    #[test]
    fn dominant_of_two_tones() {
        let v: Vec<f64> = tone(N, 30e3, 1.0, 0.0)
            .into_iter()
            .zip(tone(N, 60e3, 0.1, 0.0))
            .map(|(a, b)| a + b)
            .collect();
        let t = traces(v, vec![0.0; N], None);
        assert!((detect_drive_frequency(&t).unwrap() - 30e3).abs() < 5.0);
    }

    #[test]
    fn average_power_identity() {
        // ½·40·0.1·cos 60° = 1 W
        let p = real_power_from_traces(&drive(30e3, 60f64.to_radians(), N), 100.0).unwrap();
        assert!((p - 1.0).abs() < 1e-3, "{p}");
        let p = real_power_from_traces(&drive(33.1e3, 60f64.to_radians(), N), 100.0).unwrap();
        assert!((p - 1.0).abs() < 1e-3, "{p}");
    }

    #[test]
    fn quadrature_power_vanishes() {
        let p = real_power_from_traces(&drive(30e3, 90f64.to_radians(), N), 100.0).unwrap();
        assert!(p.abs() < 1e-4, "{p}");
    }

    #[test]
    fn zero_shunt_zero_power() {
        let t = traces(tone(N, 30e3, 40.0, 0.0), vec![0.0; N], None);
        assert_eq!(real_power_from_traces(&t, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn partial_period_does_not_move_power() {
        let f = 31_234.0;
        let base = real_power_from_traces(&drive(f, 1.0, N), 100.0).unwrap();
        for extra in 1..10 {
            let p = real_power_from_traces(&drive(f, 1.0, N + extra), 100.0).unwrap();
            assert!(((p - base) / base).abs() < 1e-3, "{extra}: {p} vs {base}");
        }
    }

    #[test]
    fn displacement_amplitude() {
        let ldv = LdvChannel {
            kind: LdvKind::Displacement,
            samples: tone(N, 30e3, 3e-6, 0.7),
        };
        let t = traces(tone(N, 30e3, 40.0, 0.0), vec![0.0; N], Some(ldv));
        let a = amplitude_from_ldv(&t, None).unwrap();
        assert!(((a.vibration.amplitude - 3e-6) / 3e-6).abs() < 5e-3);
        assert!(!a.low_confidence);
    }

    #[test]
    fn velocity_amplitude() {
        let ldv = LdvChannel {
            kind: LdvKind::Velocity,
            samples: tone(N, 30e3, TAU * 30e3 * 3e-6, 0.2),
        };
        let t = traces(vec![0.0; N], vec![0.0; N], Some(ldv));
        let a = amplitude_from_ldv(&t, Some(30e3)).unwrap();
        assert!(((a.vibration.amplitude - 3e-6) / 3e-6).abs() < 5e-3);
    }

    #[test]
    fn amplitude_is_linear() {
        let amp = |a: f64| {
            let ldv = LdvChannel {
                kind: LdvKind::Displacement,
                samples: tone(N, 29e3, a, 0.0),
            };
            let t = traces(vec![0.0; N], vec![0.0; N], Some(ldv));
            amplitude_from_ldv(&t, Some(29e3))
                .unwrap()
                .vibration
                .amplitude
        };
        let (a1, a2, a4) = (amp(1e-6), amp(2e-6), amp(4e-6));
        assert!((a2 / a1 - 2.0).abs() < 1e-9);
        assert!((a4 / a1 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn missing_ldv() {
        let t = drive(30e3, 0.0, N);
        assert!(matches!(
            amplitude_from_ldv(&t, None),
            Err(Error::NoLdvChannel)
        ));
    }

    #[test]
    fn length_and_rate_guards() {
        assert!(matches!(
            TimeTraces::new(FS, vec![0.0; 3], vec![0.0; 3], None),
            Err(Error::InsufficientSamples { got: 3, .. })
        ));
        assert!(matches!(
            TimeTraces::new(100e3, vec![0.0; N], vec![0.0; N], None),
            Err(Error::SampleRateTooLow(_))
        ));
        assert!(TimeTraces::new(FS, vec![0.0; N], vec![0.0; N - 1], None).is_err());
    }

    #[test]
    fn source_node_conversion() {
        let t = traces(vec![5.0; N], vec![1.0; N], None).from_source_node();
        assert!(t.v_piezo().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn csv_parsing() {
        let mut text = String::from("v_piezo,v_shunt\n");
        for i in 0..100 {
            text.push_str(&format!("{},{}\n", i as f64 * 0.1, -(i as f64)));
        }
        let t = TimeTraces::read_csv(text.as_bytes(), FS, LdvKind::Displacement).unwrap();
        assert_eq!(t.len(), 100);
        assert!(t.ldv().is_none());

        let ragged = "v_piezo,v_shunt,ldv\n1,2,3\n1,2\n";
        assert!(matches!(
            TimeTraces::read_csv(ragged.as_bytes(), FS, LdvKind::Displacement),
            Err(Error::MalformedTraceFile(_))
        ));

        let short = "v_piezo,v_shunt\n1,2\n3,4\n5,6\n";
        assert!(matches!(
            TimeTraces::read_csv(short.as_bytes(), FS, LdvKind::Displacement),
            Err(Error::InsufficientSamples { got: 3, .. })
        ));

        let bad = "v_piezo,current\n1,2\n";
        assert!(TimeTraces::read_csv(bad.as_bytes(), FS, LdvKind::Displacement).is_err());
    }

    #[test]
    fn silent_trial() {
        let ldv = LdvChannel {
            kind: LdvKind::Displacement,
            samples: vec![0.0; N],
        };
        let s = summarize_trial(&traces(vec![0.0; N], vec![0.0; N], Some(ldv)), 100.0).unwrap();
        assert_eq!(s.real_power, 0.0);
        assert_eq!(s.amplitude, Some(0.0));
        assert_eq!(s.rms_current, 0.0);
    }

    #[test]
    fn averaging() {
        let a = TrialSummary {
            drive_frequency: 30e3,
            real_power: 1.0,
            amplitude: Some(2e-6),
            rms_current: 0.1,
        };
        assert_eq!(average_trials(&[a; 5]), Some(a));
        let b = TrialSummary {
            amplitude: None,
            real_power: 3.0,
            ..a
        };
        let m = average_trials(&[a, b]).unwrap();
        assert_eq!(m.real_power, 2.0);
        assert_eq!(m.amplitude, None);
        assert_eq!(average_trials(&[]), None);
    }
}
