use std::path::PathBuf;

use crate::bvdfit::FitResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed material file: {0}")]
    MalformedMaterialFile(String),

    #[error("invalid property `{field}` = {value}: {reason}")]
    InvalidProperty {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("vibration amplitude is zero; psi is undefined")]
    DegenerateAmplitude,

    #[error("frequency {0} Hz is outside the contour range [16 kHz, 160 kHz]")]
    OutOfContourRange(f64),

    #[error("malformed impedance spectrum: {0}")]
    MalformedSpectrum(String),

    #[error("no resonance found in the spectrum window")]
    NoResonanceFound,

    #[error("fit did not converge after {} iterations (residual {:.3e})", best.iterations, best.residual_norm)]
    FitNotConverged { best: Box<FitResult> },

    #[error("empty sweep grid")]
    EmptyGrid,

    #[error("malformed trace file: {0}")]
    MalformedTraceFile(String),

    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: usize, needed: usize },

    #[error("sample rate {0} Hz is too low for the drive band")]
    SampleRateTooLow(f64),

    #[error("no drive tone found in the expected band (dominant component at {0:.1} Hz)")]
    DriveFrequencyNotFound(f64),

    #[error("trace has no LDV channel")]
    NoLdvChannel,
}

impl Error {
    /// True for errors caused by unreadable or malformed input, as opposed to
    /// inputs that parse but cannot be analyzed.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::MalformedMaterialFile(_)
                | Error::InvalidProperty { .. }
                | Error::UnknownMaterial(_)
                | Error::MalformedSpectrum(_)
                | Error::MalformedTraceFile(_)
                | Error::InsufficientSamples { .. }
                | Error::SampleRateTooLow(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidProperty {
            field,
            value,
            reason: "must be finite and > 0",
        })
    }
}
