use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two rasters that must line up have different sizes.
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Width or height is zero, or the pixel buffer length is wrong.
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Exhaustive search was asked to enumerate too many labelings.
    TooLarge {
        pixels: usize,
        limit: usize,
    },
    EmptyInput,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::InvalidDimensions { width, height, len } => {
                write!(f, "invalid raster: {width}x{height} with {len} samples")
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::TooLarge { pixels, limit } => write!(
                f,
                "instance has {pixels} pixels, exhaustive search is limited to {limit}"
            ),
            Error::EmptyInput => f.write_str("empty input"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn ensure_same_size(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
