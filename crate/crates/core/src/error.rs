use crate::downsample::Axis;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: expected {expected} values, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("empty grid: height and width must be at least 1")]
    EmptyGrid,
    #[error("at least 2 classes are required, got {0}")]
    TooFewClasses(usize),
    #[error("class index {index} at ({row}, {col}) is out of range for {classes} classes")]
    ClassOutOfRange {
        row: usize,
        col: usize,
        index: usize,
        classes: usize,
    },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("probability vector at ({row}, {col}) leaves the simplex (deviation {deviation:e})")]
    SimplexViolation { row: usize, col: usize, deviation: f64 },
    #[error("dimension mismatch: {left_h}x{left_w} vs {right_h}x{right_w}")]
    DimensionMismatch {
        left_h: usize,
        left_w: usize,
        right_h: usize,
        right_w: usize,
    },
    #[error("class count mismatch: {0} vs {1}")]
    ClassCountMismatch(usize, usize),
    #[error("channel {0} has different dimensions than channel 0")]
    ChannelShape(usize),
    #[error("downsampling factor must be at least 1")]
    ZeroFactor,
    #[error("{axis} of {size} is not divisible by factor {factor}; pad to {suggested_pad}")]
    NotDivisible {
        axis: Axis,
        size: usize,
        factor: usize,
        suggested_pad: usize,
    },
    #[error("factor {factor} exceeds the smaller image side {min_side}")]
    FactorTooLarge { factor: usize, min_side: usize },
    #[error("pyramid level {level}: {source}")]
    PyramidLevel {
        level: u32,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("class {0} is out of range")]
    InvalidClass(usize),
    #[error("every class was excluded from evaluation")]
    AllClassesExcluded,
    #[error("threshold step must lie in (0, 1], got {0}")]
    InvalidStep(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("dice denominator is zero (both target and prediction sum to zero)")]
    DegenerateDenominator,
    #[error("loss weight {index} must be finite and non-zero")]
    InvalidWeight { index: usize },
    #[error("invalid HU window [{lo}, {hi}]: need finite lo < hi")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("expected {expected} windows, got {actual}")]
    WindowCount { expected: usize, actual: usize },
    #[error("shape does not fit inside a {height}x{width} grid")]
    OutOfBounds { height: usize, width: usize },
    #[error("shape parameter {0} is invalid")]
    InvalidShape(&'static str),
    #[error("ground truth has no foreground pixels")]
    EmptyForeground,
}
