use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid modulus: period parameter must be positive, got {0}")]
    InvalidModulus(f64),

    #[error("point outside the evaluation strip: |Im z| = {im} exceeds {bound}")]
    OutsideStrip { im: f64, bound: f64 },

    #[error("product truncation exceeded {max_terms} terms before reaching the tail bound")]
    TruncationExceeded { max_terms: usize },

    #[error("coefficient pole at z = {re}{im:+}i")]
    CoefficientPole { re: f64, im: f64 },

    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported gauge: {0}")]
    UnsupportedGauge(String),

    #[error("telescoped gauge factor vanishes at a shifted point")]
    PoleAtShift,

    #[error("mu makes the U-term denominator vanish")]
    MuDenominatorZero,

    #[error("stage {stage} expects {expected}, got {got}")]
    StageArityMismatch {
        stage: u8,
        expected: String,
        got: String,
    },

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("counterterm pole: a_minus = 0 makes (1 - e^(pi a_minus))^2 vanish")]
    CounterTermPole,

    #[error("invalid scales: {0}")]
    InvalidScales(String),

    #[error("no polynomial sector: {0}")]
    NoPolynomialSector(String),

    #[error("x = {re}{im:+}i is a singular point")]
    SingularPoint { re: f64, im: f64 },

    #[error("confluent singularities: t1 = t2")]
    ConfluentSingularities,

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pole_at(z: num_complex::Complex64) -> Self {
        Error::CoefficientPole { re: z.re, im: z.im }
    }
}
