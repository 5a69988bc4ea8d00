use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A contact-rate law returned a non-finite value.
    #[error("contact-rate law `{law}` produced a non-finite value for {map}({input})")]
    Evaluation {
        law: String,
        map: &'static str,
        input: f64,
    },

    #[error("log-infectives p = {0} is outside the representable range of exp(p)")]
    Range(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside the domain of validity: {0}")]
    Domain(String),

    /// Assumption A4 fails: g(gamma / c_s) is not interior to the image of h,
    /// so no endemic steady state exists.
    #[error("no endemic steady state: g(gamma/c_s) = {value} is not interior to image(h) = ({lower}, {upper})")]
    NoEndemicState { value: f64, lower: f64, upper: f64 },

    #[error("integration diverged at t = {t} after {steps} steps")]
    Divergence {
        t: f64,
        steps: usize,
        state: Vec<f64>,
    },

    #[error("right-hand side returned a non-finite value at t = {t}")]
    NonFiniteRhs { t: f64 },

    #[error("{path}: line {line}: {message}")]
    Data {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{0}: series is empty")]
    EmptySeries(String),

    #[error("sensitivity matrix has numerical rank {rank}, expected {expected}")]
    NotIdentifiable { rank: usize, expected: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from the numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Evaluation { .. }
                | Error::Range(_)
                | Error::Divergence { .. }
                | Error::NonFiniteRhs { .. }
                | Error::NotIdentifiable { .. }
                | Error::Fit(_)
        )
    }
}
