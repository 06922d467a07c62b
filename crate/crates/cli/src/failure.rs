use qquasi::linrep::LinRepError;
use qquasi::stats::StatsError;

pub const PRECONDITION: u8 = 3;
pub const MATH: u8 = 4;

/// A failed command: the exit code, the error, and possibly a JSON document
/// that is still worth printing (a failing verdict, a classification that
/// found no parameter).
#[derive(Debug)]
pub struct Failure {
    pub output: Option<String>,
    pub error: anyhow::Error,
    pub code: u8,
}

impl Failure {
    pub fn precondition(error: impl Into<anyhow::Error>) -> Self {
        Failure { output: None, error: error.into(), code: PRECONDITION }
    }

    pub fn math(error: impl Into<anyhow::Error>) -> Self {
        Failure { output: None, error: error.into(), code: MATH }
    }

    pub fn with_output(mut self, output: String) -> Self {
        self.output = Some(output);
        self
    }
}

pub trait OrFailure<T> {
    fn or_precondition(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrFailure<T> for Result<T, E> {
    fn or_precondition(self) -> Result<T, Failure> {
        self.map_err(Failure::precondition)
    }
}

impl From<LinRepError> for Failure {
    fn from(e: LinRepError) -> Self {
        match e {
            LinRepError::NotZeroInsensitive
            | LinRepError::NotMinimal { .. }
            | LinRepError::NoFixpoint(_)
            | LinRepError::MinimizationLostZeroInsensitivity => Failure::math(e),
            LinRepError::InvalidBase(_)
            | LinRepError::MatrixCount { .. }
            | LinRepError::Dimension(_)
            | LinRepError::Format(_) => Failure::precondition(e),
        }
    }
}

impl From<StatsError> for Failure {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::LinRep(inner) => inner.into(),
            StatsError::SpectralObstruction | StatsError::Pole(_) | StatsError::DivergenceRisk { .. } => {
                Failure::math(e)
            }
            _ => Failure::precondition(e),
        }
    }
}
