use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate geometry: sites {0} and {1} coincide")]
    DegenerateGeometry(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("infeasible jitter: no admissible sample after {0} attempts")]
    InfeasibleJitter(usize),
    #[error("packing infeasible: rejection cap of {0} exceeded")]
    PackingInfeasible(usize),
    #[error("degenerate Matsubara point: βγ/2π = {0} is an integer")]
    DegenerateMatsubara(f64),
    #[error("kernel pole at s = {0}")]
    KernelPole(String),
    #[error("exponential fit reached max deviation {achieved:.3e} > tolerance {tol:.1e}")]
    FitFailed { achieved: f64, tol: f64 },
    #[error("no sink: r_trap = r_loss = 0 leaves the generator singular")]
    NoSink,
    #[error("near-singular generator (condition estimate {0:.2e})")]
    NearSingular(f64),
    #[error("step-size underflow at t = {t_ps} ps")]
    StepUnderflow { t_ps: f64 },
    #[error("path enumeration limited to m ≤ 10 sites (got {0}); use sampling instead")]
    TooManySites(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMatsubara(_)
                | Error::KernelPole(_)
                | Error::FitFailed { .. }
                | Error::NearSingular(_)
                | Error::StepUnderflow { .. }
        )
    }
}
