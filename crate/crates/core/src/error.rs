use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the numerical library.
///
/// Payloads are widened to `f64` so the error type is independent of the
/// scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: pole at argument {re} + {im}i")]
    Pole {
        function: &'static str,
        re: f64,
        im: f64,
    },

    #[error("{function}: argument {arg} outside domain ({reason})")]
    Domain {
        function: &'static str,
        arg: f64,
        reason: &'static str,
    },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("cubic roots are not simple (separation {separation:e}); parameter point unsupported by the analytic route")]
    DegenerateRoots { separation: f64 },

    #[error("analytic digamma sum left an imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("finite-difference estimate did not converge: {first:e} vs {second:e} at step {step:e}")]
    StepNotConverged { first: f64, second: f64, step: f64 },

    #[error("covariance matrix is unphysical: det = {det:e} < 1/4")]
    Unphysical { det: f64 },

    #[error("interaction matrix is not positive definite (lowest eigenvalue {lowest:e})")]
    NotPositiveDefinite { lowest: f64 },

    #[error("eigenvalue {eigenvalue:e} within tolerance of bath pole {pole:e}")]
    SingularDerivative { eigenvalue: f64, pole: f64 },

    #[error("sensitivity {sensitivity:e} of {observable} exceeds the quantum Fisher information {qfi:e}")]
    BoundChain {
        observable: &'static str,
        sensitivity: f64,
        qfi: f64,
    },

    #[error("vanishing variance of the measured observable")]
    VanishingVariance,

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::Pole { .. }
        )
    }
}
