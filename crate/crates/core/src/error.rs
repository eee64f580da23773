use thiserror::Error;

use crate::algebra::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("singular Möbius map (determinant zero)")]
    SingularMap,
    #[error("rational function must be non-constant")]
    ConstantMap,
    #[error("singular Weierstrass equation (discriminant zero)")]
    SingularCurve,
    #[error("point ({x}, {y}) is not on the curve: residual {residual}")]
    NotOnCurve {
        x: Box<Rational>,
        y: Box<Rational>,
        residual: Box<Rational>,
    },
    #[error("generator {0} is not on the curve")]
    GeneratorNotOnCurve(usize),
    #[error("value set is empty")]
    EmptySet,
    #[error("additive shift must be nonzero")]
    ZeroShift,
    #[error("ratio must not be 0, 1 or -1")]
    BadRatio,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("unknown LMFDB label {0:?}")]
    UnknownLabel(String),
    #[error("LMFDB response does not match the expected schema: {0}")]
    SchemaMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
