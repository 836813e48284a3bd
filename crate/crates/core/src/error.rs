use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("characteristic {0} is not a prime below 2^31")]
    InvalidCharacteristic(u64),
    #[error("operands belong to different rings or modules")]
    RingMismatch,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("degree of the zero vector is undefined")]
    ZeroVector,
    #[error("input is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("Groebner basis was computed without tracking its division history")]
    Untracked,
    #[error("Groebner basis was computed from a different generator list")]
    GeneratorMismatch,
    #[error("Betti numbers need a minimal resolution")]
    NotMinimal,
    #[error("this summary needs a Z-graded standard ring; use the bigraded summary instead")]
    BigradedTable,
    #[error("operation needs a standard Z-graded ring")]
    NotStandardGraded,
    #[error("ideal is not generated in a single degree")]
    NotEquigenerated,
    #[error("annihilator is not generated by variables")]
    NotMonomialPrime,
    #[error("module is zero")]
    ZeroModule,
    #[error("resolution did not terminate within {0} steps")]
    ResolutionTooLong(usize),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
