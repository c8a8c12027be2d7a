use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field of order {p}^{k} exceeds the 2^16 ceiling")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("q must be a prime power, got {0}")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomials belong to different fields")]
    FieldMismatch,
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("bad interval: need 0 <= h < deg A (h = {h}, deg A = {deg})")]
    BadInterval { h: u32, deg: i64 },
    #[error("coefficient {value} is not an element of F_{q}")]
    BadCoefficient { value: u64, q: u32 },
    #[error("cannot parse polynomial literal {0:?}")]
    BadLiteral(String),
    #[error("table needs {needed} bytes, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("shift must be nonzero")]
    ZeroShift,
    #[error("degree {deg} is too large (must be < {bound})")]
    DegreeTooLarge { deg: i64, bound: u32 },
    #[error("modulus degree {deg} out of range for n = {n}")]
    BadModulusDegree { deg: i64, n: u32 },
    #[error("residue is not coprime to the modulus")]
    NotCoprime,
    #[error("bad shifts: {0}")]
    BadShifts(String),
    #[error("all exponents are even")]
    AllEven,
    #[error("table is for {found}, operation needs {expected}")]
    WrongFunction { expected: &'static str, found: &'static str },
    #[error("table is for degree {found}, operation needs degree {expected}")]
    WrongDegree { expected: u32, found: u32 },
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("too few points for a fit: {usable} usable, {zeros} exactly zero")]
    TooFewPoints { usable: usize, zeros: usize },
    #[error("cache file: {0}")]
    BadCache(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// The variant name, e.g. `"NotCoprime"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPrime(..) => "NonPrime",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::ZeroDegree => "ZeroDegree",
            Error::NotPrimePower(..) => "NotPrimePower",
            Error::DivisionByZero => "DivisionByZero",
            Error::FieldMismatch => "FieldMismatch",
            Error::BothZero => "BothZero",
            Error::NotMonic => "NotMonic",
            Error::BadInterval { .. } => "BadInterval",
            Error::BadCoefficient { .. } => "BadCoefficient",
            Error::BadLiteral(..) => "BadLiteral",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::ZeroShift => "ZeroShift",
            Error::DegreeTooLarge { .. } => "DegreeTooLarge",
            Error::BadModulusDegree { .. } => "BadModulusDegree",
            Error::NotCoprime => "NotCoprime",
            Error::BadShifts(..) => "BadShifts",
            Error::AllEven => "AllEven",
            Error::WrongFunction { .. } => "WrongFunction",
            Error::WrongDegree { .. } => "WrongDegree",
            Error::ConstraintViolation(..) => "ConstraintViolation",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::BadCache(..) => "BadCache",
            Error::Io(..) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
