use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field with p^(e*n) = {order} elements exceeds the enumeration bound {bound}")]
    DegreeTooLarge { order: u128, bound: u64 },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("modulus is not irreducible over F_p")]
    NotIrreducible,
    #[error("{t} does not divide n = {n}")]
    NotADivisor { t: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vectors do not form an F_q-basis")]
    NotABasis,
    #[error("polynomial is not bijective")]
    NotBijective,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not in standard form")]
    NotStandard,
    #[error("polynomial is not F_(q^{t})-linearized")]
    NotSubfieldLinear { t: usize },
    #[error("polynomial is not scattered")]
    NotScattered,
    #[error("not a field: {0}")]
    NotAField(String),
    #[error("every element of the matrix field is scalar")]
    AllScalar,
    #[error("characteristic polynomial does not split: {0}")]
    NonSplitQuadratic(String),
    #[error("stabilizer has no transversal points (t = 1)")]
    NoTransversals,
    #[error("polynomial has stabilizer of order q (not in S_(n,q))")]
    NotInS,
    #[error("first coordinate map is singular after conjugation")]
    InternalNonBijective,
    #[error("exactly one of the polynomials lies in S_(n,q)")]
    MixedClass,
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("plane analysis requires q > 3 (got q = {q})")]
    SmallQ { q: u64 },
    #[error("n = 2 gives a Hall plane; plane analysis requires n > 2")]
    HallCase,
    #[error("L_f is of pseudoregulus type: the plane is an André plane")]
    PseudoregulusCase,
    #[error("consistency check failed: {0}")]
    Mismatch(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::DegreeTooLarge { .. } => "DegreeTooLarge",
            Error::InvalidField(_) => "InvalidField",
            Error::NotIrreducible => "NotIrreducible",
            Error::NotADivisor { .. } => "NotADivisor",
            Error::Parse(_) => "ParseError",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NotABasis => "NotABasis",
            Error::NotBijective => "NotBijective",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::NotStandard => "NotStandard",
            Error::NotSubfieldLinear { .. } => "NotSubfieldLinear",
            Error::NotScattered => "NotScattered",
            Error::NotAField(_) => "NotAField",
            Error::AllScalar => "AllScalar",
            Error::NonSplitQuadratic(_) => "NonSplitQuadratic",
            Error::NoTransversals => "NoTransversals",
            Error::NotInS => "NotInS",
            Error::InternalNonBijective => "InternalNonBijective",
            Error::MixedClass => "MixedClass",
            Error::OutOfScope(_) => "OutOfScope",
            Error::TooLarge(_) => "TooLarge",
            Error::BadParams(_) => "BadParams",
            Error::UnsupportedParams(_) => "UnsupportedParams",
            Error::SmallQ { .. } => "SmallQ",
            Error::HallCase => "HallCase",
            Error::PseudoregulusCase => "PseudoregulusCase",
            Error::Mismatch(_) => "Mismatch",
        }
    }

    /// Refused preconditions, as opposed to failures.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::SmallQ { .. } | Error::TooLarge(_) | Error::DegreeTooLarge { .. } | Error::HallCase
        )
    }
}
