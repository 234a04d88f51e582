use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("cocycle identity fails at (g, h, k) = ({0}, {1}, {2})")]
    InvalidCocycle(usize, usize, usize),
    #[error("objects live over different groups")]
    GroupMismatch,
    #[error("cocycle of modulus {0} cannot be brought to the base modulus")]
    ModulusNotEmbeddable(u64),
    #[error("family is not projective at (g, h) = ({0}, {1})")]
    NotProjective(usize, usize),
    #[error("scalar discrepancy at (g, h) = ({0}, {1}) is not a root of unity of the group order")]
    NotRootOfUnity(usize, usize),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("multiplicity of irrep {irrep} is {value}, not an integer")]
    NotIntegralMultiplicity { irrep: usize, value: f64 },
    #[error("inner product {0} is not an integer")]
    NotIntegral(f64),
    #[error("representations carry different cocycles")]
    CocycleMismatch,
    #[error("cohomology classes do not match: {0}")]
    ClassMismatch(String),
    #[error("covariance check failed: {0}")]
    CovarianceCheckFailed(String),
    #[error("homomorphism is not positive: {0}")]
    NotPositive(String),
    #[error("homomorphism is not contractive: {0}")]
    NotContractive(String),
    #[error("homomorphism is not compatible with the partial actions: {0}")]
    NotCompatible(String),
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    #[error("no unitary intertwiner: {0}")]
    NoUnitary(String),
    #[error("bad dimension bookkeeping at level {level}, summand {summand}")]
    BadBookkeeping { level: usize, summand: usize },
    #[error("edge class mismatch at level {level}, edge {from} -> {to}")]
    BadEdgeClass { level: usize, from: usize, to: usize },
    #[error("diagram is not stationary")]
    NotStationary,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used in CLI reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotAGroup(_) => "NotAGroup",
            Error::InvalidCocycle(..) => "InvalidCocycle",
            Error::GroupMismatch => "GroupMismatch",
            Error::ModulusNotEmbeddable(_) => "ModulusNotEmbeddable",
            Error::NotProjective(..) => "NotProjective",
            Error::NotRootOfUnity(..) => "NotRootOfUnity",
            Error::InvalidRepresentation(_) => "InvalidRepresentation",
            Error::NumericalDegeneracy(_) => "NumericalDegeneracy",
            Error::NotIntegralMultiplicity { .. } => "NotIntegralMultiplicity",
            Error::NotIntegral(_) => "NotIntegral",
            Error::CocycleMismatch => "CocycleMismatch",
            Error::ClassMismatch(_) => "ClassMismatch",
            Error::CovarianceCheckFailed(_) => "CovarianceCheckFailed",
            Error::NotPositive(_) => "NotPositive",
            Error::NotContractive(_) => "NotContractive",
            Error::NotCompatible(_) => "NotCompatible",
            Error::DimensionOverflow(_) => "DimensionOverflow",
            Error::NoUnitary(_) => "NoUnitary",
            Error::BadBookkeeping { .. } => "BadBookkeeping",
            Error::BadEdgeClass { .. } => "BadEdgeClass",
            Error::NotStationary => "NotStationary",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}
