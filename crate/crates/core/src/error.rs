use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid knot vector: {0}")]
    KnotVector(String),

    #[error("geometry construction failed: {0}")]
    Construction(String),

    #[error("point inversion failed for ({x}, {y}, {z}): best residual {residual:.3e} m")]
    Inversion {
        x: f64,
        y: f64,
        z: f64,
        residual: f64,
    },

    #[error("non-positive Jacobian determinant {det:.3e} in element {element}")]
    Jacobian { element: usize, det: f64 },

    #[error("constitutive error: {0}")]
    Constitutive(String),

    #[error("infeasible stiffener ratios: {0}")]
    InfeasibleRatios(String),

    #[error("stiffener placement error: {0}")]
    Placement(String),

    #[error("degenerate curve parametrization: {0}")]
    DegenerateCurve(String),

    #[error("boundary conditions leave no free degrees of freedom")]
    OverConstrained,

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the pipeline stage that produced it.
    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, with stage labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::Config(_)
                | Error::Schema { .. }
                | Error::Io(_)
                | Error::KnotVector(_)
                | Error::Construction(_)
                | Error::Constitutive(_)
                | Error::InfeasibleRatios(_)
                | Error::Placement(_)
                | Error::Domain { .. }
                | Error::OverConstrained
        )
    }
}
