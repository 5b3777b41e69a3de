use thiserror::Error;

/// Errors raised while building or validating domains and geometric fixtures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cap does not cut a nonempty lens inside the upper half-ball: {0}")]
    EmptyLens(String),
    #[error("inadmissible perturbation: {0}")]
    InadmissiblePerturbation(String),
    #[error("operation requires a planar (N = 2) domain, got N = {0}")]
    NotPlanar(usize),
    #[error("parallel set is empty for sigma = {sigma} (sigma exceeds the largest boundary distance {max_delta})")]
    EmptyParallelSet { sigma: f64, max_delta: f64 },
    #[error("parallel set for sigma = {sigma} has {components} components; connectedness of the parallel set is required")]
    DisconnectedParallelSet { sigma: f64, components: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("lens thickness {thickness:.4} is below 4 x h_target ({h_target}); try h_target <= {suggested:.4}")]
    TooCoarse {
        thickness: f64,
        h_target: f64,
        suggested: f64,
    },
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("ill-posed or near-degenerate discrete system: {0}")]
    Degenerate(String),
    #[error("discrete problem outside the variational regime: energy denominator {0:e} is not positive")]
    NonPositiveEnergy(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("oracle supports N = 2 (any tilt) and N = 3 (axisymmetric only); got N = {dim}, |z'| = {tilt}")]
    Unsupported { dim: usize, tilt: f64 },
    #[error("closed-form solution failed its self-check: {0}")]
    Certification(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("need at least {needed} usable records for a fit, have {have}")]
    TooFewRecords { needed: usize, have: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("invalid sweep: {0}")]
    Invalid(String),
}
