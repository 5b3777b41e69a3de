//! Solver and verification harness for the constrained torsion problem
//!
//! ```text
//! Δu = N in Ω,   u = 0 on Σ,   u_ν = u on T,
//! ```
//!
//! posed on lens domains Ω inside the upper half of the unit ball, where
//! Σ is the free part of the boundary and T a patch of the unit sphere.
//!
//! The crate meshes planar lenses, solves the problem with quadratic finite
//! elements, evaluates the integral identities satisfied by every solution
//! (Pohozaev-type and Hessian-deficit identities) both on the discrete field
//! and by mesh-free quadrature of the exact solution, and runs perturbation
//! sweeps measuring how the distance from a spherical cap is controlled by
//! the failure of the overdetermined condition u_ν = R on Σ.

pub mod error;
pub mod fem;
pub mod geometry;
pub mod identities;
pub mod mesh;
pub mod oracle;
pub mod quadrature;
pub mod stability;

pub use error::{FemError, GeometryError, IdentityError, MeshError, OracleError, StabilityError};
pub use fem::{assemble, solve, Field, LinearSystem, P2Space};
pub use geometry::{
    boundary_polyline, make_perturbed_domain, make_symmetric_cap, BoundaryPolyline, BoundaryTag,
    DomainSpec, PerturbationProfile, Point2,
};
pub use mesh::{triangulate, Mesh};
