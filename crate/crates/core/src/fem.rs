//! Quadratic Lagrange elements for Δu = N with u = 0 on Σ and u_ν = u on T.
//!
//! Weak form: ∫_Ω ∇u·∇v − ∫_T u v = −N ∫_Ω v for all v vanishing on Σ.
//! The Steklov term can make the matrix indefinite, so the reduced system
//! is solved with a sparse symmetric-indefinite (Bunch–Kaufman LBLᵀ)
//! factorization.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, SymmetricOrdering,
};
use faer::sparse::linalg::SupernodalThreshold;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Par, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FemError;
use crate::geometry::{dot, lerp, BoundaryTag, Point2};
use crate::mesh::Mesh;
use crate::quadrature::compensated_sum;

/// Space dimension of the planar problem; the source term is Δu = N.
pub const PLANAR_N: f64 = 2.0;

/// Relative residual a solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Nodal sign violations above this value are reported.
pub const SIGN_TOLERANCE: f64 = 1e-8;

/// Continuous P2 space on a mesh.  Degrees of freedom are the mesh
/// vertices followed by the edge midpoints; local order per triangle is
/// `[v0, v1, v2, m01, m12, m20]`.
#[derive(Debug, Clone)]
pub struct P2Space {
    pub mesh: Arc<Mesh>,
    pub edges: Vec<[usize; 2]>,
    pub tri_dofs: Vec<[usize; 6]>,
    /// Gradients of the barycentric coordinates on each triangle.
    pub grad_lambda: Vec<[Point2; 3]>,
    /// Nodes constrained to zero: all nodes of SIGMA edges and the corners.
    pub dirichlet: Vec<bool>,
    /// Dof index of the midpoint of each boundary edge (same order as
    /// `mesh.boundary_edges`).
    pub boundary_mid: Vec<usize>,
}

impl P2Space {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let nv = mesh.vertices.len();
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut tri_dofs = Vec::with_capacity(mesh.triangles.len());
        let mut grad_lambda = Vec::with_capacity(mesh.triangles.len());
        for &[a, b, c] in &mesh.triangles {
            let mut mid = |p: usize, q: usize| {
                let key = (p.min(q), p.max(q));
                nv + *edge_id.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                })
            };
            let (m01, m12, m20) = (mid(a, b), mid(b, c), mid(c, a));
            tri_dofs.push([a, b, c, m01, m12, m20]);
            let p = [mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]];
            let two_area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
            let g = |i: usize| {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                [(p[j][1] - p[k][1]) / two_area, (p[k][0] - p[j][0]) / two_area]
            };
            grad_lambda.push([g(0), g(1), g(2)]);
        }
        let mut dirichlet = vec![false; nv + edges.len()];
        let mut boundary_mid = Vec::with_capacity(mesh.boundary_edges.len());
        for e in &mesh.boundary_edges {
            let [p, q] = e.nodes;
            let m = nv + edge_id[&(p.min(q), p.max(q))];
            boundary_mid.push(m);
            if e.tag == BoundaryTag::Sigma {
                dirichlet[p] = true;
                dirichlet[q] = true;
                dirichlet[m] = true;
            }
        }
        for &v in &mesh.lambda_vertices {
            dirichlet[v] = true;
        }
        P2Space {
            mesh,
            edges,
            tri_dofs,
            grad_lambda,
            dirichlet,
            boundary_mid,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.vertices.len() + self.edges.len()
    }

    /// Position of a dof (edge midpoints lie on the straight chord).
    pub fn node_position(&self, dof: usize) -> Point2 {
        let nv = self.mesh.vertices.len();
        if dof < nv {
            self.mesh.vertices[dof]
        } else {
            let [a, b] = self.edges[dof - nv];
            lerp(self.mesh.vertices[a], self.mesh.vertices[b], 0.5)
        }
    }

    /// Barycentric coordinates of `x` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, x: Point2) -> [f64; 3] {
        let tri = self.mesh.triangles[t];
        let g = self.grad_lambda[t];
        let mut l = [0.0; 3];
        for i in 0..3 {
            let base = self.mesh.vertices[tri[(i + 1) % 3]];
            l[i] = dot(g[i], [x[0] - base[0], x[1] - base[1]]);
        }
        l
    }
}

/// Values of the six local basis functions.
pub fn basis_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Gradients of the six local basis functions.
pub fn basis_gradients(l: [f64; 3], g: &[Point2; 3]) -> [Point2; 6] {
    let comb = |a: f64, u: Point2, b: f64, v: Point2| [a * u[0] + b * v[0], a * u[1] + b * v[1]];
    [
        comb(4.0 * l[0] - 1.0, g[0], 0.0, g[0]),
        comb(4.0 * l[1] - 1.0, g[1], 0.0, g[1]),
        comb(4.0 * l[2] - 1.0, g[2], 0.0, g[2]),
        comb(4.0 * l[0], g[1], 4.0 * l[1], g[0]),
        comb(4.0 * l[1], g[2], 4.0 * l[2], g[1]),
        comb(4.0 * l[2], g[0], 4.0 * l[0], g[2]),
    ]
}

/// Constant Hessians of the six local basis functions.
pub fn basis_hessians(g: &[Point2; 3]) -> [[[f64; 2]; 2]; 6] {
    // 4 (u vᵀ + v uᵀ) / s, with s = 2 for the vertex functions (u = v)
    let sym = |u: Point2, v: Point2, s: f64| {
        let c = 4.0 / s;
        [
            [c * 2.0 * u[0] * v[0], c * (u[0] * v[1] + v[0] * u[1])],
            [c * (u[1] * v[0] + v[1] * u[0]), c * 2.0 * u[1] * v[1]],
        ]
    };
    [
        sym(g[0], g[0], 2.0),
        sym(g[1], g[1], 2.0),
        sym(g[2], g[2], 2.0),
        sym(g[0], g[1], 1.0),
        sym(g[1], g[2], 1.0),
        sym(g[2], g[0], 1.0),
    ]
}

/// Element stiffness matrix ∫ ∇φ_a·∇φ_b (exact, degree-4 rule).
pub fn element_stiffness(space: &P2Space, t: usize) -> [[f64; 6]; 6] {
    let g = &space.grad_lambda[t];
    let mut k = [[0.0; 6]; 6];
    for q in space.mesh.triangle_quadrature(t) {
        let grads = basis_gradients(q.bary, g);
        for a in 0..6 {
            for b in 0..6 {
                k[a][b] += q.weight * dot(grads[a], grads[b]);
            }
        }
    }
    k
}

/// Element load ∫ φ_a.
pub fn element_load(space: &P2Space, t: usize) -> [f64; 6] {
    let mut f = [0.0; 6];
    for q in space.mesh.triangle_quadrature(t) {
        let v = basis_values(q.bary);
        for a in 0..6 {
            f[a] += q.weight * v[a];
        }
    }
    f
}

/// Mass matrix of the quadratic trace on an edge of length `len`, local
/// order `[first node, midpoint, second node]`.
pub fn edge_mass(len: f64) -> [[f64; 3]; 3] {
    let s = len / 30.0;
    [
        [4.0 * s, 2.0 * s, -s],
        [2.0 * s, 16.0 * s, 2.0 * s],
        [-s, 2.0 * s, 4.0 * s],
    ]
}

/// Assembly switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    /// Include the boundary term −∫_T u v.
    pub steklov: bool,
    /// Constant N of the source term.
    pub source: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            steklov: true,
            source: PLANAR_N,
        }
    }
}

/// Reduced system over the free (non-Dirichlet) dofs.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub space: Arc<P2Space>,
    /// Full symmetric matrix on the free dofs.
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: Vec<f64>,
    /// Global dof of each free unknown.
    pub free: Vec<usize>,
    pub options: AssemblyOptions,
}

/// Assembles the problem on `mesh` with the default options.
pub fn assemble(mesh: Arc<Mesh>) -> LinearSystem {
    assemble_with(mesh, AssemblyOptions::default())
}

pub fn assemble_with(mesh: Arc<Mesh>, options: AssemblyOptions) -> LinearSystem {
    let space = Arc::new(P2Space::new(mesh));
    assemble_space(space, options)
}

/// Global matrix entries (row, col, value) and load vector, before
/// elimination, in deterministic order.
fn global_entries(space: &P2Space, options: AssemblyOptions) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
    let per_element: Vec<([[f64; 6]; 6], [f64; 6])> = (0..space.tri_dofs.len())
        .into_par_iter()
        .map(|t| (element_stiffness(space, t), element_load(space, t)))
        .collect();
    let mut entries = Vec::with_capacity(36 * per_element.len());
    let mut load = vec![0.0; space.n_dofs()];
    let mut load_parts: Vec<Vec<f64>> = vec![Vec::new(); space.n_dofs()];
    for (t, (k, f)) in per_element.iter().enumerate() {
        let dofs = space.tri_dofs[t];
        for a in 0..6 {
            load_parts[dofs[a]].push(f[a]);
            for b in 0..6 {
                entries.push((dofs[a], dofs[b], k[a][b]));
            }
        }
    }
    for (i, parts) in load_parts.into_iter().enumerate() {
        load[i] = compensated_sum(parts);
    }
    if options.steklov {
        let mesh = &space.mesh;
        for (ei, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != BoundaryTag::TArc {
                continue;
            }
            let [p, q] = e.nodes;
            let local = [p, space.boundary_mid[ei], q];
            let m = edge_mass(crate::geometry::dist(mesh.vertices[p], mesh.vertices[q]));
            for a in 0..3 {
                for b in 0..3 {
                    entries.push((local[a], local[b], -m[a][b]));
                }
            }
        }
    }
    (entries, load)
}

pub fn assemble_space(space: Arc<P2Space>, options: AssemblyOptions) -> LinearSystem {
    let (entries, load) = global_entries(&space, options);
    let mut reduced = vec![usize::MAX; space.n_dofs()];
    let mut free = Vec::new();
    for (d, &fixed) in space.dirichlet.iter().enumerate() {
        if !fixed {
            reduced[d] = free.len();
            free.push(d);
        }
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = entries
        .into_iter()
        .filter(|&(i, j, _)| reduced[i] != usize::MAX && reduced[j] != usize::MAX)
        .map(|(i, j, v)| Triplet::new(reduced[i], reduced[j], v))
        .collect();
    let n = free.len();
    let matrix = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .expect("assembled indices are in range");
    let rhs = free.iter().map(|&d| -options.source * load[d]).collect();
    LinearSystem {
        space,
        matrix,
        rhs,
        free,
        options,
    }
}

impl LinearSystem {
    /// Largest |A_ij − A_ji| relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let a = self.matrix.to_dense();
        let n = a.nrows();
        let mut scale: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                scale = scale.max(a[(i, j)].abs());
                defect = defect.max((a[(i, j)] - a[(j, i)]).abs());
            }
        }
        if scale > 0.0 {
            defect / scale
        } else {
            0.0
        }
    }

    /// y = A x on the free dofs.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let a = self.matrix.as_ref();
        let mut y = vec![0.0; x.len()];
        for j in 0..a.ncols() {
            let rows = a.row_idx_of_col_raw(j);
            let vals = a.val_of_col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * x[j];
            }
        }
        y
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the reduced system with a sparse LBLᵀ factorization and returns
/// the field; fails if the relative residual exceeds [`RESIDUAL_TOLERANCE`].
pub fn solve(sys: &LinearSystem) -> Result<Field, FemError> {
    let n = sys.free.len();
    let mut coeffs = vec![0.0; sys.space.n_dofs()];
    if n == 0 {
        return Ok(Field::from_coeffs(sys.space.clone(), coeffs).with_residual(0.0));
    }
    let lower_triplets: Vec<Triplet<usize, usize, f64>> = {
        let a = sys.matrix.as_ref();
        let mut t = Vec::new();
        for j in 0..n {
            for (&i, &v) in a.row_idx_of_col_raw(j).iter().zip(a.val_of_col(j)) {
                if i >= j {
                    t.push(Triplet::new(i, j, v));
                }
            }
        }
        t
    };
    let lower = SparseColMat::try_new_from_triplets(n, n, &lower_triplets)
        .map_err(|e| FemError::Degenerate(format!("matrix construction failed: {e:?}")))?;
    let symbolic = factorize_symbolic_cholesky(
        lower.symbolic(),
        Side::Lower,
        SymmetricOrdering::Amd,
        CholeskySymbolicParams {
            supernodal_flop_ratio_threshold: SupernodalThreshold::FORCE_SUPERNODAL,
            ..Default::default()
        },
    )
    .map_err(|e| FemError::Degenerate(format!("symbolic factorization failed: {e:?}")))?;
    let mut l_values = vec![0.0f64; symbolic.len_val()];
    let mut subdiag = vec![0.0f64; n];
    let mut fwd = vec![0usize; n];
    let mut bwd = vec![0usize; n];
    let par = Par::Seq;
    let mut factor_buf =
        MemBuffer::new(symbolic.factorize_numeric_intranode_lblt_scratch::<f64>(par, Default::default()));
    let lblt = symbolic.factorize_numeric_intranode_lblt(
        &mut l_values,
        &mut subdiag,
        &mut fwd,
        &mut bwd,
        lower.as_ref(),
        Side::Lower,
        par,
        MemStack::new(&mut factor_buf),
        Default::default(),
    );
    let mut x = Mat::<f64>::from_fn(n, 1, |i, _| sys.rhs[i]);
    let mut solve_buf = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, par));
    lblt.solve_in_place_with_conj(Conj::No, x.as_mut(), par, MemStack::new(&mut solve_buf));
    let sol: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(FemError::Degenerate("factorization produced non-finite values".into()));
    }
    let ax = sys.apply(&sol);
    let r: Vec<f64> = ax.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
    let bnorm = l2(&sys.rhs);
    let residual = if bnorm > 0.0 { l2(&r) / bnorm } else { l2(&r) };
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(FemError::Degenerate(format!(
            "relative residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    for (k, &d) in sys.free.iter().enumerate() {
        coeffs[d] = sol[k];
    }
    Ok(Field::from_coeffs(sys.space.clone(), coeffs).with_residual(residual))
}

/// Meshes nothing, assembles and solves on a ready mesh.
pub fn solve_on(mesh: Arc<Mesh>) -> Result<Field, FemError> {
    solve(&assemble(mesh))
}

/// Boundary flux sample at an edge quadrature point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxSample {
    pub tag: BoundaryTag,
    pub edge: usize,
    pub x: Point2,
    /// Quadrature weight (includes the edge length).
    pub weight: f64,
    pub normal: Point2,
    pub u_nu: f64,
    pub u: f64,
}

/// Sign diagnostics of a solved field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignDiagnostics {
    pub max_nodal_value: f64,
    pub min_nodal_value: f64,
    /// Number of nodes with u_h > [`SIGN_TOLERANCE`].
    pub positive_nodes: usize,
}

/// P2 coefficient vector with cached per-element Hessians and gradient bound.
#[derive(Debug, Clone)]
pub struct Field {
    pub space: Arc<P2Space>,
    pub coeffs: Vec<f64>,
    pub hessians: Vec<[[f64; 2]; 2]>,
    pub lipschitz: f64,
    pub residual: f64,
    pub sign: SignDiagnostics,
}

impl Field {
    pub fn from_coeffs(space: Arc<P2Space>, coeffs: Vec<f64>) -> Field {
        let nt = space.tri_dofs.len();
        let hessians: Vec<[[f64; 2]; 2]> = (0..nt)
            .map(|t| {
                let hs = basis_hessians(&space.grad_lambda[t]);
                let dofs = space.tri_dofs[t];
                let mut h = [[0.0; 2]; 2];
                for a in 0..6 {
                    for i in 0..2 {
                        for j in 0..2 {
                            h[i][j] += coeffs[dofs[a]] * hs[a][i][j];
                        }
                    }
                }
                h
            })
            .collect();
        let mut field = Field {
            space,
            coeffs,
            hessians,
            lipschitz: 0.0,
            residual: 0.0,
            sign: SignDiagnostics {
                max_nodal_value: 0.0,
                min_nodal_value: 0.0,
                positive_nodes: 0,
            },
        };
        // |∇u_h| is convex on each triangle, so its maximum sits at a vertex
        field.lipschitz = (0..nt)
            .into_par_iter()
            .map(|t| {
                let mut m: f64 = 0.0;
                for bary in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
                    let g = field.gradient(t, bary);
                    m = m.max(g[0].hypot(g[1]));
                }
                m
            })
            .reduce(|| 0.0, f64::max);
        let c = &field.coeffs;
        field.sign = SignDiagnostics {
            max_nodal_value: c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_nodal_value: c.iter().copied().fold(f64::INFINITY, f64::min),
            positive_nodes: c.iter().filter(|&&v| v > SIGN_TOLERANCE).count(),
        };
        field
    }

    fn with_residual(mut self, residual: f64) -> Field {
        self.residual = residual;
        self
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn(Point2) -> f64>(space: Arc<P2Space>, f: F) -> Field {
        let coeffs = (0..space.n_dofs()).map(|d| f(space.node_position(d))).collect();
        Field::from_coeffs(space, coeffs)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.space.mesh
    }

    /// The field multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Field {
        Field::from_coeffs(self.space.clone(), self.coeffs.iter().map(|c| s * c).collect())
            .with_residual(self.residual)
    }

    pub fn value(&self, t: usize, bary: [f64; 3]) -> f64 {
        let dofs = self.space.tri_dofs[t];
        let v = basis_values(bary);
        (0..6).map(|a| self.coeffs[dofs[a]] * v[a]).sum()
    }

    pub fn gradient(&self, t: usize, bary: [f64; 3]) -> Point2 {
        let dofs = self.space.tri_dofs[t];
        let g = basis_gradients(bary, &self.space.grad_lambda[t]);
        let mut out = [0.0; 2];
        for a in 0..6 {
            out[0] += self.coeffs[dofs[a]] * g[a][0];
            out[1] += self.coeffs[dofs[a]] * g[a][1];
        }
        out
    }

    /// Constant Hessian of the quadratic on triangle `t`.
    pub fn hessian(&self, t: usize) -> [[f64; 2]; 2] {
        self.hessians[t]
    }

    /// Per-element Hessians.
    pub fn hessian_per_element(&self) -> &[[[f64; 2]; 2]] {
        &self.hessians
    }

    /// Triangle containing `x` and the barycentric coordinates of `x` in it.
    pub fn locate(&self, x: Point2) -> Option<(usize, [f64; 3])> {
        let tol = -1e-12;
        (0..self.space.tri_dofs.len()).find_map(|t| {
            let l = self.space.barycentric(t, x);
            (l.iter().all(|&v| v >= tol)).then_some((t, l))
        })
    }

    /// u_h(x), or `None` outside the mesh.
    pub fn eval(&self, x: Point2) -> Option<f64> {
        self.locate(x).map(|(t, l)| self.value(t, l))
    }

    /// Samples of u_ν = ⟨∇u_h, ν⟩ from the owning triangle at the 3-point
    /// Gauss points of every edge carrying `tag`.
    pub fn normal_derivative_on(&self, tag: BoundaryTag) -> Vec<FluxSample> {
        let mesh = self.mesh();
        let mut out = Vec::new();
        for (ei, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != tag {
                continue;
            }
            for q in mesh.edge_quadrature(ei) {
                let bary = self.space.barycentric(e.triangle, q.x);
                let g = self.gradient(e.triangle, bary);
                out.push(FluxSample {
                    tag,
                    edge: ei,
                    x: q.x,
                    weight: q.weight,
                    normal: q.normal,
                    u_nu: dot(g, q.normal),
                    u: self.value(e.triangle, bary),
                });
            }
        }
        out
    }

    /// Max of |∇u_h| over the mesh.
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    /// ∫_Ω f(x, u_h, ∇u_h) dx.
    pub fn integrate<F: Fn(Point2, f64, Point2) -> f64 + Sync>(&self, f: F) -> f64 {
        let mesh = self.mesh();
        let per: Vec<f64> = (0..mesh.triangles.len())
            .into_par_iter()
            .map(|t| {
                compensated_sum(mesh.triangle_quadrature(t).iter().map(|q| {
                    q.weight * f(q.x, self.value(t, q.bary), self.gradient(t, q.bary))
                }))
            })
            .collect();
        compensated_sum(per)
    }

    /// ∫_T u_h² dS.
    pub fn steklov_mass(&self) -> f64 {
        compensated_sum(
            self.normal_derivative_on(BoundaryTag::TArc)
                .iter()
                .map(|s| s.weight * s.u * s.u),
        )
    }

    /// Discrete constrained torsion (∫u_h)² / (∫|∇u_h|² − ∫_T u_h²).
    pub fn torsion_ratio(&self) -> Result<f64, FemError> {
        let num = self.integrate(|_, u, _| u);
        let den = self.integrate(|_, _, g| dot(g, g)) - self.steklov_mass();
        if !(den > 0.0) {
            return Err(FemError::NonPositiveEnergy(den));
        }
        Ok(num * num / den)
    }

    /// CSV of nodal values: `id,x1,x2,u`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("id,x1,x2,u\n");
        for d in 0..self.space.n_dofs() {
            let x = self.space.node_position(d);
            let _ = writeln!(s, "{d},{:.17e},{:.17e},{:.17e}", x[0], x[1], self.coeffs[d]);
        }
        s
    }

    /// CSV of boundary flux samples: `tag,x1,x2,u_nu`.
    pub fn flux_csv(&self) -> String {
        let mut s = String::from("tag,x1,x2,u_nu\n");
        for tag in [BoundaryTag::Sigma, BoundaryTag::TArc] {
            for f in self.normal_derivative_on(tag) {
                let _ = writeln!(s, "{},{:.17e},{:.17e},{:.17e}", tag.as_str(), f.x[0], f.x[1], f.u_nu);
            }
        }
        s
    }
}
