//! Triangulations of planar lens domains: constrained Delaunay meshing of
//! the tagged boundary polyline, red refinement with reprojection of new
//! boundary vertices onto the true curves, and volume/boundary quadrature.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, RefinementParameters, Triangulation};

use crate::error::MeshError;
use crate::geometry::{
    boundary_polyline_counts, dist, lerp, point_segment_distance, sub, BoundaryCurves,
    BoundaryPolyline, BoundaryTag, DomainSpec, Point2,
};
use crate::quadrature::{compensated_sum, gauss3, TRIANGLE_DEG4};

/// Minimum interior angle requested from the mesher, in degrees.
const MESHER_ANGLE_LIMIT_DEG: f64 = 25.0;

/// Boundary edge, oriented counterclockwise around the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
    /// Triangle owning the edge.
    pub triangle: usize,
}

/// Conforming, positively oriented triangulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub lambda_vertices: Vec<usize>,
    /// Distance of each vertex to the mesh boundary.
    pub delta: Vec<f64>,
    /// Largest triangle diameter.
    pub h: f64,
    /// Smallest interior angle, in degrees.
    pub min_angle: f64,
}

/// Quadrature point of a triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleQuadPoint {
    pub x: Point2,
    pub bary: [f64; 3],
    pub weight: f64,
}

/// Quadrature point of a boundary edge; `t` runs from the first node to the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeQuadPoint {
    pub x: Point2,
    pub t: f64,
    pub weight: f64,
    pub normal: Point2,
}

/// Meshes a planar lens with boundary chords no longer than `h_target`.
pub fn triangulate(spec: &DomainSpec, h_target: f64) -> Result<Mesh, MeshError> {
    if spec.dimension != 2 {
        return Err(crate::error::GeometryError::NotPlanar(spec.dimension).into());
    }
    if !(h_target > 0.0) || !h_target.is_finite() {
        return Err(MeshError::Invalid(format!("h_target must be positive, got {h_target}")));
    }
    spec.validate()?;
    let thickness = spec.thickness();
    if thickness < 4.0 * h_target {
        return Err(MeshError::TooCoarse {
            thickness,
            h_target,
            suggested: thickness / 4.0,
        });
    }
    let ns = (spec.sigma_length() / h_target).ceil().max(2.0) as usize;
    let nt = (spec.t_length() / h_target).ceil().max(2.0) as usize;
    let poly = boundary_polyline_counts(spec, ns, nt)?;
    triangulate_polyline(&poly, h_target, spec)
}

/// Quality mesh of the interior of a closed polyline.  Vertices inserted on
/// the boundary by the mesher are moved onto `curves`.
pub fn triangulate_polyline(
    poly: &BoundaryPolyline,
    h_target: f64,
    curves: &dyn BoundaryCurves,
) -> Result<Mesh, MeshError> {
    let n = poly.len();
    if n < 3 {
        return Err(MeshError::Invalid("polyline needs at least 3 vertices".into()));
    }
    if poly.signed_area() <= 0.0 {
        return Err(MeshError::Invalid("polyline must be positively oriented".into()));
    }
    let pts: Vec<spade::Point2<f64>> = poly
        .vertices
        .iter()
        .map(|v| spade::Point2::new(v[0], v[1]))
        .collect();
    let edges: Vec<[usize; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
    let mut cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::bulk_load_cdt(pts, edges)
        .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?;
    if cdt.num_vertices() != n {
        return Err(MeshError::Triangulation("polyline has duplicate vertices".into()));
    }
    let max_area = 3f64.sqrt() / 4.0 * h_target * h_target;
    let budget = ((poly.signed_area() / max_area) * 8.0) as usize + 10 * n + 1000;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(MESHER_ANGLE_LIMIT_DEG))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(budget)
        .exclude_outer_faces(true);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(MeshError::Triangulation("refinement did not complete".into()));
    }
    let excluded: std::collections::HashSet<_> = result.excluded_faces.into_iter().collect();
    let mut vertices = vec![[0.0; 2]; cdt.num_vertices()];
    for v in cdt.vertices() {
        let p = v.position();
        vertices[v.fix().index()] = [p.x, p.y];
    }
    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        if excluded.contains(&f.fix()) {
            continue;
        }
        let [a, b, c] = f.vertices().map(|v| v.fix().index());
        let tri = if signed_area(&vertices, [a, b, c]) > 0.0 { [a, b, c] } else { [a, c, b] };
        triangles.push(tri);
    }
    // keep only vertices used by inner triangles (outer refinement may add some)
    let mut used = vec![false; vertices.len()];
    for t in &triangles {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        if used[i] {
            remap[i] = kept.len();
            kept.push(*v);
        }
    }
    if (0..n).any(|i| !used[i]) {
        return Err(MeshError::Triangulation("a polyline vertex is not part of the mesh".into()));
    }
    let mut vertices = kept;
    for t in triangles.iter_mut() {
        for v in t.iter_mut() {
            *v = remap[*v];
        }
    }
    let lambda_vertices: Vec<usize> = poly.lambda.iter().map(|&i| remap[i]).collect();

    let boundary = boundary_edge_list(&triangles)?;
    let mut boundary_edges = Vec::with_capacity(boundary.len());
    let mut vertex_tag: HashMap<usize, BoundaryTag> = HashMap::new();
    for (nodes, triangle) in boundary {
        let mid = lerp(vertices[nodes[0]], vertices[nodes[1]], 0.5);
        let seg = (0..n)
            .min_by(|&i, &j| {
                let (a, b) = poly.segment(i);
                let (c, d) = poly.segment(j);
                point_segment_distance(mid, a, b).total_cmp(&point_segment_distance(mid, c, d))
            })
            .unwrap_or(0);
        let tag = poly.tags[seg];
        for &v in &nodes {
            vertex_tag.insert(v, tag);
        }
        boundary_edges.push(BoundaryEdge { nodes, tag, triangle });
    }
    // boundary vertices added by the mesher sit on chords; move them to the curve
    let original = n;
    for (&v, &tag) in &vertex_tag {
        if v >= original {
            vertices[v] = curves.project(tag, vertices[v]);
        }
    }
    Mesh::assemble(vertices, triangles, boundary_edges, lambda_vertices)
}

fn signed_area(v: &[Point2], t: [usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Directed boundary edges (in triangle orientation) with their owners,
/// in order of first appearance.
fn boundary_edge_list(triangles: &[[usize; 3]]) -> Result<Vec<([usize; 2], usize)>, MeshError> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2], usize)> = HashMap::new();
    let mut order = Vec::new();
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = edge_key(a, b);
            let e = count.entry(key).or_insert_with(|| {
                order.push(key);
                (0, [a, b], ti)
            });
            e.0 += 1;
        }
    }
    let mut out = Vec::new();
    for key in order {
        let (c, nodes, ti) = count[&key];
        match c {
            1 => out.push((nodes, ti)),
            2 => {}
            _ => {
                return Err(MeshError::Invalid(format!(
                    "edge {key:?} is shared by {c} triangles"
                )))
            }
        }
    }
    Ok(out)
}

fn triangle_angles(v: &[Point2], t: [usize; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        let p = v[t[k]];
        let u = sub(v[t[(k + 1) % 3]], p);
        let w = sub(v[t[(k + 2) % 3]], p);
        let c = (u[0] * w[0] + u[1] * w[1]) / (crate::geometry::norm(u) * crate::geometry::norm(w));
        out[k] = c.clamp(-1.0, 1.0).acos().to_degrees();
    }
    out
}

impl Mesh {
    /// Builds a mesh from raw parts, recomputing distances, size and quality.
    pub fn assemble(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        lambda_vertices: Vec<usize>,
    ) -> Result<Mesh, MeshError> {
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(MeshError::Invalid(format!("triangle {i} references a missing vertex")));
            }
            if signed_area(&vertices, *t) <= 0.0 {
                return Err(MeshError::Invalid(format!("triangle {i} is not positively oriented")));
            }
        }
        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            lambda_vertices,
            delta: Vec::new(),
            h: 0.0,
            min_angle: 0.0,
        };
        mesh.delta = mesh.vertices.par_iter().map(|&x| mesh.boundary_distance(x)).collect();
        mesh.h = mesh
            .triangles
            .iter()
            .map(|t| {
                let v = &mesh.vertices;
                dist(v[t[0]], v[t[1]])
                    .max(dist(v[t[1]], v[t[2]]))
                    .max(dist(v[t[2]], v[t[0]]))
            })
            .fold(0.0, f64::max);
        mesh.min_angle = mesh
            .triangles
            .iter()
            .flat_map(|t| triangle_angles(&mesh.vertices, *t))
            .fold(180.0, f64::min);
        Ok(mesh)
    }

    /// Verifies the conformity invariants: every boundary edge belongs to
    /// one triangle, every interior edge to two, and the tagged boundary
    /// edges are exactly the edges seen once.
    pub fn check_conforming(&self) -> Result<(), MeshError> {
        let once = boundary_edge_list(&self.triangles)?;
        if once.len() != self.boundary_edges.len() {
            return Err(MeshError::Invalid(format!(
                "{} edges are used once but {} boundary edges are tagged",
                once.len(),
                self.boundary_edges.len()
            )));
        }
        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary_edges {
            tagged.insert(edge_key(e.nodes[0], e.nodes[1]), e.triangle);
        }
        for (nodes, t) in once {
            match tagged.get(&edge_key(nodes[0], nodes[1])) {
                Some(&owner) if owner == t => {}
                _ => return Err(MeshError::Invalid(format!("boundary edge {nodes:?} is not tagged consistently"))),
            }
        }
        Ok(())
    }

    /// Exact distance from `x` to the union of boundary edges.
    pub fn boundary_distance(&self, x: Point2) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| point_segment_distance(x, self.vertices[e.nodes[0]], self.vertices[e.nodes[1]]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation of the vertex distances inside triangle `t`.
    pub fn delta_at(&self, t: usize, bary: [f64; 3]) -> f64 {
        let tri = self.triangles[t];
        (0..3).map(|k| bary[k] * self.delta[tri[k]]).sum()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    /// Degree-4 quadrature points of triangle `t`, weights including the area.
    pub fn triangle_quadrature(&self, t: usize) -> [TriangleQuadPoint; 6] {
        let tri = self.triangles[t];
        let [a, b, c] = [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]];
        let area = self.triangle_area(t);
        TRIANGLE_DEG4.map(|(l, w)| TriangleQuadPoint {
            x: [
                l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
            ],
            bary: l,
            weight: w * area,
        })
    }

    /// 3-point Gauss quadrature on boundary edge `e`, with the outward normal.
    pub fn edge_quadrature(&self, e: usize) -> [EdgeQuadPoint; 3] {
        let [i, j] = self.boundary_edges[e].nodes;
        let (a, b) = (self.vertices[i], self.vertices[j]);
        let d = sub(b, a);
        let len = dist(a, b);
        let normal = [d[1] / len, -d[0] / len];
        gauss3().map(|(t, w)| EdgeQuadPoint {
            x: lerp(a, b, t),
            t,
            weight: w * len,
            normal,
        })
    }

    /// ∫_Ω f dx by the degree-4 rule on every triangle.
    pub fn volume_integral<F: Fn(Point2) -> f64 + Sync>(&self, f: F) -> f64 {
        let per: Vec<f64> = (0..self.triangles.len())
            .into_par_iter()
            .map(|t| {
                compensated_sum(self.triangle_quadrature(t).iter().map(|q| q.weight * f(q.x)))
            })
            .collect();
        compensated_sum(per)
    }

    /// ∫ over edges carrying `tag` of f(x, ν) dS, 3-point Gauss per edge.
    pub fn boundary_integral<F: Fn(Point2, Point2) -> f64>(&self, tag: BoundaryTag, f: F) -> f64 {
        compensated_sum(
            (0..self.boundary_edges.len())
                .filter(|&e| self.boundary_edges[e].tag == tag)
                .flat_map(|e| self.edge_quadrature(e))
                .map(|q| q.weight * f(q.x, q.normal)),
        )
    }

    pub fn area(&self) -> f64 {
        compensated_sum((0..self.triangles.len()).map(|t| self.triangle_area(t)))
    }

    pub fn boundary_length(&self, tag: BoundaryTag) -> f64 {
        self.boundary_integral(tag, |_, _| 1.0)
    }

    /// Uniform red refinement: every triangle splits into four, and the
    /// midpoints of boundary edges are projected onto `curves`.
    pub fn refine(&self, curves: &dyn BoundaryCurves) -> Result<Mesh, MeshError> {
        let mut vertices = self.vertices.clone();
        let mut boundary_tag: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for e in &self.boundary_edges {
            boundary_tag.insert(edge_key(e.nodes[0], e.nodes[1]), e.tag);
        }
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point2>| -> usize {
            let key = edge_key(a, b);
            *midpoint.entry(key).or_insert_with(|| {
                let mut m = lerp(vertices[a], vertices[b], 0.5);
                if let Some(&tag) = boundary_tag.get(&key) {
                    m = curves.project(tag, m);
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((t[k], t[(k + 1) % 3]), ti);
            }
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let [a, b] = e.nodes;
            let m = midpoint[&edge_key(a, b)];
            for nodes in [[a, m], [m, b]] {
                let triangle = *owner
                    .get(&(nodes[0], nodes[1]))
                    .ok_or_else(|| MeshError::Invalid("boundary edge lost during refinement".into()))?;
                boundary_edges.push(BoundaryEdge { nodes, tag: e.tag, triangle });
            }
        }
        Mesh::assemble(vertices, triangles, boundary_edges, self.lambda_vertices.clone())
    }

    /// Plain-text export with sections VERTICES (id x1 x2 delta),
    /// TRIANGLES (id v0 v1 v2), BOUNDARY (v0 v1 tag) and LAMBDA (id).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "VERTICES {}", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{i} {:.17e} {:.17e} {:.17e}", v[0], v[1], self.delta[i]);
        }
        let _ = writeln!(s, "TRIANGLES {}", self.triangles.len());
        for (i, t) in self.triangles.iter().enumerate() {
            let _ = writeln!(s, "{i} {} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "BOUNDARY {}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag.as_str());
        }
        let _ = writeln!(s, "LAMBDA {}", self.lambda_vertices.len());
        for v in &self.lambda_vertices {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    /// Parses the format written by [`Mesh::to_text`].  Stored distances are
    /// kept; size and quality are recomputed.
    pub fn from_text(text: &str) -> Result<Mesh, MeshError> {
        let all: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        let mut pos = 0;
        let section = |name: &str, pos: &mut usize| -> Result<Vec<(usize, Vec<&str>)>, MeshError> {
            let (i, l) = *all
                .get(*pos)
                .ok_or(MeshError::Parse { line: 0, msg: format!("missing section {name}") })?;
            let mut parts = l.split_whitespace();
            if parts.next() != Some(name) {
                return Err(MeshError::Parse { line: i + 1, msg: format!("expected section {name}") });
            }
            let count: usize = parts
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or(MeshError::Parse { line: i + 1, msg: "bad section count".into() })?;
            *pos += 1;
            let mut rows = Vec::with_capacity(count);
            for _ in 0..count {
                let (j, row) = *all
                    .get(*pos)
                    .ok_or(MeshError::Parse { line: i + 1, msg: format!("section {name} is truncated") })?;
                rows.push((j + 1, row.split_whitespace().collect()));
                *pos += 1;
            }
            Ok(rows)
        };
        fn num<T: std::str::FromStr>(line: usize, s: Option<&&str>) -> Result<T, MeshError> {
            s.and_then(|v| v.parse().ok())
                .ok_or(MeshError::Parse { line, msg: "malformed field".into() })
        }
        let mut vertices = Vec::new();
        let mut delta = Vec::new();
        for (line, row) in section("VERTICES", &mut pos)? {
            vertices.push([num(line, row.get(1))?, num(line, row.get(2))?]);
            delta.push(num(line, row.get(3))?);
        }
        let mut triangles = Vec::new();
        for (line, row) in section("TRIANGLES", &mut pos)? {
            triangles.push([num(line, row.get(1))?, num(line, row.get(2))?, num(line, row.get(3))?]);
        }
        let mut raw_edges = Vec::new();
        for (line, row) in section("BOUNDARY", &mut pos)? {
            let tag: BoundaryTag = row
                .get(2)
                .ok_or(MeshError::Parse { line, msg: "missing tag".into() })?
                .parse()
                .map_err(|msg| MeshError::Parse { line, msg })?;
            raw_edges.push(([num(line, row.get(0))?, num(line, row.get(1))?], tag));
        }
        let mut lambda_vertices = Vec::new();
        for (line, row) in section("LAMBDA", &mut pos)? {
            lambda_vertices.push(num(line, row.first())?);
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((t[k], t[(k + 1) % 3]), ti);
            }
        }
        let boundary_edges = raw_edges
            .into_iter()
            .map(|(nodes, tag)| {
                owner
                    .get(&(nodes[0], nodes[1]))
                    .map(|&triangle| BoundaryEdge { nodes, tag, triangle })
                    .ok_or(MeshError::Invalid(format!("boundary edge {nodes:?} has no owner")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut mesh = Mesh::assemble(vertices, triangles, boundary_edges, lambda_vertices)?;
        if delta.len() == mesh.vertices.len() {
            mesh.delta = delta;
        }
        Ok(mesh)
    }

    /// CSV of vertices: `id,x1,x2,delta`.
    pub fn vertices_csv(&self) -> String {
        let mut s = String::from("id,x1,x2,delta\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{i},{:.17e},{:.17e},{:.17e}", v[0], v[1], self.delta[i]);
        }
        s
    }

    /// CSV of triangles: `id,v0,v1,v2`.
    pub fn triangles_csv(&self) -> String {
        let mut s = String::from("id,v0,v1,v2\n");
        for (i, t) in self.triangles.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{},{}", t[0], t[1], t[2]);
        }
        s
    }

    /// CSV of boundary edges: `v0,v1,tag`.
    pub fn boundary_csv(&self) -> String {
        let mut s = String::from("v0,v1,tag\n");
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{},{},{}", e.nodes[0], e.nodes[1], e.tag.as_str());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_symmetric_cap, norm};

    fn unit_lens() -> DomainSpec {
        make_symmetric_cap(2, 1.0, &[0.0]).unwrap()
    }

    #[test]
    fn lens_mesh_invariants() {
        let spec = unit_lens();
        let m = triangulate(&spec, 0.1).unwrap();
        m.check_conforming().unwrap();
        assert!(m.min_angle >= 20.0, "min angle {}", m.min_angle);
        assert_eq!(m.lambda_vertices.len(), 2);
        let z = spec.center();
        for e in &m.boundary_edges {
            for &v in &e.nodes {
                let x = m.vertices[v];
                match e.tag {
                    BoundaryTag::Sigma => assert!((dist(x, z) - 1.0).abs() <= 1e-10),
                    BoundaryTag::TArc => assert!((norm(x) - 1.0).abs() <= 1e-10),
                }
            }
        }
    }

    #[test]
    fn too_coarse_is_rejected_with_suggestion() {
        match triangulate(&unit_lens(), 0.2) {
            Err(MeshError::TooCoarse { suggested, .. }) => assert!(suggested < 0.15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refinement_quadruples_and_keeps_curves() {
        let spec = unit_lens();
        let m = triangulate(&spec, 0.1).unwrap();
        let r = m.refine(&spec).unwrap();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        r.check_conforming().unwrap();
        assert!(r.h < 0.6 * m.h);
        let z = spec.center();
        for e in r.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Sigma) {
            assert!((dist(r.vertices[e.nodes[0]], z) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn text_round_trip() {
        let m = triangulate(&unit_lens(), 0.1).unwrap();
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(Mesh::from_text("VERTICES 2\n0 1 2 3\n").is_err());
    }

    #[test]
    fn cubic_integrated_exactly_on_one_triangle() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let t = vec![[0, 1, 2]];
        let b = vec![
            BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Sigma, triangle: 0 },
            BoundaryEdge { nodes: [1, 2], tag: BoundaryTag::Sigma, triangle: 0 },
            BoundaryEdge { nodes: [2, 0], tag: BoundaryTag::Sigma, triangle: 0 },
        ];
        let m = Mesh::assemble(v, t, b, vec![]).unwrap();
        // ∫ x^3 + x y^2 over the unit triangle = 1/20 + 1/60
        let q = m.volume_integral(|x| x[0].powi(3) + x[0] * x[1] * x[1]);
        assert!((q - (1.0 / 20.0 + 1.0 / 60.0)).abs() < 1e-15);
        assert!((m.area() - 0.5).abs() < 1e-15);
        // quadratic along the hypotenuse: ∫ x^2 ds = sqrt(2)/3
        let e = m.boundary_integral(BoundaryTag::Sigma, |x, _| x[0] * x[0]);
        assert!((e - (1.0 / 3.0 + 2f64.sqrt() / 3.0)).abs() < 1e-14);
    }
}
