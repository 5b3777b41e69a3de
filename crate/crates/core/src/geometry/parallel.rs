//! Parallel sets Ω_σ = {x ∈ Ω : δ_Γ(x) > σ} on a mesh carrying vertex
//! distances: connectivity of the element sub-mesh and extraction of the
//! level curve δ_Γ = σ.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{lerp, Point2};
use crate::error::GeometryError;
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelSetReport {
    pub sigma: f64,
    pub elements: usize,
    pub components: usize,
    pub connected: bool,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connectivity of the elements whose centroid distance exceeds `sigma`,
/// adjacency being a shared edge.  σ ≤ 0 keeps every element, including
/// those with all vertices on Γ.
pub fn parallel_set_connected(mesh: &Mesh, sigma: f64) -> Result<ParallelSetReport, GeometryError> {
    let keep: Vec<bool> = (0..mesh.triangles.len())
        .map(|t| sigma <= 0.0 || mesh.delta_at(t, [1.0 / 3.0; 3]) > sigma)
        .collect();
    let elements = keep.iter().filter(|&&k| k).count();
    if elements == 0 {
        let max_delta = mesh.delta.iter().copied().fold(0.0, f64::max);
        return Err(GeometryError::EmptyParallelSet { sigma, max_delta });
    }
    let mut parent: Vec<usize> = (0..mesh.triangles.len()).collect();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if !keep[t] {
            continue;
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            if let Some(&other) = edge_owner.get(&key) {
                let (ra, rb) = (find(&mut parent, t), find(&mut parent, other));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            } else {
                edge_owner.insert(key, t);
            }
        }
    }
    let mut roots: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| keep[t])
        .map(|t| find(&mut parent, t))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(ParallelSetReport {
        sigma,
        elements,
        components: roots.len(),
        connected: roots.len() == 1,
    })
}

/// Closed rings approximating {δ_Γ = σ} by linear interpolation of vertex
/// distances, oriented with Ω_σ on the left.
pub fn parallel_set_boundary(mesh: &Mesh, sigma: f64) -> Vec<Vec<Point2>> {
    let inside = |v: usize| mesh.delta[v] > sigma;
    let crossing = |a: usize, b: usize| -> Point2 {
        let (da, db) = (mesh.delta[a] - sigma, mesh.delta[b] - sigma);
        lerp(mesh.vertices[a], mesh.vertices[b], da / (da - db))
    };
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    // next[start edge] = end edge, one segment per cut triangle
    let mut next: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut point: HashMap<(usize, usize), Point2> = HashMap::new();
    for tri in &mesh.triangles {
        let flags = tri.map(inside);
        let n_in = flags.iter().filter(|&&f| f).count();
        if n_in == 0 || n_in == 3 {
            continue;
        }
        // the lone vertex differs from the other two; walk so that Ω_σ is on the left
        let lone = (0..3)
            .find(|&k| flags[k] != flags[(k + 1) % 3] && flags[k] != flags[(k + 2) % 3])
            .unwrap_or(0);
        let (p, q, r) = (tri[lone], tri[(lone + 1) % 3], tri[(lone + 2) % 3]);
        let (e1, e2) = (key(p, q), key(r, p));
        point.entry(e1).or_insert_with(|| crossing(p, q));
        point.entry(e2).or_insert_with(|| crossing(r, p));
        if flags[lone] {
            // inside corner at p: go from edge (p,q) to edge (r,p)
            next.insert(e1, e2);
        } else {
            next.insert(e2, e1);
        }
    }
    let mut starts: Vec<(usize, usize)> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut visited: std::collections::HashSet<(usize, usize)> = Default::default();
    let mut rings = Vec::new();
    for s in starts {
        if visited.contains(&s) {
            continue;
        }
        let mut ring = Vec::new();
        let mut e = s;
        while visited.insert(e) {
            ring.push(point[&e]);
            match next.get(&e) {
                Some(&n) => e = n,
                None => break,
            }
        }
        if ring.len() >= 3 {
            rings.push(ring);
        }
    }
    rings
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{disk_polyline, dumbbell};
    use super::super::{Disk, Polygonal};
    use super::*;
    use crate::mesh::triangulate_polyline;

    #[test]
    fn dumbbell_splits_above_the_neck() {
        let m = triangulate_polyline(&dumbbell(0.025), 0.025, &Polygonal).unwrap();
        assert!(parallel_set_connected(&m, 0.0).unwrap().connected);
        assert!(parallel_set_connected(&m, 0.02).unwrap().connected);
        let r = parallel_set_connected(&m, 0.07).unwrap();
        assert_eq!(r.components, 2);
        assert!(matches!(parallel_set_connected(&m, 5.0), Err(GeometryError::EmptyParallelSet { .. })));
    }

    #[test]
    fn disk_level_curve_is_a_circle() {
        let m = triangulate_polyline(&disk_polyline(1.0, 128), 0.05, &Disk { center: [0.0, 0.0], radius: 1.0 }).unwrap();
        let rings = parallel_set_boundary(&m, 0.3);
        assert_eq!(rings.len(), 1);
        let ring = &rings[0];
        let area = 0.5 * (0..ring.len()).map(|i| super::super::cross(ring[i], ring[(i + 1) % ring.len()])).sum::<f64>();
        assert!((area - std::f64::consts::PI * 0.49).abs() < 0.02, "area {area}");
    }
}
