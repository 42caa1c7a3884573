//! Triangulated cubed-sphere meshes of the unit sphere.
//!
//! Construction: each of the six faces of the cube `[-1, 1]^3` carries an
//! `n × n` grid of quads (`n = 2^level`) with equidistant spacing on the cube
//! face. Every grid point is mapped radially onto the unit sphere (gnomonic
//! projection followed by normalization).
//!
//! Diagonal convention: every quad is split into two triangles along the
//! diagonal that points from the face center towards the nearest face corner.
//! With this choice the three angles meeting at a cube corner are each split
//! symmetrically and no pair of angles opposite an edge exceeds π, so the P1
//! stiffness matrix has no positive off-diagonal entries. For `level = 0`
//! the single quad per face uses the `(0,0)–(1,1)` diagonal of its local
//! parameterization.
//!
//! Vertex ordering: the 8 cube corners come first, then vertices interior to
//! cube edges, then vertices interior to cube faces. Within each class vertices
//! are numbered in order of first appearance when faces are visited in the
//! order `+x, −x, +y, −y, +z, −z` and each face grid is traversed
//! lexicographically (outer index along the first tangent axis).
//!
//! Meshes produced here remember the pre-projection cube point of every vertex
//! so that [`refine`] can place edge midpoints in the cube parameterization.
//! That keeps `refine(build_cubed_sphere(k))` and `build_cubed_sphere(k + 1)`
//! on the same vertex set.

use std::collections::HashMap;

use crate::geom::{self, Vec3};
use crate::{Error, Result};

/// Largest refinement level accepted by the generators.
pub const MAX_LEVEL: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    vertex_stencils: Vec<Vec<usize>>,
    refinement_level: u32,
    cube_points: Option<Vec<Vec3>>,
}

impl SurfaceMesh {
    /// Builds a mesh from raw vertices and triangles, deriving edges and
    /// vertex stencils. No closedness check is done here; see
    /// [`SurfaceMesh::check_closed_surface`].
    pub fn from_triangles(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a vertex outside 0..{n}"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
        }
        let edges = collect_edges(&triangles);
        let mut vertex_stencils = vec![Vec::new(); n];
        for &[a, b] in &edges {
            vertex_stencils[a].push(b);
            vertex_stencils[b].push(a);
        }
        for s in &mut vertex_stencils {
            s.sort_unstable();
        }
        Ok(Self {
            vertices,
            triangles,
            edges,
            vertex_stencils,
            refinement_level: 0,
            cube_points: None,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Unique undirected edges `[i, j]` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Neighbors of vertex `i` (sorted, excluding `i`).
    pub fn stencil(&self, i: usize) -> &[usize] {
        &self.vertex_stencils[i]
    }

    pub fn vertex_stencils(&self) -> &[Vec<usize>] {
        &self.vertex_stencils
    }

    pub fn refinement_level(&self) -> u32 {
        self.refinement_level
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Longest edge (chord length).
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| geom::norm(geom::sub(self.vertices[a], self.vertices[b])))
            .fold(0.0, f64::max)
    }

    /// Checks that the mesh is a closed, consistently oriented surface: every
    /// edge belongs to exactly two triangles which traverse it in opposite
    /// directions.
    pub fn check_closed_surface(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for &[a, b] in &self.edges {
            let ab = directed.get(&(a, b)).copied().unwrap_or(0);
            let ba = directed.get(&(b, a)).copied().unwrap_or(0);
            if ab != 1 || ba != 1 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a},{b}) is used {ab} times forward and {ba} times backward"
                )));
            }
        }
        Ok(())
    }

    /// Largest deviation `| |x| - 1 |` over all vertices.
    pub fn max_radius_deviation(&self) -> f64 {
        self.vertices
            .iter()
            .map(|&x| (geom::norm(x) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks all sphere-mesh invariants: unit radius, closed orientable
    /// surface, genus zero, and outward orientation of every triangle.
    pub fn check_sphere_invariants(&self) -> Result<()> {
        let dev = self.max_radius_deviation();
        if dev > 1e-12 {
            return Err(Error::InvalidMesh(format!("vertex off the unit sphere by {dev:.3e}")));
        }
        self.check_closed_surface()?;
        if self.euler_characteristic() != 2 {
            return Err(Error::InvalidMesh(format!(
                "Euler characteristic {} != 2",
                self.euler_characteristic()
            )));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|i| self.vertices[i]);
            let normal = geom::cross(geom::sub(b, a), geom::sub(c, a));
            let centroid = [
                (a[0] + b[0] + c[0]) / 3.0,
                (a[1] + b[1] + c[1]) / 3.0,
                (a[2] + b[2] + c[2]) / 3.0,
            ];
            if geom::dot(normal, centroid) <= 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {t} is not outward oriented")));
            }
        }
        Ok(())
    }
}

fn collect_edges(triangles: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut edges: Vec<[usize; 2]> = triangles
        .iter()
        .flat_map(|t| {
            (0..3).map(move |k| {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                [a.min(b), a.max(b)]
            })
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Outward normal axis, sign, and the two tangent axes `(a, b)` with
/// `a × b` equal to the outward normal.
fn cube_faces() -> [(usize, i64, [i64; 3], [i64; 3]); 6] {
    let mut faces = [(0, 0, [0; 3], [0; 3]); 6];
    let mut k = 0;
    for axis in 0..3 {
        for sign in [1i64, -1] {
            let mut a = [0i64; 3];
            let mut b = [0i64; 3];
            a[(axis + 1) % 3] = 1;
            b[(axis + 2) % 3] = sign;
            faces[k] = (axis, sign, a, b);
            k += 1;
        }
    }
    faces
}

/// Generates the triangulated cubed sphere at the given refinement level.
pub fn build_cubed_sphere(level: u32) -> Result<SurfaceMesh> {
    if level > MAX_LEVEL {
        return Err(Error::Parameter(format!(
            "refinement level {level} exceeds the limit {MAX_LEVEL}"
        )));
    }
    let n = 1i64 << level;

    // Integer cube coordinates: tangent components in {-n, -n+2, ..., n}
    // (scaled by 1/n gives [-1, 1]); the normal component is ±n.
    let mut first_seen: Vec<[i64; 3]> = Vec::new();
    let mut key_of: HashMap<[i64; 3], usize> = HashMap::new();
    let mut face_grids: Vec<Vec<usize>> = Vec::with_capacity(6);
    for (axis, sign, a, b) in cube_faces() {
        let mut grid = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
        for i in 0..=n {
            for j in 0..=n {
                let mut p = [0i64; 3];
                p[axis] = sign * n;
                for d in 0..3 {
                    p[d] += (2 * i - n) * a[d] + (2 * j - n) * b[d];
                }
                let id = *key_of.entry(p).or_insert_with(|| {
                    first_seen.push(p);
                    first_seen.len() - 1
                });
                grid.push(id);
            }
        }
        face_grids.push(grid);
    }

    // Renumber: corners, then cube-edge interiors, then face interiors.
    let class = |p: &[i64; 3]| 3 - p.iter().filter(|c| c.abs() == n).count();
    let mut order: Vec<usize> = (0..first_seen.len()).collect();
    order.sort_by_key(|&k| (class(&first_seen[k]), k));
    let mut new_index = vec![0usize; first_seen.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }

    let scale = 1.0 / n as f64;
    let cube_points: Vec<Vec3> = order
        .iter()
        .map(|&k| first_seen[k].map(|c| c as f64 * scale))
        .collect();
    let vertices: Vec<Vec3> = cube_points.iter().map(|&p| geom::normalize(p)).collect();

    let stride = (n + 1) as usize;
    let mut triangles = Vec::with_capacity((12 * n * n) as usize);
    for grid in &face_grids {
        let at = |i: usize, j: usize| new_index[grid[i * stride + j]];
        for i in 0..n as usize {
            for j in 0..n as usize {
                let (v00, v10, v11, v01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                let ca = 2 * i as i64 + 1 - n;
                let cb = 2 * j as i64 + 1 - n;
                if ca * cb >= 0 {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                } else {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                }
            }
        }
    }

    let mut mesh = SurfaceMesh::from_triangles(vertices, triangles)?;
    mesh.refinement_level = level;
    mesh.cube_points = Some(cube_points);
    Ok(mesh)
}

/// Splits every triangle into four through its edge midpoints and projects
/// the new vertices radially onto the unit sphere.
///
/// New vertices are appended after the existing ones, one per edge in edge
/// order. For meshes from [`build_cubed_sphere`] the midpoint is taken in the
/// cube parameterization before projection; otherwise the chord midpoint is
/// projected.
pub fn refine(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    let level = mesh.refinement_level + 1;
    if level > MAX_LEVEL {
        return Err(Error::Parameter(format!(
            "refinement level {level} exceeds the limit {MAX_LEVEL}"
        )));
    }
    let nv = mesh.n_vertices();
    let mut vertices = mesh.vertices.clone();
    let mut cube_points = mesh.cube_points.clone();
    let mut midpoint: HashMap<[usize; 2], usize> = HashMap::with_capacity(mesh.n_edges());
    for (e, &[a, b]) in mesh.edges.iter().enumerate() {
        let x = match cube_points.as_mut() {
            Some(cp) => {
                let m = mid(cp[a], cp[b]);
                cp.push(m);
                geom::normalize(m)
            }
            None => geom::normalize(mid(mesh.vertices[a], mesh.vertices[b])),
        };
        vertices.push(x);
        midpoint.insert([a, b], nv + e);
    }
    let m = |a: usize, b: usize| midpoint[&[a.min(b), a.max(b)]];
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    for &[a, b, c] in &mesh.triangles {
        let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let mut out = SurfaceMesh::from_triangles(vertices, triangles)?;
    out.refinement_level = level;
    out.cube_points = cube_points;
    Ok(out)
}

fn mid(a: Vec3, b: Vec3) -> Vec3 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Total area of the flat triangles.
pub fn surface_area(mesh: &SurfaceMesh) -> Result<f64> {
    let mut total = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = tri.map(|i| mesh.vertices[i]);
        let area = geom::triangle_area(a, b, c);
        let scale = [geom::sub(b, a), geom::sub(c, b), geom::sub(a, c)]
            .iter()
            .map(|&e| geom::dot(e, e))
            .fold(0.0, f64::max);
        if !(area > 1e-14 * scale) {
            return Err(Error::MeshQuality(format!("triangle {t} is degenerate (area {area:.3e})")));
        }
        total += area;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn level_zero_counts() {
        let m = build_cubed_sphere(0).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (8, 18, 12));
    }

    #[test]
    fn counts_follow_closed_forms() {
        for k in 0..=5u32 {
            let m = build_cubed_sphere(k).unwrap();
            let p = 4usize.pow(k);
            assert_eq!(m.n_triangles(), 12 * p);
            assert_eq!(m.n_edges(), 18 * p);
            assert_eq!(m.n_vertices(), 2 + 6 * p);
            assert_eq!(m.euler_characteristic(), 2);
            m.check_sphere_invariants().unwrap();
        }
        let m5 = build_cubed_sphere(5).unwrap();
        assert_eq!((m5.n_triangles(), m5.n_vertices()), (12288, 6146));
    }

    #[test]
    fn level_guard() {
        assert!(matches!(build_cubed_sphere(9), Err(Error::Parameter(_))));
    }

    #[test]
    fn corners_come_first() {
        let m = build_cubed_sphere(2).unwrap();
        let c = 1.0 / 3f64.sqrt();
        for x in &m.vertices()[..8] {
            for &xi in x {
                assert!((xi.abs() - c).abs() < 1e-15);
            }
        }
        for x in &m.vertices()[8..] {
            assert!(x.iter().any(|xi| (xi.abs() - c).abs() > 1e-3));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(build_cubed_sphere(3).unwrap(), build_cubed_sphere(3).unwrap());
    }

    #[test]
    fn refine_counts() {
        let m0 = build_cubed_sphere(0).unwrap();
        let m1 = refine(&m0).unwrap();
        assert_eq!(m1.n_triangles(), 48);
        assert_eq!(m1.refinement_level(), 1);
        m1.check_sphere_invariants().unwrap();
        let m3 = refine(&refine(&build_cubed_sphere(1).unwrap()).unwrap()).unwrap();
        assert_eq!(m3.n_vertices(), 386);
    }

    fn sorted_vertices(m: &SurfaceMesh) -> Vec<Vec3> {
        let mut v = m.vertices().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn refine_matches_direct_construction() {
        for k in 0..4 {
            let a = sorted_vertices(&refine(&build_cubed_sphere(k).unwrap()).unwrap());
            let b = sorted_vertices(&build_cubed_sphere(k + 1).unwrap());
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                for d in 0..3 {
                    assert!((x[d] - y[d]).abs() <= 1e-12, "{x:?} vs {y:?}");
                }
            }
        }
    }

    #[test]
    fn refine_matches_triangulation_above_level_zero() {
        // Same triangles (as vertex-position triples) for k >= 1.
        let key = |m: &SurfaceMesh| {
            let mut t: Vec<Vec<[u64; 3]>> = m
                .triangles()
                .iter()
                .map(|tri| {
                    let mut c: Vec<[u64; 3]> =
                        tri.iter().map(|&i| m.vertices()[i].map(f64::to_bits)).collect();
                    c.sort();
                    c
                })
                .collect();
            t.sort();
            t
        };
        let a = refine(&build_cubed_sphere(2).unwrap()).unwrap();
        let b = build_cubed_sphere(3).unwrap();
        assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn area_below_sphere_and_increasing() {
        let mut prev = 0.0;
        for k in 0..=4 {
            let a = surface_area(&build_cubed_sphere(k).unwrap()).unwrap();
            assert!(a < 4.0 * PI);
            assert!(a > prev);
            prev = a;
        }
        let a3 = surface_area(&build_cubed_sphere(3).unwrap()).unwrap();
        assert!((a3 - 4.0 * PI).abs() / (4.0 * PI) <= 0.01);
        let m = build_cubed_sphere(1).unwrap();
        assert!(surface_area(&refine(&m).unwrap()).unwrap() > surface_area(&m).unwrap());
    }

    #[test]
    fn area_converges_at_second_order() {
        let errs: Vec<f64> = (1..=4)
            .map(|k| 4.0 * PI - surface_area(&build_cubed_sphere(k).unwrap()).unwrap())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
        }
        let finest = (errs[2] / errs[3]).log2();
        assert!(finest >= 1.9, "observed order {finest}");
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let m = SurfaceMesh::from_triangles(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(surface_area(&m), Err(Error::MeshQuality(_))));
    }

    #[test]
    fn open_mesh_fails_closedness() {
        let m = SurfaceMesh::from_triangles(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(m.check_closed_surface().is_err());
    }

    #[test]
    fn stencils_are_symmetric() {
        let m = build_cubed_sphere(2).unwrap();
        for i in 0..m.n_vertices() {
            for &j in m.stencil(i) {
                assert!(m.stencil(j).contains(&i));
            }
        }
        // Corners: three grid neighbors plus one diagonal per adjacent face.
        assert_eq!(m.stencil(0).len(), 6);
    }
}
