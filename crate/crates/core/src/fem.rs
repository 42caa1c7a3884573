//! P1 finite-element operators on flat triangles.
//!
//! All matrices assembled here share one sparsity pattern: the diagonal plus
//! one entry per mesh edge in each direction. Entries that vanish numerically
//! (right angles in the stiffness matrix) stay in the pattern.

use crate::geom::{self, Vec3};
use crate::linalg::SparseMatrix;
use crate::mesh::{self, SurfaceMesh};
use crate::{Error, Result};

/// Mass, lumped mass and Laplace–Beltrami stiffness for one mesh.
#[derive(Debug, Clone)]
pub struct Operators {
    pub mass: SparseMatrix,
    pub lumped_mass: Vec<f64>,
    pub stiffness: SparseMatrix,
    pub area: f64,
}

impl Operators {
    pub fn assemble(mesh: &SurfaceMesh) -> Result<Self> {
        let mass = assemble_mass(mesh)?;
        let stiffness = assemble_stiffness(mesh)?;
        debug_assert!(mass.same_pattern(&stiffness));
        let lumped_mass = lump(&mass);
        let area = mesh::surface_area(mesh)?;
        Ok(Self {
            mass,
            lumped_mass,
            stiffness,
            area,
        })
    }

    pub fn n(&self) -> usize {
        self.lumped_mass.len()
    }
}

fn corners(mesh: &SurfaceMesh, t: usize) -> Result<[Vec3; 3]> {
    let tri = mesh.triangles()[t];
    let p = tri.map(|i| mesh.vertices()[i]);
    let area = geom::triangle_area(p[0], p[1], p[2]);
    let scale = (0..3)
        .map(|k| {
            let e = geom::sub(p[(k + 1) % 3], p[k]);
            geom::dot(e, e)
        })
        .fold(0.0, f64::max);
    if !(area > 1e-14 * scale) {
        return Err(Error::MeshQuality(format!(
            "degenerate triangle {t} (area {area:.3e})"
        )));
    }
    Ok(p)
}

/// Pattern triplets (diagonal plus both directions of every edge) with zero
/// values, so every assembled matrix has the same structure.
fn pattern(mesh: &SurfaceMesh) -> Vec<(usize, usize, f64)> {
    let mut t: Vec<(usize, usize, f64)> = (0..mesh.n_vertices()).map(|i| (i, i, 0.0)).collect();
    for &[a, b] in mesh.edges() {
        t.push((a, b, 0.0));
        t.push((b, a, 0.0));
    }
    t
}

/// Consistent mass matrix: `A_T/6` on the local diagonal, `A_T/12` off it.
pub fn assemble_mass(mesh: &SurfaceMesh) -> Result<SparseMatrix> {
    let mut t = pattern(mesh);
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let p = corners(mesh, k)?;
        let area = geom::triangle_area(p[0], p[1], p[2]);
        for &i in tri {
            for &j in tri {
                t.push((i, j, if i == j { area / 6.0 } else { area / 12.0 }));
            }
        }
    }
    let n = mesh.n_vertices();
    let mut m = SparseMatrix::from_triplets(n, n, &t)?;
    m.mark_symmetric()?;
    Ok(m)
}

/// Row sums of the mass matrix.
pub fn lump(mass: &SparseMatrix) -> Vec<f64> {
    mass.row_sums()
}

/// Cotangent-weight P1 stiffness: for each triangle and each corner with
/// angle θ opposite edge `(i, j)`, `L_ij` and `L_ji` receive `−cot(θ)/2` and
/// the diagonals `L_ii`, `L_jj` receive `+cot(θ)/2`.
pub fn assemble_stiffness(mesh: &SurfaceMesh) -> Result<SparseMatrix> {
    let mut t = pattern(mesh);
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let p = corners(mesh, k)?;
        for c in 0..3 {
            let (i, j) = ((c + 1) % 3, (c + 2) % 3);
            let e1 = geom::sub(p[i], p[c]);
            let e2 = geom::sub(p[j], p[c]);
            let cot = geom::dot(e1, e2) / geom::norm(geom::cross(e1, e2));
            let w = 0.5 * cot;
            let (gi, gj) = (tri[i], tri[j]);
            t.push((gi, gj, -w));
            t.push((gj, gi, -w));
            t.push((gi, gi, w));
            t.push((gj, gj, w));
        }
    }
    let n = mesh.n_vertices();
    let mut l = SparseMatrix::from_triplets(n, n, &t)?;
    l.mark_symmetric()?;
    Ok(l)
}

/// Positive off-diagonal stiffness entries, i.e. edges whose two opposite
/// angles sum to more than π. Each undirected pair is listed once (`i < j`).
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    pub positive_off_diagonal: Vec<(usize, usize, f64)>,
    pub max_positive: f64,
}

impl MeshQualityReport {
    pub fn count(&self) -> usize {
        self.positive_off_diagonal.len()
    }

    /// Whether the stiffness matrix is a Z-matrix (the sign condition the
    /// lumped Patankar scheme needs for nonnegative solutions).
    pub fn is_clean(&self) -> bool {
        self.positive_off_diagonal.is_empty()
    }
}

pub fn mesh_quality_report(stiffness: &SparseMatrix) -> MeshQualityReport {
    let mut positive_off_diagonal = Vec::new();
    let mut max_positive = 0.0f64;
    for i in 0..stiffness.n_rows() {
        for (j, v) in stiffness.row(i) {
            if j > i && v > 0.0 {
                positive_off_diagonal.push((i, j, v));
                max_positive = max_positive.max(v);
            }
        }
    }
    MeshQualityReport {
        positive_off_diagonal,
        max_positive,
    }
}

/// `G(v) = M v` together with `Σ_i G(v)_i`, the integral of the P1
/// interpolant of `v`.
pub fn integral_functional(mass: &SparseMatrix, v: &[f64]) -> (Vec<f64>, f64) {
    let g = mass.mul_vec(v);
    let total = g.iter().sum();
    (g, total)
}
