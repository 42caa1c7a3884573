//! Legacy ASCII VTK output (`DATASET POLYDATA`).

use std::io::Write;

use crate::mesh::SurfaceMesh;
use crate::{Error, Result};

/// Writes the mesh with optional nodal scalar fields as point data.
pub fn write_polydata<W: Write>(
    mut w: W,
    mesh: &SurfaceMesh,
    title: &str,
    fields: &[(&str, &[f64])],
) -> Result<()> {
    let n = mesh.n_vertices();
    for (name, values) in fields {
        if values.len() != n {
            return Err(Error::Dimension(format!("field '{name}' has {} values for {n} vertices", values.len())));
        }
    }
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {n} double")?;
    for p in mesh.vertices() {
        writeln!(w, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2])?;
    }
    let nt = mesh.n_triangles();
    writeln!(w, "POLYGONS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    if !fields.is_empty() {
        writeln!(w, "POINT_DATA {n}")?;
        for (name, values) in fields {
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for v in values.iter() {
                writeln!(w, "{v:.17e}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_cubed_sphere;

    #[test]
    fn layout_of_a_small_mesh() {
        let m = build_cubed_sphere(0).unwrap();
        let u = vec![1.0; 8];
        let mut buf = Vec::new();
        write_polydata(&mut buf, &m, "cube", &[("u", &u), ("v", &u)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[4], "POINTS 8 double");
        assert_eq!(lines[13], "POLYGONS 12 48");
        assert!(text.contains("POINT_DATA 8\nSCALARS u double 1\nLOOKUP_TABLE default\n"));
        assert!(text.contains("SCALARS v double 1"));
        assert_eq!(lines.len(), 5 + 8 + 1 + 12 + 1 + 2 * (2 + 8));
    }

    #[test]
    fn wrong_field_length_is_rejected() {
        let m = build_cubed_sphere(0).unwrap();
        assert!(write_polydata(Vec::new(), &m, "x", &[("u", &[1.0][..])]).is_err());
    }
}
