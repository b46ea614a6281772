use super::{SurfaceMesh, TMode};
use std::io::{self, Write};

/// Wavefront OBJ: t-major vertices, each grid cell split into two
/// triangles, no normals or texture coordinates.
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut w: W) -> io::Result<()> {
    let g = &mesh.grid;
    for p in &mesh.positions {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    let rows = if g.t_mode == TMode::Periodic { g.nt } else { g.nt - 1 };
    for j in 0..rows {
        let jn = (j + 1) % g.nt;
        for i in 0..g.ns - 1 {
            let a = g.idx(j, i) + 1;
            let b = g.idx(j, i + 1) + 1;
            let c = g.idx(jn, i + 1) + 1;
            let d = g.idx(jn, i) + 1;
            writeln!(w, "f {a} {b} {c}")?;
            writeln!(w, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, normal_graph, CylinderConfig, ScalarField};

    #[test]
    fn counts_and_determinism() {
        let c = CylinderConfig::planar(1.0, 2.0).unwrap();
        let g = build_grid(&c, 5, 4, 1.0, TMode::DirichletEnds).unwrap();
        let m = normal_graph(&c, &g, &ScalarField::zeros(&g)).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_obj(&m, &mut a).unwrap();
        write_obj(&m, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 20);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 4 * 3);
    }
}
