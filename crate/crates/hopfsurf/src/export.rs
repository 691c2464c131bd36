//! Deterministic exporters: CSV sample tables and OBJ/PLY meshes.
//!
//! All floating-point output uses 17 significant digits so values round-trip
//! exactly; rows and vertices are emitted in a fixed row-major order so two
//! runs of the same configuration produce byte-identical files.

use std::fmt::Write as _;

/// One CSV row per (s, t, u) sample.  Verification columns hold NaN when the
/// run skipped verification.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    /// (Re, Im) per ball coordinate.
    pub w: Vec<(f64, f64)>,
    pub zeta_abs: f64,
    pub zeta_arg: f64,
    pub genericity: f64,
    pub hopf_defect: f64,
    pub measured_alpha: f64,
    pub rank: usize,
}

fn push_f(out: &mut String, v: f64) {
    // 16 fractional digits in scientific notation = 17 significant digits,
    // enough to round-trip any f64
    let _ = write!(out, "{v:.16e}");
}

/// Render the CSV table, header included, LF line endings.
pub fn csv_string(rows: &[CsvRow], n_ball_coords: usize) -> String {
    let mut out = String::new();
    out.push_str("s,t,u");
    for i in 1..=n_ball_coords {
        let _ = write!(out, ",re_w{i},im_w{i}");
    }
    out.push_str(",abs_zeta,arg_zeta,genericity,hopf_defect,measured_alpha,rank\n");
    for row in rows {
        let scalars = [row.s, row.t, row.u];
        for (k, &v) in scalars.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            push_f(&mut out, v);
        }
        for &(re, im) in &row.w {
            out.push(',');
            push_f(&mut out, re);
            out.push(',');
            push_f(&mut out, im);
        }
        for &v in &[
            row.zeta_abs,
            row.zeta_arg,
            row.genericity,
            row.hopf_defect,
            row.measured_alpha,
        ] {
            out.push(',');
            push_f(&mut out, v);
        }
        let _ = write!(out, ",{}\n", row.rank);
    }
    out
}

/// Mesh data: one vertex per retained (s, t) node per u-slice, projected to
/// R^3.  Indexing is row-major (k, i, j); masked nodes carry no vertex and
/// no incident faces.
#[derive(Debug, Clone)]
pub struct MeshSlices {
    pub ns: usize,
    pub nt: usize,
    pub nu: usize,
    /// Projected position, or None for a masked node; length ns * nt * nu.
    pub verts: Vec<Option<[f64; 3]>>,
    /// Branch component per (i, j) node (shared by all slices); length
    /// ns * nt.  Faces never straddle components.
    pub component: Vec<Option<usize>>,
}

impl MeshSlices {
    fn vidx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.ns + i) * self.nt + j
    }

    /// Quad corners (as vertex-array indices) for cell (i, j) in slice k, if
    /// every corner is retained and all lie in one branch component.
    fn quad(&self, k: usize, i: usize, j: usize) -> Option<[usize; 4]> {
        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let comp = self.component[i * self.nt + j]?;
        for &(ci, cj) in &corners {
            if self.component[ci * self.nt + cj] != Some(comp) {
                return None;
            }
            self.verts[self.vidx(k, ci, cj)]?;
        }
        Some(corners.map(|(ci, cj)| self.vidx(k, ci, cj)))
    }

    /// Map from vertex-array index to emitted (0-based) index, plus the
    /// emission order.
    fn number_vertices(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        let mut map = vec![None; self.verts.len()];
        let mut order = Vec::new();
        for k in 0..self.nu {
            for i in 0..self.ns {
                for j in 0..self.nt {
                    let idx = self.vidx(k, i, j);
                    if self.verts[idx].is_some() {
                        map[idx] = Some(order.len());
                        order.push(idx);
                    }
                }
            }
        }
        (map, order)
    }

    fn quads(&self) -> Vec<(usize, [usize; 4])> {
        let mut out = Vec::new();
        for k in 0..self.nu {
            for i in 0..self.ns - 1 {
                for j in 0..self.nt - 1 {
                    if let Some(q) = self.quad(k, i, j) {
                        out.push((k, q));
                    }
                }
            }
        }
        out
    }
}

/// Wavefront OBJ: one `g` group per u-slice, quad faces, 1-based indices.
pub fn obj_string(mesh: &MeshSlices) -> String {
    let (map, order) = mesh.number_vertices();
    let quads = mesh.quads();
    let mut out = String::new();
    let mut emitted = 0;
    for k in 0..mesh.nu {
        let _ = writeln!(out, "g slice_{k}");
        while emitted < order.len() && order[emitted] / (mesh.ns * mesh.nt) == k {
            let [x, y, z] = mesh.verts[order[emitted]].unwrap();
            let _ = writeln!(out, "v {x:.16e} {y:.16e} {z:.16e}");
            emitted += 1;
        }
        for (qk, q) in &quads {
            if *qk != k {
                continue;
            }
            let f: Vec<String> = q
                .iter()
                .map(|&v| (map[v].unwrap() + 1).to_string())
                .collect();
            let _ = writeln!(out, "f {}", f.join(" "));
        }
    }
    out
}

/// ASCII PLY with quad faces, 0-based indices.
pub fn ply_string(mesh: &MeshSlices) -> String {
    let (map, order) = mesh.number_vertices();
    let quads = mesh.quads();
    let mut out = String::new();
    let _ = writeln!(out, "ply");
    let _ = writeln!(out, "format ascii 1.0");
    let _ = writeln!(out, "element vertex {}", order.len());
    let _ = writeln!(out, "property double x");
    let _ = writeln!(out, "property double y");
    let _ = writeln!(out, "property double z");
    let _ = writeln!(out, "element face {}", quads.len());
    let _ = writeln!(out, "property list uchar int vertex_indices");
    let _ = writeln!(out, "end_header");
    for &idx in &order {
        let [x, y, z] = mesh.verts[idx].unwrap();
        let _ = writeln!(out, "{x:.16e} {y:.16e} {z:.16e}");
    }
    for (_, q) in &quads {
        let f: Vec<String> = q.iter().map(|&v| map[v].unwrap().to_string()).collect();
        let _ = writeln!(out, "4 {}", f.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_mesh() -> MeshSlices {
        // 2 x 2 grid, one slice, node (1, 1) masked
        MeshSlices {
            ns: 2,
            nt: 2,
            nu: 1,
            verts: vec![
                Some([0.0, 0.0, 0.0]),
                Some([0.0, 1.0, 0.0]),
                Some([1.0, 0.0, 0.0]),
                None,
            ],
            component: vec![Some(0), Some(0), Some(0), None],
        }
    }

    #[test]
    fn csv_round_trips_floats() {
        let rows = vec![CsvRow {
            s: 0.1,
            t: -2.0 / 3.0,
            u: 1e-17,
            w: vec![(std::f64::consts::PI, -1.5), (0.25, f64::MIN_POSITIVE)],
            zeta_abs: 1.0,
            zeta_arg: 0.5,
            genericity: -0.125,
            hopf_defect: f64::NAN,
            measured_alpha: f64::NAN,
            rank: 3,
        }];
        let text = csv_string(&rows, 2);
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("s,t,u,re_w1,im_w1,re_w2,im_w2,"));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 13);
        assert_eq!(fields[1].parse::<f64>().unwrap(), -2.0 / 3.0);
        assert_eq!(fields[3].parse::<f64>().unwrap(), std::f64::consts::PI);
        assert!(fields[10].parse::<f64>().unwrap().is_nan());
        assert_eq!(fields[12], "3");
    }

    #[test]
    fn csv_is_deterministic() {
        let rows = vec![CsvRow {
            s: 0.3,
            t: 0.7,
            u: -0.1,
            w: vec![(0.1, 0.2), (0.3, 0.4)],
            zeta_abs: 0.9,
            zeta_arg: -0.3,
            genericity: 0.5,
            hopf_defect: 1e-8,
            measured_alpha: 1.0,
            rank: 3,
        }];
        assert_eq!(csv_string(&rows, 2), csv_string(&rows, 2));
    }

    #[test]
    fn obj_masks_faces_keeps_vertices() {
        let obj = obj_string(&tiny_mesh());
        assert_eq!(obj.matches("\nv ").count() + obj.starts_with("v ") as usize, 3);
        assert!(!obj.contains("\nf "), "masked corner must suppress the quad");
        assert!(obj.starts_with("g slice_0\n"));
    }

    #[test]
    fn obj_full_grid_has_quad() {
        let mut mesh = tiny_mesh();
        mesh.verts[3] = Some([1.0, 1.0, 0.0]);
        mesh.component[3] = Some(0);
        let obj = obj_string(&mesh);
        assert!(obj.contains("f 1 3 4 2\n"));
    }

    #[test]
    fn ply_header_counts_match_body() {
        let mut mesh = tiny_mesh();
        mesh.verts[3] = Some([1.0, 1.0, 0.0]);
        mesh.component[3] = Some(0);
        let ply = ply_string(&mesh);
        assert!(ply.contains("element vertex 4\n"));
        assert!(ply.contains("element face 1\n"));
        assert!(ply.ends_with("4 0 2 3 1\n"));
    }

    #[test]
    fn faces_do_not_cross_components() {
        let mut mesh = tiny_mesh();
        mesh.verts[3] = Some([1.0, 1.0, 0.0]);
        mesh.component[3] = Some(1);
        let obj = obj_string(&mesh);
        assert!(!obj.contains("\nf ") && !obj.contains("f 1"));
    }
}
