use std::fmt::Write;

use super::{chart_point_to_3d, EmbeddedMesh};
use crate::geodesics::{Charts, GeodesicPath};

/// `x` with 9 significant digits, trailing zeros dropped and no negative zero.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let mut out = format!("{x:.decimals$}");
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if out == "-0" {
        out = "0".into();
    }
    out
}

fn vertex_line(out: &mut String, p: [f64; 3]) {
    let _ = writeln!(out, "v {} {} {}", format_sig(p[0]), format_sig(p[1]), format_sig(p[2]));
}

/// Wavefront OBJ with one `v` per node. Triangles are written as is, larger
/// faces as a fan around their center node.
pub fn export_obj(m: &EmbeddedMesh) -> String {
    export_obj_with_paths(m, None, &[])
}

/// [`export_obj`] plus one polyline (`l` record) per geodesic path.
pub fn export_obj_with_paths(m: &EmbeddedMesh, charts: Option<&Charts>, paths: &[GeodesicPath]) -> String {
    let mut out = String::from("# polytile\n");
    for p in &m.positions {
        vertex_line(&mut out, *p);
    }
    for (ring, center) in &m.faces {
        match center {
            None => {
                let _ = writeln!(out, "f {} {} {}", ring[0] + 1, ring[1] + 1, ring[2] + 1);
            }
            Some(c) => {
                for i in 0..ring.len() {
                    let _ = writeln!(out, "f {} {} {}", c + 1, ring[i] + 1, ring[(i + 1) % ring.len()] + 1);
                }
            }
        }
    }
    let Some(charts) = charts else { return out };
    let mut next = m.positions.len() + 1;
    for path in paths {
        let mut pts = Vec::new();
        for (k, seg) in path.segments.iter().enumerate() {
            if k == 0 {
                pts.push(chart_point_to_3d(m, charts, seg.face, seg.start()));
            }
            pts.push(chart_point_to_3d(m, charts, seg.face, seg.end()));
        }
        for p in &pts {
            vertex_line(&mut out, *p);
        }
        let ids: Vec<String> = (next..next + pts.len()).map(|i| i.to_string()).collect();
        let _ = writeln!(out, "l {}", ids.join(" "));
        next += pts.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::init_embedding;
    use crate::generators::{solid, SolidId};

    #[test]
    fn formats() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig(123456.789012), "123456.789");
        assert_eq!(format_sig(-1e-12), "-0.000000000001");
    }

    fn count(obj: &str, tag: &str) -> usize {
        obj.lines().filter(|l| l.starts_with(tag)).count()
    }

    #[test]
    fn tetrahedron_and_cube_record_counts() {
        let t = init_embedding(&solid(SolidId::Tetrahedron).unwrap(), 0).unwrap();
        let obj = export_obj(&t);
        assert_eq!((count(&obj, "v "), count(&obj, "f ")), (4, 4));
        let c = init_embedding(&solid(SolidId::Cube).unwrap(), 0).unwrap();
        let obj = export_obj(&c);
        assert_eq!((count(&obj, "v "), count(&obj, "f ")), (14, 24));
        assert_eq!(obj, export_obj(&init_embedding(&solid(SolidId::Cube).unwrap(), 0).unwrap()));
    }
}
