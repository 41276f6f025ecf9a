use std::collections::VecDeque;
use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use super::format_sig;
use crate::geodesics::{cross, transition, Charts, GeodesicPath, Isometry, P2};
use crate::surface::{FaceId, SlotRef, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeStrategy {
    #[default]
    BreadthFirst,
    DepthFirst,
}

impl FromStr for TreeStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bfs" | "breadth-first" => Ok(TreeStrategy::BreadthFirst),
            "dfs" | "depth-first" => Ok(TreeStrategy::DepthFirst),
            _ => Err(format!("unknown tree strategy {s:?}")),
        }
    }
}

/// A surface cut open along a spanning tree of its faces and laid flat.
#[derive(Debug, Clone, Serialize)]
pub struct PlanarNet {
    pub root: FaceId,
    /// Tree parent of each face, with the parent slot it hangs from.
    pub parent: Vec<Option<SlotRef>>,
    #[serde(skip)]
    pub placement: Vec<Isometry>,
    /// Face outlines in net coordinates.
    pub polygons: Vec<Vec<[f64; 2]>>,
    /// Tree gluings, one slot per edge.
    pub folds: Vec<SlotRef>,
    /// Non-tree gluings, one slot per edge.
    pub cuts: Vec<SlotRef>,
    /// Unglued slots.
    pub boundary: Vec<SlotRef>,
    /// Face pairs whose interiors overlap in the plane.
    pub overlaps: Vec<(FaceId, FaceId)>,
}

impl PlanarNet {
    pub fn has_overlaps(&self) -> bool {
        !self.overlaps.is_empty()
    }

    fn point(&self, face: FaceId, p: P2) -> P2 {
        self.placement[face.0].apply(p)
    }
}

/// Lay the faces of `s` out in the plane along a spanning tree grown from
/// `root`. Overlaps are flagged, never fixed.
pub fn unfold_net(s: &Surface, root: FaceId, strategy: TreeStrategy) -> PlanarNet {
    let charts = Charts::new(s);
    let nf = s.face_count();
    let mut placement: Vec<Option<Isometry>> = vec![None; nf];
    let mut parent = vec![None; nf];
    let mut folds = Vec::new();
    placement[root.0] = Some(Isometry::identity());
    let mut frontier = VecDeque::from([root]);
    while let Some(f) = match strategy {
        TreeStrategy::BreadthFirst => frontier.pop_front(),
        TreeStrategy::DepthFirst => frontier.pop_back(),
    } {
        let here = placement[f.0].unwrap();
        let mut children = Vec::new();
        for i in 0..s.face(f).sides {
            let slot = SlotRef::new(f, i);
            let Some((other, _)) = s.partner(slot) else { continue };
            if placement[other.face.0].is_some() {
                continue;
            }
            let t = transition(s, &charts, slot).expect("glued slot");
            placement[other.face.0] = Some(here.compose(&t.inverse()));
            parent[other.face.0] = Some(slot);
            folds.push(slot);
            children.push(other.face);
        }
        if strategy == TreeStrategy::DepthFirst {
            children.reverse();
        }
        frontier.extend(children);
    }
    // Faces outside the root's component stay at their own chart origin.
    let placement: Vec<Isometry> = placement.into_iter().map(|p| p.unwrap_or_else(Isometry::identity)).collect();

    let mut cuts = Vec::new();
    let mut boundary = Vec::new();
    for slot in s.slots() {
        match s.partner(slot) {
            None => boundary.push(slot),
            Some((other, _)) => {
                let tree = parent[other.face.0] == Some(slot) || parent[slot.face.0] == Some(other);
                if !tree && slot <= other {
                    cuts.push(slot);
                }
            }
        }
    }
    let polygons: Vec<Vec<P2>> =
        s.face_ids().map(|f| charts.corners(f).iter().map(|&c| placement[f.0].apply(c)).collect()).collect();
    let overlaps = find_overlaps(&polygons, &charts);
    PlanarNet {
        root,
        parent,
        placement,
        polygons: polygons.iter().map(|p| p.iter().map(|q| [q.x, q.y]).collect()).collect(),
        folds,
        cuts,
        boundary,
        overlaps,
    }
}

fn bbox(poly: &[P2]) -> [f64; 4] {
    poly.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, p| {
        [b[0].min(p.x), b[1].min(p.y), b[2].max(p.x), b[3].max(p.y)]
    })
}

/// Convex polygons overlap unless some edge normal separates them. Contact
/// along an edge or at a corner does not count.
fn convex_overlap(a: &[P2], b: &[P2], eps: f64) -> bool {
    for (poly, other) in [(a, b), (b, a)] {
        let n = poly.len();
        for i in 0..n {
            let e = poly[(i + 1) % n] - poly[i];
            let axis = P2::new(e.y, -e.x).normalize();
            let project = |ps: &[P2]| {
                ps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let d = axis.dot(p);
                    (lo.min(d), hi.max(d))
                })
            };
            let (lo_a, hi_a) = project(poly);
            let (lo_b, hi_b) = project(other);
            if hi_a <= lo_b + eps || hi_b <= lo_a + eps {
                return false;
            }
        }
    }
    true
}

fn find_overlaps(polygons: &[Vec<P2>], charts: &Charts) -> Vec<(FaceId, FaceId)> {
    let boxes: Vec<[f64; 4]> = polygons.iter().map(|p| bbox(p)).collect();
    let mut out = Vec::new();
    for i in 0..polygons.len() {
        for j in i + 1..polygons.len() {
            let (a, b) = (boxes[i], boxes[j]);
            if a[2] < b[0] || b[2] < a[0] || a[3] < b[1] || b[3] < a[1] {
                continue;
            }
            let eps = 1e-9 * charts.edge_length(FaceId(i)).max(charts.edge_length(FaceId(j)));
            if convex_overlap(&polygons[i], &polygons[j], eps) {
                out.push((FaceId(i), FaceId(j)));
            }
        }
    }
    out
}

/// SVG cut pattern: one polygon per face, fold and cut strokes. The y axis
/// points up as in the face charts.
pub fn export_svg(net: &PlanarNet, s: &Surface) -> String {
    export_svg_with_paths(net, s, &[])
}

/// [`export_svg`] with each geodesic drawn as polylines, broken where the
/// path crosses a cut.
pub fn export_svg_with_paths(net: &PlanarNet, s: &Surface, paths: &[GeodesicPath]) -> String {
    let charts = Charts::new(s);
    let all: Vec<P2> = net.polygons.iter().flatten().map(|p| P2::new(p[0], p[1])).collect();
    let b = bbox(&all);
    let (w, h) = (b[2] - b[0], b[3] - b[1]);
    let margin = 0.05 * w.max(h).max(1e-9);
    let f = |x: f64| format_sig(x);
    let pt = |p: P2| format!("{},{}", f(p.x), f(-p.y));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        f(b[0] - margin),
        f(-b[3] - margin),
        f(w + 2.0 * margin),
        f(h + 2.0 * margin)
    );
    let _ = writeln!(
        out,
        "<style>polygon{{fill:#f4efe6;stroke:#333;stroke-width:0.01}} .cut{{stroke:#c0392b;stroke-width:0.02}} \
         .fold{{stroke:#2c7bb6;stroke-width:0.01;stroke-dasharray:0.05 0.03}} .path{{fill:none;stroke:#111;stroke-width:0.015}}</style>"
    );
    for (i, poly) in net.polygons.iter().enumerate() {
        let pts: Vec<String> = poly.iter().map(|p| pt(P2::new(p[0], p[1]))).collect();
        let _ = writeln!(out, "<polygon data-face=\"{i}\" points=\"{}\"/>", pts.join(" "));
    }
    let line = |out: &mut String, class: &str, face: FaceId, slot: SlotRef| {
        let (a, b) = charts.slot_endpoints(slot);
        let (a, b) = (net.point(face, a), net.point(face, b));
        let _ = writeln!(
            out,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            f(a.x),
            f(-a.y),
            f(b.x),
            f(-b.y)
        );
    };
    for &slot in &net.folds {
        line(&mut out, "fold", slot.face, slot);
    }
    for &slot in &net.cuts {
        line(&mut out, "cut", slot.face, slot);
        let (other, _) = s.partner(slot).unwrap();
        line(&mut out, "cut", other.face, other);
    }
    for path in paths {
        let mut runs: Vec<Vec<P2>> = Vec::new();
        for seg in &path.segments {
            let a = net.point(seg.face, seg.start());
            let b = net.point(seg.face, seg.end());
            match runs.last_mut() {
                Some(run) if (run.last().unwrap() - a).norm() < 1e-9 => run.push(b),
                _ => runs.push(vec![a, b]),
            }
        }
        for run in runs {
            let pts: Vec<String> = run.into_iter().map(pt).collect();
            let _ = writeln!(out, "<polyline class=\"path\" points=\"{}\"/>", pts.join(" "));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Checks that every tree edge is shared exactly by the two placed faces.
pub fn check_folds(net: &PlanarNet, s: &Surface) -> f64 {
    let charts = Charts::new(s);
    let mut worst: f64 = 0.0;
    for &slot in &net.folds {
        let (other, flipped) = s.partner(slot).unwrap();
        let (a, b) = charts.slot_endpoints(slot);
        let (c, d) = charts.slot_endpoints(other);
        let (a, b) = (net.point(slot.face, a), net.point(slot.face, b));
        let (c, d) = (net.point(other.face, c), net.point(other.face, d));
        let err = if flipped { (a - c).norm().max((b - d).norm()) } else { (a - d).norm().max((b - c).norm()) };
        worst = worst.max(err);
        // Fold back: child placement composed with its transition is the parent placement.
        let t = transition(s, &charts, slot).unwrap();
        let back = net.placement[other.face.0].compose(&t);
        let p = net.placement[slot.face.0];
        worst = worst.max((back.m - p.m).abs().max()).max((back.t - p.t).norm());
        // The two faces sit on opposite sides of the shared edge.
        let inner = net.point(slot.face, P2::zeros());
        let outer = net.point(other.face, P2::zeros());
        if cross(b - a, inner - a) * cross(b - a, outer - a) > 0.0 {
            worst = f64::INFINITY;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{football_disk, solid, SolidId};

    #[test]
    fn cube_cross_net() {
        let s = solid(SolidId::Cube).unwrap();
        let net = unfold_net(&s, FaceId(0), TreeStrategy::BreadthFirst);
        assert_eq!(net.folds.len(), 5);
        assert_eq!(net.cuts.len(), 7);
        assert!(net.boundary.is_empty());
        assert!(!net.has_overlaps(), "{:?}", net.overlaps);
        assert!(check_folds(&net, &s) < 1e-9);
        // A cross: the root has four tree children.
        let children = net.parent.iter().flatten().filter(|p| p.face == FaceId(0)).count();
        assert_eq!(children, 4);
    }

    #[test]
    fn single_face_net() {
        let mut s = Surface::new();
        s.add_unit_face(5).unwrap();
        let net = unfold_net(&s, FaceId(0), TreeStrategy::DepthFirst);
        assert!(net.cuts.is_empty() && net.folds.is_empty());
        assert_eq!(net.boundary.len(), 5);
        assert_eq!(net.polygons[0].len(), 5);
    }

    #[test]
    fn overlap_oracle() {
        let a = [P2::new(0.0, 0.0), P2::new(1.0, 0.0), P2::new(1.0, 1.0), P2::new(0.0, 1.0)];
        let shifted = |dx: f64, dy: f64| a.map(|p| p + P2::new(dx, dy));
        assert!(!convex_overlap(&a, &shifted(1.0, 0.0), 1e-9));
        assert!(!convex_overlap(&a, &shifted(1.0, 1.0), 1e-9));
        assert!(convex_overlap(&a, &shifted(0.5, 0.5), 1e-9));
        assert!(!convex_overlap(&a, &shifted(2.0, 0.3), 1e-9));
    }

    #[test]
    fn flat_patches_unfold_cleanly_and_heptagon_rings_overlap() {
        for rings in 0..3 {
            let s = football_disk(6, rings);
            for strategy in [TreeStrategy::BreadthFirst, TreeStrategy::DepthFirst] {
                let net = unfold_net(&s, FaceId(0), strategy);
                assert!(!net.has_overlaps());
                assert!(check_folds(&net, &s) < 1e-9);
            }
        }
        assert!(!unfold_net(&football_disk(7, 0), FaceId(0), TreeStrategy::BreadthFirst).has_overlaps());
        for rings in 1..3 {
            let s = football_disk(7, rings);
            for strategy in [TreeStrategy::BreadthFirst, TreeStrategy::DepthFirst] {
                let net = unfold_net(&s, FaceId(0), strategy);
                assert!(net.has_overlaps(), "rings {rings}");
                assert!(check_folds(&net, &s) < 1e-9);
            }
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let s = solid(SolidId::TruncatedOctahedron).unwrap();
        let net = unfold_net(&s, FaceId(0), TreeStrategy::BreadthFirst);
        let a = export_svg(&net, &s);
        assert_eq!(a, export_svg(&unfold_net(&s, FaceId(0), TreeStrategy::BreadthFirst), &s));
        assert_eq!(a.matches("<polygon").count(), s.face_count());
        assert_eq!(a.matches("class=\"fold\"").count(), s.face_count() - 1);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    }
}
