use super::{cross, transition, Charts, GeodesicError, GeodesicPath, PathSegment, PathStatus, SurfacePoint, P2, VERTEX_EPS};
use crate::surface::{SlotRef, Surface};

/// Follow a straight line from `start` for `length`, unfolding across glued
/// edges. Stops early with [`PathStatus::HitBoundary`] at a free edge.
pub fn trace_ray(
    s: &Surface,
    charts: &Charts,
    start: SurfacePoint,
    direction: [f64; 2],
    length: f64,
) -> Result<GeodesicPath, GeodesicError> {
    charts.check_point(&start)?;
    let mut d = P2::new(direction[0], direction[1]);
    if !((d.norm() - 1.0).abs() < 1e-9) {
        return Err(GeodesicError::InvalidDirection);
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(GeodesicError::NonPositiveLength);
    }
    let mut face = start.face;
    let mut p = start.p();
    let mut remaining = length;
    let mut segments = Vec::new();
    let mut crossings = Vec::new();
    loop {
        let corners = charts.corners(face);
        let n = corners.len();
        // Nearest edge ahead of the ray.
        let mut exit: Option<(usize, f64)> = None;
        for i in 0..n {
            let a = corners[i];
            let e = corners[(i + 1) % n] - a;
            let out = P2::new(e.y, -e.x).normalize();
            let dn = d.dot(&out);
            if dn <= 1e-15 {
                continue;
            }
            let t = ((a - p).dot(&out) / dn).max(0.0);
            if exit.is_none_or(|(_, best)| t < best) {
                exit = Some((i, t));
            }
        }
        let (i, t) = exit.expect("a ray inside a convex polygon leaves it");
        if remaining <= t {
            let end = p + d * remaining;
            segments.push(PathSegment::new(face, p, end));
            return Ok(GeodesicPath { segments, crossings, length, status: PathStatus::Complete });
        }
        let hit = p + d * t;
        let eps = VERTEX_EPS * charts.edge_length(face);
        let (a, b) = (corners[i], corners[(i + 1) % n]);
        if (hit - a).norm() < eps || (hit - b).norm() < eps {
            return Err(GeodesicError::HitVertex { face });
        }
        segments.push(PathSegment::new(face, p, hit));
        remaining -= t;
        let slot = SlotRef::new(face, i);
        if !s.is_glued(slot) {
            let walked = length - remaining;
            return Ok(GeodesicPath { segments, crossings, length: walked, status: PathStatus::HitBoundary });
        }
        let iso = transition(s, charts, slot)?;
        crossings.push(slot);
        face = s.partner(slot).unwrap().0.face;
        p = iso.apply(hit);
        d = iso.apply_vector(d);
        // Guard against drifting off the shared edge.
        debug_assert!(cross(charts.corner(face, 1) - charts.corner(face, 0), p - charts.corner(face, 0)) > -1e-6);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::football_disk;
    use crate::geodesics::Isometry;
    use crate::surface::FaceId;

    #[test]
    fn hexagon_center_ray_exits_opposite_midpoint() {
        let s = football_disk(6, 1);
        let ch = Charts::new(&s);
        let start = SurfacePoint::new(FaceId(0), 0.0, 0.0);
        let apothem = 3f64.sqrt() / 2.0;
        let path = trace_ray(&s, &ch, start, [0.0, 1.0], apothem).unwrap();
        assert_eq!(path.segments.len(), 1);
        let end = path.end().p();
        let (a, b) = ch.slot_endpoints(SlotRef::new(FaceId(0), 3));
        assert!((end - (a + b) / 2.0).norm() < 1e-12);
    }

    #[test]
    fn flat_patch_trace_is_straight() {
        let s = football_disk(6, 3);
        let ch = Charts::new(&s);
        let start = SurfacePoint::new(FaceId(0), 0.1, -0.05);
        let dir = P2::new(0.8, 0.6);
        let path = trace_ray(&s, &ch, start, [dir.x, dir.y], 3.7).unwrap();
        assert!(path.crossings.len() >= 2);
        // Unfold the visited faces back into the start chart.
        let mut back = Isometry::identity();
        for (k, slot) in path.crossings.iter().enumerate() {
            let t = transition(&s, &ch, *slot).unwrap();
            back = back.compose(&t.inverse());
            let seg = &path.segments[k + 1];
            let p0 = back.apply(seg.start());
            let p1 = back.apply(seg.end());
            for q in [p0, p1] {
                assert!(cross(dir, q - start.p()).abs() < 1e-9);
            }
        }
        let end = back.apply(path.end().p());
        assert!(((end - start.p()).norm() - 3.7).abs() < 1e-9);
    }

    #[test]
    fn aiming_at_corner_hits_vertex() {
        let s = football_disk(7, 1);
        let ch = Charts::new(&s);
        let corner = ch.corner(FaceId(0), 2);
        let d = corner.normalize();
        let err = trace_ray(&s, &ch, SurfacePoint::new(FaceId(0), 0.0, 0.0), [d.x, d.y], 5.0).unwrap_err();
        assert_eq!(err.code(), "HitVertex");
    }

    #[test]
    fn stops_at_boundary() {
        let s = football_disk(6, 0);
        let ch = Charts::new(&s);
        let path = trace_ray(&s, &ch, SurfacePoint::new(FaceId(0), 0.0, 0.0), [0.0, -1.0], 10.0).unwrap();
        assert_eq!(path.status, PathStatus::HitBoundary);
        assert!((path.length - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn splitting_a_trace_is_additive() {
        let s = football_disk(7, 2);
        let ch = Charts::new(&s);
        let start = SurfacePoint::new(FaceId(0), 0.05, 0.02);
        let d = P2::new(0.3, 0.7).normalize();
        let whole = trace_ray(&s, &ch, start, [d.x, d.y], 2.5).unwrap();
        let first = trace_ray(&s, &ch, start, [d.x, d.y], 1.1).unwrap();
        let last = first.segments.last().unwrap();
        let dir = (last.end() - last.start()).normalize();
        let second = trace_ray(&s, &ch, first.end(), [dir.x, dir.y], 1.4).unwrap();
        let a = whole.end();
        let b = second.end();
        assert_eq!(a.face, b.face);
        assert!((a.p() - b.p()).norm() < 1e-9);
    }
}
