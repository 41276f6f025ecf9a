use std::collections::HashSet;

use super::{
    cross, transition, Charts, GeodesicError, GeodesicPath, Isometry, PathSegment, PathStatus, SurfacePoint, P2,
    VERTEX_EPS,
};
use crate::surface::{FaceId, SlotRef, Surface};

/// Default cap on the number of faces a searched strip may visit.
pub const DEFAULT_STRIP_BOUND: usize = 64;

/// Unfold `strip` into the chart of its first face and connect `p` to `q`
/// by the straight segment, if that segment stays inside the strip.
pub fn geodesic_in_strip(
    s: &Surface,
    charts: &Charts,
    p: SurfacePoint,
    q: SurfacePoint,
    strip: &[FaceId],
) -> Result<GeodesicPath, GeodesicError> {
    if strip.first() != Some(&p.face) || strip.last() != Some(&q.face) {
        return Err(GeodesicError::NotAStrip("strip must start at p's face and end at q's face".into()));
    }
    let mut crossings = Vec::with_capacity(strip.len().saturating_sub(1));
    for w in strip.windows(2) {
        let f = s.faces().get(w[0].0).ok_or(GeodesicError::UnknownFace(w[0]))?;
        let slot = (0..f.sides)
            .map(|i| SlotRef::new(w[0], i))
            .find(|&slot| s.partner(slot).is_some_and(|(o, _)| o.face == w[1]))
            .ok_or_else(|| GeodesicError::NotAStrip(format!("faces {} and {} are not glued", w[0], w[1])))?;
        crossings.push(slot);
    }
    geodesic_via(s, charts, p, q, &crossings)
}

/// Same as [`geodesic_in_strip`] with the crossed slots given explicitly,
/// each on the side of the face being left.
pub fn geodesic_via(
    s: &Surface,
    charts: &Charts,
    p: SurfacePoint,
    q: SurfacePoint,
    crossings: &[SlotRef],
) -> Result<GeodesicPath, GeodesicError> {
    charts.check_point(&p)?;
    charts.check_point(&q)?;
    // to_plane[k] maps the chart of face k into the chart of face 0.
    let mut to_plane = vec![Isometry::identity()];
    let mut faces = vec![p.face];
    for &slot in crossings {
        if slot.face != *faces.last().unwrap() {
            return Err(GeodesicError::NotAStrip(format!("slot {slot} is not on face {}", faces.last().unwrap())));
        }
        let t = transition(s, charts, slot)?;
        let next = to_plane.last().unwrap().compose(&t.inverse());
        to_plane.push(next);
        faces.push(s.partner(slot).unwrap().0.face);
    }
    if *faces.last().unwrap() != q.face {
        return Err(GeodesicError::NotAStrip("strip does not end at q's face".into()));
    }
    let start = p.p();
    let end = to_plane.last().unwrap().apply(q.p());
    if crossings.is_empty() {
        let seg = PathSegment::new(p.face, start, q.p());
        let length = seg.length();
        return Ok(GeodesicPath { segments: vec![seg], crossings: vec![], length, status: PathStatus::Complete });
    }
    let d = end - start;
    let mut params = Vec::with_capacity(crossings.len());
    let mut last = 0.0;
    for (k, &slot) in crossings.iter().enumerate() {
        let (a, b) = charts.slot_endpoints(slot);
        let (a, b) = (to_plane[k].apply(a), to_plane[k].apply(b));
        let e = b - a;
        let denom = cross(d, e);
        if denom.abs() < 1e-300 {
            return Err(GeodesicError::SegmentEscapesStrip);
        }
        // start + t d = a + u e
        let t = cross(a - start, e) / denom;
        let u = cross(a - start, d) / denom;
        let len = e.norm();
        let eps = VERTEX_EPS * charts.edge_length(slot.face);
        if !(-eps / len..=1.0 + eps / len).contains(&u) || t < last || t > 1.0 {
            return Err(GeodesicError::SegmentEscapesStrip);
        }
        if u * len < eps || (1.0 - u) * len < eps {
            return Err(GeodesicError::HitVertex { face: slot.face });
        }
        params.push(t);
        last = t;
    }
    let mut segments = Vec::with_capacity(faces.len());
    let mut from = start;
    for k in 0..faces.len() {
        let to = if k < params.len() { start + d * params[k] } else { end };
        let back = to_plane[k].inverse();
        segments.push(PathSegment::new(faces[k], back.apply(from), back.apply(to)));
        from = to;
    }
    Ok(GeodesicPath { segments, crossings: crossings.to_vec(), length: d.norm(), status: PathStatus::Complete })
}

/// The directions from a fixed origin that pass through every window so far,
/// as a right and a left boundary ray.
#[derive(Clone, Copy)]
struct Wedge {
    right: P2,
    left: P2,
}

impl Wedge {
    fn through(origin: P2, a: P2, b: P2) -> Wedge {
        let (ra, rb) = (a - origin, b - origin);
        if cross(ra, rb) >= 0.0 {
            Wedge { right: ra, left: rb }
        } else {
            Wedge { right: rb, left: ra }
        }
    }

    fn intersect(self, other: Wedge) -> Option<Wedge> {
        let right = if cross(self.right, other.right) > 0.0 { other.right } else { self.right };
        let left = if cross(self.left, other.left) > 0.0 { self.left } else { other.left };
        (cross(right, left) > 0.0).then_some(Wedge { right, left })
    }

    fn contains(&self, d: P2) -> bool {
        cross(self.right, d) >= 0.0 && cross(d, self.left) >= 0.0
    }
}

fn dist_to_segment(p: P2, a: P2, b: P2) -> f64 {
    let e = b - a;
    let t = ((p - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
    (a + e * t - p).norm()
}

struct Search<'a> {
    s: &'a Surface,
    charts: &'a Charts,
    p: SurfacePoint,
    q: SurfacePoint,
    bound: usize,
    best: Option<GeodesicPath>,
    visited: HashSet<FaceId>,
    crossings: Vec<SlotRef>,
}

impl Search<'_> {
    fn best_len(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.length)
    }

    fn dfs(&mut self, face: FaceId, to_plane: Isometry, wedge: Option<Wedge>) {
        if face == self.q.face {
            let end = to_plane.apply(self.q.p());
            let inside = wedge.is_none_or(|w| w.contains(end - self.p.p()));
            if inside && (end - self.p.p()).norm() < self.best_len() {
                if let Ok(path) = geodesic_via(self.s, self.charts, self.p, self.q, &self.crossings) {
                    self.best = Some(path);
                }
            }
            return;
        }
        if self.visited.len() >= self.bound {
            return;
        }
        let n = self.s.face(face).sides;
        for i in 0..n {
            let slot = SlotRef::new(face, i);
            let Some((other, _)) = self.s.partner(slot) else { continue };
            if self.visited.contains(&other.face) {
                continue;
            }
            let (a, b) = self.charts.slot_endpoints(slot);
            let (a, b) = (to_plane.apply(a), to_plane.apply(b));
            if dist_to_segment(self.p.p(), a, b) >= self.best_len() {
                continue;
            }
            let window = Wedge::through(self.p.p(), a, b);
            let next = match wedge {
                None => Some(window),
                Some(w) => w.intersect(window),
            };
            let Some(next) = next else { continue };
            let Ok(t) = transition(self.s, self.charts, slot) else { continue };
            self.visited.insert(other.face);
            self.crossings.push(slot);
            self.dfs(other.face, to_plane.compose(&t.inverse()), Some(next));
            self.crossings.pop();
            self.visited.remove(&other.face);
        }
    }
}

/// Shortest straight-under-unfolding connection from `p` to `q` over face
/// strips visiting at most `bound` faces. Strips that cannot contain the
/// segment are pruned by the shrinking window of visible directions.
pub fn shortest_geodesic(
    s: &Surface,
    charts: &Charts,
    p: SurfacePoint,
    q: SurfacePoint,
    bound: usize,
) -> Result<GeodesicPath, GeodesicError> {
    charts.check_point(&p)?;
    charts.check_point(&q)?;
    let mut search = Search {
        s,
        charts,
        p,
        q,
        bound,
        best: None,
        visited: HashSet::from([p.face]),
        crossings: Vec::new(),
    };
    search.dfs(p.face, Isometry::identity(), None);
    search.best.ok_or(GeodesicError::NoPathFound(bound))
}
