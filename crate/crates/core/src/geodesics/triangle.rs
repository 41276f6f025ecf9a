use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{cross, shortest_geodesic, Charts, GeodesicError, GeodesicPath, SurfacePoint, P2, VERTEX_EPS};
use crate::angle::AngleValue;
use crate::curvature::vertex_defect;
use crate::surface::{Corner, FaceId, SlotRef, Surface, VertexMap};

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicTriangle {
    pub corners: [SurfacePoint; 3],
    /// `a -> b`, `b -> c`, `c -> a`.
    pub sides: [GeodesicPath; 3],
    /// Interior angles in degrees at `a`, `b`, `c`.
    pub angles: [f64; 3],
    pub enclosed_vertices: Vec<usize>,
    /// Sum of the exact defects of the enclosed vertices.
    pub enclosed_curvature: AngleValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremCheck {
    /// `α + β + γ − 180°`.
    pub deviation: f64,
    pub enclosed: AngleValue,
    pub holds: bool,
}

pub fn check_triangle_theorem(t: &GeodesicTriangle) -> TheoremCheck {
    let deviation = t.angles.iter().sum::<f64>() - 180.0;
    let enclosed = t.enclosed_curvature;
    TheoremCheck { deviation, enclosed, holds: (deviation - enclosed.to_degrees_f64()).abs() < 1e-6 }
}

/// Connect three points pairwise by the shortest geodesics found within
/// `bound` faces and measure the resulting triangle.
pub fn triangle(
    s: &Surface,
    charts: &Charts,
    corners: [SurfacePoint; 3],
    bound: usize,
) -> Result<GeodesicTriangle, GeodesicError> {
    let [a, b, c] = corners;
    for (p, q) in [(a, b), (b, c), (c, a)] {
        if same_point(charts, p, q) {
            return Err(GeodesicError::SidesIntersect);
        }
    }
    let sides = [
        shortest_geodesic(s, charts, a, b, bound)?,
        shortest_geodesic(s, charts, b, c, bound)?,
        shortest_geodesic(s, charts, c, a, bound)?,
    ];
    triangle_from_sides(s, charts, sides)
}

fn same_point(charts: &Charts, p: SurfacePoint, q: SurfacePoint) -> bool {
    p.face == q.face && (p.p() - q.p()).norm() < VERTEX_EPS * charts.edge_length(p.face)
}

fn ccw_degrees(from: P2, to: P2) -> f64 {
    let a = cross(from, to).atan2(from.dot(&to)).to_degrees();
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

/// Measure a triangle whose sides are already known. Sides must run
/// `a -> b`, `b -> c`, `c -> a`.
pub fn triangle_from_sides(
    s: &Surface,
    charts: &Charts,
    sides: [GeodesicPath; 3],
) -> Result<GeodesicTriangle, GeodesicError> {
    let corners = [sides[0].start(), sides[1].start(), sides[2].start()];
    for k in 0..3 {
        if !same_point(charts, sides[k].end(), corners[(k + 1) % 3]) {
            return Err(GeodesicError::NotADisk);
        }
        if same_point(charts, corners[k], corners[(k + 1) % 3]) {
            return Err(GeodesicError::SidesIntersect);
        }
    }
    check_sides_disjoint(charts, &sides, &corners)?;
    let orient = face_orientations(s).ok_or(GeodesicError::NotADisk)?;
    let vmap = s.vertex_map();

    // Which side of the loop the interior lies on, and which vertices are inside.
    let (interior_left, enclosed) = match classify(s, charts, &vmap, &orient, &sides)? {
        Some(split) => split,
        None => {
            // No tiling edge is crossed: all three points share one face.
            let f = corners[0].face;
            let turn = cross(corners[1].p() - corners[0].p(), corners[2].p() - corners[0].p()) * orient[f.0];
            (turn > 0.0, Vec::new())
        }
    };

    let mut angles = [0.0; 3];
    for k in 0..3 {
        let out_seg = &sides[k].segments[0];
        let in_seg = sides[(k + 2) % 3].segments.last().unwrap();
        let d_out = out_seg.end() - out_seg.start();
        let d_back = in_seg.start() - in_seg.end();
        let mut ccw = ccw_degrees(d_out, d_back);
        if orient[out_seg.face.0] < 0.0 {
            ccw = 360.0 - ccw;
        }
        angles[k] = if interior_left { ccw } else { 360.0 - ccw };
    }
    let enclosed_curvature = enclosed
        .iter()
        .map(|&v| vertex_defect(s, &vmap.vertices[v]).map_err(|_| GeodesicError::NotADisk))
        .sum::<Result<AngleValue, _>>()?;
    Ok(GeodesicTriangle { corners, sides, angles, enclosed_vertices: enclosed, enclosed_curvature })
}

/// +1 or −1 per face so that all gluings agree; `None` if non-orientable.
fn face_orientations(s: &Surface) -> Option<Vec<f64>> {
    let mut o = vec![0.0; s.face_count()];
    for root in 0..s.face_count() {
        if o[root] != 0.0 {
            continue;
        }
        o[root] = 1.0;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for (i, _) in s.neighbours(FaceId(f)) {
                let (other, flipped) = s.partner(SlotRef::new(FaceId(f), i)).unwrap();
                let want = if flipped { -o[f] } else { o[f] };
                if o[other.face.0] == 0.0 {
                    o[other.face.0] = want;
                    queue.push_back(other.face.0);
                } else if o[other.face.0] != want {
                    return None;
                }
            }
        }
    }
    Some(o)
}

/// Split the tiling vertices by the parity of loop crossings along edges.
/// Returns whether the interior is on the loop's left and the interior
/// vertices, or `None` when the loop crosses no edge.
#[allow(clippy::type_complexity)]
fn classify(
    s: &Surface,
    charts: &Charts,
    vmap: &VertexMap,
    orient: &[f64],
    sides: &[GeodesicPath; 3],
) -> Result<Option<(bool, Vec<usize>)>, GeodesicError> {
    let edge_key = |slot: SlotRef| match s.partner(slot) {
        Some((o, _)) if o < slot => o,
        _ => slot,
    };
    // Crossing point, direction, slot.
    let mut hits: Vec<(P2, P2, SlotRef)> = Vec::new();
    for side in sides {
        for (k, &slot) in side.crossings.iter().enumerate() {
            let seg = &side.segments[k];
            hits.push((seg.end(), (seg.end() - seg.start()).normalize(), slot));
        }
    }
    if hits.is_empty() {
        return Ok(None);
    }
    let mut parity: BTreeMap<SlotRef, bool> = BTreeMap::new();
    for &(_, _, slot) in &hits {
        *parity.entry(edge_key(slot)).or_insert(false) ^= true;
    }
    let nv = vmap.len();
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nv];
    for slot in s.slots() {
        if edge_key(slot) != slot {
            continue;
        }
        let n = s.face(slot.face).sides;
        let u = vmap.vertex_of(Corner { face: slot.face, index: slot.index });
        let v = vmap.vertex_of(Corner { face: slot.face, index: (slot.index + 1) % n });
        let flip = parity.get(&slot).copied().unwrap_or(false);
        adj[u].push((v, flip));
        adj[v].push((u, flip));
    }
    let mut class: Vec<Option<bool>> = vec![None; nv];
    for root in 0..nv {
        if class[root].is_some() {
            continue;
        }
        class[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = class[u].unwrap();
            for &(v, flip) in &adj[u] {
                match class[v] {
                    None => {
                        class[v] = Some(cu ^ flip);
                        queue.push_back(v);
                    }
                    Some(cv) if cv != cu ^ flip => return Err(GeodesicError::NotADisk),
                    Some(_) => {}
                }
            }
        }
    }
    // Seed the side test at the crossing closest to an edge endpoint, so no
    // other crossing lies between them.
    let mut seed: Option<(f64, usize, bool)> = None;
    for &(h, d, slot) in &hits {
        let (a, b) = charts.slot_endpoints(slot);
        let n = s.face(slot.face).sides;
        for (x, idx) in [(a, slot.index), (b, (slot.index + 1) % n)] {
            let dist = (x - h).norm();
            if seed.is_none_or(|(best, _, _)| dist < best) {
                let left = cross(d, x - h) * orient[slot.face.0] > 0.0;
                seed = Some((dist, vmap.vertex_of(Corner { face: slot.face, index: idx }), left));
            }
        }
    }
    let (_, v, v_left) = seed.unwrap();
    let left_class = if v_left { class[v].unwrap() } else { !class[v].unwrap() };
    let boundary_in = |c: bool| vmap.vertices.iter().enumerate().any(|(i, vx)| !vx.is_interior() && class[i] == Some(c));
    let interior_left = match (boundary_in(left_class), boundary_in(!left_class)) {
        (true, true) => return Err(GeodesicError::NotADisk),
        (true, false) => false,
        _ => true,
    };
    let inside = if interior_left { left_class } else { !left_class };
    let enclosed = (0..nv).filter(|&i| class[i] == Some(inside)).collect();
    Ok(Some((interior_left, enclosed)))
}

fn segment_hit(p0: P2, p1: P2, q0: P2, q1: P2) -> Option<P2> {
    let d = p1 - p0;
    let e = q1 - q0;
    let denom = cross(d, e);
    let tol = 1e-12;
    if denom.abs() < 1e-14 {
        // Parallel: only overlapping collinear pieces count.
        if cross(d, q0 - p0).abs() > 1e-12 {
            return None;
        }
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return None;
        }
        for q in [q0, q1] {
            let t = (q - p0).dot(&d) / len2;
            if (-tol..=1.0 + tol).contains(&t) {
                return Some(q);
            }
        }
        return None;
    }
    let t = cross(q0 - p0, e) / denom;
    let u = cross(q0 - p0, d) / denom;
    ((-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u)).then(|| p0 + d * t)
}

fn check_sides_disjoint(
    charts: &Charts,
    sides: &[GeodesicPath; 3],
    corners: &[SurfacePoint; 3],
) -> Result<(), GeodesicError> {
    let mut by_face: BTreeMap<FaceId, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, side) in sides.iter().enumerate() {
        for (j, seg) in side.segments.iter().enumerate() {
            by_face.entry(seg.face).or_default().push((k, j));
        }
    }
    for (face, segs) in by_face {
        let eps = VERTEX_EPS * charts.edge_length(face) * 10.0;
        for x in 0..segs.len() {
            for y in x + 1..segs.len() {
                let (ka, ja) = segs[x];
                let (kb, jb) = segs[y];
                let sa = &sides[ka].segments[ja];
                let sb = &sides[kb].segments[jb];
                let Some(hit) = segment_hit(sa.start(), sa.end(), sb.start(), sb.end()) else { continue };
                // Adjacent sides may touch only at their shared corner.
                let shared = corners.iter().enumerate().any(|(ci, c)| {
                    let at_corner = c.face == face && (c.p() - hit).norm() < eps;
                    let ends_a = (ka == ci && ja == 0) || ((ka + 1) % 3 == ci && ja + 1 == sides[ka].segments.len());
                    let ends_b = (kb == ci && jb == 0) || ((kb + 1) % 3 == ci && jb + 1 == sides[kb].segments.len());
                    at_corner && ends_a && ends_b && ka != kb
                });
                if !shared {
                    return Err(GeodesicError::SidesIntersect);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::football_disk;
    use crate::geodesics::DEFAULT_STRIP_BOUND;

    #[test]
    fn small_flat_triangle_sums_to_180() {
        let s = football_disk(6, 1);
        let ch = Charts::new(&s);
        let pts = [
            SurfacePoint::new(FaceId(0), -0.3, -0.2),
            SurfacePoint::new(FaceId(0), 0.4, -0.1),
            SurfacePoint::new(FaceId(0), 0.0, 0.5),
        ];
        let t = triangle(&s, &ch, pts, DEFAULT_STRIP_BOUND).unwrap();
        assert!((t.angles.iter().sum::<f64>() - 180.0).abs() < 1e-9);
        let check = check_triangle_theorem(&t);
        assert!(check.holds && check.enclosed.is_zero());
        // Clockwise order measures the same interior.
        let rev = triangle(&s, &ch, [pts[0], pts[2], pts[1]], DEFAULT_STRIP_BOUND).unwrap();
        assert!((rev.angles.iter().sum::<f64>() - 180.0).abs() < 1e-9);
    }

    fn random_point(s: &Surface, ch: &Charts, rng: &mut impl rand::Rng) -> SurfacePoint {
        let f = FaceId(rng.gen_range(0..s.face_count()));
        let c = ch.corners(f);
        let k = rng.gen_range(0..c.len());
        // Uniform in the triangle (center, c[k], c[k+1]).
        let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
        if u + v > 1.0 {
            (u, v) = (1.0 - u, 1.0 - v);
        }
        SurfacePoint::at(f, c[k] * u + c[(k + 1) % c.len()] * v)
    }

    #[test]
    fn hyperbolic_triangles_satisfy_theorem() {
        use rand::SeedableRng;
        let s = football_disk(7, 2);
        let ch = Charts::new(&s);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut curved = 0;
        for _ in 0..400 {
            let pts = [0, 1, 2].map(|_| random_point(&s, &ch, &mut rng));
            let Ok(t) = triangle(&s, &ch, pts, DEFAULT_STRIP_BOUND) else { continue };
            let check = check_triangle_theorem(&t);
            assert!(check.holds, "{check:?} {:?}", t.angles);
            if !t.enclosed_vertices.is_empty() {
                curved += 1;
                assert!(check.enclosed.is_negative());
            }
            if curved >= 5 {
                return;
            }
        }
        panic!("too few curved triangles: {curved}");
    }

    #[test]
    fn coincident_corners_rejected() {
        let s = football_disk(6, 1);
        let ch = Charts::new(&s);
        let p = SurfacePoint::new(FaceId(0), 0.1, 0.1);
        let q = SurfacePoint::new(FaceId(0), -0.1, 0.2);
        let err = triangle(&s, &ch, [p, p, q], DEFAULT_STRIP_BOUND).unwrap_err();
        assert_eq!(err, GeodesicError::SidesIntersect);
    }
}
