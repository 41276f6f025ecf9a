//! Straight lines on the piecewise-flat surface.
//!
//! Every face gets a planar chart: a regular polygon centred at the origin
//! with slot 0 along the bottom. Crossing a glued edge maps one chart onto
//! the other by a rigid motion (a reflection for flipped gluings), so a
//! geodesic is a straight line in the plane once the faces it visits are
//! unfolded. Topology and curvature stay exact; floats begin here.

mod strip;
mod trace;
mod triangle;

pub use strip::{geodesic_in_strip, geodesic_via, shortest_geodesic, DEFAULT_STRIP_BOUND};
pub use trace::trace_ray;
pub use triangle::{check_triangle_theorem, triangle, triangle_from_sides, GeodesicTriangle, TheoremCheck};

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::surface::{FaceId, SlotRef, Surface};

pub type P2 = Vector2<f64>;

/// Rays closer than this fraction of the edge length to a corner are
/// treated as hitting the cone point.
pub const VERTEX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("slot {0} is not glued")]
    UngluedSlot(SlotRef),
    #[error("path runs into a vertex of face {face}")]
    HitVertex { face: FaceId },
    #[error("straight segment leaves the face strip")]
    SegmentEscapesStrip,
    #[error("not a strip: {0}")]
    NotAStrip(String),
    #[error("no geodesic found within {0} faces")]
    NoPathFound(usize),
    #[error("triangle does not bound a disk")]
    NotADisk,
    #[error("triangle sides intersect")]
    SidesIntersect,
    #[error("point {1:?} is outside face {0}")]
    InvalidPoint(FaceId, [f64; 2]),
    #[error("unknown face {0}")]
    UnknownFace(FaceId),
    #[error("direction must be a unit vector")]
    InvalidDirection,
    #[error("length must be positive")]
    NonPositiveLength,
}

impl GeodesicError {
    pub fn code(&self) -> &'static str {
        match self {
            GeodesicError::UngluedSlot(_) => "UngluedSlot",
            GeodesicError::HitVertex { .. } => "HitVertex",
            GeodesicError::SegmentEscapesStrip => "SegmentEscapesStrip",
            GeodesicError::NotAStrip(_) => "NotAStrip",
            GeodesicError::NoPathFound(_) => "NoPathFound",
            GeodesicError::NotADisk => "NotADisk",
            GeodesicError::SidesIntersect => "SidesIntersect",
            GeodesicError::InvalidPoint(..) => "InvalidPoint",
            GeodesicError::UnknownFace(_) => "UnknownFace",
            GeodesicError::InvalidDirection => "InvalidDirection",
            GeodesicError::NonPositiveLength => "NonPositiveLength",
        }
    }
}

/// A point of the surface given in its face's chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub face: FaceId,
    pub position: [f64; 2],
}

impl SurfacePoint {
    pub fn new(face: FaceId, x: f64, y: f64) -> Self {
        SurfacePoint { face, position: [x, y] }
    }

    pub fn at(face: FaceId, p: P2) -> Self {
        SurfacePoint { face, position: [p.x, p.y] }
    }

    pub fn p(&self) -> P2 {
        P2::new(self.position[0], self.position[1])
    }
}

/// A rigid motion of the plane, `x -> m x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub m: Matrix2<f64>,
    pub t: P2,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { m: Matrix2::identity(), t: P2::zeros() }
    }

    pub fn apply(&self, p: P2) -> P2 {
        self.m * p + self.t
    }

    pub fn apply_vector(&self, v: P2) -> P2 {
        self.m * v
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { m: self.m * other.m, t: self.m * other.t + self.t }
    }

    pub fn inverse(&self) -> Isometry {
        let mt = self.m.transpose();
        Isometry { m: mt, t: -(mt * self.t) }
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }
}

pub(crate) fn cross(a: P2, b: P2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn perp(u: P2) -> P2 {
    P2::new(-u.y, u.x)
}

/// Corner positions of a regular `n`-gon with side `length`, counterclockwise,
/// centred at the origin, slot 0 (corner 0 to corner 1) horizontal at the bottom.
pub fn polygon_chart(n: usize, length: f64) -> Vec<P2> {
    let r = circumradius(n, length);
    (0..n)
        .map(|i| {
            let theta = -PI / 2.0 - PI / n as f64 + 2.0 * PI * i as f64 / n as f64;
            P2::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

pub fn circumradius(n: usize, length: f64) -> f64 {
    length / (2.0 * (PI / n as f64).sin())
}

/// Planar charts of every face of one surface.
#[derive(Debug, Clone)]
pub struct Charts {
    corners: Vec<Vec<P2>>,
    lengths: Vec<f64>,
}

impl Charts {
    pub fn new(s: &Surface) -> Self {
        let lengths: Vec<f64> = s.faces().iter().map(|f| f.edge_length.to_f64().unwrap_or(f64::NAN)).collect();
        let corners = s.faces().iter().zip(&lengths).map(|(f, &l)| polygon_chart(f.sides, l)).collect();
        Charts { corners, lengths }
    }

    pub fn corners(&self, face: FaceId) -> &[P2] {
        &self.corners[face.0]
    }

    pub fn corner(&self, face: FaceId, index: usize) -> P2 {
        let c = &self.corners[face.0];
        c[index % c.len()]
    }

    pub fn edge_length(&self, face: FaceId) -> f64 {
        self.lengths[face.0]
    }

    pub fn face_count(&self) -> usize {
        self.corners.len()
    }

    /// Endpoints of a slot in its own face chart, tail first.
    pub fn slot_endpoints(&self, slot: SlotRef) -> (P2, P2) {
        (self.corner(slot.face, slot.index), self.corner(slot.face, slot.index + 1))
    }

    /// Inside or on the polygon, with a tolerance relative to the edge length.
    pub fn contains(&self, face: FaceId, p: P2) -> bool {
        let Some(c) = self.corners.get(face.0) else { return false };
        let tol = VERTEX_EPS * self.lengths[face.0];
        (0..c.len()).all(|i| {
            let a = c[i];
            let b = c[(i + 1) % c.len()];
            let e = (b - a).normalize();
            cross(e, p - a) >= -tol
        })
    }

    pub fn check_point(&self, p: &SurfacePoint) -> Result<(), GeodesicError> {
        if p.face.0 >= self.corners.len() {
            return Err(GeodesicError::UnknownFace(p.face));
        }
        if !self.contains(p.face, p.p()) {
            return Err(GeodesicError::InvalidPoint(p.face, p.position));
        }
        Ok(())
    }
}

/// The rigid motion carrying the chart of `from.face` onto the chart of the
/// partner face, matching the shared edge.
pub fn transition(s: &Surface, charts: &Charts, from: SlotRef) -> Result<Isometry, GeodesicError> {
    let (to, flipped) = s.partner(from).ok_or(GeodesicError::UngluedSlot(from))?;
    let (a, b) = charts.slot_endpoints(from);
    let (ta, tb) = charts.slot_endpoints(to);
    // Head-to-tail: our tail lands on their head. Head-to-head: tail on tail.
    let (a2, b2) = if flipped { (ta, tb) } else { (tb, ta) };
    let u = (b - a).normalize();
    let n = perp(u);
    let u2 = (b2 - a2).normalize();
    let n2 = if flipped { -perp(u2) } else { perp(u2) };
    let m = Matrix2::from_columns(&[u2, n2]) * Matrix2::from_columns(&[u, n]).transpose();
    Ok(Isometry { m, t: a2 - m * a })
}

/// A straight piece of a geodesic inside one face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub face: FaceId,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl PathSegment {
    pub fn new(face: FaceId, start: P2, end: P2) -> Self {
        PathSegment { face, start: [start.x, start.y], end: [end.x, end.y] }
    }

    pub fn start(&self) -> P2 {
        P2::new(self.start[0], self.start[1])
    }

    pub fn end(&self) -> P2 {
        P2::new(self.end[0], self.end[1])
    }

    pub fn length(&self) -> f64 {
        (self.end() - self.start()).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Complete,
    HitBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub segments: Vec<PathSegment>,
    /// Slots crossed, each on the side of the face being left.
    pub crossings: Vec<SlotRef>,
    pub length: f64,
    pub status: PathStatus,
}

impl GeodesicPath {
    pub fn start(&self) -> SurfacePoint {
        let s = &self.segments[0];
        SurfacePoint { face: s.face, position: s.start }
    }

    pub fn end(&self) -> SurfacePoint {
        let s = self.segments.last().unwrap();
        SurfacePoint { face: s.face, position: s.end }
    }

    pub fn faces(&self) -> Vec<FaceId> {
        self.segments.iter().map(|s| s.face).collect()
    }
}
