//! Exact curvature and topology invariants.
//!
//! Curvature of a glued-polygon surface is concentrated at its vertices. An
//! interior vertex carries an angle defect `360° - angle sum` (negative values
//! are angle excess); a boundary vertex carries a turning angle
//! `180° - angle sum`. All values are exact rationals, so Descartes and
//! Gauss–Bonnet identities are checked with equality, never a tolerance.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::angle::AngleValue;
use crate::surface::{BoundaryLoop, FaceId, SlotRef, Surface, Vertex, VertexKind, VertexMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurvatureError {
    #[error("a polygon needs at least 3 sides, got {0}")]
    SidesTooSmall(usize),
    #[error("vertex is on the boundary; use its turning angle instead")]
    BoundaryVertex,
    #[error("vertex is interior; it has a defect, not a turning angle")]
    InteriorVertex,
    #[error("surface has a boundary")]
    NotClosed,
    #[error("surface is not orientable")]
    NotOrientable,
    #[error("Euler characteristic {0} is odd on a closed orientable surface")]
    OddChi(i64),
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is not a connected subsurface: {0}")]
    DisconnectedRegion(String),
    #[error("unknown face {0}")]
    UnknownFace(FaceId),
    #[error("defect must be positive, got {0}")]
    NonPositiveDefect(AngleValue),
    #[error("720° is not an integer multiple of {0}")]
    NotIntegral(AngleValue),
}

impl CurvatureError {
    pub fn code(&self) -> &'static str {
        match self {
            CurvatureError::SidesTooSmall(_) => "SidesTooSmall",
            CurvatureError::BoundaryVertex => "BoundaryVertex",
            CurvatureError::InteriorVertex => "InteriorVertex",
            CurvatureError::NotClosed => "NotClosed",
            CurvatureError::NotOrientable => "NotOrientable",
            CurvatureError::OddChi(_) => "OddChi",
            CurvatureError::EmptyRegion => "EmptyRegion",
            CurvatureError::DisconnectedRegion(_) => "DisconnectedRegion",
            CurvatureError::UnknownFace(_) => "UnknownFace",
            CurvatureError::NonPositiveDefect(_) => "NonPositiveDefect",
            CurvatureError::NotIntegral(_) => "NotIntegral",
        }
    }
}

/// Interior angle of a regular polygon: `(n - 2)·180°/n`.
pub fn interior_angle(sides: usize) -> Result<AngleValue, CurvatureError> {
    if sides < 3 {
        return Err(CurvatureError::SidesTooSmall(sides));
    }
    let n = sides as i64;
    Ok(AngleValue::from_ratio((n - 2) * 180, n))
}

fn angle_of(s: &Surface, face: FaceId) -> AngleValue {
    interior_angle(s.face(face).sides).expect("faces always have at least 3 sides")
}

/// Sum of the face angles meeting at `v`.
pub fn angle_sum(s: &Surface, v: &Vertex) -> AngleValue {
    v.corners.iter().map(|c| angle_of(s, c.face)).sum()
}

pub fn vertex_defect(s: &Surface, v: &Vertex) -> Result<AngleValue, CurvatureError> {
    match v.kind {
        VertexKind::Interior => Ok(AngleValue::degrees(360) - angle_sum(s, v)),
        VertexKind::Boundary => Err(CurvatureError::BoundaryVertex),
    }
}

pub fn boundary_turning(s: &Surface, v: &Vertex) -> Result<AngleValue, CurvatureError> {
    match v.kind {
        VertexKind::Boundary => Ok(AngleValue::degrees(180) - angle_sum(s, v)),
        VertexKind::Interior => Err(CurvatureError::InteriorVertex),
    }
}

/// Defect at interior vertices, turning at boundary vertices.
pub fn vertex_curvature(s: &Surface, v: &Vertex) -> AngleValue {
    match v.kind {
        VertexKind::Interior => AngleValue::degrees(360) - angle_sum(s, v),
        VertexKind::Boundary => AngleValue::degrees(180) - angle_sum(s, v),
    }
}

/// Sum of defects over interior vertices only.
pub fn total_defect(s: &Surface) -> AngleValue {
    total_defect_with(s, &s.vertex_map())
}

pub fn total_defect_with(s: &Surface, vmap: &VertexMap) -> AngleValue {
    vmap.vertices
        .iter()
        .filter(|v| v.is_interior())
        .map(|v| AngleValue::degrees(360) - angle_sum(s, v))
        .sum()
}

pub fn euler_characteristic(s: &Surface) -> i64 {
    s.euler_characteristic()
}

pub fn genus(s: &Surface) -> Result<i64, CurvatureError> {
    if !s.is_closed() {
        return Err(CurvatureError::NotClosed);
    }
    if !s.is_orientable() {
        return Err(CurvatureError::NotOrientable);
    }
    let chi = s.euler_characteristic();
    if chi % 2 != 0 {
        return Err(CurvatureError::OddChi(chi));
    }
    Ok((2 - chi) / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DescartesCheck {
    pub holds: bool,
    /// Total defect.
    pub lhs: AngleValue,
    /// `360°·χ`.
    pub rhs: AngleValue,
}

pub fn check_descartes(s: &Surface) -> Result<DescartesCheck, CurvatureError> {
    if !s.is_closed() {
        return Err(CurvatureError::NotClosed);
    }
    let lhs = total_defect(s);
    let rhs = AngleValue::degrees(360) * s.euler_characteristic();
    Ok(DescartesCheck { holds: lhs == rhs, lhs, rhs })
}

/// Sum of turning angles at the vertices of a boundary loop.
pub fn total_turning(s: &Surface, vmap: &VertexMap, boundary: &BoundaryLoop) -> AngleValue {
    boundary
        .vertices
        .iter()
        .map(|&v| AngleValue::degrees(180) - angle_sum(s, &vmap.vertices[v]))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionReport {
    /// Sum of defects at vertices whose corners all lie inside the region.
    pub enclosed: AngleValue,
    /// Total turning along every boundary loop of the region.
    pub turning: AngleValue,
    pub chi: i64,
    pub holds: bool,
    /// Vertices of the full surface counted in `enclosed`.
    pub enclosed_vertices: Vec<usize>,
}

/// The region as a standalone surface, plus the map from its faces back to
/// the parent's.
pub fn subsurface(s: &Surface, region: &BTreeSet<FaceId>) -> (Surface, Vec<FaceId>) {
    let faces: Vec<FaceId> = region.iter().copied().collect();
    let mut new_id = vec![None; s.face_count()];
    let mut sub = Surface::new();
    for &f in &faces {
        let face = s.face(f);
        let id = sub
            .add_face(face.sides, face.edge_length)
            .expect("faces of a valid surface are valid");
        new_id[f.0] = Some(id);
    }
    for g in s.gluings() {
        if let (Some(a), Some(b)) = (new_id[g.a.face.0], new_id[g.b.face.0]) {
            sub.glue(SlotRef::new(a, g.a.index), SlotRef::new(b, g.b.index), g.flipped)
                .expect("gluings of a valid surface are valid");
        }
    }
    (sub, faces)
}

/// Gauss–Bonnet for a connected region: `enclosed = 360°·χ - turning`.
pub fn region_gauss_bonnet(s: &Surface, region: &[FaceId]) -> Result<RegionReport, CurvatureError> {
    if region.is_empty() {
        return Err(CurvatureError::EmptyRegion);
    }
    if let Some(&bad) = region.iter().find(|f| f.0 >= s.face_count()) {
        return Err(CurvatureError::UnknownFace(bad));
    }
    let set: BTreeSet<FaceId> = region.iter().copied().collect();
    let (sub, back) = subsurface(s, &set);
    if !sub.is_connected() {
        return Err(CurvatureError::DisconnectedRegion("faces do not form one glued piece".into()));
    }
    let parent = s.vertex_map();
    let vmap = sub.vertex_map();

    // Each parent vertex may appear as at most one fan of the region.
    let mut owner = vec![None; parent.len()];
    for (sv, v) in vmap.vertices.iter().enumerate() {
        let c = v.corners[0];
        let pv = parent.vertex_of(crate::surface::Corner { face: back[c.face.0], index: c.index });
        match owner[pv] {
            None => owner[pv] = Some(sv),
            Some(o) if o != sv => {
                return Err(CurvatureError::DisconnectedRegion(format!(
                    "vertex {pv} is touched by the region in more than one fan"
                )))
            }
            Some(_) => {}
        }
    }

    let mut enclosed = AngleValue::ZERO;
    let mut enclosed_vertices = Vec::new();
    for v in vmap.vertices.iter().filter(|v| v.is_interior()) {
        enclosed += AngleValue::degrees(360) - angle_sum(&sub, v);
        let c = v.corners[0];
        enclosed_vertices.push(parent.vertex_of(crate::surface::Corner { face: back[c.face.0], index: c.index }));
    }
    enclosed_vertices.sort_unstable();
    let turning: AngleValue = sub
        .boundary_loops_with(&vmap)
        .iter()
        .map(|l| total_turning(&sub, &vmap, l))
        .sum();
    let chi = sub.euler_characteristic();
    let holds = enclosed == AngleValue::degrees(360) * chi - turning;
    Ok(RegionReport { enclosed, turning, chi, holds, enclosed_vertices })
}

/// Vertex count of a vertex-transitive sphere with the given defect: `720°/defect`.
pub fn vertex_count_from_defect(defect: AngleValue) -> Result<u64, CurvatureError> {
    if !defect.is_positive() {
        return Err(CurvatureError::NonPositiveDefect(defect));
    }
    let q = AngleValue::degrees(720).rational() / defect.rational();
    if !q.is_integer() {
        return Err(CurvatureError::NotIntegral(defect));
    }
    Ok(q.to_integer() as u64)
}

/// One row of the per-vertex table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCurvatureReport {
    pub vertex: usize,
    pub kind: VertexKind,
    /// Side counts of the faces at this vertex, in fan order.
    pub config: Vec<usize>,
    pub angle_sum: AngleValue,
    /// Defect for interior vertices, turning for boundary vertices.
    pub value: AngleValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyReport {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub chi: i64,
    pub closed: bool,
    pub orientable: bool,
    pub genus: Option<i64>,
    pub total_defect: AngleValue,
    /// `None` for surfaces with boundary.
    pub descartes_holds: Option<bool>,
    pub boundary_loops: usize,
    pub total_turning: AngleValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureAnalysis {
    pub topology: TopologyReport,
    pub vertices: Vec<VertexCurvatureReport>,
}

pub fn analyze(s: &Surface) -> CurvatureAnalysis {
    let vmap = s.vertex_map();
    let vertices: Vec<VertexCurvatureReport> = vmap
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| VertexCurvatureReport {
            vertex: i,
            kind: v.kind,
            config: v.corners.iter().map(|c| s.face(c.face).sides).collect(),
            angle_sum: angle_sum(s, v),
            value: vertex_curvature(s, v),
        })
        .collect();
    let (v, e, f) = s.counts();
    let chi = v as i64 - e as i64 + f as i64;
    let closed = s.is_closed();
    let orientable = s.is_orientable();
    let total_defect = total_defect_with(s, &vmap);
    let loops = s.boundary_loops_with(&vmap);
    let total_turning = loops.iter().map(|l| total_turning(s, &vmap, l)).sum();
    let genus = (closed && orientable && chi % 2 == 0).then_some((2 - chi) / 2);
    let descartes_holds = closed.then(|| total_defect == AngleValue::degrees(360) * chi);
    CurvatureAnalysis {
        topology: TopologyReport {
            v,
            e,
            f,
            chi,
            closed,
            orientable,
            genus,
            total_defect,
            descartes_holds,
            boundary_loops: loops.len(),
            total_turning,
        },
        vertices,
    }
}

/// Serializable per-vertex config summary used by callers that group vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConfigKey(pub Vec<usize>);

impl ConfigKey {
    /// Sorted multiset of side counts.
    pub fn of(s: &Surface, v: &Vertex) -> Self {
        let mut c: Vec<usize> = v.corners.iter().map(|c| s.face(c.face).sides).collect();
        c.sort_unstable();
        ConfigKey(c)
    }
}
