//! Combinatorial kernel: regular polygon faces, directed edge slots and the
//! gluing involution between them.
//!
//! Slot `i` of an `n`-gon runs from corner `i` to corner `(i + 1) % n`, with
//! corners numbered counterclockwise as seen from the front of the face. An
//! unflipped gluing identifies two slots head-to-tail, which is the
//! orientation-compatible case; a flipped gluing identifies them head-to-head.
//!
//! Vertices, edges and boundary loops are derived on demand from the faces
//! and gluings. The kernel is append-only: faces and gluings are never
//! removed (undo lives in the session layer).

mod spec_file;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

pub use spec_file::{parse_spec, write_spec, SpecError};

/// Edge length of a face, an exact positive rational.
pub type Length = Rational64;

/// Dense face identifier assigned in creation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceId(pub usize);

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One directed boundary edge of one face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub face: FaceId,
    pub index: usize,
}

impl SlotRef {
    pub fn new(face: FaceId, index: usize) -> Self {
        SlotRef { face, index }
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.face.0, self.index)
    }
}

/// One corner of one face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub face: FaceId,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub sides: usize,
    pub edge_length: Length,
    /// Symbolic name carried through spec files.
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub a: SlotRef,
    pub b: SlotRef,
    pub flipped: bool,
}

impl Gluing {
    pub fn partner_of(&self, slot: SlotRef) -> Option<SlotRef> {
        if slot == self.a {
            Some(self.b)
        } else if slot == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("a face needs at least 3 sides, got {0}")]
    SidesTooSmall(usize),
    #[error("edge length must be positive, got {0}")]
    NonPositiveLength(Length),
    #[error("unknown face {0}")]
    UnknownFace(FaceId),
    #[error("slot {0} is out of range for its face")]
    SlotOutOfRange(SlotRef),
    #[error("slot {0} is already glued")]
    AlreadyGlued(SlotRef),
    #[error("cannot glue slots of different lengths ({0} vs {1})")]
    LengthMismatch(Length, Length),
    #[error("cannot glue slot {0} to itself")]
    SelfSlot(SlotRef),
    #[error("face label `{0}` is already in use")]
    DuplicateLabel(String),
}

impl SurfaceError {
    pub fn code(&self) -> &'static str {
        match self {
            SurfaceError::SidesTooSmall(_) => "SidesTooSmall",
            SurfaceError::NonPositiveLength(_) => "NonPositiveLength",
            SurfaceError::UnknownFace(_) => "UnknownFace",
            SurfaceError::SlotOutOfRange(_) => "SlotOutOfRange",
            SurfaceError::AlreadyGlued(_) => "AlreadyGlued",
            SurfaceError::LengthMismatch(..) => "LengthMismatch",
            SurfaceError::SelfSlot(_) => "SelfSlot",
            SurfaceError::DuplicateLabel(_) => "DuplicateLabel",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    /// The corner cycle closes up.
    Interior,
    /// The corners form an open fan on the boundary.
    Boundary,
}

/// A derived vertex: the corners identified by the gluings, in fan order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub corners: Vec<Corner>,
    pub kind: VertexKind,
}

impl Vertex {
    pub fn is_interior(&self) -> bool {
        self.kind == VertexKind::Interior
    }
}

/// A boundary component. `vertices[k]` sits between `slots[k]` and
/// `slots[(k + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryLoop {
    pub slots: Vec<SlotRef>,
    pub vertices: Vec<usize>,
}

/// Vertices of a surface together with the corner → vertex lookup.
#[derive(Clone, Debug)]
pub struct VertexMap {
    pub vertices: Vec<Vertex>,
    corner_vertex: Vec<Vec<usize>>,
}

impl VertexMap {
    pub fn vertex_of(&self, corner: Corner) -> usize {
        self.corner_vertex[corner.face.0][corner.index]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Which side of a corner a link leaves through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    /// Through slot `index - 1`.
    Prev,
    /// Through slot `index`.
    Next,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Prev => Side::Next,
            Side::Next => Side::Prev,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

/// A complex of regular polygons glued along edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Surface {
    faces: Vec<Face>,
    gluings: Vec<Gluing>,
    /// Per face, per slot: index into `gluings`.
    slot_gluing: Vec<Vec<Option<usize>>>,
}

pub fn new_surface() -> Surface {
    Surface::new()
}

impl Surface {
    pub fn new() -> Self {
        Surface::default()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id.0]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.faces.len()).map(FaceId)
    }

    pub fn add_face(&mut self, sides: usize, edge_length: Length) -> Result<FaceId, SurfaceError> {
        self.add_face_with_label(sides, edge_length, None)
    }

    /// Shorthand for a unit-length face.
    pub fn add_unit_face(&mut self, sides: usize) -> Result<FaceId, SurfaceError> {
        self.add_face(sides, Length::one())
    }

    pub fn add_face_with_label(
        &mut self,
        sides: usize,
        edge_length: Length,
        label: Option<String>,
    ) -> Result<FaceId, SurfaceError> {
        if sides < 3 {
            return Err(SurfaceError::SidesTooSmall(sides));
        }
        if !edge_length.is_positive() {
            return Err(SurfaceError::NonPositiveLength(edge_length));
        }
        if let Some(l) = &label {
            if self.faces.iter().any(|f| f.label.as_deref() == Some(l)) {
                return Err(SurfaceError::DuplicateLabel(l.clone()));
            }
        }
        let id = FaceId(self.faces.len());
        self.faces.push(Face { id, sides, edge_length, label });
        self.slot_gluing.push(vec![None; sides]);
        Ok(id)
    }

    fn check_slot(&self, slot: SlotRef) -> Result<(), SurfaceError> {
        let face = self.faces.get(slot.face.0).ok_or(SurfaceError::UnknownFace(slot.face))?;
        if slot.index >= face.sides {
            return Err(SurfaceError::SlotOutOfRange(slot));
        }
        Ok(())
    }

    pub fn glue(&mut self, a: SlotRef, b: SlotRef, flipped: bool) -> Result<(), SurfaceError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        if a == b {
            return Err(SurfaceError::SelfSlot(a));
        }
        for s in [a, b] {
            if self.slot_gluing[s.face.0][s.index].is_some() {
                return Err(SurfaceError::AlreadyGlued(s));
            }
        }
        let (la, lb) = (self.faces[a.face.0].edge_length, self.faces[b.face.0].edge_length);
        if la != lb {
            return Err(SurfaceError::LengthMismatch(la, lb));
        }
        let idx = self.gluings.len();
        self.gluings.push(Gluing { a, b, flipped });
        self.slot_gluing[a.face.0][a.index] = Some(idx);
        self.slot_gluing[b.face.0][b.index] = Some(idx);
        Ok(())
    }

    pub fn gluing_at(&self, slot: SlotRef) -> Option<&Gluing> {
        self.slot_gluing
            .get(slot.face.0)
            .and_then(|v| v.get(slot.index))
            .copied()
            .flatten()
            .map(|i| &self.gluings[i])
    }

    /// The slot glued to `slot` and whether the gluing is flipped.
    pub fn partner(&self, slot: SlotRef) -> Option<(SlotRef, bool)> {
        self.gluing_at(slot).map(|g| (g.partner_of(slot).expect("gluing index out of sync"), g.flipped))
    }

    pub fn is_glued(&self, slot: SlotRef) -> bool {
        self.gluing_at(slot).is_some()
    }

    pub fn slots(&self) -> impl Iterator<Item = SlotRef> + '_ {
        self.faces
            .iter()
            .flat_map(|f| (0..f.sides).map(move |i| SlotRef::new(f.id, i)))
    }

    pub fn unglued_slots(&self) -> impl Iterator<Item = SlotRef> + '_ {
        self.slots().filter(move |s| !self.is_glued(*s))
    }

    pub fn total_slots(&self) -> usize {
        self.faces.iter().map(|f| f.sides).sum()
    }

    /// The corner across `side` of `corner`, and the side it is entered through.
    fn link(&self, corner: Corner, side: Side) -> Option<(Corner, Side)> {
        let n = self.faces[corner.face.0].sides;
        let slot = match side {
            Side::Next => SlotRef::new(corner.face, corner.index),
            Side::Prev => SlotRef::new(corner.face, (corner.index + n - 1) % n),
        };
        let (other, flipped) = self.partner(slot)?;
        let m = self.faces[other.face.0].sides;
        let tail = Corner { face: other.face, index: other.index };
        let head = Corner { face: other.face, index: (other.index + 1) % m };
        // Head-to-tail identifies our tail with their head and vice versa;
        // head-to-head pairs tail with tail.
        Some(match (side, flipped) {
            (Side::Next, false) => (head, Side::Prev),
            (Side::Prev, false) => (tail, Side::Next),
            (Side::Next, true) => (tail, Side::Next),
            (Side::Prev, true) => (head, Side::Prev),
        })
    }

    /// Walk from `start`, leaving through `side`, until returning to `start`
    /// or reaching a free side. Returns the visited corners and whether the
    /// walk closed up.
    fn walk(&self, start: Corner, side: Side) -> (Vec<(Corner, Side)>, bool) {
        let mut out = vec![(start, side)];
        let (mut cur, mut leave) = (start, side);
        loop {
            match self.link(cur, leave) {
                None => return (out, false),
                Some((next, entered)) => {
                    if next == start && entered == side.other() {
                        return (out, true);
                    }
                    cur = next;
                    leave = entered.other();
                    out.push((cur, leave));
                }
            }
        }
    }

    pub fn vertex_map(&self) -> VertexMap {
        let mut corner_vertex: Vec<Vec<usize>> =
            self.faces.iter().map(|f| vec![usize::MAX; f.sides]).collect();
        let mut vertices = Vec::new();
        for face in &self.faces {
            for i in 0..face.sides {
                let c = Corner { face: face.id, index: i };
                if corner_vertex[face.id.0][i] != usize::MAX {
                    continue;
                }
                // Rotation rule: leave each corner through slot i - 1.
                let (forward, closed) = self.walk(c, Side::Prev);
                let (corners, kind) = if closed {
                    (forward.into_iter().map(|(c, _)| c).collect::<Vec<_>>(), VertexKind::Interior)
                } else {
                    // `forward` ends at one end of an open fan; walk back from it.
                    let (end, last_leave) = *forward.last().unwrap();
                    let back_side = last_leave.other();
                    let (mut path, _) = if self.link(end, back_side).is_some() {
                        self.walk(end, back_side)
                    } else {
                        (vec![(end, back_side)], false)
                    };
                    // Prefer the fan order in which each corner is left through slot i - 1.
                    if path[0].1 != Side::Prev && path.len() > 1 {
                        path.reverse();
                    }
                    (path.into_iter().map(|(c, _)| c).collect(), VertexKind::Boundary)
                };
                let vid = vertices.len();
                for c in &corners {
                    corner_vertex[c.face.0][c.index] = vid;
                }
                vertices.push(Vertex { corners, kind });
            }
        }
        VertexMap { vertices, corner_vertex }
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.vertex_map().vertices
    }

    /// `(V, E, F)` where unglued slots count as distinct edges.
    pub fn counts(&self) -> (usize, usize, usize) {
        let v = self.vertex_map().len();
        let unglued = self.total_slots() - 2 * self.gluings.len();
        (v, self.gluings.len() + unglued, self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.counts();
        v as i64 - e as i64 + f as i64
    }

    pub fn is_closed(&self) -> bool {
        self.unglued_slots().next().is_none()
    }

    pub fn is_orientable(&self) -> bool {
        let mut orient: Vec<Option<bool>> = vec![None; self.faces.len()];
        for root in 0..self.faces.len() {
            if orient[root].is_some() {
                continue;
            }
            orient[root] = Some(true);
            let mut queue = VecDeque::from([root]);
            while let Some(f) = queue.pop_front() {
                let of = orient[f].unwrap();
                for i in 0..self.faces[f].sides {
                    if let Some((other, flipped)) = self.partner(SlotRef::new(FaceId(f), i)) {
                        let want = of ^ flipped;
                        match orient[other.face.0] {
                            None => {
                                orient[other.face.0] = Some(want);
                                queue.push_back(other.face.0);
                            }
                            Some(o) if o != want => return false,
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        true
    }

    /// Faces adjacent to `face` through glued slots, in slot order.
    pub fn neighbours(&self, face: FaceId) -> impl Iterator<Item = (usize, SlotRef)> + '_ {
        (0..self.faces[face.0].sides).filter_map(move |i| {
            self.partner(SlotRef::new(face, i)).map(|(other, _)| (i, other))
        })
    }

    /// Connected components of the face adjacency graph, each sorted.
    pub fn components(&self) -> Vec<Vec<FaceId>> {
        let mut seen = vec![false; self.faces.len()];
        let mut out = Vec::new();
        for root in 0..self.faces.len() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![FaceId(root)];
            let mut queue = VecDeque::from([FaceId(root)]);
            while let Some(f) = queue.pop_front() {
                for (_, other) in self.neighbours(f) {
                    if !seen[other.face.0] {
                        seen[other.face.0] = true;
                        comp.push(other.face);
                        queue.push_back(other.face);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn boundary_loops(&self) -> Vec<BoundaryLoop> {
        self.boundary_loops_with(&self.vertex_map())
    }

    pub fn boundary_loops_with(&self, vmap: &VertexMap) -> Vec<BoundaryLoop> {
        // Each boundary vertex has exactly two free sides; pair the slot ends.
        // A slot end is (slot, is_head): the tail sits at corner i, the head at i + 1.
        let mut partner_end: BTreeMap<(SlotRef, bool), ((SlotRef, bool), usize)> = BTreeMap::new();
        for (vid, v) in vmap.vertices.iter().enumerate() {
            if v.is_interior() {
                continue;
            }
            let mut free = Vec::with_capacity(2);
            for (k, c) in v.corners.iter().enumerate() {
                let n = self.faces[c.face.0].sides;
                let at_end = k == 0 || k + 1 == v.corners.len();
                if !at_end {
                    continue;
                }
                let next_slot = SlotRef::new(c.face, c.index);
                let prev_slot = SlotRef::new(c.face, (c.index + n - 1) % n);
                if !self.is_glued(next_slot) && !free.contains(&(next_slot, false)) {
                    free.push((next_slot, false));
                }
                if !self.is_glued(prev_slot) && !free.contains(&(prev_slot, true)) {
                    free.push((prev_slot, true));
                }
            }
            debug_assert_eq!(free.len(), 2, "boundary vertex without two free sides");
            if free.len() == 2 {
                partner_end.insert(free[0], (free[1], vid));
                partner_end.insert(free[1], (free[0], vid));
            }
        }
        let mut used = std::collections::BTreeSet::new();
        let mut loops = Vec::new();
        for start in self.unglued_slots() {
            if used.contains(&start) {
                continue;
            }
            let mut slots = vec![start];
            let mut verts = Vec::new();
            used.insert(start);
            let mut cur = (start, true);
            loop {
                let Some(&((next, end), vid)) = partner_end.get(&cur) else { break };
                verts.push(vid);
                if next == start {
                    break;
                }
                used.insert(next);
                slots.push(next);
                cur = (next, !end);
            }
            loops.push(BoundaryLoop { slots, vertices: verts });
        }
        loops
    }

    /// Structural checks beyond the per-mutation preconditions.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        for f in &self.faces {
            for i in 0..f.sides {
                let c = Corner { face: f.id, index: i };
                if let Some((other, _)) = self.link(c, Side::Prev) {
                    if other == c {
                        issues.push(ValidationIssue {
                            severity: Severity::Error,
                            code: "DegenerateVertex",
                            message: format!("corner {}:{} is glued to itself", f.id, i),
                        });
                    }
                }
            }
        }
        let mut pair_count: BTreeMap<(FaceId, FaceId), usize> = BTreeMap::new();
        for g in &self.gluings {
            let key = if g.a.face <= g.b.face { (g.a.face, g.b.face) } else { (g.b.face, g.a.face) };
            *pair_count.entry(key).or_default() += 1;
        }
        for ((a, b), n) in pair_count {
            if n > 1 {
                issues.push(ValidationIssue {
                    severity: Severity::Warning,
                    code: "MultiEdge",
                    message: format!("faces {a} and {b} share {n} edges"),
                });
            }
        }
        issues
    }

    /// Build a closed or open surface from polygons given as vertex index
    /// lists, all counterclockwise from the same side. Each pair of opposite
    /// directed edges becomes an unflipped gluing.
    pub fn from_polygons(polys: &[Vec<usize>], edge_length: Length) -> Result<Surface, PolygonSoupError> {
        let mut s = Surface::new();
        let mut directed: BTreeMap<(usize, usize), SlotRef> = BTreeMap::new();
        for poly in polys {
            let f = s.add_face(poly.len(), edge_length).map_err(PolygonSoupError::Surface)?;
            for i in 0..poly.len() {
                let (u, v) = (poly[i], poly[(i + 1) % poly.len()]);
                if directed.insert((u, v), SlotRef::new(f, i)).is_some() {
                    return Err(PolygonSoupError::InconsistentOrientation(u, v));
                }
            }
        }
        for (&(u, v), &slot) in &directed {
            if u < v {
                if let Some(&other) = directed.get(&(v, u)) {
                    s.glue(slot, other, false).map_err(PolygonSoupError::Surface)?;
                }
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolygonSoupError {
    #[error("directed edge {0}->{1} appears twice")]
    InconsistentOrientation(usize, usize),
    #[error(transparent)]
    Surface(SurfaceError),
}
