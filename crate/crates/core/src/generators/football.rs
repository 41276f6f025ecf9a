use num_traits::One;

use crate::surface::{Corner, FaceId, Length, SlotRef, Surface, VertexMap};

/// A patch of the `(center, 6, 6)` tiling grown around one `center`-gon.
///
/// Each ring completes every boundary vertex present when the ring starts,
/// so `rings = 1` gives the center surrounded by `center` hexagons. Growth
/// is purely combinatorial: a boundary vertex receives the faces missing
/// from its target configuration. For `center = 5` the patch closes into
/// the truncated icosahedron, after which further rings change nothing.
///
/// # Panics
/// Panics if `center` is not 5, 6 or 7.
pub fn football_disk(center: usize, rings: usize) -> Surface {
    assert!((5..=7).contains(&center), "football center must be 5, 6 or 7");
    let mut g = Growth { s: Surface::new(), center };
    g.add(center);
    for _ in 0..rings {
        if g.s.is_closed() {
            break;
        }
        g.ring();
    }
    g.s
}

struct Growth {
    s: Surface,
    center: usize,
}

impl Growth {
    fn add(&mut self, sides: usize) -> FaceId {
        self.s.add_face(sides, Length::one()).unwrap()
    }

    fn glue(&mut self, a: SlotRef, b: SlotRef) {
        self.s.glue(a, b, false).expect("growth glues free slots of equal length");
    }

    fn target(&self) -> [usize; 3] {
        [self.center, 6, 6]
    }

    fn ring(&mut self) {
        let vmap = self.s.vertex_map();
        let mut pending: Vec<Corner> = vmap
            .vertices
            .iter()
            .filter(|v| !v.is_interior())
            .map(|v| v.corners[0])
            .collect();
        pending.sort();
        while !pending.is_empty() {
            let vmap = self.s.vertex_map();
            // Vertices already absorbed into the interior drop out.
            pending.retain(|c| !vmap.vertices[vmap.vertex_of(*c)].is_interior());
            let Some(pick) = pending
                .iter()
                .enumerate()
                .max_by_key(|(k, c)| (vmap.vertices[vmap.vertex_of(**c)].corners.len(), std::cmp::Reverse(*k)))
                .map(|(k, _)| k)
            else {
                break;
            };
            let corner = pending.remove(pick);
            self.complete(&vmap, corner);
        }
    }

    /// The free slot ending at the vertex and the one starting there.
    fn free_sides(&self, vmap: &VertexMap, corner: Corner) -> (SlotRef, SlotRef) {
        let v = &vmap.vertices[vmap.vertex_of(corner)];
        let (mut incoming, mut outgoing) = (None, None);
        for c in &v.corners {
            let n = self.s.face(c.face).sides;
            let prev = SlotRef::new(c.face, (c.index + n - 1) % n);
            let next = SlotRef::new(c.face, c.index);
            if !self.s.is_glued(prev) {
                incoming = Some(prev);
            }
            if !self.s.is_glued(next) {
                outgoing = Some(next);
            }
        }
        (incoming.expect("boundary vertex"), outgoing.expect("boundary vertex"))
    }

    /// Whether the face across `slot` should be a center-gon, judged from
    /// how the slot's own face alternates its neighbours.
    fn wants_center(&self, slot: SlotRef) -> bool {
        let face = self.s.face(slot.face);
        if face.sides == self.center {
            return false;
        }
        for j in 0..face.sides {
            if let Some((other, _)) = self.s.partner(SlotRef::new(slot.face, j)) {
                let same_parity = (slot.index + face.sides - j) % 2 == 0;
                return (self.s.face(other.face).sides == self.center) == same_parity;
            }
        }
        false
    }

    fn complete(&mut self, vmap: &VertexMap, corner: Corner) {
        let v = &vmap.vertices[vmap.vertex_of(corner)];
        let mut missing: Vec<usize> = self.target().to_vec();
        for c in &v.corners {
            let n = self.s.face(c.face).sides;
            let pos = missing.iter().position(|&m| m == n).expect("fan exceeds target configuration");
            missing.remove(pos);
        }
        let (incoming, outgoing) = self.free_sides(vmap, corner);
        match missing.len() {
            0 => self.glue(incoming, outgoing),
            1 => {
                let n = missing[0];
                let f = self.add(n);
                self.glue(SlotRef::new(f, 0), incoming);
                self.glue(SlotRef::new(f, n - 1), outgoing);
            }
            2 => {
                let (na, nb) = if missing[0] != missing[1] && self.wants_center(incoming) == (missing[0] != self.center)
                {
                    (missing[1], missing[0])
                } else {
                    (missing[0], missing[1])
                };
                let a = self.add(na);
                let b = self.add(nb);
                self.glue(SlotRef::new(a, 0), incoming);
                self.glue(SlotRef::new(b, nb - 1), outgoing);
                self.glue(SlotRef::new(a, na - 1), SlotRef::new(b, 0));
            }
            _ => unreachable!("every vertex already has a face"),
        }
    }
}
