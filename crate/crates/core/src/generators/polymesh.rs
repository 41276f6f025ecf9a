//! Closed polyhedra as oriented face/vertex index lists, plus the
//! combinatorial operators used to derive the Archimedean solids.
//!
//! All faces list their vertices counterclockwise from outside. Operators
//! preserve that orientation, so converting to a [`Surface`] produces only
//! unflipped gluings.

use std::collections::{BTreeMap, HashMap};

use crate::surface::{Length, PolygonSoupError, Surface};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMesh {
    pub faces: Vec<Vec<usize>>,
}

/// One face seen from one of its vertices.
#[derive(Clone, Copy, Debug)]
struct Incidence {
    face: usize,
    pos: usize,
    next: usize,
    prev: usize,
}

impl PolyMesh {
    pub fn new(faces: Vec<Vec<usize>>) -> Self {
        PolyMesh { faces }
    }

    pub fn vertex_count(&self) -> usize {
        self.faces.iter().flatten().max().map_or(0, |m| m + 1)
    }

    pub fn to_surface(&self, edge_length: Length) -> Result<Surface, PolygonSoupError> {
        Surface::from_polygons(&self.faces, edge_length)
    }

    fn incidences(&self) -> Vec<Vec<Incidence>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for (f, face) in self.faces.iter().enumerate() {
            let n = face.len();
            for i in 0..n {
                out[face[i]].push(Incidence {
                    face: f,
                    pos: i,
                    next: face[(i + 1) % n],
                    prev: face[(i + n - 1) % n],
                });
            }
        }
        out
    }

    /// Incidences around `v` in rotation order: each step goes from the face
    /// where a neighbour `w` precedes `v` to the face where `w` follows `v`.
    fn rotation(incs: &[Incidence]) -> Vec<Incidence> {
        let by_next: HashMap<usize, usize> = incs.iter().enumerate().map(|(k, i)| (i.next, k)).collect();
        let start = (0..incs.len()).min_by_key(|&k| incs[k].face).expect("isolated vertex");
        let mut order = vec![incs[start]];
        let mut cur = start;
        loop {
            let nxt = by_next[&incs[cur].prev];
            if nxt == start {
                break;
            }
            order.push(incs[nxt]);
            cur = nxt;
            assert!(order.len() <= incs.len(), "vertex link is not a single cycle");
        }
        assert_eq!(order.len(), incs.len(), "vertex link is not a single cycle");
        order
    }

    /// Each vertex of degree `d` becomes a `d`-gon, each `n`-gon a `2n`-gon.
    pub fn truncate(&self) -> PolyMesh {
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let id = |u: usize, v: usize, ids: &mut BTreeMap<(usize, usize), usize>| {
            let next = ids.len();
            *ids.entry((u, v)).or_insert(next)
        };
        let mut faces = Vec::new();
        for face in &self.faces {
            let n = face.len();
            let mut out = Vec::with_capacity(2 * n);
            for i in 0..n {
                let (u, v) = (face[i], face[(i + 1) % n]);
                out.push(id(u, v, &mut ids));
                out.push(id(v, u, &mut ids));
            }
            faces.push(out);
        }
        for (v, incs) in self.incidences().iter().enumerate() {
            // Going around v, the face where w follows v is followed by the
            // face where w precedes v; the new face walks next -> prev.
            let rot = Self::rotation(incs);
            faces.push(rot.iter().map(|i| id(v, i.next, &mut ids)).collect());
        }
        PolyMesh { faces }
    }

    /// Rectification: vertices at edge midpoints; faces keep their side
    /// count and each vertex of degree `d` becomes a `d`-gon.
    pub fn ambo(&self) -> PolyMesh {
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let id = |u: usize, v: usize, ids: &mut BTreeMap<(usize, usize), usize>| {
            let key = (u.min(v), u.max(v));
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        };
        let mut faces = Vec::new();
        for face in &self.faces {
            let n = face.len();
            faces.push((0..n).map(|i| id(face[i], face[(i + 1) % n], &mut ids)).collect());
        }
        for (v, incs) in self.incidences().iter().enumerate() {
            let rot = Self::rotation(incs);
            faces.push(rot.iter().map(|i| id(v, i.next, &mut ids)).collect());
        }
        PolyMesh { faces }
    }

    /// Corner ids for [`expand`](Self::expand): one new vertex per face corner.
    fn corner_ids(&self) -> Vec<Vec<usize>> {
        let mut next = 0;
        self.faces
            .iter()
            .map(|f| {
                let ids: Vec<usize> = (next..next + f.len()).collect();
                next += f.len();
                ids
            })
            .collect()
    }

    /// Edge quads of the expanded mesh, `[a, b, c, d]` with `a`/`b` on the
    /// face where the edge runs forward.
    fn edge_quads(&self, corner: &[Vec<usize>]) -> Vec<[usize; 4]> {
        let mut slot_of: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            let n = face.len();
            for i in 0..n {
                slot_of.insert((face[i], face[(i + 1) % n]), (f, i));
            }
        }
        let mut quads = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            let n = face.len();
            for i in 0..n {
                let (u, v) = (face[i], face[(i + 1) % n]);
                if u > v {
                    continue;
                }
                let (g, j) = slot_of[&(v, u)];
                let m = self.faces[g].len();
                quads.push([corner[f][(i + 1) % n], corner[f][i], corner[g][(j + 1) % m], corner[g][j]]);
            }
        }
        quads
    }

    fn vertex_faces(&self, corner: &[Vec<usize>]) -> Vec<Vec<usize>> {
        self.incidences()
            .iter()
            .map(|incs| {
                // Each edge square runs from the face where w follows v to the face
                // where w precedes v; the vertex face runs the other way.
                let by_next: HashMap<usize, &Incidence> = incs.iter().map(|i| (i.next, i)).collect();
                let first = incs.iter().min_by_key(|i| i.face).unwrap();
                let mut out = vec![corner[first.face][first.pos]];
                let mut cur = first;
                loop {
                    let nxt = by_next[&cur.prev];
                    if nxt.face == first.face && nxt.pos == first.pos {
                        break;
                    }
                    out.push(corner[nxt.face][nxt.pos]);
                    cur = nxt;
                }
                out
            })
            .collect()
    }

    /// Cantellation: faces kept, a square on every edge, a `d`-gon on every vertex.
    pub fn expand(&self) -> PolyMesh {
        let corner = self.corner_ids();
        let mut faces: Vec<Vec<usize>> = corner.clone();
        faces.extend(self.edge_quads(&corner).into_iter().map(|q| q.to_vec()));
        faces.extend(self.vertex_faces(&corner));
        PolyMesh { faces }
    }

    /// Truncated rectification: squares on edges, `2n`-gons on faces, `2d`-gons on vertices.
    pub fn bevel(&self) -> PolyMesh {
        self.ambo().truncate()
    }

    /// Expansion with every edge square split along one diagonal, chosen so
    /// each vertex sees exactly one diagonal. Produces the chiral snub.
    pub fn snub(&self) -> PolyMesh {
        let corner = self.corner_ids();
        let mut faces: Vec<Vec<usize>> = corner.clone();
        for [a, b, c, d] in self.edge_quads(&corner) {
            faces.push(vec![a, b, c]);
            faces.push(vec![a, c, d]);
        }
        faces.extend(self.vertex_faces(&corner));
        PolyMesh { faces }
    }

    pub fn dual(&self) -> PolyMesh {
        let faces = self
            .incidences()
            .iter()
            .map(|incs| {
                let by_next: HashMap<usize, &Incidence> = incs.iter().map(|i| (i.next, i)).collect();
                let first = incs.iter().min_by_key(|i| i.face).unwrap();
                let mut out = vec![first.face];
                let mut cur = first;
                loop {
                    let nxt = by_next[&cur.prev];
                    if nxt.face == first.face {
                        break;
                    }
                    out.push(nxt.face);
                    cur = nxt;
                }
                out.reverse();
                out
            })
            .collect();
        PolyMesh { faces }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn tetra() -> PolyMesh {
        PolyMesh::new(vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]])
    }

    fn check(m: &PolyMesh, v: usize, e: usize, f: usize) {
        let s = m.to_surface(Length::one()).expect("orientation consistent");
        assert!(s.is_closed());
        assert!(s.is_orientable());
        assert_eq!(s.counts(), (v, e, f));
    }

    #[test]
    fn operators_on_tetrahedron() {
        let t = tetra();
        check(&t, 4, 6, 4);
        check(&t.truncate(), 12, 18, 8);
        check(&t.ambo(), 6, 12, 8);
        check(&t.expand(), 12, 24, 14);
        check(&t.bevel(), 24, 36, 14);
        check(&t.snub(), 12, 30, 20);
        check(&t.dual(), 4, 6, 4);
    }
}
