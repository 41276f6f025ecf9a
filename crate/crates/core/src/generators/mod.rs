//! Canonical constructions: polyhedron catalogs, football patches, the
//! sector torus and vertex-configuration enumeration.

mod catalog;
mod configs;
mod football;
mod polymesh;
mod torus;

pub use catalog::{
    antiprism, archimedean, elongated_square_gyrobicupola, platonic, prism, solid, SolidId, ARCHIMEDEAN, PLATONIC,
};
pub use configs::{enumerate_vertex_configs, ConfigClass, VertexConfig};
pub use football::football_disk;
pub use polymesh::PolyMesh;
pub use torus::{torus_9fold, torus_sectors};

use std::collections::VecDeque;

use num_traits::One;

use crate::surface::{Corner, FaceId, Length, SlotRef, Surface};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("surface is not closed")]
    NotClosed,
    #[error("surface is not orientable")]
    NotOrientable,
    #[error("surface has a face touching one vertex twice or a doubled edge")]
    Degenerate,
    #[error("unknown solid `{0}`")]
    UnknownSolid(String),
    #[error("polygons need at least 3 sides, got {0}")]
    SidesTooSmall(usize),
    #[error("torus needs at least 3 sectors, got {0}")]
    TooFewSectors(usize),
}

impl GeneratorError {
    pub fn code(&self) -> &'static str {
        match self {
            GeneratorError::NotClosed => "NotClosed",
            GeneratorError::NotOrientable => "NotOrientable",
            GeneratorError::Degenerate => "Degenerate",
            GeneratorError::UnknownSolid(_) => "UnknownSolid",
            GeneratorError::SidesTooSmall(_) => "SidesTooSmall",
            GeneratorError::TooFewSectors(_) => "TooFewSectors",
        }
    }
}

impl PolyMesh {
    /// Read a closed orientable surface back into oriented face lists.
    /// Faces on the reversed side of the orientation get their corner order flipped.
    pub fn from_surface(s: &Surface) -> Result<PolyMesh, GeneratorError> {
        if !s.is_closed() {
            return Err(GeneratorError::NotClosed);
        }
        let mut orient: Vec<Option<bool>> = vec![None; s.face_count()];
        for root in 0..s.face_count() {
            if orient[root].is_some() {
                continue;
            }
            orient[root] = Some(true);
            let mut queue = VecDeque::from([root]);
            while let Some(f) = queue.pop_front() {
                let of = orient[f].unwrap();
                for i in 0..s.face(FaceId(f)).sides {
                    let (other, flipped) = s.partner(SlotRef::new(FaceId(f), i)).expect("closed");
                    let want = of ^ flipped;
                    match orient[other.face.0] {
                        None => {
                            orient[other.face.0] = Some(want);
                            queue.push_back(other.face.0);
                        }
                        Some(o) if o != want => return Err(GeneratorError::NotOrientable),
                        Some(_) => {}
                    }
                }
            }
        }
        let vmap = s.vertex_map();
        let faces: Vec<Vec<usize>> = s
            .faces()
            .iter()
            .map(|f| {
                let mut vs: Vec<usize> =
                    (0..f.sides).map(|i| vmap.vertex_of(Corner { face: f.id, index: i })).collect();
                if !orient[f.id.0].unwrap() {
                    vs.reverse();
                }
                vs
            })
            .collect();
        let mesh = PolyMesh { faces };
        if !mesh.is_simple() {
            return Err(GeneratorError::Degenerate);
        }
        Ok(mesh)
    }

    /// No face repeats a vertex and no directed edge occurs twice.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for f in &self.faces {
            let mut vs = f.clone();
            vs.sort_unstable();
            vs.dedup();
            if vs.len() != f.len() {
                return false;
            }
            for i in 0..f.len() {
                if !seen.insert((f[i], f[(i + 1) % f.len()])) {
                    return false;
                }
            }
        }
        true
    }
}

fn apply(s: &Surface, op: fn(&PolyMesh) -> PolyMesh) -> Result<Surface, GeneratorError> {
    let mesh = PolyMesh::from_surface(s)?;
    let length = s.faces().first().map_or(Length::one(), |f| f.edge_length);
    op(&mesh).to_surface(length).map_err(|_| GeneratorError::Degenerate)
}

/// Cut every vertex down to a small polygon.
pub fn truncate(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::truncate)
}

/// Cut every vertex down to the edge midpoints.
pub fn ambo(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::ambo)
}

/// Pull the faces apart, filling edges with squares and vertices with polygons.
pub fn expand(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::expand)
}

pub fn bevel(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::bevel)
}

pub fn snub(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::snub)
}

pub fn dual(s: &Surface) -> Result<Surface, GeneratorError> {
    apply(s, PolyMesh::dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{check_descartes, euler_characteristic};
    use crate::surface::Surface;

    #[test]
    fn operators_reject_open_and_nonorientable() {
        let mut s = Surface::new();
        s.add_unit_face(3).unwrap();
        assert_eq!(truncate(&s), Err(GeneratorError::NotClosed));

        // Two squares glued into a Klein bottle-like closed surface.
        let mut k = Surface::new();
        let a = k.add_unit_face(4).unwrap();
        let b = k.add_unit_face(4).unwrap();
        k.glue(SlotRef::new(a, 0), SlotRef::new(b, 0), false).unwrap();
        k.glue(SlotRef::new(a, 1), SlotRef::new(b, 1), false).unwrap();
        k.glue(SlotRef::new(a, 2), SlotRef::new(b, 2), false).unwrap();
        k.glue(SlotRef::new(a, 3), SlotRef::new(b, 3), true).unwrap();
        assert_eq!(truncate(&k), Err(GeneratorError::NotOrientable));
    }

    #[test]
    fn operator_face_count_identities() {
        for id in PLATONIC {
            let s = platonic(id).unwrap();
            let (v, e, f) = s.counts();
            let t = truncate(&s).unwrap();
            assert_eq!(t.counts().2, f + v);
            let a = ambo(&s).unwrap();
            assert_eq!(a.counts().0, e);
            for out in [t, a, expand(&s).unwrap(), bevel(&s).unwrap()] {
                assert_eq!(euler_characteristic(&out), 2);
                assert!(check_descartes(&out).unwrap().holds);
            }
        }
    }

    #[test]
    fn truncate_twice_keeps_chi() {
        let t = platonic(SolidId::Tetrahedron).unwrap();
        let tt = truncate(&truncate(&t).unwrap()).unwrap();
        assert_eq!(euler_characteristic(&tt), 2);
        assert_eq!(tt.counts(), (36, 54, 20));
    }
}
