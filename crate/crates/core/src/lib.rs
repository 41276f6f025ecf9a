//! Surfaces built from flexible regular-polygon tiles.
//!
//! The crate is organised bottom-up:
//!
//! - [`surface`]: the combinatorial kernel (faces, slots, gluings, derived
//!   vertices and boundary loops) and the spec-file format.
//! - [`curvature`]: exact angle defects, Euler characteristic, Descartes and
//!   Gauss–Bonnet checks.
//! - [`generators`]: Platonic and Archimedean catalogs, prisms, football
//!   patches, the sector torus and vertex-configuration enumeration.
//! - [`geodesics`]: face charts, unfolding, ray tracing and geodesic triangles.
//! - [`embedding`]: spring relaxation into 3D, OBJ export, planar nets and SVG.
//! - [`report`]: analysis documents shared by the command line and the service.

pub mod angle;
pub mod curvature;
pub mod generators;
pub mod geodesics;
pub mod surface;
pub mod embedding;
pub mod report;

pub use angle::AngleValue;
pub use surface::{
    new_surface, parse_spec, write_spec, BoundaryLoop, Corner, Face, FaceId, Gluing, Length, SlotRef,
    SpecError, Surface, SurfaceError, Vertex, VertexKind, VertexMap,
};
