use std::fmt;
use std::str::FromStr;

use num_traits::One;

use super::{GeneratorError, PolyMesh};
use crate::surface::{Length, Surface};

/// Every named closed solid the generators can build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolidId {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
    TruncatedTetrahedron,
    Cuboctahedron,
    TruncatedCube,
    TruncatedOctahedron,
    Rhombicuboctahedron,
    TruncatedCuboctahedron,
    SnubCube,
    Icosidodecahedron,
    TruncatedDodecahedron,
    TruncatedIcosahedron,
    Rhombicosidodecahedron,
    TruncatedIcosidodecahedron,
    SnubDodecahedron,
    Prism(usize),
    Antiprism(usize),
    ElongatedSquareGyrobicupola,
}

pub const PLATONIC: [SolidId; 5] =
    [SolidId::Tetrahedron, SolidId::Cube, SolidId::Octahedron, SolidId::Dodecahedron, SolidId::Icosahedron];

pub const ARCHIMEDEAN: [SolidId; 13] = [
    SolidId::TruncatedTetrahedron,
    SolidId::Cuboctahedron,
    SolidId::TruncatedCube,
    SolidId::TruncatedOctahedron,
    SolidId::Rhombicuboctahedron,
    SolidId::TruncatedCuboctahedron,
    SolidId::SnubCube,
    SolidId::Icosidodecahedron,
    SolidId::TruncatedDodecahedron,
    SolidId::TruncatedIcosahedron,
    SolidId::Rhombicosidodecahedron,
    SolidId::TruncatedIcosidodecahedron,
    SolidId::SnubDodecahedron,
];

const NAMED: [(SolidId, &str); 19] = [
    (SolidId::Tetrahedron, "tetrahedron"),
    (SolidId::Cube, "cube"),
    (SolidId::Octahedron, "octahedron"),
    (SolidId::Dodecahedron, "dodecahedron"),
    (SolidId::Icosahedron, "icosahedron"),
    (SolidId::TruncatedTetrahedron, "truncated-tetrahedron"),
    (SolidId::Cuboctahedron, "cuboctahedron"),
    (SolidId::TruncatedCube, "truncated-cube"),
    (SolidId::TruncatedOctahedron, "truncated-octahedron"),
    (SolidId::Rhombicuboctahedron, "rhombicuboctahedron"),
    (SolidId::TruncatedCuboctahedron, "truncated-cuboctahedron"),
    (SolidId::SnubCube, "snub-cube"),
    (SolidId::Icosidodecahedron, "icosidodecahedron"),
    (SolidId::TruncatedDodecahedron, "truncated-dodecahedron"),
    (SolidId::TruncatedIcosahedron, "truncated-icosahedron"),
    (SolidId::Rhombicosidodecahedron, "rhombicosidodecahedron"),
    (SolidId::TruncatedIcosidodecahedron, "truncated-icosidodecahedron"),
    (SolidId::SnubDodecahedron, "snub-dodecahedron"),
    (SolidId::ElongatedSquareGyrobicupola, "elongated-square-gyrobicupola"),
];

impl SolidId {
    /// All fixed-name solids (no prisms or antiprisms).
    pub fn named() -> impl Iterator<Item = SolidId> {
        NAMED.iter().map(|(id, _)| *id)
    }

    pub fn name(&self) -> String {
        match self {
            SolidId::Prism(n) => format!("prism-{n}"),
            SolidId::Antiprism(n) => format!("antiprism-{n}"),
            other => NAMED.iter().find(|(id, _)| id == other).unwrap().1.to_string(),
        }
    }

    /// Sorted side counts expected at every vertex.
    pub fn vertex_config(&self) -> Vec<usize> {
        let mut c = match self {
            SolidId::Tetrahedron => vec![3, 3, 3],
            SolidId::Cube => vec![4, 4, 4],
            SolidId::Octahedron => vec![3, 3, 3, 3],
            SolidId::Dodecahedron => vec![5, 5, 5],
            SolidId::Icosahedron => vec![3, 3, 3, 3, 3],
            SolidId::TruncatedTetrahedron => vec![3, 6, 6],
            SolidId::Cuboctahedron => vec![3, 3, 4, 4],
            SolidId::TruncatedCube => vec![3, 8, 8],
            SolidId::TruncatedOctahedron => vec![4, 6, 6],
            SolidId::Rhombicuboctahedron => vec![3, 4, 4, 4],
            SolidId::TruncatedCuboctahedron => vec![4, 6, 8],
            SolidId::SnubCube => vec![3, 3, 3, 3, 4],
            SolidId::Icosidodecahedron => vec![3, 3, 5, 5],
            SolidId::TruncatedDodecahedron => vec![3, 10, 10],
            SolidId::TruncatedIcosahedron => vec![5, 6, 6],
            SolidId::Rhombicosidodecahedron => vec![3, 4, 4, 5],
            SolidId::TruncatedIcosidodecahedron => vec![4, 6, 10],
            SolidId::SnubDodecahedron => vec![3, 3, 3, 3, 5],
            SolidId::Prism(n) => vec![4, 4, *n],
            SolidId::Antiprism(n) => vec![3, 3, 3, *n],
            SolidId::ElongatedSquareGyrobicupola => vec![3, 4, 4, 4],
        };
        c.sort_unstable();
        c
    }

    pub fn mesh(&self) -> Result<PolyMesh, GeneratorError> {
        use SolidId::*;
        Ok(match *self {
            Tetrahedron => tetrahedron(),
            Cube => cube(),
            Octahedron => cube().dual(),
            Dodecahedron => icosahedron().dual(),
            Icosahedron => icosahedron(),
            TruncatedTetrahedron => tetrahedron().truncate(),
            Cuboctahedron => cube().ambo(),
            TruncatedCube => cube().truncate(),
            TruncatedOctahedron => cube().dual().truncate(),
            Rhombicuboctahedron => cube().expand(),
            TruncatedCuboctahedron => cube().bevel(),
            SnubCube => cube().snub(),
            Icosidodecahedron => icosahedron().dual().ambo(),
            TruncatedDodecahedron => icosahedron().dual().truncate(),
            TruncatedIcosahedron => icosahedron().truncate(),
            Rhombicosidodecahedron => icosahedron().dual().expand(),
            TruncatedIcosidodecahedron => icosahedron().dual().bevel(),
            SnubDodecahedron => icosahedron().dual().snub(),
            Prism(n) => prism_mesh(n)?,
            Antiprism(n) => antiprism_mesh(n)?,
            ElongatedSquareGyrobicupola => gyrobicupola_mesh(),
        })
    }
}

impl fmt::Display for SolidId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SolidId {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GeneratorError::UnknownSolid(s.to_string());
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        if let Some((_, id)) = NAMED.iter().map(|(id, n)| (n, id)).find(|(n, _)| **n == t) {
            return Ok(*id);
        }
        let sized = |rest: &str| rest.parse::<usize>().map_err(|_| unknown());
        if let Some(rest) = t.strip_prefix("antiprism-") {
            return Ok(SolidId::Antiprism(sized(rest)?));
        }
        if let Some(rest) = t.strip_prefix("prism-") {
            return Ok(SolidId::Prism(sized(rest)?));
        }
        Err(unknown())
    }
}

/// Build any cataloged solid with unit edges.
pub fn solid(id: SolidId) -> Result<Surface, GeneratorError> {
    if let SolidId::Prism(n) | SolidId::Antiprism(n) = id {
        if n < 3 {
            return Err(GeneratorError::SidesTooSmall(n));
        }
    }
    Ok(id.mesh()?.to_surface(Length::one()).expect("catalog meshes are consistent"))
}

pub fn platonic(id: SolidId) -> Result<Surface, GeneratorError> {
    if !PLATONIC.contains(&id) {
        return Err(GeneratorError::UnknownSolid(id.name()));
    }
    solid(id)
}

pub fn archimedean(id: SolidId) -> Result<Surface, GeneratorError> {
    if !ARCHIMEDEAN.contains(&id) {
        return Err(GeneratorError::UnknownSolid(id.name()));
    }
    solid(id)
}

pub fn prism(n: usize) -> Result<Surface, GeneratorError> {
    solid(SolidId::Prism(n))
}

pub fn antiprism(n: usize) -> Result<Surface, GeneratorError> {
    solid(SolidId::Antiprism(n))
}

pub fn elongated_square_gyrobicupola() -> Surface {
    solid(SolidId::ElongatedSquareGyrobicupola).unwrap()
}

fn tetrahedron() -> PolyMesh {
    PolyMesh::new(vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]])
}

/// Vertex `i` sits at (i&1, i>>1&1, i>>2&1).
fn cube() -> PolyMesh {
    PolyMesh::new(vec![
        vec![0, 2, 3, 1],
        vec![4, 5, 7, 6],
        vec![0, 1, 5, 4],
        vec![2, 6, 7, 3],
        vec![0, 4, 6, 2],
        vec![1, 3, 7, 5],
    ])
}

/// Pentagonal antiprism capped with two pyramids.
fn icosahedron() -> PolyMesh {
    let b = |i: usize| i % 5;
    let t = |i: usize| 5 + i % 5;
    let (top, bottom) = (10, 11);
    let mut faces = Vec::new();
    for i in 0..5 {
        faces.push(vec![b(i), b(i + 1), t(i)]);
        faces.push(vec![t(i), b(i + 1), t(i + 1)]);
        faces.push(vec![t(i), t(i + 1), top]);
        faces.push(vec![b(i + 1), b(i), bottom]);
    }
    PolyMesh::new(faces)
}

fn prism_mesh(n: usize) -> Result<PolyMesh, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::SidesTooSmall(n));
    }
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push(vec![i, j, n + j, n + i]);
    }
    Ok(PolyMesh::new(faces))
}

fn antiprism_mesh(n: usize) -> Result<PolyMesh, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::SidesTooSmall(n));
    }
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push(vec![i, j, n + i]);
        faces.push(vec![n + i, j, n + j]);
    }
    Ok(PolyMesh::new(faces))
}

/// Octagonal prism with a square cupola on each end, the two cupolas
/// rotated by one octagon edge against each other.
fn gyrobicupola_mesh() -> PolyMesh {
    let mut faces = Vec::new();
    let b = |i: usize| i % 8;
    let t = |i: usize| 8 + i % 8;
    for i in 0..8 {
        faces.push(vec![b(i), b(i + 1), t(i + 1), t(i)]);
    }
    let cupola = |ring: &dyn Fn(usize) -> usize, apex: usize, shift: usize| {
        let u = |k: usize| apex + k % 4;
        let mut out = Vec::new();
        for k in 0..4 {
            let e = 2 * k + shift;
            out.push(vec![ring(e), ring(e + 1), u(k + 1), u(k)]);
            out.push(vec![ring(e + 1), ring(e + 2), u(k + 1)]);
        }
        out.push((0..4).map(u).collect());
        out
    };
    faces.extend(cupola(&t, 16, 0));
    for mut f in cupola(&b, 20, 1) {
        f.reverse();
        faces.push(f);
    }
    PolyMesh::new(faces)
}
