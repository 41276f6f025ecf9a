//! Spring realizations of surfaces in 3D, OBJ export, planar nets and SVG.
//!
//! Each face is rigidified by a fan of spokes to a center node (triangles
//! need none), so the spring energy only sees edge and spoke lengths.
//! Faces may bow slightly, as the physical tiles do.

mod net;
mod obj;

pub use net::{check_folds, export_svg, export_svg_with_paths, unfold_net, PlanarNet, TreeStrategy};
pub use obj::{export_obj, export_obj_with_paths, format_sig};

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::vertex_defect;
use crate::geodesics::{circumradius, transition, Charts, Isometry, P2};
use crate::surface::{Corner, FaceId, SlotRef, Surface};

pub type P3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("surface is not connected")]
    Disconnected,
    #[error("surface has no faces")]
    Empty,
    #[error("nodes {0} and {1} coincide")]
    CoincidentNodes(usize, usize),
}

impl EmbeddingError {
    pub fn code(&self) -> &'static str {
        match self {
            EmbeddingError::Disconnected => "Disconnected",
            EmbeddingError::Empty => "Empty",
            EmbeddingError::CoincidentNodes(..) => "CoincidentNodes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum NodeKind {
    Vertex(usize),
    FaceCenter(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spring {
    pub a: usize,
    pub b: usize,
    pub rest: f64,
}

/// A spring network realizing a surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddedMesh {
    pub nodes: Vec<NodeKind>,
    pub springs: Vec<Spring>,
    pub positions: Vec<P3>,
    /// Per face: boundary nodes in corner order and the center node, if any.
    pub faces: Vec<(Vec<usize>, Option<usize>)>,
    /// Number of leading springs that are surface edges; the rest are spokes.
    pub edge_springs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxReport {
    pub iterations: usize,
    pub energy: f64,
    /// Largest `|length − rest| / rest` over all springs.
    pub max_residual: f64,
    pub gradient_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions { max_iters: 20_000, tol: 1e-8 }
    }
}

/// A snapshot of node positions during relaxation.
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub iteration: usize,
    pub energy: f64,
    pub positions: Vec<P3>,
}

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: P3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn regular_area(n: usize, l: f64) -> f64 {
    n as f64 * l * l / (4.0 * (PI / n as f64).tan())
}

impl EmbeddedMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn energy(&self) -> f64 {
        energy_at(&self.springs, &self.positions)
    }

    pub fn gradient(&self) -> Result<Vec<P3>, EmbeddingError> {
        gradient_at(&self.springs, &self.positions)
    }

    /// Largest relative spring-length residual.
    pub fn max_residual(&self) -> f64 {
        self.springs
            .iter()
            .map(|s| (norm(sub(self.positions[s.a], self.positions[s.b])) - s.rest).abs() / s.rest)
            .fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> P3 {
        centroid(&self.positions)
    }

    /// Node positions of surface vertices only (face centers excluded).
    pub fn vertex_positions(&self) -> impl Iterator<Item = P3> + '_ {
        self.nodes
            .iter()
            .zip(&self.positions)
            .filter(|(k, _)| matches!(k, NodeKind::Vertex(_)))
            .map(|(_, p)| *p)
    }

    /// Add seeded uniform noise of the given magnitude to every coordinate.
    pub fn perturb(&mut self, seed: u64, magnitude: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in &mut self.positions {
            for c in p.iter_mut() {
                *c += magnitude * rng.gen_range(-1.0..=1.0);
            }
        }
    }
}

pub fn energy_at(springs: &[Spring], x: &[P3]) -> f64 {
    springs
        .iter()
        .map(|s| {
            let d = norm(sub(x[s.a], x[s.b])) - s.rest;
            d * d
        })
        .sum()
}

pub fn gradient_at(springs: &[Spring], x: &[P3]) -> Result<Vec<P3>, EmbeddingError> {
    let mut g = vec![[0.0; 3]; x.len()];
    for s in springs {
        let d = sub(x[s.a], x[s.b]);
        let len = norm(d);
        if len < 1e-12 {
            return Err(EmbeddingError::CoincidentNodes(s.a, s.b));
        }
        let k = 2.0 * (len - s.rest) / len;
        for c in 0..3 {
            g[s.a][c] += k * d[c];
            g[s.b][c] -= k * d[c];
        }
    }
    Ok(g)
}

fn centroid(x: &[P3]) -> P3 {
    let mut c = [0.0; 3];
    for p in x {
        for k in 0..3 {
            c[k] += p[k];
        }
    }
    let n = x.len().max(1) as f64;
    c.map(|v| v / n)
}

fn recenter(x: &mut [P3]) {
    let c = centroid(x);
    for p in x {
        for k in 0..3 {
            p[k] -= c[k];
        }
    }
}

/// The spring network of `s` with nodes at deterministic seeded positions.
///
/// Closed surfaces start on a sphere of matching area, placed by the low
/// Laplacian eigenvectors of the edge graph (or, for large graphs, in rings
/// of equal graph distance from one vertex). Open ones start as a
/// breadth-first unfolding of their faces in the plane. Surfaces whose interior vertices are all flat are only
/// perturbed within their plane, since they can be realized there.
pub fn init_embedding(s: &Surface, seed: u64) -> Result<EmbeddedMesh, EmbeddingError> {
    if s.face_count() == 0 {
        return Err(EmbeddingError::Empty);
    }
    if !s.is_connected() {
        return Err(EmbeddingError::Disconnected);
    }
    let vmap = s.vertex_map();
    let nv = vmap.len();
    let mut nodes: Vec<NodeKind> = (0..nv).map(NodeKind::Vertex).collect();
    let mut faces = Vec::with_capacity(s.face_count());
    let mut springs = Vec::new();
    let lengths: Vec<f64> = s.faces().iter().map(|f| f.edge_length.to_f64().unwrap()).collect();

    let mut seen_edges = BTreeSet::new();
    for slot in s.slots() {
        let key = match s.partner(slot) {
            Some((o, _)) if o < slot => o,
            _ => slot,
        };
        if !seen_edges.insert(key) {
            continue;
        }
        let n = s.face(slot.face).sides;
        let a = vmap.vertex_of(Corner { face: slot.face, index: slot.index });
        let b = vmap.vertex_of(Corner { face: slot.face, index: (slot.index + 1) % n });
        if a != b {
            springs.push(Spring { a, b, rest: lengths[slot.face.0] });
        }
    }
    let edge_springs = springs.len();
    for f in s.faces() {
        let ring: Vec<usize> = (0..f.sides).map(|i| vmap.vertex_of(Corner { face: f.id, index: i })).collect();
        let center = (f.sides > 3).then(|| {
            let c = nodes.len();
            nodes.push(NodeKind::FaceCenter(f.id.0));
            let r = circumradius(f.sides, lengths[f.id.0]);
            for &v in &ring {
                springs.push(Spring { a: c, b: v, rest: r });
            }
            c
        });
        faces.push((ring, center));
    }

    let mut positions = vec![[0.0; 3]; nodes.len()];
    let closed = s.is_closed();
    let flat = !closed
        && s.vertices().iter().all(|v| !v.is_interior() || vertex_defect(s, v).is_ok_and(|d| d.is_zero()));
    let placed = if closed {
        if !spectral_layout(s, &vmap, &lengths, &mut positions) {
            sphere_layout(s, &vmap, &lengths, &mut positions);
        }
        None
    } else {
        Some(planar_layout(s, &vmap, &mut positions))
    };
    for (f, (ring, center)) in faces.iter().enumerate() {
        if let Some(c) = center {
            positions[*c] = match &placed {
                Some(isos) => {
                    let o = isos[f].apply(P2::zeros());
                    [o.x, o.y, 0.0]
                }
                None => centroid(&ring.iter().map(|&v| positions[v]).collect::<Vec<_>>()),
            };
        }
    }
    let mean_l = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in &mut positions {
        for (k, c) in p.iter_mut().enumerate() {
            let noise = 0.01 * mean_l * rng.gen_range(-1.0..=1.0);
            if !(flat && k == 2) {
                *c += noise;
            }
        }
    }
    recenter(&mut positions);
    Ok(EmbeddedMesh { nodes, springs, positions, faces, edge_springs })
}

/// Breadth-first unfolding of the faces into the plane z = 0.
fn planar_layout(s: &Surface, vmap: &crate::surface::VertexMap, positions: &mut [P3]) -> Vec<Isometry> {
    let charts = Charts::new(s);
    let mut placed: Vec<Option<Isometry>> = vec![None; s.face_count()];
    let mut vertex_done = vec![false; vmap.len()];
    placed[0] = Some(Isometry::identity());
    let mut queue = VecDeque::from([FaceId(0)]);
    while let Some(f) = queue.pop_front() {
        let iso = placed[f.0].unwrap();
        let n = s.face(f).sides;
        for i in 0..n {
            let v = vmap.vertex_of(Corner { face: f, index: i });
            if !vertex_done[v] {
                let p = iso.apply(charts.corner(f, i));
                positions[v] = [p.x, p.y, 0.0];
                vertex_done[v] = true;
            }
            let slot = SlotRef::new(f, i);
            if let Some((other, _)) = s.partner(slot) {
                if placed[other.face.0].is_none() {
                    let t = transition(s, &charts, slot).unwrap();
                    placed[other.face.0] = Some(iso.compose(&t.inverse()));
                    queue.push_back(other.face);
                }
            }
        }
    }
    placed.into_iter().map(|p| p.expect("connected")).collect()
}

fn sphere_radius(s: &Surface, lengths: &[f64]) -> f64 {
    let area: f64 = s.faces().iter().map(|f| regular_area(f.sides, lengths[f.id.0])).sum();
    (area / (4.0 * PI)).sqrt()
}

fn vertex_adjacency(s: &Surface, vmap: &crate::surface::VertexMap) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vmap.len()];
    for f in s.faces() {
        for i in 0..f.sides {
            let a = vmap.vertex_of(Corner { face: f.id, index: i });
            let b = vmap.vertex_of(Corner { face: f.id, index: (i + 1) % f.sides });
            if a != b && !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

const SPECTRAL_MAX_VERTICES: usize = 1000;

/// Vertices at their coordinates in the three lowest nontrivial
/// eigenvectors of the graph Laplacian, pushed out onto the sphere of the
/// surface's area. For convex solids this is already close to the convex
/// realization. Returns false when it degenerates.
fn spectral_layout(s: &Surface, vmap: &crate::surface::VertexMap, lengths: &[f64], positions: &mut [P3]) -> bool {
    let nv = vmap.len();
    if !(4..=SPECTRAL_MAX_VERTICES).contains(&nv) {
        return false;
    }
    let adj = vertex_adjacency(s, vmap);
    let mut lap = nalgebra::DMatrix::<f64>::zeros(nv, nv);
    for (u, ns) in adj.iter().enumerate() {
        lap[(u, u)] = ns.len() as f64;
        for &v in ns {
            lap[(u, v)] = -1.0;
        }
    }
    let eig = lap.symmetric_eigen();
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let radius = sphere_radius(s, lengths);
    let coords: Vec<P3> = (0..nv).map(|v| [1, 2, 3].map(|k| eig.eigenvectors[(v, order[k])])).collect();
    let max = coords.iter().map(|p| norm(*p)).fold(0.0, f64::max);
    if coords.iter().any(|p| norm(*p) < 1e-3 * max) {
        return false;
    }
    for (v, p) in coords.into_iter().enumerate() {
        positions[v] = p.map(|c| c * radius / norm(p));
    }
    true
}

/// Vertices on a sphere of the surface's area, in rings of equal graph
/// distance from vertex 0. Each ring is ordered by the mean azimuth of its
/// neighbours in the previous ring, so neighbouring vertices start close.
fn sphere_layout(s: &Surface, vmap: &crate::surface::VertexMap, lengths: &[f64], positions: &mut [P3]) {
    let nv = vmap.len();
    let radius = sphere_radius(s, lengths);
    let adj = vertex_adjacency(s, vmap);
    let mut layer = vec![usize::MAX; nv];
    layer[0] = 0;
    let mut layers: Vec<Vec<usize>> = vec![vec![0]];
    loop {
        let mut next = Vec::new();
        for &u in layers.last().unwrap() {
            for &v in &adj[u] {
                if layer[v] == usize::MAX {
                    layer[v] = layers.len();
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    // A single far vertex sits at the opposite pole; otherwise the last ring
    // stays off it so its vertices do not coincide.
    let last = layers.len() - 1;
    let span = if layers[last].len() == 1 { last.max(1) } else { last + 1 };
    let mut azimuth = vec![0.0f64; nv];
    for (k, ring) in layers.iter().enumerate() {
        let order: Vec<usize> = match k {
            0 => ring.clone(),
            1 => rotation_neighbours(s, vmap, 0).into_iter().filter(|&v| layer[v] == 1).collect(),
            _ => {
                let mut keyed: Vec<(f64, usize)> = ring
                    .iter()
                    .map(|&v| {
                        let (x, y) = adj[v]
                            .iter()
                            .filter(|&&u| layer[u] + 1 == k)
                            .fold((0.0, 0.0), |(x, y), &u| (x + azimuth[u].cos(), y + azimuth[u].sin()));
                        (y.atan2(x), v)
                    })
                    .collect();
                keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
                keyed.into_iter().map(|(_, v)| v).collect()
            }
        };
        let theta = PI * k as f64 / span as f64;
        let m = order.len();
        for (j, &v) in order.iter().enumerate() {
            // Later rings are sorted by atan2 keys in (-π, π].
            let phi = if k < 2 { 2.0 * PI * j as f64 / m as f64 } else { -PI + 2.0 * PI * (j as f64 + 0.5) / m as f64 };
            azimuth[v] = phi;
            positions[v] = [radius * theta.sin() * phi.cos(), radius * theta.sin() * phi.sin(), radius * theta.cos()];
        }
    }
}

/// Neighbours of a vertex in the order its corners appear around it.
fn rotation_neighbours(s: &Surface, vmap: &crate::surface::VertexMap, v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for c in &vmap.vertices[v].corners {
        let n = s.face(c.face).sides;
        for idx in [(c.index + 1) % n, (c.index + n - 1) % n] {
            let w = vmap.vertex_of(Corner { face: c.face, index: idx });
            if w != v && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Gradient descent with Armijo backtracking. The step grows after each
/// accepted move and the centroid is pinned to the origin.
pub fn relax(m: &mut EmbeddedMesh, opts: RelaxOptions) -> Result<RelaxReport, EmbeddingError> {
    relax_observed(m, opts, |_, _, _| {})
}

/// [`relax`] reporting every accepted iterate to `observer` as
/// `(iteration, energy, positions)`.
pub fn relax_observed(
    m: &mut EmbeddedMesh,
    opts: RelaxOptions,
    mut observer: impl FnMut(usize, f64, &[P3]),
) -> Result<RelaxReport, EmbeddingError> {
    const ARMIJO: f64 = 1e-4;
    const BACKTRACK: f64 = 0.5;
    let mut step = 0.1;
    let mut energy = m.energy();
    let mut grad = m.gradient()?;
    let mut gnorm2: f64 = grad.iter().flatten().map(|g| g * g).sum();
    let mut iterations = 0;
    let mut trial = m.positions.clone();
    while iterations < opts.max_iters && gnorm2.sqrt() >= opts.tol {
        let mut accepted = false;
        while step > 1e-20 {
            for (t, (x, g)) in trial.iter_mut().zip(m.positions.iter().zip(&grad)) {
                for k in 0..3 {
                    t[k] = x[k] - step * g[k];
                }
            }
            let e = energy_at(&m.springs, &trial);
            if e <= energy - ARMIJO * step * gnorm2 {
                energy = e;
                accepted = true;
                break;
            }
            step *= BACKTRACK;
        }
        if !accepted {
            break;
        }
        recenter(&mut trial);
        std::mem::swap(&mut m.positions, &mut trial);
        iterations += 1;
        grad = m.gradient()?;
        gnorm2 = grad.iter().flatten().map(|g| g * g).sum();
        step *= 2.0;
        observer(iterations, energy, &m.positions);
    }
    let gradient_norm = gnorm2.sqrt();
    Ok(RelaxReport {
        iterations,
        energy,
        max_residual: m.max_residual(),
        gradient_norm,
        converged: gradient_norm < opts.tol,
    })
}

/// Best-fit plane residual: the RMS distance of the nodes from their
/// least-squares plane.
pub fn plane_residual(points: &[P3]) -> f64 {
    let c = centroid(points);
    let mut cov = nalgebra::Matrix3::<f64>::zeros();
    for p in points {
        let d = nalgebra::Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    (min / points.len().max(1) as f64).sqrt()
}

/// Maps a point of a face chart onto the embedded face, through the fan
/// triangle containing it.
pub fn chart_point_to_3d(m: &EmbeddedMesh, charts: &Charts, face: FaceId, p: P2) -> P3 {
    let (ring, center) = &m.faces[face.0];
    let corners = charts.corners(face);
    let n = corners.len();
    let bary = |a: P2, b: P2, c: P2| {
        let det = (b - a).perp(&(c - a));
        let l1 = (p - a).perp(&(c - a)) / det;
        let l2 = (b - a).perp(&(p - a)) / det;
        (1.0 - l1 - l2, l1, l2)
    };
    let mix = |w: (f64, f64, f64), a: P3, b: P3, c: P3| -> P3 {
        [0, 1, 2].map(|k| w.0 * a[k] + w.1 * b[k] + w.2 * c[k])
    };
    match center {
        None => {
            let w = bary(corners[0], corners[1], corners[2]);
            mix(w, m.positions[ring[0]], m.positions[ring[1]], m.positions[ring[2]])
        }
        Some(c) => {
            let angle = p.y.atan2(p.x);
            // Corner i sits at -π/2 - π/n + 2πi/n.
            let rel = (angle + PI / 2.0 + PI / n as f64).rem_euclid(2.0 * PI);
            let i = ((rel / (2.0 * PI / n as f64)).floor() as usize).min(n - 1);
            let j = (i + 1) % n;
            let w = bary(P2::zeros(), corners[i], corners[j]);
            mix(w, m.positions[*c], m.positions[ring[i]], m.positions[ring[j]])
        }
    }
}
