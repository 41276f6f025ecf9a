use std::collections::BTreeSet;

use polytile_core::curvature::{analyze, region_gauss_bonnet, total_defect, vertex_defect};
use polytile_core::embedding::{init_embedding, relax, RelaxOptions};
use polytile_core::generators::{football_disk, solid, torus_9fold, SolidId};
use polytile_core::{parse_spec, write_spec, AngleValue, FaceId, SlotRef, Surface};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build(sides: &[usize], picks: &[(usize, usize, bool)]) -> (Surface, Vec<(SlotRef, SlotRef, bool)>) {
    let mut s = Surface::new();
    for &n in sides {
        s.add_unit_face(n).unwrap();
    }
    let slots: Vec<SlotRef> = s.slots().collect();
    let mut applied = Vec::new();
    for &(i, j, flip) in picks {
        let (a, b) = (slots[i % slots.len()], slots[j % slots.len()]);
        if s.glue(a, b, flip).is_ok() {
            applied.push((a, b, flip));
        }
    }
    (s, applied)
}

fn surfaces() -> impl Strategy<Value = (Surface, Vec<(SlotRef, SlotRef, bool)>)> {
    (
        prop::collection::vec(3usize..=8, 1..8),
        prop::collection::vec((0usize..64, 0usize..64, any::<bool>()), 0..24),
    )
        .prop_map(|(sides, picks)| build(&sides, &picks))
}

proptest! {
    #[test]
    fn gluing_is_an_involution((s, _) in surfaces()) {
        let mut seen = BTreeSet::new();
        for g in s.gluings() {
            prop_assert_eq!(s.partner(g.a), Some((g.b, g.flipped)));
            prop_assert_eq!(s.partner(g.b), Some((g.a, g.flipped)));
            prop_assert!(seen.insert(g.a) && seen.insert(g.b));
        }
    }

    #[test]
    fn counts_are_consistent((s, _) in surfaces()) {
        let glued = s.gluings().len();
        let unglued = s.unglued_slots().count();
        prop_assert_eq!(s.total_slots(), 2 * glued + unglued);
        let (_, e, f) = s.counts();
        prop_assert_eq!(e, s.total_slots() - glued);
        prop_assert_eq!(f, s.face_count());
        let corners: usize = s.vertices().iter().map(|v| v.corners.len()).sum();
        prop_assert_eq!(corners, s.faces().iter().map(|f| f.sides).sum::<usize>());
    }

    #[test]
    fn gauss_bonnet_with_boundary((s, _) in surfaces()) {
        let a = analyze(&s);
        let t = a.topology;
        prop_assert_eq!(t.total_defect + t.total_turning, AngleValue::degrees(360) * t.chi);
    }

    #[test]
    fn spec_round_trip((s, _) in surfaces()) {
        let text = write_spec(&s);
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(write_spec(&back), text);
        prop_assert_eq!(back.counts(), s.counts());
        prop_assert_eq!(back.is_closed(), s.is_closed());
        prop_assert_eq!(back.is_orientable(), s.is_orientable());
        let sizes = |s: &Surface| { let mut v: Vec<usize> = s.faces().iter().map(|f| f.sides).collect(); v.sort(); v };
        prop_assert_eq!(sizes(&back), sizes(&s));
    }

    #[test]
    fn orientability_ignores_gluing_order((s, applied) in surfaces(), seed in any::<u64>()) {
        let mut order = applied.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut t = Surface::new();
        for f in s.faces() {
            t.add_unit_face(f.sides).unwrap();
        }
        for (a, b, flip) in order {
            t.glue(a, b, flip).unwrap();
        }
        prop_assert_eq!(t.is_orientable(), s.is_orientable());
        prop_assert_eq!(t.counts(), s.counts());
    }
}

/// A connected region grown breadth-first from a random face.
fn grow(s: &Surface, rng: &mut ChaCha8Rng) -> Vec<FaceId> {
    let target = rng.gen_range(1..=s.face_count().max(2) - 1);
    let start = FaceId(rng.gen_range(0..s.face_count()));
    let mut region = vec![start];
    let mut inside = BTreeSet::from([start]);
    let mut k = 0;
    while region.len() < target && k < region.len() {
        let f = region[k];
        k += 1;
        for i in 0..s.face(f).sides {
            if let Some((o, _)) = s.partner(SlotRef::new(f, i)) {
                if region.len() < target && rng.gen_bool(0.7) && inside.insert(o.face) {
                    region.push(o.face);
                }
            }
        }
    }
    region
}

#[test]
fn random_regions_satisfy_gauss_bonnet() {
    let surfaces = [
        solid(SolidId::TruncatedIcosahedron).unwrap(),
        solid(SolidId::SnubCube).unwrap(),
        solid(SolidId::Rhombicosidodecahedron).unwrap(),
        torus_9fold(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut disks, mut complements) = (0, 0);
    while disks < 100 {
        let s = &surfaces[rng.gen_range(0..surfaces.len())];
        let region = grow(s, &mut rng);
        let Ok(r) = region_gauss_bonnet(s, &region) else { continue };
        assert!(r.holds, "{r:?}");
        if r.chi != 1 {
            continue;
        }
        disks += 1;
        let inside: BTreeSet<FaceId> = region.iter().copied().collect();
        let rest: Vec<FaceId> = s.face_ids().filter(|f| !inside.contains(f)).collect();
        let Ok(c) = region_gauss_bonnet(s, &rest) else { continue };
        assert!(c.holds);
        // Vertices interior to neither side carry the remaining defect.
        let vertices = s.vertices();
        let shared: AngleValue = (0..vertices.len())
            .filter(|v| !r.enclosed_vertices.contains(v) && !c.enclosed_vertices.contains(v))
            .map(|v| vertex_defect(s, &vertices[v]).unwrap())
            .sum();
        assert_eq!(r.enclosed + c.enclosed + shared, total_defect(s));
        complements += 1;
    }
    assert!(complements > 20, "{complements}");
}

#[test]
fn hyperbolic_relaxation_depends_only_on_seed() {
    let s = football_disk(7, 2);
    let before = total_defect(&s);
    let run = |seed| {
        let mut m = init_embedding(&s, seed).unwrap();
        let r = relax(&mut m, RelaxOptions { max_iters: 3000, tol: 1e-8 }).unwrap();
        (m.positions, r)
    };
    let (a, ra) = run(5);
    let (b, rb) = run(5);
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    assert!(ra.max_residual.is_finite() && ra.energy >= 0.0);
    let (c, _) = run(6);
    assert_ne!(a, c);
    assert_eq!(total_defect(&s), before);
}
