//! Cross-module properties of the curve, projection, diagram and flow code.

use knot_energies::diagrams::{chord_diagram_of, conway_a2_skein, CodeToken, KnotDiagramCode};
use knot_energies::energies::{energy, EnergyKind, QuadratureConfig};
use knot_energies::gauss::{self, MCConfig};
use knot_energies::mobius::MobiusTransform;
use knot_energies::projections::{pair_crossing_count, project_crossings, project_crossings_brute, projection_code};
use knot_energies::relax::{relax, FlowConfig};
use knot_energies::{rng, Vec3, ZooSpec};
use nalgebra::Rotation3;
use proptest::prelude::*;

fn quick() -> QuadratureConfig {
    QuadratureConfig {
        richardson: false,
        ..QuadratureConfig::default()
    }
}

fn knot_spec() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("trefoil:n=128"),
        Just("figure-eight:n=128"),
        Just("torus2q:q=5,n=160"),
        Just("twist:k=2,n=160"),
    ]
}

fn direction() -> impl Strategy<Value = Vec3> {
    (any::<u64>()).prop_map(|s| rng::unit_vector(&mut rng::stream(s, 0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn writhe_under_similarities(spec in knot_spec(), a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
                                 scale in 0.2f64..5.0, shift in prop::array::uniform3(-5.0f64..5.0)) {
        let curve = ZooSpec::parse(spec).unwrap().sample().unwrap();
        let rot = Rotation3::from_euler_angles(a, b, c);
        let t = Vec3::from(shift);
        let moved = curve.map_points(|p| rot * p * scale + t).unwrap();
        let w0 = gauss::writhe(&curve, &quick()).unwrap().value;
        let w1 = gauss::writhe(&moved, &quick()).unwrap().value;
        prop_assert!((w0 - w1).abs() < 1e-9, "{} vs {}", w0, w1);
        let reflected = curve.map_points(|p| -p).unwrap();
        let w2 = gauss::writhe(&reflected, &quick()).unwrap().value;
        prop_assert!((w0 + w2).abs() < 1e-9);
    }

    #[test]
    fn projection_counts(spec in knot_spec(), v in direction(), w in direction()) {
        let curve = ZooSpec::parse(spec).unwrap().sample().unwrap();
        let a = project_crossings(&curve, v);
        prop_assert_eq!(&a, &project_crossings_brute(&curve, v));
        let b = project_crossings(&curve, -v);
        if a.regular && b.regular {
            prop_assert!(a.signed_count().unsigned_abs() as usize <= a.count());
            prop_assert_eq!(a.count(), b.count());
            prop_assert_eq!(a.signed_count(), b.signed_count());
        }
        if let (Ok(x), Ok(y)) = (pair_crossing_count(&curve, v, w), pair_crossing_count(&curve, w, v)) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn non_interleaved_codes_are_unknotted(opens in prop::collection::vec(any::<bool>(), 2..16), flips in any::<u64>()) {
        // a balanced bracket word gives a matching without interleaved chords
        let mut stack: Vec<CodeToken> = Vec::new();
        let mut tokens = Vec::new();
        for (k, open) in opens.iter().enumerate() {
            if *open || stack.is_empty() {
                let bits = flips >> (2 * (k % 32));
                let t = CodeToken { id: k + 1, over: bits & 1 == 1, sign: if bits & 2 == 2 { 1 } else { -1 } };
                stack.push(t);
                tokens.push(t);
            } else {
                let t = stack.pop().unwrap();
                tokens.push(CodeToken { over: !t.over, ..t });
            }
        }
        while let Some(t) = stack.pop() {
            tokens.push(CodeToken { over: !t.over, ..t });
        }
        let code = KnotDiagramCode::new(tokens).unwrap();
        prop_assert_eq!(chord_diagram_of(&code).intersecting_pairs(), 0);
        prop_assert_eq!(conway_a2_skein(&code).unwrap(), 0);
    }

    #[test]
    fn zoo_sampling_is_deterministic(seed in any::<u64>(), mode in 2u32..7, amp in 0.0f64..0.3) {
        let spec = format!("perturbed_circle:amp={amp},mode={mode},seed={seed},n=64");
        let a = ZooSpec::parse(&spec).unwrap().sample().unwrap();
        let b = ZooSpec::parse(&spec).unwrap().sample().unwrap();
        prop_assert_eq!(a.points(), b.points());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn energy_is_mobius_invariant(index in 0u64..1000) {
        let fine = ZooSpec::parse("trefoil:n=512").unwrap().sample().unwrap();
        let t = MobiusTransform::random_far_inversion(&fine, 99, index).unwrap();
        let image = t.transform_curve(&fine).unwrap().resample_arclength(256).unwrap();
        let base = fine.resample_arclength(256).unwrap();
        let cfg = QuadratureConfig::default();
        let e0 = energy(&base, EnergyKind::E, &cfg).unwrap();
        let e1 = energy(&image, EnergyKind::E, &cfg).unwrap();
        prop_assert!((e0.value - e1.value).abs() <= 1e-2 * e0.value, "{} vs {}", e0.value, e1.value);
    }
}

#[test]
fn a2_survives_small_isotopies() {
    let base = ZooSpec::parse("trefoil:n=256").unwrap().sample().unwrap();
    let cfg = QuadratureConfig::default();
    let mc = MCConfig::new(1_000_000, 5);
    let a = gauss::conway_a2_geometric(&base, &cfg, &mc).unwrap();
    for k in 0..3u64 {
        let mut g = rng::stream(1234, k);
        let dirs = [rng::unit_vector(&mut g), rng::unit_vector(&mut g)];
        let phase = k as f64;
        let bumped = base
            .map_points(|p| {
                let f = (p.x * 1.3 + phase).sin() * 0.08;
                let h = (p.y * 0.9 - phase).cos() * 0.08;
                p + dirs[0] * f + dirs[1] * h
            })
            .unwrap()
            .resample_arclength(256)
            .unwrap();
        let b = gauss::conway_a2_geometric(&bumped, &cfg, &mc).unwrap();
        assert!(
            (a.value - b.value).abs() <= 3.0 * a.error.hypot(b.error),
            "{} vs {}",
            a.value,
            b.value
        );
    }
}

#[test]
fn iy_seeds_agree() {
    let c = ZooSpec::parse("figure-eight:n=256").unwrap().sample().unwrap();
    let a = gauss::i_y(&c, &MCConfig::new(1_000_000, 21)).unwrap();
    let b = gauss::i_y(&c, &MCConfig::new(1_000_000, 22)).unwrap();
    assert!((a.value - b.value).abs() <= 3.0 * a.error.hypot(b.error));
}

#[test]
fn flow_preserves_knot_type_along_trajectory() {
    for spec in ["trefoil:n=96", "figure-eight:n=96"] {
        let c = ZooSpec::parse(spec).unwrap().sample().unwrap();
        let expected = conway_a2_skein(&projection_code(&c, 1).unwrap()).unwrap();
        let t = relax(
            &c,
            &FlowConfig {
                steps: 12,
                snapshot_every: 4,
                ..FlowConfig::default()
            },
        )
        .unwrap();
        assert!(t.records.windows(2).all(|w| w[1].energy <= w[0].energy));
        for s in &t.snapshots {
            assert_eq!(conway_a2_skein(&projection_code(s, 1).unwrap()).unwrap(), expected, "{spec}");
        }
    }
}
