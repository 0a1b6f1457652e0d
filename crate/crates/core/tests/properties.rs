//! Property tests: randomized invariants over the geometry predicates, the
//! similarity scoring, the evaluation metrics, and the serialization paths.

use std::collections::BTreeMap;

use featrec::brep::{model_from_json, model_to_json, Convexity, Curve, FaceType, Model, Surface};
use featrec::config::{EngineConfig, MachiningConditions, ToleranceSettings};
use featrec::descriptor::{
    adjacency_records, extract_descriptor, CurvatureClass, Descriptor, ItemKey, ItemValueSet,
    ScalarValue, WidthLevel,
};
use featrec::eval::{class_index, metrics, ConfusionMatrix};
use featrec::features::FeatureKind;
use featrec::geom::GeomContext;
use featrec::math::Vec3;
use featrec::recognize::{recognize, result_to_json};
use featrec::similarity::descriptor_similarity;
use featrec::synth::fixtures;
use featrec::template::{EqualValue, FeatureTemplate, SetConstraint, TemplateItem, TemplateLibrary};
use proptest::prelude::*;

const CONCRETE_TYPES: [FaceType; 5] = [
    FaceType::Plan,
    FaceType::Cyli,
    FaceType::Coni,
    FaceType::Sphe,
    FaceType::Toro,
];

fn value_set_strategy() -> impl Strategy<Value = ItemValueSet> {
    proptest::collection::vec((0usize..5, proptest::bool::ANY, 1u32..5), 0..8).prop_map(
        |entries| {
            let mut set = ItemValueSet::default();
            for (ft, convex, count) in entries {
                let conv = if convex { Convexity::Convex } else { Convexity::Concave };
                for _ in 0..count {
                    set.add(CONCRETE_TYPES[ft], conv);
                }
            }
            set
        },
    )
}

/// A fixed descriptor for scoring tests; sets carry {PLAN|CONCAVE: 2}.
fn probe_descriptor() -> Descriptor {
    let pair = ItemValueSet(
        [((FaceType::Plan, Convexity::Concave), 2u32)].into_iter().collect(),
    );
    Descriptor {
        f_facetype: FaceType::Plan,
        f_curvature: CurvatureClass::Flat,
        f_facemachining: WidthLevel::Shorter,
        f_filletmachining: WidthLevel::Longer,
        f_chamfermachining: WidthLevel::Longer,
        ol_convexity: pair.clone(),
        ol_continuity: pair.clone(),
        ol_parallel: pair.clone(),
        ol_perpendicular: pair.clone(),
        ol_acute: pair.clone(),
        ol_obtuse: pair.clone(),
        il_convexity: pair.clone(),
        il_continuity: pair.clone(),
        il_parallel: pair.clone(),
        il_perpendicular: pair.clone(),
        il_acute: pair.clone(),
        il_obtuse: pair,
        ax_parallel: true,
        ax_coaxial: false,
        ax_interference: false,
    }
}

fn satisfied_item(d: &Descriptor, key: ItemKey) -> TemplateItem {
    if key.is_loop_item() {
        TemplateItem {
            key,
            min: Some(SetConstraint {
                face_type: FaceType::Any,
                convexity: Convexity::Concave,
                count: 0,
            }),
            max: None,
            equal: None,
        }
    } else {
        TemplateItem {
            key,
            min: None,
            max: None,
            equal: Some(EqualValue::Scalar(d.scalar(key).expect("scalar item"))),
        }
    }
}

fn violated_item(key: ItemKey) -> TemplateItem {
    if key.is_loop_item() {
        TemplateItem {
            key,
            min: Some(SetConstraint {
                face_type: FaceType::Any,
                convexity: Convexity::Concave,
                count: 999,
            }),
            max: None,
            equal: None,
        }
    } else {
        TemplateItem {
            key,
            min: None,
            max: None,
            equal: Some(EqualValue::Scalar(ScalarValue::FaceType(FaceType::Toro))),
        }
    }
}

fn template_of(items: Vec<TemplateItem>) -> FeatureTemplate {
    FeatureTemplate {
        feature: FeatureKind::SimpleHole,
        variant_id: "property_case".to_string(),
        composite: false,
        fold_angles: true,
        items,
        weights: None,
    }
}

fn rotate(axis: Vec3, sin: f64, cos: f64, v: Vec3) -> Vec3 {
    v * cos + axis.cross(v) * sin + axis * (axis.dot(v) * (1.0 - cos))
}

fn moved_model(m: &Model, axis: Vec3, angle: f64, shift: Vec3) -> Model {
    let (sin, cos) = angle.sin_cos();
    let dir = |v: Vec3| rotate(axis, sin, cos, v);
    let point = |p: Vec3| dir(p) + shift;
    let mut out = m.clone();
    for v in &mut out.vertices {
        v.point = point(v.point);
    }
    for e in &mut out.edges {
        if let Curve::Arc { center, axis: arc_axis, .. } = &mut e.curve {
            *center = point(*center);
            *arc_axis = dir(*arc_axis);
        }
    }
    for f in &mut out.faces {
        f.surface = match f.surface {
            Surface::Plane { origin, normal } => {
                Surface::Plane { origin: point(origin), normal: dir(normal) }
            }
            Surface::Cylinder { axis_origin, axis_dir, radius } => Surface::Cylinder {
                axis_origin: point(axis_origin),
                axis_dir: dir(axis_dir),
                radius,
            },
            Surface::Cone { apex, axis_dir, half_angle } => {
                Surface::Cone { apex: point(apex), axis_dir: dir(axis_dir), half_angle }
            }
            Surface::Sphere { center, radius } => {
                Surface::Sphere { center: point(center), radius }
            }
            Surface::Torus { center, axis_dir, major_radius, minor_radius } => Surface::Torus {
                center: point(center),
                axis_dir: dir(axis_dir),
                major_radius,
                minor_radius,
            },
        };
    }
    out
}

fn unit_axis() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("axis long enough to normalize", |(x, y, z)| {
            Vec3::new(x, y, z).normalized()
        })
}

/// Valid counterbore parameters: hole strictly inside the bore, bore inside
/// the 20 x 20 x 12 block.
fn counterbore_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (3.0f64..7.0, 2.0f64..9.0, 0.2f64..0.9)
        .prop_map(|(bore_r, bore_d, frac)| (bore_r, bore_d, bore_r * frac))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The ANY wildcard magnitude is the sum of the concrete counts.
    #[test]
    fn any_magnitude_sums_concrete_counts(set in value_set_strategy()) {
        for conv in [Convexity::Convex, Convexity::Concave] {
            let sum: u32 = CONCRETE_TYPES.iter().map(|&ft| set.count(ft, conv)).sum();
            prop_assert_eq!(set.magnitude(FaceType::Any, conv), sum);
            for &ft in &CONCRETE_TYPES {
                prop_assert_eq!(set.magnitude(ft, conv), set.count(ft, conv));
            }
        }
    }

    /// Arbitrary positive weights renormalize to sum 1; uniform weights give
    /// the exact satisfied/active fraction.
    #[test]
    fn weights_renormalize(
        k in 1usize..=20,
        raw in proptest::collection::vec(0.01f64..10.0, 20),
        violated_bits in proptest::collection::vec(proptest::bool::ANY, 20),
    ) {
        let d = probe_descriptor();
        let keys = &ItemKey::ALL[..k];

        let template = template_of(keys.iter().map(|&key| satisfied_item(&d, key)).collect());
        let weights: BTreeMap<ItemKey, f64> =
            keys.iter().zip(&raw).map(|(&key, &w)| (key, w)).collect();
        let score = descriptor_similarity(&template, &d, Some(&weights)).unwrap();
        prop_assert!(
            (score.value - 1.0).abs() <= 1e-12,
            "weighted all-satisfied score {} drifted",
            score.value
        );

        let items: Vec<TemplateItem> = keys
            .iter()
            .zip(&violated_bits)
            .map(|(&key, &bad)| if bad { violated_item(key) } else { satisfied_item(&d, key) })
            .collect();
        let satisfied = violated_bits[..k].iter().filter(|&&bad| !bad).count() as u64;
        let score = descriptor_similarity(&template_of(items), &d, None).unwrap();
        prop_assert_eq!(score.exact, Some((satisfied, k as u64)));
        prop_assert_eq!(score.value, satisfied as f64 / k as f64);
    }

    /// Descriptors do not change under rigid motions of the model.
    #[test]
    fn descriptors_invariant_under_rigid_motion(
        axis in unit_axis(),
        angle in 0.0f64..std::f64::consts::TAU,
        sx in -60.0f64..60.0,
        sy in -60.0f64..60.0,
        sz in -60.0f64..60.0,
    ) {
        let fx = fixtures::counterbore_breakout().expect("fixture");
        let moved = moved_model(&fx.model, axis, angle, Vec3::new(sx, sy, sz));
        moved.ensure_valid().expect("moved model stays valid");
        let tols = ToleranceSettings::default();
        let conditions = MachiningConditions::default();
        let ctx_a = GeomContext::new(&fx.model, &tols);
        let ctx_b = GeomContext::new(&moved, &tols);
        for (fa, fb) in fx.model.faces.iter().zip(&moved.faces) {
            for fold in [true, false] {
                let da = extract_descriptor(&ctx_a, fa, &conditions, fold);
                let db = extract_descriptor(&ctx_b, fb, &conditions, fold);
                prop_assert_eq!(da, db, "face {} fold {}", fa.id, fold);
            }
        }
    }

    /// Edge convexity agrees from both sides of the edge, across random
    /// counterbore geometry.
    #[test]
    fn convexity_symmetric_in_face_pair((bore_r, bore_d, hole_r) in counterbore_params()) {
        let fx = fixtures::counterbore_block(bore_r, bore_d, hole_r).expect("fixture");
        let tols = ToleranceSettings::default();
        let ctx = GeomContext::new(&fx.model, &tols);
        let mut seen: BTreeMap<(u32, u32, u32), Convexity> = BTreeMap::new();
        for face in &fx.model.faces {
            for r in adjacency_records(&ctx, face) {
                seen.insert((face.id.0, r.mate.0, r.edge.0), r.convexity);
            }
        }
        for (&(a, b, e), &conv) in &seen {
            let back = seen.get(&(b, a, e));
            prop_assert_eq!(back, Some(&conv), "edge {} between {} and {}", e, a, b);
        }
    }

    /// Module metrics equal a brute-force recount over the raw label pairs.
    #[test]
    fn metrics_match_brute_force(
        pairs in proptest::collection::vec((0usize..17, 0usize..17), 5..40),
    ) {
        let class_of = |i: usize| -> Option<FeatureKind> {
            if i == 0 { None } else { Some(FeatureKind::ALL[i - 1]) }
        };
        let mut cm = ConfusionMatrix::default();
        for &(t, p) in &pairs {
            cm.record(class_of(t), class_of(p));
        }
        let m = metrics(&cm).unwrap();
        let n = pairs.len() as u64;
        for i in 0..17usize {
            let cls = class_of(i);
            let tp = pairs.iter().filter(|&&(t, p)| t == i && p == i).count() as u64;
            let fp = pairs.iter().filter(|&&(t, p)| t != i && p == i).count() as u64;
            let fneg = pairs.iter().filter(|&&(t, p)| t == i && p != i).count() as u64;
            let tn = n - tp - fp - fneg;
            let row = &m.per_class[class_index(cls)];
            prop_assert_eq!(
                (row.true_pos, row.false_pos, row.false_neg, row.true_neg),
                (tp, fp, fneg, tn)
            );
            // Spot-check the scalar metrics against direct division.
            if tp + fp > 0 {
                prop_assert_eq!(row.precision.to_f64(), tp as f64 / (tp + fp) as f64);
            }
            if tp + fneg > 0 {
                prop_assert_eq!(row.recall.to_f64(), tp as f64 / (tp + fneg) as f64);
            }
            prop_assert_eq!(row.accuracy.to_f64(), (tp + tn) as f64 / n as f64);
        }
        let correct = pairs.iter().filter(|&&(t, p)| t == p).count() as u64;
        prop_assert_eq!(m.correct_faces, correct);
        prop_assert_eq!(m.total_faces, n);
    }

    /// Model JSON serialization roundtrips exactly.
    #[test]
    fn model_json_roundtrip((bore_r, bore_d, hole_r) in counterbore_params()) {
        let fx = fixtures::counterbore_block(bore_r, bore_d, hole_r).expect("fixture");
        let text = model_to_json(&fx.model);
        let back = model_from_json(&text).expect("parse back");
        prop_assert_eq!(&back, &fx.model);
        prop_assert_eq!(model_to_json(&back), text);
    }

    /// Recognition output is byte-for-byte deterministic.
    #[test]
    fn recognition_deterministic((bore_r, bore_d, hole_r) in counterbore_params()) {
        let fx = fixtures::counterbore_block(bore_r, bore_d, hole_r).expect("fixture");
        let lib = TemplateLibrary::builtin();
        let cfg = EngineConfig::default();
        let a = result_to_json(&recognize(&fx.model, lib, &cfg).expect("first run"));
        let b = result_to_json(&recognize(&fx.model, lib, &cfg).expect("second run"));
        prop_assert_eq!(a, b);
    }
}
