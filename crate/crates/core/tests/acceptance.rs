//! Release gate: ten end-to-end checks over the whole pipeline. Each test
//! prints one `ACCEPTANCE nn PASS` / `ACCEPTANCE nn FAIL: reason` line so a
//! plain `cargo test --test acceptance -- --nocapture` doubles as a report.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use featrec::brep::{load_model, Convexity, Curve, FaceId, FaceType, Model, Surface};
use featrec::config::{EngineConfig, MachiningConditions, ToleranceSettings};
use featrec::descriptor::{
    adjacency_records, extract_descriptor, CurvatureClass, Descriptor, ItemKey, ItemValueSet,
    ScalarValue, WidthLevel,
};
use featrec::eval::{class_index, evaluate_model, metrics, ConfusionMatrix, Ratio};
use featrec::features::FeatureKind;
use featrec::geom::GeomContext;
use featrec::math::Vec3;
use featrec::recognize::{recognize, result_to_json};
use featrec::similarity::descriptor_similarity;
use featrec::step::load_step;
use featrec::synth::{fixtures, standard_suite, SynthesizedModel};
use featrec::template::{
    EqualValue, FeatureTemplate, SetConstraint, TemplateItem, TemplateLibrary,
};

/// Run one criterion body, report its outcome on stdout, and re-raise any
/// failure so the test target itself fails.
fn run(n: u32, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("ACCEPTANCE {n:02} PASS"),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&'static str>().copied())
                .unwrap_or("panic without message");
            println!("ACCEPTANCE {n:02} FAIL: {msg}");
            panic!("criterion {n:02} failed: {msg}");
        }
    }
}

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

fn library() -> &'static TemplateLibrary {
    TemplateLibrary::builtin()
}

fn conditions() -> MachiningConditions {
    MachiningConditions::default()
}

fn tols() -> ToleranceSettings {
    ToleranceSettings::default()
}

fn face_ids(model: &Model) -> Vec<FaceId> {
    model.faces.iter().map(|f| f.id).collect()
}

fn descriptor_of(model: &Model, face: FaceId, fold_angles: bool) -> Descriptor {
    let tols = tols();
    let ctx = GeomContext::new(model, &tols);
    let f = model.face(face).expect("known face id");
    extract_descriptor(&ctx, f, &conditions(), fold_angles)
}

/// Deterministic 64-bit LCG; the tests need repeatable "random" streams.
fn lcg(state: &mut u64) -> u64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    *state
}

/// Uniform draw in [0, 1).
fn unit01(state: &mut u64) -> f64 {
    (lcg(state) >> 11) as f64 / (1u64 << 53) as f64
}

const CONCRETE_TYPES: [FaceType; 5] = [
    FaceType::Plan,
    FaceType::Cyli,
    FaceType::Coni,
    FaceType::Sphe,
    FaceType::Toro,
];

// ---------------------------------------------------------------------------
// 01: the whole curated suite (minus the two pinned-failure fixtures) is
// recognized perfectly: pooled macro precision/recall/accuracy/F1 all equal 1.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_full_suite_perfect_metrics() {
    run(1, || {
        let started = Instant::now();
        let suite = standard_suite();
        assert!(
            suite.len() >= 24,
            "suite has {} fixtures, need at least 24",
            suite.len()
        );
        let names: BTreeSet<&str> = suite.iter().map(|s| s.name.as_str()).collect();
        for required in [
            "hole_one_cylinder",       // full-cylinder hole wall
            "hole_two_half_cylinders", // split hole wall
            "turned_hub_bore",         // rotational stock
            "turned_hub_pocket",
        ] {
            assert!(names.contains(required), "suite is missing fixture {required}");
        }

        let mut pooled = ConfusionMatrix::default();
        let mut kinds: BTreeSet<FeatureKind> = BTreeSet::new();
        let active: Vec<&SynthesizedModel> =
            suite.iter().filter(|s| !s.pinned_misrecognition).collect();
        assert!(active.len() >= 22, "only {} unpinned fixtures", active.len());
        for fx in active {
            let result = recognize(&fx.model, library(), &cfg())
                .unwrap_or_else(|e| panic!("{}: recognition failed: {e}", fx.name));
            let ids = face_ids(&fx.model);
            let cm = evaluate_model(&ids, &fx.truth, &result)
                .unwrap_or_else(|e| panic!("{}: evaluation failed: {e}", fx.name));
            pooled.add(&cm);
            for entry in &fx.truth {
                kinds.insert(entry.feature);
            }
        }
        assert_eq!(
            kinds.len(),
            FeatureKind::ALL.len(),
            "ground truth covers only {} of {} subtypes",
            kinds.len(),
            FeatureKind::ALL.len()
        );

        let m = metrics(&pooled).expect("pooled matrix is nonempty");
        for (name, value) in [
            ("precision", m.macro_precision),
            ("recall", m.macro_recall),
            ("accuracy", m.macro_accuracy),
            ("f1", m.macro_f1),
        ] {
            assert!(
                value == Ratio::ONE,
                "macro {name} = {} != 1 exactly",
                value.to_f64()
            );
            assert_eq!(value.rounded4(), 1.0, "macro {name} rounds away from 1.0000");
        }
        let elapsed = started.elapsed().as_secs_f64();
        assert!(elapsed < 10.0, "suite run took {elapsed:.2}s, limit is 10s");
    });
}

// ---------------------------------------------------------------------------
// 02: the worked counterbore example. The annular base face's descriptor has
// the documented values and scores 1.0 against the counterbore template with
// every item bound satisfied.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_counterbore_worked_example() {
    run(2, || {
        let fx = fixtures::counterbore_breakout().expect("fixture builds");
        let annulus = fx.truth[0].base_face;
        let template = library()
            .variants_of(FeatureKind::CounterboreHole)
            .next()
            .expect("builtin counterbore template");
        let d = descriptor_of(&fx.model, annulus, template.fold_angles);

        assert_eq!(d.f_facetype, FaceType::Plan, "f_facetype");
        assert_eq!(d.f_curvature, CurvatureClass::Flat, "f_curvature");
        assert_eq!(
            d.ol_convexity.count(FaceType::Cyli, Convexity::Concave),
            2,
            "outer loop CYLI|CONCAVE count"
        );
        assert_eq!(
            d.ol_convexity.count(FaceType::Plan, Convexity::Convex),
            1,
            "outer loop PLAN|CONVEX count"
        );
        assert_eq!(d.ol_convexity.total(), 3, "outer loop convexity total");
        assert_eq!(
            d.il_convexity.count(FaceType::Cyli, Convexity::Convex),
            2,
            "inner loop CYLI|CONVEX count"
        );
        assert_eq!(d.il_convexity.total(), 2, "inner loop convexity total");
        assert_eq!(
            d.il_perpendicular.count(FaceType::Cyli, Convexity::Convex),
            2,
            "inner loop perpendicular CYLI|CONVEX count"
        );
        assert_eq!(d.il_perpendicular.total(), 2, "inner loop perpendicular total");
        assert!(d.ax_coaxial, "ax_coaxial");

        let score = descriptor_similarity(template, &d, None).expect("score");
        assert_eq!(score.value, 1.0, "similarity not exactly 1.0");
        assert_eq!(score.active, template.items.len() as u32);
        assert_eq!(
            score.exact,
            Some((u64::from(score.active), u64::from(score.active))),
            "exact fraction is not active/active"
        );
        for item in &score.items {
            assert!(item.satisfied(), "item {} not satisfied", item.key.name());
        }
    });
}

// ---------------------------------------------------------------------------
// 03: branch table for one constrained item. Each bound kind (min/max/equal)
// crossed with satisfied/violated/unspecified yields exactly score 1 or 0.
// ---------------------------------------------------------------------------

fn ivs(entries: &[(FaceType, Convexity, u32)]) -> ItemValueSet {
    ItemValueSet(entries.iter().map(|&(f, c, n)| ((f, c), n)).collect())
}

/// A descriptor whose `ol_convexity` is {PLAN|CONCAVE: 2}; everything else
/// is inert so single-item templates can probe one bound at a time.
fn branch_descriptor() -> Descriptor {
    Descriptor {
        f_facetype: FaceType::Plan,
        f_curvature: CurvatureClass::Flat,
        f_facemachining: WidthLevel::Shorter,
        f_filletmachining: WidthLevel::Longer,
        f_chamfermachining: WidthLevel::Longer,
        ol_convexity: ivs(&[(FaceType::Plan, Convexity::Concave, 2)]),
        ol_continuity: ItemValueSet::default(),
        ol_parallel: ItemValueSet::default(),
        ol_perpendicular: ItemValueSet::default(),
        ol_acute: ItemValueSet::default(),
        ol_obtuse: ItemValueSet::default(),
        il_convexity: ItemValueSet::default(),
        il_continuity: ItemValueSet::default(),
        il_parallel: ItemValueSet::default(),
        il_perpendicular: ItemValueSet::default(),
        il_acute: ItemValueSet::default(),
        il_obtuse: ItemValueSet::default(),
        ax_parallel: true,
        ax_coaxial: false,
        ax_interference: false,
    }
}

fn single_item_template(
    min: Option<SetConstraint>,
    max: Option<SetConstraint>,
    equal: Option<EqualValue>,
) -> FeatureTemplate {
    FeatureTemplate {
        feature: FeatureKind::SimpleHole,
        variant_id: "branch_case".to_string(),
        composite: false,
        fold_angles: true,
        items: vec![TemplateItem { key: ItemKey::OlConvexity, min, max, equal }],
        weights: None,
    }
}

fn plan_concave(count: u32) -> SetConstraint {
    SetConstraint { face_type: FaceType::Plan, convexity: Convexity::Concave, count }
}

#[test]
fn acceptance_03_bound_branch_table() {
    run(3, || {
        let d = branch_descriptor();
        // (label, template, expected min_ok/max_ok/equal_ok, expected score)
        let cases: Vec<(&str, FeatureTemplate, [Option<bool>; 3], f64)> = vec![
            (
                "min satisfied",
                single_item_template(Some(plan_concave(1)), None, None),
                [Some(true), None, None],
                1.0,
            ),
            (
                "min violated",
                single_item_template(Some(plan_concave(3)), None, None),
                [Some(false), None, None],
                0.0,
            ),
            (
                "min unspecified",
                single_item_template(None, Some(plan_concave(5)), None),
                [None, Some(true), None],
                1.0,
            ),
            (
                "max satisfied",
                single_item_template(None, Some(plan_concave(2)), None),
                [None, Some(true), None],
                1.0,
            ),
            (
                "max violated",
                single_item_template(None, Some(plan_concave(1)), None),
                [None, Some(false), None],
                0.0,
            ),
            (
                "max unspecified",
                single_item_template(Some(plan_concave(1)), None, None),
                [Some(true), None, None],
                1.0,
            ),
            (
                "equal satisfied",
                single_item_template(None, None, Some(EqualValue::Set(plan_concave(2)))),
                [None, None, Some(true)],
                1.0,
            ),
            (
                "equal violated",
                single_item_template(None, None, Some(EqualValue::Set(plan_concave(1)))),
                [None, None, Some(false)],
                0.0,
            ),
            (
                "equal unspecified",
                single_item_template(Some(plan_concave(1)), None, None),
                [Some(true), None, None],
                1.0,
            ),
        ];
        assert_eq!(cases.len(), 9);
        for (label, template, flags, expected) in cases {
            let score = descriptor_similarity(&template, &d, None)
                .unwrap_or_else(|e| panic!("{label}: {e}"));
            let item = score.items[0];
            assert_eq!(item.min_ok, flags[0], "{label}: min_ok");
            assert_eq!(item.max_ok, flags[1], "{label}: max_ok");
            assert_eq!(item.equal_ok, flags[2], "{label}: equal_ok");
            let s = u8::from(item.satisfied());
            assert_eq!(f64::from(s), expected, "{label}: item score");
            assert_eq!(score.value, expected, "{label}: overall score");
            let sat = u64::from(item.satisfied());
            assert_eq!(score.exact, Some((sat, 1)), "{label}: exact fraction");
        }
    });
}

// ---------------------------------------------------------------------------
// 04: the ANY wildcard aggregates: for random count multisets, the ANY
// magnitude at a convexity equals the sum of the concrete-type counts.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_any_magnitude_aggregates() {
    run(4, || {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for round in 0..500 {
            let mut set = ItemValueSet::default();
            let entries = lcg(&mut state) % 7;
            for _ in 0..entries {
                let ft = CONCRETE_TYPES[(lcg(&mut state) % 5) as usize];
                let conv = if lcg(&mut state) & 1 == 0 {
                    Convexity::Convex
                } else {
                    Convexity::Concave
                };
                for _ in 0..(1 + lcg(&mut state) % 4) {
                    set.add(ft, conv);
                }
            }
            for conv in [Convexity::Convex, Convexity::Concave] {
                let sum: u32 = CONCRETE_TYPES.iter().map(|&ft| set.count(ft, conv)).sum();
                assert_eq!(
                    set.magnitude(FaceType::Any, conv),
                    sum,
                    "round {round}: ANY magnitude mismatch for {conv:?}"
                );
                for &ft in &CONCRETE_TYPES {
                    assert_eq!(
                        set.magnitude(ft, conv),
                        set.count(ft, conv),
                        "round {round}: concrete magnitude mismatch"
                    );
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 05: weight handling. Arbitrary positive weights renormalize so an
// all-satisfied template scores 1 within 1e-12 for 1..=20 active items, and
// uniform weighting yields the exact satisfied/active fraction.
// ---------------------------------------------------------------------------

/// Template item trivially satisfied by `d`.
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

/// Template item that `d` always violates.
fn violated_item(d: &Descriptor, key: ItemKey) -> TemplateItem {
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
        // The probe descriptor has no TORO anywhere, so this never matches.
        debug_assert_ne!(d.scalar(key), Some(ScalarValue::FaceType(FaceType::Toro)));
        TemplateItem {
            key,
            min: None,
            max: None,
            equal: Some(EqualValue::Scalar(ScalarValue::FaceType(FaceType::Toro))),
        }
    }
}

fn k_item_template(items: Vec<TemplateItem>) -> FeatureTemplate {
    FeatureTemplate {
        feature: FeatureKind::SimpleHole,
        variant_id: "weight_case".to_string(),
        composite: false,
        fold_angles: true,
        items,
        weights: None,
    }
}

#[test]
fn acceptance_05_weight_renormalization() {
    run(5, || {
        let d = branch_descriptor();
        let mut state = 0x1234_5678_9abc_def1u64;
        for k in 1..=ItemKey::ALL.len() {
            let keys = &ItemKey::ALL[..k];

            // Arbitrary positive weights over an all-satisfied template: the
            // renormalized weights must sum to one, so R = 1 within 1e-12.
            let template =
                k_item_template(keys.iter().map(|&key| satisfied_item(&d, key)).collect());
            let mut weights: BTreeMap<ItemKey, f64> = BTreeMap::new();
            for &key in keys {
                weights.insert(key, 0.05 + unit01(&mut state) * 9.95);
            }
            let score =
                descriptor_similarity(&template, &d, Some(&weights)).expect("weighted score");
            assert_eq!(score.active, k as u32);
            assert_eq!(score.satisfied, k as u32);
            assert!(
                (score.value - 1.0).abs() <= 1e-12,
                "k={k}: renormalized weighted score {} drifts past 1e-12",
                score.value
            );

            // Uniform weights (no weight table): exact rational fraction.
            let violated = k / 2;
            let mixed: Vec<TemplateItem> = keys
                .iter()
                .enumerate()
                .map(|(i, &key)| {
                    if i < violated {
                        violated_item(&d, key)
                    } else {
                        satisfied_item(&d, key)
                    }
                })
                .collect();
            let template = k_item_template(mixed);
            let score = descriptor_similarity(&template, &d, None).expect("uniform score");
            let satisfied = (k - violated) as u64;
            assert_eq!(
                score.exact,
                Some((satisfied, k as u64)),
                "k={k}: exact fraction"
            );
            assert_eq!(
                score.value,
                satisfied as f64 / k as f64,
                "k={k}: uniform score is not the exact fraction"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 06: composite-hole priority. Countersink and counterbore fixtures yield
// exactly one composite instance each, and no member face keeps a plain
// (simple/taper) hole label.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_composite_priority() {
    run(6, || {
        let fixtures_and_kinds = [
            (
                fixtures::countersink_block(5.0, 2.5, 4.0).expect("countersink fixture"),
                FeatureKind::CountersinkHole,
            ),
            (
                fixtures::counterbore_block(6.0, 6.0, 3.0).expect("counterbore fixture"),
                FeatureKind::CounterboreHole,
            ),
        ];
        for (fx, kind) in fixtures_and_kinds {
            let result = recognize(&fx.model, library(), &cfg()).expect("recognize");
            let composites: Vec<_> = result
                .instances
                .iter()
                .filter(|i| i.feature.is_composite_hole())
                .collect();
            assert_eq!(
                composites.len(),
                1,
                "{}: {} composite instances, expected exactly 1",
                fx.name,
                composites.len()
            );
            assert_eq!(composites[0].feature, kind, "{}: composite kind", fx.name);
            for &member in &composites[0].members {
                let labels = &result
                    .face_labels(member)
                    .unwrap_or_else(|| panic!("{}: no label row for {member}", fx.name))
                    .labels;
                for label in labels {
                    assert!(
                        !label.feature.is_plain_hole(),
                        "{}: member {member} still labeled {}",
                        fx.name,
                        label.feature
                    );
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 07: representation robustness. The split-wall hole is still a simple hole,
// and its base descriptor differs from the full-cylinder representation only
// in cylinder-face counts (loop tallies compared with outer+inner merged,
// since the split moves rim edges between loop classes).
// ---------------------------------------------------------------------------

fn merged_tally(
    a: &ItemValueSet,
    b: &ItemValueSet,
    keep_cylinders: bool,
) -> BTreeMap<(FaceType, Convexity), u32> {
    let mut out = BTreeMap::new();
    for ((ft, conv), n) in a.iter().chain(b.iter()) {
        if keep_cylinders || ft != FaceType::Cyli {
            *out.entry((ft, conv)).or_insert(0) += n;
        }
    }
    out
}

#[test]
fn acceptance_07_hole_representation_robustness() {
    run(7, || {
        let one = fixtures::hole_one_cylinder(5.0).expect("fixture");
        let two = fixtures::hole_two_half_cylinders(5.0).expect("fixture");
        let result = recognize(&two.model, library(), &cfg()).expect("recognize");
        assert!(
            result.instances.iter().any(|i| i.feature == FeatureKind::SimpleHole),
            "split-wall hole not recognized as a simple hole"
        );
        let base_two = two.truth[0].base_face;
        assert!(
            result
                .face_labels(base_two)
                .expect("labels for hole wall")
                .labels
                .iter()
                .any(|l| l.feature == FeatureKind::SimpleHole),
            "simple-hole label missing on the half-cylinder wall"
        );

        let fold = library()
            .variants_of(FeatureKind::SimpleHole)
            .next()
            .expect("simple hole template")
            .fold_angles;
        let d1 = descriptor_of(&one.model, one.truth[0].base_face, fold);
        let d2 = descriptor_of(&two.model, base_two, fold);

        for key in ItemKey::ALL {
            if !key.is_loop_item() {
                assert_eq!(
                    d1.scalar(key),
                    d2.scalar(key),
                    "scalar item {} differs between representations",
                    key.name()
                );
            }
        }
        fn tallies(d: &Descriptor) -> [(&'static str, &ItemValueSet, &ItemValueSet); 6] {
            [
                ("convexity", &d.ol_convexity, &d.il_convexity),
                ("continuity", &d.ol_continuity, &d.il_continuity),
                ("parallel", &d.ol_parallel, &d.il_parallel),
                ("perpendicular", &d.ol_perpendicular, &d.il_perpendicular),
                ("acute", &d.ol_acute, &d.il_acute),
                ("obtuse", &d.ol_obtuse, &d.il_obtuse),
            ]
        }
        let mut any_cylinder_diff = false;
        for ((name, a1, b1), (_, a2, b2)) in tallies(&d1).iter().zip(tallies(&d2).iter()) {
            assert_eq!(
                merged_tally(a1, b1, false),
                merged_tally(a2, b2, false),
                "non-cylinder {name} tallies differ between representations"
            );
            if merged_tally(a1, b1, true) != merged_tally(a2, b2, true) {
                any_cylinder_diff = true;
            }
        }
        assert!(
            any_cylinder_diff,
            "representations should differ in cylinder-face counts"
        );
    });
}

// ---------------------------------------------------------------------------
// 08: pinned misrecognitions stay pinned. The steep pit reads as an opened
// pocket (its base wall's interference ray escapes), and the merged
// slot+pocket floor reads as a simple slot only.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_pinned_misrecognitions() {
    run(8, || {
        let pit = fixtures::pit_steep().expect("fixture");
        assert!(pit.pinned_misrecognition, "pit fixture must be pinned");
        let result = recognize(&pit.model, library(), &cfg()).expect("recognize");
        let wall = pit.truth[0].base_face;
        let labels = &result.face_labels(wall).expect("labels for pit wall").labels;
        assert!(
            labels.iter().any(|l| l.feature == FeatureKind::OpenedPocket),
            "steep pit wall not labeled opened pocket"
        );
        assert!(
            labels.iter().all(|l| l.feature != FeatureKind::FloorlessPocket),
            "floorless pocket unexpectedly recognized"
        );
        assert!(
            result
                .instances
                .iter()
                .any(|i| i.feature == FeatureKind::OpenedPocket && i.base_face == wall),
            "no opened-pocket instance based at the steep wall"
        );
        let fold = library()
            .variants_of(FeatureKind::OpenedPocket)
            .next()
            .expect("opened pocket template")
            .fold_angles;
        let d = descriptor_of(&pit.model, wall, fold);
        assert!(
            !d.ax_interference,
            "interference ray should escape through the pit mouth"
        );

        let merged = fixtures::slot_pocket_merged().expect("fixture");
        assert!(merged.pinned_misrecognition, "merged fixture must be pinned");
        let result = recognize(&merged.model, library(), &cfg()).expect("recognize");
        let floor = merged.truth[0].base_face;
        let labels = &result.face_labels(floor).expect("labels for floor").labels;
        assert!(
            labels.iter().any(|l| l.feature == FeatureKind::SimpleSlot),
            "merged floor not labeled simple slot"
        );
        assert!(
            labels.iter().all(|l| l.feature != FeatureKind::ClosedPocket),
            "merged floor unexpectedly keeps its closed-pocket label"
        );
        assert!(
            result
                .instances
                .iter()
                .any(|i| i.feature == FeatureKind::SimpleSlot && i.base_face == floor),
            "no simple-slot instance based at the merged floor"
        );
    });
}

// ---------------------------------------------------------------------------
// 09: geometric and metric properties. Descriptors are invariant under rigid
// motions, edge convexity is symmetric in the face pair, and the metrics
// module matches a brute-force recount on random label assignments.
// ---------------------------------------------------------------------------

fn rotate(axis: Vec3, sin: f64, cos: f64, v: Vec3) -> Vec3 {
    v * cos + axis.cross(v) * sin + axis * (axis.dot(v) * (1.0 - cos))
}

struct Motion {
    axis: Vec3,
    sin: f64,
    cos: f64,
    shift: Vec3,
}

impl Motion {
    fn random(state: &mut u64) -> Motion {
        let axis = loop {
            let v = Vec3::new(
                unit01(state) * 2.0 - 1.0,
                unit01(state) * 2.0 - 1.0,
                unit01(state) * 2.0 - 1.0,
            );
            if v.norm() > 0.1 && v.norm() < 1.0 {
                break v.normalized().expect("nonzero");
            }
        };
        let angle = unit01(state) * std::f64::consts::TAU;
        let shift = Vec3::new(
            (unit01(state) - 0.5) * 200.0,
            (unit01(state) - 0.5) * 200.0,
            (unit01(state) - 0.5) * 200.0,
        );
        Motion { axis, sin: angle.sin(), cos: angle.cos(), shift }
    }

    fn dir(&self, v: Vec3) -> Vec3 {
        rotate(self.axis, self.sin, self.cos, v)
    }

    fn point(&self, p: Vec3) -> Vec3 {
        self.dir(p) + self.shift
    }

    fn surface(&self, s: &Surface) -> Surface {
        match *s {
            Surface::Plane { origin, normal } => Surface::Plane {
                origin: self.point(origin),
                normal: self.dir(normal),
            },
            Surface::Cylinder { axis_origin, axis_dir, radius } => Surface::Cylinder {
                axis_origin: self.point(axis_origin),
                axis_dir: self.dir(axis_dir),
                radius,
            },
            Surface::Cone { apex, axis_dir, half_angle } => Surface::Cone {
                apex: self.point(apex),
                axis_dir: self.dir(axis_dir),
                half_angle,
            },
            Surface::Sphere { center, radius } => Surface::Sphere {
                center: self.point(center),
                radius,
            },
            Surface::Torus { center, axis_dir, major_radius, minor_radius } => Surface::Torus {
                center: self.point(center),
                axis_dir: self.dir(axis_dir),
                major_radius,
                minor_radius,
            },
        }
    }

    fn model(&self, m: &Model) -> Model {
        let mut out = m.clone();
        for v in &mut out.vertices {
            v.point = self.point(v.point);
        }
        for e in &mut out.edges {
            if let Curve::Arc { center, axis, .. } = &mut e.curve {
                *center = self.point(*center);
                *axis = self.dir(*axis);
            }
        }
        for f in &mut out.faces {
            f.surface = self.surface(&f.surface);
        }
        out
    }
}

/// Minimal exact fraction used only as the oracle; mirrors the documented
/// conventions (x/0 counts as 0, F1 of two zeros is 0).
#[derive(Clone, Copy)]
struct Frac {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl Frac {
    const ZERO: Frac = Frac { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Frac {
        let g = gcd(num.abs(), den.abs()).max(1);
        Frac { num: num / g, den: den / g }
    }

    fn counts(num: u64, den: u64) -> Frac {
        if den == 0 {
            Frac::ZERO
        } else {
            Frac::new(num as i128, den as i128)
        }
    }

    fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den, self.den * o.num)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn pick_class(state: &mut u64) -> Option<FeatureKind> {
    let r = lcg(state) % 17;
    if r == 0 {
        None
    } else {
        Some(FeatureKind::ALL[(r - 1) as usize])
    }
}

#[test]
fn acceptance_09_property_suite() {
    run(9, || {
        let probe_fixtures = [
            fixtures::counterbore_breakout().expect("fixture"),
            fixtures::countersink_block(5.0, 2.5, 4.0).expect("fixture"),
            fixtures::vee_slot(6.0, 6.0).expect("fixture"),
            fixtures::fillet_rim(1.5).expect("fixture"),
        ];

        // Reference descriptors, folded and unfolded, for every face.
        let references: Vec<Vec<(Descriptor, Descriptor)>> = probe_fixtures
            .iter()
            .map(|fx| {
                fx.model
                    .faces
                    .iter()
                    .map(|f| {
                        (
                            descriptor_of(&fx.model, f.id, true),
                            descriptor_of(&fx.model, f.id, false),
                        )
                    })
                    .collect()
            })
            .collect();

        let mut state = 0x0dde_ca5e_0b57_ac1eu64;
        for round in 0..100 {
            let which = round % probe_fixtures.len();
            let fx = &probe_fixtures[which];
            let motion = Motion::random(&mut state);
            let moved = motion.model(&fx.model);
            moved.ensure_valid().unwrap_or_else(|e| {
                panic!("round {round}: moved {} fails validation: {e}", fx.name)
            });
            let tol = tols();
            let ctx = GeomContext::new(&moved, &tol);
            for (face, (folded, unfolded)) in moved.faces.iter().zip(&references[which]) {
                let df = extract_descriptor(&ctx, face, &conditions(), true);
                let du = extract_descriptor(&ctx, face, &conditions(), false);
                assert_eq!(
                    &df, folded,
                    "round {round}: folded descriptor of {} {} changed under rigid motion",
                    fx.name, face.id
                );
                assert_eq!(
                    &du, unfolded,
                    "round {round}: unfolded descriptor of {} {} changed under rigid motion",
                    fx.name, face.id
                );
            }
        }

        // Convexity is symmetric in the face pair.
        for fx in &probe_fixtures {
            let tol = tols();
            let ctx = GeomContext::new(&fx.model, &tol);
            let mut seen: BTreeMap<(u32, u32, u32), Convexity> = BTreeMap::new();
            for face in &fx.model.faces {
                for r in adjacency_records(&ctx, face) {
                    seen.insert((face.id.0, r.mate.0, r.edge.0), r.convexity);
                }
            }
            for (&(a, b, e), &conv) in &seen {
                let back = seen.get(&(b, a, e)).unwrap_or_else(|| {
                    panic!("{}: face {b} has no reciprocal record for edge {e}", fx.name)
                });
                assert_eq!(
                    *back, conv,
                    "{}: convexity asymmetric across edge {e} between faces {a} and {b}",
                    fx.name
                );
            }
        }

        // Metrics equal a brute-force recount over raw label pairs.
        let mut state = 0xfeed_f00d_dead_beefu64;
        for round in 0..1000 {
            let n = 8 + (lcg(&mut state) % 25) as usize;
            let mut truth = Vec::with_capacity(n);
            let mut pred = Vec::with_capacity(n);
            let mut cm = ConfusionMatrix::default();
            for _ in 0..n {
                let t = pick_class(&mut state);
                let p = pick_class(&mut state);
                cm.record(t, p);
                truth.push(t);
                pred.push(p);
            }
            let m = metrics(&cm).expect("nonempty matrix");

            let all_classes: Vec<Option<FeatureKind>> = std::iter::once(None)
                .chain(FeatureKind::ALL.iter().map(|&k| Some(k)))
                .collect();
            let mut sums = [Frac::ZERO; 4];
            let mut present = 0u64;
            for &cls in &all_classes {
                let tp = truth
                    .iter()
                    .zip(&pred)
                    .filter(|&(&t, &p)| t == cls && p == cls)
                    .count() as u64;
                let fp = truth
                    .iter()
                    .zip(&pred)
                    .filter(|&(&t, &p)| t != cls && p == cls)
                    .count() as u64;
                let fneg = truth
                    .iter()
                    .zip(&pred)
                    .filter(|&(&t, &p)| t == cls && p != cls)
                    .count() as u64;
                let tn = n as u64 - tp - fp - fneg;

                let row = &m.per_class[class_index(cls)];
                assert_eq!(
                    (row.true_pos, row.false_pos, row.false_neg, row.true_neg),
                    (tp, fp, fneg, tn),
                    "round {round}: counts for class {cls:?}"
                );

                if tp + fneg == 0 {
                    continue;
                }
                present += 1;
                let p = Frac::counts(tp, tp + fp);
                let r = Frac::counts(tp, tp + fneg);
                let a = Frac::counts(tp + tn, n as u64);
                let f1 = if p.num == 0 && r.num == 0 {
                    Frac::ZERO
                } else {
                    Frac::new(2, 1).mul(p).mul(r).div(p.add(r))
                };
                sums = [
                    sums[0].add(p),
                    sums[1].add(r),
                    sums[2].add(a),
                    sums[3].add(f1),
                ];
            }
            let k = Frac::new(present as i128, 1);
            let expect = [
                sums[0].div(k),
                sums[1].div(k),
                sums[2].div(k),
                sums[3].div(k),
            ];
            let got = [m.macro_precision, m.macro_recall, m.macro_accuracy, m.macro_f1];
            for ((name, e), g) in ["precision", "recall", "accuracy", "f1"]
                .iter()
                .zip(expect)
                .zip(got)
            {
                assert_eq!(
                    g.to_f64(),
                    e.to_f64(),
                    "round {round}: macro {name} disagrees with the recount"
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 10: STEP ingestion. The golden files parse, validate, and recognize
// byte-identically to their JSON-sourced twins.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_step_golden_files() {
    run(10, || {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
        for name in ["golden_cube", "golden_counterbore"] {
            let step_path = dir.join(format!("{name}.step"));
            let (from_step, warnings) = load_step(&step_path)
                .unwrap_or_else(|e| panic!("{name}.step failed to parse: {e}"));
            assert!(
                warnings.is_empty(),
                "{name}.step produced warnings: {warnings:?}"
            );
            from_step
                .ensure_valid()
                .unwrap_or_else(|e| panic!("{name}.step model invalid: {e}"));
            let from_json = load_model(&dir.join(format!("{name}.json")))
                .unwrap_or_else(|e| panic!("{name}.json failed to load: {e}"));

            let out_step = result_to_json(
                &recognize(&from_step, library(), &cfg()).expect("recognize STEP model"),
            );
            let out_json = result_to_json(
                &recognize(&from_json, library(), &cfg()).expect("recognize JSON model"),
            );
            assert_eq!(
                out_step, out_json,
                "{name}: recognition output differs between STEP and JSON sources"
            );
        }
    });
}
