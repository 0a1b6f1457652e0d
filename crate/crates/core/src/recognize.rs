//! Recognition pipeline: score every face against the template library,
//! apply composite-hole priority, and group labeled base faces into
//! feature instances.

use crate::brep::{
    BrepError, Face, FaceId, FaceType, LoopKind, Model, Surface,
};
use crate::config::{EngineConfig, MachiningConditions};
use crate::descriptor::{
    adjacency_records, descriptor_from_records, AdjRecord, Descriptor, ItemKey, ScalarValue,
};
use crate::features::FeatureKind;
use crate::geom::{AngleClass, GeomContext};
use crate::similarity::{classify, descriptor_similarity, SimilarityError, SimilarityScore};
use crate::template::{EqualValue, FeatureTemplate, SetConstraint, TemplateLibrary};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error(transparent)]
    Brep(#[from] BrepError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// Pass/fail of one constrained item, echoed for explainability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelItem {
    pub item: String,
    pub s: u8,
}

/// One classified label on a face: the subtype, the winning variant, its
/// similarity, and the per-item score breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub feature: FeatureKind,
    pub variant: String,
    pub r: f64,
    pub items: Vec<LabelItem>,
}

/// A label removed by composite-hole priority, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suppressed {
    pub feature: FeatureKind,
    pub reason: String,
}

/// Final labeling of one face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceLabels {
    pub id: FaceId,
    pub labels: Vec<Label>,
    pub suppressed: Vec<Suppressed>,
}

/// One recognized feature anchored at a base face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureInstance {
    pub feature: FeatureKind,
    pub base_face: FaceId,
    pub members: Vec<FaceId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

/// The settings the result was produced with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub threshold: f64,
    pub conditions: MachiningConditions,
    pub template_version: String,
}

/// Complete recognition output for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub config: ConfigEcho,
    pub faces: Vec<FaceLabels>,
    pub instances: Vec<FeatureInstance>,
}

impl RecognitionResult {
    /// Labels of one face, if the face exists in this result.
    pub fn face_labels(&self, id: FaceId) -> Option<&FaceLabels> {
        self.faces.iter().find(|f| f.id == id)
    }
}

/// Canonical JSON form of a result; identical inputs yield identical bytes.
pub fn result_to_json(result: &RecognitionResult) -> String {
    let mut text =
        serde_json::to_string_pretty(result).expect("recognition results always serialize");
    text.push('\n');
    text
}

pub fn result_from_json(text: &str) -> Result<RecognitionResult, BrepError> {
    serde_json::from_str(text).map_err(|e| BrepError::Schema(format!("bad result file: {e}")))
}

struct FaceEval<'m> {
    face: &'m Face,
    records: Vec<AdjRecord>,
    folded: Descriptor,
    unfolded: Descriptor,
}

struct Winner<'t> {
    template: &'t FeatureTemplate,
    score: SimilarityScore,
}

/// Whether an adjacency record contributes to the multiset a loop item
/// holds, under the given fold mode.
fn record_in_bucket(key: ItemKey, r: &AdjRecord, fold_angles: bool) -> bool {
    let outer = r.loop_kind == LoopKind::Outer;
    let class = if fold_angles { r.angle_folded } else { r.angle_unfolded };
    match key {
        ItemKey::OlConvexity => outer,
        ItemKey::IlConvexity => !outer,
        ItemKey::OlContinuity => outer && r.continuity_higher,
        ItemKey::IlContinuity => !outer && r.continuity_higher,
        ItemKey::OlParallel => outer && class == AngleClass::Parallel,
        ItemKey::IlParallel => !outer && class == AngleClass::Parallel,
        ItemKey::OlPerpendicular => outer && class == AngleClass::Perpendicular,
        ItemKey::IlPerpendicular => !outer && class == AngleClass::Perpendicular,
        ItemKey::OlAcute => outer && class == AngleClass::Acute,
        ItemKey::IlAcute => !outer && class == AngleClass::Acute,
        ItemKey::OlObtuse => outer && class == AngleClass::Obtuse,
        ItemKey::IlObtuse => !outer && class == AngleClass::Obtuse,
        _ => false,
    }
}

/// Faces witnessing the satisfied loop constraints of a winning template:
/// the base face, the mates behind every satisfied `min`/`equal` loop bound,
/// and both faces of each coincident-axis pair when `ax_coaxial` was
/// required and met.
fn witness_members(
    ctx: &GeomContext,
    ev: &FaceEval,
    template: &FeatureTemplate,
    score: &SimilarityScore,
) -> BTreeSet<FaceId> {
    let mut out = BTreeSet::new();
    out.insert(ev.face.id);
    for (item, item_score) in template.items.iter().zip(&score.items) {
        if item.key.is_loop_item() {
            let mut collect = |c: &SetConstraint| {
                for r in &ev.records {
                    if record_in_bucket(item.key, r, template.fold_angles)
                        && (c.face_type == FaceType::Any || c.face_type == r.mate_type)
                        && c.convexity == r.convexity
                    {
                        out.insert(r.mate);
                    }
                }
            };
            if item_score.min_ok == Some(true) {
                collect(item.min.as_ref().expect("min score implies min bound"));
            }
            if item_score.equal_ok == Some(true) {
                if let Some(EqualValue::Set(c)) = &item.equal {
                    collect(c);
                }
            }
        } else if item.key == ItemKey::AxCoaxial
            && item.equal == Some(EqualValue::Scalar(ScalarValue::Bool(true)))
            && item_score.equal_ok == Some(true)
        {
            let rotational = |kind: LoopKind| -> Vec<FaceId> {
                ev.records
                    .iter()
                    .filter(|r| r.loop_kind == kind)
                    .map(|r| r.mate)
                    .filter(|&m| {
                        ctx.model
                            .face(m)
                            .is_ok_and(|f| f.surface.axis_line().is_some())
                    })
                    .collect()
            };
            for &f1 in &rotational(LoopKind::Outer) {
                for &f2 in &rotational(LoopKind::Inner) {
                    let (fa, fb) = (
                        ctx.model.face(f1).expect("validated mate"),
                        ctx.model.face(f2).expect("validated mate"),
                    );
                    if ctx.coaxial(fa, fb) {
                        out.insert(f1);
                        out.insert(f2);
                    }
                }
            }
        }
    }
    out
}

/// Dimensional parameters worth echoing on an instance: the base surface's
/// radius or half-angle, plus the widest member bore for composite holes.
fn instance_params(
    model: &Model,
    base: &Face,
    members: &BTreeSet<FaceId>,
    feature: FeatureKind,
) -> BTreeMap<String, f64> {
    let mut params = BTreeMap::new();
    match base.surface {
        Surface::Cylinder { radius, .. } => {
            params.insert("radius".to_string(), radius);
        }
        Surface::Cone { half_angle, .. } => {
            params.insert("half_angle".to_string(), half_angle);
        }
        _ => {}
    }
    if feature.is_composite_hole() && !params.contains_key("radius") {
        let bore = members
            .iter()
            .filter_map(|&id| match model.face(id).ok()?.surface {
                Surface::Cylinder { radius, .. } => Some(radius),
                _ => None,
            })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        if let Some(r) = bore {
            params.insert("radius".to_string(), r);
        }
    }
    params
}

/// Run the full pipeline: validate, extract descriptors once per face,
/// score all templates (composites first), pick the best variant per
/// subtype, apply composite-hole priority, and group instances.
pub fn recognize(
    model: &Model,
    library: &TemplateLibrary,
    cfg: &EngineConfig,
) -> Result<RecognitionResult, RecognizeError> {
    model.ensure_valid()?;
    let ctx = GeomContext::new(model, &cfg.tolerances);
    let threshold = cfg.recognition.threshold;

    let mut face_ids: Vec<FaceId> = model.faces.iter().map(|f| f.id).collect();
    face_ids.sort();

    let mut evals: Vec<FaceEval> = Vec::with_capacity(face_ids.len());
    for &id in &face_ids {
        let face = model.face(id)?;
        let records = adjacency_records(&ctx, face);
        let folded = descriptor_from_records(&ctx, face, &cfg.conditions, &records, true);
        let unfolded = descriptor_from_records(&ctx, face, &cfg.conditions, &records, false);
        evals.push(FaceEval { face, records, folded, unfolded });
    }

    // Per face: the best-scoring variant of each subtype, in library order;
    // ties keep the earlier variant. Only classified winners are kept.
    let mut winners: Vec<Vec<Winner>> = Vec::with_capacity(evals.len());
    for ev in &evals {
        let mut per_feature: Vec<(FeatureKind, Winner)> = Vec::new();
        for template in &library.templates {
            let d = if template.fold_angles { &ev.folded } else { &ev.unfolded };
            let score = descriptor_similarity(template, d, None)?;
            match per_feature.iter_mut().find(|(f, _)| *f == template.feature) {
                Some((_, best)) => {
                    if score.cmp_value(&best.score) == Ordering::Greater {
                        *best = Winner { template, score };
                    }
                }
                None => per_feature.push((template.feature, Winner { template, score })),
            }
        }
        let mut kept: Vec<Winner> = per_feature
            .into_iter()
            .map(|(_, w)| w)
            .filter(|w| classify(&w.score, threshold))
            .collect();
        kept.sort_by_key(|w| w.template.feature);
        winners.push(kept);
    }

    // Composite-hole priority: every face claimed by a composite instance
    // (base or member) loses its plain-hole labels.
    let mut claimed: BTreeMap<FaceId, (FeatureKind, FaceId)> = BTreeMap::new();
    let mut composite_members: BTreeMap<(FeatureKind, FaceId), BTreeSet<FaceId>> = BTreeMap::new();
    for (idx, ev) in evals.iter().enumerate() {
        for w in &winners[idx] {
            if !w.template.feature.is_composite_hole() {
                continue;
            }
            let members = witness_members(&ctx, ev, w.template, &w.score);
            for &m in &members {
                claimed.entry(m).or_insert((w.template.feature, ev.face.id));
            }
            composite_members.insert((w.template.feature, ev.face.id), members);
        }
    }

    let mut faces_out: Vec<FaceLabels> = Vec::with_capacity(evals.len());
    let mut instances: Vec<FeatureInstance> = Vec::new();
    for (idx, ev) in evals.iter().enumerate() {
        let mut labels: Vec<Label> = Vec::new();
        let mut suppressed: Vec<Suppressed> = Vec::new();
        for w in &winners[idx] {
            let feature = w.template.feature;
            if feature.is_plain_hole() {
                if let Some(&(composite, base)) = claimed.get(&ev.face.id) {
                    suppressed.push(Suppressed {
                        feature,
                        reason: format!("claimed by {composite} instance based at {base}"),
                    });
                    continue;
                }
            }
            labels.push(Label {
                feature,
                variant: w.template.variant_id.clone(),
                r: w.score.value,
                items: w
                    .score
                    .items
                    .iter()
                    .map(|s| LabelItem {
                        item: s.key.name().to_string(),
                        s: u8::from(s.satisfied()),
                    })
                    .collect(),
            });

            let members: BTreeSet<FaceId> = if feature.is_fillet_or_chamfer() {
                BTreeSet::from([ev.face.id])
            } else if feature.is_composite_hole() {
                composite_members[&(feature, ev.face.id)].clone()
            } else {
                witness_members(&ctx, ev, w.template, &w.score)
            };
            let params = instance_params(model, ev.face, &members, feature);
            instances.push(FeatureInstance {
                feature,
                base_face: ev.face.id,
                members: members.into_iter().collect(),
                params,
            });
        }
        faces_out.push(FaceLabels { id: ev.face.id, labels, suppressed });
    }
    instances.sort_by_key(|i| (i.feature, i.base_face));

    Ok(RecognitionResult {
        config: ConfigEcho {
            threshold,
            conditions: cfg.conditions,
            template_version: library.version.clone(),
        },
        faces: faces_out,
        instances,
    })
}
