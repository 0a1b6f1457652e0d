//! Per-face descriptors: twenty items summarizing a face's own geometry,
//! its outer- and inner-loop neighborhoods, and axis/ray relations.
//!
//! Loop items are multisets keyed by the neighboring face's type and the
//! shared edge's convexity. A neighbor reached over several edges counts
//! once per edge. Seam edges whose mate is the face itself are skipped.

use crate::brep::{Convexity, EdgeId, Face, FaceId, FaceType, LoopKind};
use crate::config::MachiningConditions;
use crate::geom::{AngleClass, GeomContext};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Sign of a face's curvature seen from outside the material: rotational
/// walls bulging outward are POSITIVE (bosses), inward NEGATIVE (holes),
/// and planes FLAT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureClass {
    #[serde(rename = "POSITIVE")]
    Positive,
    #[serde(rename = "FLAT")]
    Flat,
    #[serde(rename = "NEGATIVE")]
    Negative,
}

impl fmt::Display for CurvatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureClass::Positive => "POSITIVE",
            CurvatureClass::Flat => "FLAT",
            CurvatureClass::Negative => "NEGATIVE",
        })
    }
}

/// A width measure compared against a machining threshold: LONGER means at
/// or above the threshold (tool fits), SHORTER means below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WidthLevel {
    #[serde(rename = "LONGER")]
    Longer,
    #[serde(rename = "SHORTER")]
    Shorter,
}

impl fmt::Display for WidthLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WidthLevel::Longer => "LONGER",
            WidthLevel::Shorter => "SHORTER",
        })
    }
}

/// Multiset of (neighbor face type, edge convexity) pairs with counts.
/// Serialized as a list of `{face_type, convexity, count}` entries in key
/// order so output is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemValueSet(pub BTreeMap<(FaceType, Convexity), u32>);

#[derive(Serialize, Deserialize)]
struct ItemValueEntry {
    face_type: FaceType,
    convexity: Convexity,
    count: u32,
}

impl Serialize for ItemValueSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (&(face_type, convexity), &count) in &self.0 {
            seq.serialize_element(&ItemValueEntry { face_type, convexity, count })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ItemValueSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ItemValueSet;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a list of {face_type, convexity, count} entries")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut map = BTreeMap::new();
                while let Some(e) = seq.next_element::<ItemValueEntry>()? {
                    *map.entry((e.face_type, e.convexity)).or_insert(0) += e.count;
                }
                Ok(ItemValueSet(map))
            }
        }
        deserializer.deserialize_seq(V)
    }
}

impl ItemValueSet {
    pub fn add(&mut self, face_type: FaceType, convexity: Convexity) {
        *self.0.entry((face_type, convexity)).or_insert(0) += 1;
    }

    pub fn count(&self, face_type: FaceType, convexity: Convexity) -> u32 {
        self.0.get(&(face_type, convexity)).copied().unwrap_or(0)
    }

    /// Count matched by a template key: a concrete face type looks up its
    /// own entry; ANY sums every entry with the requested convexity.
    pub fn magnitude(&self, face_type: FaceType, convexity: Convexity) -> u32 {
        if face_type == FaceType::Any {
            self.0
                .iter()
                .filter(|((_, c), _)| *c == convexity)
                .map(|(_, &n)| n)
                .sum()
        } else {
            self.count(face_type, convexity)
        }
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((FaceType, Convexity), u32)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

/// The twenty descriptor items of one face. Field names are the serialized
/// item names: `f_` items describe the face itself, `ol_`/`il_` items its
/// outer- and inner-loop neighborhoods, and `ax_` items axis/ray relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub f_facetype: FaceType,
    pub f_curvature: CurvatureClass,
    pub f_facemachining: WidthLevel,
    pub f_filletmachining: WidthLevel,
    pub f_chamfermachining: WidthLevel,
    pub ol_convexity: ItemValueSet,
    pub ol_continuity: ItemValueSet,
    pub ol_parallel: ItemValueSet,
    pub ol_perpendicular: ItemValueSet,
    pub ol_acute: ItemValueSet,
    pub ol_obtuse: ItemValueSet,
    pub il_convexity: ItemValueSet,
    pub il_continuity: ItemValueSet,
    pub il_parallel: ItemValueSet,
    pub il_perpendicular: ItemValueSet,
    pub il_acute: ItemValueSet,
    pub il_obtuse: ItemValueSet,
    pub ax_parallel: bool,
    pub ax_coaxial: bool,
    pub ax_interference: bool,
}

/// Identifier of one descriptor item, used by templates to address items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKey {
    FFacetype,
    FCurvature,
    FFacemachining,
    FFilletmachining,
    FChamfermachining,
    OlConvexity,
    OlContinuity,
    OlParallel,
    OlPerpendicular,
    OlAcute,
    OlObtuse,
    IlConvexity,
    IlContinuity,
    IlParallel,
    IlPerpendicular,
    IlAcute,
    IlObtuse,
    AxParallel,
    AxCoaxial,
    AxInterference,
}

impl ItemKey {
    pub const ALL: [ItemKey; 20] = [
        ItemKey::FFacetype,
        ItemKey::FCurvature,
        ItemKey::FFacemachining,
        ItemKey::FFilletmachining,
        ItemKey::FChamfermachining,
        ItemKey::OlConvexity,
        ItemKey::OlContinuity,
        ItemKey::OlParallel,
        ItemKey::OlPerpendicular,
        ItemKey::OlAcute,
        ItemKey::OlObtuse,
        ItemKey::IlConvexity,
        ItemKey::IlContinuity,
        ItemKey::IlParallel,
        ItemKey::IlPerpendicular,
        ItemKey::IlAcute,
        ItemKey::IlObtuse,
        ItemKey::AxParallel,
        ItemKey::AxCoaxial,
        ItemKey::AxInterference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemKey::FFacetype => "f_facetype",
            ItemKey::FCurvature => "f_curvature",
            ItemKey::FFacemachining => "f_facemachining",
            ItemKey::FFilletmachining => "f_filletmachining",
            ItemKey::FChamfermachining => "f_chamfermachining",
            ItemKey::OlConvexity => "ol_convexity",
            ItemKey::OlContinuity => "ol_continuity",
            ItemKey::OlParallel => "ol_parallel",
            ItemKey::OlPerpendicular => "ol_perpendicular",
            ItemKey::OlAcute => "ol_acute",
            ItemKey::OlObtuse => "ol_obtuse",
            ItemKey::IlConvexity => "il_convexity",
            ItemKey::IlContinuity => "il_continuity",
            ItemKey::IlParallel => "il_parallel",
            ItemKey::IlPerpendicular => "il_perpendicular",
            ItemKey::IlAcute => "il_acute",
            ItemKey::IlObtuse => "il_obtuse",
            ItemKey::AxParallel => "ax_parallel",
            ItemKey::AxCoaxial => "ax_coaxial",
            ItemKey::AxInterference => "ax_interference",
        }
    }

    pub fn parse(name: &str) -> Option<ItemKey> {
        ItemKey::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Loop items hold count multisets and accept min/max/equal constraints;
    /// all other items are scalars and accept only equal.
    pub fn is_loop_item(self) -> bool {
        !matches!(
            self,
            ItemKey::FFacetype
                | ItemKey::FCurvature
                | ItemKey::FFacemachining
                | ItemKey::FFilletmachining
                | ItemKey::FChamfermachining
                | ItemKey::AxParallel
                | ItemKey::AxCoaxial
                | ItemKey::AxInterference
        )
    }
}

impl fmt::Display for ItemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scalar item value, for uniform comparison across the non-loop items.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarValue {
    FaceType(FaceType),
    Curvature(CurvatureClass),
    Width(WidthLevel),
    Bool(bool),
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::FaceType(v) => v.fmt(f),
            ScalarValue::Curvature(v) => v.fmt(f),
            ScalarValue::Width(v) => v.fmt(f),
            ScalarValue::Bool(v) => v.fmt(f),
        }
    }
}

impl Descriptor {
    /// Scalar value of a non-loop item; `None` for loop items.
    pub fn scalar(&self, key: ItemKey) -> Option<ScalarValue> {
        Some(match key {
            ItemKey::FFacetype => ScalarValue::FaceType(self.f_facetype),
            ItemKey::FCurvature => ScalarValue::Curvature(self.f_curvature),
            ItemKey::FFacemachining => ScalarValue::Width(self.f_facemachining),
            ItemKey::FFilletmachining => ScalarValue::Width(self.f_filletmachining),
            ItemKey::FChamfermachining => ScalarValue::Width(self.f_chamfermachining),
            ItemKey::AxParallel => ScalarValue::Bool(self.ax_parallel),
            ItemKey::AxCoaxial => ScalarValue::Bool(self.ax_coaxial),
            ItemKey::AxInterference => ScalarValue::Bool(self.ax_interference),
            _ => return None,
        })
    }

    /// Count multiset of a loop item; `None` for scalar items.
    pub fn set(&self, key: ItemKey) -> Option<&ItemValueSet> {
        Some(match key {
            ItemKey::OlConvexity => &self.ol_convexity,
            ItemKey::OlContinuity => &self.ol_continuity,
            ItemKey::OlParallel => &self.ol_parallel,
            ItemKey::OlPerpendicular => &self.ol_perpendicular,
            ItemKey::OlAcute => &self.ol_acute,
            ItemKey::OlObtuse => &self.ol_obtuse,
            ItemKey::IlConvexity => &self.il_convexity,
            ItemKey::IlContinuity => &self.il_continuity,
            ItemKey::IlParallel => &self.il_parallel,
            ItemKey::IlPerpendicular => &self.il_perpendicular,
            ItemKey::IlAcute => &self.il_acute,
            ItemKey::IlObtuse => &self.il_obtuse,
            _ => return None,
        })
    }
}

/// One adjacency of a face across a shared edge, with everything the
/// descriptor and the instance grouper need about that neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjRecord {
    pub loop_kind: LoopKind,
    pub mate: FaceId,
    pub edge: EdgeId,
    pub mate_type: FaceType,
    pub convexity: Convexity,
    pub continuity_higher: bool,
    pub angle_folded: AngleClass,
    pub angle_unfolded: AngleClass,
}

/// Classified adjacency records of a face, outer loops first then inner,
/// in loop order. Seam edges mating the face to itself are omitted.
pub fn adjacency_records(ctx: &GeomContext, face: &Face) -> Vec<AdjRecord> {
    let mut out = Vec::new();
    for kind in [LoopKind::Outer, LoopKind::Inner] {
        let adjacencies = ctx
            .model
            .adjacent_faces(face.id, kind, &ctx.index)
            .expect("validated face");
        for adj in adjacencies {
            if adj.mate == face.id {
                continue;
            }
            let mate = ctx.model.face(adj.mate).expect("validated mate");
            let (angle_folded, angle_unfolded) = ctx.angle_classes(face, mate);
            out.push(AdjRecord {
                loop_kind: kind,
                mate: adj.mate,
                edge: adj.edge,
                mate_type: mate.surface.face_type(),
                convexity: ctx.convexity(face.id, &adj),
                continuity_higher: ctx.continuity_higher(face.id, adj.mate, adj.edge),
                angle_folded,
                angle_unfolded,
            });
        }
    }
    out
}

#[derive(Default)]
struct LoopBuckets {
    convexity: ItemValueSet,
    continuity: ItemValueSet,
    parallel: ItemValueSet,
    perpendicular: ItemValueSet,
    acute: ItemValueSet,
    obtuse: ItemValueSet,
}

impl LoopBuckets {
    fn add(&mut self, r: &AdjRecord, fold_angles: bool) {
        self.convexity.add(r.mate_type, r.convexity);
        if r.continuity_higher {
            self.continuity.add(r.mate_type, r.convexity);
        }
        let class = if fold_angles { r.angle_folded } else { r.angle_unfolded };
        let bucket = match class {
            AngleClass::Parallel => &mut self.parallel,
            AngleClass::Perpendicular => &mut self.perpendicular,
            AngleClass::Acute => &mut self.acute,
            AngleClass::Obtuse => &mut self.obtuse,
        };
        bucket.add(r.mate_type, r.convexity);
    }
}

/// Build a face's descriptor from precomputed adjacency records. With
/// `fold_angles` the angle buckets use direction-insensitive angles (no
/// OBTUSE); without it they use the raw angle between base vectors.
pub fn descriptor_from_records(
    ctx: &GeomContext,
    face: &Face,
    conditions: &MachiningConditions,
    records: &[AdjRecord],
    fold_angles: bool,
) -> Descriptor {
    let pair_width = ctx.parallel_pair(face.id);
    let face_width = ctx.face_width(face);
    let level = |w: f64, threshold: f64| {
        if w >= threshold {
            WidthLevel::Longer
        } else {
            WidthLevel::Shorter
        }
    };

    let mut outer = LoopBuckets::default();
    let mut inner = LoopBuckets::default();
    for r in records {
        match r.loop_kind {
            LoopKind::Outer => outer.add(r, fold_angles),
            LoopKind::Inner => inner.add(r, fold_angles),
        }
    }

    let outer_rotational: Vec<FaceId> = records
        .iter()
        .filter(|r| r.loop_kind == LoopKind::Outer)
        .map(|r| r.mate)
        .filter(|&m| ctx.model.face(m).unwrap().surface.axis_line().is_some())
        .collect();
    let inner_rotational: Vec<FaceId> = records
        .iter()
        .filter(|r| r.loop_kind == LoopKind::Inner)
        .map(|r| r.mate)
        .filter(|&m| ctx.model.face(m).unwrap().surface.axis_line().is_some())
        .collect();
    let ax_coaxial = outer_rotational.iter().any(|&f1| {
        inner_rotational.iter().any(|&f2| {
            ctx.coaxial(ctx.model.face(f1).unwrap(), ctx.model.face(f2).unwrap())
        })
    });

    Descriptor {
        f_facetype: face.surface.face_type(),
        f_curvature: match face.surface.face_type() {
            FaceType::Plan => CurvatureClass::Flat,
            _ => {
                if face.sense {
                    CurvatureClass::Positive
                } else {
                    CurvatureClass::Negative
                }
            }
        },
        f_facemachining: level(
            pair_width.unwrap_or(f64::INFINITY),
            conditions.slot_width_threshold,
        ),
        f_filletmachining: level(face_width, conditions.fillet_width_threshold),
        f_chamfermachining: level(face_width, conditions.chamfer_width_threshold),
        ol_convexity: outer.convexity,
        ol_continuity: outer.continuity,
        ol_parallel: outer.parallel,
        ol_perpendicular: outer.perpendicular,
        ol_acute: outer.acute,
        ol_obtuse: outer.obtuse,
        il_convexity: inner.convexity,
        il_continuity: inner.continuity,
        il_parallel: inner.parallel,
        il_perpendicular: inner.perpendicular,
        il_acute: inner.acute,
        il_obtuse: inner.obtuse,
        ax_parallel: pair_width.is_some(),
        ax_coaxial,
        ax_interference: ctx.interference(face.id),
    }
}

/// Extract a face's descriptor directly from the evaluation context.
pub fn extract_descriptor(
    ctx: &GeomContext,
    face: &Face,
    conditions: &MachiningConditions,
    fold_angles: bool,
) -> Descriptor {
    let records = adjacency_records(ctx, face);
    descriptor_from_records(ctx, face, conditions, &records, fold_angles)
}
