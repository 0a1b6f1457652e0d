//! Feature templates: named range constraints (min / max / equal) over
//! descriptor items, loaded from JSON and validated. The crate ships a
//! builtin library; callers may load a replacement from disk.

use crate::brep::{Convexity, FaceType};
use crate::descriptor::{CurvatureClass, ItemKey, ScalarValue, WidthLevel};
use crate::features::FeatureKind;
use serde::Deserialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

/// Maximum drift tolerated when explicit template weights are checked
/// against an exact sum of one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("template JSON error: {0}")]
    Parse(String),
    #[error("template {template}: {message}")]
    Invalid { template: String, message: String },
    #[error("duplicate template {template}")]
    Duplicate { template: String },
    #[error("template {template}: composite templates must precede simple ones")]
    CompositeOrder { template: String },
    #[error("template {template}: weights sum to {sum}, expected 1")]
    WeightSum { template: String, sum: f64 },
    #[error("template {template}: no items constrained")]
    NoActiveItems { template: String },
}

/// Key of one multiset entry addressed by a loop-item constraint. The face
/// type may be the ANY wildcard; convexity is always concrete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub struct SetConstraint {
    pub face_type: FaceType,
    pub convexity: Convexity,
    pub count: u32,
}

/// Value an `equal` constraint compares against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EqualValue {
    Scalar(ScalarValue),
    Set(SetConstraint),
}

/// Constraints one template places on one descriptor item. At least one of
/// the three bounds is present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemplateItem {
    pub key: ItemKey,
    pub min: Option<SetConstraint>,
    pub max: Option<SetConstraint>,
    pub equal: Option<EqualValue>,
}

impl TemplateItem {
    pub fn constraint_count(&self) -> usize {
        self.min.is_some() as usize + self.max.is_some() as usize + self.equal.is_some() as usize
    }
}

/// One template variant: the constrained items of a feature subtype.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTemplate {
    pub feature: FeatureKind,
    pub variant_id: String,
    /// Composite features claim member faces and suppress plain hole labels
    /// on them; composites are evaluated first.
    pub composite: bool,
    /// Angle buckets use direction-insensitive (folded) angles.
    pub fold_angles: bool,
    /// Constrained items in canonical item order.
    pub items: Vec<TemplateItem>,
    /// Optional explicit per-item weights; `None` means uniform.
    pub weights: Option<BTreeMap<ItemKey, f64>>,
}

impl FeatureTemplate {
    pub fn label(&self) -> String {
        format!("{}/{}", self.feature.name(), self.variant_id)
    }

    pub fn item(&self, key: ItemKey) -> Option<&TemplateItem> {
        self.items.iter().find(|i| i.key == key)
    }
}

/// A validated, ordered set of templates.
#[derive(Clone, Debug, PartialEq)]
pub struct TemplateLibrary {
    pub version: String,
    pub templates: Vec<FeatureTemplate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLibrary {
    version: String,
    templates: Vec<RawTemplate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    feature: FeatureKind,
    variant_id: String,
    #[serde(default)]
    composite: bool,
    #[serde(default = "default_true")]
    fold_angles: bool,
    items: BTreeMap<String, RawItem>,
    #[serde(default)]
    weights: Option<BTreeMap<String, f64>>,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawItem {
    #[serde(default)]
    min: Option<SetConstraint>,
    #[serde(default)]
    max: Option<SetConstraint>,
    #[serde(default)]
    equal: Option<Value>,
}

fn invalid(template: &str, message: impl Into<String>) -> TemplateError {
    TemplateError::Invalid { template: template.to_string(), message: message.into() }
}

fn parse_scalar_equal(template: &str, key: ItemKey, v: &Value) -> Result<ScalarValue, TemplateError> {
    let err = |msg: String| invalid(template, msg);
    match key {
        ItemKey::FFacetype => {
            let ft: FaceType = serde_json::from_value(v.clone())
                .map_err(|e| err(format!("{}: bad face type: {e}", key.name())))?;
            if ft == FaceType::Any {
                return Err(err(format!("{}: equal ANY can never match", key.name())));
            }
            Ok(ScalarValue::FaceType(ft))
        }
        ItemKey::FCurvature => {
            let c: CurvatureClass = serde_json::from_value(v.clone())
                .map_err(|e| err(format!("{}: bad curvature class: {e}", key.name())))?;
            Ok(ScalarValue::Curvature(c))
        }
        ItemKey::FFacemachining | ItemKey::FFilletmachining | ItemKey::FChamfermachining => {
            let w: WidthLevel = serde_json::from_value(v.clone())
                .map_err(|e| err(format!("{}: bad width level: {e}", key.name())))?;
            Ok(ScalarValue::Width(w))
        }
        ItemKey::AxParallel | ItemKey::AxCoaxial | ItemKey::AxInterference => match v {
            Value::Bool(b) => Ok(ScalarValue::Bool(*b)),
            _ => Err(err(format!("{}: expected a boolean", key.name()))),
        },
        _ => unreachable!("loop items handled separately"),
    }
}

fn resolve_template(raw: RawTemplate) -> Result<FeatureTemplate, TemplateError> {
    let label = format!("{}/{}", raw.feature.name(), raw.variant_id);
    if raw.composite != raw.feature.is_composite_hole() {
        return Err(invalid(
            &label,
            format!(
                "composite flag must be {} for this feature",
                raw.feature.is_composite_hole()
            ),
        ));
    }
    let mut items = Vec::new();
    for (name, raw_item) in &raw.items {
        let key = ItemKey::parse(name)
            .ok_or_else(|| invalid(&label, format!("unknown item {name}")))?;
        if raw_item.min.is_none() && raw_item.max.is_none() && raw_item.equal.is_none() {
            return Err(invalid(&label, format!("{name}: no constraint given")));
        }
        if !key.is_loop_item() && (raw_item.min.is_some() || raw_item.max.is_some()) {
            return Err(invalid(
                &label,
                format!("{name}: min/max apply only to loop items"),
            ));
        }
        let equal = match &raw_item.equal {
            None => None,
            Some(v) if key.is_loop_item() => {
                let sc: SetConstraint = serde_json::from_value(v.clone()).map_err(|e| {
                    invalid(&label, format!("{name}: bad multiset value: {e}"))
                })?;
                Some(EqualValue::Set(sc))
            }
            Some(v) => Some(EqualValue::Scalar(parse_scalar_equal(&label, key, v)?)),
        };
        items.push(TemplateItem { key, min: raw_item.min, max: raw_item.max, equal });
    }
    if items.is_empty() {
        return Err(TemplateError::NoActiveItems { template: label });
    }
    items.sort_by_key(|i| ItemKey::ALL.iter().position(|k| *k == i.key).unwrap());

    let weights = match raw.weights {
        None => None,
        Some(ws) => {
            let mut resolved = BTreeMap::new();
            for (name, w) in ws {
                let key = ItemKey::parse(&name)
                    .ok_or_else(|| invalid(&label, format!("weights: unknown item {name}")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(invalid(&label, format!("weights: {name} must be positive")));
                }
                resolved.insert(key, w);
            }
            let present: Vec<ItemKey> = items.iter().map(|i| i.key).collect();
            let weighted: Vec<ItemKey> = resolved.keys().copied().collect();
            if present != weighted {
                return Err(invalid(
                    &label,
                    "weights must name exactly the constrained items",
                ));
            }
            let sum: f64 = resolved.values().sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(TemplateError::WeightSum { template: label, sum });
            }
            Some(resolved)
        }
    };

    Ok(FeatureTemplate {
        feature: raw.feature,
        variant_id: raw.variant_id,
        composite: raw.composite,
        fold_angles: raw.fold_angles,
        items,
        weights,
    })
}

impl TemplateLibrary {
    pub fn from_json(text: &str) -> Result<TemplateLibrary, TemplateError> {
        let raw: RawLibrary =
            serde_json::from_str(text).map_err(|e| TemplateError::Parse(e.to_string()))?;
        let mut templates = Vec::with_capacity(raw.templates.len());
        let mut seen = std::collections::BTreeSet::new();
        let mut simple_seen = false;
        for raw_t in raw.templates {
            let t = resolve_template(raw_t)?;
            if !seen.insert((t.feature, t.variant_id.clone())) {
                return Err(TemplateError::Duplicate { template: t.label() });
            }
            if t.composite {
                if simple_seen {
                    return Err(TemplateError::CompositeOrder { template: t.label() });
                }
            } else {
                simple_seen = true;
            }
            templates.push(t);
        }
        Ok(TemplateLibrary { version: raw.version, templates })
    }

    pub fn load(path: &Path) -> Result<TemplateLibrary, TemplateError> {
        let text = std::fs::read_to_string(path)?;
        TemplateLibrary::from_json(&text)
    }

    /// The library compiled into the crate.
    pub fn builtin() -> &'static TemplateLibrary {
        static LIB: OnceLock<TemplateLibrary> = OnceLock::new();
        LIB.get_or_init(|| {
            TemplateLibrary::from_json(include_str!("../assets/templates.json"))
                .expect("builtin template library is valid")
        })
    }

    /// Variants of one feature, in library order.
    pub fn variants_of(&self, feature: FeatureKind) -> impl Iterator<Item = &FeatureTemplate> {
        self.templates.iter().filter(move |t| t.feature == feature)
    }

    /// Features with at least one variant, in library order without repeats.
    pub fn features(&self) -> Vec<FeatureKind> {
        let mut out = Vec::new();
        for t in &self.templates {
            if !out.contains(&t.feature) {
                out.push(t.feature);
            }
        }
        out
    }
}
