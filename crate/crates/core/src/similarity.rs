//! Similarity of a face descriptor to a feature template: each constrained
//! item scores 1 when every bound on it holds, 0 otherwise, and the overall
//! score is the weighted mean over the constrained items.

use crate::brep::FaceType;
use crate::descriptor::{Descriptor, ItemKey, ItemValueSet};
use crate::template::{EqualValue, FeatureTemplate, SetConstraint, TemplateItem};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

/// Slack under the threshold when classifying, absorbing floating-point
/// drift in weighted sums.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("template {template}: no items constrained")]
    NoActiveItems { template: String },
    #[error("weights: item {item} missing or not positive")]
    BadWeight { item: String },
}

/// Outcome of the bounds on one item. `None` means the bound is absent
/// (treated as satisfied).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ItemScore {
    pub key: ItemKey,
    pub min_ok: Option<bool>,
    pub max_ok: Option<bool>,
    pub equal_ok: Option<bool>,
}

impl ItemScore {
    /// The item's score: 1 when no present bound fails.
    pub fn satisfied(&self) -> bool {
        self.min_ok.unwrap_or(true)
            && self.max_ok.unwrap_or(true)
            && self.equal_ok.unwrap_or(true)
    }
}

/// Weighted similarity of one descriptor against one template variant.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityScore {
    pub items: Vec<ItemScore>,
    pub satisfied: u32,
    pub active: u32,
    /// Weighted mean of item scores in `[0, 1]`.
    pub value: f64,
    /// Exact `satisfied / active` fraction when weights are uniform.
    pub exact: Option<(u64, u64)>,
}

impl SimilarityScore {
    /// Total order for picking the best variant: exact fractions compare by
    /// cross-multiplication, otherwise the float values compare.
    pub fn cmp_value(&self, other: &SimilarityScore) -> Ordering {
        if let (Some((s1, a1)), Some((s2, a2))) = (self.exact, other.exact) {
            (s1 * a2).cmp(&(s2 * a1))
        } else {
            self.value.total_cmp(&other.value)
        }
    }
}

fn min_ok(c: &SetConstraint, set: &ItemValueSet) -> bool {
    set.magnitude(c.face_type, c.convexity) >= c.count
}

fn max_ok(c: &SetConstraint, set: &ItemValueSet) -> bool {
    set.magnitude(c.face_type, c.convexity) <= c.count
}

fn equal_set_ok(c: &SetConstraint, set: &ItemValueSet) -> bool {
    if c.face_type == FaceType::Any {
        // Every entry must carry the requested convexity and the total must
        // match exactly.
        set.iter().all(|((_, conv), _)| conv == c.convexity) && set.total() == c.count
    } else if c.count == 0 {
        set.is_empty()
    } else {
        set.0.len() == 1 && set.count(c.face_type, c.convexity) == c.count
    }
}

/// Evaluate the bounds one template item places on the descriptor.
pub fn constraint_scores(item: &TemplateItem, d: &Descriptor) -> ItemScore {
    match d.set(item.key) {
        Some(set) => ItemScore {
            key: item.key,
            min_ok: item.min.as_ref().map(|c| min_ok(c, set)),
            max_ok: item.max.as_ref().map(|c| max_ok(c, set)),
            equal_ok: item.equal.as_ref().map(|e| match e {
                EqualValue::Set(c) => equal_set_ok(c, set),
                EqualValue::Scalar(_) => false,
            }),
        },
        None => {
            let value = d.scalar(item.key).expect("non-loop items are scalars");
            ItemScore {
                key: item.key,
                min_ok: None,
                max_ok: None,
                equal_ok: item.equal.as_ref().map(|e| match e {
                    EqualValue::Scalar(s) => *s == value,
                    EqualValue::Set(_) => false,
                }),
            }
        }
    }
}

/// Score a descriptor against a template. `global_weights`, when given,
/// overrides the template's own weights; either is renormalized over the
/// constrained items. Without weights the score is the exact fraction of
/// satisfied items.
pub fn descriptor_similarity(
    template: &FeatureTemplate,
    d: &Descriptor,
    global_weights: Option<&BTreeMap<ItemKey, f64>>,
) -> Result<SimilarityScore, SimilarityError> {
    if template.items.is_empty() {
        return Err(SimilarityError::NoActiveItems { template: template.label() });
    }
    let items: Vec<ItemScore> = template
        .items
        .iter()
        .map(|i| constraint_scores(i, d))
        .collect();
    let satisfied = items.iter().filter(|s| s.satisfied()).count() as u32;
    let active = items.len() as u32;

    let weights = global_weights.or(template.weights.as_ref());
    match weights {
        None => Ok(SimilarityScore {
            items,
            satisfied,
            active,
            value: f64::from(satisfied) / f64::from(active),
            exact: Some((u64::from(satisfied), u64::from(active))),
        }),
        Some(ws) => {
            let mut total = 0.0;
            for item in &items {
                let w = ws.get(&item.key).copied().unwrap_or(0.0);
                if !(w.is_finite() && w > 0.0) {
                    return Err(SimilarityError::BadWeight {
                        item: item.key.name().to_string(),
                    });
                }
                total += w;
            }
            let value = items
                .iter()
                .filter(|s| s.satisfied())
                .map(|s| ws[&s.key] / total)
                .sum();
            Ok(SimilarityScore { items, satisfied, active, value, exact: None })
        }
    }
}

/// Whether a score reaches the recognition threshold.
pub fn classify(score: &SimilarityScore, threshold: f64) -> bool {
    score.value >= threshold - CLASSIFY_TOL
}
