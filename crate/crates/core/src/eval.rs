//! Per-face evaluation: a multi-class confusion matrix over the 16 feature
//! subtypes plus an explicit `none` class, exact rational metrics
//! (precision, recall, accuracy, F1) per class, and macro averages over the
//! classes present in the ground truth.

use crate::brep::FaceId;
use crate::features::FeatureKind;
use crate::recognize::RecognitionResult;
use crate::synth::TruthEntry;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// 16 feature subtypes plus the `none` class for unlabeled faces.
pub const CLASS_COUNT: usize = FeatureKind::ALL.len() + 1;
const NONE_CLASS: usize = FeatureKind::ALL.len();

/// Stable class index: feature order for subtypes, `none` last.
pub fn class_index(class: Option<FeatureKind>) -> usize {
    match class {
        Some(k) => k as usize,
        None => NONE_CLASS,
    }
}

pub fn class_name(index: usize) -> &'static str {
    FeatureKind::ALL.get(index).map_or("none", |k| k.name())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("face sets differ: {0}")]
    FaceSetMismatch(String),
    #[error("confusion matrix holds no faces")]
    EmptyMatrix,
}

/// Exact non-negative rational, always reduced with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Ratio {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ratio { num: sign * num / g, den: sign * den / g }
    }

    pub fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn mul(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.num, self.den * o.den)
    }

    pub fn div(self, o: Ratio) -> Ratio {
        assert!(o.num != 0, "division by zero ratio");
        Ratio::new(self.num * o.den, self.den * o.num)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact half-up rounding to four decimal places.
    pub fn rounded4(self) -> f64 {
        debug_assert!(self.num >= 0);
        let q = (self.num * 20_000 + self.den) / (2 * self.den);
        q as f64 / 10_000.0
    }
}

/// counts[t][p] = number of faces whose truth class is `t` and predicted
/// class is `p`, over the fixed 17-class list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        ConfusionMatrix { counts: vec![vec![0; CLASS_COUNT]; CLASS_COUNT] }
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Option<FeatureKind>, pred: Option<FeatureKind>) {
        self.counts[class_index(truth)][class_index(pred)] += 1;
    }

    /// Pool another matrix into this one (multi-model evaluation).
    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (cell, ocell) in row.iter_mut().zip(orow) {
                *cell += ocell;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("truth");
        for p in 0..CLASS_COUNT {
            out.push(',');
            out.push_str(class_name(p));
        }
        out.push('\n');
        for (t, row) in self.counts.iter().enumerate() {
            out.push_str(class_name(t));
            for cell in row {
                out.push(',');
                out.push_str(&cell.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Designed class of every face: the subtype anchored at the face (its
/// truth entry's base face), or `None`. When several entries share a base
/// face, the earliest subtype in feature order wins.
pub fn truth_classes(
    face_ids: &[FaceId],
    entries: &[TruthEntry],
) -> Result<BTreeMap<FaceId, Option<FeatureKind>>, EvalError> {
    let mut map: BTreeMap<FaceId, Option<FeatureKind>> =
        face_ids.iter().map(|&id| (id, None)).collect();
    for e in entries {
        match map.get_mut(&e.base_face) {
            None => {
                return Err(EvalError::FaceSetMismatch(format!(
                    "truth entry for {} references {} absent from the model",
                    e.feature, e.base_face
                )))
            }
            Some(slot) => {
                if slot.map_or(true, |prev| e.feature < prev) {
                    *slot = Some(e.feature);
                }
            }
        }
    }
    Ok(map)
}

/// Predicted class of every face. A face predicts its truth class whenever
/// that class is among its labels (so an extra fillet/chamfer label never
/// spoils a correct match); otherwise the earliest label in feature order;
/// otherwise `None`.
pub fn predicted_classes(
    result: &RecognitionResult,
    truth: &BTreeMap<FaceId, Option<FeatureKind>>,
) -> Result<BTreeMap<FaceId, Option<FeatureKind>>, EvalError> {
    let mut map = BTreeMap::new();
    for face in &result.faces {
        let Some(&truth_class) = truth.get(&face.id) else {
            return Err(EvalError::FaceSetMismatch(format!(
                "prediction covers {} which has no ground truth",
                face.id
            )));
        };
        let features: Vec<FeatureKind> = face.labels.iter().map(|l| l.feature).collect();
        let pred = match truth_class {
            Some(t) if features.contains(&t) => Some(t),
            _ => features.iter().copied().min(),
        };
        map.insert(face.id, pred);
    }
    if map.len() != truth.len() {
        let missing = truth.keys().find(|id| !map.contains_key(id)).expect("superset");
        return Err(EvalError::FaceSetMismatch(format!(
            "prediction is missing {missing}"
        )));
    }
    Ok(map)
}

/// Tally truth against prediction; both maps must cover the same faces.
pub fn confusion(
    truth: &BTreeMap<FaceId, Option<FeatureKind>>,
    pred: &BTreeMap<FaceId, Option<FeatureKind>>,
) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != pred.len() {
        return Err(EvalError::FaceSetMismatch(format!(
            "truth covers {} faces, prediction covers {}",
            truth.len(),
            pred.len()
        )));
    }
    let mut m = ConfusionMatrix::default();
    for (id, &t) in truth {
        let Some(&p) = pred.get(id) else {
            return Err(EvalError::FaceSetMismatch(format!(
                "prediction is missing {id}"
            )));
        };
        m.record(t, p);
    }
    Ok(m)
}

/// Binary counts and exact metrics of one class against the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassBreakdown {
    pub class: usize,
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_neg: u64,
    pub precision: Ratio,
    pub recall: Ratio,
    pub accuracy: Ratio,
    pub f1: Ratio,
}

/// Exact evaluation results; rounding happens only in reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    /// One breakdown per class, in class-index order (all 17).
    pub per_class: Vec<ClassBreakdown>,
    /// Classes with at least one ground-truth face, `none` included.
    pub truth_present: Vec<usize>,
    pub macro_precision: Ratio,
    pub macro_recall: Ratio,
    pub macro_accuracy: Ratio,
    pub macro_f1: Ratio,
    pub total_faces: u64,
    pub correct_faces: u64,
}

fn safe_div(num: u64, den: u64) -> Ratio {
    if den == 0 {
        Ratio::ZERO
    } else {
        Ratio::new(num as i128, den as i128)
    }
}

fn f1_of(precision: Ratio, recall: Ratio) -> Ratio {
    let sum = precision.add(recall);
    if sum == Ratio::ZERO {
        Ratio::ZERO
    } else {
        Ratio::new(2, 1).mul(precision).mul(recall).div(sum)
    }
}

pub fn metrics(m: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let mut per_class = Vec::with_capacity(CLASS_COUNT);
    let mut truth_present = Vec::new();
    let mut sums = [Ratio::ZERO; 4];
    for c in 0..CLASS_COUNT {
        let tp: u64 = m.counts[c][c];
        let fp: u64 = (0..CLASS_COUNT).filter(|&t| t != c).map(|t| m.counts[t][c]).sum();
        let fn_: u64 = (0..CLASS_COUNT).filter(|&p| p != c).map(|p| m.counts[c][p]).sum();
        let tn = total - tp - fp - fn_;
        let precision = safe_div(tp, tp + fp);
        let recall = safe_div(tp, tp + fn_);
        let accuracy = safe_div(tp + tn, total);
        let f1 = f1_of(precision, recall);
        if tp + fn_ > 0 {
            truth_present.push(c);
            for (sum, v) in sums.iter_mut().zip([precision, recall, accuracy, f1]) {
                *sum = sum.add(v);
            }
        }
        per_class.push(ClassBreakdown {
            class: c,
            true_pos: tp,
            false_pos: fp,
            false_neg: fn_,
            true_neg: tn,
            precision,
            recall,
            accuracy,
            f1,
        });
    }
    let k = Ratio::new(truth_present.len() as i128, 1);
    let correct = (0..CLASS_COUNT).map(|c| m.counts[c][c]).sum();
    Ok(Metrics {
        per_class,
        truth_present,
        macro_precision: sums[0].div(k),
        macro_recall: sums[1].div(k),
        macro_accuracy: sums[2].div(k),
        macro_f1: sums[3].div(k),
        total_faces: total,
        correct_faces: correct,
    })
}

/// Report row for one class, metric values rounded to four decimals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReportRow {
    pub class: String,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroAverages {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
}

/// Serializable evaluation report; all metric values rounded to four
/// decimals, counts exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub averaging: String,
    pub total_faces: u64,
    pub correct_faces: u64,
    #[serde(rename = "macro")]
    pub macro_: MacroAverages,
    /// Classes with ground-truth or predicted faces; the rest are all-zero.
    pub per_class: Vec<ClassReportRow>,
    pub confusion_classes: Vec<String>,
    pub confusion_counts: Vec<Vec<u64>>,
}

pub fn report(m: &ConfusionMatrix) -> Result<EvalReport, EvalError> {
    let mx = metrics(m)?;
    let per_class = mx
        .per_class
        .iter()
        .filter(|b| b.true_pos + b.false_pos + b.false_neg > 0)
        .map(|b| ClassReportRow {
            class: class_name(b.class).to_string(),
            tp: b.true_pos,
            fp: b.false_pos,
            fn_: b.false_neg,
            tn: b.true_neg,
            precision: b.precision.rounded4(),
            recall: b.recall.rounded4(),
            accuracy: b.accuracy.rounded4(),
            f1: b.f1.rounded4(),
        })
        .collect();
    Ok(EvalReport {
        averaging: "macro over classes present in ground truth, none included".to_string(),
        total_faces: mx.total_faces,
        correct_faces: mx.correct_faces,
        macro_: MacroAverages {
            precision: mx.macro_precision.rounded4(),
            recall: mx.macro_recall.rounded4(),
            accuracy: mx.macro_accuracy.rounded4(),
            f1: mx.macro_f1.rounded4(),
        },
        per_class,
        confusion_classes: (0..CLASS_COUNT).map(|c| class_name(c).to_string()).collect(),
        confusion_counts: m.counts.clone(),
    })
}

pub fn report_to_json(report: &EvalReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}

/// Evaluate one model end to end: truth entries against a recognition
/// result, yielding the pooled-ready confusion matrix.
pub fn evaluate_model(
    face_ids: &[FaceId],
    entries: &[TruthEntry],
    result: &RecognitionResult,
) -> Result<ConfusionMatrix, EvalError> {
    let truth = truth_classes(face_ids, entries)?;
    let pred = predicted_classes(result, &truth)?;
    confusion(&truth, &pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use FeatureKind::*;

    fn fid(n: u32) -> FaceId {
        FaceId(n)
    }

    #[test]
    fn rational_arithmetic_reduces() {
        let r = Ratio::new(6, 8);
        assert_eq!(r, Ratio::new(3, 4));
        assert_eq!(r.add(Ratio::new(1, 4)), Ratio::ONE);
        assert_eq!(Ratio::new(2, 3).mul(Ratio::new(3, 2)), Ratio::ONE);
        assert_eq!(Ratio::new(1, 2).div(Ratio::new(1, 4)), Ratio::new(2, 1));
        assert_eq!(Ratio::new(-3, -6), Ratio::new(1, 2));
    }

    #[test]
    fn rounding_is_half_up_at_four_decimals() {
        assert_eq!(Ratio::new(6, 7).rounded4(), 0.8571);
        assert_eq!(Ratio::new(1, 3).rounded4(), 0.3333);
        assert_eq!(Ratio::new(2, 3).rounded4(), 0.6667);
        assert_eq!(Ratio::new(1, 20000).rounded4(), 0.0001);
        assert_eq!(Ratio::ONE.rounded4(), 1.0);
        assert_eq!(Ratio::ZERO.rounded4(), 0.0);
    }

    #[test]
    fn single_class_counts_give_documented_metrics() {
        // 10 faces: 3 hits on one subtype, 1 false alarm, 6 true rejections.
        let mut m = ConfusionMatrix::default();
        for _ in 0..3 {
            m.record(Some(SimpleHole), Some(SimpleHole));
        }
        m.record(None, Some(SimpleHole));
        for _ in 0..6 {
            m.record(None, None);
        }
        let mx = metrics(&m).unwrap();
        let b = &mx.per_class[class_index(Some(SimpleHole))];
        assert_eq!(
            (b.true_pos, b.false_pos, b.false_neg, b.true_neg),
            (3, 1, 0, 6)
        );
        assert_eq!(b.precision, Ratio::new(3, 4));
        assert_eq!(b.recall, Ratio::ONE);
        assert_eq!(b.accuracy, Ratio::new(9, 10));
        assert_eq!(b.f1, Ratio::new(6, 7));
        assert_eq!(b.precision.rounded4(), 0.75);
        assert_eq!(b.recall.rounded4(), 1.0);
        assert_eq!(b.accuracy.rounded4(), 0.9);
        assert_eq!(b.f1.rounded4(), 0.8571);
    }

    #[test]
    fn perfect_agreement_scores_one_everywhere() {
        let truth: BTreeMap<_, _> = [
            (fid(0), Some(SimpleSlot)),
            (fid(1), None),
            (fid(2), Some(ClosedPocket)),
            (fid(3), None),
        ]
        .into();
        let m = confusion(&truth, &truth).unwrap();
        let mx = metrics(&m).unwrap();
        assert_eq!(mx.macro_precision, Ratio::ONE);
        assert_eq!(mx.macro_recall, Ratio::ONE);
        assert_eq!(mx.macro_accuracy, Ratio::ONE);
        assert_eq!(mx.macro_f1, Ratio::ONE);
        assert_eq!(mx.correct_faces, 4);
        for &c in &mx.truth_present {
            assert_eq!(mx.per_class[c].f1, Ratio::ONE);
        }
        assert_eq!(mx.truth_present.len(), 3);
    }

    #[test]
    fn truth_collisions_keep_earliest_subtype() {
        let faces = [fid(0), fid(1)];
        let entries = vec![
            TruthEntry { feature: ClosedPocket, base_face: fid(0), members: vec![fid(0)] },
            TruthEntry { feature: SimpleSlot, base_face: fid(0), members: vec![fid(0)] },
        ];
        let t = truth_classes(&faces, &entries).unwrap();
        assert_eq!(t[&fid(0)], Some(SimpleSlot));
        assert_eq!(t[&fid(1)], None);
    }

    #[test]
    fn unknown_truth_face_is_rejected() {
        let entries = vec![TruthEntry {
            feature: SimpleHole,
            base_face: fid(9),
            members: vec![fid(9)],
        }];
        let err = truth_classes(&[fid(0)], &entries).unwrap_err();
        assert!(matches!(err, EvalError::FaceSetMismatch(_)));
        assert!(err.to_string().contains("face 9"));
    }

    #[test]
    fn mismatched_face_sets_are_rejected() {
        let a: BTreeMap<_, _> = [(fid(0), None)].into();
        let b: BTreeMap<_, _> = [(fid(1), None)].into();
        assert!(matches!(
            confusion(&a, &b),
            Err(EvalError::FaceSetMismatch(_))
        ));
        assert_eq!(metrics(&ConfusionMatrix::default()), Err(EvalError::EmptyMatrix));
    }

    #[test]
    fn pooling_adds_counts() {
        let mut a = ConfusionMatrix::default();
        a.record(Some(SimpleHole), Some(SimpleHole));
        let mut b = ConfusionMatrix::default();
        b.record(None, None);
        b.record(Some(SimpleHole), None);
        a.add(&b);
        assert_eq!(a.total(), 3);
        let mx = metrics(&a).unwrap();
        let row = &mx.per_class[class_index(Some(SimpleHole))];
        assert_eq!((row.true_pos, row.false_neg), (1, 1));
    }

    #[test]
    fn csv_lists_every_class() {
        let m = ConfusionMatrix::default();
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), CLASS_COUNT + 1);
        assert!(lines[0].starts_with("truth,simple_hole,"));
        assert!(lines[0].ends_with(",none"));
        assert!(lines[CLASS_COUNT].starts_with("none,"));
    }

    #[test]
    fn report_rounds_to_four_decimals() {
        let mut m = ConfusionMatrix::default();
        for _ in 0..3 {
            m.record(Some(SimpleHole), Some(SimpleHole));
        }
        m.record(None, Some(SimpleHole));
        for _ in 0..6 {
            m.record(None, None);
        }
        let rep = report(&m).unwrap();
        let row = rep.per_class.iter().find(|r| r.class == "simple_hole").unwrap();
        assert_eq!(row.f1, 0.8571);
        assert_eq!(row.precision, 0.75);
        let parsed: EvalReport = serde_json::from_str(&report_to_json(&rep)).unwrap();
        assert_eq!(parsed, rep);
    }
}
