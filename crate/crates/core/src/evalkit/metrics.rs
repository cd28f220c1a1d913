use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    /// Counts with class 1 as positive.
    pub fn from_labels(predicted: &[u8], truth: &[u8]) -> Self {
        assert_eq!(predicted.len(), truth.len(), "unaligned labels");
        let mut m = Self::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p == 1, t == 1) {
                (true, true) => m.tp += 1,
                (true, false) => m.fp += 1,
                (false, true) => m.fn_ += 1,
                (false, false) => m.tn += 1,
            }
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same counts with class 0 treated as positive.
    pub fn flipped(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

fn ratio(num: u64, den: u64, name: &str, warnings: &mut Vec<String>) -> f64 {
    if den == 0 {
        warnings.push(format!("{name}: zero denominator, reported as 0"));
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// One evaluation row. Risky-class figures are the headline values; the
/// `macro_*` fields average over both classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: ConfusionMatrix,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub roc_auc: Option<f64>,
    pub pr_auc: Option<f64>,
    pub f1_safe: f64,
    pub f1_risky: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Metrics {
    /// `scores` feed the ranking metrics; `predicted` holds hard labels.
    pub fn compute(predicted: &[u8], scores: Option<&[f64]>, truth: &[u8]) -> Self {
        let cm = ConfusionMatrix::from_labels(predicted, truth);
        let mut warnings = Vec::new();
        let precision = ratio(cm.tp, cm.tp + cm.fp, "precision", &mut warnings);
        let recall = ratio(cm.tp, cm.tp + cm.fn_, "recall", &mut warnings);
        let accuracy = ratio(cm.tp + cm.tn, cm.total(), "accuracy", &mut warnings);
        let neg = cm.flipped();
        let p_safe = ratio(neg.tp, neg.tp + neg.fp, "safe precision", &mut warnings);
        let r_safe = ratio(neg.tp, neg.tp + neg.fn_, "safe recall", &mut warnings);
        let f1 = harmonic(precision, recall);
        let f1_safe = harmonic(p_safe, r_safe);
        let (roc, ap) = match scores {
            Some(s) => (roc_auc(s, truth), average_precision(s, truth)),
            None => (None, None),
        };
        if scores.is_some() && roc.is_none() {
            warnings.push("roc_auc: single-class truth, reported as absent".into());
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Self {
            confusion: cm,
            precision,
            recall,
            accuracy,
            f1,
            roc_auc: roc,
            pr_auc: ap,
            f1_safe,
            f1_risky: f1,
            macro_precision: (precision + p_safe) / 2.0,
            macro_recall: (recall + r_safe) / 2.0,
            macro_f1: (f1 + f1_safe) / 2.0,
            warnings,
        }
    }
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half, from the Mann-Whitney statistic over midranks.
/// `None` when `truth` lacks either class.
pub fn roc_auc(scores: &[f64], truth: &[u8]) -> Option<f64> {
    assert_eq!(scores.len(), truth.len(), "unaligned scores");
    let pos = truth.iter().filter(|&&t| t == 1).count() as u64;
    let neg = truth.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum of positives, in integers: midranks are half-integers
    let mut twice_rank_sum: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1, midrank (i+j+2)/2
        let twice_mid = (i + j + 2) as u64;
        let p = order[i..=j].iter().filter(|&&k| truth[k] == 1).count() as u64;
        twice_rank_sum += p * twice_mid;
        i = j + 1;
    }
    let twice_u = twice_rank_sum - pos * (pos + 1);
    Some(twice_u as f64 / (2 * pos * neg) as f64)
}

/// Average precision: precision at each distinct threshold, weighted by the
/// recall gained there. `None` without positives.
pub fn average_precision(scores: &[f64], truth: &[u8]) -> Option<f64> {
    assert_eq!(scores.len(), truth.len(), "unaligned scores");
    let pos = truth.iter().filter(|&&t| t == 1).count();
    if pos == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut seen, mut ap) = (0usize, 0usize, 0.0);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let gained = order[i..=j].iter().filter(|&&k| truth[k] == 1).count();
        tp += gained;
        seen += j - i + 1;
        if gained > 0 {
            ap += (tp as f64 / seen as f64) * (gained as f64 / pos as f64);
        }
        i = j + 1;
    }
    Some(ap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_auc_hand_cases() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.3], &[1, 1, 0]), Some(1.0));
        assert_eq!(roc_auc(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]), Some(0.75));
        assert_eq!(roc_auc(&[0.5, 0.5], &[1, 0]), Some(0.5));
        assert_eq!(roc_auc(&[0.1, 0.2], &[1, 1]), None);
    }

    #[test]
    fn average_precision_hand_cases() {
        // ranks: 1 (P@1 = 1), 0, 1 (P@3 = 2/3)
        let ap = average_precision(&[0.9, 0.8, 0.7], &[1, 0, 1]).unwrap();
        assert!((ap - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(average_precision(&[0.9, 0.1], &[0, 0]), None);
        assert_eq!(average_precision(&[0.4, 0.3], &[1, 1]), Some(1.0));
    }

    #[test]
    fn confusion_arithmetic() {
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (p, t, n) in [(1u8, 1u8, 99), (1, 0, 4), (0, 1, 1), (0, 0, 96)] {
            pred.extend(std::iter::repeat_n(p, n));
            truth.extend(std::iter::repeat_n(t, n));
        }
        let m = Metrics::compute(&pred, None, &truth);
        assert_eq!(m.confusion, ConfusionMatrix { tp: 99, fp: 4, fn_: 1, tn: 96 });
        assert!((m.precision - 99.0 / 103.0).abs() < 1e-12);
        assert!((m.precision - 0.961).abs() < 5e-4);
        assert!((m.recall - 0.990).abs() < 1e-12);
        assert!((m.accuracy - 0.975).abs() < 1e-12);
        let f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        assert!((m.f1 - f1).abs() < 1e-15);
    }

    #[test]
    fn zero_denominators_warn() {
        let m = Metrics::compute(&[0, 0], Some(&[0.1, 0.2]), &[0, 0]);
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.roc_auc, None);
        assert!(m.warnings.iter().any(|w| w.starts_with("precision")));
    }
}
