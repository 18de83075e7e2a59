//! Hard and soft segmentation metrics with threshold search and missing-class
//! exclusion.
//!
//! Hard metrics (ACC, SPE, SEN, PRE, DSC_h, IoU) are one-vs-rest rates from
//! confusion counts of a thresholded prediction. Soft metrics (DSC_s, RAD, RD,
//! RMSE) compare probability maps directly. Any ratio with a zero denominator
//! is `None` and is left out of averages instead of counting as 0 or 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::label::{argmax, argmax_to_hard, one_hot, HardLabelMap, SoftLabelMap};

/// One-vs-rest pixel counts for a single class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn check_dims(ah: usize, aw: usize, bh: usize, bw: usize) -> Result<()> {
    if (ah, aw) != (bh, bw) {
        return Err(Error::DimensionMismatch {
            left_h: ah,
            left_w: aw,
            right_h: bh,
            right_w: bw,
        });
    }
    Ok(())
}

/// Counts for `class` treating every other class as negative.
pub fn confusion(pred: &HardLabelMap, target: &HardLabelMap, class: usize) -> Result<ConfusionCounts> {
    check_dims(pred.height(), pred.width(), target.height(), target.width())?;
    if class >= pred.num_classes() || class >= target.num_classes() {
        return Err(Error::InvalidClass(class));
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in pred.data().iter().zip(target.data()) {
        match (usize::from(p) == class, usize::from(t) == class) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// Full `C x C` confusion matrix, indexed `[target * C + pred]`.
fn confusion_matrix(pred: impl Iterator<Item = usize>, target: &HardLabelMap) -> Vec<u64> {
    let c = target.num_classes();
    let mut m = vec![0u64; c * c];
    for (p, &t) in pred.zip(target.data()) {
        m[usize::from(t) * c + p] += 1;
    }
    m
}

fn counts_from_matrix(m: &[u64], classes: usize, class: usize) -> ConfusionCounts {
    let total: u64 = m.iter().sum();
    let tp = m[class * classes + class];
    let row: u64 = m[class * classes..(class + 1) * classes].iter().sum();
    let col: u64 = (0..classes).map(|t| m[t * classes + class]).sum();
    ConfusionCounts {
        tp,
        fp: col - tp,
        fn_: row - tp,
        tn: total + tp - row - col,
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HardMetrics {
    pub accuracy: Option<f64>,
    pub specificity: Option<f64>,
    pub sensitivity: Option<f64>,
    pub precision: Option<f64>,
    pub dice: Option<f64>,
    pub iou: Option<f64>,
}

pub fn hard_metrics(c: &ConfusionCounts) -> HardMetrics {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    HardMetrics {
        accuracy: ratio(tp + tn, c.total() as f64),
        specificity: ratio(tn, tn + fp),
        sensitivity: ratio(tp, tp + fn_),
        precision: ratio(tp, tp + fp),
        dice: ratio(2.0 * tp, 2.0 * tp + fp + fn_),
        iou: ratio(tp, tp + fp + fn_),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SoftMetrics {
    pub dice: Option<f64>,
    /// Relative absolute difference, `sum|pred - target| / target mass`.
    pub rad: Option<f64>,
    /// Signed relative mass difference; negative means under-segmentation.
    pub rd: Option<f64>,
    pub rmse: Option<f64>,
}

/// Per-class soft metrics. RAD and RD are `None` for classes with zero
/// target mass; DSC_s is `None` only when both masses are zero.
pub fn soft_metrics(pred: &SoftLabelMap, target: &SoftLabelMap) -> Result<Vec<SoftMetrics>> {
    check_dims(pred.height(), pred.width(), target.height(), target.width())?;
    let c = target.num_classes();
    if pred.num_classes() != c {
        return Err(Error::ClassCountMismatch(pred.num_classes(), c));
    }
    let mut target_mass = vec![0.0; c];
    let mut pred_mass = vec![0.0; c];
    let mut overlap = vec![0.0; c];
    let mut abs_diff = vec![0.0; c];
    let mut sq_diff = vec![0.0; c];
    for (p_px, t_px) in pred.pixels().zip(target.pixels()) {
        for k in 0..c {
            let (p, t) = (p_px[k], t_px[k]);
            target_mass[k] += t;
            pred_mass[k] += p;
            overlap[k] += p * t;
            let d = p - t;
            abs_diff[k] += libm::fabs(d);
            sq_diff[k] += d * d;
        }
    }
    let n = (target.height() * target.width()) as f64;
    Ok((0..c)
        .map(|k| {
            let t = target_mass[k];
            SoftMetrics {
                dice: ratio(2.0 * overlap[k], t + pred_mass[k]),
                rad: ratio(abs_diff[k], t),
                rd: ratio(pred_mass[k] - t, t),
                rmse: Some(libm::sqrt(sq_diff[k] / n)),
            }
        })
        .collect())
}

/// Class assigned to one probability vector at threshold `t`.
///
/// A foreground class (index >= 1) is a candidate when its probability is
/// nonzero and at least `t`; the most probable candidate wins, lowest index
/// on ties. Without candidates the pixel takes its argmax class. At `t = 1`
/// this is plain argmax; lower thresholds let weaker foreground evidence win
/// over background.
#[inline]
pub fn assign_class(p: &[f64], t: f64) -> usize {
    let mut best: Option<usize> = None;
    for (k, &v) in p.iter().enumerate().skip(1) {
        if v > 0.0 && v >= t && best.is_none_or(|b| v > p[b]) {
            best = Some(k);
        }
    }
    best.unwrap_or_else(|| argmax(p))
}

/// Hard label obtained by applying [`assign_class`] to every pixel.
pub fn assign_at_threshold(pred: &SoftLabelMap, t: f64) -> HardLabelMap {
    let data = pred.pixels().map(|p| assign_class(p, t) as u16).collect();
    HardLabelMap::new(pred.height(), pred.width(), pred.num_classes(), data)
        .expect("assigned classes are in range")
}

/// Threshold grid `0, step, 2 step, ..., 1`.
pub fn threshold_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidStep(step));
    }
    let inv = 1.0 / step;
    let n = libm::round(inv);
    if libm::fabs(inv - n) < 1e-9 {
        // exact decimal points, e.g. 0.37 rather than 37 * 0.01
        let n = n as usize;
        Ok((0..=n).map(|i| i as f64 / n as f64).collect())
    } else {
        let n = libm::floor(inv) as usize;
        Ok((0..=n).map(|i| i as f64 * step).collect())
    }
}

/// The ten metrics reported for one class, or their average.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricValues {
    pub acc: Option<f64>,
    pub spe: Option<f64>,
    pub sen: Option<f64>,
    pub pre: Option<f64>,
    pub dsc_h: Option<f64>,
    pub iou: Option<f64>,
    pub dsc_s: Option<f64>,
    pub rad: Option<f64>,
    pub rd: Option<f64>,
    pub rmse: Option<f64>,
}

impl MetricValues {
    pub fn new(hard: HardMetrics, soft: SoftMetrics) -> Self {
        Self {
            acc: hard.accuracy,
            spe: hard.specificity,
            sen: hard.sensitivity,
            pre: hard.precision,
            dsc_h: hard.dice,
            iou: hard.iou,
            dsc_s: soft.dice,
            rad: soft.rad,
            rd: soft.rd,
            rmse: soft.rmse,
        }
    }

    /// Values in report column order.
    pub fn as_array(&self) -> [Option<f64>; 10] {
        [
            self.acc, self.spe, self.sen, self.pre, self.dsc_h, self.iou, self.dsc_s, self.rad,
            self.rd, self.rmse,
        ]
    }

    fn from_array(a: [Option<f64>; 10]) -> Self {
        let [acc, spe, sen, pre, dsc_h, iou, dsc_s, rad, rd, rmse] = a;
        Self {
            acc,
            spe,
            sen,
            pre,
            dsc_h,
            iou,
            dsc_s,
            rad,
            rd,
            rmse,
        }
    }
}

/// How classes missing from the target enter the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Exclusion {
    /// Drop classes absent from the target; undefined values are skipped.
    #[default]
    MissingClasses,
    /// Keep every class and count undefined values as 0.
    ZeroFill,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub average: MetricValues,
    pub excluded: Vec<usize>,
}

/// Macro average of per-class metrics. `present[c]` says whether class `c`
/// occurs in the target.
pub fn aggregate(per_class: &[MetricValues], present: &[bool], policy: Exclusion) -> Result<Aggregate> {
    if per_class.len() != present.len() {
        return Err(Error::LengthMismatch {
            what: "class presence flags",
            expected: per_class.len(),
            actual: present.len(),
        });
    }
    let (included, excluded): (Vec<usize>, Vec<usize>) = match policy {
        Exclusion::MissingClasses => (0..per_class.len()).partition(|&c| present[c]),
        Exclusion::ZeroFill => ((0..per_class.len()).collect(), Vec::new()),
    };
    if included.is_empty() {
        return Err(Error::AllClassesExcluded);
    }
    let mut avg = [None; 10];
    for (m, slot) in avg.iter_mut().enumerate() {
        let values = included.iter().filter_map(|&c| {
            let v = per_class[c].as_array()[m];
            match policy {
                Exclusion::MissingClasses => v,
                Exclusion::ZeroFill => Some(v.unwrap_or(0.0)),
            }
        });
        let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        *slot = (n > 0).then(|| sum / n as f64);
    }
    Ok(Aggregate {
        average: MetricValues::from_array(avg),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassRow {
    pub class: usize,
    pub values: MetricValues,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricsReport {
    pub classes: Vec<ClassRow>,
    pub average: MetricValues,
    /// Always `"macro"`: the unweighted mean over included classes.
    pub averaging: &'static str,
    pub chosen_threshold: f64,
    pub excluded_classes: Vec<usize>,
    /// Every pixel's maximum probability was shared by several classes, so
    /// hard metrics only reflect the tie-break rule.
    pub degenerate_prediction: bool,
}

/// Evaluation target: hard labels, or soft labels whose argmax provides the
/// hard reference.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Hard(&'a HardLabelMap),
    Soft(&'a SoftLabelMap),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSearch {
    pub threshold: f64,
    pub report: MetricsReport,
    /// Macro DSC_h at every grid threshold.
    pub curve: Vec<(f64, f64)>,
}

fn macro_dice(m: &[u64], classes: usize, present: &[bool]) -> f64 {
    let (sum, n) = (0..classes)
        .filter(|&k| present[k])
        .filter_map(|k| hard_metrics(&counts_from_matrix(m, classes, k)).dice)
        .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn is_degenerate(pred: &SoftLabelMap) -> bool {
    pred.pixels().all(|p| {
        let best = p[argmax(p)];
        p.iter().filter(|&&v| v == best).count() > 1
    })
}

/// Searches the threshold grid for the highest macro DSC_h against a hard
/// target, then reports every metric at that threshold. Missing classes are
/// excluded.
pub fn optimal_threshold_search(pred: &SoftLabelMap, target: &HardLabelMap, step: f64) -> Result<ThresholdSearch> {
    evaluate(pred, Target::Hard(target), step, Exclusion::MissingClasses)
}

/// Threshold search plus full report. The smallest grid threshold reaching
/// the maximum macro DSC_h is chosen. Soft metrics compare against the soft
/// target, or the one-hot embedding of a hard target.
pub fn evaluate(pred: &SoftLabelMap, target: Target<'_>, step: f64, policy: Exclusion) -> Result<ThresholdSearch> {
    let (hard_target, soft_target) = match target {
        Target::Hard(h) => (h.clone(), one_hot(h)),
        Target::Soft(s) => (argmax_to_hard(s), s.clone()),
    };
    check_dims(pred.height(), pred.width(), hard_target.height(), hard_target.width())?;
    let c = hard_target.num_classes();
    if pred.num_classes() != c {
        return Err(Error::ClassCountMismatch(pred.num_classes(), c));
    }
    let present: Vec<bool> = hard_target.class_counts().iter().map(|&n| n > 0).collect();

    let grid = threshold_grid(step)?;
    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64, Vec<u64>)> = None;
    for &t in &grid {
        let m = confusion_matrix(pred.pixels().map(|p| assign_class(p, t)), &hard_target);
        let score = macro_dice(&m, c, &present);
        curve.push((t, score));
        if best.as_ref().is_none_or(|(_, s, _)| score > *s) {
            best = Some((t, score, m));
        }
    }
    let (threshold, _, matrix) = best.expect("grid is never empty");

    let soft = soft_metrics(pred, &soft_target)?;
    let per_class: Vec<MetricValues> = (0..c)
        .map(|k| MetricValues::new(hard_metrics(&counts_from_matrix(&matrix, c, k)), soft[k]))
        .collect();
    let agg = aggregate(&per_class, &present, policy)?;
    let classes = per_class
        .into_iter()
        .enumerate()
        .map(|(class, values)| ClassRow {
            class,
            values,
            excluded: agg.excluded.contains(&class),
        })
        .collect();
    Ok(ThresholdSearch {
        threshold,
        report: MetricsReport {
            classes,
            average: agg.average,
            averaging: "macro",
            chosen_threshold: threshold,
            excluded_classes: agg.excluded,
            degenerate_prediction: is_degenerate(pred),
        },
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hard(h: usize, w: usize, c: usize, data: &[u16]) -> HardLabelMap {
        HardLabelMap::new(h, w, c, data.to_vec()).unwrap()
    }

    #[test]
    fn confusion_identical_maps() {
        let t = hard(2, 3, 3, &[0, 1, 1, 2, 1, 0]);
        let c = confusion(&t, &t, 1).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 3, fp: 0, tn: 3, fn_: 0 });
    }

    #[test]
    fn confusion_two_by_two_enumeration() {
        let target = hard(2, 2, 2, &[1, 1, 0, 0]);
        let pred = hard(2, 2, 2, &[0, 1, 0, 1]);
        let c = confusion(&pred, &target, 1).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 1, tn: 1, fn_: 1 });
        let m = hard_metrics(&c);
        assert_eq!(m.dice, Some(0.5));
        assert_eq!(m.iou, Some(1.0 / 3.0));
        for v in [m.accuracy, m.precision, m.sensitivity, m.specificity] {
            assert_eq!(v, Some(0.5));
        }
    }

    #[test]
    fn confusion_absent_class_and_errors() {
        let t = hard(2, 2, 3, &[0, 1, 0, 1]);
        assert_eq!(confusion(&t, &t, 2).unwrap(), ConfusionCounts { tp: 0, fp: 0, tn: 4, fn_: 0 });
        assert_eq!(confusion(&t, &t, 3), Err(Error::InvalidClass(3)));
        let other = hard(1, 4, 3, &[0, 1, 0, 1]);
        assert!(matches!(confusion(&t, &other, 0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hard_metrics_perfect_disjoint_and_undefined() {
        let m = hard_metrics(&ConfusionCounts { tp: 3, fp: 0, tn: 5, fn_: 0 });
        for v in [m.accuracy, m.specificity, m.sensitivity, m.precision, m.dice, m.iou] {
            assert_eq!(v, Some(1.0));
        }
        let m = hard_metrics(&ConfusionCounts { tp: 0, fp: 2, tn: 1, fn_: 3 });
        assert_eq!((m.dice, m.iou), (Some(0.0), Some(0.0)));
        let m = hard_metrics(&ConfusionCounts { tp: 0, fp: 0, tn: 4, fn_: 0 });
        assert_eq!((m.dice, m.iou, m.sensitivity, m.precision), (None, None, None, None));
        assert_eq!(m.specificity, Some(1.0));
    }

    #[test]
    fn matrix_counts_match_direct_counts() {
        let target = hard(2, 3, 3, &[0, 1, 2, 2, 1, 0]);
        let pred = hard(2, 3, 3, &[0, 2, 2, 1, 1, 1]);
        let m = confusion_matrix(pred.data().iter().map(|&v| usize::from(v)), &target);
        for k in 0..3 {
            assert_eq!(counts_from_matrix(&m, 3, k), confusion(&pred, &target, k).unwrap());
        }
    }

    #[test]
    fn soft_metrics_identity_and_doubling() {
        let t = SoftLabelMap::new(1, 2, 2, vec![0.75, 0.25, 1.0, 0.0]).unwrap();
        let m = soft_metrics(&t, &t).unwrap();
        assert_eq!((m[1].rad, m[1].rd, m[1].rmse), (Some(0.0), Some(0.0), Some(0.0)));
        // the product overlap only reaches 1 on certain pixels: 2 * 0.0625 / 0.5
        assert_eq!(m[1].dice, Some(0.25));
        let h = HardLabelMap::new(1, 3, 2, vec![0, 1, 1]).unwrap();
        let m = soft_metrics(&one_hot(&h), &one_hot(&h)).unwrap();
        assert_eq!((m[0].dice, m[1].dice), (Some(1.0), Some(1.0)));

        let doubled = SoftLabelMap::new(1, 2, 2, vec![0.5, 0.5, 1.0, 0.0]).unwrap();
        let m = soft_metrics(&doubled, &t).unwrap();
        assert_eq!(m[1].rd, Some(1.0));
        // background mass shrinks: under-segmented
        assert!(m[0].rd.unwrap() < 0.0);
    }

    #[test]
    fn soft_metrics_zero_mass_class() {
        let t = SoftLabelMap::new(1, 1, 3, vec![0.5, 0.5, 0.0]).unwrap();
        let p = SoftLabelMap::new(1, 1, 3, vec![0.25, 0.5, 0.25]).unwrap();
        let m = soft_metrics(&p, &t).unwrap()[2];
        assert_eq!((m.dice, m.rad, m.rd, m.rmse), (Some(0.0), None, None, Some(0.25)));

        let p = SoftLabelMap::new(1, 1, 3, vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(soft_metrics(&p, &t).unwrap()[2].dice, None);
    }

    #[test]
    fn assign_class_policy() {
        assert_eq!(assign_class(&[0.6, 0.4], 0.4), 1);
        assert_eq!(assign_class(&[0.6, 0.4], 0.41), 0);
        assert_eq!(assign_class(&[0.6, 0.4], 1.0), 0);
        assert_eq!(assign_class(&[1.0, 0.0], 0.0), 0);
        assert_eq!(assign_class(&[0.2, 0.3, 0.5], 0.3), 2);
        assert_eq!(assign_class(&[0.4, 0.3, 0.3], 0.3), 1);
        assert_eq!(assign_class(&[0.5, 0.5], 1.0), 0);
    }

    #[test]
    fn grid_has_101_points() {
        let g = threshold_grid(0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!((g[0], g[40], g[100]), (0.0, 0.4, 1.0));
        assert!(threshold_grid(0.0).is_err());
        assert_eq!(threshold_grid(0.3).unwrap().len(), 4);
    }

    #[test]
    fn four_pixel_threshold_case() {
        let fg = [0.4, 0.4, 0.9, 0.1];
        let data: Vec<f64> = fg.iter().flat_map(|&p| [1.0 - p, p]).collect();
        let pred = SoftLabelMap::new(1, 4, 2, data).unwrap();
        let target = hard(1, 4, 2, &[1, 1, 1, 0]);
        let s = optimal_threshold_search(&pred, &target, 0.01).unwrap();
        let at = |t: f64| s.curve.iter().find(|(g, _)| *g == t).unwrap().1;
        assert_eq!(at(0.4), 1.0);
        assert_eq!(at(0.5), 0.5);
        assert_eq!(s.threshold, 0.11);
        assert_eq!(s.report.average.dsc_h, Some(1.0));
    }

    #[test]
    fn one_hot_prediction_peaks_at_zero() {
        let target = hard(2, 3, 4, &[0, 1, 3, 3, 1, 0]);
        let s = optimal_threshold_search(&one_hot(&target), &target, 0.01).unwrap();
        assert_eq!(s.threshold, 0.0);
        assert_eq!(s.report.excluded_classes, vec![2]);
        let avg = s.report.average;
        for v in [avg.acc, avg.spe, avg.sen, avg.pre, avg.dsc_h, avg.iou, avg.dsc_s] {
            assert_eq!(v, Some(1.0));
        }
        assert!(!s.report.degenerate_prediction);
    }

    #[test]
    fn uniform_prediction_is_flagged() {
        let pred = SoftLabelMap::new(1, 2, 2, vec![0.5; 4]).unwrap();
        let target = hard(1, 2, 2, &[0, 1]);
        let s = optimal_threshold_search(&pred, &target, 0.01).unwrap();
        assert!(s.report.degenerate_prediction);
        // t <= 0.5 labels everything foreground, t > 0.5 ties back to class 0;
        // both score 1/3 so the smallest threshold wins
        assert_eq!(s.curve[50].1, 1.0 / 3.0);
        assert_eq!(s.curve[51].1, 1.0 / 3.0);
        assert_eq!(s.threshold, 0.0);
        assert_eq!(s.report.classes[0].values.dsc_h, Some(0.0));
        assert_eq!(s.report.classes[1].values.dsc_h, Some(2.0 / 3.0));
    }

    #[test]
    fn aggregate_excludes_missing_classes() {
        let v = |d: f64| MetricValues {
            dsc_h: Some(d),
            ..MetricValues::default()
        };
        let per_class = [v(0.8), v(0.6), MetricValues::default()];
        let present = [true, true, false];
        let on = aggregate(&per_class, &present, Exclusion::MissingClasses).unwrap();
        assert!((on.average.dsc_h.unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(on.excluded, vec![2]);
        let off = aggregate(&per_class, &present, Exclusion::ZeroFill).unwrap();
        assert!((off.average.dsc_h.unwrap() - 1.4 / 3.0).abs() < 1e-15);
        assert!(on.average.dsc_h > off.average.dsc_h);

        let single = aggregate(&per_class[..1], &present[..1], Exclusion::MissingClasses).unwrap();
        assert_eq!(single.average, per_class[0]);
        assert_eq!(
            aggregate(&per_class, &[false; 3], Exclusion::MissingClasses),
            Err(Error::AllClassesExcluded)
        );
    }

    #[test]
    fn soft_target_uses_argmax_reference() {
        let t = SoftLabelMap::new(1, 2, 2, vec![0.75, 0.25, 0.25, 0.75]).unwrap();
        let s = evaluate(&t, Target::Soft(&t), 0.01, Exclusion::MissingClasses).unwrap();
        assert_eq!(s.report.average.dsc_h, Some(1.0));
        assert_eq!(s.report.average.rmse, Some(0.0));
        assert_eq!(s.report.average.dsc_s, Some(0.625));
    }
}
