//! Training losses with analytic gradients: mean absolute error, dice loss
//! and an uncertainty-weighted sum of loss terms.
//!
//! The weighted total is `sum_t L_t / (2 w_t^2) + ln(1 + w_t^2)`; its weights
//! are meant to be learned alongside the network, so [`total_loss`] also
//! returns the gradient with respect to each `w_t`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One weight per loss term. Consumers start every weight at 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct LossWeights(Vec<f64>);

impl LossWeights {
    /// Rejects zero and non-finite weights. The sign is dropped since only
    /// `w^2` enters the loss.
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if let Some(index) = omega.iter().position(|w| !w.is_finite() || *w == 0.0) {
            return Err(Error::InvalidWeight { index });
        }
        Ok(Self(omega.into_iter().map(f64::abs).collect()))
    }

    pub fn ones(terms: usize) -> Self {
        Self(vec![1.0; terms])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub value: f64,
    /// Gradient with respect to the prediction, or to each loss term for
    /// [`total_loss`].
    pub grad_pred: Vec<f64>,
    pub grad_omega: Option<Vec<f64>>,
}

fn check_pair(target: &[f64], pred: &[f64]) -> Result<()> {
    if target.is_empty() {
        return Err(Error::EmptyInput);
    }
    if target.len() != pred.len() {
        return Err(Error::LengthMismatch {
            what: "prediction",
            expected: target.len(),
            actual: pred.len(),
        });
    }
    Ok(())
}

/// Mean absolute error. The subgradient at `y_i == pred_i` is 0.
pub fn l1_loss(target: &[f64], pred: &[f64]) -> Result<LossEval> {
    check_pair(target, pred)?;
    let n = target.len() as f64;
    let mut value = 0.0;
    let grad_pred = target
        .iter()
        .zip(pred)
        .map(|(&y, &p)| {
            let d = y - p;
            value += libm::fabs(d);
            if d > 0.0 {
                -1.0 / n
            } else if d < 0.0 {
                1.0 / n
            } else {
                0.0
            }
        })
        .collect();
    Ok(LossEval {
        value: value / n,
        grad_pred,
        grad_omega: None,
    })
}

/// Dice loss `1 - 2 sum(y p) / (sum y + sum p)` without smoothing. Fails when
/// both inputs sum to zero.
pub fn dice_loss(target: &[f64], pred: &[f64]) -> Result<LossEval> {
    dice_loss_smoothed(target, pred, 0.0)
}

/// Dice loss with `eps` added to numerator and denominator,
/// `1 - (2 sum(y p) + eps) / (sum y + sum p + eps)`. With `eps = 0` this is
/// [`dice_loss`].
pub fn dice_loss_smoothed(target: &[f64], pred: &[f64], eps: f64) -> Result<LossEval> {
    check_pair(target, pred)?;
    let overlap: f64 = target.iter().zip(pred).map(|(y, p)| y * p).sum();
    let denom = target.iter().sum::<f64>() + pred.iter().sum::<f64>() + eps;
    if denom == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let num = 2.0 * overlap + eps;
    let denom_sq = denom * denom;
    let grad_pred = target
        .iter()
        .map(|&y| -(2.0 * y * denom - num) / denom_sq)
        .collect();
    Ok(LossEval {
        value: 1.0 - num / denom,
        grad_pred,
        grad_omega: None,
    })
}

/// Uncertainty-weighted sum of loss terms. `grad_pred` holds `dL/dL_t` and
/// `grad_omega` holds `dL/dw_t`.
pub fn total_loss(losses: &[f64], weights: &LossWeights) -> Result<LossEval> {
    if losses.len() != weights.len() {
        return Err(Error::LengthMismatch {
            what: "loss weights",
            expected: losses.len(),
            actual: weights.len(),
        });
    }
    let mut value = 0.0;
    let mut grad_terms = Vec::with_capacity(losses.len());
    let mut grad_omega = Vec::with_capacity(losses.len());
    for (&l, &w) in losses.iter().zip(weights.as_slice()) {
        let w2 = w * w;
        value += l / (2.0 * w2) + libm::log1p(w2);
        grad_terms.push(1.0 / (2.0 * w2));
        grad_omega.push(-l / (w2 * w) + 2.0 * w / (1.0 + w2));
    }
    Ok(LossEval {
        value,
        grad_pred: grad_terms,
        grad_omega: Some(grad_omega),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub passed: bool,
    pub max_rel_error: f64,
    /// Coordinate with the largest relative error.
    pub worst_index: usize,
    pub checked: usize,
}

/// Compares `analytic` against central differences of `f` at `point`.
///
/// The relative error of a coordinate is `|a - n| / max(|a|, |n|, 1e-8)`.
/// Coordinates for which `skip` returns true are not compared.
pub fn gradient_check<F, S>(f: F, point: &[f64], analytic: &[f64], h: f64, tolerance: f64, skip: S) -> GradCheck
where
    F: Fn(&[f64]) -> f64,
    S: Fn(usize) -> bool,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    assert_eq!(point.len(), analytic.len(), "gradient length mismatch");
    let mut x = point.to_vec();
    let mut worst = (0.0f64, 0usize);
    let mut checked = 0;
    for i in 0..point.len() {
        if skip(i) {
            continue;
        }
        x[i] = point[i] + h;
        let up = f(&x);
        x[i] = point[i] - h;
        let down = f(&x);
        x[i] = point[i];
        let numeric = (up - down) / (2.0 * h);
        let a = analytic[i];
        let scale = libm::fabs(a).max(libm::fabs(numeric)).max(1e-8);
        let rel = libm::fabs(a - numeric) / scale;
        if rel > worst.0 || !rel.is_finite() {
            worst = (rel, i);
        }
        checked += 1;
    }
    GradCheck {
        passed: worst.0 < tolerance,
        max_rel_error: worst.0,
        worst_index: worst.1,
        checked,
    }
}
