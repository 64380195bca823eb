//! The topology-aware loss `L_T = Σ_k W_p(D_k(f), D_k(f′)) + Pers_p(D_k(f′))`,
//! the combined loss `L_G + λ·L_T`, and gradients with respect to the voxels
//! of the prediction.
//!
//! Every coordinate of a diagram is the value of the working volume at one
//! critical voxel, so the loss is piecewise smooth in the voxel values and its
//! gradient is sparse: each pair sends its derivative back to (at most) two
//! voxels. When the loss is evaluated on a resampled grid the working-grid
//! gradient is pulled back through the transpose of the interpolation weights.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagram_metrics::{linf, total_persistence, wasserstein, Matching};
use crate::error::{Error, Result};
use crate::filtration::build_superlevel_filtration;
use crate::par;
use crate::persistence::{compute_persistence, PersistenceDiagram, PersistenceOptions};
use crate::volume::{TrilinearMap, Volume};

/// Prediction clamp used by the cross-entropy loss.
pub const BCE_EPSILON: f64 = 1e-7;
/// Additive smoothing in the Dice denominator.
pub const DICE_SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometricLoss {
    Bce,
    #[default]
    Dice,
    None,
}

impl std::str::FromStr for GeometricLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bce" => Ok(Self::Bce),
            "dice" => Ok(Self::Dice),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown geometric loss {other:?} (expected bce, dice or none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Wasserstein exponent, also used as the total-persistence degree.
    pub p: f64,
    /// Weight of the topological term.
    pub lambda: f64,
    /// Homology dimensions included in the sum.
    pub dims: BTreeSet<usize>,
    /// Side length of the cubic grid the loss is evaluated on; `None`
    /// evaluates on the original grid.
    pub downsample: Option<usize>,
    pub geometric_loss: GeometricLoss,
    pub persistence: PersistenceOptions,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            lambda: 0.1,
            dims: BTreeSet::from([0, 1, 2]),
            downsample: Some(16),
            geometric_loss: GeometricLoss::default(),
            persistence: PersistenceOptions::default(),
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        crate::diagram_metrics::check_p(self.p)?;
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a positive finite number, got {}",
                self.lambda
            )));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("dims must not be empty".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d > 2) {
            return Err(Error::InvalidParameter(format!(
                "homology dimension {d} is outside 0..=2"
            )));
        }
        if let Some(m) = self.downsample {
            if m < 2 {
                return Err(Error::InvalidParameter(format!(
                    "downsample side must be at least 2, got {m}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimTerms {
    pub wasserstein: f64,
    pub total_persistence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    /// `geometric + λ·topological`.
    pub total: f64,
    pub topological: f64,
    pub geometric: f64,
    pub per_dim: BTreeMap<usize, DimTerms>,
    /// Gradient of `total` with respect to the prediction, on its original grid.
    #[serde(skip)]
    pub gradient: Volume,
}

/// Volumes on the grid the topological term is evaluated on.
struct Working {
    truth: Volume,
    pred: Volume,
    map: Option<TrilinearMap>,
}

fn working(f_true: &Volume, f_pred: &Volume, cfg: &LossConfig) -> Result<Working> {
    cfg.validate()?;
    f_true.ensure_same_dims(f_pred)?;
    match cfg.downsample {
        None => Ok(Working {
            truth: f_true.clone(),
            pred: f_pred.clone(),
            map: None,
        }),
        Some(m) => {
            let map = TrilinearMap::new(f_pred.dims(), [m, m, m])?;
            Ok(Working {
                truth: map.apply(f_true)?,
                pred: map.apply(f_pred)?,
                map: Some(map),
            })
        }
    }
}

fn diagrams(v: &Volume, opts: &PersistenceOptions) -> [PersistenceDiagram; 3] {
    compute_persistence(&build_superlevel_filtration(v), opts)
}

/// Per-dimension terms and the gradient on the working grid.
fn topological_terms(w: &Working, cfg: &LossConfig) -> Result<(BTreeMap<usize, DimTerms>, Vec<f64>)> {
    let (d_true, d_pred) = par::join(
        || diagrams(&w.truth, &cfg.persistence),
        || diagrams(&w.pred, &cfg.persistence),
    );
    let [_, n2, n3] = w.pred.dims();
    let flat = |v: [usize; 3]| (v[0] * n2 + v[1]) * n3 + v[2];
    let mut grad = vec![0.0; w.pred.len()];
    let mut per_dim = BTreeMap::new();
    for &k in &cfg.dims {
        let (dist, matching) = wasserstein(&d_true[k], &d_pred[k], cfg.p)?;
        let pers = total_persistence(&d_pred[k], cfg.p)?;
        per_dim.insert(
            k,
            DimTerms {
                wasserstein: dist,
                total_persistence: pers,
            },
        );
        for (vertex, g) in pair_gradients(&d_true[k], &d_pred[k], &matching, cfg.p) {
            grad[flat(vertex)] += g;
        }
    }
    Ok((per_dim, grad))
}

/// `(voxel, ∂/∂value)` contributions of one dimension's `W_p + Pers_p`.
fn pair_gradients(
    truth: &PersistenceDiagram,
    pred: &PersistenceDiagram,
    matching: &Matching,
    p: f64,
) -> Vec<([usize; 3], f64)> {
    // d|x|^p/dx, with the p = 1 kink at 0 resolved to 0.
    let dpow = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            p * x.abs().powf(p - 1.0) * x.signum()
        }
    };
    let mut out = Vec::new();
    let mut push = |pair: &crate::persistence::PersistencePair, d_birth: f64, d_death: f64| {
        if d_birth != 0.0 {
            out.push((pair.birth_vertex, d_birth));
        }
        // The death of an essential class is a constant.
        if d_death != 0.0 && !pair.essential {
            out.push((pair.death_vertex, d_death));
        }
    };

    // W_p = S^(1/p): chain through the sum of p-th powers.
    let s = matching.total_cost;
    let outer = if s > 0.0 { s.powf(1.0 / p - 1.0) / p } else { 0.0 };
    if outer > 0.0 {
        for &(i, j) in &matching.pairs_direct {
            let (x, y) = (&truth.pairs[i], &pred.pairs[j]);
            let (db, dd) = (y.birth - x.birth, y.death - x.death);
            debug_assert!(linf((x.birth, x.death), (y.birth, y.death)) == db.abs().max(dd.abs()));
            if db.abs() >= dd.abs() {
                push(y, outer * dpow(db), 0.0);
            } else {
                push(y, 0.0, outer * dpow(dd));
            }
        }
        for &j in &matching.to_diagonal_right {
            let y = &pred.pairs[j];
            let g = outer * dpow((y.birth - y.death) / 2.0) / 2.0;
            push(y, g, -g);
        }
    }

    for y in &pred.pairs {
        let g = dpow(y.birth - y.death);
        push(y, g, -g);
    }
    out
}

/// Evaluates the combined loss and its gradient.
pub fn topological_loss(f_true: &Volume, f_pred: &Volume, cfg: &LossConfig) -> Result<LossReport> {
    let w = working(f_true, f_pred, cfg)?;
    let (per_dim, work_grad) = topological_terms(&w, cfg)?;
    let topological: f64 = per_dim.values().map(|t| t.wasserstein + t.total_persistence).sum();
    let topo_grad = pull_back(&w, work_grad)?;
    let (geometric, geo_grad) = match cfg.geometric_loss {
        GeometricLoss::Bce => bce_loss(f_true, f_pred)?,
        GeometricLoss::Dice => dice_loss(f_true, f_pred)?,
        GeometricLoss::None => (0.0, Volume::zeros(f_pred.dims())?),
    };
    let data = geo_grad
        .data()
        .iter()
        .zip(&topo_grad)
        .map(|(g, t)| g + cfg.lambda * t)
        .collect();
    Ok(LossReport {
        total: geometric + cfg.lambda * topological,
        topological,
        geometric,
        per_dim,
        gradient: Volume::from_parts_unchecked(f_pred.dims(), data),
    })
}

/// Gradient of the topological term alone with respect to `f_pred`.
pub fn topological_loss_gradient(f_true: &Volume, f_pred: &Volume, cfg: &LossConfig) -> Result<Volume> {
    let w = working(f_true, f_pred, cfg)?;
    let (_, work_grad) = topological_terms(&w, cfg)?;
    Ok(Volume::from_parts_unchecked(f_pred.dims(), pull_back(&w, work_grad)?))
}

fn pull_back(w: &Working, grad: Vec<f64>) -> Result<Vec<f64>> {
    match &w.map {
        Some(map) => map.transpose(&grad),
        None => Ok(grad),
    }
}

/// Evaluates many `(truth, prediction)` pairs in parallel, in input order.
pub fn batch_topological_loss(pairs: &[(Volume, Volume)], cfg: &LossConfig) -> Vec<Result<LossReport>> {
    par::map(pairs, |(t, p)| topological_loss(t, p, cfg))
}

fn check_targets(f_true: &Volume, f_pred: &Volume) -> Result<()> {
    f_true.ensure_same_dims(f_pred)?;
    if let Some(y) = f_true.data().iter().find(|y| !(0.0..=1.0).contains(*y)) {
        return Err(Error::InvalidValue(format!("target value {y} is outside [0, 1]")));
    }
    Ok(())
}

/// Mean binary cross-entropy with the prediction clamped to `[ε, 1 − ε]`.
/// The gradient vanishes where the clamp is active.
pub fn bce_loss(f_true: &Volume, f_pred: &Volume) -> Result<(f64, Volume)> {
    check_targets(f_true, f_pred)?;
    let n = f_pred.len() as f64;
    let (lo, hi) = (BCE_EPSILON, 1.0 - BCE_EPSILON);
    let mut sum = 0.0;
    let grad = f_true
        .data()
        .iter()
        .zip(f_pred.data())
        .map(|(&y, &raw)| {
            let q = raw.clamp(lo, hi);
            sum += y * q.ln() + (1.0 - y) * (1.0 - q).ln();
            if raw < lo || raw > hi {
                0.0
            } else {
                -(y / q - (1.0 - y) / (1.0 - q)) / n
            }
        })
        .collect();
    Ok((-sum / n, Volume::from_parts_unchecked(f_pred.dims(), grad)))
}

/// Soft Dice loss `1 − 2Σyŷ / (Σy + Σŷ + s)`.
pub fn dice_loss(f_true: &Volume, f_pred: &Volume) -> Result<(f64, Volume)> {
    check_targets(f_true, f_pred)?;
    let (y, q) = (f_true.data(), f_pred.data());
    let inter: f64 = y.iter().zip(q).map(|(a, b)| a * b).sum();
    let denom = y.iter().sum::<f64>() + q.iter().sum::<f64>() + DICE_SMOOTHING;
    let grad = y
        .iter()
        .map(|&yi| -(2.0 * yi * denom - 2.0 * inter) / (denom * denom))
        .collect();
    Ok((
        1.0 - 2.0 * inter / denom,
        Volume::from_parts_unchecked(f_pred.dims(), grad),
    ))
}
