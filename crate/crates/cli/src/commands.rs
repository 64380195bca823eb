use std::collections::BTreeSet;

use serde_json::{json, Value};
use topocube::analysis::interpolation_errors;
use topocube::persistence::DiagramRecord;
use topocube::shape_metrics::{evaluate_pair_with, SmoothingParams};
use topocube::volume::{save_volume, VolumeFormat};
use topocube::{
    bottleneck, build_superlevel_filtration, compute_persistence, par, topological_loss, wasserstein, BinaryVolume,
    LossConfig, PersistenceDiagram, PersistenceOptions,
};

use crate::inputs::{self, Pair};
use crate::output::{csv, emit, fmt_g, json};
use crate::{CommonArgs, DiagramArgs, DistanceArgs, Failure, InterpArgs, LossArgs, Metric, MetricsArgs};

fn options(common: &CommonArgs) -> PersistenceOptions {
    PersistenceOptions {
        essential_death: common.essential_death,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn diagrams_of(path: &std::path::Path, common: &CommonArgs) -> Result<Vec<PersistenceDiagram>, Failure> {
    let v = inputs::volume(path, common.raw_dims)?;
    Ok(compute_persistence(&build_superlevel_filtration(&v), &options(common)).into())
}

pub fn diagram(a: &DiagramArgs) -> Result<(), Failure> {
    inputs::require_file(&a.volume)?;
    let records: Vec<Value> = diagrams_of(&a.volume, &a.common)?
        .iter()
        .map(|d| to_value(&DiagramRecord::from(d)))
        .collect();
    emit(&json(&Value::Array(records)), a.common.output.as_deref())
}

fn load_side(path: &std::path::Path, common: &CommonArgs) -> Result<Vec<PersistenceDiagram>, Failure> {
    if inputs::is_json(path) {
        inputs::diagrams(path)
    } else {
        diagrams_of(path, common)
    }
}

/// Lines up the diagrams to compare, by homology dimension.
fn align(
    left: Vec<PersistenceDiagram>,
    right: Vec<PersistenceDiagram>,
    only: Option<usize>,
) -> Result<Vec<(PersistenceDiagram, PersistenceDiagram)>, Failure> {
    let pick = |side: &[PersistenceDiagram], dim: usize, name: &str| {
        side.iter()
            .find(|d| d.dim == dim)
            .cloned()
            .ok_or_else(|| Failure::semantic(format!("{name} input has no dimension-{dim} diagram")))
    };
    if let Some(dim) = only {
        return Ok(vec![(pick(&left, dim, "left")?, pick(&right, dim, "right")?)]);
    }
    if let ([l], [r]) = (left.as_slice(), right.as_slice()) {
        // Two single diagrams are compared as given; the metric rejects a
        // dimension mismatch.
        return Ok(vec![(l.clone(), r.clone())]);
    }
    let dims = |side: &[PersistenceDiagram]| side.iter().map(|d| d.dim).collect::<BTreeSet<_>>();
    let (dl, dr) = (dims(&left), dims(&right));
    if dl != dr || dl.len() != left.len() || dr.len() != right.len() {
        return Err(Failure::semantic(format!(
            "cannot pair diagrams by dimension: left has {dl:?}, right has {dr:?}"
        )));
    }
    dl.into_iter()
        .map(|d| Ok((pick(&left, d, "left")?, pick(&right, d, "right")?)))
        .collect()
}

pub fn distance(a: &DistanceArgs) -> Result<(), Failure> {
    inputs::require_file(&a.left)?;
    inputs::require_file(&a.right)?;
    let (left, right) = par::join(|| load_side(&a.left, &a.common), || load_side(&a.right, &a.common));
    let pairs = align(left?, right?, a.dim)?;
    let mut out = Vec::new();
    for (l, r) in &pairs {
        let entry = match a.metric {
            Metric::Wasserstein => {
                let (d, matching) = wasserstein(l, r, a.p)?;
                json!({"dim": l.dim, "metric": "wasserstein", "p": a.p, "distance": d, "matching": to_value(&matching)})
            }
            Metric::Bottleneck => {
                json!({"dim": l.dim, "metric": "bottleneck", "distance": bottleneck(l, r)?})
            }
        };
        out.push(entry);
    }
    emit(&json(&Value::Array(out)), a.common.output.as_deref())
}

pub fn loss(a: &LossArgs) -> Result<(), Failure> {
    inputs::require_file(&a.truth)?;
    inputs::require_file(&a.pred)?;
    let cfg = LossConfig {
        p: a.p,
        lambda: a.lambda,
        dims: a.dims.iter().copied().collect(),
        downsample: (!a.no_downsample).then_some(a.m),
        geometric_loss: a.geom,
        persistence: options(&a.common),
    };
    cfg.validate()?;
    let (truth, pred) = par::join(
        || inputs::volume(&a.truth, a.common.raw_dims),
        || inputs::volume(&a.pred, a.common.raw_dims),
    );
    let report = topological_loss(&truth?, &pred?, &cfg)?;
    if let Some(path) = &a.grad_out {
        save_volume(path, &report.gradient, VolumeFormat::Npy).map_err(|e| Failure::from(e).context(path))?;
    }
    emit(&json(&to_value(&report)), a.common.output.as_deref())
}

pub fn metrics(a: &MetricsArgs) -> Result<(), Failure> {
    let pairs = match (&a.manifest, &a.pred_glob, &a.truth_glob) {
        (Some(m), _, _) => inputs::read_manifest(m)?,
        (None, Some(p), Some(t)) => inputs::pair_globs(p, t)?,
        _ => return Err(Failure::io("give a prediction glob and a truth glob, or --manifest")),
    };
    for pair in &pairs {
        inputs::require_file(&pair.pred)?;
        inputs::require_file(&pair.truth)?;
    }
    let params = SmoothingParams {
        sigma: a.sigma,
        truncate: a.truncate,
        threshold: a.smooth_threshold,
    };
    params.validate()?;
    let evaluate = |pair: &Pair| -> Result<Vec<String>, Failure> {
        let pred = inputs::volume(&pair.pred, a.raw_dims)?;
        let truth = inputs::volume(&pair.truth, a.raw_dims)?;
        let truth = BinaryVolume::from_volume(&truth).map_err(|e| Failure::from(e).context(&pair.truth))?;
        let r = evaluate_pair_with(&pred, &truth, &params).map_err(|e| Failure::from(e).context(&pair.pred))?;
        Ok(vec![
            pair.id.clone(),
            fmt_g(r.iou_error),
            fmt_g(r.volume_error),
            fmt_g(r.surface_area_error),
            fmt_g(r.roughness_error),
        ])
    };
    let rows = par::map(&pairs, evaluate).into_iter().collect::<Result<Vec<_>, _>>()?;
    let header = [
        "id",
        "iou_error",
        "volume_error",
        "surface_area_error",
        "roughness_error",
    ]
    .map(String::from);
    emit(&csv(&header, &rows), a.output.as_deref())
}

pub fn interp_analysis(a: &InterpArgs) -> Result<(), Failure> {
    let files = inputs::expand(&a.volumes)?;
    if a.sides.is_empty() {
        return Err(Failure::semantic("--sides needs at least one side length"));
    }
    let dims: BTreeSet<usize> = a.dims.iter().copied().collect();
    let opts = options(&a.common);
    let per_file = par::map(&files, |path| -> Result<Vec<Vec<String>>, Failure> {
        let v = inputs::volume(path, a.common.raw_dims)?;
        let rows = interpolation_errors(&v, &a.sides, a.p, &dims, &opts).map_err(|e| Failure::from(e).context(path))?;
        let id = inputs::stem(path);
        Ok(rows
            .into_iter()
            .map(|row| {
                let mut fields = vec![id.clone(), row.side.to_string()];
                fields.extend(dims.iter().map(|d| fmt_g(row.wasserstein[d])));
                fields
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in per_file {
        rows.extend(r?);
    }
    let mut header = vec!["volume_id".to_string(), "r2".to_string()];
    header.extend(dims.iter().map(|d| format!("wasserstein_dim{d}")));
    emit(&csv(&header, &rows), a.common.output.as_deref())
}
