use anyhow::{bail, Context, Result};
use geowass::{
    max_sw, minswgg_anneal, minswgg_optimize, minswgg_random_search, pwd, sinkhorn_divergence, sw, swgg_perm, w2_exact,
    SinkhornConfig, UnitDirection,
};
use serde::Serialize;

use super::{gd, require_seed, smoothing, DEFAULT_ANNEAL_ITERS};
use crate::cli::{DistanceArgs, DistanceMethod};
use crate::io::{emit, read_cloud};

#[derive(Debug, Serialize)]
struct DistanceRecord {
    method: String,
    value: f64,
    direction: Option<Vec<f64>>,
    wall_time_s: f64,
    seed: Option<u64>,
}

pub fn run(args: &DistanceArgs) -> Result<()> {
    let a = read_cloud(&args.source)?;
    let b = read_cloud(&args.target)?;
    if a.dim() != b.dim() {
        bail!(
            "dimension mismatch: {} has d={}, {} has d={}",
            args.source.display(),
            a.dim(),
            args.target.display(),
            b.dim()
        );
    }
    if a.len() != b.len() {
        bail!(
            "size mismatch: {} has {} atoms, {} has {}",
            args.source.display(),
            a.len(),
            args.target.display(),
            b.len()
        );
    }
    let method = args.method;
    let seed = if method.is_stochastic() { Some(require_seed(args.search.seed, method_name(method))?) } else { None };
    let s = seed.unwrap_or(0);
    let search = &args.search;
    let clock = std::time::Instant::now();
    let (value, direction) = match method {
        DistanceMethod::W2 => (w2_exact(&a, &b)?.0, None),
        DistanceMethod::Swgg => {
            let Some(theta) = args.theta.clone() else { bail!("swgg needs --theta") };
            if theta.len() != a.dim() {
                bail!("--theta has {} components, the clouds have d={}", theta.len(), a.dim());
            }
            let theta = UnitDirection::normalized(theta).context("invalid --theta")?;
            (swgg_perm(&a, &b, &theta)?.0, Some(theta))
        }
        DistanceMethod::MinswggRs => {
            let r = minswgg_random_search(&a, &b, search.directions, s)?;
            (r.value, Some(r.direction))
        }
        DistanceMethod::MinswggSa => {
            let r = minswgg_anneal(&a, &b, search.iters.unwrap_or(DEFAULT_ANNEAL_ITERS), s)?;
            (r.value, Some(r.direction))
        }
        DistanceMethod::MinswggGd => {
            let r = minswgg_optimize(&a, &b, &smoothing(search, s), &gd(search, s))?;
            (r.value, Some(r.direction))
        }
        DistanceMethod::Sw => (sw(&a, &b, search.directions, s)?, None),
        DistanceMethod::Pwd => (pwd(&a, &b, search.directions, s)?, None),
        DistanceMethod::Maxsw => {
            let (v, theta) = max_sw(&a, &b, &gd(search, s))?;
            (v, Some(theta))
        }
        DistanceMethod::Sinkhorn => {
            let defaults = SinkhornConfig::default();
            let cfg = SinkhornConfig {
                reg: args.reg,
                max_iter: search.iters.unwrap_or(defaults.max_iter),
                tol: defaults.tol,
            };
            let out = sinkhorn_divergence(&a, &b, &cfg)?;
            if !out.converged {
                eprintln!("warning: Sinkhorn stopped after {} iterations without reaching tolerance", out.iterations);
            }
            (out.value, None)
        }
    };
    let record = DistanceRecord {
        method: method_name(method).to_string(),
        value,
        direction: direction.map(UnitDirection::into_vec),
        wall_time_s: clock.elapsed().as_secs_f64(),
        seed,
    };
    let mut text = serde_json::to_string(&record)?;
    text.push('\n');
    emit(args.out.as_deref(), &text)
}

pub fn method_name(method: DistanceMethod) -> &'static str {
    match method {
        DistanceMethod::W2 => "w2",
        DistanceMethod::Swgg => "swgg",
        DistanceMethod::MinswggRs => "minswgg-rs",
        DistanceMethod::MinswggSa => "minswgg-sa",
        DistanceMethod::MinswggGd => "minswgg-gd",
        DistanceMethod::Sw => "sw",
        DistanceMethod::Maxsw => "maxsw",
        DistanceMethod::Pwd => "pwd",
        DistanceMethod::Sinkhorn => "sinkhorn",
    }
}
