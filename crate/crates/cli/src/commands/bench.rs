use std::time::Instant;

use anyhow::{bail, Result};
use geowass::{max_sw, minswgg_anneal, minswgg_optimize, minswgg_random_search, pwd, sw, w2_exact, ORACLE_MAX_N};
use geowass::{sinkhorn_divergence, PointCloud, SinkhornConfig};

use super::distance::method_name;
use super::{gd, require_seed, smoothing, DEFAULT_ANNEAL_ITERS};
use crate::cli::{BenchArgs, DistanceMethod, SearchArgs};
use crate::io::emit;
use crate::synthetic::gaussian_pair;

pub fn run(args: &BenchArgs) -> Result<()> {
    let seed = require_seed(args.search.seed, "bench")?;
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    for &method in &args.methods {
        match method {
            DistanceMethod::Swgg => bail!("swgg needs a fixed direction and is not benchmarked"),
            DistanceMethod::W2 | DistanceMethod::Sinkhorn => {
                if let Some(&n) = args.n.iter().find(|&&n| n > ORACLE_MAX_N) {
                    bail!("{} refused at n={n}: the exact solver limit is {ORACLE_MAX_N}", method_name(method));
                }
            }
            _ => {}
        }
    }
    let mut csv = String::from("method,n,d,value,time_s\n");
    for &n in &args.n {
        let (a, b) = gaussian_pair(n, args.dim, seed);
        for &method in &args.methods {
            let mut best = f64::INFINITY;
            let mut value = f64::NAN;
            for _ in 0..args.reps {
                let clock = Instant::now();
                value = evaluate(method, &a, &b, &args.search, seed)?;
                best = best.min(clock.elapsed().as_secs_f64());
            }
            csv.push_str(&format!("{},{n},{},{value},{best}\n", method_name(method), args.dim));
        }
    }
    emit(args.out.as_deref(), &csv)
}

fn evaluate(method: DistanceMethod, a: &PointCloud, b: &PointCloud, search: &SearchArgs, seed: u64) -> Result<f64> {
    Ok(match method {
        DistanceMethod::W2 => w2_exact(a, b)?.0,
        DistanceMethod::MinswggRs => minswgg_random_search(a, b, search.directions, seed)?.value,
        DistanceMethod::MinswggSa => minswgg_anneal(a, b, search.iters.unwrap_or(DEFAULT_ANNEAL_ITERS), seed)?.value,
        DistanceMethod::MinswggGd => minswgg_optimize(a, b, &smoothing(search, seed), &gd(search, seed))?.value,
        DistanceMethod::Sw => sw(a, b, search.directions, seed)?,
        DistanceMethod::Pwd => pwd(a, b, search.directions, seed)?,
        DistanceMethod::Maxsw => max_sw(a, b, &gd(search, seed))?.0,
        DistanceMethod::Sinkhorn => sinkhorn_divergence(a, b, &SinkhornConfig::default())?.value,
        DistanceMethod::Swgg => unreachable!("rejected before timing"),
    })
}
