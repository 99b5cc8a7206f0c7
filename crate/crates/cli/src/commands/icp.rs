use anyhow::{bail, Context, Result};
use geowass::apps::{frobenius_gap, icp, Correspondence, IcpConfig, IcpResult};
use geowass::{SinkhornConfig, ORACLE_MAX_N};
use serde::Serialize;

use super::{gd, require_seed, smoothing};
use crate::cli::{IcpArgs, IcpMethod};
use crate::io::{emit, read_cloud};
use crate::synthetic::rigid_benchmark;

/// Regularization of the reported Sinkhorn divergence in benchmark mode.
const BENCHMARK_SINKHORN_REG: f64 = 0.1;

#[derive(Debug, Serialize)]
struct IcpSummary {
    method: &'static str,
    iterations: usize,
    chamfer: f64,
    omega: Vec<f64>,
    t: Vec<f64>,
    sinkhorn_div: Option<f64>,
    time_s: f64,
}

fn method_name(method: IcpMethod) -> &'static str {
    match method {
        IcpMethod::Nn => "nn",
        IcpMethod::ExactOt => "exact_ot",
        IcpMethod::Minswgg => "minswgg",
        IcpMethod::MinswggOptim => "minswgg_optim",
    }
}

fn refusal(n: usize) -> String {
    format!("exact_ot refused: {n} atoms exceeds the exact solver limit of {ORACLE_MAX_N}")
}

fn config(args: &IcpArgs, method: IcpMethod, seed: u64, sinkhorn_reg: Option<f64>) -> IcpConfig {
    let correspondence = match method {
        IcpMethod::Nn => Correspondence::NearestNeighbor,
        IcpMethod::ExactOt => Correspondence::ExactOt,
        IcpMethod::Minswgg => Correspondence::MinSwgg { directions: args.search.directions },
        IcpMethod::MinswggOptim => {
            Correspondence::MinSwggOptim { smoothing: smoothing(&args.search, seed), gd: gd(&args.search, seed) }
        }
    };
    IcpConfig {
        max_iter: args.max_iter,
        eps_stop: args.eps_stop,
        seed,
        sinkhorn: sinkhorn_reg.map(|reg| SinkhornConfig { reg, max_iter: args.sinkhorn_iters, ..Default::default() }),
        ..IcpConfig::new(correspondence)
    }
}

pub fn run(args: &IcpArgs) -> Result<()> {
    if args.benchmark {
        return benchmark(args);
    }
    let [source_path, target_path] = args.clouds.as_slice() else {
        bail!("icp needs a source and a target CSV (or --benchmark)");
    };
    let &[method] = args.method.as_slice() else {
        bail!("icp on files takes a single --method");
    };
    let source = read_cloud(source_path)?;
    let target = read_cloud(target_path)?;
    if method == IcpMethod::ExactOt && source.len().max(target.len()) > ORACLE_MAX_N {
        bail!(refusal(source.len().max(target.len())));
    }
    let seed = match method {
        IcpMethod::Minswgg | IcpMethod::MinswggOptim => require_seed(args.search.seed, method_name(method))?,
        IcpMethod::Nn | IcpMethod::ExactOt => args.search.seed.unwrap_or(0),
    };
    let result = icp(&source, &target, &config(args, method, seed, args.sinkhorn_reg))?;
    let mut csv = String::from("iteration,chamfer\n");
    for (i, c) in result.diagnostics.chamfer.iter().enumerate() {
        csv.push_str(&format!("{i},{c}\n"));
    }
    emit(args.out.as_deref(), &csv)?;
    let summary = summary(method, &result);
    let json = serde_json::to_string(&summary)?;
    match &args.summary {
        Some(path) => std::fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?,
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn summary(method: IcpMethod, result: &IcpResult) -> IcpSummary {
    IcpSummary {
        method: method_name(method),
        iterations: result.diagnostics.iterations,
        chamfer: result.diagnostics.final_chamfer(),
        omega: result.transform.omega().to_vec(),
        t: result.transform.translation().to_vec(),
        sinkhorn_div: result.diagnostics.sinkhorn.map(|s| s.value),
        time_s: result.diagnostics.wall_time,
    }
}

fn benchmark(args: &IcpArgs) -> Result<()> {
    if !args.clouds.is_empty() {
        bail!("--benchmark generates its own clouds; drop the file arguments");
    }
    let seed = require_seed(args.search.seed, "icp --benchmark")?;
    let reg = args.sinkhorn_reg.unwrap_or(BENCHMARK_SINKHORN_REG);
    let mut csv = String::from("method,sinkhorn_div,chamfer,frobenius,time_s,iters\n");
    for instance in 0..args.instances {
        let (source, target, truth) = rigid_benchmark(args.n, seed + instance);
        for &method in &args.method {
            let name = method_name(method);
            if method == IcpMethod::ExactOt && args.n > ORACLE_MAX_N {
                eprintln!("{}", refusal(args.n));
                csv.push_str(&format!("{name},,,,,\n"));
                continue;
            }
            let result = icp(&source, &target, &config(args, method, seed + instance, Some(reg)))
                .with_context(|| format!("{name} failed"))?;
            let frobenius = frobenius_gap(&truth, &result.transform)?;
            let sinkhorn = result.diagnostics.sinkhorn.map(|s| s.value.to_string()).unwrap_or_default();
            csv.push_str(&format!(
                "{name},{sinkhorn},{},{frobenius},{},{}\n",
                result.diagnostics.final_chamfer(),
                result.diagnostics.wall_time,
                result.diagnostics.iterations
            ));
        }
    }
    emit(args.out.as_deref(), &csv)
}
