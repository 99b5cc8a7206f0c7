use anyhow::{bail, Context, Result};
use geowass::apps::{gradient_flow, FlowConfig, FlowLoss, FlowTrace};
use geowass::{GdConfig, Optimizer, SmoothingConfig};

use crate::cli::FlowArgs;
use crate::io::{emit, read_cloud, write_cloud};
use crate::svg::polyline_chart;

pub fn run(args: &FlowArgs) -> Result<()> {
    let loss: FlowLoss = args.loss.parse().with_context(|| {
        format!("unknown loss {:?}; expected one of sw, max_sw, pwd, minswgg_random, minswgg_optim", args.loss)
    })?;
    let source = read_cloud(&args.source)?;
    let target = read_cloud(&args.target)?;
    let cfg = FlowConfig {
        trace_every: args.trace_every,
        directions: args.directions,
        smoothing: SmoothingConfig { copies: args.copies, epsilon: args.eps, seed: args.seed },
        gd: GdConfig {
            learning_rate: args.search_lr,
            iterations: args.search_iters,
            optimizer: Optimizer::Adam,
            seed: args.seed,
            resample_noise: true,
        },
        resample_directions: !args.fixed_directions,
        ..FlowConfig::new(loss, args.steps, args.lr, args.seed)
    };
    let (moved, trace) = gradient_flow(&source, &target, &cfg)?;
    emit(args.out.as_deref(), &trace_csv(&trace))?;
    if let Some(path) = &args.final_cloud {
        write_cloud(path, &moved)?;
    }
    if let Some(path) = &args.svg {
        let points: Vec<(f64, f64)> = trace
            .records
            .iter()
            .filter_map(|r| r.w2.filter(|w| *w > 0.0).map(|w| (r.iteration as f64, w.log10())))
            .collect();
        if points.is_empty() {
            bail!("no positive W2 values in the trace to chart");
        }
        std::fs::write(path, polyline_chart(&points, "iteration", "log10 W2"))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn trace_csv(trace: &FlowTrace) -> String {
    let mut text = String::from("iteration,objective,w2\n");
    for r in &trace.records {
        let w2 = r.w2.map(|w| w.to_string()).unwrap_or_default();
        text.push_str(&format!("{},{},{}\n", r.iteration, r.objective, w2));
    }
    text
}
