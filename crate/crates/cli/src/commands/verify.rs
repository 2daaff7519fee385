use std::path::PathBuf;

use polynet::verifier::{check_indicator, SamplingPlan};
use polynet::Network;

use super::{load_geometry, resolve_eps};
use crate::output::Run;
use crate::{Ctx, Failure};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Network file to check.
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    geometry: PathBuf,
    /// Shell width; defaults to the geometry file's `epsilon`.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Exponent of the L^p error estimate.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Samples per stratum.
    #[arg(long, default_value_t = 2500)]
    samples: usize,
}

pub fn run(ctx: &Ctx, args: &Args) -> Result<(), Failure> {
    let mut run = Run::new("verify", ctx.seed, &ctx.out);
    let text = run.read(&args.network)?;
    let net = Network::from_json(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.network.display())))?;
    let (file, space) = load_geometry(&mut run, &args.geometry)?;
    let eps = resolve_eps(args.epsilon, &file)?;
    let mut plan = SamplingPlan::new(&space, eps, args.samples, ctx.seed);
    plan.p = args.p;
    let r = check_indicator(&net, &space, eps, &plan).map_err(|e| Failure::Input(e.to_string()))?;
    let json = r.to_json();
    run.add("report.json", json.clone());
    let written = run.commit()?;
    if ctx.json {
        print!("{json}");
    } else {
        println!(
            "inside {} (max deviation {:e})\noutside {} (max value {:e})\nrange {} [{}, {}]\nL^{} error {} ± {}",
            verdict(r.pass_inside),
            r.max_dev_inside,
            verdict(r.pass_outside),
            r.max_val_outside,
            verdict(r.pass_range),
            r.min_output,
            r.max_output,
            r.lp_error.p,
            r.lp_error.estimate,
            r.lp_error.ci_halfwidth
        );
        for p in &written {
            println!("wrote {}", p.display());
        }
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Verify("verification failed".into()))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
