use std::path::PathBuf;

use clap::ValueEnum;
use polynet::constructor::Build;
use polynet::{
    betti_architecture, complex_indicator, cuboid_hole_indicator, difference_indicator,
    maxpool_to_relu, sigmoid_head, union_indicator, BettiProfile, DifferencePlan, Network, Space,
};
use serde::Serialize;

use super::{load_geometry, report, resolve_eps};
use crate::output::Run;
use crate::{Ctx, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// Pick the builder from the geometry kind.
    Auto,
    Union,
    Difference,
    Complex,
    Cuboid,
    /// Replace a final max-pool by ReLU layers.
    #[value(alias = "pure_relu")]
    PureRelu,
    /// Replace the final head by a sigmoid with tolerance `--delta`.
    #[value(alias = "sigmoid_head")]
    SigmoidHead,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Geometry description (JSON).
    #[arg(long)]
    geometry: PathBuf,
    /// Shell width; defaults to the geometry file's `epsilon`.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = Variant::Auto)]
    variant: Variant,
    /// Output tolerance of the sigmoid head.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
}

#[derive(Serialize)]
struct Summary {
    architecture: String,
    widths: Vec<usize>,
    parameters: usize,
    gates: usize,
    betti_architecture: Option<String>,
    outputs: Vec<PathBuf>,
}

fn mismatch(variant: Variant) -> Failure {
    let name = variant
        .to_possible_value()
        .map_or_else(|| format!("{variant:?}"), |v| v.get_name().to_string());
    Failure::Input(format!("variant {name} does not fit this geometry kind"))
}

fn base(space: &Space, eps: f64, variant: Variant) -> Result<Build, Failure> {
    let err = |e: polynet::ConstructError| Failure::Construct(e.to_string());
    let by_kind = matches!(
        variant,
        Variant::Auto | Variant::PureRelu | Variant::SigmoidHead
    );
    match (space, variant) {
        (Space::Polytope(p), Variant::Union) => {
            union_indicator(std::slice::from_ref(p), eps).map_err(err)
        }
        (Space::Union(ps), Variant::Union) => union_indicator(ps, eps).map_err(err),
        (Space::Polytope(p), _) if by_kind => {
            union_indicator(std::slice::from_ref(p), eps).map_err(err)
        }
        (Space::Union(ps), _) if by_kind => union_indicator(ps, eps).map_err(err),
        (Space::Polytope(p), Variant::Difference) => {
            let plan = DifferencePlan::new(vec![p.clone()], Vec::new(), None)
                .map_err(|e| Failure::Input(e.to_string()))?;
            difference_indicator(&plan, eps).map_err(err)
        }
        (Space::Union(ps), Variant::Difference) => {
            let plan = DifferencePlan::new(ps.clone(), Vec::new(), None)
                .map_err(|e| Failure::Input(e.to_string()))?;
            difference_indicator(&plan, eps).map_err(err)
        }
        (Space::Difference(plan), _) if by_kind || variant == Variant::Difference => {
            difference_indicator(plan, eps).map_err(err)
        }
        (Space::Complex(k), _) if by_kind || variant == Variant::Complex => {
            complex_indicator(k, eps).map_err(err)
        }
        (Space::CuboidHoles(c), _) if by_kind || variant == Variant::Cuboid => {
            cuboid_hole_indicator(c, eps, None).map_err(err)
        }
        _ => Err(mismatch(variant)),
    }
}

fn head(net: Network, variant: Variant, delta: f64) -> Result<Network, Failure> {
    let err = |e: polynet::ConstructError| Failure::Construct(e.to_string());
    match variant {
        Variant::PureRelu if net.layers().last().is_some_and(|l| l.is_max_pool()) => {
            maxpool_to_relu(&net).map_err(err)
        }
        Variant::SigmoidHead => sigmoid_head(&net, delta).map_err(err),
        _ => Ok(net),
    }
}

pub fn run(ctx: &Ctx, args: &Args) -> Result<(), Failure> {
    let mut run = Run::new("build", ctx.seed, &ctx.out);
    let (file, space) = load_geometry(&mut run, &args.geometry)?;
    let eps = resolve_eps(args.epsilon, &file)?;
    let built = base(&space, eps, args.variant)?;
    let certificates = built.certificates_json();
    let gates = built.gates.len();
    let net = head(built.network, args.variant, args.delta)?;

    let betti = match &file.betti {
        Some(b) => {
            let profile =
                BettiProfile::new(b.clone()).map_err(|e| Failure::Input(e.to_string()))?;
            let arch = betti_architecture(space.dim(), &profile)
                .map_err(|e| Failure::Input(e.to_string()))?;
            Some(arch.to_string())
        }
        None => None,
    };

    let arch = net.architecture();
    run.add("network.json", net.to_json());
    run.add("certificates.json", certificates);
    let written = run.commit()?;

    let mut text = format!("architecture: {arch}\ngates: {gates}\n");
    if let Some(b) = &betti {
        text.push_str(&format!("betti architecture: {b}\n"));
    }
    let summary = Summary {
        architecture: arch.to_string(),
        widths: arch.widths.clone(),
        parameters: net.num_params(),
        gates,
        betti_architecture: betti,
        outputs: written.clone(),
    };
    report(ctx, &summary, &text, &written);
    Ok(())
}
