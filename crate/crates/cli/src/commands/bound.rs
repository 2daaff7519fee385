use std::path::PathBuf;

use polynet::constructor::simplicial_width_report;
use polynet::geometry::spec_file::GeometrySpec;
use polynet::{betti_architecture, BettiProfile, DimensionHistogram, Space};
use serde::Serialize;

use super::{load_geometry, report};
use crate::output::Run;
use crate::{Ctx, Failure};

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["histogram", "betti", "geometry"])))]
pub struct Args {
    /// Ambient dimension.
    #[arg(long = "dim", short = 'd')]
    dim: usize,
    /// Facet counts k_0,k_1,... by simplex dimension.
    #[arg(long, value_delimiter = ',')]
    histogram: Option<Vec<usize>>,
    /// Betti numbers beta_0,beta_1,...
    #[arg(long, value_delimiter = ',')]
    betti: Option<Vec<usize>>,
    /// Simplicial complex, or cuboid with holes carrying a "betti" field.
    #[arg(long)]
    geometry: Option<PathBuf>,
}

#[derive(Serialize)]
struct WidthSummary {
    histogram: Vec<usize>,
    packed: f64,
    mixed: f64,
    bound: usize,
    note: Option<String>,
}

#[derive(Serialize)]
struct BettiSummary {
    betti: Vec<usize>,
    widths: Vec<usize>,
    architecture: String,
}

#[derive(Serialize)]
struct Summary {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    simplicial: Option<WidthSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    betti: Option<BettiSummary>,
}

fn width(d: usize, counts: Vec<usize>) -> Result<WidthSummary, Failure> {
    let hist =
        DimensionHistogram::new(counts.clone(), d).map_err(|e| Failure::Input(e.to_string()))?;
    let r = simplicial_width_report(d, &hist);
    Ok(WidthSummary {
        histogram: counts,
        packed: r.packed,
        mixed: r.mixed,
        bound: r.bound,
        note: r.note,
    })
}

fn betti(d: usize, b: Vec<usize>) -> Result<BettiSummary, Failure> {
    let profile = BettiProfile::new(b.clone()).map_err(|e| Failure::Input(e.to_string()))?;
    let arch = betti_architecture(d, &profile).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(BettiSummary {
        betti: b,
        widths: arch.widths.clone(),
        architecture: arch.to_string(),
    })
}

pub fn run(ctx: &Ctx, args: &Args) -> Result<(), Failure> {
    let d = args.dim;
    if d == 0 {
        return Err(Failure::Input("dimension must be positive".into()));
    }
    let mut run = Run::new("bound", ctx.seed, &ctx.out);
    let mut summary = Summary {
        dim: d,
        simplicial: None,
        betti: None,
    };
    if let Some(h) = &args.histogram {
        summary.simplicial = Some(width(d, h.clone())?);
    }
    if let Some(b) = &args.betti {
        summary.betti = Some(betti(d, b.clone())?);
    }
    if let Some(path) = &args.geometry {
        let (file, space) = load_geometry(&mut run, path)?;
        if space.dim() != d {
            return Err(Failure::Input(format!(
                "geometry has dimension {}, --dim is {d}",
                space.dim()
            )));
        }
        match (&space, &file.geometry) {
            (Space::Complex(k), _) => {
                summary.simplicial = Some(width(d, k.dimension_histogram().counts)?);
            }
            (_, GeometrySpec::CuboidHoles { .. }) => {
                let b = file.betti.clone().ok_or_else(|| {
                    Failure::Input("cuboid geometry needs a \"betti\" field for the bound".into())
                })?;
                summary.betti = Some(betti(d, b)?);
            }
            _ => {
                return Err(Failure::Input(
                    "bounds need a simplicial complex or a cuboid with holes".into(),
                ))
            }
        }
    }

    let mut text = String::new();
    if let Some(s) = &summary.simplicial {
        text.push_str(&format!(
            "histogram {:?}\npacked {}\nmixed {}\nbound {}\n",
            s.histogram, s.packed, s.mixed, s.bound
        ));
        if let Some(n) = &s.note {
            text.push_str(&format!("note: {n}\n"));
        }
    }
    if let Some(b) = &summary.betti {
        text.push_str(&format!(
            "betti {:?}\narchitecture {}\n",
            b.betti, b.architecture
        ));
    }
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    run.add("bound.json", json);
    let written = run.commit()?;
    report(ctx, &summary, &text, &written);
    Ok(())
}
