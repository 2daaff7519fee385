use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polynet::constructor::MAX_CUBES;
use polynet::{lipschitz_approximator, ConstructError, LipschitzPlan, Network};
use rayon::prelude::*;
use serde::Serialize;

use super::report;
use crate::output::Run;
use crate::{Ctx, Failure};

/// Riemann grid size used to measure the error of analytic functions.
const GRID_POINTS: usize = 100_000;
/// Largest distance between an anchor and the table row used for it.
const ANCHOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    /// `1 - 2 max_i |x_i - 1/2|`.
    Hat,
    /// Same formula as `hat`, named for d_x = 2.
    Pyramid,
    /// `clamp(3 (0.45 - max_i |x_i - 1/2|), 0, 1)`.
    Plateau,
    /// `min(2 prod_i x_i, 1)`.
    Product,
    Zero,
}

impl Function {
    fn eval(self, x: &[f64]) -> f64 {
        let sup = x.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
        match self {
            Function::Hat | Function::Pyramid => 1.0 - 2.0 * sup,
            Function::Plateau => (3.0 * (0.45 - sup)).clamp(0.0, 1.0),
            Function::Product => (2.0 * x.iter().product::<f64>()).min(1.0),
            Function::Zero => 0.0,
        }
    }

    /// Euclidean Lipschitz constant on `[0,1]^d`.
    fn lipschitz(self, d: usize) -> f64 {
        match self {
            Function::Hat | Function::Pyramid => 2.0,
            Function::Plateau => 3.0,
            Function::Product => 2.0 * (d as f64).sqrt(),
            Function::Zero => 0.0,
        }
    }
}

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["table", "function"])))]
pub struct Args {
    /// CSV with columns `x1..x_dx,y1..y_dy` and a header row.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, value_enum)]
    function: Option<Function>,
    /// Lipschitz constant; required with --table.
    #[arg(long = "lipschitz", short = 'L')]
    lipschitz: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long = "dx", default_value_t = 1)]
    d_x: usize,
    #[arg(long = "dy", default_value_t = 1)]
    d_y: usize,
}

#[derive(Serialize)]
struct Summary {
    plan: LipschitzPlan,
    architecture: String,
    /// `L^p` error on the Riemann grid (analytic functions) or over the table rows.
    measured_error: f64,
    error_points: usize,
    below_target: bool,
}

struct Table {
    xs: Vec<Vec<f64>>,
    ys: Vec<Vec<f64>>,
}

fn read_table(run: &mut Run, path: &Path, d_x: usize, d_y: usize) -> Result<Table, Failure> {
    let bad = |m: String| Failure::Input(format!("{}: {m}", path.display()));
    let text = run.read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut table = Table {
        xs: Vec::new(),
        ys: Vec::new(),
    };
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        if row.len() != d_x + d_y {
            return Err(bad(format!(
                "row {} has {} columns, expected {}",
                i + 1,
                row.len(),
                d_x + d_y
            )));
        }
        let v = row
            .iter()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        table.xs.push(v[..d_x].to_vec());
        table.ys.push(v[d_x..].to_vec());
    }
    Ok(table)
}

/// Value of the table row at `x`, if one lies within `ANCHOR_TOL` in every coordinate.
fn lookup<'a>(table: &'a Table, x: &[f64]) -> Option<&'a [f64]> {
    table
        .xs
        .iter()
        .position(|r| r.iter().zip(x).all(|(a, b)| (a - b).abs() <= ANCHOR_TOL))
        .map(|i| table.ys[i].as_slice())
}

fn lp_mean(errors: impl ParallelIterator<Item = f64>, count: usize, p: f64) -> f64 {
    (errors.sum::<f64>() / count as f64).powf(1.0 / p)
}

fn grid_error(net: &Network, f: Function, d: usize, d_y: usize, p: f64) -> (f64, usize) {
    let per_axis = (GRID_POINTS as f64).powf(1.0 / d as f64).ceil() as usize;
    let total = per_axis.pow(d as u32);
    let errors = (0..total).into_par_iter().map(|i| {
        let mut rest = i;
        let mut x = vec![0.0; d];
        for k in (0..d).rev() {
            x[k] = ((rest % per_axis) as f64 + 0.5) / per_axis as f64;
            rest /= per_axis;
        }
        let y = f.eval(&x);
        let out = net.forward(&x).expect("input dimension matches");
        out.iter().map(|v| (v - y).abs().powf(p)).sum::<f64>() / d_y as f64
    });
    (lp_mean(errors, total, p), total)
}

fn table_error(net: &Network, t: &Table, p: f64) -> f64 {
    let errors = t.xs.par_iter().zip(&t.ys).map(|(x, y)| {
        let out = net.forward(x).expect("input dimension matches");
        out.iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs().powf(p))
            .sum::<f64>()
            / y.len() as f64
    });
    lp_mean(errors, t.xs.len(), p)
}

pub fn run(ctx: &Ctx, args: &Args) -> Result<(), Failure> {
    let mut run = Run::new("approx", ctx.seed, &ctx.out);
    let l = match (args.function, args.lipschitz) {
        (_, Some(l)) => l,
        (Some(f), None) => f.lipschitz(args.d_x),
        (None, None) => return Err(Failure::Input("--table needs --lipschitz".into())),
    };
    let plan =
        LipschitzPlan::new(args.d_x, args.d_y, l, args.p, args.epsilon).map_err(|e| match e {
            ConstructError::Resource(m) => Failure::Construct(m),
            other => Failure::Input(other.to_string()),
        })?;
    if plan.n_cubes > MAX_CUBES {
        return Err(Failure::Construct(format!(
            "n = delta^-d_x = {}^{} = {} cubes exceeds the limit of {MAX_CUBES}",
            plan.q, plan.d_x, plan.n_cubes
        )));
    }

    let table = match &args.table {
        Some(path) => {
            let t = read_table(&mut run, path, args.d_x, args.d_y)?;
            if let Some(a) = (0..plan.n_cubes)
                .map(|i| plan.anchor(i))
                .find(|a| lookup(&t, a).is_none())
            {
                return Err(Failure::Input(format!(
                    "table has no row at anchor {a:?}; it must cover every cube centre \
                     ((i + 1/2) / {}) per axis",
                    plan.q
                )));
            }
            Some(t)
        }
        None => None,
    };
    let target = |x: &[f64]| -> Vec<f64> {
        match (&table, args.function) {
            (Some(t), _) => lookup(t, x).expect("anchors checked").to_vec(),
            (None, Some(f)) => vec![f.eval(x); args.d_y],
            (None, None) => unreachable!("clap requires a target"),
        }
    };
    let build = lipschitz_approximator(&target, &plan).map_err(|e| match e {
        ConstructError::FunctionRange { .. } => Failure::Input(e.to_string()),
        other => Failure::Construct(other.to_string()),
    })?;
    let net = build.network;

    let (measured_error, error_points) = match (&table, args.function) {
        (Some(t), _) => (table_error(&net, t, args.p), t.xs.len()),
        (None, Some(f)) => grid_error(&net, f, args.d_x, args.d_y, args.p),
        (None, None) => unreachable!("clap requires a target"),
    };
    let summary = Summary {
        architecture: net.architecture().to_string(),
        below_target: measured_error < plan.target_eps,
        plan,
        measured_error,
        error_points,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    run.add("network.json", net.to_json());
    run.add("approx_report.json", json);
    let written = run.commit()?;
    let text = format!(
        "architecture {}\ncubes {} (delta = 1/{})\nmeasured L^{} error {} over {} points (target {})\n",
        summary.architecture,
        summary.plan.n_cubes,
        summary.plan.q,
        summary.plan.norm_p,
        summary.measured_error,
        summary.error_points,
        summary.plan.target_eps
    );
    report(ctx, &summary, &text, &written);
    Ok(())
}
