use std::path::{Path, PathBuf};

use polynet::trainer::{
    init, lattice_dataset, loss_curve_csv, perturb, prediction_grid_csv, train, zero_lines,
    zero_lines_csv, Dataset, InitScheme, Loss, TrainConfig,
};
use polynet::{Activation, Architecture, AxisBox, Network, TrainError};
use serde::{Deserialize, Serialize};

use super::{load_geometry, report};
use crate::output::Run;
use crate::{Ctx, Failure};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Training configuration (JSON); relative paths inside it resolve
    /// against its directory.
    config: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxConfig {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchConfig {
    widths: Vec<usize>,
    /// One tag per layer; all ReLU when omitted.
    #[serde(default)]
    activations: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    loss: Loss,
    learning_rate: f64,
    epochs: usize,
    init: String,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    early_stop: Option<f64>,
    #[serde(default)]
    geometry: Option<PathBuf>,
    #[serde(default)]
    resolution: Option<usize>,
    #[serde(default, rename = "box")]
    bounds: Option<BoxConfig>,
    /// CSV with columns `x1..xd,label`.
    #[serde(default)]
    dataset: Option<PathBuf>,
    #[serde(default)]
    architecture: Option<ArchConfig>,
    #[serde(default)]
    manual_network: Option<PathBuf>,
    /// Standard deviation of Gaussian noise added to the initial weights.
    #[serde(default)]
    perturb: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    architecture: String,
    init: String,
    seed: u64,
    samples: usize,
    positives: usize,
    epochs_run: usize,
    initial_loss: f64,
    final_loss: f64,
    outputs: Vec<PathBuf>,
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn train_err(e: TrainError) -> Failure {
    match e {
        TrainError::Diverged { epoch, .. } => {
            Failure::Diverged(format!("loss became non-finite at epoch {epoch}"))
        }
        other => Failure::Input(other.to_string()),
    }
}

fn read_dataset(run: &mut Run, path: &Path) -> Result<Dataset, Failure> {
    let text = run.read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let values = row
            .iter()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        let Some((label, x)) = values.split_last() else {
            return Err(bad(format!("{}: row {} is empty", path.display(), i + 1)));
        };
        if x.is_empty() {
            return Err(bad(format!(
                "{}: row {} has no coordinates",
                path.display(),
                i + 1
            )));
        }
        points.push(x.to_vec());
        labels.push(*label);
    }
    if points.is_empty() {
        return Err(bad(format!("{}: no rows", path.display())));
    }
    if let Some(p) = points.iter().find(|p| p.len() != points[0].len()) {
        return Err(bad(format!(
            "{}: rows of {} and {} coordinates",
            path.display(),
            points[0].len(),
            p.len()
        )));
    }
    Dataset::new(points, labels).map_err(train_err)
}

fn architecture(cfg: &ArchConfig) -> Result<Architecture, Failure> {
    let acts = match &cfg.activations {
        None => vec![Activation::Relu; cfg.widths.len().saturating_sub(1)],
        Some(tags) => tags
            .iter()
            .map(|t| Activation::parse(t).ok_or_else(|| bad(format!("unknown activation {t:?}"))))
            .collect::<Result<_, _>>()?,
    };
    Architecture::new(cfg.widths.clone(), acts).map_err(|e| bad(e.to_string()))
}

pub fn run(ctx: &Ctx, args: &Args) -> Result<(), Failure> {
    let mut run = Run::new("train", ctx.seed, &ctx.out);
    let text = run.read(&args.config)?;
    let cfg: Config =
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let seed = cfg.seed.unwrap_or(ctx.seed);

    let data = match (&cfg.geometry, &cfg.dataset) {
        (Some(g), None) => {
            let (_, space) = load_geometry(&mut run, &base.join(g))?;
            let d = space.dim();
            let bx = match &cfg.bounds {
                Some(b) => AxisBox::new(b.min.clone(), b.max.clone()),
                None => AxisBox::new(vec![-20.0; d], vec![20.0; d]),
            }
            .map_err(|e| bad(e.to_string()))?;
            let resolution = cfg
                .resolution
                .ok_or_else(|| bad("a geometry dataset needs \"resolution\""))?;
            lattice_dataset(&space, &bx, resolution).map_err(train_err)?
        }
        (None, Some(path)) => read_dataset(&mut run, &base.join(path))?,
        _ => return Err(bad("give exactly one of \"geometry\" and \"dataset\"")),
    };

    let scheme = match cfg.init.as_str() {
        "manual" => {
            let path = cfg
                .manual_network
                .as_ref()
                .ok_or_else(|| bad("init \"manual\" needs \"manual_network\""))?;
            let path = base.join(path);
            let net = Network::from_json(&run.read(&path)?)
                .map_err(|e| bad(format!("{}: {e}", path.display())))?;
            InitScheme::Manual(net)
        }
        tag => InitScheme::parse(tag).ok_or_else(|| bad(format!("unknown init scheme {tag:?}")))?,
    };
    let arch = match (&scheme, &cfg.architecture) {
        (InitScheme::Manual(net), None) => net.architecture(),
        (_, Some(a)) => architecture(a)?,
        (_, None) => return Err(bad(format!("init {:?} needs \"architecture\"", cfg.init))),
    };
    let mut net = init(&arch, &scheme, seed).map_err(train_err)?;
    if let Some(std) = cfg.perturb {
        if !(std >= 0.0 && std.is_finite()) {
            return Err(bad(format!("perturb must be a nonnegative std, got {std}")));
        }
        net = perturb(&net, std, seed);
    }

    let mut tc = TrainConfig::new(cfg.loss, cfg.learning_rate, cfg.epochs, scheme, seed);
    tc.early_stop = cfg.early_stop;
    let (trained, curve) = train(&net, &data, &tc).map_err(train_err)?;

    run.add("network.json", trained.to_json());
    run.add("loss_curve.csv", loss_curve_csv(&curve));
    if trained.input_dim() == 2 {
        run.add("zero_lines.csv", zero_lines_csv(&zero_lines(&trained)));
        run.add(
            "predictions.csv",
            prediction_grid_csv(&trained, &data.points).map_err(train_err)?,
        );
    }
    let written = run.commit()?;

    let summary = Summary {
        architecture: trained.architecture().to_string(),
        init: cfg.init.clone(),
        seed,
        samples: data.len(),
        positives: data.positives(),
        epochs_run: curve.len() - 1,
        initial_loss: curve[0],
        final_loss: *curve.last().expect("curve has the initial loss"),
        outputs: written.clone(),
    };
    let text = format!(
        "architecture {}\nsamples {} ({} positive)\nepochs {}\nloss {} -> {}\n",
        summary.architecture,
        summary.samples,
        summary.positives,
        summary.epochs_run,
        summary.initial_loss,
        summary.final_loss
    );
    report(ctx, &summary, &text, &written);
    Ok(())
}
