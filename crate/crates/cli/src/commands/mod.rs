pub mod approx;
pub mod bound;
pub mod build;
pub mod train;
pub mod verify;

use std::path::{Path, PathBuf};

use polynet::geometry::spec_file::GeometryFile;
use polynet::Space;
use serde::Serialize;

use crate::output::Run;
use crate::{Ctx, Failure};

pub fn load_geometry(run: &mut Run, path: &Path) -> Result<(GeometryFile, Space), Failure> {
    let text = run.read(path)?;
    let file = GeometryFile::parse(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let space = file
        .geometry
        .to_space()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((file, space))
}

/// `--epsilon` wins over the geometry file's `epsilon`.
pub fn resolve_eps(flag: Option<f64>, file: &GeometryFile) -> Result<f64, Failure> {
    let eps = flag.or(file.epsilon).ok_or_else(|| {
        Failure::Input("no shell width: pass --epsilon or set \"epsilon\" in the geometry".into())
    })?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Failure::Input(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    Ok(eps)
}

/// Prints `summary` as JSON, or `text` followed by the written paths.
pub fn report<T: Serialize>(ctx: &Ctx, summary: &T, text: &str, written: &[PathBuf]) {
    if ctx.json {
        println!(
            "{}",
            serde_json::to_string_pretty(summary).expect("summary serializes")
        );
    } else {
        print!("{text}");
        for p in written {
            println!("wrote {}", p.display());
        }
    }
}
