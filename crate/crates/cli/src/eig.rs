//! `weyl-scope eig`: eigenvalues of a Hain-Lüst model or of an extension
//! `A_B` of a finite triple.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use weyl_core::io::parse_triple;
use weyl_core::Extension;
use weyl_models::hainlust::{hl_discrete_eig_near, hl_eigenvalues, HlModel, Rectangle};
use weyl_numerics::matrix_json::from_rows;
use weyl_numerics::{CMatrix, Complex64};

use crate::check::hidden_block_extension;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{Bound, Report, Tolerances};

/// Grid size of the finite-difference cross-check.
pub const FD_NODES: usize = 512;

const EIG_TOLERANCES: &[(&str, f64, Bound, &str)] =
    &[("fd_agreement", 5e-3, Bound::Below, "shooting eigenvalues agree with the finite-difference matrix")];

#[derive(Debug, Serialize)]
struct HlEigen {
    region: Rectangle,
    nodes: usize,
    eigenvalues: Vec<Complex64>,
    finite_difference: Vec<Complex64>,
}

#[derive(Debug, Serialize)]
struct TripleEigen {
    triple_id: String,
    eigenvalues: Vec<Complex64>,
}

pub fn run_eig(cfg: &RunConfig, seed: u64, tol: Option<f64>) -> Result<Report<Value>> {
    let tols = Tolerances::new(EIG_TOLERANCES, &cfg.tolerances, tol)?;
    match cfg.model_type.as_deref().unwrap_or("triple") {
        "hainlust" => {
            let model = cfg.model_as::<HlModel>()?.unwrap_or_else(HlModel::step);
            let region = match cfg.region {
                Some(r) => Rectangle::new(r.re_min, r.re_max, r.im_min, r.im_max)
                    .map_err(|e| CliError::Config(format!("region: {e}")))?,
                None => Rectangle::new(5.0, 50.0, -1.0, 1.0)?,
            };
            let nodes = cfg.nodes.unwrap_or(FD_NODES);
            let eigenvalues = hl_eigenvalues(&model, &region)?;
            let finite_difference = eigenvalues
                .iter()
                .map(|&z| hl_discrete_eig_near(&model, nodes, z))
                .collect::<Result<Vec<_>, _>>()?;
            let worst = eigenvalues.iter().zip(&finite_difference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let details = HlEigen { region, nodes, eigenvalues, finite_difference };
            let value = serde_json::to_value(&details).expect("reports serialize");
            Ok(Report::new("eig", seed, vec![tols.check("fd_agreement", worst)], value))
        }
        "triple" => {
            let ext = load_extension(cfg, seed)?;
            let details = TripleEigen { triple_id: ext.triple().id.clone(), eigenvalues: ext.spectrum()? };
            Ok(Report::new("eig", seed, Vec::new(), serde_json::to_value(&details).expect("reports serialize")))
        }
        other => Err(CliError::ModelUnknown { name: other.to_string(), known: "hainlust, triple".into() }),
    }
}

/// The triple from the config with its `b` (zero by default), or the
/// seeded hidden-block extension when no file is given.
pub fn load_extension(cfg: &RunConfig, seed: u64) -> Result<Extension> {
    let Some(text) = cfg.model_text()? else {
        return hidden_block_extension(&mut ChaCha8Rng::seed_from_u64(seed));
    };
    let tr = Arc::new(parse_triple(&text).map_err(|e| CliError::Config(format!("triple file: {e}")))?);
    let b = match &cfg.b {
        Some(rows) => from_rows(rows, tr.k()).map_err(|e| CliError::Config(format!("b: {e}")))?,
        None => CMatrix::zeros(tr.h(), tr.k()),
    };
    if b.nrows() != tr.h() {
        return Err(CliError::Config(format!("b must be {}×{}", tr.h(), tr.k())));
    }
    Ok(Extension::new(tr, b)?)
}
