//! `weyl-scope contour`: bordered and full resolvent contour integrals.

use weyl_core::io::ContourReport;
use weyl_core::spaces::{detection_spaces, morera_residual, SamplingSpec};

use crate::check::{dims_of, isolating_contour, HIDDEN_EIGENVALUE};
use crate::config::RunConfig;
use crate::eig::load_extension;
use crate::error::{CliError, Result};

/// Without a triple file this runs on the seeded hidden-block triple with
/// a circle around its hidden eigenvalue.
pub fn run_contour(cfg: &RunConfig, seed: u64) -> Result<ContourReport> {
    let ext = load_extension(cfg, seed)?;
    let contour = match (cfg.contour, cfg.model.is_some()) {
        (Some(c), _) => c,
        (None, false) => isolating_contour(&ext, HIDDEN_EIGENVALUE, 128)?,
        (None, true) => return Err(CliError::Config("`contour` is required with a triple file".into())),
    };
    let spaces = detection_spaces(&ext, &SamplingSpec::default_for(&ext)?)?;
    let out = morera_residual(&ext, &contour, &spaces.s_adjoint.basis, &spaces.s.basis)?;
    Ok(ContourReport {
        triple_id: ext.triple().id.clone(),
        contour,
        residual_bordered: out.bordered,
        residual_full: out.full,
        dims: dims_of(&spaces),
    })
}
