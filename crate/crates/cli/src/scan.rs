//! Registry behind `weyl-scope scan`: M-function tables on a grid of
//! nonreal λ, one CSV row per point.

use rayon::prelude::*;
use rayon::ThreadPool;
use weyl_models::firstorder::{fo_m, fo_resolvent_norm, FoModel};
use weyl_models::friedrichs::{fr_m_scan, hardy_unit, FriedrichsModel};
use weyl_models::hainlust::{hl_discretize, BorderedRow, HlModel, DEFAULT_SCAN_NODES};
use weyl_numerics::Complex64;

use crate::config::{GridConfig, RunConfig};
use crate::error::{CliError, Result};
use crate::table::Table;

pub const THREADS_ENV: &str = "WEYL_SCOPE_THREADS";

/// Quadrature nodes for the first-order resolvent norm.
pub const FIRSTORDER_NORM_NODES: usize = 4096;

pub trait ScanModel: Sync {
    fn name(&self) -> &'static str;
    fn header(&self) -> Vec<&'static str>;
    fn default_grid(&self) -> GridConfig;
    /// One row per grid point, in grid order.
    fn rows(&self, cfg: &RunConfig, grid: &[Complex64], pool: &ThreadPool) -> Result<Vec<Vec<f64>>>;
}

pub fn scan_models() -> Vec<Box<dyn ScanModel>> {
    vec![Box::new(HainLust), Box::new(Friedrichs), Box::new(FirstOrder)]
}

pub fn find_scan_model(name: &str) -> Result<Box<dyn ScanModel>> {
    let all = scan_models();
    let known = all.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ");
    all.into_iter()
        .find(|m| m.name() == name)
        .ok_or_else(|| CliError::ModelUnknown { name: name.to_string(), known })
}

/// A pool sized by `WEYL_SCOPE_THREADS`, or rayon's default when unset.
pub fn thread_pool() -> Result<ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

pub fn run_scan(cfg: &RunConfig) -> Result<Table> {
    let name = cfg.model_type.as_deref().ok_or_else(|| CliError::Config("`model_type` is required".into()))?;
    let model = find_scan_model(name)?;
    let grid = cfg.grid.clone().unwrap_or_else(|| model.default_grid()).points();
    let pool = thread_pool()?;
    let mut table = Table::new(model.header());
    for row in model.rows(cfg, &grid, &pool)? {
        table.push(row);
    }
    Ok(table)
}

fn par_rows<F>(grid: &[Complex64], pool: &ThreadPool, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(Complex64) -> Result<Vec<f64>> + Sync,
{
    pool.install(|| grid.par_iter().map(|&l| f(l)).collect())
}

struct HainLust;

impl ScanModel for HainLust {
    fn name(&self) -> &'static str {
        "hainlust"
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "re_lambda",
            "im_lambda",
            "m11_re",
            "m11_im",
            "m12_re",
            "m12_im",
            "m21_re",
            "m21_im",
            "m22_re",
            "m22_im",
            "denom_abs",
            "full_jump",
            "bordered_jump",
        ]
    }

    /// 200 real parts in `[0.5, 4.5]` times `Im λ = 10^-j`, `j = 0..8`.
    fn default_grid(&self) -> GridConfig {
        GridConfig { re_min: 0.5, re_max: 4.5, re_count: 200, im: (0..9).map(|j| 10f64.powi(-j)).collect() }
    }

    fn rows(&self, cfg: &RunConfig, grid: &[Complex64], pool: &ThreadPool) -> Result<Vec<Vec<f64>>> {
        let model = cfg.model_as::<HlModel>()?.unwrap_or_else(HlModel::step);
        let disc = hl_discretize(&model, cfg.nodes.unwrap_or(DEFAULT_SCAN_NODES))?;
        par_rows(grid, pool, |l| {
            let r = BorderedRow::compute(&model, &disc, l)?;
            let mut row = vec![l.re, l.im];
            row.extend(r.m.iter().flat_map(|z| [z.re, z.im]));
            row.extend([r.denom_abs, r.full_jump, r.bordered_jump]);
            Ok(row)
        })
    }
}

struct Friedrichs;

impl ScanModel for Friedrichs {
    fn name(&self) -> &'static str {
        "friedrichs"
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["re_lambda", "im_lambda", "re_M", "im_M", "abs_D", "bracket_abs"]
    }

    /// 81 real parts in `[−4, 4]` times `Im λ ∈ {±1, ±10^-3, ±10^-6}`.
    fn default_grid(&self) -> GridConfig {
        GridConfig { re_min: -4.0, re_max: 4.0, re_count: 81, im: vec![1.0, 1e-3, 1e-6, -1e-6, -1e-3, -1.0] }
    }

    fn rows(&self, cfg: &RunConfig, grid: &[Complex64], pool: &ThreadPool) -> Result<Vec<Vec<f64>>> {
        let model = match cfg.model_as::<FriedrichsModel>()? {
            Some(m) => m,
            None => FriedrichsModel::new(hardy_unit(), hardy_unit(), Complex64::new(0.0, 0.0))?,
        };
        par_rows(grid, pool, |l| {
            let r = fr_m_scan(&model, &[l])?[0];
            Ok(vec![l.re, l.im, r.m.re, r.m.im, r.abs_d, r.bracket_abs])
        })
    }
}

struct FirstOrder;

impl ScanModel for FirstOrder {
    fn name(&self) -> &'static str {
        "firstorder"
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["re_lambda", "im_lambda", "resolvent_norm", "m_value_re", "m_value_im"]
    }

    /// `λ = 1 − i 2^-j`, `j = 1..12`.
    fn default_grid(&self) -> GridConfig {
        GridConfig { re_min: 1.0, re_max: 1.0, re_count: 1, im: (1..=12).map(|j| -(2f64.powi(-j))).collect() }
    }

    fn rows(&self, cfg: &RunConfig, grid: &[Complex64], pool: &ThreadPool) -> Result<Vec<Vec<f64>>> {
        let model = cfg.model_as::<FoModel>()?.unwrap_or_default();
        let nodes = cfg.nodes.unwrap_or(FIRSTORDER_NORM_NODES);
        par_rows(grid, pool, |l| {
            let m = fo_m(&model, l);
            Ok(vec![l.re, l.im, fo_resolvent_norm(l, nodes)?, m.re, m.im])
        })
    }
}
