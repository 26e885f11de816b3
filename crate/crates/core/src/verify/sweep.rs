//! Aspect-ratio sweep of the 2D compaction case.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use super::compaction::{solve_compaction, CompactionCase, VerticalFrame, DEFAULT_HEIGHT};
use super::metrics::loglog_slope;
use crate::error::{Error, Result};
use crate::grid_gen::{insert_edge_midnodes, scale, twisted_cartesian};
use crate::loads::LoadMethod;
use crate::mesh::{compute_geometry, PolyMesh};
use crate::vem::Stabilization;

pub const CSV_HEADER: &str = "ar,method,stab,grid,max_err,rel_err,l2_err,slope";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepGrid {
    Cartesian,
    Twisted,
    /// Twisted, with a node added in the middle of every horizontal edge.
    ExtraNodes,
}

impl SweepGrid {
    pub fn name(&self) -> &'static str {
        match self {
            SweepGrid::Cartesian => "cartesian",
            SweepGrid::Twisted => "twisted",
            SweepGrid::ExtraNodes => "extra_nodes",
        }
    }
}

impl FromStr for SweepGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(SweepGrid::Cartesian),
            "twisted" => Ok(SweepGrid::Twisted),
            "extra_nodes" => Ok(SweepGrid::ExtraNodes),
            _ => Err(Error::Config(format!("unknown grid '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub aspect_ratios: Vec<f64>,
    pub methods: Vec<LoadMethod>,
    pub stabs: Vec<Stabilization>,
    pub grids: Vec<SweepGrid>,
    pub cells: [usize; 2],
    /// Twist amplitude as a fraction of the vertical cell size.
    pub twist: f64,
    pub height: f64,
    pub case: CompactionCase,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            aspect_ratios: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            methods: vec![LoadMethod::Projection, LoadMethod::DiscreteGradient],
            stabs: vec![Stabilization::AlphaG, Stabilization::AlphaN],
            grids: vec![SweepGrid::Twisted, SweepGrid::ExtraNodes],
            cells: [10, 10],
            twist: 0.3,
            height: DEFAULT_HEIGHT,
            case: CompactionCase::default(),
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ar: f64,
    pub method: LoadMethod,
    pub stab: Stabilization,
    pub grid: SweepGrid,
    /// Errors in the vertical displacement; `NaN` when the solve failed.
    pub max_err: f64,
    pub rel_err: f64,
    pub l2_err: f64,
    /// Log-log slope of `max_err` against the aspect ratio over the series.
    pub slope: f64,
    pub failure: Option<String>,
}

/// Sweep mesh: a square grid of side `height`, twisted, then stretched
/// horizontally by `ar`.
pub fn sweep_mesh(grid: SweepGrid, ar: f64, cells: [usize; 2], twist: f64, height: f64) -> Result<PolyMesh> {
    let amp = match grid {
        SweepGrid::Cartesian => 0.0,
        _ => twist * height / cells[1] as f64,
    };
    let mut base = twisted_cartesian(&cells, &[height, height], amp)?;
    if grid == SweepGrid::ExtraNodes {
        // classify edges before stretching
        base = insert_edge_midnodes(&base, |f| f.normal.y.abs() > f.normal.x.abs())?;
    }
    scale(&base, &[ar, 1.0])
}

fn run_one(cfg: &SweepConfig, ar: f64, method: LoadMethod, stab: Stabilization, grid: SweepGrid) -> SweepRow {
    let res = (|| {
        let mesh = sweep_mesh(grid, ar, cfg.cells, cfg.twist, cfg.height)?;
        let geom = compute_geometry(&mesh)?;
        let frame = VerticalFrame::of_mesh(&mesh, 1, true);
        solve_compaction(&mesh, &geom, &frame, &cfg.case, method, stab, cfg.tol)
    })();
    let mut row = SweepRow {
        ar,
        method,
        stab,
        grid,
        max_err: f64::NAN,
        rel_err: f64::NAN,
        l2_err: f64::NAN,
        slope: f64::NAN,
        failure: None,
    };
    match res {
        Ok(run) => {
            row.max_err = run.metrics.vert_max_abs;
            row.rel_err = run.metrics.vert_rel_max;
            row.l2_err = run.metrics.vert_l2;
        }
        Err(e) => {
            log::warn!("ar={ar} {} {} {}: {e}", method.name(), stab.name(), grid.name());
            row.failure = Some(e.to_string());
        }
    }
    row
}

/// Runs every combination in the configuration. Rows come back ordered by
/// grid, stabilization, method and then aspect ratio; a failed solve yields
/// a row of `NaN` errors instead of aborting the sweep.
pub fn aspect_ratio_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.aspect_ratios.is_empty() || cfg.methods.is_empty() || cfg.stabs.is_empty() || cfg.grids.is_empty() {
        return Err(Error::Config("empty sweep: an axis has no entries".into()));
    }
    if cfg.aspect_ratios.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err(Error::Config("aspect ratios must be positive".into()));
    }
    if cfg.cells.iter().any(|&c| c == 0) {
        return Err(Error::Config("sweep grid needs at least one cell per direction".into()));
    }
    cfg.case.validate()?;
    let mut jobs = Vec::new();
    for &grid in &cfg.grids {
        for &stab in &cfg.stabs {
            for &method in &cfg.methods {
                for &ar in &cfg.aspect_ratios {
                    jobs.push((ar, method, stab, grid));
                }
            }
        }
    }
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(ar, method, stab, grid)| run_one(cfg, ar, method, stab, grid))
        .collect();
    for series in rows.chunks_mut(cfg.aspect_ratios.len()) {
        let pts: Vec<(f64, f64)> = series.iter().map(|r| (r.ar, r.max_err)).collect();
        let slope = loglog_slope(&pts);
        for r in series.iter_mut() {
            r.slope = slope;
        }
    }
    Ok(rows)
}

/// Largest over smallest error in a series; infinite if any row failed.
pub fn growth_ratio(rows: &[&SweepRow]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for r in rows {
        if !r.max_err.is_finite() {
            return f64::INFINITY;
        }
        lo = lo.min(r.max_err);
        hi = hi.max(r.max_err);
    }
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:e},{:e},{:e},{}",
            r.ar,
            r.method.name(),
            r.stab.name(),
            r.grid.name(),
            r.max_err,
            r.rel_err,
            r.l2_err,
            r.slope
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            aspect_ratios: vec![1.0, 10.0],
            methods: vec![LoadMethod::Projection],
            stabs: vec![Stabilization::AlphaG],
            grids: vec![SweepGrid::Twisted],
            cells: [4, 4],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn csv_shape() {
        let rows = aspect_ratio_sweep(&small()).unwrap();
        assert_eq!(rows.len(), 2);
        let csv = rows_to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,projection,alpha_g,twisted,"));
        assert!(rows.iter().all(|r| r.max_err.is_finite() && r.slope.is_finite()));
    }

    #[test]
    fn cartesian_sweep_is_exact() {
        let cfg = SweepConfig {
            grids: vec![SweepGrid::Cartesian],
            ..small()
        };
        for r in aspect_ratio_sweep(&cfg).unwrap() {
            assert!(r.rel_err < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn empty_axis_rejected() {
        let cfg = SweepConfig {
            methods: vec![],
            ..small()
        };
        assert!(matches!(aspect_ratio_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn growth_ratio_of_failed_row() {
        let mut rows = aspect_ratio_sweep(&small()).unwrap();
        rows[1].max_err = f64::NAN;
        let refs: Vec<&SweepRow> = rows.iter().collect();
        assert!(growth_ratio(&refs).is_infinite());
    }

    #[test]
    fn extra_node_mesh_has_more_nodes() {
        let a = sweep_mesh(SweepGrid::Twisted, 5.0, [4, 4], 0.3, 15.0).unwrap();
        let b = sweep_mesh(SweepGrid::ExtraNodes, 5.0, [4, 4], 0.3, 15.0).unwrap();
        assert_eq!(b.n_nodes(), a.n_nodes() + 4 * 5);
        let (lo, hi) = b.bounding_box();
        assert!((hi.x - lo.x - 75.0).abs() < 1e-12);
    }
}
