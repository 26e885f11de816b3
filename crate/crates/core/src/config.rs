//! TOML run configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid_gen::{
    build_cornerpoint, flip_vertical, insert_edge_midnodes, pad_embed, parse_grdecl, scale, triangulate_faces,
    twisted_cartesian, CornerPointSpec, LayeredModel,
};
use crate::loads::LoadMethod;
use crate::mesh::PolyMesh;
use crate::vem::Stabilization;
use crate::verify::compaction::{CompactionCase, CompactionLoad, VerticalFrame, DEFAULT_GRAVITY, DEFAULT_DENSITY};
use crate::verify::sweep::{SweepConfig, SweepGrid};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: Option<GridConfig>,
    pub material: Option<MaterialConfig>,
    #[serde(default)]
    pub load: LoadConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub sweep: Option<SweepSection>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Cartesian,
    Twisted,
    Layered,
    Grdecl,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridKind,
    #[serde(default)]
    pub cells: Vec<usize>,
    #[serde(default)]
    pub lengths: Vec<f64>,
    /// Twist amplitude in units of the vertical cell size.
    #[serde(default)]
    pub twist: f64,
    #[serde(default)]
    pub extra_nodes: bool,
    /// Horizontal stretch applied after generation.
    #[serde(default = "one")]
    pub aspect_ratio: f64,
    #[serde(default)]
    pub triangulate: bool,
    #[serde(default)]
    pub flip: bool,
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub pad: usize,
    #[serde(default)]
    pub tilt: f64,
    #[serde(default)]
    pub horizon_amplitude: f64,
    pub eroded_layer: Option<usize>,
    #[serde(default)]
    pub fault_throw: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub young: f64,
    pub poisson: f64,
    #[serde(default = "default_density")]
    pub density: f64,
}

fn default_density() -> f64 {
    DEFAULT_DENSITY
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    #[default]
    Gravity,
    TopTraction,
    None,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    #[serde(default)]
    pub kind: LoadKind,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    /// Normal stress on the top surface (Pa), negative in compression.
    #[serde(default)]
    pub traction: f64,
    #[serde(default = "default_method")]
    pub method: String,
}

fn default_gravity() -> f64 {
    DEFAULT_GRAVITY
}

fn default_method() -> String {
    "projection".into()
}

impl Default for LoadConfig {
    fn default() -> Self {
        Self {
            kind: LoadKind::Gravity,
            gravity: DEFAULT_GRAVITY,
            traction: 0.0,
            method: default_method(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Clamped bottom, rolling sides, free or loaded top.
    #[default]
    Compaction,
    None,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub kind: BoundaryKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_stab")]
    pub stabilization: String,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_stab() -> String {
    "alpha_g".into()
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            stabilization: default_stab(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_prefix")]
    pub prefix: String,
    #[serde(default = "yes")]
    pub vtk: bool,
}

fn default_prefix() -> String {
    "polyvem".into()
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            prefix: default_prefix(),
            vtk: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub aspect_ratios: Vec<f64>,
    #[serde(default = "default_sweep_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_sweep_stabs")]
    pub stabilizations: Vec<String>,
    #[serde(default = "default_sweep_grids")]
    pub grids: Vec<String>,
    #[serde(default = "default_sweep_cells")]
    pub cells: [usize; 2],
    #[serde(default = "default_sweep_twist")]
    pub twist: f64,
    #[serde(default = "default_sweep_height")]
    pub height: f64,
}

fn default_sweep_methods() -> Vec<String> {
    vec!["projection".into(), "dgrad".into()]
}

fn default_sweep_stabs() -> Vec<String> {
    vec!["alpha_g".into(), "alpha_n".into()]
}

fn default_sweep_grids() -> Vec<String> {
    vec!["twisted".into(), "extra_nodes".into()]
}

fn default_sweep_cells() -> [usize; 2] {
    SweepConfig::default().cells
}

fn default_sweep_twist() -> f64 {
    SweepConfig::default().twist
}

fn default_sweep_height() -> f64 {
    SweepConfig::default().height
}

fn parse_list<T, F>(key: &str, items: &[String], f: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Result<T>,
{
    items
        .iter()
        .map(|s| f(s).map_err(|e| Error::Config(format!("{key}: {e}"))))
        .collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Checks every field that does not need the mesh.
    pub fn validate(&self) -> Result<()> {
        self.load_method()?;
        self.stabilization()?;
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            return Err(Error::Config("solver.tol must lie in (0, 1)".into()));
        }
        if let Some(m) = &self.material {
            if !(m.young > 0.0 && m.density > 0.0 && m.poisson > -1.0 && m.poisson < 0.5) {
                return Err(Error::Config("material: need young > 0, density > 0, -1 < poisson < 0.5".into()));
            }
        }
        if !(self.load.gravity > 0.0) {
            return Err(Error::Config("load.gravity must be positive".into()));
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(s) = &self.sweep {
            if s.aspect_ratios.is_empty() {
                return Err(Error::Config("empty sweep: sweep.aspect_ratios has no entries".into()));
            }
        }
        Ok(())
    }

    pub fn load_method(&self) -> Result<LoadMethod> {
        self.load.method.parse().map_err(|e| Error::Config(format!("load.method: {e}")))
    }

    pub fn stabilization(&self) -> Result<Stabilization> {
        self.solver
            .stabilization
            .parse()
            .map_err(|e| Error::Config(format!("solver.stabilization: {e}")))
    }

    pub fn material(&self) -> Result<&MaterialConfig> {
        self.material
            .as_ref()
            .ok_or_else(|| Error::Config("missing [material] section".into()))
    }

    pub fn grid(&self) -> Result<&GridConfig> {
        self.grid
            .as_ref()
            .ok_or_else(|| Error::Config("missing [grid] section".into()))
    }

    pub fn case(&self) -> Result<CompactionCase> {
        let m = self.material()?;
        let load = match self.load.kind {
            LoadKind::Gravity => CompactionLoad::Gravity,
            LoadKind::TopTraction => CompactionLoad::TopTraction(self.load.traction),
            LoadKind::None => CompactionLoad::TopTraction(0.0),
        };
        Ok(CompactionCase {
            density: m.density,
            gravity: self.load.gravity,
            young: m.young,
            poisson: m.poisson,
            load,
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
        if s.aspect_ratios.is_empty() {
            return Err(Error::Config("empty sweep: sweep.aspect_ratios has no entries".into()));
        }
        let mut case = CompactionCase::default();
        if let Some(m) = &self.material {
            case.young = m.young;
            case.poisson = m.poisson;
            case.density = m.density;
        }
        case.gravity = self.load.gravity;
        Ok(SweepConfig {
            aspect_ratios: s.aspect_ratios.clone(),
            methods: parse_list("sweep.methods", &s.methods, str::parse)?,
            stabs: parse_list("sweep.stabilizations", &s.stabilizations, str::parse)?,
            grids: parse_list("sweep.grids", &s.grids, str::parse::<SweepGrid>)?,
            cells: s.cells,
            twist: s.twist,
            height: s.height,
            case,
            tol: self.solver.tol,
        })
    }
}

impl GridConfig {
    fn validate(&self) -> Result<()> {
        let need_dims = matches!(self.kind, GridKind::Cartesian | GridKind::Twisted | GridKind::Layered);
        if need_dims {
            let d = self.cells.len();
            let three = self.kind == GridKind::Layered;
            if !((d == 2 && !three) || d == 3) || self.lengths.len() != d {
                return Err(Error::Config(format!(
                    "grid: cells and lengths need {} entries each",
                    if three { "3" } else { "2 or 3" }
                )));
            }
            if self.cells.contains(&0) || self.lengths.iter().any(|l| !(*l > 0.0)) {
                return Err(Error::Config("grid: cells and lengths must be positive".into()));
            }
        }
        if self.kind == GridKind::Grdecl && self.path.is_none() {
            return Err(Error::Config("grid.path is required for kind = \"grdecl\"".into()));
        }
        if !(self.aspect_ratio > 0.0) {
            return Err(Error::Config("grid.aspect_ratio must be positive".into()));
        }
        if self.twist < 0.0 {
            return Err(Error::Config("grid.twist must be non-negative".into()));
        }
        Ok(())
    }

    fn cornerpoint_spec(&self, base_dir: &Path) -> Result<CornerPointSpec> {
        let spec = match self.kind {
            GridKind::Grdecl => {
                let p = base_dir.join(self.path.as_ref().expect("validated"));
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| Error::Config(format!("grid.path {}: {e}", p.display())))?;
                parse_grdecl(&text)?
            }
            _ => {
                let mut lm = LayeredModel::new(
                    [self.cells[0], self.cells[1], self.cells[2]],
                    [self.lengths[0], self.lengths[1], self.lengths[2]],
                );
                lm.pillar_tilt = self.tilt;
                lm.horizon_amplitude = self.horizon_amplitude;
                lm.eroded_layer = self.eroded_layer;
                lm.fault_throw = self.fault_throw;
                lm.spec()?
            }
        };
        if self.pad > 0 {
            pad_embed(&spec, self.pad)
        } else {
            Ok(spec)
        }
    }

    /// Builds the mesh and its vertical frame. Generated Cartesian grids
    /// point up; corner-point grids use depth until flipped.
    pub fn build(&self, base_dir: &Path) -> Result<(PolyMesh, VerticalFrame)> {
        let (mut mesh, depth) = match self.kind {
            GridKind::Cartesian | GridKind::Twisted => {
                let d = self.cells.len();
                let amp = if self.kind == GridKind::Twisted {
                    self.twist * self.lengths[d - 1] / self.cells[d - 1] as f64
                } else {
                    0.0
                };
                (twisted_cartesian(&self.cells, &self.lengths, amp)?, false)
            }
            GridKind::Layered | GridKind::Grdecl => (build_cornerpoint(&self.cornerpoint_spec(base_dir)?)?, true),
        };
        let d = mesh.dim();
        if self.extra_nodes {
            mesh = insert_edge_midnodes(&mesh, |f| f.normal.y.abs() > f.normal.x.abs())?;
        }
        if self.aspect_ratio != 1.0 {
            let mut f = vec![self.aspect_ratio; d];
            f[d - 1] = 1.0;
            mesh = scale(&mesh, &f)?;
        }
        if self.triangulate {
            mesh = triangulate_faces(&mesh)?;
        }
        if self.flip {
            mesh = flip_vertical(&mesh, d - 1)?;
        }
        let up = depth == self.flip;
        let frame = VerticalFrame::of_mesh(&mesh, d - 1, up);
        Ok((mesh, frame))
    }
}
