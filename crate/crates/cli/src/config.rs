//! Run configuration: command-line flags over a TOML file over defaults.
//!
//! Config file keys (all optional):
//!
//! ```toml
//! metric = "gauge"          # euclidean | gauge | cc
//! p = 2.0
//! n = 1
//! grid = 400                # quadrature size (quotient) or scan size (verify)
//! eps_list = [0.2, 0.1, 0.05]
//! t_scale = [1e-2, 1e-3]
//! q1 = 0.05                 # normal cutoff
//! q2 = 1.0
//! R_max = 3.0
//! T_max = 2.0
//! seed = 0
//! point = [1.0, 0.0, 3.0]
//!
//! [domain]
//! type = "polytope"         # halfspace | torus | polytope | cube
//! R = 10.0
//! rho = 1.0
//! bounding_box = [[-2, 2], [-2, 2], [-3, 3]]
//! faces = [
//!   { anchor = [0.3, 0.0, -1.0], orientation = "upper" },
//!   { normal = [1.0, 0.0], offset = -1.5 },
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use subhardy::boundary::{ConvexPolytope, HalfSpace, Metric, Orientation};
use subhardy::group::HeisenbergPoint;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Halfspace,
    Torus,
    Polytope,
    Cube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cube,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Uncertainty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FaceSpec {
    Anchored {
        anchor: Vec<f64>,
        #[serde(default = "upper")]
        orientation: Orientation,
    },
    Vertical {
        normal: Vec<f64>,
        offset: f64,
    },
}

fn upper() -> Orientation {
    Orientation::Upper
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    #[serde(rename = "type")]
    pub kind: Option<DomainKind>,
    pub n: Option<usize>,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    pub rho: Option<f64>,
    pub faces: Option<Vec<FaceSpec>>,
    pub bounding_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub domain: Option<DomainFile>,
    pub metric: Option<Metric>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub eps_list: Option<Vec<f64>>,
    pub t_scale: Option<OneOrMany>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    #[serde(rename = "R_min")]
    pub r_min: Option<f64>,
    #[serde(rename = "R_max")]
    pub r_max: Option<f64>,
    #[serde(rename = "T_min")]
    pub t_min: Option<f64>,
    #[serde(rename = "T_max")]
    pub t_max: Option<f64>,
    pub max_error: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub v_scale: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub mode: Option<Mode>,
    pub check: Option<Check>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` defers to the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub domain: Option<DomainKind>,
    pub metric: Option<Metric>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub big_r: Option<f64>,
    pub rho: Option<f64>,
    pub grid: Option<usize>,
    pub eps_list: Option<Vec<f64>>,
    pub t_scale: Option<Vec<f64>>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub max_error: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub v_scale: Option<f64>,
    pub point: Option<PointSpec>,
    pub mode: Option<Mode>,
    pub check: Option<Check>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

/// A point as flat coordinates `x₁..xₙ, y₁..yₙ, t` or as `r=…,t=…`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Flat(Vec<f64>),
    Cyl { r: f64, t: f64 },
}

impl std::str::FromStr for PointSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.contains('=')) {
            let (mut r, mut t) = (None, None);
            for part in parts {
                let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
                let v: f64 = v.parse().map_err(|_| format!("bad number `{v}`"))?;
                match k {
                    "r" => r = Some(v),
                    "t" => t = Some(v),
                    other => return Err(format!("unknown coordinate `{other}` (use r and t)")),
                }
            }
            match (r, t) {
                (Some(r), Some(t)) => Ok(PointSpec::Cyl { r, t }),
                _ => Err("need both r= and t=".into()),
            }
        } else {
            parts
                .iter()
                .map(|p| p.parse::<f64>().map_err(|_| format!("bad number `{p}`")))
                .collect::<Result<Vec<_>, _>>()
                .map(PointSpec::Flat)
        }
    }
}

impl PointSpec {
    pub fn to_point(&self, n: usize) -> Result<HeisenbergPoint<f64>, Failure> {
        match self {
            PointSpec::Flat(v) => {
                if v.len() != 2 * n + 1 {
                    return Err(Failure::Config(format!(
                        "point has {} coordinates, expected {} for n = {n}",
                        v.len(),
                        2 * n + 1
                    )));
                }
                Ok(HeisenbergPoint::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n])?)
            }
            PointSpec::Cyl { r, t } => {
                if *r < 0.0 {
                    return Err(Failure::Config("r must be nonnegative".into()));
                }
                let mut x = vec![0.0; n];
                x[0] = *r;
                Ok(HeisenbergPoint::new(x, vec![0.0; n], *t)?)
            }
        }
    }

    /// `n` implied by the number of flat coordinates.
    fn implied_n(&self) -> Option<usize> {
        match self {
            PointSpec::Flat(v) if v.len() % 2 == 1 => Some(v.len() / 2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainConfig {
    #[serde(rename = "type")]
    pub kind: DomainKind,
    pub n: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub rho: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bounding_box: Vec<[f64; 2]>,
}

impl DomainConfig {
    pub fn polytope(&self) -> Result<ConvexPolytope<f64>, Failure> {
        if self.kind == DomainKind::Cube {
            return Ok(ConvexPolytope::unit_cube(self.n));
        }
        if self.faces.is_empty() {
            return Err(Failure::Config("polytope domain needs `faces`".into()));
        }
        let n = self.n;
        let faces = self
            .faces
            .iter()
            .map(|f| match f {
                FaceSpec::Anchored { anchor, orientation } => {
                    let a = PointSpec::Flat(anchor.clone()).to_point(n)?;
                    Ok(HalfSpace::anchored(a, *orientation))
                }
                FaceSpec::Vertical { normal, offset } => Ok(HalfSpace::vertical(normal.clone(), *offset)?),
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let bbox = self.bounding_box.iter().map(|b| (b[0], b[1])).collect();
        Ok(ConvexPolytope::new(faces, bbox)?)
    }
}

/// The fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: DomainConfig,
    pub metric: Metric,
    pub p: f64,
    pub n: usize,
    pub grid: usize,
    pub eps_list: Vec<f64>,
    pub t_scale: Vec<f64>,
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "R_min")]
    pub r_min: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "T_min")]
    pub t_min: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
    pub max_error: f64,
    pub seed: u64,
    pub samples: usize,
    pub v_scale: f64,
    pub point: Option<PointSpec>,
    pub mode: Mode,
    pub check: Option<Check>,
    pub format: Format,
    pub output_path: Option<String>,
    /// Not echoed: results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(command: &str, cli: Overrides, file: FileConfig) -> Result<Self, Failure> {
        let fd = file.domain.clone().unwrap_or_default();
        let point = cli.point.or(file.point.map(PointSpec::Flat));
        let n = cli
            .n
            .or(file.n)
            .or(fd.n)
            .or_else(|| point.as_ref().and_then(PointSpec::implied_n))
            .unwrap_or(1);
        if n == 0 {
            return Err(Failure::Config("n must be at least 1".into()));
        }
        let kind = cli.domain.or(fd.kind).unwrap_or(DomainKind::Halfspace);
        let metric = cli.metric.or(file.metric).unwrap_or(match kind {
            DomainKind::Torus | DomainKind::Cube => Metric::Euclidean,
            _ => Metric::Gauge,
        });
        let grid_default = if command == "verify" { 200 } else { 400 };
        // the torus support stays off the core circle
        let q2_default = if kind == DomainKind::Torus { 0.9 } else { 1.0 };
        let (r_default, t_default) = if command == "verify" { ((0.1, 5.0), (0.1, 5.0)) } else { ((0.2, 3.0), (0.0, 2.0)) };
        let cfg = RunConfig {
            command: command.to_string(),
            domain: DomainConfig {
                kind,
                n,
                big_r: cli.big_r.or(fd.big_r).unwrap_or(10.0),
                rho: cli.rho.or(fd.rho).unwrap_or(1.0),
                faces: fd.faces.unwrap_or_default(),
                bounding_box: fd.bounding_box.unwrap_or_default(),
            },
            metric,
            p: cli.p.or(file.p).unwrap_or(2.0),
            n,
            grid: cli.grid.or(file.grid).unwrap_or(grid_default),
            eps_list: cli.eps_list.or(file.eps_list).unwrap_or_else(|| vec![0.2, 0.1, 0.05]),
            t_scale: cli
                .t_scale
                .or(file.t_scale.map(OneOrMany::into_vec))
                .unwrap_or_else(|| vec![1e-2, 1e-3]),
            q1: cli.q1.or(file.q1).unwrap_or(0.05),
            q2: cli.q2.or(file.q2).unwrap_or(q2_default),
            r_min: cli.r_min.or(file.r_min).unwrap_or(r_default.0),
            r_max: cli.r_max.or(file.r_max).unwrap_or(r_default.1),
            t_min: cli.t_min.or(file.t_min).unwrap_or(t_default.0),
            t_max: cli.t_max.or(file.t_max).unwrap_or(t_default.1),
            max_error: cli.max_error.or(file.max_error).unwrap_or(1e-3),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            samples: cli.samples.or(file.samples).unwrap_or(100_000),
            v_scale: cli.v_scale.or(file.v_scale).unwrap_or(0.5),
            point,
            mode: cli.mode.or(file.mode).unwrap_or(Mode::Cube),
            check: cli.check.or(file.check),
            format: cli.format.or(file.format).unwrap_or(Format::Json),
            output_path: cli.out.or(file.out),
            threads: cli.threads.or(file.threads),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: &str| Err(Failure::Config(msg.to_string()));
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad("p must be a finite number above 1");
        }
        if self.grid == 0 {
            return bad("grid must be positive");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("eps_list entries must be positive");
        }
        if self.t_scale.is_empty() || self.t_scale.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return bad("t_scale entries must be positive");
        }
        if !(self.q1 > 0.0 && self.q1 < self.q2 && self.q2 <= 1.0) {
            return bad("need 0 < q1 < q2 <= 1");
        }
        if !(self.r_max > self.r_min && self.t_max > self.t_min && self.r_min >= 0.0) {
            return bad("need R_min < R_max and T_min < T_max");
        }
        if !(self.max_error > 0.0) {
            return bad("max_error must be positive");
        }
        if !(self.v_scale > 0.0 && self.v_scale.is_finite()) {
            return bad("v_scale must be positive");
        }
        if self.samples == 0 {
            return bad("samples must be positive");
        }
        if !(self.domain.rho > 0.0 && self.domain.big_r > self.domain.rho) {
            return bad("need R > rho > 0");
        }
        Ok(())
    }
}
