//! Job configuration: a TOML document naming the map, the rectangles, the
//! symbol sets, and per-command options.
//!
//! Numeric endpoints are written as strings so the exact lane can parse
//! them losslessly: `"0.5"` and `"1e-9"` are decimal literals, `"1/3"` is
//! an exact ratio. The float lanes round the same literals to nearest.
//!
//! Flag and environment precedence: a command-line flag wins, then an
//! `HORSESHOE_*` environment variable, then the config file value, then
//! the built-in default. The recognized variables are `HORSESHOE_TOL`,
//! `HORSESHOE_MAX_PERIOD`, `HORSESHOE_BUDGET`, `HORSESHOE_SEED`,
//! `HORSESHOE_WORKERS`, and `HORSESHOE_STRICT_STRIPS`.

use anyhow::{anyhow, bail, Context, Result};
use horseshoe::dynsys::{EvalMode, ExprMap, Horseshoe, MapSpec, TrigParams};
use horseshoe::geometry::OrientedRect;
use horseshoe::{BoxN, Interval, Scalar};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    F32,
    F64,
    Rational,
}

impl Lane {
    pub fn name(self) -> &'static str {
        match self {
            Lane::F32 => "f32",
            Lane::F64 => "f64",
            Lane::Rational => "rational",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Scalar lane: "f64" (default), "f32", or "rational".
    pub scalar: Option<String>,
    pub seed: Option<u64>,
    /// Optional path for a CSV dump of every reported enclosure.
    pub csv: Option<String>,
    pub map: Option<MapCfg>,
    #[serde(default)]
    pub rect: Vec<RectCfg>,
    /// Symbol sets, in symbol order.
    #[serde(default)]
    pub kset: Vec<RectCfg>,
    pub covering: Option<CoveringCfg>,
    pub fixed_points: Option<FixedPointsCfg>,
    pub orbits: Option<OrbitsCfg>,
    pub chaos: Option<ChaosCfg>,
    pub branch: Option<BranchCfg>,
    pub cutting: Option<CuttingCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapCfg {
    /// "horseshoe", "trig", or "custom".
    pub kind: String,
    pub dims: Option<usize>,
    pub c: Option<String>,
    pub d: Option<String>,
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub m: Option<i64>,
    pub exprs: Option<Vec<String>>,
    pub dims_in: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectCfg {
    pub name: String,
    pub lo: Vec<String>,
    pub hi: Vec<String>,
    /// Expansion axis of the oriented rectangle (default: last axis).
    pub axis: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringCfg {
    #[serde(default)]
    pub check: Vec<CoveringCheck>,
    pub n_paths: Option<usize>,
    pub n_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringCheck {
    pub name: Option<String>,
    /// "face", "boundary", "slab", "phase", or "sampled".
    pub method: String,
    pub source: String,
    pub target: String,
    pub directions: Option<Vec<usize>>,
    /// Slab rectangle for the slab method.
    pub slab: Option<String>,
    pub expansion_axis: Option<usize>,
    /// Target interval for the phase method (default: the target
    /// rectangle's expansion extent).
    pub phase_target: Option<[String; 2]>,
    /// Crossing witness rectangle; adds a crossing certificate of the
    /// source over the target.
    pub crossing: Option<String>,
    pub n_paths: Option<usize>,
    pub n_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointsCfg {
    pub tol: Option<String>,
    pub budget: Option<usize>,
    #[serde(default)]
    pub search: Vec<FixedPointSearch>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSearch {
    pub region: String,
    /// Certify boundary stretching of the region onto this rectangle
    /// before searching.
    pub stretch_to: Option<String>,
    /// Crossing witness rectangle; the zero search then runs on the
    /// intersection of the region with the witness.
    pub crossing: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitsCfg {
    /// Ambient rectangle the symbol sets stretch across.
    pub x: String,
    pub words: Vec<String>,
    pub tol: Option<String>,
    pub budget: Option<usize>,
    /// Extra diagnostic forward-iteration steps per certified orbit.
    pub itinerary_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosCfg {
    pub x: String,
    pub max_period: Option<usize>,
    pub tol: Option<String>,
    pub budget: Option<usize>,
    pub word_cap: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchCfg {
    pub search: String,
    pub lambda_axis: usize,
    pub cell: String,
    pub tol: Option<String>,
    pub budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuttingCfg {
    /// Grid fixture path, relative to the config file.
    pub fixture: String,
    #[serde(default)]
    pub ops: Vec<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub gamma: Option<String>,
    pub radius: Option<usize>,
    /// One set name per axis for the wall-intersection op.
    pub walls: Option<Vec<String>>,
}

/// A loaded configuration with its provenance.
pub struct Job {
    pub config: Config,
    pub dir: PathBuf,
    /// `sha256:&lt;hex&gt;` of the raw config bytes.
    pub hash: String,
}

impl Job {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let text = std::str::from_utf8(&bytes).context("config is not UTF-8")?;
        let config: Config = toml::from_str(text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let hash = format!("sha256:{:x}", hasher.finalize());
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(Self { config, dir, hash })
    }

    pub fn lane(&self) -> Result<Lane> {
        match self.config.scalar.as_deref() {
            None | Some("f64") => Ok(Lane::F64),
            Some("f32") => Ok(Lane::F32),
            Some("rational") => Ok(Lane::Rational),
            Some(other) => bail!("unknown scalar lane `{other}` (use f64, f32, or rational)"),
        }
    }
}

/// Parse a numeric literal: `p/q` as an exact ratio, anything else as a
/// decimal (optionally exponent-suffixed). Exact lanes keep both forms
/// exact; float lanes round to nearest.
pub fn literal<S: Scalar>(text: &str) -> Result<S> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| anyhow!("bad ratio numerator `{num}`"))?;
        let d: i64 = den.trim().parse().map_err(|_| anyhow!("bad ratio denominator `{den}`"))?;
        if d == 0 {
            bail!("ratio `{t}` has zero denominator");
        }
        return Ok(S::from_ratio(n, d));
    }
    S::from_decimal(t).ok_or_else(|| anyhow!("cannot parse numeric literal `{t}`"))
}

/// Flag/env overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub tol: Option<String>,
    pub max_period: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub strict_strips: Option<bool>,
}

fn env_parse<T: std::str::FromStr>(key: &str) -> Result<Option<T>> {
    match std::env::var(key) {
        Ok(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| anyhow!("environment variable {key} has unusable value `{v}`")),
        Err(_) => Ok(None),
    }
}

impl Overrides {
    /// Fill unset fields from `HORSESHOE_*` environment variables.
    pub fn with_env(mut self) -> Result<Self> {
        if self.tol.is_none() {
            self.tol = env_parse::<String>("HORSESHOE_TOL")?;
        }
        if self.max_period.is_none() {
            self.max_period = env_parse("HORSESHOE_MAX_PERIOD")?;
        }
        if self.budget.is_none() {
            self.budget = env_parse("HORSESHOE_BUDGET")?;
        }
        if self.seed.is_none() {
            self.seed = env_parse("HORSESHOE_SEED")?;
        }
        if self.workers.is_none() {
            self.workers = env_parse("HORSESHOE_WORKERS")?;
        }
        if self.strict_strips.is_none() {
            self.strict_strips = env_parse("HORSESHOE_STRICT_STRIPS")?;
        }
        Ok(self)
    }

    pub fn mode(&self) -> EvalMode {
        if self.strict_strips.unwrap_or(false) {
            EvalMode::Strict
        } else {
            EvalMode::Permissive
        }
    }
}

/// Typed view of the config for one scalar lane.
pub struct Resolved<S: Scalar> {
    pub map: MapSpec<S>,
    pub rects: Vec<(String, OrientedRect<S>)>,
    pub ksets: Vec<OrientedRect<S>>,
}

impl<S: Scalar> Resolved<S> {
    pub fn build(job: &Job) -> Result<Self> {
        let map = build_map(job.config.map.as_ref())?;
        let mut rects = Vec::new();
        for rc in job.config.rect.iter().chain(&job.config.kset) {
            rects.push((rc.name.clone(), build_rect(rc)?));
        }
        for (i, (name, _)) in rects.iter().enumerate() {
            if rects[..i].iter().any(|(n, _)| n == name) {
                bail!("rectangle name `{name}` is declared twice");
            }
        }
        let ksets = job
            .config
            .kset
            .iter()
            .map(|rc| build_rect(rc))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { map, rects, ksets })
    }

    pub fn rect(&self, name: &str) -> Result<&OrientedRect<S>> {
        self.rects
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
            .ok_or_else(|| anyhow!("no rectangle named `{name}` in the config"))
    }
}

fn build_rect<S: Scalar>(rc: &RectCfg) -> Result<OrientedRect<S>> {
    if rc.lo.len() != rc.hi.len() || rc.lo.is_empty() {
        bail!("rectangle `{}` needs matching nonempty lo/hi lists", rc.name);
    }
    let comps = rc
        .lo
        .iter()
        .zip(&rc.hi)
        .map(|(l, h)| {
            let lo = literal::<S>(l)?;
            let hi = literal::<S>(h)?;
            Interval::new(lo, hi)
                .map_err(|e| anyhow!("rectangle `{}`: bad extent [{l}, {h}]: {e}", rc.name))
        })
        .collect::<Result<Vec<_>>>()?;
    let body = BoxN::new(comps).map_err(|e| anyhow!("rectangle `{}`: {e}", rc.name))?;
    let axis = rc.axis.unwrap_or(rc.lo.len() - 1);
    OrientedRect::new(body, axis)
        .map_err(|e| anyhow!("rectangle `{}` cannot be oriented on axis {axis}: {e}", rc.name))
}

fn build_map<S: Scalar>(cfg: Option<&MapCfg>) -> Result<MapSpec<S>> {
    let cfg = cfg.ok_or_else(|| anyhow!("config has no [map] section"))?;
    match cfg.kind.as_str() {
        "horseshoe" => {
            let dims = cfg.dims.unwrap_or(2);
            Ok(MapSpec::AffineHorseshoe(Horseshoe::canonical(dims)?))
        }
        "trig" => {
            let c = literal::<S>(cfg.c.as_deref().ok_or_else(|| anyhow!("trig map needs c"))?)?;
            let d = literal::<S>(cfg.d.as_deref().ok_or_else(|| anyhow!("trig map needs d"))?)?;
            let k = cfg.k.ok_or_else(|| anyhow!("trig map needs k"))?;
            let l = cfg.l.ok_or_else(|| anyhow!("trig map needs l"))?;
            let m = cfg.m.ok_or_else(|| anyhow!("trig map needs m"))?;
            Ok(MapSpec::TrigExample(TrigParams::new(c, d, k, l, m)?))
        }
        "custom" => {
            let exprs = cfg
                .exprs
                .as_ref()
                .ok_or_else(|| anyhow!("custom map needs an exprs list"))?;
            let dims_in = cfg
                .dims_in
                .ok_or_else(|| anyhow!("custom map needs dims_in"))?;
            Ok(MapSpec::Custom(ExprMap::parse_lines(&exprs.join("\n"), dims_in)?))
        }
        other => bail!("unknown map kind `{other}` (use horseshoe, trig, or custom)"),
    }
}
