//! Run configuration: JSON schema, validation with field paths, and the objects it builds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arrangements::Configuration;
use crate::connections::{sln_verma, ConnectionParams, SlnData};
use crate::error::{KzError, Result};
use crate::free_kac_moody::{AlgebraData, KacMoody, MultiDegree};
use crate::hypergeometric::QuadratureSettings;
use crate::linalg::QMatrix;
use crate::rational::{parse_q, Q};
use crate::weight_modules::{HighestWeightData, MuVector, TensorVerma};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Flatness,
    Solve,
    Residuals,
    DetCheck,
    VerifyOperators,
    OsCheck,
    SymmetrizeCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Flatness => "flatness",
            Command::Solve => "solve",
            Command::Residuals => "residuals",
            Command::DetCheck => "det-check",
            Command::VerifyOperators => "verify-operators",
            Command::OsCheck => "os-check",
            Command::SymmetrizeCheck => "symmetrize-check",
        }
    }
}

/// A float given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Str(String),
    Float(f64),
}

impl Num {
    fn value(&self, path: &str) -> Result<f64> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| KzError::schema(path, format!("not a number: {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    /// `"free"` with a gram matrix, or `"sln"` with `N`.
    pub mode: String,
    #[serde(default)]
    pub gram: Option<Vec<Vec<String>>>,
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
}

/// Free mode: `lam_alpha[j][i] = (Λ_j, α_i)` and `lam_lam`. `sl_N` mode: Dynkin labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default)]
    pub lam_alpha: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub lam_lam: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub labels: Option<Vec<Vec<String>>>,
}

/// `μ` by its pairings (`alpha`, `lam`), or in `sl_N` mode by coordinates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuConfig {
    #[serde(default)]
    pub alpha: Option<Vec<String>>,
    #[serde(default)]
    pub lam: Option<Vec<String>>,
    #[serde(default)]
    pub coords: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub z: Vec<String>,
    #[serde(default)]
    pub mu: Option<MuConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementConfig {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub weights: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    #[serde(default)]
    pub tol: Option<Num>,
    #[serde(default)]
    pub fd_step: Option<Num>,
    #[serde(default)]
    pub fd_order: Option<usize>,
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Pass threshold for residual, determinant and symmetrization checks.
    #[serde(default)]
    pub check_tol: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub algebra: Option<AlgebraConfig>,
    #[serde(default)]
    pub weights: Option<WeightsConfig>,
    #[serde(default)]
    pub lambda: Option<Vec<u32>>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub z: Option<Vec<String>>,
    #[serde(default)]
    pub mu: Option<MuConfig>,
    #[serde(default)]
    pub kappa: Option<String>,
    /// First direction `μ'` for the dynamical system.
    #[serde(default)]
    pub direction: Option<MuConfig>,
    /// Second direction `μ''`, used by the flatness check.
    #[serde(default)]
    pub direction2: Option<MuConfig>,
    /// Second parameter point for `det-check`.
    #[serde(default)]
    pub second_point: Option<PointConfig>,
    /// Extra random rational points for the exact checks.
    #[serde(default)]
    pub random_points: Option<usize>,
    #[serde(default)]
    pub arrangement: Option<ArrangementConfig>,
    #[serde(default)]
    pub include_matrices: bool,
    #[serde(default)]
    pub numeric: NumericConfig,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| KzError::schema("$", e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(KzError::schema(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }
}

fn field<'a, T>(x: &'a Option<T>, path: &str) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| KzError::schema(path, "missing"))
}

fn rat(s: &str, path: &str) -> Result<Q> {
    parse_q(s).map_err(|e| match e {
        KzError::Schema { message, .. } => KzError::schema(path, message),
        other => other,
    })
}

fn rat_vec(v: &[String], path: &str) -> Result<Vec<Q>> {
    v.iter().enumerate().map(|(i, s)| rat(s, &format!("{path}[{i}]"))).collect()
}

fn rat_table(v: &[Vec<String>], path: &str) -> Result<Vec<Vec<Q>>> {
    v.iter().enumerate().map(|(i, row)| rat_vec(row, &format!("{path}[{i}]"))).collect()
}

fn square(rows: Vec<Vec<Q>>, size: usize, path: &str) -> Result<QMatrix> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(KzError::schema(path, format!("expected a {size}x{size} table")));
    }
    Ok(QMatrix::from_rows(rows))
}

/// The module setup shared by the algebraic and numeric commands.
#[derive(Debug)]
pub struct Setup {
    pub tv: Arc<TensorVerma>,
    pub sln: Option<SlnData>,
    pub lambda: MultiDegree,
    pub n: usize,
}

impl Setup {
    pub fn rank(&self) -> usize {
        self.tv.rank()
    }
}

pub fn build_setup(cfg: &RunConfig) -> Result<Setup> {
    let alg = field(&cfg.algebra, "algebra")?;
    let weights = cfg.weights.clone().unwrap_or_default();
    let (tv, sln) = match alg.mode.as_str() {
        "free" => {
            let g = rat_table(field(&alg.gram, "algebra.gram")?, "algebra.gram")?;
            let r = g.len();
            let gram = square(g, r, "algebra.gram")?;
            if !gram.is_symmetric() {
                return Err(KzError::schema("algebra.gram", "gram matrix is not symmetric"));
            }
            let data = AlgebraData::free(gram).map_err(|e| KzError::schema("algebra.gram", e.to_string()))?;
            let la = rat_table(field(&weights.lam_alpha, "weights.lam_alpha")?, "weights.lam_alpha")?;
            if la.iter().any(|row| row.len() != r) {
                return Err(KzError::schema("weights.lam_alpha", format!("each row needs {r} entries")));
            }
            let n = la.len();
            let ll = square(
                rat_table(field(&weights.lam_lam, "weights.lam_lam")?, "weights.lam_lam")?,
                n,
                "weights.lam_lam",
            )?;
            if !ll.is_symmetric() {
                return Err(KzError::schema("weights.lam_lam", "not symmetric"));
            }
            let hw = HighestWeightData::new(la, ll).map_err(|e| KzError::schema("weights", e.to_string()))?;
            (Arc::new(TensorVerma::new(Arc::new(KacMoody::new(data)), hw)?), None)
        }
        "sln" => {
            let big_n = *field(&alg.n, "algebra.N")?;
            if big_n < 2 {
                return Err(KzError::schema("algebra.N", "N must be at least 2"));
            }
            let labels = rat_table(field(&weights.labels, "weights.labels")?, "weights.labels")?;
            if labels.iter().any(|l| l.len() != big_n - 1) {
                return Err(KzError::schema("weights.labels", format!("each weight needs {} labels", big_n - 1)));
            }
            let (tv, s) = sln_verma(big_n, labels)?;
            (tv, Some(s))
        }
        other => return Err(KzError::schema("algebra.mode", format!("unknown mode {other:?}"))),
    };
    let lambda = MultiDegree(field(&cfg.lambda, "lambda")?.clone());
    if lambda.rank() != tv.rank() {
        return Err(KzError::schema("lambda", format!("expected {} entries", tv.rank())));
    }
    if lambda.is_zero() {
        return Err(KzError::schema("lambda", "λ must be nonzero"));
    }
    let n = tv.n();
    if let Some(cn) = cfg.n {
        if cn != n {
            return Err(KzError::schema("n", format!("{cn} disagrees with {n} highest weights")));
        }
    }
    Ok(Setup { tv, sln, lambda, n })
}

pub fn build_mu(setup: &Setup, m: &MuConfig, path: &str) -> Result<MuVector<Q>> {
    if let Some(c) = &m.coords {
        let s = setup
            .sln
            .as_ref()
            .ok_or_else(|| KzError::schema(format!("{path}.coords"), "coordinates need sln mode"))?;
        return s
            .mu_vector(&rat_vec(c, &format!("{path}.coords"))?)
            .map_err(|e| KzError::schema(format!("{path}.coords"), e.to_string()));
    }
    let alpha = rat_vec(field(&m.alpha, &format!("{path}.alpha"))?, &format!("{path}.alpha"))?;
    let lam = rat_vec(field(&m.lam, &format!("{path}.lam"))?, &format!("{path}.lam"))?;
    if alpha.len() != setup.rank() {
        return Err(KzError::schema(format!("{path}.alpha"), format!("expected {} entries", setup.rank())));
    }
    if lam.len() != setup.n {
        return Err(KzError::schema(format!("{path}.lam"), format!("expected {} entries", setup.n)));
    }
    Ok(MuVector::new(alpha, lam))
}

fn build_z(setup: &Setup, z: &[String], path: &str) -> Result<Vec<Q>> {
    let z = rat_vec(z, path)?;
    if z.len() != setup.n {
        return Err(KzError::schema(path, format!("expected {} points", setup.n)));
    }
    Ok(z)
}

/// The configured parameter point, or `None` when no point is given.
pub fn build_point(cfg: &RunConfig, setup: &Setup) -> Result<Option<ConnectionParams<Q>>> {
    let Some(z) = &cfg.z else {
        return Ok(None);
    };
    let p = ConnectionParams {
        z: build_z(setup, z, "z")?,
        mu: build_mu(setup, field(&cfg.mu, "mu")?, "mu")?,
        kappa: rat(field(&cfg.kappa, "kappa")?, "kappa")?,
    };
    p.validate(setup.n)?;
    Ok(Some(p))
}

pub fn build_second_point(cfg: &RunConfig, setup: &Setup, first: &ConnectionParams<Q>) -> Result<ConnectionParams<Q>> {
    let sp = field(&cfg.second_point, "second_point")?;
    let p = ConnectionParams {
        z: build_z(setup, &sp.z, "second_point.z")?,
        mu: match &sp.mu {
            Some(m) => build_mu(setup, m, "second_point.mu")?,
            None => first.mu.clone(),
        },
        kappa: first.kappa.clone(),
    };
    p.validate(setup.n)?;
    Ok(p)
}

pub fn quadrature_settings(cfg: &RunConfig) -> Result<QuadratureSettings> {
    let mut st = QuadratureSettings::default();
    let nc = &cfg.numeric;
    if let Some(t) = &nc.tol {
        st.tol = positive(t.value("numeric.tol")?, "numeric.tol")?;
    }
    if let Some(h) = &nc.fd_step {
        st.fd_step = positive(h.value("numeric.fd_step")?, "numeric.fd_step")?;
    }
    if let Some(o) = nc.fd_order {
        if o != 2 && o != 4 {
            return Err(KzError::schema("numeric.fd_order", "must be 2 or 4"));
        }
        st.fd_order = o;
    }
    if let Some(d) = nc.max_depth {
        st.max_depth = d;
    }
    Ok(st)
}

pub fn check_tol(cfg: &RunConfig, default: f64) -> Result<f64> {
    match &cfg.numeric.check_tol {
        Some(t) => positive(t.value("numeric.check_tol")?, "numeric.check_tol"),
        None => Ok(default),
    }
}

fn positive(x: f64, path: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(KzError::schema(path, format!("must be positive, got {x}")))
    }
}

pub fn build_arrangement(cfg: &RunConfig) -> Result<Configuration> {
    let a = field(&cfg.arrangement, "arrangement")?;
    if a.m == 0 {
        return Err(KzError::schema("arrangement.m", "m must be at least 1"));
    }
    let w = match &a.weights {
        Some(w) => Some(rat_vec(w, "arrangement.weights")?),
        None => None,
    };
    Configuration::discriminantal(a.n, a.m, w).map_err(|e| KzError::schema("arrangement.weights", e.to_string()))
}
