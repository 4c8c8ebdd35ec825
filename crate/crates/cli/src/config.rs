//! JSON configuration schema and its resolution into core types.
//!
//! Configs are validated completely before any computation or file output.
//! State indices in regressor rows are 1-based, matching the component
//! naming in the exported CSV headers (e1, e2, ...).

use adaptctl_core::linalg::SymMatrix;
use adaptctl_core::regressor::{AffineRow, BetaFamily, Monomial};
use adaptctl_core::sim::{LinearErrorSystem, NoiseSpec, Sinusoid, UncertaintyModel, UpdateLaw};
use adaptctl_core::Mat;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: u32,
    pub system: SystemBlock,
    pub certificate: CertificateBlock,
    #[serde(default)]
    pub uncertainty: Option<UncertaintyBlock>,
    #[serde(default)]
    pub laws: Vec<LawBlock>,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub run: Option<RunBlock>,
    #[serde(default)]
    pub bode: BodeBlock,
    #[serde(default)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    #[serde(default)]
    pub omega0: Option<f64>,
    #[serde(default)]
    pub zeta: Option<f64>,
    #[serde(default)]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateBlock {
    #[serde(default)]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub kyp: Option<KypSearchBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KypSearchBlock {
    pub v: Vec<f64>,
    pub varrho: f64,
    pub kappa_fraction: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyBlock {
    pub beta: BetaBlock,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub noise: NoiseBlock,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BetaBlock {
    Constant { value: f64 },
    Affine { rows: Vec<AffineRowBlock> },
    Poly2 { terms: Vec<MonomialBlock> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineRowBlock {
    #[serde(default)]
    pub constant: Option<f64>,
    /// 1-based state index.
    #[serde(default)]
    pub state: Option<usize>,
    #[serde(default)]
    pub coeff: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialBlock {
    #[serde(default)]
    pub constant: Option<f64>,
    /// 1-based state index of a linear term.
    #[serde(default)]
    pub linear: Option<usize>,
    /// 1-based state index pair of a quadratic term.
    #[serde(default)]
    pub quadratic: Option<[usize; 2]>,
    #[serde(default)]
    pub coeff: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_hold")]
    pub sample_dt: f64,
    #[serde(default = "default_cap")]
    pub amplitude_bound: f64,
    #[serde(default)]
    pub sinusoids: Vec<SinusoidBlock>,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            sample_dt: default_hold(),
            amplitude_bound: default_cap(),
            sinusoids: Vec::new(),
        }
    }
}

fn default_seed() -> u64 {
    1
}
fn default_hold() -> f64 {
    0.01
}
fn default_cap() -> f64 {
    0.01
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidBlock {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawBlock {
    Static {
        #[serde(default)]
        label: Option<String>,
        base_gain: MatrixParam,
        scaling: f64,
    },
    Pi {
        #[serde(default)]
        label: Option<String>,
        feedthrough: MatrixParam,
        rate: MatrixParam,
        damping: MatrixParam,
    },
}

/// A gain matrix, or a scalar standing for that multiple of the identity.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixParam {
    Scalar(f64),
    Full(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub mu: f64,
    /// Override of the declared noise bound; derived from the noise spec
    /// when absent.
    #[serde(default)]
    pub eta_star: Option<f64>,
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self { gamma: 0.0, mu: 0.0, eta_star: None }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    pub e0: Vec<f64>,
    #[serde(default)]
    pub z0: Option<Vec<f64>>,
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_t_final() -> f64 {
    100.0
}
fn default_tail() -> f64 {
    0.25
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodeBlock {
    #[serde(default = "default_omega_min")]
    pub omega_min: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for BodeBlock {
    fn default() -> Self {
        Self {
            omega_min: default_omega_min(),
            omega_max: default_omega_max(),
            points: default_points(),
        }
    }
}

fn default_omega_min() -> f64 {
    1e-2
}
fn default_omega_max() -> f64 {
    1e2
}
fn default_points() -> usize {
    400
}

/// How the certificate is sourced; the search variant is executed by the
/// command after validation.
pub enum CertificateSource {
    Explicit(SymMatrix),
    Search(KypSearchBlock),
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        if cfg.schema != 1 {
            return Err(CliError::config(format!(
                "config: unsupported schema {} (expected 1)",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn resolve_system(&self) -> Result<LinearErrorSystem, CliError> {
        let s = &self.system;
        match (&s.a, &s.b, s.omega0, s.zeta) {
            (Some(a), Some(b), None, None) => {
                let mat = to_mat(a, "system.a")?;
                LinearErrorSystem::new(mat, b.clone())
                    .map_err(|e| CliError::config(format!("system: {e}")))
            }
            (Some(_), None, None, None) => Err(CliError::config("system.b is missing".into())),
            (None, Some(_), None, None) => Err(CliError::config("system.a is missing".into())),
            (None, None, Some(w0), Some(z)) => LinearErrorSystem::second_order(w0, z)
                .map_err(|e| CliError::config(format!("system: {e}"))),
            (None, None, Some(_), None) => Err(CliError::config("system.zeta is missing".into())),
            (None, None, None, Some(_)) => {
                Err(CliError::config("system.omega0 is missing".into()))
            }
            _ => Err(CliError::config(
                "system: provide either (omega0, zeta) or (a, b), not both".into(),
            )),
        }
    }

    pub fn resolve_certificate_source(&self) -> Result<CertificateSource, CliError> {
        match (&self.certificate.p, &self.certificate.kyp) {
            (Some(p), None) => {
                let mat = to_mat(p, "certificate.p")?;
                let sym = SymMatrix::new(mat)
                    .map_err(|e| CliError::config(format!("certificate.p: {e}")))?;
                Ok(CertificateSource::Explicit(sym))
            }
            (None, Some(k)) => Ok(CertificateSource::Search(KypSearchBlock {
                v: k.v.clone(),
                varrho: k.varrho,
                kappa_fraction: k.kappa_fraction,
            })),
            (Some(_), Some(_)) => Err(CliError::config(
                "certificate: provide exactly one of p or kyp, not both".into(),
            )),
            (None, None) => {
                Err(CliError::config("certificate: provide either p or kyp".into()))
            }
        }
    }

    pub fn resolve_uncertainty(
        &self,
        state_dim: usize,
        seed_override: Option<u64>,
    ) -> Result<UncertaintyModel, CliError> {
        let block = self
            .uncertainty
            .as_ref()
            .ok_or_else(|| CliError::config("uncertainty block is missing".into()))?;
        let beta = resolve_beta(&block.beta)?;
        let noise = &block.noise;
        let model = UncertaintyModel {
            beta,
            weights: block.weights.clone(),
            noise: NoiseSpec {
                seed: seed_override.unwrap_or(noise.seed),
                sample_dt: noise.sample_dt,
                amplitude_bound: noise.amplitude_bound,
                sinusoids: noise
                    .sinusoids
                    .iter()
                    .map(|s| Sinusoid {
                        amplitude: s.amplitude,
                        frequency: s.frequency,
                        phase: s.phase,
                    })
                    .collect(),
            },
        };
        model
            .validate(state_dim)
            .map_err(|e| CliError::config(format!("uncertainty: {e}")))?;
        Ok(model)
    }

    /// Resolve all laws; `dim` is the regressor dimension they must match.
    pub fn resolve_laws(&self, dim: usize) -> Result<Vec<(String, UpdateLaw)>, CliError> {
        if self.laws.is_empty() {
            return Err(CliError::config("laws: at least one update law is required".into()));
        }
        let mut out = Vec::new();
        for (idx, block) in self.laws.iter().enumerate() {
            let (label, law) = match block {
                LawBlock::Static { label, base_gain, scaling } => {
                    let gain = to_sym(base_gain, dim, &format!("laws[{idx}].base_gain"))?;
                    let label = label.clone().unwrap_or_else(|| format!("static_{idx}"));
                    (label, UpdateLaw::Static { base_gain: gain, scaling: *scaling })
                }
                LawBlock::Pi { label, feedthrough, rate, damping } => {
                    let k = to_sym(feedthrough, dim, &format!("laws[{idx}].feedthrough"))?;
                    let g = to_sym(rate, dim, &format!("laws[{idx}].rate"))?;
                    let s = to_sym(damping, dim, &format!("laws[{idx}].damping"))?;
                    let label = label.clone().unwrap_or_else(|| format!("pi_{idx}"));
                    (label, UpdateLaw::Pi { feedthrough: k, rate: g, damping: s })
                }
            };
            law.validate().map_err(|e| CliError::config(format!("laws[{idx}]: {e}")))?;
            out.push((label, law));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (label, _) in &out {
            if !seen.insert(label.clone()) {
                return Err(CliError::config(format!("laws: duplicate label {label}")));
            }
        }
        Ok(out)
    }

    pub fn run_block(&self) -> Result<&RunBlock, CliError> {
        self.run.as_ref().ok_or_else(|| CliError::config("run block is missing".into()))
    }
}

pub fn resolve_beta(block: &BetaBlock) -> Result<BetaFamily, CliError> {
    match block {
        BetaBlock::Constant { value } => Ok(BetaFamily::Constant(*value)),
        BetaBlock::Affine { rows } => {
            let mut out = Vec::new();
            for (idx, row) in rows.iter().enumerate() {
                let path = format!("uncertainty.beta.rows[{idx}]");
                match (row.constant, row.state) {
                    (Some(c), None) => {
                        if row.coeff.is_some() {
                            return Err(CliError::config(format!(
                                "{path}: coeff applies to state rows only"
                            )));
                        }
                        out.push(AffineRow::Constant(c));
                    }
                    (None, Some(state)) => {
                        if state == 0 {
                            return Err(CliError::config(format!(
                                "{path}: state indices are 1-based"
                            )));
                        }
                        out.push(AffineRow::State {
                            index: state - 1,
                            coeff: row.coeff.unwrap_or(1.0),
                        });
                    }
                    _ => {
                        return Err(CliError::config(format!(
                            "{path}: provide exactly one of constant or state"
                        )))
                    }
                }
            }
            Ok(BetaFamily::Affine(out))
        }
        BetaBlock::Poly2 { terms } => {
            let mut out = Vec::new();
            for (idx, term) in terms.iter().enumerate() {
                let path = format!("uncertainty.beta.terms[{idx}]");
                match (term.constant, term.linear, term.quadratic) {
                    (Some(c), None, None) => {
                        if term.coeff.is_some() {
                            return Err(CliError::config(format!(
                                "{path}: coeff applies to state terms only"
                            )));
                        }
                        out.push(Monomial::Constant(c));
                    }
                    (None, Some(i), None) => {
                        if i == 0 {
                            return Err(CliError::config(format!(
                                "{path}: state indices are 1-based"
                            )));
                        }
                        out.push(Monomial::Linear { index: i - 1, coeff: term.coeff.unwrap_or(1.0) });
                    }
                    (None, None, Some([i, j])) => {
                        if i == 0 || j == 0 {
                            return Err(CliError::config(format!(
                                "{path}: state indices are 1-based"
                            )));
                        }
                        out.push(Monomial::Quadratic {
                            i: i - 1,
                            j: j - 1,
                            coeff: term.coeff.unwrap_or(1.0),
                        });
                    }
                    _ => {
                        return Err(CliError::config(format!(
                            "{path}: provide exactly one of constant, linear or quadratic"
                        )))
                    }
                }
            }
            Ok(BetaFamily::Poly2(out))
        }
    }
}

fn to_mat(rows: &[Vec<f64>], path: &str) -> Result<Mat, CliError> {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Mat::from_rows(&refs).map_err(|e| CliError::config(format!("{path}: {e}")))
}

fn to_sym(param: &MatrixParam, dim: usize, path: &str) -> Result<SymMatrix, CliError> {
    match param {
        MatrixParam::Scalar(s) => Ok(SymMatrix::identity(dim).scale(*s)),
        MatrixParam::Full(rows) => {
            let mat = to_mat(rows, path)?;
            if mat.rows() != dim {
                return Err(CliError::config(format!(
                    "{path}: expected a {dim}x{dim} matrix, got {}x{}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            SymMatrix::new(mat).map_err(|e| CliError::config(format!("{path}: {e}")))
        }
    }
}
