//! End-to-end experiments with JSON reports: code-state warm-up, structural audit of a
//! product code, and the three-part impostor argument on residual subcodes.

mod nlets;

pub use nlets::{
    run_nlets, AsymptoticTargets, AuditCache, NletsBatch, NletsReport, NletsRunner, Part1Report,
    Part2Report, Part3Report,
};

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::{
    css_distance_with_limit, logical_basis, steane, Basis, CssCode, CssError, LogicalBasis,
    MAX_CSS_DISTANCE_DIM,
};
use crate::expansion::{depth_lower_bound, ExpansionError};
use crate::gf2::{for_each_in_coset, BitVector, Gf2Error, DEFAULT_COSET_CAP};
use crate::graphs::{
    complete_graph, cycle_graph, path_graph, random_regular, spectral_report, Graph, GraphError,
    SpectralReport,
};
use crate::hgp::{
    hypergraph_product, localized_distance_audit, spanning_set_check, structural_report, HgpError,
    LineOrientation, LocalizedAudit, SpanningReport, StructuralReport, DEFAULT_AUDIT_CAP,
};
use crate::states::{
    xbasis_masses, zbasis_masses, BasisMasses, LogicalStateSpec, PauliError, StatesError,
    DEFAULT_DECODER_BUDGET, MU_CODE_STATE, NORM_TOL,
};

/// `l_2` error allowance of the code-state warm-up bound.
pub const WARMUP_L2_ERROR: f64 = 0.14;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hgp(#[from] HgpError),
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Source graph of a product code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    RandomRegular {
        n: usize,
        d: usize,
        seed: u64,
    },
    /// Edge-list file.
    File {
        path: String,
    },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph, PipelineError> {
        Ok(match self {
            Self::Cycle { n } => cycle_graph(*n),
            Self::Complete { n } => complete_graph(*n),
            Self::Path { n } => path_graph(*n),
            Self::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed)?,
            Self::File { path } => Graph::parse(&fs::read_to_string(path)?)?,
        })
    }
}

/// Logical amplitudes `(α, β)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Amplitudes {
    /// `[re, im]` pairs.
    Fixed { alpha: [f64; 2], beta: [f64; 2] },
    /// Haar-random qubit state drawn from the run's generator.
    Random,
}

impl Amplitudes {
    pub fn draw(&self, rng: &mut impl Rng) -> Result<(Complex64, Complex64), PipelineError> {
        let (a, b) = match self {
            Self::Fixed { alpha, beta } => (
                Complex64::new(alpha[0], alpha[1]),
                Complex64::new(beta[0], beta[1]),
            ),
            Self::Random => {
                let mut g =
                    || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                let (a, b) = (g(), g());
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                (a / norm, b / norm)
            }
        };
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StatesError::NotNormalized(norm).into());
        }
        Ok((a, b))
    }
}

/// Configuration of an impostor experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    /// Fraction of qubits the impostor may corrupt.
    pub epsilon: f64,
    /// Line-fraction parameter of the error family; the tightest family holding the
    /// planted error is used when absent.
    #[serde(default)]
    pub nu: Option<f64>,
    /// Error weight, overriding `⌊εN⌋`. The line rule then uses `max(ε, weight/N)`.
    #[serde(default)]
    pub error_weight: Option<usize>,
    pub amplitudes: Amplitudes,
    pub seed: u64,
    /// Runs use seeds `seed..seed + runs`.
    #[serde(default = "default_runs")]
    pub runs: u64,
    /// Vertex of the residual graph carrying the line logicals; taken mod `|V'|`.
    #[serde(default)]
    pub logical_vertex: usize,
    #[serde(default = "default_decoder_budget")]
    pub decoder_budget: u64,
    #[serde(default = "default_audit_cap")]
    pub audit_cap: u64,
}

fn default_runs() -> u64 {
    1
}

fn default_decoder_budget() -> u64 {
    DEFAULT_DECODER_BUDGET
}

fn default_audit_cap() -> u64 {
    DEFAULT_AUDIT_CAP
}

impl ExperimentConfig {
    #[must_use]
    pub fn new(graph: GraphSpec, epsilon: f64, amplitudes: Amplitudes, seed: u64) -> Self {
        Self {
            graph,
            epsilon,
            nu: None,
            error_weight: None,
            amplitudes,
            seed,
            runs: 1,
            logical_vertex: 0,
            decoder_budget: DEFAULT_DECODER_BUDGET,
            audit_cap: DEFAULT_AUDIT_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(PipelineError::InvalidConfig(format!(
                "epsilon {} not in [0, 1)",
                self.epsilon
            )));
        }
        if let Some(nu) = self.nu {
            if !(0.0..1.0).contains(&nu) {
                return Err(PipelineError::InvalidConfig(format!(
                    "nu {nu} not in [0, 1)"
                )));
            }
        }
        if self.runs == 0 || self.decoder_budget == 0 || self.audit_cap == 0 {
            return Err(PipelineError::InvalidConfig(
                "runs and caps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Writes `value` as pretty JSON through a temporary file in the same directory.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(value)?;
    write_atomic(path, text.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| {
        PipelineError::InvalidConfig(format!("no file name in {}", path.display()))
    })?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Least weight in the nontrivial class `C_1` of `basis` for logical pair `index`.
///
/// This is `dist(C_0, C_1)`: both classes are cosets of `C_0`.
pub fn class_distance(
    code: &CssCode,
    lb: &LogicalBasis,
    index: usize,
    basis: Basis,
    cap: u64,
) -> Result<usize, PipelineError> {
    let (space, pairing) = match basis {
        Basis::Z => (code.hz().nullspace_basis(), &lb.bz[index]),
        Basis::X => (code.hx().nullspace_basis(), &lb.bx[index]),
    };
    let mut best = usize::MAX;
    for_each_in_coset(space.rows(), &BitVector::zeros(code.n()), cap, |x| {
        if x.dot(pairing) {
            best = best.min(x.weight());
        }
    })?;
    Ok(best)
}

/// Source of the code for a warm-up run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeSpec {
    Steane,
    Product {
        graph: GraphSpec,
    },
    /// CSS code file.
    File {
        path: String,
    },
}

impl CodeSpec {
    pub fn build(&self) -> Result<CssCode, PipelineError> {
        Ok(match self {
            Self::Steane => steane(),
            Self::Product { graph } => hypergraph_product(&graph.build()?)?.code,
            Self::File { path } => CssCode::parse(&fs::read_to_string(path)?)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmupConfig {
    pub code: CodeSpec,
    #[serde(default)]
    pub logical_index: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default = "default_coset_cap")]
    pub cap: u64,
}

fn default_coset_cap() -> u64 {
    DEFAULT_COSET_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmupBasis {
    pub masses: BasisMasses,
    /// `min(p(C_0), p(C_1))`.
    pub mu: f64,
    /// `dist(C_0, C_1)`.
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmupReport {
    pub n: usize,
    pub k: usize,
    pub logical_index: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub z: WarmupBasis,
    pub x: WarmupBasis,
    /// Code distance, when both quotient spaces are enumerable.
    pub code_distance: Option<usize>,
    /// Required class mass `1/2 - 1/(2√2)`.
    pub mu_required: f64,
    /// Basis whose smaller class mass meets `mu_required`, larger first, Z on ties.
    pub chosen: Option<Basis>,
    pub mu: Option<f64>,
    pub distance: Option<usize>,
    /// `(2/3) log₂(μ D / (4√n))`.
    pub depth_bound: Option<f64>,
    /// The same with `μ` reduced by the `l_2` error allowance.
    pub depth_bound_l2: Option<f64>,
    pub l2_error: f64,
}

impl WarmupReport {
    #[must_use]
    pub fn holds(&self) -> bool {
        self.chosen.is_some()
    }
}

/// Exact class masses of an error-free code state in both bases, and the depth bound
/// from the better-partitioned basis.
pub fn run_warmup(
    code: &CssCode,
    index: usize,
    alpha: Complex64,
    beta: Complex64,
    cap: u64,
) -> Result<WarmupReport, PipelineError> {
    let lb = logical_basis(code)?;
    let spec = LogicalStateSpec::new(code, lb.clone(), index, alpha, beta)?;
    let err = PauliError::none(code.n());
    let basis = |masses: BasisMasses, b: Basis| -> Result<WarmupBasis, PipelineError> {
        Ok(WarmupBasis {
            // The smaller of two masses summing to at most 1; the clamp removes rounding.
            mu: masses.c0.min(masses.c1).min(0.5),
            distance: class_distance(code, &lb, index, b, cap)?,
            masses,
        })
    };
    let z = basis(zbasis_masses(&spec, &err, None, false)?, Basis::Z)?;
    let x = basis(xbasis_masses(&spec, &err, None, false)?, Basis::X)?;
    // Masses are sums of a few products of squared amplitudes, exact up to rounding.
    let ok = |w: &WarmupBasis| w.mu >= MU_CODE_STATE - NORM_TOL;
    let chosen = match (ok(&z), ok(&x)) {
        (true, true) => Some(if x.mu > z.mu { Basis::X } else { Basis::Z }),
        (true, false) => Some(Basis::Z),
        (false, true) => Some(Basis::X),
        (false, false) => None,
    };
    let pick = chosen.map(|b| if b == Basis::Z { &z } else { &x });
    let n = code.n();
    let depth_bound = pick
        .map(|w| depth_lower_bound(w.mu, w.distance as f64, n))
        .transpose()?;
    let depth_bound_l2 = pick
        .filter(|w| w.mu > WARMUP_L2_ERROR)
        .map(|w| depth_lower_bound(w.mu - WARMUP_L2_ERROR, w.distance as f64, n))
        .transpose()?;
    Ok(WarmupReport {
        n,
        k: code.k(),
        logical_index: index,
        alpha: [alpha.re, alpha.im],
        beta: [beta.re, beta.im],
        code_distance: css_distance_with_limit(code, MAX_CSS_DISTANCE_DIM).ok(),
        mu_required: MU_CODE_STATE,
        mu: pick.map(|w| w.mu),
        distance: pick.map(|w| w.distance),
        chosen,
        depth_bound,
        depth_bound_l2,
        l2_error: WARMUP_L2_ERROR,
        z,
        x,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub graph: GraphSpec,
    #[serde(default = "default_distance_dim")]
    pub distance_max_dim: usize,
    #[serde(default = "default_audit_cap")]
    pub audit_cap: u64,
}

fn default_distance_dim() -> usize {
    MAX_CSS_DISTANCE_DIM
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralAudit {
    pub structural: StructuralReport,
    /// `hx · hzᵀ = 0`, recomputed.
    pub css_valid: bool,
    pub spanning: SpanningReport,
    pub spectral: Option<SpectralReport>,
    /// Localized audits of the Z and X classes of the line logicals through vertex 0;
    /// `None` when the class exceeds the cap.
    pub localized_z: Option<LocalizedAudit>,
    pub localized_x: Option<LocalizedAudit>,
}

impl StructuralAudit {
    /// Every computed check agrees with its construction.
    #[must_use]
    pub fn holds(&self) -> bool {
        self.css_valid && self.spanning.spans && self.structural.k_rank == self.structural.k_formula
    }
}

/// Orientation whose vertex lines carry the logical of each audited class.
#[must_use]
pub fn audit_orientation(class: Basis) -> LineOrientation {
    match class {
        Basis::Z => LineOrientation::Rows,
        Basis::X => LineOrientation::Columns,
    }
}

pub fn run_structural_audit(cfg: &AuditConfig) -> Result<StructuralAudit, PipelineError> {
    let g = cfg.graph.build()?;
    let h = hypergraph_product(&g)?;
    let lb = h.line_logical_basis(0)?;
    let audit = |class: Basis| -> Result<Option<LocalizedAudit>, PipelineError> {
        match localized_distance_audit(&h, &lb, 0, class, audit_orientation(class), cfg.audit_cap) {
            Ok(a) => Ok(Some(a)),
            Err(HgpError::TooLarge { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    Ok(StructuralAudit {
        structural: structural_report(&h, cfg.distance_max_dim),
        css_valid: h.code.hx().mul(&h.code.hz().transpose()).is_zero(),
        spanning: spanning_set_check(&h)?,
        spectral: spectral_report(&g).ok(),
        localized_z: audit(Basis::Z)?,
        localized_x: audit(Basis::X)?,
    })
}
