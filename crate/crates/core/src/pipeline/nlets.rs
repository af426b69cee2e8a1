use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{audit_orientation, ExperimentConfig, PipelineError};
use crate::css::Basis;
use crate::expansion::{depth_lower_bound, depth_lower_bound_gamma, DEFAULT_GAMMAS};
use crate::graphs::{spectral_report, ResidualBounds};
use crate::hgp::LineOrientation;
use crate::hgp::{
    fractal_subcode, hypergraph_product, localized_distance_audit, HgpCode, HgpIndex,
    LocalizedAudit,
};
use crate::states::{
    double_certification_pairs, partition_witness, ErrorFamily, ErrorSupports, LogicalStateSpec,
    PartitionWitness, PauliError, VoronoiSpec, C0,
};

/// Slack on floating comparisons of fractions against bounds.
const FRACTION_TOL: f64 = 1e-12;
/// Slack when recomputing the depth bound from report fields.
const DEPTH_TOL: f64 = 1e-12;

/// Constants of the asymptotic statement, carried beside the measured ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTargets {
    pub epsilon: f64,
    pub d: usize,
    /// `d√ε / (1 - 62 d√ε)` at these constants.
    pub nu: f64,
    /// Heaviest check `d + 2`.
    pub max_check_weight: usize,
    pub c0: f64,
    /// Vertex-line fraction `1/2` and edge-line fraction `3/(8d)` of the localized distance.
    pub vertex_line_fraction: f64,
    pub edge_line_fraction: f64,
}

impl Default for AsymptoticTargets {
    fn default() -> Self {
        let (epsilon, d) = (1e-9, 14);
        Self {
            epsilon,
            d,
            nu: nu_formula(epsilon, d).expect("positive at these constants"),
            max_check_weight: d + 2,
            c0: C0,
            vertex_line_fraction: 0.5,
            edge_line_fraction: 3.0 / (8.0 * d as f64),
        }
    }
}

/// `d√ε / (1 - 62 d√ε)`, or `None` when the denominator is not positive.
fn nu_formula(eps: f64, d: usize) -> Option<f64> {
    let s = d as f64 * eps.sqrt();
    let den = 1.0 - 62.0 * s;
    (den > 0.0).then(|| s / den)
}

/// Residual step: low-error lines, the residual graph and its product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part1Report {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    /// `max(ε, weight / N)`, the corruption fraction fed to the line rule.
    pub epsilon_effective: f64,
    /// `d√ε`: a line is kept when at most this fraction of it is corrupted.
    pub line_fraction: f64,
    /// `V_l` and `E_l`.
    pub low_vertices: Vec<usize>,
    pub low_edges: Vec<usize>,
    /// `|V_l| >= (1 - d√ε) n` and `|E_l| >= (1 - d√ε) m`.
    pub markov_holds: bool,
    pub residual_vertices: Vec<usize>,
    pub residual_edges: Vec<usize>,
    pub vertex_fraction: f64,
    pub edge_fraction: f64,
    /// Bounds at the deleted fraction `max(1 - |V_l|/n, 1 - |E_l|/m)` and the measured
    /// spectral gap; absent for irregular graphs.
    pub bounds: Option<ResidualBounds>,
    /// `|V'|/|V| >= 1 - ε'`, `|E'|/|E| >= 1 - 2ε'` and `>= 1 - ε' - ε(d+1)`.
    pub bounds_hold: Option<bool>,
    pub sub_qubits: usize,
    pub checks_inherited: bool,
    /// Weight of the error restricted to the subcode.
    pub sub_error_weight: usize,
}

/// Error family and distance partition on the subcode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part2Report {
    pub sub_n: usize,
    pub sub_m: usize,
    /// Heaviest vertex line and edge line of the restricted error, over both orientations.
    pub vertex_cap: usize,
    pub edge_cap: usize,
    pub weight_cap: usize,
    /// `max(vertex_cap / n', edge_cap / m')`.
    pub nu_measured: f64,
    /// `nu` of the family used; differs from `nu_measured` when the config fixes it.
    pub nu_family: f64,
    /// `d√ε / (1 - 62 d√ε)`, absent when not positive.
    pub nu_formula: Option<f64>,
    /// Caps implied by the line rule: `⌊d√ε n⌋` and `⌊d√ε m⌋`.
    pub vertex_cap_rule: usize,
    pub edge_cap_rule: usize,
    pub caps_within_rule: bool,
    pub in_family: bool,
    /// Localized audits of the Z and X classes.
    pub audit_z: LocalizedAudit,
    pub audit_x: LocalizedAudit,
    /// Lower bounds on `dist(S_0, S_1)` in Z and X: per-word line bound
    /// `max(a - 2 vertex_cap, b - 2 edge_cap)` and `min_weight - 2 weight_cap`, whichever is larger.
    pub distance_lb: [i64; 2],
    /// Both bounds positive and at most the class distance the audit found.
    pub distance_consistent: bool,
}

/// Cell masses and depth bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part3Report {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub witness: PartitionWitness,
    /// Ordered family pairs `(t, t')` with `t + t'` in class 1, per basis Z, X, when enumerable.
    pub double_pairs: [Option<u64>; 2],
    pub chosen: Option<Basis>,
    /// Smaller cell mass in the chosen basis.
    pub mu: Option<f64>,
    pub distance: Option<i64>,
    pub n_bits: usize,
    /// `(2/3) log₂(μ D / (4√n_bits))`.
    pub depth_bound: Option<f64>,
    /// `(γ, log₂ B*)` from the expansion theorem, on the default grid.
    pub depth_bounds_gamma: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NletsReport {
    pub seed: u64,
    pub n_qubits: usize,
    pub error: ErrorSupports,
    pub part1: Part1Report,
    pub part2: Option<Part2Report>,
    pub part3: Option<Part3Report>,
    pub falsifications: Vec<String>,
}

impl NletsReport {
    #[must_use]
    pub fn falsified(&self) -> bool {
        !self.falsifications.is_empty()
    }

    /// Recomputes the depth bound from `mu`, `distance` and `n_bits`.
    #[must_use]
    pub fn depth_bound_consistent(&self) -> bool {
        let Some(p) = &self.part3 else { return true };
        match (p.mu, p.distance, p.depth_bound) {
            (Some(mu), Some(d), Some(b)) => {
                (2.0 / 3.0 * (mu * d as f64 / (4.0 * (p.n_bits as f64).sqrt())).log2() - b).abs()
                    <= DEPTH_TOL
            }
            (_, _, None) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NletsBatch {
    pub config: ExperimentConfig,
    pub targets: AsymptoticTargets,
    pub runs: Vec<NletsReport>,
    pub falsified_runs: usize,
}

type AuditKey = (Vec<usize>, Vec<usize>, usize, Basis);

/// Localized audits keyed by residual graph, logical vertex and class.
#[derive(Default, Debug)]
pub struct AuditCache {
    map: HashMap<AuditKey, LocalizedAudit>,
}

impl AuditCache {
    #[must_use]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Parent code and shared state for the runs of one configuration.
pub struct NletsRunner {
    cfg: ExperimentConfig,
    parent: HgpCode,
    lambda2: Option<f64>,
    cache: AuditCache,
}

fn line_errors(
    index: &HgpIndex,
    t: &crate::gf2::BitVector,
    o: LineOrientation,
    vertex: bool,
    i: usize,
) -> usize {
    let line = if vertex {
        index.vertex_line(o, i)
    } else {
        index.edge_line(o, i)
    };
    line.iter().filter(|&&q| t.get(q)).count()
}

impl NletsRunner {
    pub fn new(cfg: ExperimentConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let g = cfg.graph.build()?;
        let parent = hypergraph_product(&g)?;
        let lambda2 = spectral_report(&g).ok().map(|s| s.lambda2);
        Ok(Self {
            cfg,
            parent,
            lambda2,
            cache: AuditCache::default(),
        })
    }

    #[must_use]
    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    #[must_use]
    pub fn cache(&self) -> &AuditCache {
        &self.cache
    }

    /// One seeded run with an error drawn uniformly at the configured weight.
    pub fn run(&mut self, seed: u64) -> Result<NletsReport, PipelineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nq = self.parent.n_qubits();
        let weight = self
            .cfg
            .error_weight
            .unwrap_or((self.cfg.epsilon * nq as f64).floor() as usize);
        let err = PauliError::sample(nq, weight, &mut rng);
        let (alpha, beta) = self.cfg.amplitudes.draw(&mut rng)?;
        self.run_with(seed, &err, alpha, beta)
    }

    /// One run on a given error and logical state.
    pub fn run_with(
        &mut self,
        seed: u64,
        err: &PauliError,
        alpha: num_complex::Complex64,
        beta: num_complex::Complex64,
    ) -> Result<NletsReport, PipelineError> {
        let h = &self.parent;
        let ix = h.index;
        let nq = h.n_qubits();
        if err.n() != nq {
            return Err(PipelineError::InvalidConfig(format!(
                "error on {} qubits, code has {nq}",
                err.n()
            )));
        }
        let mut falsifications = Vec::new();

        // Part 1: keep lines with few errors, pass to the largest connected residual.
        let d = h.graph.max_degree();
        let supp = err.support();
        let eps = self.cfg.epsilon.max(supp.weight() as f64 / nq as f64);
        let frac = d as f64 * eps.sqrt();
        let (n, m) = (ix.n, ix.m);
        let clean = |vertex: bool, i: usize, len: usize| {
            [LineOrientation::Columns, LineOrientation::Rows]
                .iter()
                .all(|&o| {
                    (len - line_errors(&ix, &supp, o, vertex, i)) as f64
                        >= (1.0 - frac) * len as f64
                })
        };
        let low_vertices: Vec<usize> = (0..n).filter(|&v| clean(true, v, n)).collect();
        let low_edges: Vec<usize> = (0..m).filter(|&e| clean(false, e, m)).collect();
        let markov_holds = low_vertices.len() as f64 >= (1.0 - frac) * n as f64 - FRACTION_TOL
            && low_edges.len() as f64 >= (1.0 - frac) * m as f64 - FRACTION_TOL;
        if !markov_holds {
            falsifications.push("low-error line counts below (1 - d sqrt(eps)) of n or m".into());
        }
        let sub = fractal_subcode(h, &low_vertices, &low_edges)?;
        let res = &sub.residual;
        let deleted = (1.0 - low_vertices.len() as f64 / n as f64).max(if m == 0 {
            0.0
        } else {
            1.0 - low_edges.len() as f64 / m as f64
        });
        let regular = h.graph.regular_degree();
        let bounds = regular
            .zip(self.lambda2)
            .map(|(d, l2)| ResidualBounds::spectral(deleted, d, l2));
        let bounds_hold = bounds.as_ref().map(|b| {
            res.vertex_fraction >= b.vertex_lb - FRACTION_TOL
                && res.edge_fraction >= b.edge_lb_stated - FRACTION_TOL
                && res.edge_fraction >= b.edge_lb_counted - FRACTION_TOL
        });
        if bounds_hold == Some(false) {
            falsifications.push("residual fractions below the expander-mixing bounds".into());
        }
        let checks_inherited = sub.checks_inherited(h);
        if !checks_inherited {
            falsifications.push("subcode checks are not restrictions of parent checks".into());
        }
        let sub_err = err.restrict(&sub.embedding);
        let child = &sub.child;
        let cix = child.index;
        let t = sub_err.support();
        let part1 = Part1Report {
            n,
            m,
            d,
            epsilon_effective: eps,
            line_fraction: frac,
            low_vertices,
            low_edges,
            markov_holds,
            residual_vertices: res.vertices.clone(),
            residual_edges: res.edges.clone(),
            vertex_fraction: res.vertex_fraction,
            edge_fraction: res.edge_fraction,
            bounds,
            bounds_hold,
            sub_qubits: child.n_qubits(),
            checks_inherited,
            sub_error_weight: t.weight(),
        };

        // Part 2: error family, line-rule caps and localized distance.
        let tight = ErrorFamily::tight_lines(cix, &t);
        let ErrorFamily::Lines {
            vertex_cap,
            edge_cap,
            weight_cap: tight_weight,
            ..
        } = tight
        else {
            unreachable!("tight_lines builds a line family")
        };
        let family = match self.cfg.nu {
            Some(nu) => ErrorFamily::lines_from_nu(cix, nu),
            None => tight.clone(),
        };
        let ErrorFamily::Lines {
            vertex_cap: fv,
            edge_cap: fe,
            weight_cap: fw,
            ..
        } = family
        else {
            unreachable!("line family")
        };
        let vertex_cap_rule = (frac * n as f64 + FRACTION_TOL).floor() as usize;
        let edge_cap_rule = (frac * m as f64 + FRACTION_TOL).floor() as usize;
        let caps_within_rule = vertex_cap <= vertex_cap_rule && edge_cap <= edge_cap_rule;
        if !caps_within_rule {
            falsifications.push("restricted error exceeds the line rule on some line".into());
        }
        let in_family = family.contains(&sub_err.ex) && family.contains(&sub_err.ez);
        let lv = self.cfg.logical_vertex % cix.n;
        let lb = child.line_logical_basis(lv)?;
        let mut audit = |class: Basis| -> Result<LocalizedAudit, PipelineError> {
            let key = (res.vertices.clone(), res.edges.clone(), lv, class);
            if let Some(a) = self.cache.map.get(&key) {
                return Ok(a.clone());
            }
            let a = localized_distance_audit(
                child,
                &lb,
                0,
                class,
                audit_orientation(class),
                self.cfg.audit_cap,
            )?;
            self.cache.map.insert(key, a.clone());
            Ok(a)
        };
        let audit_z = audit(Basis::Z)?;
        let audit_x = audit(Basis::X)?;
        let lb_of = |a: &LocalizedAudit| {
            a.distance_lower_bound(fv, fe)
                .max(a.min_weight as i64 - 2 * fw as i64)
        };
        let distance_lb = [lb_of(&audit_z), lb_of(&audit_x)];
        let distance_consistent = [(&audit_z, distance_lb[0]), (&audit_x, distance_lb[1])]
            .iter()
            .all(|(a, d)| *d > 0 && *d <= a.min_weight as i64);
        if distance_lb
            .iter()
            .zip([&audit_z, &audit_x])
            .any(|(&d, a)| d > a.min_weight as i64)
        {
            falsifications.push("distance lower bound exceeds the class distance".into());
        }
        let part2 = Part2Report {
            sub_n: cix.n,
            sub_m: cix.m,
            vertex_cap,
            edge_cap,
            weight_cap: tight_weight,
            nu_measured: tight.nu().expect("line family"),
            nu_family: family.nu().expect("line family"),
            nu_formula: nu_formula(eps, d),
            vertex_cap_rule,
            edge_cap_rule,
            caps_within_rule,
            in_family,
            audit_z,
            audit_x,
            distance_lb,
            distance_consistent,
        };
        if !in_family {
            falsifications.push("restricted error lies outside the configured line family".into());
            return Ok(NletsReport {
                seed,
                n_qubits: nq,
                error: err.supports(),
                part1,
                part2: Some(part2),
                part3: None,
                falsifications,
            });
        }

        // Part 3: cell masses, disjointness and depth.
        let spec = LogicalStateSpec::new(&child.code, lb, 0, alpha, beta)?;
        let budget = self.cfg.decoder_budget;
        let witness = partition_witness(
            &spec,
            &sub_err,
            &family,
            [Some(distance_lb[0]), Some(distance_lb[1])],
            budget,
        )?;
        let mut double_pairs = [None, None];
        if family.size(child.n_qubits()) <= u128::from(budget) {
            for (slot, basis) in double_pairs.iter_mut().zip([Basis::Z, Basis::X]) {
                let v = VoronoiSpec::new(spec.sets(), basis, family.clone(), budget);
                *slot = Some(double_certification_pairs(&v)?);
            }
        }
        for (basis, pairs) in [Basis::Z, Basis::X].iter().zip(double_pairs) {
            let w = witness.get(*basis);
            if let crate::states::Disjointness::Decoder {
                doubly_certified_mass,
            } = w.disjointness
            {
                if doubly_certified_mass > 0.0 {
                    falsifications.push(format!("{basis:?} outcomes certified by both cells"));
                }
            }
            // Pairs and distance bound must agree: a positive bound rules out every pair.
            if pairs.is_some_and(|p| p > 0) && distance_lb[usize::from(*basis == Basis::X)] > 0 {
                falsifications.push(format!(
                    "{basis:?} pair count contradicts the distance bound"
                ));
            }
        }
        let chosen = witness.chosen;
        if chosen.is_none() {
            falsifications.push("no basis has both cell masses at least c0".into());
        }
        let n_bits = child.n_qubits();
        let mu = chosen.map(|b| {
            let w = witness.get(b);
            // Disjoint cells: the smaller is at most 1/2 up to rounding.
            w.s0.min(w.s1).min(0.5)
        });
        let distance = chosen
            .map(|b| distance_lb[usize::from(b == Basis::X)])
            .filter(|&d| d > 0);
        let (depth_bound, depth_bounds_gamma) = match (mu, distance) {
            (Some(mu), Some(dd)) => {
                let b = depth_lower_bound(mu, dd as f64, n_bits)?;
                let grid = DEFAULT_GAMMAS
                    .iter()
                    .map(|&g| Ok((g, depth_lower_bound_gamma(mu, dd as f64, n_bits, g)?)))
                    .collect::<Result<Vec<_>, PipelineError>>()?;
                (Some(b), grid)
            }
            _ => (None, Vec::new()),
        };
        let report = NletsReport {
            seed,
            n_qubits: nq,
            error: err.supports(),
            part1,
            part2: Some(part2),
            part3: Some(Part3Report {
                alpha: [alpha.re, alpha.im],
                beta: [beta.re, beta.im],
                witness,
                double_pairs,
                chosen,
                mu,
                distance,
                n_bits,
                depth_bound,
                depth_bounds_gamma,
            }),
            falsifications,
        };
        debug_assert!(report.depth_bound_consistent());
        Ok(report)
    }

    /// Runs seeds `seed..seed + runs`.
    pub fn run_all(&mut self) -> Result<NletsBatch, PipelineError> {
        let runs = (self.cfg.seed..self.cfg.seed + self.cfg.runs)
            .map(|s| self.run(s))
            .collect::<Result<Vec<_>, _>>()?;
        let falsified_runs = runs.iter().filter(|r| r.falsified()).count();
        Ok(NletsBatch {
            config: self.cfg.clone(),
            targets: AsymptoticTargets::default(),
            runs,
            falsified_runs,
        })
    }
}

pub fn run_nlets(cfg: &ExperimentConfig) -> Result<NletsBatch, PipelineError> {
    NletsRunner::new(cfg.clone())?.run_all()
}
