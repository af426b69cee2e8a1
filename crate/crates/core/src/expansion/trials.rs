use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    exact_expansion, hypercube_distances, light_cones, random_circuit, simulate,
    theorem_vertex_bound, Distribution, ExpansionError, MAX_EXACT_N,
};

/// A ratio below the bound by more than this counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    /// Measured qubits per trial are drawn from `2..=n_max`.
    pub n_max: usize,
    /// Up to this many extra qubits are simulated and traced out.
    pub ancillas_max: usize,
    pub depth_max: usize,
    pub gammas: Vec<f64>,
    pub seed: u64,
    /// Ball and accretion centers per trial.
    pub centers: usize,
    pub random_sets: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            n_max: 12,
            ancillas_max: 2,
            depth_max: 3,
            gammas: super::DEFAULT_GAMMAS.to_vec(),
            seed: 0,
            centers: 12,
            random_sets: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub n: usize,
    pub depth: usize,
    pub blow_up: usize,
    pub gamma: f64,
    pub radius: usize,
    /// Smaller side of the cut; absent for minima from the exhaustive sweep.
    pub set_mass: Option<f64>,
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub gamma: f64,
    /// Candidate checks at the radius `¼B(Bn)^{1/2-γ}`.
    pub checks: u64,
    pub violations_stated: u64,
    /// Checks at the locality radius `B⌈½(Bn)^{1/2-γ}⌉` of the Chebyshev construction.
    pub violations_proof: u64,
    /// Least `ratio / bound` seen at each radius.
    pub min_slack_stated: f64,
    pub min_slack_proof: f64,
    /// Checks whose stated radius is below 1, where every boundary is empty.
    pub checks_below_unit_radius: u64,
    /// Violations at the stated radius among checks with radius at least 1.
    pub violations_stated_unit: u64,
    pub first_violation_stated: Option<Violation>,
    pub first_violation_proof: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: TrialConfig,
    pub per_gamma: Vec<GammaSummary>,
    pub max_blow_up: usize,
    pub candidates: u64,
    /// Trials with `n <= MAX_EXACT_N` where the full subset sweep ran.
    pub exhaustive_trials: usize,
    /// Exhaustive minima above the best candidate ratio (must be zero).
    pub exhaustive_inconsistencies: usize,
}

impl TrialReport {
    #[must_use]
    pub fn violations_stated(&self) -> u64 {
        self.per_gamma.iter().map(|g| g.violations_stated).sum()
    }

    #[must_use]
    pub fn violations_proof(&self) -> u64 {
        self.per_gamma.iter().map(|g| g.violations_proof).sum()
    }
}

/// Candidate sets as membership tables over `F_2^n`.
fn candidates(p: &Distribution, cfg: &TrialConfig, rng: &mut impl Rng) -> Vec<Vec<bool>> {
    let n = p.n();
    let pts = 1usize << n;
    let supp: Vec<(usize, f64)> = p
        .support()
        .iter()
        .map(|(x, m)| (x.to_u64() as usize, *m))
        .collect();
    let mut by_mass = supp.clone();
    by_mass.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut centers: Vec<usize> = by_mass.iter().take(cfg.centers).map(|c| c.0).collect();
    for _ in 0..cfg.centers / 2 {
        centers.push(supp[rng.gen_range(0..supp.len())].0);
    }
    let dist = |a: usize, b: usize| (a ^ b).count_ones() as usize;
    let mut out = Vec::new();
    for &c in &centers {
        for r in 0..n {
            out.push((0..pts).map(|x| dist(x, c) <= r).collect());
        }
        // Support points by distance from the center, heavier first; cut at mass steps of 1/32.
        let mut order = supp.clone();
        order.sort_by(|a, b| dist(a.0, c).cmp(&dist(b.0, c)).then(b.1.total_cmp(&a.1)));
        let mut set = vec![false; pts];
        let mut acc = 0.0;
        let mut next = 1.0 / 32.0;
        for &(x, m) in &order {
            set[x] = true;
            acc += m;
            if acc >= next {
                out.push(set.clone());
                while next <= acc {
                    next += 1.0 / 32.0;
                }
            }
            if acc > 0.5 {
                break;
            }
        }
    }
    for i in 0..n {
        out.push((0..pts).map(|x| x >> i & 1 == 0).collect());
    }
    for _ in 0..cfg.random_sets {
        out.push((0..pts).map(|_| rng.gen_bool(0.5)).collect());
        let q = rng.gen_range(0.05..0.5);
        let mut s = vec![false; pts];
        for &(x, _) in &supp {
            s[x] = rng.gen_bool(q);
        }
        out.push(s);
    }
    if supp.len() > 1 {
        let k = rng.gen_range(1..supp.len());
        let mut s = vec![false; pts];
        for i in sample(rng, supp.len(), k).into_iter() {
            s[supp[i].0] = true;
        }
        out.push(s);
    }
    out
}

/// Runs `cfg.trials` random circuits and tests every candidate cut against the
/// expansion bound at each `γ`, at the stated radius and at the proof's locality radius.
pub fn empirical_vertex_theorem(cfg: &TrialConfig) -> Result<TrialReport, ExpansionError> {
    if cfg.n_max < 2 || cfg.n_max + cfg.ancillas_max > super::MAX_SIM_QUBITS {
        return Err(ExpansionError::InvalidArgument(
            "need 2 <= n_max and n_max + ancillas <= 20".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut per_gamma: Vec<GammaSummary> = cfg
        .gammas
        .iter()
        .map(|&gamma| GammaSummary {
            gamma,
            checks: 0,
            violations_stated: 0,
            violations_proof: 0,
            min_slack_stated: f64::INFINITY,
            min_slack_proof: f64::INFINITY,
            checks_below_unit_radius: 0,
            violations_stated_unit: 0,
            first_violation_stated: None,
            first_violation_proof: None,
        })
        .collect();
    let mut report = TrialReport {
        config: cfg.clone(),
        per_gamma: Vec::new(),
        max_blow_up: 1,
        candidates: 0,
        exhaustive_trials: 0,
        exhaustive_inconsistencies: 0,
    };
    for trial in 0..cfg.trials {
        let n = rng.gen_range(2..=cfg.n_max);
        let anc = rng.gen_range(0..=cfg.ancillas_max);
        let depth = rng.gen_range(0..=cfg.depth_max);
        let c = random_circuit(n + anc, depth, &mut rng);
        let b = light_cones(&c).blow_up;
        report.max_blow_up = report.max_blow_up.max(b);
        let p = simulate(&c, n)?;
        let bounds: Vec<_> = cfg
            .gammas
            .iter()
            .map(|&g| theorem_vertex_bound(n, b, g))
            .collect::<Result<_, _>>()?;
        let radius = |ell: f64| {
            if ell < 1.0 {
                0
            } else {
                (ell.floor() as usize).min(n)
            }
        };
        let mut best_at: Vec<f64> = vec![f64::INFINITY; n + 1];
        let sets = candidates(&p, cfg, &mut rng);
        for set in &sets {
            // Both sides summed directly: `1 - mass` leaves rounding residue on full-support sets.
            let (mut mass, mut rest) = (0.0, 0.0);
            for (x, m) in p.support() {
                if set[x.to_u64() as usize] {
                    mass += m;
                } else {
                    rest += m;
                }
            }
            let denom = f64::min(mass, rest);
            if !(denom > 0.0) {
                continue;
            }
            report.candidates += 1;
            let inside = hypercube_distances(n, set);
            let comp: Vec<bool> = set.iter().map(|&s| !s).collect();
            let outside = hypercube_distances(n, &comp);
            // Distance from each support point to the far side of the cut.
            let cross: Vec<(usize, f64)> = p
                .support()
                .iter()
                .map(|(x, m)| {
                    let i = x.to_u64() as usize;
                    (usize::from(if set[i] { outside[i] } else { inside[i] }), *m)
                })
                .collect();
            let boundary = |r: usize| -> f64 {
                if r == 0 {
                    0.0
                } else {
                    cross
                        .iter()
                        .filter(|&&(d, _)| d <= r)
                        .map(|&(_, m)| m)
                        .sum()
                }
            };
            for (r, best) in best_at.iter_mut().enumerate() {
                *best = best.min(boundary(r) / denom);
            }
            for (g, vb) in per_gamma.iter_mut().zip(&bounds) {
                g.checks += 1;
                let violation = |r: usize, ratio: f64| Violation {
                    trial,
                    n,
                    depth,
                    blow_up: b,
                    gamma: vb.gamma,
                    radius: r,
                    set_mass: Some(denom),
                    ratio,
                    bound: vb.lower_bound,
                };
                let rs = radius(vb.ell);
                let ratio = boundary(rs) / denom;
                g.min_slack_stated = g.min_slack_stated.min(ratio / vb.lower_bound);
                if vb.ell < 1.0 {
                    g.checks_below_unit_radius += 1;
                }
                if ratio < vb.lower_bound - VIOLATION_TOL {
                    g.violations_stated += 1;
                    if vb.ell >= 1.0 {
                        g.violations_stated_unit += 1;
                    }
                    g.first_violation_stated
                        .get_or_insert_with(|| violation(rs, ratio));
                }
                let rp = radius(vb.proof_ell);
                let ratio = boundary(rp) / denom;
                g.min_slack_proof = g.min_slack_proof.min(ratio / vb.lower_bound);
                if ratio < vb.lower_bound - VIOLATION_TOL {
                    g.violations_proof += 1;
                    g.first_violation_proof
                        .get_or_insert_with(|| violation(rp, ratio));
                }
            }
        }
        if n <= MAX_EXACT_N {
            report.exhaustive_trials += 1;
            for (r, &best) in best_at.iter().enumerate() {
                match exact_expansion(&p, r as f64) {
                    Ok((h, _)) => {
                        if h > best + VIOLATION_TOL {
                            report.exhaustive_inconsistencies += 1;
                        }
                        for (g, vb) in per_gamma.iter_mut().zip(&bounds) {
                            let stated = radius(vb.ell) == r;
                            let proof = radius(vb.proof_ell) == r;
                            if (stated || proof) && h < vb.lower_bound - VIOLATION_TOL {
                                let v = Violation {
                                    trial,
                                    n,
                                    depth,
                                    blow_up: b,
                                    gamma: vb.gamma,
                                    radius: r,
                                    set_mass: None,
                                    ratio: h,
                                    bound: vb.lower_bound,
                                };
                                if stated {
                                    g.first_violation_stated.get_or_insert_with(|| v.clone());
                                }
                                if proof {
                                    g.violations_proof += 1;
                                    g.first_violation_proof.get_or_insert(v);
                                }
                            }
                        }
                    }
                    Err(ExpansionError::NoValidCandidate) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    report.per_gamma = per_gamma;
    Ok(report)
}
