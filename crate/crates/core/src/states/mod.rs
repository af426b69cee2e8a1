//! Exact measurement statistics of one-logical-qubit CSS code states under Pauli
//! corruption, computed from coset structure alone.
//!
//! A state `α|0_L> + β|1_L>` on logical pair `(bx, bz)` measured in the Z basis is
//! `|α|² U[r0 + ex + S_x] + |β|² U[r1 + ex + S_x]`. In the X basis it is uniform on
//! `ez + K` with weight `|α+β|²` and on `ez + bz + K` with weight `|α-β|²`, halved,
//! where `K = S_x^⊥ ∩ bx^⊥`. Each such piece is an affine space on which logical
//! class, outcome-space membership and Voronoi cell membership are all constant.

mod voronoi;

pub use voronoi::{
    double_certification_pairs, double_certification_sweep, voronoi_classify, ErrorFamily,
    SweepReport, VoronoiOutcome, VoronoiSpec, DEFAULT_DECODER_BUDGET,
};

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::{partition_sets, Basis, CssCode, CssError, LogicalBasis, PartitionSets};
use crate::gf2::{for_each_in_coset, independent_subset, BitVector, Gf2Error};

/// Half width `1/(2√2)` of the uncertainty interval around 1/2.
pub const UNCERTAINTY_HALF_WIDTH: f64 = FRAC_1_SQRT_2 / 2.0;
/// `1/2 - 1/(2√2)`: the smaller class mass some basis must carry for a code state.
pub const MU_CODE_STATE: f64 = 0.5 - UNCERTAINTY_HALF_WIDTH;
/// `1/2 · (1/2 - 1/(2√2))`: the cell mass guaranteed after decoding.
pub const C0: f64 = 0.5 * MU_CODE_STATE;
pub const NORM_TOL: f64 = 1e-12;
/// Largest coset enumerated when computing a marginal.
pub const MARGINAL_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatesError {
    #[error("amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("invalid representative: {0}")]
    InvalidRepresentative(String),
    #[error("vector of length {found} given for {expected} qubits")]
    LengthMismatch { expected: usize, found: usize },
    #[error("planted error is not in the declared family")]
    NotInFamily,
    #[error("family has {size} members, decoder budget is {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("both cells certify the outcome {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `α|0_L> + β|1_L>` on logical pair `index`, other logicals fixed by `r0`.
#[derive(Clone, Debug)]
pub struct LogicalStateSpec<'a> {
    pub code: &'a CssCode,
    pub basis: LogicalBasis,
    pub index: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub r0: BitVector,
}

impl<'a> LogicalStateSpec<'a> {
    pub fn new(
        code: &'a CssCode,
        basis: LogicalBasis,
        index: usize,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self, StatesError> {
        let r0 = BitVector::zeros(code.n());
        Self::with_r0(code, basis, index, alpha, beta, r0)
    }

    pub fn with_r0(
        code: &'a CssCode,
        basis: LogicalBasis,
        index: usize,
        alpha: Complex64,
        beta: Complex64,
        r0: BitVector,
    ) -> Result<Self, StatesError> {
        if index >= basis.k() {
            return Err(CssError::IndexOutOfRange {
                index,
                k: basis.k(),
            }
            .into());
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StatesError::NotNormalized(norm));
        }
        if r0.len() != code.n() {
            return Err(StatesError::LengthMismatch {
                expected: code.n(),
                found: r0.len(),
            });
        }
        if !code.in_sz_perp(&r0) {
            return Err(StatesError::InvalidRepresentative(
                "r0 is not in S_z^perp".into(),
            ));
        }
        if r0.dot(&basis.bz[index]) {
            return Err(StatesError::InvalidRepresentative(
                "r0 pairs with bz".into(),
            ));
        }
        Ok(Self {
            code,
            basis,
            index,
            alpha,
            beta,
            r0,
        })
    }

    /// Real amplitudes `(cos θ, sin θ)`.
    pub fn real(
        code: &'a CssCode,
        basis: LogicalBasis,
        index: usize,
        theta: f64,
    ) -> Result<Self, StatesError> {
        Self::new(
            code,
            basis,
            index,
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        )
    }

    #[must_use]
    pub fn bx(&self) -> &BitVector {
        &self.basis.bx[self.index]
    }

    #[must_use]
    pub fn bz(&self) -> &BitVector {
        &self.basis.bz[self.index]
    }

    #[must_use]
    pub fn r1(&self) -> BitVector {
        &self.r0 ^ self.bx()
    }

    #[must_use]
    pub fn sets(&self) -> PartitionSets<'a> {
        partition_sets(self.code, &self.basis, self.index).expect("index checked at construction")
    }
}

/// `X^ex Z^ez`, up to phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliError {
    pub ex: BitVector,
    pub ez: BitVector,
}

/// Error supports as stored in state files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSupports {
    pub x_support: Vec<usize>,
    pub z_support: Vec<usize>,
}

impl PauliError {
    #[must_use]
    pub fn none(n: usize) -> Self {
        Self {
            ex: BitVector::zeros(n),
            ez: BitVector::zeros(n),
        }
    }

    pub fn from_supports(n: usize, s: &ErrorSupports) -> Result<Self, StatesError> {
        if let Some(&q) = s.x_support.iter().chain(&s.z_support).find(|&&q| q >= n) {
            return Err(StatesError::LengthMismatch {
                expected: n,
                found: q + 1,
            });
        }
        Ok(Self {
            ex: BitVector::from_support(n, &s.x_support),
            ez: BitVector::from_support(n, &s.z_support),
        })
    }

    #[must_use]
    pub fn supports(&self) -> ErrorSupports {
        ErrorSupports {
            x_support: self.ex.support(),
            z_support: self.ez.support(),
        }
    }

    /// Uniform support of exactly `weight` qubits, each hit by X, Z or Y with equal odds.
    pub fn sample(n: usize, weight: usize, rng: &mut impl Rng) -> Self {
        let mut e = Self::none(n);
        for q in sample(rng, n, weight.min(n)).into_iter() {
            match rng.gen_range(0..3) {
                0 => e.ex.set(q, true),
                1 => e.ez.set(q, true),
                _ => {
                    e.ex.set(q, true);
                    e.ez.set(q, true);
                }
            }
        }
        e
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.ex.len()
    }

    #[must_use]
    pub fn support(&self) -> BitVector {
        let mut s = self.ex.clone();
        for q in self.ez.iter_ones() {
            s.set(q, true);
        }
        s
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        self.support().weight()
    }

    /// `|support| / n`.
    #[must_use]
    pub fn fraction(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.weight() as f64 / self.n() as f64
        }
    }

    /// The part that moves outcomes in `basis`: `ex` for Z, `ez` for X.
    #[must_use]
    pub fn shift(&self, basis: Basis) -> &BitVector {
        match basis {
            Basis::Z => &self.ex,
            Basis::X => &self.ez,
        }
    }

    #[must_use]
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        Self {
            ex: self.ex.select(qubits),
            ez: self.ez.select(qubits),
        }
    }

    fn check_len(&self, n: usize) -> Result<(), StatesError> {
        if self.n() == n {
            Ok(())
        } else {
            Err(StatesError::LengthMismatch {
                expected: n,
                found: self.n(),
            })
        }
    }
}

/// Uniform mass on `offset + subspace` for the subspace of its distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct MassPiece {
    pub offset: BitVector,
    pub mass: f64,
}

/// Exact outcome distribution in one basis as two uniform affine pieces.
#[derive(Clone, Debug)]
pub struct BasisDistribution {
    pub basis: Basis,
    pub pieces: [MassPiece; 2],
}

impl BasisDistribution {
    /// Basis of the common direction space: `S_x` for Z and `S_x^⊥ ∩ bx^⊥` for X.
    #[must_use]
    pub fn subspace(&self, spec: &LogicalStateSpec<'_>) -> Vec<BitVector> {
        let code = spec.code;
        match self.basis {
            Basis::Z => independent_subset(code.n(), code.hx().rows()),
            Basis::X => {
                let mut m = code.hx().clone();
                m.push_row(spec.bx().clone());
                m.nullspace_basis().into_rows()
            }
        }
    }
}

pub fn distribution(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    basis: Basis,
) -> Result<BasisDistribution, StatesError> {
    err.check_len(spec.code.n())?;
    let (a, b) = (spec.alpha, spec.beta);
    let pieces = match basis {
        Basis::Z => [
            MassPiece {
                offset: &spec.r0 ^ &err.ex,
                mass: a.norm_sqr(),
            },
            MassPiece {
                offset: &spec.r1() ^ &err.ex,
                mass: b.norm_sqr(),
            },
        ],
        Basis::X => [
            MassPiece {
                offset: err.ez.clone(),
                mass: (a + b).norm_sqr() / 2.0,
            },
            MassPiece {
                offset: &err.ez ^ spec.bz(),
                mass: (a - b).norm_sqr() / 2.0,
            },
        ],
    };
    Ok(BasisDistribution { basis, pieces })
}

/// Masses of the Voronoi cells `S_a = C_a + U`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellMasses {
    pub s0: f64,
    pub s1: f64,
    /// Mass certified by both cells.
    pub both: f64,
    /// Mass certified by neither.
    pub neither: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisMasses {
    pub basis: Basis,
    pub c0: f64,
    pub c1: f64,
    /// Mass outside the outcome space of the code.
    pub elsewhere: f64,
    pub cells: Option<CellMasses>,
}

impl BasisMasses {
    #[must_use]
    pub fn total(&self) -> f64 {
        self.c0 + self.c1 + self.elsewhere
    }
}

fn masses_in(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    basis: Basis,
    cells: Option<&VoronoiSpec<'_>>,
    planted: bool,
) -> Result<BasisMasses, StatesError> {
    let dist = distribution(spec, err, basis)?;
    let sets = spec.sets();
    let mut out = BasisMasses {
        basis,
        c0: 0.0,
        c1: 0.0,
        elsewhere: 0.0,
        cells: None,
    };
    for p in &dist.pieces {
        match sets.classify(basis, &p.offset) {
            Some(0) => out.c0 += p.mass,
            Some(_) => out.c1 += p.mass,
            None => out.elsewhere += p.mass,
        }
    }
    if let Some(v) = cells {
        let mut c = CellMasses {
            s0: 0.0,
            s1: 0.0,
            both: 0.0,
            neither: 0.0,
        };
        let hint = planted.then(|| err.shift(basis));
        for p in &dist.pieces {
            match voronoi_classify(&p.offset, v, hint)? {
                VoronoiOutcome::Cell(0) => c.s0 += p.mass,
                VoronoiOutcome::Cell(_) => c.s1 += p.mass,
                VoronoiOutcome::Ambiguous => {
                    c.s0 += p.mass;
                    c.s1 += p.mass;
                    c.both += p.mass;
                }
                VoronoiOutcome::Uncertified => c.neither += p.mass,
                VoronoiOutcome::Unresolved => {
                    return Err(StatesError::BudgetExceeded {
                        size: v.family.size(spec.code.n()),
                        budget: v.budget,
                    })
                }
            }
        }
        out.cells = Some(c);
    }
    Ok(out)
}

/// Z-basis masses; with `cells`, also the Voronoi cell masses, classified through the
/// planted error when `planted` is set and by the bounded decoder otherwise.
pub fn zbasis_masses(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    cells: Option<&VoronoiSpec<'_>>,
    planted: bool,
) -> Result<BasisMasses, StatesError> {
    masses_in(spec, err, Basis::Z, cells, planted)
}

pub fn xbasis_masses(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    cells: Option<&VoronoiSpec<'_>>,
    planted: bool,
) -> Result<BasisMasses, StatesError> {
    masses_in(spec, err, Basis::X, cells, planted)
}

/// `(<Z^bz>, <X^bx>)` from the amplitudes and the error's commutation signs.
#[must_use]
pub fn logical_expectations(spec: &LogicalStateSpec<'_>, err: &PauliError) -> (f64, f64) {
    let (a, b) = (spec.alpha, spec.beta);
    let sz = if err.ex.dot(spec.bz()) { -1.0 } else { 1.0 };
    let sx = if err.ez.dot(spec.bx()) { -1.0 } else { 1.0 };
    (
        sz * (a.norm_sqr() - b.norm_sqr()),
        sx * 2.0 * (a.conj() * b).re,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub z_mass0: f64,
    pub x_mass0: f64,
    /// Distance from the Z mass to the nearer interval end, positive inside.
    pub z_margin: f64,
    pub x_margin: f64,
    pub holds: bool,
    pub exp_z: f64,
    pub exp_x: f64,
    pub exp_sq_sum: f64,
}

pub fn uncertainty_check(spec: &LogicalStateSpec<'_>) -> Result<UncertaintyReport, StatesError> {
    let err = PauliError::none(spec.code.n());
    let z = zbasis_masses(spec, &err, None, false)?;
    let x = xbasis_masses(spec, &err, None, false)?;
    let margin = |m: f64| UNCERTAINTY_HALF_WIDTH - (m - 0.5).abs();
    let (exp_z, exp_x) = logical_expectations(spec, &err);
    Ok(UncertaintyReport {
        z_mass0: z.c0,
        x_mass0: x.c0,
        z_margin: margin(z.c0),
        x_margin: margin(x.c0),
        holds: margin(z.c0) >= 0.0 || margin(x.c0) >= 0.0,
        exp_z,
        exp_x,
        exp_sq_sum: exp_z * exp_z + exp_x * exp_x,
    })
}

/// Exact marginal on `keep` of the distribution in `basis`, by enumerating each piece.
pub fn marginal(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    basis: Basis,
    keep: &[usize],
    cap: u64,
) -> Result<BTreeMap<BitVector, f64>, StatesError> {
    let dist = distribution(spec, err, basis)?;
    let sub = dist.subspace(spec);
    let mut out = BTreeMap::new();
    for p in &dist.pieces {
        if p.mass == 0.0 {
            continue;
        }
        let mut words = Vec::new();
        for_each_in_coset(&sub, &p.offset, cap, |w| words.push(w.select(keep)))?;
        let each = p.mass / words.len() as f64;
        for w in words {
            *out.entry(w).or_insert(0.0) += each;
        }
    }
    out.retain(|_, m| *m > 0.0);
    Ok(out)
}

/// How disjointness of the two cells in one basis was established.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Disjointness {
    /// Bounded decoder run over the whole family on every outcome piece.
    Decoder {
        doubly_certified_mass: f64,
    },
    /// `dist(S_0, S_1)` is at least this positive bound.
    Distance(i64),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisWitness {
    pub basis: Basis,
    pub s0: f64,
    pub s1: f64,
    pub neither: f64,
    pub distance_lb: Option<i64>,
    pub disjointness: Disjointness,
}

impl BasisWitness {
    /// Both cells at least `C0` and certified disjoint.
    #[must_use]
    pub fn partitions(&self) -> bool {
        let disjoint = match self.disjointness {
            Disjointness::Decoder {
                doubly_certified_mass,
            } => doubly_certified_mass == 0.0,
            Disjointness::Distance(d) => d > 0,
            Disjointness::Unknown => false,
        };
        disjoint && self.s0 >= C0 && self.s1 >= C0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub z: BasisWitness,
    pub x: BasisWitness,
    /// Basis with both cells at least `C0`, larger smaller-cell mass first, Z on ties.
    pub chosen: Option<Basis>,
    pub c0: f64,
}

impl PartitionWitness {
    #[must_use]
    pub fn get(&self, basis: Basis) -> &BasisWitness {
        match basis {
            Basis::Z => &self.z,
            Basis::X => &self.x,
        }
    }
}

/// Cell masses in both bases for an error planted from `family`.
///
/// `distance_lb[0]` and `[1]` are lower bounds on `dist(S_0, S_1)` in the Z and X
/// bases. When the family fits in `budget`, the decoder also checks every outcome
/// piece for double certification.
pub fn partition_witness(
    spec: &LogicalStateSpec<'_>,
    err: &PauliError,
    family: &ErrorFamily,
    distance_lb: [Option<i64>; 2],
    budget: u64,
) -> Result<PartitionWitness, StatesError> {
    let n = spec.code.n();
    let witness = |basis: Basis, lb: Option<i64>| -> Result<BasisWitness, StatesError> {
        if !family.contains(err.shift(basis)) {
            return Err(StatesError::NotInFamily);
        }
        let v = VoronoiSpec::new(spec.sets(), basis, family.clone(), budget);
        let planted = masses_in(spec, err, basis, Some(&v), true)?;
        let cells = planted.cells.expect("cells requested");
        let disjointness = if family.size(n) <= u128::from(budget) {
            let decoded = masses_in(spec, err, basis, Some(&v), false)?;
            let d = decoded.cells.expect("cells requested");
            Disjointness::Decoder {
                doubly_certified_mass: d.both,
            }
        } else if let Some(d) = lb.filter(|&d| d > 0) {
            Disjointness::Distance(d)
        } else {
            Disjointness::Unknown
        };
        Ok(BasisWitness {
            basis,
            s0: cells.s0,
            s1: cells.s1,
            neither: cells.neither,
            distance_lb: lb,
            disjointness,
        })
    };
    let z = witness(Basis::Z, distance_lb[0])?;
    let x = witness(Basis::X, distance_lb[1])?;
    let score = |w: &BasisWitness| w.partitions().then_some(w.s0.min(w.s1));
    let chosen = match (score(&z), score(&x)) {
        (Some(a), Some(b)) => Some(if b > a { Basis::X } else { Basis::Z }),
        (Some(_), None) => Some(Basis::Z),
        (None, Some(_)) => Some(Basis::X),
        (None, None) => None,
    };
    Ok(PartitionWitness {
        z,
        x,
        chosen,
        c0: C0,
    })
}

/// State file: code path, logical index, amplitudes as `[re, im]`, error supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub code_file: String,
    pub logical_index: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default)]
    pub error: ErrorSupports,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl StateFile {
    #[must_use]
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.alpha[0], self.alpha[1]),
            Complex64::new(self.beta[0], self.beta[1]),
        )
    }
}
