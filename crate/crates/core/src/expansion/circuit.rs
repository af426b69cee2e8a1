use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Distribution, ExpansionError, MAX_SIM_QUBITS};
use crate::gf2::BitVector;

pub const UNITARY_TOL: f64 = 1e-10;
/// Squared amplitudes at or below this are dropped from simulated distributions.
pub const MASS_FLOOR: f64 = 1e-14;

/// A 1- or 2-qubit gate. For two qubits `[a, b]` the local basis index is
/// `2·bit_a + bit_b`, and `unitary` is row-major as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub qubits: Vec<usize>,
    pub unitary: Vec<[f64; 2]>,
}

impl Gate {
    #[must_use]
    pub fn new(qubits: Vec<usize>, u: &[Complex64]) -> Self {
        Self {
            qubits,
            unitary: u.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    #[must_use]
    pub fn matrix(&self) -> Vec<Complex64> {
        self.unitary
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect()
    }

    #[must_use]
    pub fn hadamard(q: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(vec![q], &[c(h), c(h), c(h), c(-h)])
    }

    /// CNOT with control `c` and target `t`.
    #[must_use]
    pub fn cnot(c: usize, t: usize) -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        #[rustfmt::skip]
        let u = [
            o, z, z, z,
            z, o, z, z,
            z, z, z, o,
            z, z, o, z,
        ];
        Self::new(vec![c, t], &u)
    }

    fn validate(&self, n: usize) -> Result<(), ExpansionError> {
        let k = self.qubits.len();
        if !(1..=2).contains(&k) {
            return Err(ExpansionError::InvalidCircuit(format!(
                "gate on {k} qubits"
            )));
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= n) {
            return Err(ExpansionError::InvalidCircuit(format!(
                "qubit {q} out of range {n}"
            )));
        }
        if k == 2 && self.qubits[0] == self.qubits[1] {
            return Err(ExpansionError::InvalidCircuit(
                "gate repeats a qubit".into(),
            ));
        }
        let dim = 1usize << k;
        if self.unitary.len() != dim * dim {
            return Err(ExpansionError::InvalidCircuit(format!(
                "{k}-qubit gate needs {} entries, found {}",
                dim * dim,
                self.unitary.len()
            )));
        }
        let u = self.matrix();
        for i in 0..dim {
            for j in 0..dim {
                let s: Complex64 = (0..dim)
                    .map(|r| u[r * dim + i].conj() * u[r * dim + j])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (s - Complex64::new(target, 0.0)).norm() > UNITARY_TOL {
                    return Err(ExpansionError::InvalidCircuit("gate is not unitary".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub layers: Vec<Vec<Gate>>,
}

impl Circuit {
    #[must_use]
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            layers: Vec::new(),
        }
    }

    /// Checks qubit ranges, disjointness within layers and unitarity.
    pub fn validate(&self) -> Result<(), ExpansionError> {
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n];
            for g in layer {
                g.validate(self.n)?;
                for &q in &g.qubits {
                    if std::mem::replace(&mut used[q], true) {
                        return Err(ExpansionError::InvalidCircuit(format!(
                            "qubit {q} used twice in layer {li}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[must_use]
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn from_json(text: &str) -> Result<Self, ExpansionError> {
        let c: Self =
            serde_json::from_str(text).map_err(|e| ExpansionError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    #[must_use]
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }
}

/// `U|0^N>` as a dense amplitude vector; qubit `q` is bit `q` of the index.
pub fn statevector(c: &Circuit) -> Result<Vec<Complex64>, ExpansionError> {
    if c.n > MAX_SIM_QUBITS {
        return Err(ExpansionError::TooManyQubits {
            n: c.n,
            limit: MAX_SIM_QUBITS,
        });
    }
    c.validate()?;
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << c.n];
    psi[0] = Complex64::new(1.0, 0.0);
    for layer in &c.layers {
        for g in layer {
            apply(&mut psi, g);
        }
    }
    Ok(psi)
}

fn apply(psi: &mut [Complex64], g: &Gate) {
    let u = g.matrix();
    match g.qubits[..] {
        [a] => {
            let ma = 1usize << a;
            for i in 0..psi.len() {
                if i & ma == 0 {
                    let (x0, x1) = (psi[i], psi[i | ma]);
                    psi[i] = u[0] * x0 + u[1] * x1;
                    psi[i | ma] = u[2] * x0 + u[3] * x1;
                }
            }
        }
        [a, b] => {
            let (ma, mb) = (1usize << a, 1usize << b);
            for i in 0..psi.len() {
                if i & (ma | mb) == 0 {
                    let idx = [i, i | mb, i | ma, i | ma | mb];
                    let x = idx.map(|j| psi[j]);
                    for (r, &j) in idx.iter().enumerate() {
                        psi[j] = (0..4).map(|c| u[r * 4 + c] * x[c]).sum();
                    }
                }
            }
        }
        _ => unreachable!("validated gate arity"),
    }
}

/// Output distribution of the first `keep` qubits.
pub fn simulate(c: &Circuit, keep: usize) -> Result<Distribution, ExpansionError> {
    if keep > c.n {
        return Err(ExpansionError::InvalidCircuit(format!(
            "cannot keep {keep} of {} qubits",
            c.n
        )));
    }
    let psi = statevector(c)?;
    let mask = (1usize << keep) - 1;
    let mut masses = vec![0.0; 1 << keep];
    for (i, a) in psi.iter().enumerate() {
        masses[i & mask] += a.norm_sqr();
    }
    Distribution::from_dense(keep, &masses, MASS_FLOOR)
}

/// Light cone of every output qubit and the blow-up `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightConeReport {
    pub sizes: Vec<usize>,
    pub blow_up: usize,
}

#[must_use]
pub fn light_cones(c: &Circuit) -> LightConeReport {
    let sizes: Vec<usize> = (0..c.n)
        .map(|out| {
            let mut cone = BitVector::unit(c.n, out);
            for layer in c.layers.iter().rev() {
                for g in layer {
                    if g.qubits.iter().any(|&q| cone.get(q)) {
                        for &q in &g.qubits {
                            cone.set(q, true);
                        }
                    }
                }
            }
            cone.weight()
        })
        .collect();
    let blow_up = sizes.iter().copied().max().unwrap_or(1).max(1);
    LightConeReport { sizes, blow_up }
}

/// Haar-random `dim × dim` unitary by Gram–Schmidt on a complex Gaussian matrix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|r| cols[k][r].conj() * cols[j][r]).sum();
            for r in 0..dim {
                let v = cols[k][r];
                cols[j][r] -= proj * v;
            }
        }
        let norm = cols[j].iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            u[r * dim + j] = *z;
        }
    }
    u
}

/// A layer of Haar single-qubit gates followed by `depth` layers of Haar two-qubit
/// gates on random pairings; an unpaired qubit gets a single-qubit gate.
pub fn random_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    let mut layers = vec![(0..n)
        .map(|q| Gate::new(vec![q], &haar_unitary(2, rng)))
        .collect()];
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..depth {
        order.shuffle(rng);
        let mut layer: Vec<Gate> = order
            .chunks_exact(2)
            .map(|p| Gate::new(p.to_vec(), &haar_unitary(4, rng)))
            .collect();
        if n % 2 == 1 {
            layer.push(Gate::new(vec![order[n - 1]], &haar_unitary(2, rng)));
        }
        layers.push(layer);
    }
    Circuit { n, layers }
}
