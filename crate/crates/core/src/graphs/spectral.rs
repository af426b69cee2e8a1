use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// Largest graph handed to the dense eigensolver.
pub const MAX_EIGEN_N: usize = 2048;
/// Slack on the Ramanujan comparison.
pub const EIGEN_TOL: f64 = 1e-9;
const MAX_CHEEGER_N: usize = 20;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectralReport {
    pub n: usize,
    pub d: usize,
    /// Second largest adjacency eigenvalue, with multiplicity.
    pub lambda2: f64,
    /// `(d - lambda2) / 2`.
    pub cheeger_lb: f64,
    /// `2 sqrt(d - 1)`.
    pub ramanujan_bound: f64,
    pub is_ramanujan: bool,
}

pub fn spectral_report(g: &Graph) -> Result<SpectralReport, GraphError> {
    let d = g.regular_degree().ok_or(GraphError::NotRegular)?;
    if g.n() > MAX_EIGEN_N {
        return Err(GraphError::TooLarge {
            n: g.n(),
            limit: MAX_EIGEN_N,
        });
    }
    let mut a = vec![vec![0.0; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    let eig = symmetric_eigenvalues(a)?;
    let lambda2 = eig.get(1).copied().unwrap_or(f64::NEG_INFINITY);
    let ramanujan_bound = 2.0 * ((d as f64) - 1.0).max(0.0).sqrt();
    Ok(SpectralReport {
        n: g.n(),
        d,
        lambda2,
        cheeger_lb: (d as f64 - lambda2) / 2.0,
        ramanujan_bound,
        is_ramanujan: lambda2 <= ramanujan_bound + EIGEN_TOL,
    })
}

/// Eigenvalues of a dense symmetric matrix, largest first.
///
/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson-style shifts.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>, GraphError> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

fn tridiagonalize(a: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = a.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in j + 1..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i][i];
    }
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<(), GraphError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(GraphError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerWitness {
    pub h: f64,
    pub set: Vec<usize>,
    pub boundary: usize,
}

/// Edge expansion `min |∂S| / |S|` over `0 < |S| <= n/2`, by enumeration.
/// A graph with fewer than two vertices has no admissible set and gets `+inf`.
pub fn cheeger_exhaustive(g: &Graph) -> Result<f64, GraphError> {
    cheeger_witness(g).map(|w| w.h)
}

pub fn cheeger_witness(g: &Graph) -> Result<CheegerWitness, GraphError> {
    let n = g.n();
    if n > MAX_CHEEGER_N {
        return Err(GraphError::TooLarge {
            n,
            limit: MAX_CHEEGER_N,
        });
    }
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut best: Option<(usize, usize, u32)> = None;
    let (mut set, mut cut) = (0u32, 0usize);
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let inside = (nbr[v] & set).count_ones() as usize;
        if set & (1 << v) == 0 {
            cut = cut + g.degree(v) - 2 * inside;
        } else {
            cut = cut + 2 * inside - g.degree(v);
        }
        set ^= 1 << v;
        let size = set.count_ones() as usize;
        if size == 0 || 2 * size > n {
            continue;
        }
        let better = match best {
            None => true,
            Some((bc, bs, _)) => cut * bs < bc * size,
        };
        if better {
            best = Some((cut, size, set));
        }
    }
    Ok(match best {
        None => CheegerWitness {
            h: f64::INFINITY,
            set: Vec::new(),
            boundary: 0,
        },
        Some((cut, size, s)) => CheegerWitness {
            h: cut as f64 / size as f64,
            set: (0..n).filter(|&v| s & (1 << v) != 0).collect(),
            boundary: cut,
        },
    })
}
