//! Exact closest-vector and sphere enumeration for desk-scale lattices.
//!
//! The generator basis is LLL-reduced once (cached by `Lattice`), then
//! Schnorr-Euchner depth-first enumeration walks integer coefficient
//! vectors in zig-zag order around the Babai estimate, pruning on the
//! partial Gram-Schmidt distance. At n <= 12 this is exact and fast even
//! for the skewed Construction-A bases produced by nested codebooks.

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, Matrix};

/// LLL-reduced copy of a lattice basis plus the data needed for enumeration.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    /// Reduced basis, columns are basis vectors: B' = B * U.
    pub basis: Matrix,
    /// Unimodular transform; original coefficients are U * c'.
    pub transform: Vec<Vec<i64>>,
    /// Gram-Schmidt coefficients mu[i][j] for j < i (over reduced basis).
    mu: Vec<Vec<f64>>,
    /// Squared norms of the Gram-Schmidt vectors.
    bstar_sq: Vec<f64>,
    inv: Matrix,
}

/// A lattice point found by enumeration, with its coefficient vector in the
/// original (unreduced) basis.
#[derive(Debug, Clone)]
pub struct LatticePoint {
    pub point: Vec<f64>,
    pub coeffs: Vec<i64>,
    pub dist_sq: f64,
}

const LLL_DELTA: f64 = 0.99;

fn gram_schmidt(cols: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let n = cols.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar_sq = vec![0.0; n];
    for i in 0..n {
        let mut v = cols[i].clone();
        for j in 0..i {
            let m = crate::linalg::dot(&cols[i], &bstar[j]) / bstar_sq[j];
            mu[i][j] = m;
            for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= m * bk;
            }
        }
        bstar_sq[i] = norm_sq(&v);
        bstar.push(v);
    }
    (bstar, bstar_sq, mu)
}

impl ReducedBasis {
    pub fn new(generator: &Matrix) -> Result<ReducedBasis> {
        let n = generator.rows;
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| generator.col(j)).collect();
        let mut u: Vec<Vec<i64>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { 1 } else { 0 }).collect())
            .collect();

        // LLL with full Gram-Schmidt recomputation after swaps; n is small.
        let (_, mut bstar_sq, mut mu) = gram_schmidt(&cols);
        let mut k = 1;
        let mut guard = 0usize;
        while k < n {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::invalid("LLL failed to converge"));
            }
            for j in (0..k).rev() {
                let q = mu[k][j].round();
                if q != 0.0 {
                    let qi = q as i64;
                    for i in 0..n {
                        let bj = cols[j][i];
                        cols[k][i] -= q * bj;
                        u[k][i] -= qi * u[j][i];
                    }
                    for l in 0..=j {
                        let m = mu[j][l];
                        mu[k][l] -= q * if l == j { 1.0 } else { m };
                    }
                }
            }
            if bstar_sq[k] >= (LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * bstar_sq[k - 1] {
                k += 1;
            } else {
                cols.swap(k, k - 1);
                u.swap(k, k - 1);
                let gs = gram_schmidt(&cols);
                bstar_sq = gs.1;
                mu = gs.2;
                k = (k - 1).max(1);
            }
        }
        let gs = gram_schmidt(&cols);

        let mut basis = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                basis[(i, j)] = cols[j][i];
            }
        }
        // transform[j] holds the original-basis coefficient column of b'_j.
        let inv = basis.inverse()?;
        Ok(ReducedBasis { basis, transform: u, mu: gs.2, bstar_sq: gs.1, inv })
    }

    fn original_coeffs(&self, c: &[i64]) -> Vec<i64> {
        let n = c.len();
        let mut out = vec![0i64; n];
        for j in 0..n {
            if c[j] == 0 {
                continue;
            }
            for i in 0..n {
                out[i] += c[j] * self.transform[j][i];
            }
        }
        out
    }

    /// All lattice points within (closed) distance `radius` of `target`.
    ///
    /// `budget` caps the number of enumeration tree nodes visited.
    pub fn enumerate_within(
        &self,
        target: &[f64],
        radius: f64,
        budget: u64,
    ) -> Result<Vec<LatticePoint>> {
        let r2 = radius * radius * (1.0 + 1e-12) + 1e-12;
        let mut walker = Walker::new(self, target, r2, budget, false);
        walker.run()?;
        let mut found: Vec<LatticePoint> = walker
            .results
            .into_iter()
            .map(|(c, d2)| self.materialize(&c, d2))
            .collect();
        found.sort_by(|a, b| {
            a.dist_sq
                .partial_cmp(&b.dist_sq)
                .unwrap()
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        Ok(found)
    }

    /// Closest lattice point; exact ties resolved to the lexicographically
    /// smallest coefficient vector in the original basis.
    pub fn nearest(&self, target: &[f64]) -> Result<LatticePoint> {
        // Babai rounding gives a valid upper bound on the distance.
        let w = self.inv.matvec(target);
        let c0: Vec<i64> = w.iter().map(|x| x.round() as i64).collect();
        let p0: Vec<f64> = self.point_of(&c0);
        let d0 = norm_sq(&crate::linalg::sub(&p0, target));
        let r2 = d0 * (1.0 + 1e-9) + 1e-12;

        let mut walker = Walker::new(self, target, r2, u64::MAX, true);
        walker.run()?;
        let best = walker.best_d2;
        let tol = 1e-9 * (1.0 + best);
        let mut ties: Vec<LatticePoint> = walker
            .results
            .into_iter()
            .filter(|(_, d2)| *d2 <= best + tol)
            .map(|(c, d2)| self.materialize(&c, d2))
            .collect();
        ties.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
        Ok(ties.into_iter().next().expect("walker returns Babai point at minimum"))
    }

    fn point_of(&self, c: &[i64]) -> Vec<f64> {
        let n = c.len();
        let mut p = vec![0.0; n];
        for j in 0..n {
            if c[j] == 0 {
                continue;
            }
            let cj = c[j] as f64;
            for i in 0..n {
                p[i] += cj * self.basis[(i, j)];
            }
        }
        p
    }

    fn materialize(&self, c: &[i64], d2: f64) -> LatticePoint {
        LatticePoint { point: self.point_of(c), coeffs: self.original_coeffs(c), dist_sq: d2 }
    }
}

/// Depth-first Schnorr-Euchner walker over coefficient vectors.
///
/// Distance decomposition: for v = sum_j c_j b_j and t = B w,
/// ||v - t||^2 = sum_j ||b*_j||^2 ((c_j - w_j) + sum_{i>j} (c_i - w_i) mu_ij)^2,
/// so each level contributes bstar_sq[level] * (c - center)^2 with the center
/// determined by the coefficients already fixed above it.
struct Walker<'a> {
    rb: &'a ReducedBasis,
    w: Vec<f64>,
    r2: f64,
    shrink: bool,
    best_d2: f64,
    budget: u64,
    nodes: u64,
    coeffs: Vec<i64>,
    results: Vec<(Vec<i64>, f64)>,
}

impl<'a> Walker<'a> {
    fn new(rb: &'a ReducedBasis, target: &[f64], r2: f64, budget: u64, shrink: bool) -> Self {
        let w = rb.inv.matvec(target);
        let n = w.len();
        Walker {
            rb,
            w,
            r2,
            shrink,
            best_d2: f64::INFINITY,
            budget,
            nodes: 0,
            coeffs: vec![0; n],
            results: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<()> {
        let n = self.w.len();
        self.descend(n - 1, 0.0)?;
        Ok(())
    }

    fn center(&self, level: usize) -> f64 {
        let n = self.w.len();
        let mut c = self.w[level];
        for i in level + 1..n {
            c -= (self.coeffs[i] as f64 - self.w[i]) * self.rb.mu[i][level];
        }
        c
    }

    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        let center = self.center(level);
        let start = center.round() as i64;
        // Zig-zag: start, start+1, start-1, start+2, ... ordered by distance.
        let mut offset = 0i64;
        let mut tried_any = false;
        loop {
            let candidates: &[i64] = if offset == 0 {
                &[0]
            } else {
                &[offset, -offset]
            };
            let mut alive = false;
            for &off in candidates {
                let c = start + off;
                let diff = c as f64 - center;
                let term = self.rb.bstar_sq[level] * diff * diff;
                let d = partial + term;
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::BudgetExceeded { spent: self.nodes, budget: self.budget });
                }
                let limit = if self.shrink {
                    self.r2.min(self.best_d2 * (1.0 + 1e-9) + 1e-12)
                } else {
                    self.r2
                };
                if d > limit {
                    continue;
                }
                alive = true;
                tried_any = true;
                self.coeffs[level] = c;
                if level == 0 {
                    if d < self.best_d2 {
                        self.best_d2 = d;
                    }
                    self.results.push((self.coeffs.clone(), d));
                } else {
                    self.descend(level - 1, d)?;
                }
            }
            if !alive && tried_any {
                break;
            }
            if !alive && offset > 0 {
                // Neither side alive before anything was found: interval empty.
                break;
            }
            offset += 1;
            // Hard stop: both sides out of the pruning interval.
            let lo = start - offset;
            let hi = start + offset;
            let dlo = (lo as f64 - center).abs();
            let dhi = (hi as f64 - center).abs();
            let min_next = dlo.min(dhi);
            if partial + self.rb.bstar_sq[level] * min_next * min_next > self.r2 && offset > 1 {
                break;
            }
        }
        Ok(())
    }
}
