//! Geometric statistics of a lattice: second moment, cell volume, normalized
//! second moment, effective and covering radii.
//!
//! Cubic lattices are handled in closed form. General lattices are measured
//! by Monte Carlo: sample uniformly on the fundamental parallelepiped
//! G*[0,1)^n and fold through mod-Voronoi, which is uniform on the Voronoi
//! cell because the mod maps any fundamental region bijectively (a.e.) onto
//! it. The covering radius of a general lattice is only ever reported as a
//! sampled estimate; no goodness constants are assumed at finite n.

use super::Lattice;
use crate::error::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeStats {
    /// sigma^2(Lambda): per-dimension second moment of a point uniform on V.
    pub second_moment: f64,
    /// |V| = |det G|.
    pub cell_volume: f64,
    /// G(Lambda) = sigma^2 / |V|^(2/n).
    pub nsm: f64,
    /// R_l: radius of the ball with volume |V|.
    pub effective_radius: f64,
    /// R_u: exact a*sqrt(n)/2 for cubic; otherwise max sampled cell norm.
    pub covering_radius_upper: f64,
    /// rho_cov = R_u / R_l.
    pub cov_efficiency: f64,
    /// Whether covering_radius_upper is exact or a sampled estimate.
    pub covering_radius_exact: bool,
    /// Monte Carlo sample count (0 when closed form was used).
    pub mc_samples: u64,
    /// Standard error of the second-moment estimate (0 when closed form).
    pub mc_stderr: f64,
}

/// Volume of the n-dimensional unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    let nf = n as f64;
    (0.5 * nf * std::f64::consts::PI.ln() - ln_gamma(0.5 * nf + 1.0)).exp()
}

/// G*_n, the normalized second moment of an n-sphere:
/// Gamma(n/2+1)^(2/n) / ((n+2) pi). Tends to 1/(2 pi e) for large n.
pub fn gaussian_normalized_second_moment(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("sphere dimension must be >= 1"));
    }
    let nf = n as f64;
    let g = ((2.0 / nf) * ln_gamma(0.5 * nf + 1.0)).exp();
    Ok(g / ((nf + 2.0) * std::f64::consts::PI))
}

/// Measure (or evaluate in closed form) the geometric statistics of a
/// lattice. `sample_count` and `rng_seed` drive the Monte Carlo path and are
/// ignored for cubic lattices.
pub fn compute_stats(lattice: &Lattice, sample_count: u64, rng_seed: u64) -> Result<LatticeStats> {
    if sample_count < 1 {
        return Err(Error::invalid("sample_count must be >= 1"));
    }
    let n = lattice.dimension();
    let nf = n as f64;
    let vol = lattice.cell_volume();
    let effective_radius = (vol / unit_ball_volume(n)).powf(1.0 / nf);

    if let Some(a) = lattice.cubic_scale() {
        let second_moment = a * a / 12.0;
        let covering = a * nf.sqrt() / 2.0;
        return Ok(LatticeStats {
            second_moment,
            cell_volume: vol,
            nsm: second_moment / vol.powf(2.0 / nf),
            effective_radius,
            covering_radius_upper: covering,
            cov_efficiency: covering / effective_radius,
            covering_radius_exact: true,
            mc_samples: 0,
            mc_stderr: 0.0,
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let gen = lattice.generator();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut max_norm_sq: f64 = 0.0;
    for _ in 0..sample_count {
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let x = gen.matvec(&u);
        let e = lattice.mod_voronoi(&x)?;
        let ns = crate::linalg::norm_sq(&e);
        let per_dim = ns / nf;
        sum += per_dim;
        sum_sq += per_dim * per_dim;
        max_norm_sq = max_norm_sq.max(ns);
    }
    let m = sample_count as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    let stderr = (var / m).sqrt();
    let covering = max_norm_sq.sqrt();

    Ok(LatticeStats {
        second_moment: mean,
        cell_volume: vol,
        nsm: mean / vol.powf(2.0 / nf),
        effective_radius,
        covering_radius_upper: covering,
        cov_efficiency: covering / effective_radius,
        covering_radius_exact: false,
        mc_samples: sample_count,
        mc_stderr: stderr,
    })
}

/// Scale a lattice so its second moment matches `target`:
/// a = sqrt(target / sigma^2(Lambda)).
pub fn scale_to_second_moment(
    lattice: &Lattice,
    stats: &LatticeStats,
    target: f64,
) -> Result<Lattice> {
    if target <= 0.0 || !target.is_finite() {
        return Err(Error::invalid("target second moment must be positive"));
    }
    let a = (target / stats.second_moment).sqrt();
    lattice.scaled(a)
}
