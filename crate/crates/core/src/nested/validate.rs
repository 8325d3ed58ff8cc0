//! Statistical validators for the random nested-codebook ensemble: marginal
//! uniformity of a fixed codeword over p^-1 Lambda intersect V, pairwise
//! independence of two distinct codewords, and the full-rank probability
//! bound for the random generator matrix.

use super::{CodebookRole, LinearCode, NestedCodebook};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper bound on the probability that the random n x m generator over Z_p
/// is rank deficient: (p^m - 1) p^-n.
pub fn full_rank_probability_bound(n: usize, m: usize, p: u64) -> f64 {
    let pf = p as f64;
    (pf.powi(m as i32) - 1.0) * pf.powi(-(n as i32))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prop31Report {
    pub trials: u64,
    pub index_i: u64,
    pub index_j: Option<u64>,
    pub marginal_cells: usize,
    pub marginal_chi2: f64,
    pub marginal_dof: usize,
    pub marginal_p_value: f64,
    pub joint_cells: usize,
    pub joint_chi2: f64,
    pub joint_dof: usize,
    pub joint_p_value: f64,
}

/// Chi-square statistic and p-value against the uniform distribution over
/// `counts.len()` cells.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let cells = counts.len();
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / cells as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = (cells - 1) as f64;
    let dist = ChiSquared::new(dof).expect("dof >= 1");
    (stat, 1.0 - dist.cdf(stat))
}

/// Monte Carlo check of the ensemble's marginal (Eq.-10 style) and pairwise
/// (Eq.-11 style) statistics: over `trials` independent codebook draws,
/// tabulates the cell of codeword i against uniform 1/p^n and the joint cell
/// of codewords (i, j) against uniform 1/p^(2n).
pub fn validate_prop31(
    coarse: &Lattice,
    m: usize,
    p: u64,
    trials: u64,
    rng: &mut impl Rng,
) -> Result<Prop31Report> {
    let n = coarse.dimension();
    let cells = (p as u128).checked_pow(n as u32).ok_or(Error::CodebookTooLarge)?;
    if cells > 1 << 14 {
        return Err(Error::invalid(format!(
            "tabulation over p^n = {cells} cells is too large; use a smaller instance"
        )));
    }
    let cells = cells as usize;
    let joint_cells = cells * cells;
    if joint_cells > 1 << 24 {
        return Err(Error::invalid("joint tabulation too large"));
    }

    // Fixed index pair; for the degenerate single-codeword case only the
    // marginal (translate-uniformity) test is meaningful.
    let count = {
        let code = LinearCode::new(n, m, p, vec![0; n * m])?;
        code.message_count()?
    };
    let index_i = if count > 1 { 1 } else { 0 };
    let index_j = if count > 1 { Some(count - 1) } else { None };
    if let Some(j) = index_j {
        if j == index_i {
            return Err(Error::invalid("instance too small for a distinct index pair"));
        }
    }

    let mut marginal = vec![0u64; cells];
    let mut joint = vec![0u64; joint_cells];
    for _ in 0..trials {
        let code = LinearCode::draw(n, m, p, rng)?;
        let translate = NestedCodebook::draw_translate(coarse, p, rng)?;
        let cb = NestedCodebook::new(coarse.clone(), code, translate, CodebookRole::Transmit)?;
        let yi = cb.codeword(index_i)?;
        let ci = cell_of(&cb, &yi, p)?;
        marginal[ci] += 1;
        if let Some(j) = index_j {
            let yj = cb.codeword(j)?;
            let cj = cell_of(&cb, &yj, p)?;
            joint[ci * cells + cj] += 1;
        }
    }

    let (m_chi, m_p) = chi_square_uniform(&marginal);
    let (j_chi, j_p) = if index_j.is_some() {
        chi_square_uniform(&joint)
    } else {
        (0.0, 1.0)
    };
    Ok(Prop31Report {
        trials,
        index_i,
        index_j,
        marginal_cells: cells,
        marginal_chi2: m_chi,
        marginal_dof: cells - 1,
        marginal_p_value: m_p,
        joint_cells: if index_j.is_some() { joint_cells } else { 0 },
        joint_chi2: j_chi,
        joint_dof: joint_cells - 1,
        joint_p_value: j_p,
    })
}

/// Cell index of a point of p^-1 Lambda intersect V: its field vector read
/// as base-p digits.
pub fn point_cell(lattice: &Lattice, y: &[f64], p: u64) -> Result<usize> {
    let field = super::field_vector(lattice, p, y)?;
    let mut acc = 0usize;
    for &d in field.iter().rev() {
        acc = acc * p as usize + d as usize;
    }
    Ok(acc)
}

fn cell_of(cb: &NestedCodebook, y: &[f64], p: u64) -> Result<usize> {
    point_cell(cb.coarse(), y, p)
}

/// Empirical frequency of rank-deficient draws, for checking the bound.
pub fn measure_non_full_rank_rate(
    n: usize,
    m: usize,
    p: u64,
    draws: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    let mut bad = 0u64;
    for _ in 0..draws {
        let code = LinearCode::draw(n, m, p, rng)?;
        if !code.full_rank {
            bad += 1;
        }
    }
    Ok(bad as f64 / draws as f64)
}
