//! Lattice arithmetic: nearest-point quantization, the two mod operations,
//! and geometric statistics (second moment, radii, normalized second moment).
//!
//! A lattice is G * Z^n for a full-rank generator G whose columns are the
//! basis vectors. Cubic lattices a*Z^n take exact fast paths everywhere;
//! general generators go through cached LLL reduction and Schnorr-Euchner
//! enumeration (see `cvp`).

pub mod cvp;
pub mod stats;

pub use cvp::LatticePoint;
pub use stats::{
    compute_stats, gaussian_normalized_second_moment, scale_to_second_moment, unit_ball_volume,
    LatticeStats,
};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Serializable lattice description used in configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LatticeSpec {
    /// a * Z^n.
    Cubic { n: usize, scale: f64 },
    /// Rows are basis vectors: the lattice is the set of integer combinations
    /// of the rows.
    Generator { rows: Vec<Vec<f64>> },
}

/// A full-rank lattice in R^n with cached inverse generator and (lazily)
/// an LLL-reduced basis for enumeration. Immutable after construction.
#[derive(Debug)]
pub struct Lattice {
    n: usize,
    generator: Matrix,
    inv: Matrix,
    label: String,
    /// Some(a) iff the generator is exactly a * I.
    cubic_scale: Option<f64>,
    reduced: OnceLock<cvp::ReducedBasis>,
}

impl Clone for Lattice {
    fn clone(&self) -> Self {
        Lattice {
            n: self.n,
            generator: self.generator.clone(),
            inv: self.inv.clone(),
            label: self.label.clone(),
            cubic_scale: self.cubic_scale,
            reduced: OnceLock::new(),
        }
    }
}

impl Lattice {
    /// Build from a generator whose columns are the basis vectors.
    pub fn from_generator(generator: Matrix, label: impl Into<String>) -> Result<Lattice> {
        let n = generator.rows;
        if n == 0 || generator.cols != n {
            return Err(Error::invalid("generator must be square and non-empty"));
        }
        if generator.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lattice generator"));
        }
        if generator.det().abs() <= 0.0 {
            return Err(Error::Singular("lattice generator"));
        }
        let inv = generator.inverse()?;
        let cubic_scale = detect_cubic(&generator);
        Ok(Lattice {
            n,
            generator,
            inv,
            label: label.into(),
            cubic_scale,
            reduced: OnceLock::new(),
        })
    }

    /// Build from basis rows (the config-file convention).
    pub fn from_rows(rows: &[Vec<f64>], label: impl Into<String>) -> Result<Lattice> {
        let m = Matrix::from_rows(rows);
        Lattice::from_generator(m.transpose(), label)
    }

    pub fn cubic(n: usize, scale: f64) -> Result<Lattice> {
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::invalid("cubic scale must be positive and finite"));
        }
        let gen = Matrix::identity(n).scale(scale);
        Lattice::from_generator(gen, format!("{scale}*Z^{n}"))
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Lattice> {
        match spec {
            LatticeSpec::Cubic { n, scale } => Lattice::cubic(*n, *scale),
            LatticeSpec::Generator { rows } => Lattice::from_rows(rows, "generator"),
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        match self.cubic_scale {
            Some(a) => LatticeSpec::Cubic { n: self.n, scale: a },
            None => {
                let t = self.generator.transpose();
                let rows = (0..self.n).map(|i| t.data[i * self.n..(i + 1) * self.n].to_vec());
                LatticeSpec::Generator { rows: rows.collect() }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn inverse_generator(&self) -> &Matrix {
        &self.inv
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cubic_scale(&self) -> Option<f64> {
        self.cubic_scale
    }

    pub fn cell_volume(&self) -> f64 {
        self.generator.det().abs()
    }

    /// The scaled lattice a * Lambda.
    pub fn scaled(&self, a: f64) -> Result<Lattice> {
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Lattice::from_generator(self.generator.scale(a), format!("{}*({})", a, self.label))
    }

    fn validate_input(&self, x: &[f64], what: &'static str) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        Ok(())
    }

    fn reduced(&self) -> Result<&cvp::ReducedBasis> {
        if let Some(rb) = self.reduced.get() {
            return Ok(rb);
        }
        let rb = cvp::ReducedBasis::new(&self.generator)?;
        let _ = self.reduced.set(rb);
        Ok(self.reduced.get().expect("just set"))
    }

    /// Nearest lattice point to x.
    ///
    /// Deterministic tie-breaks: cubic lattices round half up componentwise;
    /// general lattices pick the lexicographically smallest coefficient
    /// vector among equidistant points.
    pub fn nearest_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.validate_input(x, "nearest_point input")?;
        if let Some(a) = self.cubic_scale {
            return Ok(x.iter().map(|v| (v / a + 0.5).floor() * a).collect());
        }
        Ok(self.reduced()?.nearest(x)?.point)
    }

    /// Nearest point together with its integer coefficients in this basis.
    pub fn nearest_point_coeffs(&self, x: &[f64]) -> Result<cvp::LatticePoint> {
        self.validate_input(x, "nearest_point input")?;
        if let Some(a) = self.cubic_scale {
            let coeffs: Vec<i64> = x.iter().map(|v| (v / a + 0.5).floor() as i64).collect();
            let point: Vec<f64> = coeffs.iter().map(|c| *c as f64 * a).collect();
            let dist_sq = crate::linalg::norm_sq(&crate::linalg::sub(x, &point));
            return Ok(cvp::LatticePoint { point, coeffs, dist_sq });
        }
        self.reduced()?.nearest(x)
    }

    /// x mod Lambda: the quantization error x - Q(x), lying in the closed
    /// Voronoi cell of the origin.
    pub fn mod_voronoi(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.nearest_point(x)?;
        Ok(crate::linalg::sub(x, &q))
    }

    /// All lattice points within distance `radius` of `center`.
    pub fn enumerate_within(
        &self,
        center: &[f64],
        radius: f64,
        budget: u64,
    ) -> Result<Vec<cvp::LatticePoint>> {
        self.validate_input(center, "enumeration center")?;
        self.reduced()?.enumerate_within(center, radius, budget)
    }

    /// Membership test: is x a lattice point, up to tolerance on the
    /// coefficient residual?
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.validate_input(x, "membership input")?;
        let c = self.inv.matvec(x);
        Ok(c.iter().all(|v| (v - v.round()).abs() <= tol))
    }
}

fn detect_cubic(g: &Matrix) -> Option<f64> {
    let n = g.rows;
    let a = g[(0, 0)];
    if a <= 0.0 {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { a } else { 0.0 };
            if g[(i, j)] != want {
                return None;
            }
        }
    }
    Some(a)
}

/// x mod p*Z^n via componentwise rounding to the nearest smaller multiple of
/// p; every component of the result lies in [0, p).
pub fn mod_cube(p: f64, x: &[f64]) -> Result<Vec<f64>> {
    if p <= 0.0 || !p.is_finite() {
        return Err(Error::invalid("mod_cube modulus must be positive"));
    }
    Ok(x.iter()
        .map(|v| {
            let mut r = v - p * (v / p).floor();
            if r >= p {
                r -= p;
            }
            if r < 0.0 {
                r += p;
            }
            r
        })
        .collect())
}
