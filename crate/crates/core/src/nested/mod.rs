//! Construction-A nested lattice codebooks.
//!
//! A random linear code over Z_p is lifted to the reals and folded into the
//! Voronoi region of a coarse lattice: the codebook is
//! (v + G_Lambda p^-1 C) mod Lambda. The field <-> lattice bijections are
//! exact up to an explicit 1e-9 membership tolerance (all construction paths
//! produce points exact to machine precision, so the threshold is generous).

pub mod field;
pub mod validate;

pub use validate::{full_rank_probability_bound, validate_prop31, Prop31Report};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Tolerance for "this real vector is a point of p^-1 Lambda".
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// An n x m generator matrix over Z_p (row-major), the code being
/// {G w : w in Z_p^m}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCode {
    pub n: usize,
    pub m: usize,
    pub p: u64,
    /// Row-major n x m entries in [0, p).
    pub matrix: Vec<u64>,
    pub full_rank: bool,
}

impl LinearCode {
    pub fn new(n: usize, m: usize, p: u64, matrix: Vec<u64>) -> Result<LinearCode> {
        field::check_modulus(p)?;
        if m > n {
            return Err(Error::invalid(format!("message length {m} exceeds block length {n}")));
        }
        if matrix.len() != n * m {
            return Err(Error::invalid("generator matrix has wrong shape"));
        }
        if matrix.iter().any(|&v| v >= p.max(1)) {
            return Err(Error::invalid("matrix entry out of range [0, p)"));
        }
        let full_rank = field::rank_mod_p(&matrix, n, m, p) == m;
        Ok(LinearCode { n, m, p, matrix, full_rank })
    }

    /// Draw entries i.i.d. uniform over Z_p.
    pub fn draw(n: usize, m: usize, p: u64, rng: &mut impl Rng) -> Result<LinearCode> {
        field::check_modulus(p)?;
        if m > n {
            return Err(Error::invalid(format!("message length {m} exceeds block length {n}")));
        }
        let matrix: Vec<u64> =
            (0..n * m).map(|_| if p == 1 { 0 } else { rng.gen_range(0..p) }).collect();
        LinearCode::new(n, m, p, matrix)
    }

    /// Redraw until full rank; the non-full-rank probability is at most
    /// (p^m - 1) p^-n per draw.
    pub fn draw_full_rank(n: usize, m: usize, p: u64, rng: &mut impl Rng) -> Result<LinearCode> {
        for _ in 0..1000 {
            let code = LinearCode::draw(n, m, p, rng)?;
            if code.full_rank || m == 0 {
                return Ok(code);
            }
        }
        Err(Error::invalid("could not draw a full-rank code in 1000 attempts"))
    }

    /// c = G w over Z_p.
    pub fn encode(&self, w: &[u64]) -> Result<Vec<u64>> {
        if w.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: w.len() });
        }
        if w.iter().any(|&v| v >= self.p.max(1)) {
            return Err(Error::invalid("message entry out of range [0, p)"));
        }
        let mut c = vec![0u64; self.n];
        for i in 0..self.n {
            let mut acc = 0u64;
            for j in 0..self.m {
                acc = (acc + field::mul_mod(self.matrix[i * self.m + j], w[j], self.p))
                    % self.p.max(1);
            }
            c[i] = acc;
        }
        Ok(c)
    }

    /// Number of messages p^m, or an error if it does not fit in u64.
    pub fn message_count(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.m {
            acc = acc.checked_mul(self.p).ok_or(Error::CodebookTooLarge)?;
        }
        Ok(acc)
    }

    /// Base-p digits of i, least-significant first (the pinned index order).
    pub fn message_of_index(&self, i: u64) -> Vec<u64> {
        let mut w = vec![0u64; self.m];
        let mut rem = i;
        for d in w.iter_mut() {
            *d = rem % self.p.max(1);
            rem /= self.p.max(1);
        }
        w
    }

    pub fn index_of_message(&self, w: &[u64]) -> u64 {
        let mut acc = 0u64;
        for &d in w.iter().rev() {
            acc = acc * self.p + d;
        }
        acc
    }

    /// Solve G w = c for w; None when c is not a codeword (or rank deficient).
    pub fn decode_codeword(&self, c: &[u64]) -> Option<Vec<u64>> {
        let s = field::left_inverse_mod_p(&self.matrix, self.n, self.m, self.p)?;
        let mut w = vec![0u64; self.m];
        for i in 0..self.m {
            let mut acc = 0u64;
            for k in 0..self.n {
                acc = (acc + field::mul_mod(s[i * self.n + k], c[k], self.p)) % self.p.max(1);
            }
            w[i] = acc;
        }
        // Verify: left inverses only invert on the column space.
        let back = self.encode(&w).ok()?;
        if back == c {
            Some(w)
        } else {
            None
        }
    }
}

/// Role of a nested codebook in the relaying scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookRole {
    Transmit,
    Quantize,
}

/// A Construction-A nested lattice codebook: coarse lattice, linear code,
/// translate v in p^-1 Lambda intersect V, and the induced fine lattice.
#[derive(Debug)]
pub struct NestedCodebook {
    coarse: Lattice,
    code: LinearCode,
    translate: Vec<f64>,
    role: CodebookRole,
    fine: OnceLock<Lattice>,
}

impl Clone for NestedCodebook {
    fn clone(&self) -> Self {
        NestedCodebook {
            coarse: self.coarse.clone(),
            code: self.code.clone(),
            translate: self.translate.clone(),
            role: self.role,
            fine: OnceLock::new(),
        }
    }
}

impl NestedCodebook {
    pub fn new(
        coarse: Lattice,
        code: LinearCode,
        translate: Vec<f64>,
        role: CodebookRole,
    ) -> Result<NestedCodebook> {
        if code.n != coarse.dimension() {
            return Err(Error::DimensionMismatch { expected: coarse.dimension(), got: code.n });
        }
        if translate.len() != code.n {
            return Err(Error::DimensionMismatch { expected: code.n, got: translate.len() });
        }
        let cb =
            NestedCodebook { coarse, code, translate, role, fine: OnceLock::new() };
        // The translate must already lie in the coarse Voronoi cell and on
        // the scaled-down lattice.
        let folded = cb.coarse.mod_voronoi(&cb.translate)?;
        let drift: f64 = folded
            .iter()
            .zip(&cb.translate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if drift > MEMBERSHIP_TOL {
            return Err(Error::Membership("translate is not inside the Voronoi cell".into()));
        }
        cb.field_vector_of(&cb.translate)?;
        Ok(cb)
    }

    /// Draw v uniformly over p^-1 Lambda intersect V: sample w uniform on
    /// Z_p^n and fold G_Lambda p^-1 w into the cell. Exactly uniform over the
    /// p^n points by the construction bijection.
    pub fn draw_translate(coarse: &Lattice, p: u64, rng: &mut impl Rng) -> Result<Vec<f64>> {
        field::check_modulus(p)?;
        let n = coarse.dimension();
        let w: Vec<f64> = (0..n)
            .map(|_| if p == 1 { 0.0 } else { rng.gen_range(0..p) as f64 })
            .collect();
        let scaled: Vec<f64> = w.iter().map(|v| v / p as f64).collect();
        coarse.mod_voronoi(&coarse.generator().matvec(&scaled))
    }

    pub fn coarse(&self) -> &Lattice {
        &self.coarse
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn translate(&self) -> &[f64] {
        &self.translate
    }

    pub fn role(&self) -> CodebookRole {
        self.role
    }

    pub fn dimension(&self) -> usize {
        self.code.n
    }

    pub fn size(&self) -> Result<u64> {
        self.code.message_count()
    }

    /// Coding rate (1/n) log p^m in nats.
    pub fn rate_nats(&self) -> f64 {
        self.code.m as f64 * (self.code.p as f64).ln() / self.code.n as f64
    }

    /// The fine lattice Lambda_1 = G_Lambda (p^-1 C + Z^n), built from the
    /// Hermite normal form of [G_code | p I].
    pub fn fine_lattice(&self) -> Result<&Lattice> {
        if let Some(l) = self.fine.get() {
            return Ok(l);
        }
        let n = self.code.n;
        let p = self.code.p as i128;
        let mut cols: Vec<Vec<i128>> = Vec::with_capacity(self.code.m + n);
        for j in 0..self.code.m {
            cols.push((0..n).map(|i| self.code.matrix[i * self.code.m + j] as i128).collect());
        }
        for i in 0..n {
            let mut c = vec![0i128; n];
            c[i] = p;
            cols.push(c);
        }
        let h = field::hnf_column_basis(&mut cols, n)?;
        let pf = self.code.p as f64;
        let mut gen = crate::linalg::Matrix::zeros(n, n);
        for (j, col) in h.iter().enumerate() {
            for i in 0..n {
                gen[(i, j)] = col[i] as f64 / pf;
            }
        }
        let fine = Lattice::from_generator(
            self.coarse.generator().matmul(&gen),
            format!("fine({})", self.coarse.label()),
        )?;
        let _ = self.fine.set(fine);
        Ok(self.fine.get().expect("just set"))
    }

    /// Codeword for index i: (v + G_Lambda p^-1 c(i)) mod Lambda, with
    /// w(i) enumerated by base-p digits, least significant first.
    pub fn codeword(&self, i: u64) -> Result<Vec<f64>> {
        let count = self.size()?;
        if i >= count {
            return Err(Error::invalid(format!("codeword index {i} out of range [0, {count})")));
        }
        let w = self.code.message_of_index(i);
        let c = self.code.encode(&w)?;
        let pf = self.code.p as f64;
        let scaled: Vec<f64> = c.iter().map(|&v| v as f64 / pf).collect();
        let fine_point = self.coarse.mod_voronoi(&self.coarse.generator().matvec(&scaled))?;
        if self.translate.iter().all(|&v| v == 0.0) {
            return Ok(fine_point);
        }
        let shifted = crate::linalg::add(&self.translate, &fine_point);
        self.coarse.mod_voronoi(&shifted)
    }

    /// The Eq.-8 bijection restricted to points of p^-1 Lambda intersect V:
    /// y -> round(p mod_cube(1, G^-1 y)) mod p. The input must not carry the
    /// codebook translate.
    pub fn point_to_field(&self, y: &[f64]) -> Result<Vec<u64>> {
        self.field_vector_of(y)
    }

    fn field_vector_of(&self, y: &[f64]) -> Result<Vec<u64>> {
        field_vector(&self.coarse, self.code.p, y)
    }

    /// Remove the translate: (y - v) mod Lambda.
    pub fn detranslate(&self, y: &[f64]) -> Result<Vec<f64>> {
        let shifted = crate::linalg::sub(y, &self.translate);
        self.coarse.mod_voronoi(&shifted)
    }

    /// Index of a codebook point. `detranslated` says whether the translate
    /// has already been removed by the caller.
    pub fn index_of_point(&self, y: &[f64], detranslated: bool) -> Result<u64> {
        let base = if detranslated || self.translate.iter().all(|&v| v == 0.0) {
            y.to_vec()
        } else {
            self.detranslate(y)?
        };
        let c = self.field_vector_of(&base)?;
        let w = self
            .code
            .decode_codeword(&c)
            .ok_or_else(|| Error::Membership("point is not a codeword of the fine code".into()))?;
        Ok(self.code.index_of_message(&w))
    }

    /// Serializable description (matrix, translate, coarse spec) for replay.
    pub fn spec(&self) -> CodebookSpec {
        CodebookSpec {
            coarse: self.coarse.spec(),
            n: self.code.n,
            m: self.code.m,
            p: self.code.p,
            matrix: self.code.matrix.clone(),
            translate: self.translate.clone(),
            role: self.role,
        }
    }

    pub fn from_spec(spec: &CodebookSpec) -> Result<NestedCodebook> {
        let coarse = Lattice::from_spec(&spec.coarse)?;
        let code = LinearCode::new(spec.n, spec.m, spec.p, spec.matrix.clone())?;
        NestedCodebook::new(coarse, code, spec.translate.clone(), spec.role)
    }
}

/// Field vector of a point of p^-1 Lambda (folded or not):
/// round(p mod_cube(1, G^-1 y)) mod p, with the membership tolerance applied
/// to the rounding residual.
pub fn field_vector(lattice: &Lattice, p: u64, y: &[f64]) -> Result<Vec<u64>> {
    let n = lattice.dimension();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let pf = p as f64;
    let coords = lattice.inverse_generator().matvec(y);
    let mut out = vec![0u64; n];
    for (k, &c) in coords.iter().enumerate() {
        let scaled = c * pf;
        let nearest = scaled.round();
        if (scaled - nearest).abs() > MEMBERSHIP_TOL {
            return Err(Error::Membership(format!(
                "coordinate {k}: p*G^-1*y = {scaled} is {:.3e} from an integer",
                (scaled - nearest).abs()
            )));
        }
        out[k] = (nearest as i64).rem_euclid(p.max(1) as i64) as u64;
    }
    Ok(out)
}

/// JSON-serializable codebook description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookSpec {
    pub coarse: LatticeSpec,
    pub n: usize,
    pub m: usize,
    pub p: u64,
    pub matrix: Vec<u64>,
    pub translate: Vec<f64>,
    pub role: CodebookRole,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn z2() -> Lattice {
        Lattice::cubic(2, 1.0).unwrap()
    }

    /// G = (1,2)^T over Z_3, n=2, m=1.
    fn small_code() -> LinearCode {
        LinearCode::new(2, 1, 3, vec![1, 2]).unwrap()
    }

    #[test]
    fn draw_code_entry_frequencies_are_uniform() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let draws = 100_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..draws {
            let code = LinearCode::draw(2, 1, 3, &mut rng).unwrap();
            for &e in &code.matrix {
                counts[e as usize] += 1;
            }
        }
        let total: u64 = counts.iter().sum();
        let expect = total as f64 / 3.0;
        let sigma = (total as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn forced_zero_matrix_is_rank_deficient() {
        let code = LinearCode::new(3, 2, 5, vec![0; 6]).unwrap();
        assert!(!code.full_rank);
        assert_eq!(code.message_count().unwrap(), 25);
    }

    #[test]
    fn identity_embedded_matrix_is_full_rank() {
        // First m rows = I_m mod p.
        let code = LinearCode::new(3, 2, 5, vec![1, 0, 0, 1, 3, 4]).unwrap();
        assert!(code.full_rank);
    }

    #[test]
    fn encode_field_examples() {
        let code = small_code();
        assert_eq!(code.encode(&[1]).unwrap(), vec![1, 2]);
        // 2*2 = 4 = 1 mod 3
        assert_eq!(code.encode(&[2]).unwrap(), vec![2, 1]);
        assert_eq!(code.encode(&[0]).unwrap(), vec![0, 0]);
        assert!(code.encode(&[3]).is_err());
    }

    #[test]
    fn codeword_example_direct() {
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        let y = cb.codeword(1).unwrap();
        assert!((y[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((y[1] - 2.0 / 3.0 + 1.0).abs() < 1e-12 || (y[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn codeword_zero_index_is_translate() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let v = NestedCodebook::draw_translate(&z2(), 3, &mut rng).unwrap();
        let cb = NestedCodebook::new(z2(), small_code(), v.clone(), CodebookRole::Transmit)
            .unwrap();
        let y = cb.codeword(0).unwrap();
        assert!((y[0] - v[0]).abs() < 1e-12 && (y[1] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn full_rank_codes_have_distinct_codewords() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let z3 = Lattice::cubic(3, 1.0).unwrap();
        for _ in 0..100 {
            let code = LinearCode::draw_full_rank(3, 2, 2, &mut rng).unwrap();
            let v = NestedCodebook::draw_translate(&z3, 2, &mut rng).unwrap();
            let cb = NestedCodebook::new(z3.clone(), code, v, CodebookRole::Transmit).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for i in 0..cb.size().unwrap() {
                let y = cb.codeword(i).unwrap();
                let key: Vec<i64> = y.iter().map(|v| (v * 2e9).round() as i64).collect();
                seen.insert(key);
            }
            assert_eq!(seen.len(), 4, "p^m distinct codewords when full rank");
        }
    }

    #[test]
    fn point_to_field_inverts_codeword_example() {
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        // (1/3, 2/3) is the lift of c = (1, 2); the folded representative is
        // equivalent mod Z^2.
        let c = cb.point_to_field(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(c, vec![1, 2]);
        assert_eq!(cb.point_to_field(&[0.0, 0.0]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn field_lattice_roundtrip_is_exact_on_all_points() {
        // All p^n points of p^-1 Z^n in the cell, n=2, p in {2,3}.
        for p in [2u64, 3] {
            let lat = z2();
            for a in 0..p {
                for b in 0..p {
                    let raw = [a as f64 / p as f64, b as f64 / p as f64];
                    let folded = lat.mod_voronoi(&raw).unwrap();
                    let cb = NestedCodebook::new(
                        lat.clone(),
                        LinearCode::new(2, 2, p, vec![1, 0, 0, 1]).unwrap(),
                        vec![0.0, 0.0],
                        CodebookRole::Transmit,
                    )
                    .unwrap();
                    let c = cb.point_to_field(&folded).unwrap();
                    assert_eq!(c, vec![a, b]);
                    // field -> point -> field
                    let idx = cb.code().index_of_message(&c);
                    let y = cb.codeword(idx).unwrap();
                    assert_eq!(cb.point_to_field(&y).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn membership_tolerance_rejects_off_lattice_points() {
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        let err = cb.point_to_field(&[0.1234, 0.5]).unwrap_err();
        assert!(matches!(err, Error::Membership(_)));
    }

    #[test]
    fn coarse_points_map_to_zero_coset() {
        // Nesting: every coarse lattice point lies in the fine lattice and
        // reduces to the zero field vector.
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        for _ in 0..50 {
            let k = [rng.gen_range(-5..5) as f64, rng.gen_range(-5..5) as f64];
            let pt = cb.coarse().generator().matvec(&k);
            let folded = cb.coarse().mod_voronoi(&pt).unwrap();
            assert_eq!(cb.point_to_field(&folded).unwrap(), vec![0, 0]);
        }
    }

    #[test]
    fn translate_draw_is_uniform_on_z1() {
        let z1 = Lattice::cubic(1, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let draws = 100_000;
        let mut zero = 0u64;
        for _ in 0..draws {
            let v = NestedCodebook::draw_translate(&z1, 2, &mut rng).unwrap();
            // values in {0, 0.5} up to the cell fold: 0.5 folds to -0.5.
            if v[0].abs() < 1e-12 {
                zero += 1;
            } else {
                assert!((v[0].abs() - 0.5).abs() < 1e-12, "unexpected translate {v:?}");
            }
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((zero as f64 - draws as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn translate_draw_chi_square_on_z2_p3() {
        let mut rng = ChaCha12Rng::seed_from_u64(18);
        let lat = z2();
        let mut counts = vec![0u64; 9];
        for _ in 0..100_000 {
            let v = NestedCodebook::draw_translate(&lat, 3, &mut rng).unwrap();
            let cell = validate::point_cell(&lat, &v, 3).unwrap();
            counts[cell] += 1;
        }
        let (_, p_value) = validate::chi_square_uniform(&counts);
        assert!(p_value > 0.01, "p = {p_value}");
        assert_eq!(counts.iter().filter(|&&c| c > 0).count(), 9);
    }

    #[test]
    fn translate_p1_is_always_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        let v = NestedCodebook::draw_translate(&z2(), 1, &mut rng).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }

    #[test]
    fn fine_lattice_nests_between_scaled_lattices() {
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        let fine = cb.fine_lattice().unwrap();
        // Covolume |V_fine| = |V| / p^m = 1/3.
        assert!((fine.cell_volume() - 1.0 / 3.0).abs() < 1e-9);
        // Every codeword is a fine-lattice point.
        for i in 0..3 {
            let y = cb.codeword(i).unwrap();
            assert!(fine.contains(&y, 1e-9).unwrap());
        }
        // Coarse points belong to the fine lattice (nesting).
        assert!(fine.contains(&[4.0, -3.0], 1e-9).unwrap());
    }

    #[test]
    fn codeword_norms_bounded_by_coarse_covering_radius() {
        let cb =
            NestedCodebook::new(z2(), small_code(), vec![0.0, 0.0], CodebookRole::Transmit)
                .unwrap();
        let stats = crate::lattice::compute_stats(&z2(), 1, 0).unwrap();
        for i in 0..3 {
            let y = cb.codeword(i).unwrap();
            let norm = crate::linalg::norm_sq(&y).sqrt();
            assert!(norm <= stats.covering_radius_upper + 1e-12);
        }
    }

    #[test]
    fn index_of_point_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let v = NestedCodebook::draw_translate(&z2(), 3, &mut rng).unwrap();
        let cb = NestedCodebook::new(z2(), small_code(), v, CodebookRole::Transmit).unwrap();
        for i in 0..3 {
            let y = cb.codeword(i).unwrap();
            assert_eq!(cb.index_of_point(&y, false).unwrap(), i);
        }
    }
}
