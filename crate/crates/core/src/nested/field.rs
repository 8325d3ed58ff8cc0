//! Mod-p integer linear algebra: primality, rank, left inverses, and the
//! Hermite normal form used to extract a basis for Construction-A lattices.

use crate::error::{Error, Result};

/// Trial-division primality; moduli here are desk-scale small.
/// p = 1 is accepted as the degenerate single-element "field" so that trivial
/// codebooks (a lone codeword) can be expressed.
pub fn check_modulus(p: u64) -> Result<()> {
    if p == 1 {
        return Ok(());
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::NotPrime(p));
        }
        d += 1;
    }
    Ok(())
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && check_modulus(p).is_ok()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid; a != 0 mod p, p prime.
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of non-unit");
    (t.rem_euclid(p as i128)) as u64
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Rank of an n x m matrix over Z_p (row-major, entries already reduced).
pub fn rank_mod_p(matrix: &[u64], n: usize, m: usize, p: u64) -> usize {
    if p == 1 {
        return 0;
    }
    let mut a = matrix.to_vec();
    let mut rank = 0;
    for col in 0..m {
        let pivot = (rank..n).find(|&r| a[r * m + col] % p != 0);
        let Some(pr) = pivot else { continue };
        for j in 0..m {
            a.swap(rank * m + j, pr * m + j);
        }
        let inv = inv_mod(a[rank * m + col], p);
        for j in 0..m {
            a[rank * m + j] = mul_mod(a[rank * m + j], inv, p);
        }
        for r in 0..n {
            if r != rank && a[r * m + col] != 0 {
                let f = a[r * m + col];
                for j in 0..m {
                    let sub = mul_mod(f, a[rank * m + j], p);
                    a[r * m + j] = (a[r * m + j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Left inverse S (m x n) of a full-column-rank n x m matrix over Z_p:
/// S * G = I_m. Returns None if G is rank deficient.
pub fn left_inverse_mod_p(matrix: &[u64], n: usize, m: usize, p: u64) -> Option<Vec<u64>> {
    if p == 1 || m == 0 {
        return Some(vec![0; m * n]);
    }
    // Row-reduce [G | I_n]; the row-op matrix rows at pivot positions form S.
    let width = m + n;
    let mut a = vec![0u64; n * width];
    for i in 0..n {
        for j in 0..m {
            a[i * width + j] = matrix[i * m + j] % p;
        }
        a[i * width + m + i] = 1;
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(m);
    for col in 0..m {
        let pr = (pivot_row..n).find(|&r| a[r * width + col] != 0)?;
        for j in 0..width {
            a.swap(pivot_row * width + j, pr * width + j);
        }
        let inv = inv_mod(a[pivot_row * width + col], p);
        for j in 0..width {
            a[pivot_row * width + j] = mul_mod(a[pivot_row * width + j], inv, p);
        }
        for r in 0..n {
            if r != pivot_row && a[r * width + col] != 0 {
                let f = a[r * width + col];
                for j in 0..width {
                    let sub = mul_mod(f, a[pivot_row * width + j], p);
                    a[r * width + j] = (a[r * width + j] + p - sub) % p;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    let mut s = vec![0u64; m * n];
    for (k, &pr) in pivots.iter().enumerate() {
        for j in 0..n {
            s[k * n + j] = a[pr * width + m + j];
        }
    }
    Some(s)
}

/// Column-style Hermite normal form of the column lattice of an n x k integer
/// matrix (k >= n, full row rank). Returns an n x n lower-triangular basis
/// with positive diagonal, as columns.
pub fn hnf_column_basis(cols: &mut Vec<Vec<i128>>, n: usize) -> Result<Vec<Vec<i128>>> {
    for row in 0..n {
        loop {
            // Pick the column (at index >= row) with the smallest nonzero
            // entry in this row and swap it into position `row`.
            let mut best: Option<(usize, i128)> = None;
            for (j, col) in cols.iter().enumerate().skip(row) {
                let v = col[row].abs();
                if v != 0 && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((j, v));
                }
            }
            let Some((jbest, _)) = best else {
                return Err(Error::invalid("HNF input is not full row rank"));
            };
            cols.swap(row, jbest);
            let pivot = cols[row][row];
            let mut done = true;
            for j in row + 1..cols.len() {
                if cols[j][row] != 0 {
                    let q = div_round(cols[j][row], pivot);
                    if q != 0 {
                        for i in 0..n {
                            let v = cols[row][i];
                            cols[j][i] -= q * v;
                        }
                    }
                    if cols[j][row] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if cols[row][row] < 0 {
            for v in cols[row].iter_mut() {
                *v = -*v;
            }
        }
    }
    Ok(cols[..n].to_vec())
}

fn div_round(a: i128, b: i128) -> i128 {
    // Round-toward-nearest division keeps HNF entries small.
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(check_modulus(2).is_ok());
        assert!(check_modulus(3).is_ok());
        assert!(check_modulus(919).is_ok());
        assert!(check_modulus(1).is_ok()); // degenerate
        assert!(check_modulus(4).is_err());
        assert!(check_modulus(0).is_err());
    }

    #[test]
    fn rank_examples() {
        // Identity embedded: full rank.
        let g = vec![1, 0, 0, 1, 1, 2]; // 3x2 over Z_3: rows (1,0),(0,1),(1,2)
        assert_eq!(rank_mod_p(&g, 3, 2, 3), 2);
        // All zero: rank 0.
        assert_eq!(rank_mod_p(&vec![0; 6], 3, 2, 3), 0);
        // Second column = 2 * first (mod 3): rank 1.
        let g = vec![1, 2, 2, 4 % 3, 0, 0];
        assert_eq!(rank_mod_p(&g, 3, 2, 3), 1);
    }

    #[test]
    fn left_inverse_multiplies_to_identity() {
        let g = vec![1, 2, 2, 1, 1, 1]; // 3x2 over Z_5
        let s = left_inverse_mod_p(&g, 3, 2, 5).unwrap();
        // S*G = I_2
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0u64;
                for k in 0..3 {
                    acc = (acc + mul_mod(s[i * 3 + k], g[k * 2 + j], 5)) % 5;
                }
                assert_eq!(acc, if i == j { 1 } else { 0 });
            }
        }
    }

    #[test]
    fn hnf_of_code_lattice_has_expected_determinant() {
        // [G | 2I] for a full-rank 3x2 code over Z_2: covolume of the coset
        // lattice is 2^(n-m) = 2.
        let n = 3;
        let mut cols: Vec<Vec<i128>> = vec![vec![1, 0, 1], vec![0, 1, 1]];
        for i in 0..n {
            let mut c = vec![0i128; n];
            c[i] = 2;
            cols.push(c);
        }
        let h = hnf_column_basis(&mut cols, n).unwrap();
        let det: i128 = (0..n).map(|i| h[i][i]).product();
        assert_eq!(det, 2);
        // Lower triangular.
        for j in 0..n {
            for i in 0..j {
                assert_eq!(h[j][i], 0);
            }
        }
    }
}
