//! Small-integer-relation search: looks for `a ∈ Z^n \ {0}` with
//! `|a_i| ≤ bound` and `Σ a_i·x_i = 0` by LLL reduction of the lattice
//! spanned by `(e_i, ⌊2^bits·x_i⌋)`. A hit is confirmed exactly when the
//! values lie in the radical fragment. Absence of a hit is evidence, not proof.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{eval_interval, ConstExpr, ExactError, RadicalForm};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = b.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<BigRational> = b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for j in 0..i {
            let num: BigRational = b[i]
                .iter()
                .zip(&star[j])
                .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
                .sum();
            let m = if norms[j] == BigRational::zero() {
                BigRational::zero()
            } else {
                num / &norms[j]
            };
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &m * sk;
            }
            mu[i][j] = m;
        }
        let nrm: BigRational = v.iter().map(|x| x * x).sum();
        norms.push(nrm);
        star.push(v);
    }
    (mu, norms)
}

/// LLL reduction with parameter 3/4, exact rational arithmetic.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (mut mu, mut norms) = gram_schmidt(basis);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round().to_integer();
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = BigRational::from_integer(q);
                #[allow(clippy::needless_range_loop)]
                for i in 0..j {
                    let d = &qr * &mu[j][i];
                    mu[k][i] -= d;
                }
                mu[k][j] -= &qr;
            }
        }
        let lhs = norms[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (m2, n2) = gram_schmidt(basis);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
}

/// Searches for a small integer relation among `values`.
pub fn find_small_relation(values: &[ConstExpr], bound: u64, bits: u32) -> Result<Option<Vec<BigInt>>, ExactError> {
    let n = values.len();
    if n < 2 {
        return Ok(None);
    }
    let scale = BigRational::from_integer(BigInt::one() << bits);
    let mut scaled = Vec::with_capacity(n);
    for v in values {
        let iv = eval_interval(v, bits + 32)?;
        scaled.push((iv.lo().to_rational() * &scale).floor().to_integer());
    }
    let mut basis: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n + 1];
            row[i] = BigInt::one();
            row[n] = scaled[i].clone();
            row
        })
        .collect();
    lll_reduce(&mut basis);
    let bound_big = BigInt::from(bound);
    for row in &basis {
        let coeffs = &row[..n];
        if coeffs.iter().all(Zero::is_zero) || coeffs.iter().any(|a| a.abs() > bound_big) {
            continue;
        }
        let slack: BigInt = coeffs.iter().map(|a| a.abs()).sum::<BigInt>() + 2u32;
        if dot(coeffs, &scaled).abs() > slack {
            continue;
        }
        let combo = coeffs
            .iter()
            .zip(values)
            .fold(ConstExpr::zero(), |acc, (a, v)| acc + ConstExpr::int(a.clone()) * v);
        let genuine = match RadicalForm::from_expr(&combo) {
            Some(f) => f.is_zero(),
            None => eval_interval(&combo, 2 * bits)?.contains_zero(),
        };
        if genuine {
            return Ok(Some(coeffs.to_vec()));
        }
    }
    Ok(None)
}

/// Coefficient vector as plain integers for reporting.
pub fn relation_to_i64(rel: &[BigInt]) -> Vec<i64> {
    rel.iter().map(|a| a.to_i64().unwrap_or(i64::MAX)).collect()
}
