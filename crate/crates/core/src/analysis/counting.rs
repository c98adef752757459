//! Exact sequence counts: Whittle's formula for Markov types and type-class sizes.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumeration limit for the brute-force counters, in sequences.
pub const MAX_BRUTE_FORCE: u64 = 1 << 24;

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, v| acc * BigUint::from(v))
}

fn multinomial(counts: &[u64]) -> BigUint {
    let total: u64 = counts.iter().sum();
    counts.iter().fold(factorial(total), |acc, &c| acc / factorial(c))
}

fn check_square(f: &[Vec<u64>], u: usize, v: usize) -> Result<usize> {
    let k = f.len();
    if k == 0 || f.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidDims(format!("transition counts must be a non-empty square matrix, got {k} rows")));
    }
    if u >= k || v >= k {
        return Err(Error::InvalidParameter(format!("states u={u}, v={v} out of range for k={k}")));
    }
    Ok(k)
}

/// Determinant by fraction-exact Gaussian elimination.
fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let d = a.len();
    let mut det = BigRational::one();
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for row in col + 1..d {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor.clone() * src.clone();
            }
        }
    }
    det
}

/// Number of sequences `x_0 .. x_N` over `k` states with `x_0 = u`, `x_N = v`
/// and exactly `f[i][j]` transitions `i -> j` (states 0-based).
///
/// `prod_i (f_i.! / prod_j f_ij!) * G*_vu`, with `G = I - [f_ij / f_i.]`
/// (rows with `f_i. = 0` left as identity rows) and `G*_vu` its `(v, u)` cofactor.
pub fn whittle_count(f: &[Vec<u64>], u: usize, v: usize) -> Result<BigUint> {
    let k = check_square(f, u, v)?;
    let out: Vec<u64> = f.iter().map(|row| row.iter().sum()).collect();
    let inn: Vec<u64> = (0..k).map(|j| f.iter().map(|row| row[j]).sum()).collect();
    for i in 0..k {
        let balance = out[i] as i128 - inn[i] as i128;
        let want = (i == u) as i128 - (i == v) as i128;
        if balance != want {
            return Ok(BigUint::zero());
        }
    }
    let total: u64 = out.iter().sum();
    if total == 0 {
        return Ok(if u == v { BigUint::one() } else { BigUint::zero() });
    }

    let g: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let delta = if i == j { BigRational::one() } else { BigRational::zero() };
                    if out[i] == 0 {
                        delta
                    } else {
                        delta - BigRational::new(BigInt::from(f[i][j]), BigInt::from(out[i]))
                    }
                })
                .collect()
        })
        .collect();
    let minor: Vec<Vec<BigRational>> = (0..k)
        .filter(|&i| i != v)
        .map(|i| (0..k).filter(|&j| j != u).map(|j| g[i][j].clone()).collect())
        .collect();
    let mut cofactor = determinant(minor);
    if (u + v) % 2 == 1 {
        cofactor = -cofactor;
    }
    let scale = f.iter().fold(BigUint::one(), |acc, row| acc * multinomial(row));
    let value = cofactor * BigRational::from_integer(BigInt::from(scale));
    if !value.is_integer() || value.is_negative() {
        return Err(Error::Internal(format!("Whittle count evaluated to {value}, not a nonnegative integer")));
    }
    Ok(value.to_integer().to_biguint().expect("checked nonnegative"))
}

/// Counts the same sequences by enumeration.
pub fn whittle_brute_force(f: &[Vec<u64>], u: usize, v: usize) -> Result<u64> {
    let k = check_square(f, u, v)?;
    let total: u64 = f.iter().flatten().sum();
    let space = (k as f64).powi(total as i32);
    if space > MAX_BRUTE_FORCE as f64 {
        return Err(Error::GuardViolation(format!("{k}^{total} sequences exceed the enumeration limit")));
    }
    let mut hits = 0;
    let mut seen = vec![vec![0u64; k]; k];
    for mut code in 0..(space as u64) {
        for row in seen.iter_mut() {
            row.fill(0);
        }
        let mut prev = u;
        for _ in 0..total {
            let next = (code % k as u64) as usize;
            code /= k as u64;
            seen[prev][next] += 1;
            prev = next;
        }
        if prev == v && seen.as_slice() == f {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Size of a type class and the two sandwich bounds around `2^(n H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeClassCount {
    pub counts: Vec<u64>,
    pub count: BigUint,
    /// Empirical entropy of the type, bits.
    pub entropy: f64,
    /// `(n+1)^(-a) 2^(n H)`.
    pub lower_bound: f64,
    /// `2^(n H)`.
    pub upper_bound: f64,
    /// Both checks below are exact integer comparisons.
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// `n! / prod (n q(a))!` for a type `q` of sequences of length `n`.
pub fn type_class_count(q: &[f64], n: u64) -> Result<TypeClassCount> {
    if q.is_empty() {
        return Err(Error::NotAPmf("empty type".into()));
    }
    let mut counts = Vec::with_capacity(q.len());
    for &p in q {
        let c = p * n as f64;
        let rounded = c.round();
        if !(p >= 0.0) || (c - rounded).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("n*q = {c} is not a nonnegative integer")));
        }
        counts.push(rounded as u64);
    }
    if counts.iter().sum::<u64>() != n {
        return Err(Error::NotAPmf(format!("type counts {counts:?} do not sum to n = {n}")));
    }
    type_class_from_counts(&counts)
}

/// As [`type_class_count`], from the symbol counts directly.
pub fn type_class_from_counts(counts: &[u64]) -> Result<TypeClassCount> {
    if counts.is_empty() {
        return Err(Error::NotAPmf("empty type".into()));
    }
    let n: u64 = counts.iter().sum();
    let a = counts.len() as u32;
    let count = multinomial(counts);
    // |T| <= 2^(nH)  <=>  |T| prod c^c <= n^n
    let pow = |b: u64, e: u64| BigUint::from(b).pow(e as u32);
    let prod_cc = counts.iter().fold(BigUint::one(), |acc, &c| acc * pow(c, c));
    let nn = pow(n, n);
    let upper_holds = &count * &prod_cc <= nn;
    let lower_holds = nn <= &count * &prod_cc * BigUint::from(n + 1).pow(a);
    let entropy = if n == 0 {
        0.0
    } else {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n as f64;
                -p * p.log2()
            })
            .sum()
    };
    let upper_bound = (n as f64 * entropy).exp2();
    Ok(TypeClassCount {
        counts: counts.to_vec(),
        count,
        entropy,
        lower_bound: upper_bound / ((n + 1) as f64).powi(a as i32),
        upper_bound,
        lower_holds,
        upper_holds,
    })
}

/// Number of sequences with the given symbol counts, by enumeration.
pub fn type_class_brute_force(counts: &[u64]) -> Result<u64> {
    let a = counts.len() as u64;
    let n: u64 = counts.iter().sum();
    let space = (a as f64).powi(n as i32);
    if a == 0 || space > MAX_BRUTE_FORCE as f64 {
        return Err(Error::GuardViolation(format!("{a}^{n} sequences exceed the enumeration limit")));
    }
    let mut hits = 0;
    let mut seen = vec![0u64; a as usize];
    for mut code in 0..(space as u64) {
        seen.fill(0);
        for _ in 0..n {
            seen[(code % a) as usize] += 1;
            code /= a;
        }
        if seen == counts {
            hits += 1;
        }
    }
    Ok(hits)
}
