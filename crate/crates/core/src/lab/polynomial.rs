//! Exact certificates for the auxiliary polynomial
//!
//! `h(z) = 2z^{2n} − 6zⁿ − n(n+1)z² + 2n(n+2)z − (n²+3n−4)`,
//!
//! which has a zero of order three at `z = 1`. With `H = h/(z−1)³` the
//! strengthened bound `h(z) ≤ −(n²+3n−4)(1−z)³` on `[0, 1]` is equivalent to
//! `H ≥ H(0) = n²+3n−4`. All arithmetic is on integers; grid checks at
//! `z = j/N` clear denominators by `N^{deg}`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{LabError, Result};
use crate::report::Check;

/// Integer polynomial with ascending coefficients.
type Poly = Vec<i64>;

/// Coefficients of `h` for dimension `n`.
pub fn h_coefficients(n: usize) -> Poly {
    let ni = n as i64;
    let mut c = vec![0i64; 2 * n + 1];
    c[2 * n] += 2;
    c[n] -= 6;
    c[2] -= ni * (ni + 1);
    c[1] += 2 * ni * (ni + 2);
    c[0] -= ni * ni + 3 * ni - 4;
    c
}

fn add_into(acc: &mut Poly, p: &[i64], shift: usize, factor: i64) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (i, &c) in p.iter().enumerate() {
        acc[i + shift] += factor * c;
    }
}

fn mul(p: &[i64], q: &[i64]) -> Poly {
    let mut out = vec![0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

/// `2g(z)` from its defining combination
/// `−(n+1)(n+2)zⁿ(1−z)² − 2(n+2)z^{n+1}(1−z) + 2(1−z^{n+2}) − 2(1−zⁿ)³`.
pub fn twice_g_coefficients(n: usize) -> Poly {
    let ni = n as i64;
    let one_minus_z = vec![1, -1];
    let mut acc: Poly = Vec::new();
    add_into(&mut acc, &mul(&one_minus_z, &one_minus_z), n, -(ni + 1) * (ni + 2));
    add_into(&mut acc, &one_minus_z, n + 1, -2 * (ni + 2));
    let mut one_minus_zn2 = vec![0; n + 3];
    one_minus_zn2[0] = 1;
    one_minus_zn2[n + 2] = -1;
    add_into(&mut acc, &one_minus_zn2, 0, 2);
    let mut one_minus_zn = vec![0; n + 1];
    one_minus_zn[0] = 1;
    one_minus_zn[n] = -1;
    let cube = mul(&mul(&one_minus_zn, &one_minus_zn), &one_minus_zn);
    add_into(&mut acc, &cube, 0, -2);
    trim(acc)
}

pub fn derivative(p: &[i64]) -> Poly {
    if p.len() <= 1 {
        return vec![0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as i64 * c)
        .collect()
}

/// Divides by `z − 1`, returning quotient and remainder.
fn divide_by_z_minus_one(p: &[i64]) -> (Poly, i64) {
    let d = p.len() - 1;
    let mut q = vec![0; d];
    let mut carry = 0i64;
    for i in (0..=d).rev() {
        let v = p[i] + carry;
        if i == 0 {
            return (q, v);
        }
        q[i - 1] = v;
        carry = v;
    }
    unreachable!()
}

fn eval_at_one(p: &[i64]) -> i64 {
    p.iter().sum()
}

/// `N^{deg p}·p(j/N)` by scaled Horner.
fn scaled_value(p: &[i64], j: &BigInt, n_powers: &[BigInt]) -> BigInt {
    let d = p.len() - 1;
    let mut acc = BigInt::zero();
    for i in (0..=d).rev() {
        acc = acc * j + BigInt::from(p[i]) * &n_powers[d - i];
    }
    acc
}

/// Exact certificate for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialCertificate {
    pub n: usize,
    pub grid_size: usize,
    /// Ascending coefficients of `h`.
    pub h: Vec<i64>,
    /// Ascending coefficients of `2g = zⁿh`.
    pub twice_g: Vec<i64>,
    /// Ascending coefficients of `H = h/(z − 1)³`.
    pub big_h: Vec<i64>,
    /// `z̃ⁿ = 3(n−2)/(4(2n−1))` as numerator and denominator.
    pub z_tilde_pow_n: (i64, i64),
    /// `z̃`, where `h‴` changes sign.
    pub z_tilde: f64,
    pub checks: Vec<Check>,
}

impl PolynomialCertificate {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn exact(name: &str, value: i64, expected: i64) -> Check {
    Check::le(name, (value - expected).unsigned_abs() as f64, 0.0, 0.0)
}

/// Counts grid points `z = j/N`, `j = 0..=N`, where `sign·p(z) < 0`.
fn grid_violations(p: &[i64], shift: i64, sign: i64, grid: usize) -> usize {
    let d = p.len() - 1;
    let big_n = BigInt::from(grid);
    let mut powers = vec![BigInt::from(1)];
    for _ in 0..d {
        let next = powers.last().unwrap() * &big_n;
        powers.push(next);
    }
    let mut shifted = p.to_vec();
    shifted[0] -= shift;
    (0..=grid)
        .filter(|&j| {
            let v = scaled_value(&shifted, &BigInt::from(j), &powers);
            (v * sign).is_negative()
        })
        .count()
}

/// Certifies the properties of `h` used for the sharp bound and its
/// quantitative refinement.
pub fn certify_polynomials(n: usize, grid_size: usize) -> Result<PolynomialCertificate> {
    if !(2..=20).contains(&n) {
        return Err(LabError::InvalidInput(format!(
            "polynomial certificates cover 2 ≤ n ≤ 20, got {n}"
        )));
    }
    if grid_size < 1000 {
        return Err(LabError::InvalidInput(format!(
            "certificate grid needs at least 1000 points, got {grid_size}"
        )));
    }
    let ni = n as i64;
    let k = ni * ni + 3 * ni - 4;
    let h = h_coefficients(n);
    let h1 = derivative(&h);
    let h2 = derivative(&h1);
    let h3 = derivative(&h2);
    let mut checks = vec![
        exact("h_at_1", eval_at_one(&h), 0),
        exact("h_prime_at_1", eval_at_one(&h1), 0),
        exact("h_second_at_1", eval_at_one(&h2), 0),
        exact("h_at_0", h[0], -k),
    ];

    // 2g = zⁿ·h coefficientwise.
    let twice_g = twice_g_coefficients(n);
    let mut zn_h = vec![0; n];
    zn_h.extend_from_slice(&h);
    let g_mismatch = (0..twice_g.len().max(zn_h.len()))
        .filter(|&i| twice_g.get(i).copied().unwrap_or(0) != zn_h.get(i).copied().unwrap_or(0))
        .count();
    checks.push(exact("g_identity", g_mismatch as i64, 0));

    // H = h/(z − 1)³ with zero remainders.
    let (q1, r1) = divide_by_z_minus_one(&h);
    let (q2, r2) = divide_by_z_minus_one(&q1);
    let (big_h, r3) = divide_by_z_minus_one(&q2);
    checks.push(exact("triple_root_remainder", r1.abs() + r2.abs() + r3.abs(), 0));
    checks.push(exact("big_h_at_0", big_h[0], k));

    // h‴ = 2n(n−1)z^{n−3}[4(2n−1)zⁿ − 3(n−2)] coefficientwise.
    let mut factored = vec![0i64; h3.len()];
    let lead = 2 * ni * (ni - 1);
    if n >= 3 {
        factored[n - 3] -= lead * 3 * (ni - 2);
    }
    factored[2 * n - 3] += lead * 4 * (2 * ni - 1);
    let h3_mismatch = h3.iter().zip(&factored).filter(|(a, b)| a != b).count();
    checks.push(exact("third_derivative_factorization", h3_mismatch as i64, 0));

    // The sign of h‴ at each grid point matches the side of z̃:
    // h‴(j/N) ≤ 0 iff 4(2n−1)jⁿ ≤ 3(n−2)Nⁿ.
    let big_n = BigInt::from(grid_size);
    let d3 = h3.len() - 1;
    let mut powers = vec![BigInt::from(1)];
    for _ in 0..d3.max(n) {
        let next = powers.last().unwrap() * &big_n;
        powers.push(next);
    }
    let (num, den) = (3 * (ni - 2), 4 * (2 * ni - 1));
    let sign_mismatch = (1..=grid_size)
        .filter(|&j| {
            let jb = BigInt::from(j);
            let v = scaled_value(&h3, &jb, &powers);
            let below = BigInt::from(den) * num_traits::pow(jb, n) <= BigInt::from(num) * &powers[n];
            if below {
                v.is_positive()
            } else {
                v.is_negative() || v.is_zero()
            }
        })
        .count();
    checks.push(exact("third_derivative_sign", sign_mismatch as i64, 0));

    // Dense-grid sign checks.
    let grid = |name: &str, p: &[i64], shift: i64, sign: i64| {
        exact(name, grid_violations(p, shift, sign, grid_size) as i64, 0)
    };
    checks.push(grid("h_nonpositive", &h, 0, -1));
    checks.push(grid("h_prime_nonnegative", &h1, 0, 1));
    checks.push(grid("h_second_nonpositive", &h2, 0, -1));
    checks.push(grid("big_h_lower_bound", &big_h, k, 1));
    checks.push(grid("big_h_nondecreasing", &derivative(&big_h), 0, 1));

    Ok(PolynomialCertificate {
        n,
        grid_size,
        h,
        twice_g,
        big_h,
        z_tilde_pow_n: (num, den),
        z_tilde: (num as f64 / den as f64).powf(1.0 / n as f64),
        checks,
    })
}
