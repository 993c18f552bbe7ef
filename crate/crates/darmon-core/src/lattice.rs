//! LLL reduction with exact Gram-Schmidt data, and integer relations.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::mp::{Ctx, Real};

fn round_ratio(r: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let n = r.numer() * &two + r.denom();
    let d = r.denom() * &two;
    num_integer::Integer::div_floor(&n, &d)
}

/// LLL-reduces the rows of `basis` (delta = 3/4). Rows must be independent.
pub fn lll(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n < 2 {
        return basis;
    }
    let delta = BigRational::new(3.into(), 4.into());
    let gso = |b: &Vec<Vec<BigInt>>| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<BigRational> = b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
            for j in 0..i {
                let num: BigRational = b[i].iter().zip(&bstar[j]).map(|(x, y)| y * BigRational::from_integer(x.clone())).sum();
                let m = &num / &norms[j];
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= &m * bk;
                }
                mu[i][j] = m;
            }
            let nn: BigRational = v.iter().map(|x| x * x).sum();
            norms.push(nn);
            bstar.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gso(&basis);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 1_000_000, "LLL did not terminate");
        for j in (0..k).rev() {
            let q = round_ratio(&mu[k][j]);
            if !q.is_zero() {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = BigRational::from_integer(q);
                for l in 0..=j {
                    let sub = if l == j { qr.clone() } else { &qr * &mu[j][l] };
                    mu[k][l] = &mu[k][l] - &sub;
                }
            }
        }
        let lhs = &norms[k];
        let rhs = &(&delta - &(&mu[k][k - 1] * &mu[k][k - 1])) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let g = gso(&basis);
            mu = g.0;
            norms = g.1;
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    basis
}

/// Small integers `c` with `sum c_i v_i ~ 0`, or `None` if the shortest
/// reduced vector exceeds `height_max` or leaves a residual above
/// `2^(-prec/2)`.
pub fn integer_relation(ctx: &Ctx, values: &[Real], height_max: u64) -> Option<Vec<BigInt>> {
    let n = values.len();
    let scale_bits = (ctx.prec() as i64) * 3 / 4;
    let scaled: Vec<BigInt> = values.iter().map(|v| v.scale2(scale_bits).round().to_bigint().unwrap_or_default()).collect();
    let mut rows = Vec::with_capacity(n);
    for (i, s) in scaled.iter().enumerate() {
        let mut r = vec![BigInt::zero(); n + 1];
        r[i] = BigInt::one();
        r[n] = s.clone();
        rows.push(r);
    }
    let reduced = lll(rows);
    let best = &reduced[0];
    let coeffs: Vec<BigInt> = best[..n].to_vec();
    if coeffs.iter().all(|c| c.is_zero()) {
        return None;
    }
    let hmax = BigInt::from(height_max);
    if coeffs.iter().any(|c| c.abs() > hmax) {
        return None;
    }
    let mut acc = ctx.zero();
    let mut mag = ctx.zero();
    for (c, v) in coeffs.iter().zip(values) {
        let t = &ctx.bigint(c) * v;
        mag = mag.max(&t.abs());
        acc = &acc + &t;
    }
    let thresh = &mag.max(&ctx.one()) * &ctx.pow2(-(ctx.prec() as i64) / 2);
    if acc.abs().lt(&thresh) {
        Some(coeffs)
    } else {
        None
    }
}

/// Best rational approximation `p/q` with `0 < q <= qmax` by continued fractions.
pub fn best_rational(x: f64, qmax: u64) -> (i64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    let mut best = (libm::round(x) as i64, 1u64);
    for _ in 0..64 {
        let a = libm::floor(r);
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > qmax as i128 || q2 <= 0 {
            break;
        }
        best = (p2 as i64, q2 as u64);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let cand = [best, (libm::round(x) as i64, 1)];
    *cand
        .iter()
        .min_by(|a, b| {
            let ea = (x - a.0 as f64 / a.1 as f64).abs();
            let eb = (x - b.0 as f64 / b.1 as f64).abs();
            ea.partial_cmp(&eb).unwrap_or(core::cmp::Ordering::Equal)
        })
        .expect("nonempty")
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|c| c.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lll_keeps_lattice_and_shortens() {
        let b: Vec<Vec<BigInt>> = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let r = lll(b.clone());
        // |det| preserved
        let det = |m: &Vec<Vec<BigInt>>| -> BigInt {
            &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
        };
        assert_eq!(det(&b).abs(), det(&r).abs());
        let n0: BigInt = r[0].iter().map(|x| x * x).sum();
        assert!(n0 <= BigInt::from(3));
    }

    #[test]
    fn finds_golden_ratio_relation() {
        let ctx = Ctx::new(128);
        let phi = &(&ctx.one() + &ctx.int(5).sqrt()) / &ctx.int(2);
        let vals = [ctx.one(), phi.clone(), &phi * &phi];
        let rel = integer_relation(&ctx, &vals, 100).unwrap();
        let sign = if rel[2] < BigInt::zero() { -1 } else { 1 };
        let rel: Vec<i64> = rel.iter().map(|c| sign * c.to_i64().unwrap()).collect();
        assert_eq!(rel, [-1, -1, 1]);
        let pi = ctx.pi();
        assert!(integer_relation(&ctx, &[ctx.one(), pi.clone(), &pi * &pi], 1000).is_none());
    }

    #[test]
    fn rational_approximation() {
        assert_eq!(best_rational(0.75, 10), (3, 4));
        assert_eq!(best_rational(-1.0 / 3.0, 10), (-1, 3));
        assert_eq!(best_rational(core::f64::consts::PI, 10), (22, 7));
    }
}
