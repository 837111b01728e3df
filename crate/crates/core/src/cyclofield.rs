//! Exact arithmetic in the cyclotomic field Q(zeta_N), N = lcm(4, 2k).
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(deg-1)` modulo
//! the N-th cyclotomic polynomial, as an integer coordinate vector over one
//! shared positive denominator. Keeping a single denominator means the common
//! case (algebraic integers, denominator 1) never touches a gcd.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest dihedral index accepted unless the caller raises it.
pub const DEFAULT_MAX_K: usize = 12;

/// Field context for one dihedral index `k`.
#[derive(Debug)]
pub struct FieldCtx {
    k: usize,
    n: usize,
    deg: usize,
    /// Monic `Phi_N`, lowest coefficient first, length `deg + 1`.
    phi: Vec<BigInt>,
    /// Sparse power-basis coordinates of `zeta^m` for `m` in `0..n`.
    powers: Vec<Vec<(usize, BigInt)>>,
    /// Numeric `zeta^j` for `j` in `0..n`.
    embed: Vec<Complex64>,
}

impl FieldCtx {
    pub fn new(k: usize) -> Result<FieldCtx> {
        FieldCtx::with_max(k, DEFAULT_MAX_K)
    }

    pub fn with_max(k: usize, max_k: usize) -> Result<FieldCtx> {
        if k == 0 || k > max_k {
            return Err(Error::InvalidK { k, max: max_k });
        }
        let n = (4usize).lcm(&(2 * k));
        let phi = cyclotomic_poly(n);
        let deg = phi.len() - 1;

        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![BigInt::zero(); deg];
        cur[0] = BigInt::one();
        for _ in 0..n {
            powers.push(cur.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect());
            // multiply by zeta: shift up and fold the top coefficient back
            let top = cur.pop().unwrap();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for j in 0..deg {
                    cur[j] -= &top * &phi[j];
                }
            }
        }
        let embed = (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect();
        Ok(FieldCtx { k, n, deg, phi, powers, embed })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Order of the primitive root, `lcm(4, 2k)`.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Field degree over Q, `phi(N)`.
    pub fn degree(&self) -> usize {
        self.deg
    }

    /// Coefficients of `Phi_N`, constant term first.
    pub fn cyclotomic(&self) -> &[BigInt] {
        &self.phi
    }

    /// Exponent `t` with `zeta^t = e^{i pi / k}`.
    pub fn rho_exp(&self) -> usize {
        self.n / (2 * self.k)
    }

    /// Exponent `t` with `zeta^t = i`.
    pub fn i_exp(&self) -> usize {
        self.n / 4
    }

    pub fn zero(&self) -> CycloScalar {
        CycloScalar { num: vec![BigInt::zero(); self.deg], den: BigInt::one() }
    }

    pub fn one(&self) -> CycloScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> CycloScalar {
        let mut x = self.zero();
        x.num[0] = BigInt::from(v);
        x
    }

    pub fn from_rational(&self, q: &BigRational) -> CycloScalar {
        let mut x = self.zero();
        x.num[0] = q.numer().clone();
        x.den = q.denom().clone();
        x.normalize();
        x
    }

    /// Builds a scalar from rational power-basis coordinates.
    pub fn from_coords(&self, coords: &[BigRational]) -> CycloScalar {
        assert!(coords.len() <= self.deg, "too many coordinates");
        let den = coords.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let mut x = self.zero();
        for (j, q) in coords.iter().enumerate() {
            x.num[j] = q.numer() * (&den / q.denom());
        }
        x.den = den;
        x.normalize();
        x
    }

    /// `zeta^j`, with `j` reduced mod N.
    pub fn root_power(&self, j: i64) -> CycloScalar {
        let m = j.rem_euclid(self.n as i64) as usize;
        let mut x = self.zero();
        for (idx, c) in &self.powers[m] {
            x.num[*idx] = c.clone();
        }
        x
    }

    pub fn imag_unit(&self) -> CycloScalar {
        self.root_power(self.i_exp() as i64)
    }

    /// `rho = e^{i pi / k}`, the rotation root.
    pub fn rho(&self) -> CycloScalar {
        self.root_power(self.rho_exp() as i64)
    }

    pub fn mul(&self, x: &CycloScalar, y: &CycloScalar) -> CycloScalar {
        if x.is_zero() || y.is_zero() {
            return self.zero();
        }
        let d = self.deg;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in x.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let num = self.reduce(prod);
        let mut out = CycloScalar { num, den: &x.den * &y.den };
        out.normalize();
        out
    }

    /// `x * zeta^t` without a full product.
    pub fn mul_root(&self, x: &CycloScalar, t: i64) -> CycloScalar {
        let t = t.rem_euclid(self.n as i64) as usize;
        if t == 0 || x.is_zero() {
            return x.clone();
        }
        let mut num = vec![BigInt::zero(); self.deg];
        for (j, a) in x.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (idx, c) in &self.powers[(j + t) % self.n] {
                num[*idx] += a * c;
            }
        }
        CycloScalar { num, den: x.den.clone() }
    }

    pub fn mul_int(&self, x: &CycloScalar, v: i64) -> CycloScalar {
        if v == 0 {
            return self.zero();
        }
        let v = BigInt::from(v);
        let mut out = CycloScalar { num: x.num.iter().map(|a| a * &v).collect(), den: x.den.clone() };
        out.normalize();
        out
    }

    pub fn mul_rational(&self, x: &CycloScalar, q: &BigRational) -> CycloScalar {
        if q.is_zero() {
            return self.zero();
        }
        let mut out = CycloScalar { num: x.num.iter().map(|a| a * q.numer()).collect(), den: &x.den * q.denom() };
        out.normalize();
        out
    }

    /// Complex conjugation, the automorphism `zeta -> zeta^(N-1)`.
    pub fn conj(&self, x: &CycloScalar) -> CycloScalar {
        let mut num = vec![BigInt::zero(); self.deg];
        for (j, a) in x.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (idx, c) in &self.powers[(self.n - j) % self.n] {
                num[*idx] += a * c;
            }
        }
        CycloScalar { num, den: x.den.clone() }
    }

    /// Inverse by the extended Euclidean algorithm against `Phi_N`.
    pub fn inv(&self, x: &CycloScalar) -> Result<CycloScalar> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let to_q =
            |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
        // s * x + t * phi = g; only s is tracked.
        let mut r0 = qpoly_trim(to_q(&self.phi));
        let mut r1 = qpoly_trim(to_q(&x.num));
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = qpoly_divrem(&r0, &r1);
            let s2 = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant because Phi_N is irreducible
        let c = r1[0].clone();
        let coords: Vec<BigRational> = s1.iter().map(|v| v / &c).collect();
        let mut padded = coords;
        padded.resize(self.deg, BigRational::zero());
        // multiply back by the original denominator
        let inv_num = self.from_coords(&padded);
        Ok(self.mul_rational(&inv_num, &BigRational::from_integer(x.den.clone())))
    }

    /// Evaluates at `zeta = e^{2 pi i / N}`.
    pub fn embed(&self, x: &CycloScalar) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if x.den.is_one() {
            for (j, a) in x.num.iter().enumerate() {
                if !a.is_zero() {
                    acc += self.embed[j] * a.to_f64().unwrap_or(f64::NAN);
                }
            }
        } else {
            for (j, a) in x.num.iter().enumerate() {
                if !a.is_zero() {
                    let q = BigRational::new(a.clone(), x.den.clone());
                    acc += self.embed[j] * q.to_f64().unwrap_or(f64::NAN);
                }
            }
        }
        acc
    }

    /// Numeric `zeta^j`.
    pub fn embed_root(&self, j: i64) -> Complex64 {
        self.embed[j.rem_euclid(self.n as i64) as usize]
    }

    fn reduce(&self, mut prod: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.deg;
        for top in (d..prod.len()).rev() {
            if prod[top].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut prod[top]);
            for j in 0..d {
                if !self.phi[j].is_zero() {
                    prod[top - d + j] -= &c * &self.phi[j];
                }
            }
        }
        prod.truncate(d);
        prod
    }
}

/// Element of Q(zeta_N): integer coordinates over a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloScalar {
    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// Rational coordinates in the power basis.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|a| BigRational::new(a.clone(), self.den.clone())).collect()
    }

    /// The value as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn neg(&self) -> CycloScalar {
        CycloScalar { num: self.num.iter().map(|a| -a).collect(), den: self.den.clone() }
    }

    pub fn add(&self, other: &CycloScalar) -> CycloScalar {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &CycloScalar) -> CycloScalar {
        self.combine(other, true)
    }

    fn combine(&self, other: &CycloScalar, subtract: bool) -> CycloScalar {
        let mut out = if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| if subtract { a - b } else { a + b }).collect();
            CycloScalar { num, den: self.den.clone() }
        } else {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let l = a * &other.den;
                    let r = b * &self.den;
                    if subtract {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect();
            CycloScalar { num, den: &self.den * &other.den }
        };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for a in &mut self.num {
                *a = -&*a;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for a in &self.num {
            if g.is_one() {
                break;
            }
            if !a.is_zero() {
                g = g.gcd(a);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for a in &mut self.num {
                *a /= &g;
            }
        }
    }
}

/// N-th cyclotomic polynomial by `(x^N - 1) / prod_{d | N, d < N} Phi_d`.
pub fn cyclotomic_poly(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = BigInt::from(-1);
    num[n] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = ipoly_exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact division by a monic integer polynomial.
fn ipoly_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut rem = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len() - db];
    for i in (0..quo.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            rem[i + j] -= &c * &b[j];
        }
        quo[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quo
}

fn qpoly_trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn qpoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    qpoly_trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn qpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qpoly_trim(out)
}

fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = b.len() - 1;
    let lead = &b[db];
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quo = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quo.len()).rev() {
        let c = &rem[i + db] / lead;
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            let t = &c * &b[j];
            rem[i + j] -= t;
        }
        quo[i] = c;
    }
    rem.truncate(db);
    (qpoly_trim(quo), qpoly_trim(rem))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn context_orders() {
        let c3 = FieldCtx::new(3).unwrap();
        assert_eq!((c3.order(), c3.degree()), (12, 4));
        let c2 = FieldCtx::new(2).unwrap();
        assert_eq!(c2.order(), 4);
        assert_eq!(c2.cyclotomic(), ints(&[1, 0, 1]).as_slice());
        let c1 = FieldCtx::new(1).unwrap();
        assert_eq!((c1.order(), c1.degree()), (4, 2));
    }

    #[test]
    fn rejects_bad_k() {
        assert!(matches!(FieldCtx::new(0), Err(Error::InvalidK { .. })));
        assert!(matches!(FieldCtx::new(13), Err(Error::InvalidK { .. })));
        assert!(FieldCtx::with_max(13, 20).is_ok());
    }

    /// Totient by trial counting, independent of the polynomial route.
    fn totient(n: usize) -> usize {
        (1..=n).filter(|j| j.gcd(&n) == 1).count()
    }

    #[test]
    fn k5_field_matches_totient_and_divides() {
        let c5 = FieldCtx::new(5).unwrap();
        assert_eq!(c5.order(), 20);
        assert_eq!(c5.degree(), totient(20));
        assert_eq!(c5.degree(), 8);
        // Phi_20 = x^8 - x^6 + x^4 - x^2 + 1
        assert_eq!(c5.cyclotomic(), ints(&[1, 0, -1, 0, 1, 0, -1, 0, 1]).as_slice());
        // divides x^20 - 1
        let mut xn = vec![BigInt::zero(); 21];
        xn[0] = BigInt::from(-1);
        xn[20] = BigInt::one();
        ipoly_exact_div(&xn, c5.cyclotomic());
    }

    #[test]
    fn phi_degree_is_totient_for_all_contexts() {
        for k in 1..=12 {
            let c = FieldCtx::new(k).unwrap();
            assert_eq!(c.degree(), totient(c.order()), "k={k}");
            assert_eq!(c.order() % 4, 0);
            assert_eq!(c.order() % (2 * k), 0);
        }
    }

    #[test]
    fn roots_of_unity() {
        let c = FieldCtx::new(3).unwrap();
        assert!(c.root_power(12).is_one());
        assert_eq!(c.root_power(3), c.imag_unit());
        let i = c.imag_unit();
        assert_eq!(c.mul(&i, &i), c.from_int(-1));
        let z = c.embed(&i);
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((c.embed(&c.one()) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rho_relations() {
        for k in 1..=12 {
            let c = FieldCtx::new(k).unwrap();
            let rho = c.rho();
            let mut p = c.one();
            for step in 1..=2 * k {
                p = c.mul(&p, &rho);
                if step == k {
                    assert_eq!(p, c.from_int(-1), "rho^k = -1, k={k}");
                }
            }
            assert!(p.is_one(), "rho^2k = 1, k={k}");
        }
    }

    #[test]
    fn inverse_of_zero_is_error() {
        let c = FieldCtx::new(4).unwrap();
        assert!(matches!(c.inv(&c.zero()), Err(Error::ZeroInverse)));
    }

    #[test]
    fn inverse_with_denominator() {
        let c = FieldCtx::new(5).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let x = c.from_coords(&[half.clone(), BigRational::from_integer(3.into()), half]);
        let y = c.inv(&x).unwrap();
        assert!(c.mul(&x, &y).is_one());
    }
}
