//! Reduced rational functions of `z = e^{i phi}` over Q(zeta_N).
//!
//! The denominator is kept factored into [`Atom`]s. Since atoms are monic and
//! irreducible, "no denominator atom divides the numerator" is the same as
//! `gcd(num, den) = 1`, and the factored form is the monic-denominator
//! canonical form. Bringing fractions to a common denominator then only
//! multiplies by atoms, which are binomials with root-of-unity coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::zpoly::{Atom, ZPoly};
use crate::cyclofield::{CycloScalar, FieldCtx};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZRat {
    num: ZPoly,
    den: BTreeMap<Atom, u32>,
}

impl ZRat {
    pub fn zero() -> ZRat {
        ZRat { num: ZPoly::zero(), den: BTreeMap::new() }
    }

    pub fn one(ctx: &FieldCtx) -> ZRat {
        ZRat::from_scalar(ctx.one())
    }

    pub fn from_int(v: i64, ctx: &FieldCtx) -> ZRat {
        ZRat::from_scalar(ctx.from_int(v))
    }

    pub fn from_scalar(c: CycloScalar) -> ZRat {
        ZRat { num: ZPoly::constant(c), den: BTreeMap::new() }
    }

    pub fn from_poly(p: ZPoly) -> ZRat {
        ZRat { num: p, den: BTreeMap::new() }
    }

    /// `z^d` for any integer `d`.
    pub fn z_pow(d: i64, ctx: &FieldCtx) -> ZRat {
        if d >= 0 {
            ZRat::from_poly(ZPoly::monomial(ctx.one(), d as usize, ctx))
        } else {
            ZRat { num: ZPoly::one(ctx), den: BTreeMap::from([(Atom::Z, (-d) as u32)]) }
        }
    }

    /// `num / den`, reduced. Fails if `den` is zero or has a root that is not
    /// a 2N-th root of unity.
    pub fn new(num: ZPoly, den: ZPoly, ctx: &FieldCtx) -> Result<ZRat> {
        let lead = den.leading().ok_or(Error::ZeroInverse)?;
        let inv = ctx.inv(lead)?;
        let atoms = factor_monic(&den.scale(&inv, ctx), ctx)
            .ok_or_else(|| Error::NotCyclotomic(format!("degree {} denominator", den.degree())))?;
        Ok(ZRat::reduce(num.scale(&inv, ctx), atoms, ctx))
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn den_atoms(&self) -> &BTreeMap<Atom, u32> {
        &self.den
    }

    /// Expanded monic denominator.
    pub fn den_poly(&self, ctx: &FieldCtx) -> ZPoly {
        expand(&self.den, ctx)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_scalar(&self) -> Option<&CycloScalar> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_scalar().is_some_and(CycloScalar::is_one)
    }

    pub fn neg(&self) -> ZRat {
        ZRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &CycloScalar, ctx: &FieldCtx) -> ZRat {
        if c.is_zero() {
            return ZRat::zero();
        }
        ZRat { num: self.num.scale(c, ctx), den: self.den.clone() }
    }

    pub fn scale_int(&self, v: i64, ctx: &FieldCtx) -> ZRat {
        self.scale(&ctx.from_int(v), ctx)
    }

    pub fn add(&self, other: &ZRat, ctx: &FieldCtx) -> ZRat {
        ZRat::sum([self, other], ctx)
    }

    pub fn sub(&self, other: &ZRat, ctx: &FieldCtx) -> ZRat {
        ZRat::sum([self, &other.neg()], ctx)
    }

    /// Sums many fractions over one common denominator, reducing once.
    pub fn sum<'a, I>(items: I, ctx: &FieldCtx) -> ZRat
    where
        I: IntoIterator<Item = &'a ZRat>,
    {
        let items: Vec<&ZRat> = items.into_iter().filter(|f| !f.is_zero()).collect();
        match items.len() {
            0 => return ZRat::zero(),
            1 => return items[0].clone(),
            _ => {}
        }
        if items.iter().all(|f| f.den == items[0].den) {
            let num = items[1..].iter().fold(items[0].num.clone(), |acc, f| acc.add(&f.num));
            return ZRat::reduce(num, items[0].den.clone(), ctx);
        }
        let mut lcm: BTreeMap<Atom, u32> = BTreeMap::new();
        for f in &items {
            for (a, e) in &f.den {
                let slot = lcm.entry(*a).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut num = ZPoly::zero();
        for f in &items {
            let mut part = f.num.clone();
            for (a, e) in &lcm {
                let have = f.den.get(a).copied().unwrap_or(0);
                for _ in have..*e {
                    part = part.mul_atom(*a, ctx);
                }
            }
            num = num.add(&part);
        }
        ZRat::reduce(num, lcm, ctx)
    }

    pub fn mul(&self, other: &ZRat, ctx: &FieldCtx) -> ZRat {
        if self.is_zero() || other.is_zero() {
            return ZRat::zero();
        }
        if let Some(c) = self.as_scalar() {
            return other.scale(c, ctx);
        }
        if let Some(c) = other.as_scalar() {
            return self.scale(c, ctx);
        }
        let num = self.num.mul(&other.num, ctx);
        let mut den = self.den.clone();
        for (a, e) in &other.den {
            *den.entry(*a).or_insert(0) += e;
        }
        // only cross cancellation is possible
        let mut num = num;
        for (a, e) in den.iter_mut() {
            if self.den.contains_key(a) && other.den.contains_key(a) {
                continue;
            }
            while *e > 0 {
                match num.div_atom(*a, ctx) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, e| *e > 0);
        ZRat { num, den }
    }

    pub fn pow(&self, exp: i64, ctx: &FieldCtx) -> Result<ZRat> {
        let base = if exp < 0 { self.inv(ctx)? } else { self.clone() };
        let mut acc = ZRat::one(ctx);
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul(&base, ctx);
        }
        Ok(acc)
    }

    /// Inverse, when the numerator also splits over atoms.
    pub fn inv(&self, ctx: &FieldCtx) -> Result<ZRat> {
        let lead = self.num.leading().ok_or(Error::ZeroInverse)?;
        let lead_inv = ctx.inv(lead)?;
        let atoms = factor_monic(&self.num.scale(&lead_inv, ctx), ctx)
            .ok_or_else(|| Error::NotInvertible("numerator with non-cyclotomic roots".into()))?;
        Ok(ZRat { num: expand(&self.den, ctx).scale(&lead_inv, ctx), den: atoms })
    }

    /// `f(zeta^s z)`.
    pub fn substitute_root(&self, s: i64, ctx: &FieldCtx) -> ZRat {
        if s.rem_euclid(ctx.order() as i64) == 0 || self.is_zero() {
            return self.clone();
        }
        let n = ctx.order() as i64;
        let mut den = BTreeMap::new();
        // each atom z^d - c becomes zeta^{s d} (z^d - c zeta^{-s d})
        let mut factor = 0i64;
        for (a, e) in &self.den {
            let (moved, d) = match *a {
                Atom::Z => (Atom::Z, 1),
                Atom::Lin(t) => (Atom::Lin((t as i64 - s).rem_euclid(n) as u32), 1),
                Atom::Quad(t) => (Atom::Quad((t as i64 - 2 * s).rem_euclid(n) as u32), 2),
            };
            factor += s * d * *e as i64;
            den.insert(moved, *e);
        }
        ZRat { num: self.num.substitute_root(s, ctx).mul_root(-factor, ctx), den }
    }

    /// Action of the rotation: `z -> rho z`.
    pub fn rotate(&self, ctx: &FieldCtx) -> ZRat {
        self.substitute_root(ctx.rho_exp() as i64, ctx)
    }

    pub fn rotate_by(&self, steps: i64, ctx: &FieldCtx) -> ZRat {
        self.substitute_root(steps * ctx.rho_exp() as i64, ctx)
    }

    /// Action of the reflection: `z -> 1/z`.
    pub fn reflect(&self, ctx: &FieldCtx) -> ZRat {
        if self.is_zero() {
            return ZRat::zero();
        }
        let n = ctx.order() as i64;
        let half = n / 2;
        // num(1/z) = z^{-deg} rev(z)
        let (rev, _) = self.num.reversed();
        let mut z_exp = -(self.num.degree() as i64);
        let mut den = BTreeMap::new();
        let mut root_factor = 0i64;
        for (a, e) in &self.den {
            let e_i = *e as i64;
            match *a {
                // (1/z)^e in the denominator moves z^e to the numerator
                Atom::Z => z_exp += e_i,
                // 1/z - c = -c (z - 1/c) / z
                Atom::Lin(t) => {
                    root_factor += (half + t as i64) * e_i;
                    z_exp += e_i;
                    den.insert(Atom::Lin((-(t as i64)).rem_euclid(n) as u32), *e);
                }
                // 1/z^2 - c = -c (z^2 - 1/c) / z^2
                Atom::Quad(t) => {
                    root_factor += (half + t as i64) * e_i;
                    z_exp += 2 * e_i;
                    den.insert(Atom::Quad((-(t as i64)).rem_euclid(n) as u32), *e);
                }
            }
        }
        let mut num = rev.mul_root(-root_factor, ctx);
        if z_exp > 0 {
            num = num.shift(z_exp as usize, ctx);
        } else if z_exp < 0 {
            den.insert(Atom::Z, (-z_exp) as u32);
        }
        ZRat { num, den }
    }

    /// Complex conjugate on the unit circle: conjugate scalars and `z -> 1/z`.
    pub fn conj(&self, ctx: &FieldCtx) -> ZRat {
        let n = ctx.order() as i64;
        let den = self
            .den
            .iter()
            .map(|(a, e)| {
                let a = match *a {
                    Atom::Z => Atom::Z,
                    Atom::Lin(t) => Atom::Lin((-(t as i64)).rem_euclid(n) as u32),
                    Atom::Quad(t) => Atom::Quad((-(t as i64)).rem_euclid(n) as u32),
                };
                (a, *e)
            })
            .collect();
        let c = ZRat { num: self.num.map_scalars(|s| ctx.conj(s)), den };
        c.reflect(ctx)
    }

    /// `d/dphi` with `z = e^{i phi}`: `i z f'(z)`.
    pub fn d_phi(&self, ctx: &FieldCtx) -> ZRat {
        if self.is_zero() {
            return ZRat::zero();
        }
        let atoms: Vec<(Atom, u32)> = self.den.iter().map(|(a, e)| (*a, *e)).collect();
        // f' = [n' P - n sum_a e_a a' P / a] / (D P), P = prod of distinct atoms
        let others = |skip: usize| {
            atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .fold(ZPoly::one(ctx), |p, (_, (a, _))| p.mul_atom(*a, ctx))
        };
        let mut num = atoms.iter().fold(self.num.derivative(ctx), |p, (a, _)| p.mul_atom(*a, ctx));
        for (j, (a, e)) in atoms.iter().enumerate() {
            let da = a.poly(ctx).derivative(ctx);
            let term = self.num.mul(&da, ctx).mul(&others(j), ctx);
            num = num.sub(&term.scale(&ctx.from_int(*e as i64), ctx));
        }
        let num = num.shift(1, ctx).scale(&ctx.imag_unit(), ctx);
        let den = self.den.iter().map(|(a, e)| (*a, e + 1)).collect();
        ZRat::reduce(num, den, ctx)
    }

    /// Numeric value at `z` (the oracle's evaluation path).
    pub fn eval(&self, z: Complex64, ctx: &FieldCtx) -> Complex64 {
        let n = horner(&self.num, z, ctx);
        let d = self.den.iter().fold(Complex64::new(1.0, 0.0), |acc, (a, e)| {
            let v = match *a {
                Atom::Z => z,
                Atom::Lin(t) => z - ctx.embed_root(t as i64),
                Atom::Quad(t) => z * z - ctx.embed_root(t as i64),
            };
            acc * v.powu(*e)
        });
        n / d
    }

    /// Cancels denominator atoms that divide `num`.
    fn reduce(mut num: ZPoly, mut den: BTreeMap<Atom, u32>, ctx: &FieldCtx) -> ZRat {
        if num.is_zero() {
            return ZRat::zero();
        }
        for (a, e) in den.iter_mut() {
            while *e > 0 {
                match num.div_atom(*a, ctx) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, e| *e > 0);
        ZRat { num, den }
    }
}

fn horner(p: &ZPoly, z: Complex64, ctx: &FieldCtx) -> Complex64 {
    p.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + ctx.embed(c))
}

fn expand(den: &BTreeMap<Atom, u32>, ctx: &FieldCtx) -> ZPoly {
    let mut p = ZPoly::one(ctx);
    for (a, e) in den {
        for _ in 0..*e {
            p = p.mul_atom(*a, ctx);
        }
    }
    p
}

/// Factors a monic polynomial over atoms by trial division.
fn factor_monic(p: &ZPoly, ctx: &FieldCtx) -> Option<BTreeMap<Atom, u32>> {
    let mut rest = p.clone();
    let mut out = BTreeMap::new();
    for atom in Atom::candidates(ctx) {
        if rest.degree() == 0 {
            break;
        }
        while let Some(q) = rest.div_atom(atom, ctx) {
            rest = q;
            *out.entry(atom).or_insert(0) += 1;
        }
    }
    if rest.degree() == 0 && rest.as_constant().is_some_and(CycloScalar::is_one) {
        Some(out)
    } else {
        None
    }
}
