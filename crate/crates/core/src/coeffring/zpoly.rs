//! Dense univariate polynomials in `z` over Q(zeta_N), and the monic
//! binomial "atoms" every denominator in the engine factors into.

use crate::cyclofield::{CycloScalar, FieldCtx};

/// Irreducible monic factor of a denominator.
///
/// Every root the engine ever divides by is a 2N-th root of unity (or zero),
/// so over Q(zeta_N) the irreducible factors are `z`, `z - zeta^t` and
/// `z^2 - zeta^t` with `t` odd (the roots `+-zeta_2N^t` are not in the field).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Z,
    Lin(u32),
    Quad(u32),
}

impl Atom {
    pub fn degree(self) -> usize {
        match self {
            Atom::Z | Atom::Lin(_) => 1,
            Atom::Quad(_) => 2,
        }
    }

    /// `(d, Some(t))` for `z^d - zeta^t`, `(1, None)` for `z`.
    fn binomial(self) -> (usize, Option<i64>) {
        match self {
            Atom::Z => (1, None),
            Atom::Lin(t) => (1, Some(t as i64)),
            Atom::Quad(t) => (2, Some(t as i64)),
        }
    }

    /// All candidate atoms of a context, in canonical order.
    pub fn candidates(ctx: &FieldCtx) -> Vec<Atom> {
        let n = ctx.order() as u32;
        std::iter::once(Atom::Z)
            .chain((0..n).map(Atom::Lin))
            .chain((0..n).filter(|t| t % 2 == 1).map(Atom::Quad))
            .collect()
    }

    pub fn poly(self, ctx: &FieldCtx) -> ZPoly {
        ZPoly::one(ctx).mul_atom(self, ctx)
    }
}

/// Factors `z^d - zeta^t` into atoms. Requires every root to be a 2N-th root
/// of unity; returns `None` otherwise.
pub fn binomial_atoms(d: usize, t: i64, ctx: &FieldCtx) -> Option<Vec<Atom>> {
    let n = ctx.order() as i64;
    let d_i = d as i64;
    let t = t.rem_euclid(n);
    // roots zeta_{N d}^{t + N l}; in units of zeta_{2N}: 2 (t + N l) / d
    if (2 * n) % d_i != 0 || (2 * t) % d_i != 0 {
        return None;
    }
    let mut atoms = Vec::new();
    for l in 0..d_i {
        let s = (2 * (t + n * l) / d_i).rem_euclid(2 * n);
        if s % 2 == 0 {
            atoms.push(Atom::Lin((s / 2) as u32));
        } else {
            let q = Atom::Quad((s % n) as u32);
            if !atoms.contains(&q) {
                atoms.push(q);
            }
        }
    }
    atoms.sort();
    debug_assert_eq!(atoms.iter().map(|a| a.degree()).sum::<usize>(), d);
    Some(atoms)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZPoly {
    coeffs: Vec<CycloScalar>,
}

impl ZPoly {
    pub fn zero() -> ZPoly {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one(ctx: &FieldCtx) -> ZPoly {
        ZPoly::constant(ctx.one())
    }

    pub fn constant(c: CycloScalar) -> ZPoly {
        ZPoly::from_coeffs(vec![c])
    }

    pub fn monomial(c: CycloScalar, d: usize, ctx: &FieldCtx) -> ZPoly {
        let mut coeffs = vec![ctx.zero(); d];
        coeffs.push(c);
        ZPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<CycloScalar>) -> ZPoly {
        while coeffs.last().is_some_and(CycloScalar::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[CycloScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&CycloScalar> {
        self.coeffs.last()
    }

    pub fn as_constant(&self) -> Option<&CycloScalar> {
        match self.coeffs.len() {
            1 => Some(&self.coeffs[0]),
            _ => None,
        }
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().map(CycloScalar::neg).collect() }
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        self.zip_with(other, false)
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.zip_with(other, true)
    }

    fn zip_with(&self, other: &ZPoly, subtract: bool) -> ZPoly {
        let (long, short, flip) =
            if self.coeffs.len() >= other.coeffs.len() { (self, other, false) } else { (other, self, true) };
        let mut coeffs = Vec::with_capacity(long.coeffs.len());
        for (j, c) in long.coeffs.iter().enumerate() {
            let v = match short.coeffs.get(j) {
                None if subtract && flip => c.neg(),
                None => c.clone(),
                Some(s) => match (subtract, flip) {
                    (false, _) => c.add(s),
                    (true, false) => c.sub(s),
                    (true, true) => s.sub(c),
                },
            };
            coeffs.push(v);
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &ZPoly, ctx: &FieldCtx) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(c, ctx);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(c, ctx);
        }
        let mut coeffs = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&ctx.mul(a, b));
                }
            }
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &CycloScalar, ctx: &FieldCtx) -> ZPoly {
        if c.is_one() {
            return self.clone();
        }
        ZPoly::from_coeffs(self.coeffs.iter().map(|a| ctx.mul(a, c)).collect())
    }

    /// Multiplies every coefficient by `zeta^t`.
    pub fn mul_root(&self, t: i64, ctx: &FieldCtx) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().map(|a| ctx.mul_root(a, t)).collect() }
    }

    pub fn shift(&self, d: usize, ctx: &FieldCtx) -> ZPoly {
        if self.is_zero() || d == 0 {
            return self.clone();
        }
        let mut coeffs = vec![ctx.zero(); d];
        coeffs.extend(self.coeffs.iter().cloned());
        ZPoly { coeffs }
    }

    pub fn mul_atom(&self, atom: Atom, ctx: &FieldCtx) -> ZPoly {
        let (d, t) = atom.binomial();
        let shifted = self.shift(d, ctx);
        match t {
            None => shifted,
            Some(t) => shifted.sub(&self.mul_root(t, ctx)),
        }
    }

    /// Exact quotient by an atom, or `None` if it does not divide.
    pub fn div_atom(&self, atom: Atom, ctx: &FieldCtx) -> Option<ZPoly> {
        let (d, t) = atom.binomial();
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.coeffs.len() <= d {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quo = vec![ctx.zero(); rem.len() - d];
        for j in (d..rem.len()).rev() {
            let c = std::mem::replace(&mut rem[j], ctx.zero());
            if c.is_zero() {
                continue;
            }
            if let Some(t) = t {
                rem[j - d] = rem[j - d].add(&ctx.mul_root(&c, t));
            }
            quo[j - d] = c;
        }
        if rem[..d].iter().all(CycloScalar::is_zero) {
            Some(ZPoly::from_coeffs(quo))
        } else {
            None
        }
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> ZPoly {
        ZPoly::from_coeffs(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| ctx.mul_int(c, j as i64)).collect())
    }

    /// `p(zeta^s z)`.
    pub fn substitute_root(&self, s: i64, ctx: &FieldCtx) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().enumerate().map(|(j, c)| ctx.mul_root(c, s * j as i64)).collect() }
    }

    /// `z^deg p(1/z)` and the number of trailing zero coefficients removed.
    pub fn reversed(&self) -> (ZPoly, usize) {
        let low = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let coeffs: Vec<CycloScalar> = self.coeffs[low..].iter().rev().cloned().collect();
        (ZPoly::from_coeffs(coeffs), low)
    }

    pub fn map_scalars(&self, f: impl Fn(&CycloScalar) -> CycloScalar) -> ZPoly {
        ZPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_division_roundtrip() {
        let ctx = FieldCtx::new(3).unwrap();
        let p = ZPoly::from_coeffs(vec![ctx.from_int(2), ctx.rho(), ctx.from_int(-1), ctx.one()]);
        for atom in Atom::candidates(&ctx) {
            let q = p.mul_atom(atom, &ctx);
            assert_eq!(q.div_atom(atom, &ctx), Some(p.clone()), "{atom:?}");
        }
        assert_eq!(p.div_atom(Atom::Z, &ctx), None);
    }

    #[test]
    fn binomial_factorisation_multiplies_back() {
        for k in 1..=8 {
            let ctx = FieldCtx::new(k).unwrap();
            let n = ctx.order() as i64;
            // z^2k + 1, z^2k - 1 and, for even k, z^k -+ i
            let mut cases = vec![(2 * k, n / 2), (2 * k, 0), (2, 3), (1, 5)];
            if k % 2 == 0 {
                cases.push((k, n / 4));
                cases.push((k, 3 * n / 4));
            }
            for (d, t) in cases {
                let atoms = binomial_atoms(d, t, &ctx).expect("splits over atoms");
                let prod = atoms.iter().fold(ZPoly::one(&ctx), |p, a| p.mul_atom(*a, &ctx));
                let expect = ZPoly::monomial(ctx.one(), d, &ctx).sub(&ZPoly::constant(ctx.root_power(t)));
                assert_eq!(prod, expect, "k={k} d={d} t={t}");
            }
        }
    }
}
