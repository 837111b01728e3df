//! Normal-ordered differential-difference operators.
//!
//! Every term is stored as `c * dr^p * dphi^q * R^i * I^e`. Products are
//! brought back to this order with the closed form of the rewrite rules:
//!
//! * `R f(z) = f(rho z) R`, `I f(z) = f(1/z) I`; both commute with `r`, `dr`;
//! * `R dphi = dphi R`, `I dphi = -dphi I`, `I R = R^{2k-1} I`;
//! * `R^{2k} = I^2 = 1`;
//! * Leibniz: `dr^p dphi^q c = sum C(p,s) C(q,t) (dr^s dphi^t c) dr^{p-s} dphi^{q-t}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

use crate::coeffring::{Coefficient, Mono, ZRat};
use crate::cyclofield::{CycloScalar, FieldCtx};
use crate::error::{Error, Result};

/// Exponents `(p, q, i, e)` of `dr^p dphi^q R^i I^e`; ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OpKey {
    pub p: u32,
    pub q: u32,
    pub i: u32,
    pub e: u8,
}

impl OpKey {
    pub const IDENTITY: OpKey = OpKey { p: 0, q: 0, i: 0, e: 0 };

    pub fn group(i: u32, e: u8) -> OpKey {
        OpKey { i, e, ..OpKey::IDENTITY }
    }

    pub fn has_group_part(self) -> bool {
        self.i != 0 || self.e != 0
    }
}

/// A normal-ordered operator over one field context.
#[derive(Clone, Debug)]
pub struct OpExpr {
    ctx: Arc<FieldCtx>,
    terms: BTreeMap<OpKey, Coefficient>,
}

impl PartialEq for OpExpr {
    fn eq(&self, other: &OpExpr) -> bool {
        self.ctx.k() == other.ctx.k() && self.terms == other.terms
    }
}

impl Eq for OpExpr {}

/// Pending contributions to each `(key, monomial)` slot, summed once at the end.
struct Accum<'c> {
    ctx: &'c FieldCtx,
    slots: BTreeMap<(OpKey, Mono), Vec<ZRat>>,
}

impl<'c> Accum<'c> {
    fn new(ctx: &'c FieldCtx) -> Self {
        Accum { ctx, slots: BTreeMap::new() }
    }

    fn push(&mut self, key: OpKey, mono: Mono, f: ZRat) {
        if !f.is_zero() {
            self.slots.entry((key, mono)).or_default().push(f);
        }
    }

    fn push_coeff(&mut self, key: OpKey, c: &Coefficient) {
        for (m, f) in c.terms() {
            self.push(key, *m, f.clone());
        }
    }

    fn finish(self, ctx: Arc<FieldCtx>) -> OpExpr {
        let mut by_key: BTreeMap<OpKey, Vec<(Mono, ZRat)>> = BTreeMap::new();
        for ((key, mono), fs) in self.slots {
            let f = ZRat::sum(&fs, self.ctx);
            if !f.is_zero() {
                by_key.entry(key).or_default().push((mono, f));
            }
        }
        let terms = by_key.into_iter().map(|(key, items)| (key, Coefficient::from_terms(items, &ctx))).collect();
        OpExpr { ctx, terms }
    }
}

fn binomial(n: u32, r: u32) -> i64 {
    (0..r as i64).fold(1i64, |acc, j| acc * (n as i64 - j) / (j + 1))
}

impl OpExpr {
    pub fn zero(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::term(ctx, OpKey::IDENTITY, Coefficient::one(ctx))
    }

    pub fn term(ctx: &Arc<FieldCtx>, key: OpKey, c: Coefficient) -> OpExpr {
        let mut out = OpExpr::zero(ctx);
        let key = OpKey { i: key.i % (2 * ctx.k() as u32), e: key.e % 2, ..key };
        if !c.is_zero() {
            out.terms.insert(key, c);
        }
        out
    }

    pub fn from_terms(ctx: &Arc<FieldCtx>, items: impl IntoIterator<Item = (OpKey, Coefficient)>) -> OpExpr {
        let mut acc = Accum::new(ctx);
        let n = 2 * ctx.k() as u32;
        for (key, c) in items {
            acc.push_coeff(OpKey { i: key.i % n, e: key.e % 2, ..key }, &c);
        }
        acc.finish(ctx.clone())
    }

    pub fn scalar(ctx: &Arc<FieldCtx>, c: CycloScalar) -> OpExpr {
        OpExpr::zrat(ctx, ZRat::from_scalar(c))
    }

    pub fn int(ctx: &Arc<FieldCtx>, v: i64) -> OpExpr {
        OpExpr::scalar(ctx, ctx.from_int(v))
    }

    pub fn zrat(ctx: &Arc<FieldCtx>, f: ZRat) -> OpExpr {
        OpExpr::term(ctx, OpKey::IDENTITY, Coefficient::from_zrat(Mono::ONE, f))
    }

    pub fn mono(ctx: &Arc<FieldCtx>, mono: Mono) -> OpExpr {
        OpExpr::term(ctx, OpKey::IDENTITY, Coefficient::from_zrat(mono, ZRat::one(ctx)))
    }

    /// `r^m`.
    pub fn r_pow(ctx: &Arc<FieldCtx>, m: i32) -> OpExpr {
        OpExpr::mono(ctx, Mono::r(m))
    }

    pub fn param_a(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::mono(ctx, Mono { a: 1, ..Mono::ONE })
    }

    pub fn param_b(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::mono(ctx, Mono { b: 1, ..Mono::ONE })
    }

    pub fn param_w2(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::mono(ctx, Mono { w: 1, ..Mono::ONE })
    }

    pub fn dr(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::term(ctx, OpKey { p: 1, ..OpKey::IDENTITY }, Coefficient::one(ctx))
    }

    pub fn dphi(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::term(ctx, OpKey { q: 1, ..OpKey::IDENTITY }, Coefficient::one(ctx))
    }

    /// `R^i`, exponent reduced mod 2k.
    pub fn rot(ctx: &Arc<FieldCtx>, i: i64) -> OpExpr {
        let n = 2 * ctx.k() as i64;
        OpExpr::term(ctx, OpKey::group(i.rem_euclid(n) as u32, 0), Coefficient::one(ctx))
    }

    pub fn refl(ctx: &Arc<FieldCtx>) -> OpExpr {
        OpExpr::term(ctx, OpKey::group(0, 1), Coefficient::one(ctx))
    }

    /// `R^i I^e`.
    pub fn group_elem(ctx: &Arc<FieldCtx>, i: i64, e: bool) -> OpExpr {
        let n = 2 * ctx.k() as i64;
        OpExpr::term(ctx, OpKey::group(i.rem_euclid(n) as u32, e as u8), Coefficient::one(ctx))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.ctx.k()
    }

    pub fn terms(&self) -> &BTreeMap<OpKey, Coefficient> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero `(key, monomial)` entries.
    pub fn term_count(&self) -> usize {
        self.terms.values().map(Coefficient::len).sum()
    }

    /// Iterates nonzero `(key, monomial, value)` entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (OpKey, Mono, &ZRat)> + '_ {
        self.terms.iter().flat_map(|(k, c)| c.terms().iter().map(move |(m, f)| (*k, *m, f)))
    }

    /// Largest `(p, q)` over all terms.
    pub fn max_orders(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(p, q), k| (p.max(k.p), q.max(k.q)))
    }

    /// Largest `(a, b, w2)` degrees over all coefficients.
    pub fn max_param_degrees(&self) -> (u8, u8, u8) {
        self.terms
            .values()
            .map(Coefficient::max_degrees)
            .fold((0, 0, 0), |(a, b, w), (x, y, z)| (a.max(x), b.max(y), w.max(z)))
    }

    fn check_ctx(&self, other: &OpExpr) -> Result<()> {
        if self.ctx.k() != other.ctx.k() {
            return Err(Error::MixedContext(self.ctx.k(), other.ctx.k()));
        }
        Ok(())
    }

    pub fn neg(&self) -> OpExpr {
        OpExpr { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn add(&self, other: &OpExpr) -> Result<OpExpr> {
        self.check_ctx(other)?;
        OpExpr::sum_of(&self.ctx, [self, other])
    }

    pub fn sub(&self, other: &OpExpr) -> Result<OpExpr> {
        self.add(&other.neg())
    }

    /// Sum with a single normalisation pass.
    pub fn sum_of<'a>(ctx: &Arc<FieldCtx>, items: impl IntoIterator<Item = &'a OpExpr>) -> Result<OpExpr> {
        let mut acc = Accum::new(ctx);
        for x in items {
            if x.ctx.k() != ctx.k() {
                return Err(Error::MixedContext(ctx.k(), x.ctx.k()));
            }
            for (key, c) in &x.terms {
                acc.push_coeff(*key, c);
            }
        }
        Ok(acc.finish(ctx.clone()))
    }

    pub fn scale(&self, c: &CycloScalar) -> OpExpr {
        let terms = self.terms.iter().map(|(k, v)| (*k, v.scale(c, &self.ctx))).filter(|(_, v)| !v.is_zero()).collect();
        OpExpr { ctx: self.ctx.clone(), terms }
    }

    pub fn scale_int(&self, v: i64) -> OpExpr {
        self.scale(&self.ctx.from_int(v))
    }

    /// Product, normal-ordered.
    pub fn mul(&self, other: &OpExpr) -> Result<OpExpr> {
        self.check_ctx(other)?;
        let ctx: &FieldCtx = &self.ctx;
        let n = 2 * ctx.k() as u32;
        let mut acc = Accum::new(ctx);
        let right: Vec<(&OpKey, &Coefficient)> = other.terms.iter().collect();
        // (i1, e1, right index, t) -> dphi^t of the group-moved coefficient
        let mut moved: HashMap<(u32, u8, usize, u32), Coefficient> = HashMap::new();
        for (k1, c1) in &self.terms {
            for (idx, (k2, c2)) in right.iter().enumerate() {
                let sign = if k1.e == 1 && k2.q % 2 == 1 { -1 } else { 1 };
                let i = if k1.e == 1 { (k1.i + n - k2.i) % n } else { (k1.i + k2.i) % n };
                let e = k1.e ^ k2.e;
                for t in 0..=k1.q {
                    let dt = moved_coeff(&mut moved, (k1.i, k1.e, idx, t), c2, ctx).clone();
                    for s in 0..=k1.p {
                        let deriv = dt.d_r(s, ctx);
                        if deriv.is_zero() {
                            continue;
                        }
                        let factor = sign * binomial(k1.p, s) * binomial(k1.q, t);
                        let key = OpKey { p: k1.p - s + k2.p, q: k1.q - t + k2.q, i, e };
                        for (m1, f1) in c1.terms() {
                            for (m2, f2) in deriv.terms() {
                                let f = f1.mul(f2, ctx);
                                let f = if factor == 1 { f } else { f.scale_int(factor, ctx) };
                                acc.push(key, m1.times(*m2), f);
                            }
                        }
                    }
                }
            }
        }
        Ok(acc.finish(self.ctx.clone()))
    }

    pub fn pow(&self, n: u32) -> Result<OpExpr> {
        let mut acc = OpExpr::one(&self.ctx);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &OpExpr) -> Result<OpExpr> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &OpExpr) -> Result<OpExpr> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Formal adjoint for the measure `r dr dphi`: `dr^+ = -dr - 1/r`,
    /// `dphi^+ = -dphi`, `R^+ = R^{2k-1}`, `I^+ = I`, coefficients conjugated.
    pub fn adjoint(&self) -> OpExpr {
        let ctx = &self.ctx;
        let dr_adj = OpExpr::dr(ctx).neg().sub(&OpExpr::r_pow(ctx, -1)).expect("same ctx");
        let dphi_adj = OpExpr::dphi(ctx).neg();
        let mut parts = Vec::with_capacity(self.terms.len());
        for (key, c) in &self.terms {
            // (c dr^p dphi^q R^i I^e)^+ = I^e R^{-i} (dphi^+)^q (dr^+)^p c^+
            let mut x = OpExpr::one(ctx);
            if key.e == 1 {
                x = OpExpr::refl(ctx);
            }
            let chain = [
                OpExpr::rot(ctx, -(key.i as i64)),
                dphi_adj.pow(key.q).expect("same ctx"),
                dr_adj.pow(key.p).expect("same ctx"),
                OpExpr::term(ctx, OpKey::IDENTITY, c.conj(ctx)),
            ];
            for f in &chain {
                x = x.mul(f).expect("same ctx");
            }
            parts.push(x);
        }
        OpExpr::sum_of(ctx, &parts).expect("same ctx")
    }

    /// Identity-representation projection: `R, I -> 1` on the normal form.
    pub fn project_identity(&self) -> OpExpr {
        let items = self.terms.iter().map(|(k, c)| (OpKey { i: 0, e: 0, ..*k }, c.clone()));
        OpExpr::from_terms(&self.ctx, items)
    }

    /// Whether every term has trivial group part.
    pub fn is_differential(&self) -> bool {
        self.terms.keys().all(|k| !k.has_group_part())
    }

    /// Drops all terms except those selected.
    pub fn filter(&self, keep: impl Fn(OpKey, Mono) -> bool) -> OpExpr {
        let items =
            self.entries().filter(|(k, m, _)| keep(*k, *m)).map(|(k, m, f)| (k, Coefficient::from_zrat(m, f.clone())));
        OpExpr::from_terms(&self.ctx, items.collect::<Vec<_>>())
    }

    /// Applies a map to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(OpKey, &Coefficient) -> Coefficient) -> OpExpr {
        let items: Vec<_> = self.terms.iter().map(|(k, c)| (*k, f(*k, c))).collect();
        OpExpr::from_terms(&self.ctx, items)
    }

    /// Left-to-right product of factors.
    pub fn product<'a>(ctx: &Arc<FieldCtx>, factors: impl IntoIterator<Item = &'a OpExpr>) -> Result<OpExpr> {
        factors.into_iter().try_fold(OpExpr::one(ctx), |acc, f| acc.mul(f))
    }
}

fn moved_coeff<'m>(
    memo: &'m mut HashMap<(u32, u8, usize, u32), Coefficient>,
    key: (u32, u8, usize, u32),
    c2: &Coefficient,
    ctx: &FieldCtx,
) -> &'m Coefficient {
    if !memo.contains_key(&key) {
        let (i1, e1, idx, t) = key;
        let v = if t == 0 {
            let c = if e1 == 1 { c2.reflect(ctx) } else { c2.clone() };
            c.rotate_by(i1 as i64, ctx)
        } else {
            moved_coeff(memo, (i1, e1, idx, t - 1), c2, ctx).d_phi(ctx)
        };
        memo.insert(key, v);
    }
    &memo[&key]
}

/// A symbol in a generator word, for [`normal_form`].
#[derive(Clone, Debug)]
pub enum Factor {
    Dr,
    Dphi,
    Rot,
    Refl,
    RPow(i32),
    Coeff(ZRat),
    Expr(OpExpr),
}

/// Normal form of a word of generators and operator values.
pub fn normal_form(ctx: &Arc<FieldCtx>, word: &[Factor]) -> Result<OpExpr> {
    let mut acc = OpExpr::one(ctx);
    for f in word {
        let x = match f {
            Factor::Dr => OpExpr::dr(ctx),
            Factor::Dphi => OpExpr::dphi(ctx),
            Factor::Rot => OpExpr::rot(ctx, 1),
            Factor::Refl => OpExpr::refl(ctx),
            Factor::RPow(m) => OpExpr::r_pow(ctx, *m),
            Factor::Coeff(z) => OpExpr::zrat(ctx, z.clone()),
            Factor::Expr(x) => x.clone(),
        };
        acc = acc.mul(&x)?;
    }
    Ok(acc)
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        /// Panics if the operands belong to different contexts.
        impl ops::$trait<&OpExpr> for &OpExpr {
            type Output = OpExpr;
            fn $method(self, rhs: &OpExpr) -> OpExpr {
                OpExpr::$call(self, rhs).expect("operands share a field context")
            }
        }

        impl ops::$trait<OpExpr> for OpExpr {
            type Output = OpExpr;
            fn $method(self, rhs: OpExpr) -> OpExpr {
                OpExpr::$call(&self, &rhs).expect("operands share a field context")
            }
        }
    };
}

checked_binop!(Add, add, add);
checked_binop!(Sub, sub, sub);
checked_binop!(Mul, mul, mul);

impl ops::Neg for &OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        OpExpr::neg(self)
    }
}

impl ops::Neg for OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        OpExpr::neg(&self)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::exprparse::pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{trig, TrigKind};

    fn ctx(k: usize) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(k).unwrap())
    }

    #[test]
    fn group_relations_reduce() {
        for k in 1..=6 {
            let c = ctx(k);
            let i = OpExpr::refl(&c);
            assert_eq!(&i * &i, OpExpr::one(&c));
            let r = OpExpr::rot(&c, 1);
            assert_eq!(r.pow(2 * k as u32).unwrap(), OpExpr::one(&c));
            assert_eq!(&i * &r, &OpExpr::rot(&c, 2 * k as i64 - 1) * &i);
        }
        let c = ctx(3);
        let ir = &OpExpr::refl(&c) * &OpExpr::rot(&c, 1);
        assert_eq!(ir.terms().keys().next(), Some(&OpKey::group(5, 1)));
    }

    #[test]
    fn dphi_past_z() {
        let c = ctx(3);
        let z = OpExpr::zrat(&c, ZRat::z_pow(1, &c));
        let lhs = &OpExpr::dphi(&c) * &z;
        let iz = OpExpr::zrat(&c, ZRat::z_pow(1, &c).scale(&c.imag_unit(), &c));
        assert_eq!(lhs, &(&z * &OpExpr::dphi(&c)) + &iz);
    }

    #[test]
    fn dr_past_r_power() {
        let c = ctx(2);
        let lhs = &OpExpr::dr(&c) * &OpExpr::r_pow(&c, -2);
        let rhs = &(&OpExpr::r_pow(&c, -2) * &OpExpr::dr(&c)) + &OpExpr::r_pow(&c, -3).scale_int(-2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn partials_commute() {
        let c = ctx(4);
        assert!(OpExpr::dr(&c).commutator(&OpExpr::dphi(&c)).unwrap().is_zero());
    }

    #[test]
    fn mixed_contexts_rejected() {
        let (a, b) = (ctx(2), ctx(3));
        assert!(matches!(OpExpr::dr(&a).mul(&OpExpr::dr(&b)), Err(Error::MixedContext(2, 3))));
        assert!(OpExpr::dr(&a).add(&OpExpr::dr(&b)).is_err());
    }

    #[test]
    fn reflection_moves_through_coefficients() {
        let c = ctx(3);
        let tan = trig(TrigKind::TanShift, 0, &c).unwrap();
        let lhs = &OpExpr::refl(&c) * &OpExpr::zrat(&c, tan.clone());
        let rhs = &OpExpr::zrat(&c, tan.neg()) * &OpExpr::refl(&c);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_of_group_word() {
        let c = ctx(3);
        let x = &OpExpr::rot(&c, 3) * &OpExpr::refl(&c);
        assert_eq!(x.project_identity(), OpExpr::one(&c));
    }

    #[test]
    fn adjoint_of_generators() {
        let c = ctx(3);
        assert_eq!(OpExpr::rot(&c, 1).adjoint(), OpExpr::rot(&c, 5));
        assert_eq!(OpExpr::refl(&c).adjoint(), OpExpr::refl(&c));
        assert_eq!(OpExpr::dphi(&c).adjoint(), OpExpr::dphi(&c).neg());
        let expect = &OpExpr::dr(&c).neg() - &OpExpr::r_pow(&c, -1);
        assert_eq!(OpExpr::dr(&c).adjoint(), expect);
    }

    #[test]
    fn normal_form_of_word() {
        let c = ctx(3);
        let x = normal_form(&c, &[Factor::Refl, Factor::Refl, Factor::Dphi, Factor::Rot]).unwrap();
        assert_eq!(x, &OpExpr::dphi(&c) * &OpExpr::rot(&c, 1));
    }
}
