use std::collections::BTreeMap;

use super::zrat::ZRat;
use crate::cyclofield::{CycloScalar, FieldCtx};

/// Monomial `r^m a^alpha b^beta w2^gamma`; field order is the key order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    pub m: i32,
    pub a: u8,
    pub b: u8,
    pub w: u8,
}

impl Mono {
    pub const ONE: Mono = Mono { m: 0, a: 0, b: 0, w: 0 };

    pub fn r(m: i32) -> Mono {
        Mono { m, ..Mono::ONE }
    }

    pub fn times(self, o: Mono) -> Mono {
        Mono { m: self.m + o.m, a: self.a + o.a, b: self.b + o.b, w: self.w + o.w }
    }

    pub fn is_parameter_free(self) -> bool {
        self.a == 0 && self.b == 0 && self.w == 0
    }
}

/// Polynomial in `a, b, w2` with Laurent-in-`r` times `ZRat` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Coefficient {
    terms: BTreeMap<Mono, ZRat>,
}

impl Coefficient {
    pub fn zero() -> Coefficient {
        Coefficient::default()
    }

    pub fn one(ctx: &FieldCtx) -> Coefficient {
        Coefficient::from_zrat(Mono::ONE, ZRat::one(ctx))
    }

    pub fn from_zrat(mono: Mono, f: ZRat) -> Coefficient {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(mono, f);
        }
        Coefficient { terms }
    }

    pub fn from_terms(items: impl IntoIterator<Item = (Mono, ZRat)>, ctx: &FieldCtx) -> Coefficient {
        let mut acc: BTreeMap<Mono, Vec<ZRat>> = BTreeMap::new();
        for (m, f) in items {
            acc.entry(m).or_default().push(f);
        }
        let terms = acc.into_iter().map(|(m, fs)| (m, ZRat::sum(&fs, ctx))).filter(|(_, f)| !f.is_zero()).collect();
        Coefficient { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Mono, ZRat> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Mono, ZRat> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn neg(&self) -> Coefficient {
        self.map(|f| f.neg())
    }

    pub fn add(&self, other: &Coefficient, ctx: &FieldCtx) -> Coefficient {
        let items = self.terms.iter().chain(other.terms.iter()).map(|(m, f)| (*m, f.clone()));
        Coefficient::from_terms(items, ctx)
    }

    pub fn sub(&self, other: &Coefficient, ctx: &FieldCtx) -> Coefficient {
        self.add(&other.neg(), ctx)
    }

    pub fn mul(&self, other: &Coefficient, ctx: &FieldCtx) -> Coefficient {
        let mut items = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, f1) in &self.terms {
            for (m2, f2) in &other.terms {
                items.push((m1.times(*m2), f1.mul(f2, ctx)));
            }
        }
        Coefficient::from_terms(items, ctx)
    }

    pub fn scale(&self, c: &CycloScalar, ctx: &FieldCtx) -> Coefficient {
        if c.is_zero() {
            return Coefficient::zero();
        }
        self.map(|f| f.scale(c, ctx))
    }

    /// Applies a map to every `ZRat` value, dropping zeros.
    pub fn map(&self, f: impl Fn(&ZRat) -> ZRat) -> Coefficient {
        Coefficient { terms: self.terms.iter().map(|(m, v)| (*m, f(v))).filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn rotate_by(&self, steps: i64, ctx: &FieldCtx) -> Coefficient {
        self.map(|f| f.rotate_by(steps, ctx))
    }

    pub fn reflect(&self, ctx: &FieldCtx) -> Coefficient {
        self.map(|f| f.reflect(ctx))
    }

    /// Parameters and `r` are real.
    pub fn conj(&self, ctx: &FieldCtx) -> Coefficient {
        self.map(|f| f.conj(ctx))
    }

    pub fn d_phi(&self, ctx: &FieldCtx) -> Coefficient {
        self.map(|f| f.d_phi(ctx))
    }

    /// `d^s / dr^s` on the Laurent `r` factor.
    pub fn d_r(&self, s: u32, ctx: &FieldCtx) -> Coefficient {
        if s == 0 {
            return self.clone();
        }
        let mut items = Vec::new();
        for (mono, f) in &self.terms {
            let m = mono.m as i64;
            let falling: i64 = (0..s as i64).map(|j| m - j).product();
            if falling != 0 {
                items.push((Mono { m: mono.m - s as i32, ..*mono }, f.scale_int(falling, ctx)));
            }
        }
        Coefficient::from_terms(items, ctx)
    }

    /// Structural degrees (max r-exponent magnitude aside): `(a, b, w2)`.
    pub fn max_degrees(&self) -> (u8, u8, u8) {
        self.terms.keys().fold((0, 0, 0), |(a, b, w), m| (a.max(m.a), b.max(m.b), w.max(m.w)))
    }
}
