//! Seeded random values for property tests and benchmarks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::coeffring::{trig, Coefficient, Mono, TrigKind, ZRat};
use crate::cyclofield::{CycloScalar, FieldCtx};
use crate::opalgebra::{OpExpr, OpKey};

fn small_rational(rng: &mut impl Rng) -> BigRational {
    let n = rng.gen_range(-5i64..=5);
    let d = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Field element with a few nonzero power-basis coordinates.
pub fn scalar(rng: &mut impl Rng, ctx: &FieldCtx) -> CycloScalar {
    let mut coords = vec![BigRational::from_integer(BigInt::from(0)); ctx.degree()];
    for _ in 0..rng.gen_range(1..=3) {
        let j = rng.gen_range(0..coords.len());
        coords[j] = small_rational(rng);
    }
    ctx.from_coords(&coords)
}

/// Nonzero field element.
pub fn nonzero_scalar(rng: &mut impl Rng, ctx: &FieldCtx) -> CycloScalar {
    loop {
        let x = scalar(rng, ctx);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Scalar Laurent monomial in `z`, optionally times a shifted trigonometric function.
pub fn zrat(rng: &mut impl Rng, ctx: &FieldCtx) -> ZRat {
    let base = ZRat::z_pow(rng.gen_range(-2..=2), ctx).scale(&scalar(rng, ctx), ctx);
    if rng.gen_bool(0.5) {
        return base;
    }
    loop {
        let kind = TrigKind::ALL[rng.gen_range(0..TrigKind::ALL.len())];
        let j = rng.gen_range(0..2 * ctx.k() as i64);
        if let Ok(t) = trig(kind, j, ctx) {
            return base.mul(&t, ctx);
        }
    }
}

pub fn mono(rng: &mut impl Rng) -> Mono {
    Mono { m: rng.gen_range(-2..=2), a: rng.gen_range(0..=1), b: rng.gen_range(0..=1), w: rng.gen_range(0..=1) }
}

pub fn key(rng: &mut impl Rng, ctx: &FieldCtx) -> OpKey {
    OpKey {
        p: rng.gen_range(0..=1),
        q: rng.gen_range(0..=1),
        i: rng.gen_range(0..2 * ctx.k() as u32),
        e: rng.gen_range(0..=1),
    }
}

/// Sum of up to `max_terms` random terms `c(r, z; a, b, w2) dr^p dphi^q R^i I^e`.
pub fn op_expr(rng: &mut impl Rng, ctx: &Arc<FieldCtx>, max_terms: usize) -> OpExpr {
    let n = rng.gen_range(1..=max_terms.max(1));
    OpExpr::from_terms(ctx, (0..n).map(|_| (key(rng, ctx), Coefficient::from_zrat(mono(rng), zrat(rng, ctx)))))
}

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
