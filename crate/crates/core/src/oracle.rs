//! Numeric second witness.
//!
//! Operators are applied factor by factor to a smooth test function
//! `r^s exp(c r^2) P(z)` and evaluated at a sample point. Nothing is normal
//! ordered: a factor receives the truncated Taylor jets (in `dr`, `dphi`) of its
//! argument at every point of the dihedral orbit of the sample point, which is
//! exactly what derivatives, `R` and `I` need. Coefficients are evaluated
//! from their numerators and denominators in double precision.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffring::{Coefficient, Mono};
use crate::cyclofield::FieldCtx;
use crate::opalgebra::{OpExpr, OpKey};
use crate::optree::OpTree;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn tri(m: usize, n: usize) -> usize {
    let t = m + n;
    t * (t + 1) / 2 + n
}

/// Truncated bivariate Taylor series in `(dr, dphi)` of total degree `deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    deg: usize,
    c: Vec<Complex64>,
}

impl Jet {
    pub fn zero(deg: usize) -> Jet {
        Jet { deg, c: vec![ZERO; tri(0, deg) + 1] }
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Coefficient of `dr^m dphi^n`.
    pub fn coeff(&self, m: usize, n: usize) -> Complex64 {
        if m + n > self.deg {
            ZERO
        } else {
            self.c[tri(m, n)]
        }
    }

    /// Product `a(dr) b(dphi)` of two univariate series.
    pub fn outer(a: &[Complex64], b: &[Complex64], deg: usize) -> Jet {
        let mut out = Jet::zero(deg);
        for (m, x) in a.iter().enumerate().take(deg + 1) {
            for (n, y) in b.iter().enumerate().take(deg + 1 - m) {
                out.c[tri(m, n)] = x * y;
            }
        }
        out
    }

    pub fn truncate(&self, deg: usize) -> Jet {
        assert!(deg <= self.deg, "jet degree {} cannot be raised to {deg}", self.deg);
        let mut c = self.c.clone();
        c.truncate(tri(0, deg) + 1);
        Jet { deg, c }
    }

    pub fn add_assign(&mut self, o: &Jet) {
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x += y;
        }
    }

    pub fn neg(&self) -> Jet {
        Jet { deg: self.deg, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn conj(&self) -> Jet {
        Jet { deg: self.deg, c: self.c.iter().map(Complex64::conj).collect() }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let deg = self.deg.min(o.deg);
        let mut out = Jet::zero(deg);
        for t1 in 0..=deg {
            for n1 in 0..=t1 {
                let x = self.c[tri(t1 - n1, n1)];
                if x == ZERO {
                    continue;
                }
                for t2 in 0..=deg - t1 {
                    for n2 in 0..=t2 {
                        out.c[tri(t1 - n1 + t2 - n2, n1 + n2)] += x * o.c[tri(t2 - n2, n2)];
                    }
                }
            }
        }
        out
    }

    pub fn d_r(&self) -> Jet {
        let deg = self.deg - 1;
        let mut out = Jet::zero(deg);
        for t in 0..=deg {
            for n in 0..=t {
                let m = t - n;
                out.c[tri(m, n)] = self.c[tri(m + 1, n)] * (m + 1) as f64;
            }
        }
        out
    }

    pub fn d_phi(&self) -> Jet {
        let deg = self.deg - 1;
        let mut out = Jet::zero(deg);
        for t in 0..=deg {
            for n in 0..=t {
                out.c[tri(t - n, n)] = self.c[tri(t - n, n + 1)] * (n + 1) as f64;
            }
        }
        out
    }

    /// Jet of `f(r, -phi)` from the jet of `f` at `-phi`.
    pub fn flip_phi(&self) -> Jet {
        let mut out = self.clone();
        for t in 0..=self.deg {
            for n in (1..=t).step_by(2) {
                out.c[tri(t - n, n)] = -out.c[tri(t - n, n)];
            }
        }
        out
    }
}

fn series_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    let mut out = vec![ZERO; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn series_recip(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut out = vec![ZERO; n];
    out[0] = ONE / a[0];
    for i in 1..n {
        let mut s = ZERO;
        for j in 1..=i {
            s += a[j] * out[i - j];
        }
        out[i] = -s * out[0];
    }
    out
}

fn series_exp(h: &[Complex64]) -> Vec<Complex64> {
    let n = h.len();
    let mut g = vec![ZERO; n];
    g[0] = h[0].exp();
    for i in 1..n {
        let mut s = ZERO;
        for j in 1..=i {
            s += h[j] * g[i - j] * j as f64;
        }
        g[i] = s / i as f64;
    }
    g
}

/// `(r0 + d)^m` as a series in `d`.
fn r_power_series(r0: f64, m: i32, deg: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(deg + 1);
    let mut binom = 1.0;
    for j in 0..=deg {
        out.push(Complex64::new(binom * r0.powi(m - j as i32), 0.0));
        binom *= (m as f64 - j as f64) / (j as f64 + 1.0);
    }
    out
}

/// `e^{i n (phi + d)}` as a series in `d`.
fn z_power_series(phi: f64, n: i32, deg: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(deg + 1);
    let base = Complex64::from_polar(1.0, n as f64 * phi);
    let step = Complex64::new(0.0, n as f64);
    let mut term = base;
    for j in 0..=deg {
        out.push(term);
        term = term * step / (j as f64 + 1.0);
    }
    out
}

/// Smooth test function `r^s exp(c r^2) P(z)`, `P` a Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunc {
    pub s: i32,
    pub c: f64,
    /// `(n, coefficient of z^n)`
    pub p: Vec<(i32, (f64, f64))>,
}

impl TestFunc {
    pub fn value(&self, r: f64, phi: f64) -> Complex64 {
        let radial = r.powi(self.s) * (self.c * r * r).exp();
        let ang: Complex64 = self
            .p
            .iter()
            .map(|(n, (re, im))| Complex64::new(*re, *im) * Complex64::from_polar(1.0, *n as f64 * phi))
            .sum();
        ang * radial
    }

    /// Jet at `(r0, phi)`.
    pub fn jet(&self, r0: f64, phi: f64, deg: usize) -> Jet {
        let rs = r_power_series(r0, self.s, deg);
        let mut h = vec![ZERO; deg + 1];
        h[0] = Complex64::new(self.c * r0 * r0, 0.0);
        if deg >= 1 {
            h[1] = Complex64::new(2.0 * self.c * r0, 0.0);
        }
        if deg >= 2 {
            h[2] = Complex64::new(self.c, 0.0);
        }
        let radial = series_mul(&rs, &series_exp(&h));
        let mut ang = vec![ZERO; deg + 1];
        for (n, (re, im)) in &self.p {
            let coef = Complex64::new(*re, *im);
            for (j, v) in z_power_series(phi, *n, deg).into_iter().enumerate() {
                ang[j] += coef * v;
            }
        }
        Jet::outer(&radial, &ang, deg)
    }

    /// Random function; `invariant` restricts `P` to `D_{2k}`-invariant ones.
    pub fn draw(rng: &mut impl Rng, k: usize, invariant: bool) -> TestFunc {
        let s = rng.gen_range(0..=3);
        let c = -(rng.gen_range(1..=4) as f64) / 4.0;
        let mut p = Vec::new();
        let coef = |rng: &mut dyn rand::RngCore| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if invariant {
            let step = 2 * k as i32;
            p.push((0, coef(rng)));
            for m in 1..=2 {
                let v = coef(rng);
                p.push((m * step, v));
                p.push((-m * step, v));
            }
        } else {
            for n in -3..=3 {
                p.push((n, coef(rng)));
            }
        }
        TestFunc { s, c, p }
    }
}

/// Evaluation point and parameter values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    pub r: f64,
    pub phi: f64,
    pub a: f64,
    pub b: f64,
    pub w2: f64,
}

impl SamplePoint {
    /// Uniform draw with `phi` in `(0, pi/(2k))` and `|sin k phi|`, `|cos k phi|` at least `margin`.
    pub fn draw(rng: &mut impl Rng, k: usize, margin: f64) -> SamplePoint {
        let kf = k as f64;
        let phi = loop {
            let phi: f64 = rng.gen_range(0.0..PI / (2.0 * kf));
            if (kf * phi).sin().abs() >= margin && (kf * phi).cos().abs() >= margin {
                break phi;
            }
        };
        SamplePoint {
            r: rng.gen_range(0.6..1.8),
            phi,
            a: rng.gen_range(0.5..3.0),
            b: rng.gen_range(0.5..3.0),
            w2: rng.gen_range(0.5..3.0),
        }
    }
}

/// Coefficient as complex numerator/denominator coefficient lists per monomial.
#[derive(Clone, Debug)]
struct NumCoeff {
    parts: Vec<(Mono, Vec<Complex64>, Vec<Complex64>)>,
}

impl NumCoeff {
    fn new(c: &Coefficient, ctx: &FieldCtx) -> NumCoeff {
        let parts = c
            .terms()
            .iter()
            .map(|(m, f)| {
                let num = f.numerator().coeffs().iter().map(|x| ctx.embed(x)).collect();
                let den = f.den_poly(ctx).coeffs().iter().map(|x| ctx.embed(x)).collect();
                (*m, num, den)
            })
            .collect();
        NumCoeff { parts }
    }
}

#[derive(Clone, Debug)]
struct NumTerm {
    p: u32,
    q: u32,
    i: u32,
    e: u8,
    coeff: NumCoeff,
    conj: bool,
}

#[derive(Clone, Debug)]
enum NumTree {
    Leaf(Vec<NumTerm>),
    Sum(Vec<NumTree>),
    Prod(Vec<NumTree>),
    Neg(Box<NumTree>),
}

impl NumTree {
    fn order(&self) -> usize {
        match self {
            NumTree::Leaf(ts) => ts.iter().map(|t| (t.p + t.q) as usize).max().unwrap_or(0),
            NumTree::Sum(xs) => xs.iter().map(NumTree::order).max().unwrap_or(0),
            NumTree::Prod(xs) => xs.iter().map(NumTree::order).sum(),
            NumTree::Neg(x) => x.order(),
        }
    }
}

fn leaf_of(x: &OpExpr, ctx: &FieldCtx, conj: bool) -> NumTree {
    NumTree::Leaf(
        x.terms()
            .iter()
            .map(|(k, c)| NumTerm { p: k.p, q: k.q, i: k.i, e: k.e, coeff: NumCoeff::new(c, ctx), conj })
            .collect(),
    )
}

/// Lowers a tree, pushing adjoints down to generators: `(c dr^p dphi^q R^i I^e)^+ =
/// I^e R^{-i} (-dphi)^q (-dr - 1/r)^p conj(c)`, products reversed.
fn lower(t: &OpTree, ctx: &Arc<FieldCtx>, adjoint: bool) -> NumTree {
    match (t, adjoint) {
        (OpTree::Leaf(x), false) => leaf_of(x, ctx, false),
        (OpTree::Leaf(x), true) => {
            let dphi_adj = leaf_of(&OpExpr::dphi(ctx).neg(), ctx, false);
            let dr_adj = leaf_of(&(&OpExpr::dr(ctx).neg() - &OpExpr::r_pow(ctx, -1)), ctx, false);
            let terms = x
                .terms()
                .iter()
                .map(|(k, c)| {
                    let mut f = Vec::new();
                    if k.e == 1 {
                        f.push(leaf_of(&OpExpr::refl(ctx), ctx, false));
                    }
                    f.push(leaf_of(&OpExpr::rot(ctx, -(k.i as i64)), ctx, false));
                    f.extend(std::iter::repeat_n(dphi_adj.clone(), k.q as usize));
                    f.extend(std::iter::repeat_n(dr_adj.clone(), k.p as usize));
                    let coeff = OpExpr::term(ctx, OpKey::IDENTITY, c.clone());
                    f.push(leaf_of(&coeff, ctx, true));
                    NumTree::Prod(f)
                })
                .collect();
            NumTree::Sum(terms)
        }
        (OpTree::Sum(xs), adj) => NumTree::Sum(xs.iter().map(|x| lower(x, ctx, adj)).collect()),
        (OpTree::Prod(xs), false) => NumTree::Prod(xs.iter().map(|x| lower(x, ctx, false)).collect()),
        (OpTree::Prod(xs), true) => NumTree::Prod(xs.iter().rev().map(|x| lower(x, ctx, true)).collect()),
        (OpTree::Neg(x), adj) => NumTree::Neg(Box::new(lower(x, ctx, adj))),
        (OpTree::Adjoint(x), adj) => lower(x, ctx, !adj),
    }
}

/// Orbit of the sample point: index `2k sigma + j` is the angle `(-1)^sigma phi + j pi/k`.
struct Orbit<'p> {
    k: usize,
    pt: &'p SamplePoint,
    angles: Vec<f64>,
    r_series: HashMap<i32, Vec<Complex64>>,
    deg: usize,
}

impl<'p> Orbit<'p> {
    fn new(k: usize, pt: &'p SamplePoint, deg: usize) -> Orbit<'p> {
        let n = 2 * k;
        let angles = (0..2 * n)
            .map(|x| {
                let (sigma, j) = (x / n, x % n);
                let base = if sigma == 0 { pt.phi } else { -pt.phi };
                base + j as f64 * PI / k as f64
            })
            .collect();
        Orbit { k, pt, angles, r_series: HashMap::new(), deg }
    }

    fn len(&self) -> usize {
        4 * self.k
    }

    /// Orbit index reached by `R^i I^e` from point `x`, and whether `dphi` flips.
    fn source(&self, x: usize, i: u32, e: u8) -> (usize, bool) {
        let n = 2 * self.k;
        let (sigma, j) = (x / n, x % n);
        let moved = (j + i as usize) % n;
        if e == 0 {
            (sigma * n + moved, false)
        } else {
            ((1 - sigma) * n + (n - moved) % n, true)
        }
    }

    fn r_series(&mut self, m: i32) -> &[Complex64] {
        let (r0, deg) = (self.pt.r, self.deg);
        self.r_series.entry(m).or_insert_with(|| r_power_series(r0, m, deg))
    }

    fn coeff_jet(&mut self, c: &NumCoeff, x: usize, deg: usize, conj: bool) -> Jet {
        let phi = self.angles[x];
        let z = z_power_series(phi, 1, deg);
        let mut out = Jet::zero(deg);
        for (mono, num, den) in &c.parts {
            let horner = |coeffs: &[Complex64]| {
                let mut acc = vec![ZERO; deg + 1];
                for c in coeffs.iter().rev() {
                    acc = series_mul(&acc, &z);
                    acc[0] += c;
                }
                acc
            };
            let f = series_mul(&horner(num), &series_recip(&horner(den)));
            let pv = self.pt.a.powi(mono.a as i32) * self.pt.b.powi(mono.b as i32) * self.pt.w2.powi(mono.w as i32);
            let rs: Vec<Complex64> = self.r_series(mono.m)[..=deg].iter().map(|v| v * pv).collect();
            out.add_assign(&Jet::outer(&rs, &f, deg));
        }
        if conj {
            out.conj()
        } else {
            out
        }
    }

    fn apply(&mut self, t: &NumTree, input: &[Jet], deg: usize) -> Vec<Jet> {
        match t {
            NumTree::Leaf(terms) => {
                let mut out = vec![Jet::zero(deg); self.len()];
                for term in terms {
                    for (x, slot) in out.iter_mut().enumerate() {
                        let (src, flip) = self.source(x, term.i, term.e);
                        let mut g = if flip { input[src].flip_phi() } else { input[src].clone() };
                        for _ in 0..term.p {
                            g = g.d_r();
                        }
                        for _ in 0..term.q {
                            g = g.d_phi();
                        }
                        let g = g.truncate(deg);
                        let c = self.coeff_jet(&term.coeff, x, deg, term.conj);
                        slot.add_assign(&c.mul(&g));
                    }
                }
                out
            }
            NumTree::Sum(xs) => {
                let mut out = vec![Jet::zero(deg); self.len()];
                for x in xs {
                    for (o, v) in out.iter_mut().zip(self.apply(x, input, deg)) {
                        o.add_assign(&v);
                    }
                }
                out
            }
            NumTree::Prod(xs) => {
                let mut cur = input.to_vec();
                let mut left: usize = xs.iter().map(NumTree::order).sum();
                for x in xs.iter().rev() {
                    left -= x.order();
                    cur = self.apply(x, &cur, deg + left);
                }
                cur
            }
            NumTree::Neg(x) => self.apply(x, input, deg).iter().map(Jet::neg).collect(),
        }
    }
}

/// Compiled numeric form of an operator tree.
pub struct NumericOp {
    ctx: Arc<FieldCtx>,
    tree: NumTree,
}

impl NumericOp {
    pub fn new(t: &OpTree, ctx: &Arc<FieldCtx>) -> NumericOp {
        NumericOp { ctx: ctx.clone(), tree: lower(t, ctx, false) }
    }

    /// `(op f)(r, phi)` at the sample point.
    pub fn apply_at(&self, f: &TestFunc, pt: &SamplePoint) -> Complex64 {
        let deg = self.tree.order();
        let mut orbit = Orbit::new(self.ctx.k(), pt, deg);
        let input: Vec<Jet> = orbit.angles.iter().map(|phi| f.jet(pt.r, *phi, deg)).collect();
        orbit.apply(&self.tree, &input, 0)[0].value()
    }
}

/// `(op f)` at a point, for a single tree.
pub fn apply_at(t: &OpTree, ctx: &Arc<FieldCtx>, f: &TestFunc, pt: &SamplePoint) -> Complex64 {
    NumericOp::new(t, ctx).apply_at(f, pt)
}

/// Which test functions a comparison is valid on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    General,
    /// `D_{2k}`-invariant functions, for statements about projections.
    Invariant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub margin: f64,
    pub max_redraws: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { trials: 100, tol: 1e-9, seed: 20_100_917, margin: 0.05, max_redraws: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub deviating_trials: usize,
    pub redraws: usize,
    pub pass: bool,
}

/// Compares `lhs f` with `rhs f` pointwise for every pair over seeded random draws.
pub fn numeric_check_pairs(
    pairs: &[(OpTree, OpTree, Domain)],
    ctx: &Arc<FieldCtx>,
    cfg: &OracleConfig,
) -> NumericReport {
    assert!(cfg.trials >= 1);
    let ops: Vec<(NumericOp, NumericOp, Domain)> =
        pairs.iter().map(|(l, r, d)| (NumericOp::new(l, ctx), NumericOp::new(r, ctx), *d)).collect();
    let k = ctx.k();
    let per_trial: Vec<(f64, usize)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial as u64);
            let mut redraws = 0;
            loop {
                let pt = SamplePoint::draw(&mut rng, k, cfg.margin);
                let general = TestFunc::draw(&mut rng, k, false);
                let invariant = TestFunc::draw(&mut rng, k, true);
                let mut worst = 0.0f64;
                let mut degenerate = false;
                for (l, r, d) in &ops {
                    let f = if *d == Domain::Invariant { &invariant } else { &general };
                    let (x, y) = (l.apply_at(f, &pt), r.apply_at(f, &pt));
                    let scale = x.norm().max(y.norm());
                    if !scale.is_finite() || scale < 1e-6 {
                        degenerate = true;
                        break;
                    }
                    worst = worst.max((x - y).norm() / scale);
                }
                if !degenerate || redraws >= cfg.max_redraws {
                    return (if degenerate { f64::INFINITY } else { worst }, redraws);
                }
                redraws += 1;
            }
        })
        .collect();
    let max_deviation = per_trial.iter().map(|t| t.0).fold(0.0, f64::max);
    let deviating_trials = per_trial.iter().filter(|t| t.0.is_nan() || t.0 > cfg.tol).count();
    NumericReport {
        trials: cfg.trials,
        max_deviation,
        deviating_trials,
        redraws: per_trial.iter().map(|t| t.1).sum(),
        pass: deviating_trials == 0,
    }
}

/// Single-pair form of [`numeric_check_pairs`] on general test functions.
pub fn numeric_check(lhs: &OpTree, rhs: &OpTree, ctx: &Arc<FieldCtx>, cfg: &OracleConfig) -> NumericReport {
    numeric_check_pairs(&[(lhs.clone(), rhs.clone(), Domain::General)], ctx, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{Builders, HkForm};
    use crate::coeffring::{trig, TrigKind, ZRat};

    fn ctx(k: usize) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(k).unwrap())
    }

    fn point(k: usize) -> SamplePoint {
        SamplePoint { r: 1.1, phi: 0.3 / k as f64, a: 1.3, b: 2.2, w2: 0.7 }
    }

    #[test]
    fn jet_calculus_matches_closed_forms() {
        let f = TestFunc { s: 2, c: -0.5, p: vec![(3, (0.4, -0.2)), (-1, (1.0, 0.5))] };
        let (r, phi) = (1.3, 0.4);
        let j = f.jet(r, phi, 3);
        assert!((j.value() - f.value(r, phi)).norm() < 1e-13);
        let h = 1e-4;
        let dr = (f.value(r + h, phi) - f.value(r - h, phi)) / (2.0 * h);
        let dphi = (f.value(r, phi + h) - f.value(r, phi - h)) / (2.0 * h);
        assert!((j.coeff(1, 0) - dr).norm() < 1e-6);
        assert!((j.coeff(0, 1) - dphi).norm() < 1e-6);
        let w = j.mul(&j.flip_phi());
        assert!((w.value() - f.value(r, phi).powi(2)).norm() < 1e-12);
    }

    #[test]
    fn dphi_on_monomial() {
        let c = ctx(2);
        let f = TestFunc { s: 0, c: -0.5, p: vec![(3, (1.0, 0.0))] };
        let pt = point(2);
        let got = apply_at(&OpTree::leaf(&OpExpr::dphi(&c)), &c, &f, &pt);
        let want = Complex64::new(0.0, 3.0) * f.value(pt.r, pt.phi);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn full_rotation_is_identity() {
        for k in 1..=5 {
            let c = ctx(k);
            let r = OpTree::leaf(&OpExpr::rot(&c, 1));
            let f = TestFunc { s: 1, c: -0.25, p: vec![(1, (0.3, 0.1)), (-2, (0.2, 0.9))] };
            let pt = point(k);
            let got = apply_at(&r.pow(2 * k), &c, &f, &pt);
            assert!((got - f.value(pt.r, pt.phi)).norm() < 1e-12);
        }
    }

    #[test]
    fn dphi_k3_against_direct_trig() {
        let c = ctx(3);
        let d = OpTree::leaf(&Builders::new(&c).dphi());
        let f = TestFunc { s: 1, c: -0.5, p: vec![(2, (0.7, -0.3)), (-1, (0.1, 0.8)), (0, (0.5, 0.0))] };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let pt = SamplePoint::draw(&mut rng, 3, 0.05);
            let (r, phi) = (pt.r, pt.phi);
            let third = PI / 3.0;
            // (R^m I f)(phi) = f(-(phi + m pi/3))
            let ri = |m: f64| f.value(r, -(phi + m * third));
            let dphi_f: Complex64 =
                f.p.iter()
                    .map(|(n, (re, im))| {
                        Complex64::new(0.0, *n as f64)
                            * Complex64::new(*re, *im)
                            * Complex64::from_polar(1.0, *n as f64 * phi)
                    })
                    .sum::<Complex64>()
                    * r.powi(f.s)
                    * (f.c * r * r).exp();
            let tan = |x: f64| x.tan();
            let cot = |x: f64| 1.0 / x.tan();
            let want = dphi_f
                + pt.a * (tan(phi) * ri(3.0) + tan(phi + third) * ri(5.0) + tan(phi + 2.0 * third) * ri(1.0))
                - pt.b * (cot(phi) * ri(0.0) + cot(phi + third) * ri(2.0) + cot(phi + 2.0 * third) * ri(4.0));
            let got = apply_at(&d, &c, &f, &pt);
            assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn identical_sides_have_zero_deviation() {
        let c = ctx(3);
        let x = OpTree::leaf(&Builders::new(&c).dr());
        let rep = numeric_check(&x, &x, &c, &OracleConfig { trials: 10, ..OracleConfig::default() });
        assert!(rep.pass);
        assert_eq!(rep.max_deviation, 0.0);
    }

    #[test]
    fn sec2_sum_k5() {
        let c = ctx(5);
        let lhs =
            OpTree::sum((0..5).map(|i| OpTree::leaf(&OpExpr::zrat(&c, trig(TrigKind::Sec2Shift, i, &c).unwrap()))));
        let rhs = OpTree::leaf(&OpExpr::zrat(&c, trig(TrigKind::Sec2K, 0, &c).unwrap().scale_int(25, &c)));
        let rep = numeric_check(&lhs, &rhs, &c, &OracleConfig::default());
        assert!(rep.pass, "{rep:?}");
        let wrong = OpTree::leaf(&OpExpr::zrat(&c, ZRat::from_int(25, &c)));
        assert!(!numeric_check(&lhs, &wrong, &c, &OracleConfig { trials: 5, ..OracleConfig::default() }).pass);
    }

    #[test]
    fn two_forms_k4() {
        let c = ctx(4);
        let b = Builders::new(&c);
        let (l, r) = (OpTree::leaf(&b.hk_ext(HkForm::ViaDphi)), OpTree::leaf(&b.hk_ext(HkForm::ViaDr)));
        let rep = numeric_check(&l, &r, &c, &OracleConfig { trials: 50, tol: 1e-8, ..OracleConfig::default() });
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn adjoint_lowering_matches_symbolic_adjoint() {
        let c = ctx(3);
        let d = Builders::new(&c).dr();
        let lhs = OpTree::leaf(&d).adjoint();
        let rhs = OpTree::leaf(&d.adjoint());
        assert!(numeric_check(&lhs, &rhs, &c, &OracleConfig { trials: 20, ..OracleConfig::default() }).pass);
    }

    #[test]
    fn seeded_determinism() {
        let c = ctx(2);
        let b = Builders::new(&c);
        let l = OpTree::prod([OpTree::leaf(&b.dphi()), OpTree::leaf(&b.dphi())]);
        let r = OpTree::leaf(&b.dphi_squared_rhs());
        let cfg = OracleConfig { trials: 20, ..OracleConfig::default() };
        assert_eq!(numeric_check(&l, &r, &c, &cfg), numeric_check(&l, &r, &c, &cfg));
    }
}
