//! Constructors for the named operators, for any `k`, plus single-coefficient
//! mutations used to show that checks are not vacuous.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::coeffring::{trig, Coefficient, Mono, TrigKind, ZRat};
use crate::cyclofield::FieldCtx;
use crate::error::{Error, Result};
use crate::opalgebra::{OpExpr, OpKey};
use crate::optree::OpTree;

/// A deliberate single-coefficient perturbation of one builder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutation {
    /// `b -> b + 1` in the `i = 0` cotangent term of `D_phi`.
    BShift,
    /// `a -> a + 1` in the first tangent term of `D_phi`.
    AShift,
    /// Drops the last `R^{2i}` summand from `D_r`.
    DropSummand,
    /// `R` built as `2 R`.
    RScale,
    /// Last summand of `S` doubled.
    SDrop,
    /// First summand of every trigonometric sum shifted by `pi/k`.
    TrigShift,
    /// Counterterm factor `k -> k + 1` in the first form of the extended Hamiltonian.
    Counterterm,
    /// `a(a-1) -> a^2` in the potential of `H_k`.
    HkPotential,
    /// `b(b-1) -> b^2` in the potential of `X_k`.
    XkPotential,
    /// Oscillator term `w2 r^2 -> i w2 r^2` in the extended Hamiltonian.
    OscPhase,
}

impl Mutation {
    pub const ALL: [Mutation; 10] = [
        Mutation::BShift,
        Mutation::AShift,
        Mutation::DropSummand,
        Mutation::RScale,
        Mutation::SDrop,
        Mutation::TrigShift,
        Mutation::Counterterm,
        Mutation::HkPotential,
        Mutation::XkPotential,
        Mutation::OscPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::BShift => "b-shift",
            Mutation::AShift => "a-shift",
            Mutation::DropSummand => "drop-summand",
            Mutation::RScale => "r-scale",
            Mutation::SDrop => "s-drop",
            Mutation::TrigShift => "trig-shift",
            Mutation::Counterterm => "counterterm",
            Mutation::HkPotential => "hk-potential",
            Mutation::XkPotential => "xk-potential",
            Mutation::OscPhase => "osc-phase",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mutation> {
        Mutation::ALL.iter().copied().find(|m| m.name() == s).ok_or_else(|| Error::UnknownMutation(s.to_string()))
    }
}

/// Which displayed line of the extended Hamiltonian to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkForm {
    ViaDphi,
    ViaDr,
}

/// Operator constructors for one context, optionally mutated.
#[derive(Clone, Debug)]
pub struct Builders {
    ctx: Arc<FieldCtx>,
    mutation: Option<Mutation>,
}

impl Builders {
    pub fn new(ctx: &Arc<FieldCtx>) -> Builders {
        Builders { ctx: ctx.clone(), mutation: None }
    }

    pub fn with_mutation(ctx: &Arc<FieldCtx>, mutation: Option<Mutation>) -> Builders {
        Builders { ctx: ctx.clone(), mutation }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.ctx.k()
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    pub fn int(&self, v: i64) -> OpExpr {
        OpExpr::int(&self.ctx, v)
    }

    pub fn a(&self) -> OpExpr {
        OpExpr::param_a(&self.ctx)
    }

    pub fn b(&self) -> OpExpr {
        OpExpr::param_b(&self.ctx)
    }

    pub fn r_pow(&self, m: i32) -> OpExpr {
        OpExpr::r_pow(&self.ctx, m)
    }

    /// Group element `R^i I^e` with the (possibly mutated) `R`.
    pub fn g(&self, i: i64, e: bool) -> OpExpr {
        let x = OpExpr::group_elem(&self.ctx, i, e);
        if self.is(Mutation::RScale) {
            x.scale_int(1 << i.rem_euclid(2 * self.k() as i64))
        } else {
            x
        }
    }

    /// Multiplication by a trigonometric coefficient.
    pub fn coeff(&self, f: ZRat) -> OpExpr {
        OpExpr::zrat(&self.ctx, f)
    }

    /// Shift index of the `i`-th summand of a trigonometric sum.
    pub fn summand(&self, i: i64) -> i64 {
        if i == 0 && self.is(Mutation::TrigShift) {
            1
        } else {
            i
        }
    }

    pub fn trig(&self, kind: TrigKind, j: i64) -> Result<ZRat> {
        trig(kind, j, &self.ctx)
    }

    fn trig_op(&self, kind: TrigKind, j: i64) -> OpExpr {
        self.coeff(self.trig(kind, j).expect("parity checked by caller"))
    }

    pub fn rot(&self) -> OpExpr {
        self.g(1, false)
    }

    pub fn refl(&self) -> OpExpr {
        self.g(0, true)
    }

    /// `S = sum_{i=0}^{(k-2)/2} R^{4i}`, even `k` only.
    pub fn s(&self) -> Result<OpExpr> {
        let k = self.k();
        if k % 2 != 0 {
            return Err(Error::ParityMismatch { what: "S operator", k });
        }
        let last = (k as i64 - 2) / 2;
        let parts: Vec<OpExpr> = (0..=last)
            .map(|i| {
                let x = self.g(4 * i, false);
                if i == last && self.is(Mutation::SDrop) {
                    x.scale_int(2)
                } else {
                    x
                }
            })
            .collect();
        Ok(OpExpr::sum_of(&self.ctx, &parts).expect("same ctx"))
    }

    /// `sum_{i<k} R^{2i}`.
    pub fn even_rotations(&self) -> OpExpr {
        let parts: Vec<OpExpr> = (0..self.k() as i64).map(|i| self.g(2 * i, false)).collect();
        OpExpr::sum_of(&self.ctx, &parts).expect("same ctx")
    }

    /// `(a R + b) (sum_{i<k} R^{2i}) I`, the exchange part of `D_r` up to `-1/r`.
    pub fn exchange(&self) -> OpExpr {
        let sum = self.even_rotations();
        &(&(&(&self.a() * &self.rot()) + &self.b()) * &sum) * &self.refl()
    }

    /// `D_r = dr - (1/r)(a R + b)(sum_{i<k} R^{2i}) I`.
    pub fn dr(&self) -> OpExpr {
        let ctx = &self.ctx;
        let mut n = self.k() as i64;
        if self.is(Mutation::DropSummand) {
            n -= 1;
        }
        let parts: Vec<OpExpr> = (0..n).map(|i| self.g(2 * i, false)).collect();
        let sum = OpExpr::sum_of(ctx, &parts).expect("same ctx");
        let ex = &(&(&(&self.a() * &self.rot()) + &self.b()) * &sum) * &self.refl();
        &OpExpr::dr(ctx) - &(&self.r_pow(-1) * &ex)
    }

    /// `D_phi`, odd or even branch.
    pub fn dphi(&self) -> OpExpr {
        let ctx = &self.ctx;
        let k = self.k() as i64;
        let mut parts = vec![OpExpr::dphi(ctx)];
        let b0 = if self.is(Mutation::BShift) { &self.b() + &self.int(1) } else { self.b() };
        for i in 0..k {
            let b = if i == 0 { b0.clone() } else { self.b() };
            let cot = self.trig_op(TrigKind::CotShift, i);
            parts.push(-(&(&(&b * &cot) * &self.g(2 * i, false)) * &self.refl()));
        }
        let a0 = if self.is(Mutation::AShift) { &self.a() + &self.int(1) } else { self.a() };
        if k % 2 == 1 {
            for i in 0..k {
                let a = if i == 0 { a0.clone() } else { self.a() };
                let tan = self.trig_op(TrigKind::TanShift, i);
                parts.push(&(&(&a * &tan) * &self.g(k + 2 * i, false)) * &self.refl());
            }
        } else {
            let tank = self.trig_op(TrigKind::TanK, 0);
            let seck = self.trig_op(TrigKind::SecK, 0);
            let s = self.s().expect("even k");
            let si = &s * &self.refl();
            let plus = &(&a0 * &(&tank + &seck)) * &self.g(2 * k - 1, false);
            let minus = &(&self.a() * &(&tank - &seck)) * &self.rot();
            parts.push(&(&plus + &minus) * &si);
        }
        OpExpr::sum_of(ctx, &parts).expect("same ctx")
    }

    /// `w2 r^2`.
    pub fn oscillator(&self) -> OpExpr {
        let ctx = &self.ctx;
        let x = &OpExpr::param_w2(ctx) * &self.r_pow(2);
        if self.is(Mutation::OscPhase) {
            x.scale(&ctx.imag_unit())
        } else {
            x
        }
    }

    /// `k^2 [a(a-1) sec^2 k phi + b(b-1) csc^2 k phi]`.
    fn angular_potential(&self, mutate_a: bool, mutate_b: bool) -> OpExpr {
        let one = self.int(1);
        let (a, b) = (self.a(), self.b());
        let aa = if mutate_a { &a * &a } else { &a * &(&a - &one) };
        let bb = if mutate_b { &b * &b } else { &b * &(&b - &one) };
        let sec2 = self.trig_op(TrigKind::Sec2K, 0);
        let csc2 = self.trig_op(TrigKind::Csc2K, 0);
        let k2 = (self.k() * self.k()) as i64;
        (&(&aa * &sec2) + &(&bb * &csc2)).scale_int(k2)
    }

    /// `-dr^2 - (1/r) dr`.
    pub fn radial_kinetic(&self) -> OpExpr {
        let ctx = &self.ctx;
        let dr = OpExpr::dr(ctx);
        -(&(&dr * &dr) + &(&self.r_pow(-1) * &dr))
    }

    /// `H_k` in polar form.
    pub fn hk(&self) -> OpExpr {
        let ctx = &self.ctx;
        let dphi = OpExpr::dphi(ctx);
        let pot = self.angular_potential(self.is(Mutation::HkPotential), false);
        let ang = &(&dphi * &dphi).neg() + &pot;
        &(&self.radial_kinetic() + &(&self.r_pow(-2) * &ang)) + &self.oscillator()
    }

    /// `X_k = -dphi^2 + k^2 [a(a-1) sec^2 k phi + b(b-1) csc^2 k phi]`.
    pub fn xk(&self) -> OpExpr {
        let dphi = OpExpr::dphi(&self.ctx);
        &(&dphi * &dphi).neg() + &self.angular_potential(false, self.is(Mutation::XkPotential))
    }

    /// `k (a^2 + b^2 + 2ab R) sum_{i<k} R^{2i}`.
    pub fn counterterm(&self, factor: i64) -> OpExpr {
        let (a, b) = (self.a(), self.b());
        let quad = &(&(&a * &a) + &(&b * &b)) + &(&(&a * &b) * &self.rot()).scale_int(2);
        (&quad * &self.even_rotations()).scale_int(factor)
    }

    /// `1 + 2 (a R + b)(sum R^{2i}) I`.
    pub fn dr_measure_term(&self) -> OpExpr {
        &self.int(1) + &self.exchange().scale_int(2)
    }

    /// Counterterm of the first extended form, honouring [`Mutation::Counterterm`].
    pub fn hk_counterterm(&self) -> OpExpr {
        let k = self.k() as i64;
        self.counterterm(if self.is(Mutation::Counterterm) { k + 1 } else { k })
    }

    /// `D_{2k}`-extended Hamiltonian as an unevaluated product tree.
    pub fn hk_ext_tree(&self, form: HkForm) -> OpTree {
        let leaf = OpTree::leaf;
        let dphi = leaf(&self.dphi());
        let dphi2 = OpTree::prod([dphi.clone(), dphi]);
        match form {
            HkForm::ViaDphi => {
                let inner = dphi2.minus(leaf(&self.hk_counterterm()));
                OpTree::sum([
                    leaf(&self.radial_kinetic()),
                    OpTree::prod([leaf(&self.r_pow(-2)), inner]).neg(),
                    leaf(&self.oscillator()),
                ])
            }
            HkForm::ViaDr => {
                let dr = leaf(&self.dr());
                OpTree::sum([
                    OpTree::prod([dr.clone(), dr.clone()]).neg(),
                    OpTree::prod([leaf(&self.r_pow(-1)), leaf(&self.dr_measure_term()), dr]).neg(),
                    OpTree::prod([leaf(&self.r_pow(-2)), dphi2]).neg(),
                    leaf(&self.oscillator()),
                ])
            }
        }
    }

    /// `D_{2k}`-extended Hamiltonian, either displayed form.
    pub fn hk_ext(&self, form: HkForm) -> OpExpr {
        self.hk_ext_tree(form).eval(&self.ctx).expect("same ctx")
    }

    /// Expanded right-hand side for `D_phi^2`.
    pub fn dphi_squared_rhs(&self) -> OpExpr {
        let ctx = &self.ctx;
        let k = self.k() as i64;
        let (a, b) = (self.a(), self.b());
        let dphi = OpExpr::dphi(ctx);
        let mut parts = vec![&dphi * &dphi, self.counterterm(k)];
        for i in 0..k {
            let csc2 = self.trig_op(TrigKind::Csc2Shift, i);
            let inner = &b - &self.g(2 * i, true);
            parts.push(-(&(&csc2 * &b) * &inner));
        }
        if k % 2 == 1 {
            for i in 0..k {
                let sec2 = self.trig_op(TrigKind::Sec2Shift, i);
                let inner = &a - &self.g(k + 2 * i, true);
                parts.push(-(&(&sec2 * &a) * &inner));
            }
        } else {
            let s = self.s().expect("even k");
            let diff = self.trig_op(TrigKind::HalfDiffInv2, 0);
            let sum = self.trig_op(TrigKind::HalfSumInv2, 0);
            let t1 = &(&(&diff * &s) * &a) * &(&a - &self.g(2 * k - 1, true));
            let t2 = &(&(&sum * &s) * &a) * &(&a - &self.g(1, true));
            parts.push((&t1 + &t2).scale_int(-k));
        }
        OpExpr::sum_of(ctx, &parts).expect("same ctx")
    }

    /// Right-hand side of the `D_r` adjoint relation.
    pub fn dr_adjoint_rhs(&self) -> OpExpr {
        -(&self.dr() + &(&self.r_pow(-1) * &self.dr_measure_term()))
    }

    /// Right-hand side of `[D_r, D_phi]`: `-(2/r)(a R + b)(sum R^{2i}) I D_phi`.
    pub fn dr_dphi_commutator_rhs(&self) -> OpExpr {
        (&(&self.r_pow(-1) * &self.exchange()) * &self.dphi()).scale_int(-2)
    }

    /// Looks up a named operator: `Dr`, `Dphi`, `Hk`, `HkExt`, `Xk`, `R`, `I`, `S`.
    pub fn named(&self, name: &str) -> Result<Option<OpExpr>> {
        Ok(Some(match name {
            "Dr" => self.dr(),
            "Dphi" => self.dphi(),
            "Hk" => self.hk(),
            "HkExt" => self.hk_ext(HkForm::ViaDphi),
            "Xk" => self.xk(),
            "R" => self.rot(),
            "I" => self.refl(),
            "S" => self.s()?,
            _ => return Ok(None),
        }))
    }
}

/// Names accepted by [`Builders::named`].
pub const NAMED_OPERATORS: [&str; 8] = ["Dr", "Dphi", "Hk", "HkExt", "Xk", "R", "I", "S"];

pub fn build_r(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).rot()
}

pub fn build_i(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).refl()
}

pub fn build_s(ctx: &Arc<FieldCtx>) -> Result<OpExpr> {
    Builders::new(ctx).s()
}

pub fn build_dr(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).dr()
}

pub fn build_dphi(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).dphi()
}

pub fn build_hk(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).hk()
}

pub fn build_xk(ctx: &Arc<FieldCtx>) -> OpExpr {
    Builders::new(ctx).xk()
}

pub fn build_extended_hk(ctx: &Arc<FieldCtx>, form: HkForm) -> OpExpr {
    Builders::new(ctx).hk_ext(form)
}

/// Coefficient of `r^m a^alpha b^beta` at key `(p, q, i, e)`, or zero.
pub fn coefficient_at(x: &OpExpr, key: OpKey, mono: Mono) -> ZRat {
    x.terms().get(&key).and_then(|c: &Coefficient| c.terms().get(&mono).cloned()).unwrap_or_else(ZRat::zero)
}
