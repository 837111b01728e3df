//! Registry of identity checks. Every check builds one or more witness pairs
//! `(lhs, rhs)` as operator trees; the exact verdict normal-orders both sides,
//! the oracle shadow applies them numerically.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::builders::{Builders, HkForm, Mutation};
use crate::coeffring::{TrigKind, ZRat};
use crate::cyclofield::{FieldCtx, DEFAULT_MAX_K};
use crate::error::{Error, Result};
use crate::exprparse::{parse_expr, pretty_first_term};
use crate::opalgebra::OpExpr;
use crate::optree::OpTree;
use crate::oracle::{numeric_check_pairs, Domain, OracleConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub k: usize,
    pub status: Status,
    pub residual_term_count: usize,
    pub residual_sample: String,
    pub elapsed_ms: u64,
}

/// Numeric counterpart of a [`CheckReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub check_id: String,
    pub k: usize,
    pub status: Status,
    pub trials: usize,
    pub max_deviation: f64,
    pub deviating_trials: usize,
    pub redraws: usize,
}

/// Which `k` a check applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Any,
    Odd,
    Even,
    Only(usize),
}

impl Parity {
    pub fn admits(self, k: usize) -> bool {
        match self {
            Parity::Any => true,
            Parity::Odd => k % 2 == 1,
            Parity::Even => k % 2 == 0,
            Parity::Only(j) => j == k,
        }
    }
}

/// `lhs = rhs`, on all functions or, when `projected`, on invariant ones after
/// the identity projection of `lhs`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub lhs: OpTree,
    pub rhs: OpTree,
    pub projected: bool,
}

impl Witness {
    fn new(lhs: OpTree, rhs: OpTree) -> Witness {
        Witness { lhs, rhs, projected: false }
    }

    fn projected(lhs: OpTree, rhs: OpTree) -> Witness {
        Witness { lhs, rhs, projected: true }
    }

    /// Exact `lhs - rhs`.
    pub fn residual(&self, ctx: &Arc<FieldCtx>) -> Result<OpExpr> {
        let mut l = self.lhs.eval(ctx)?;
        if self.projected {
            l = l.project_identity();
        }
        l.sub(&self.rhs.eval(ctx)?)
    }

    fn numeric_pair(&self) -> (OpTree, OpTree, Domain) {
        let d = if self.projected { Domain::Invariant } else { Domain::General };
        (self.lhs.clone(), self.rhs.clone(), d)
    }
}

/// One report row: a check instance, possibly indexed by `j`.
#[derive(Clone, Debug)]
pub struct Row {
    pub j: Option<usize>,
    pub witnesses: Vec<Witness>,
}

impl Row {
    fn single(witnesses: Vec<Witness>) -> Vec<Row> {
        vec![Row { j: None, witnesses }]
    }
}

type BuildFn = fn(&Builders) -> Result<Vec<Row>>;

pub struct CheckDef {
    pub id: &'static str,
    pub parity: Parity,
    /// Mutation that must turn this check into a failure.
    pub target: Mutation,
    build: BuildFn,
}

impl CheckDef {
    /// Witness rows for `b`, or `None` when the parity excludes `b.k()`.
    pub fn rows(&self, b: &Builders) -> Result<Option<Vec<Row>>> {
        if !self.parity.admits(b.k()) {
            return Ok(None);
        }
        (self.build)(b).map(Some)
    }

    /// A `k` at which the target mutation is expected to bite.
    pub fn probe_k(&self) -> usize {
        match self.parity {
            Parity::Only(k) => k,
            Parity::Even => 4,
            Parity::Odd | Parity::Any => 3,
        }
    }
}

pub static REGISTRY: [CheckDef; 21] = [
    CheckDef { id: "group_relations", parity: Parity::Any, target: Mutation::RScale, build: group_relations },
    CheckDef { id: "dr_props", parity: Parity::Any, target: Mutation::DropSummand, build: dr_props },
    CheckDef { id: "dphi_props", parity: Parity::Any, target: Mutation::AShift, build: dphi_props },
    CheckDef {
        id: "dr_dphi_commutator",
        parity: Parity::Any,
        target: Mutation::DropSummand,
        build: dr_dphi_commutator,
    },
    CheckDef { id: "trig_sec2", parity: Parity::Odd, target: Mutation::TrigShift, build: trig_sec2 },
    CheckDef { id: "trig_csc2", parity: Parity::Even, target: Mutation::TrigShift, build: trig_csc2 },
    CheckDef { id: "trig_tan_tan", parity: Parity::Odd, target: Mutation::TrigShift, build: trig_tan_tan },
    CheckDef { id: "trig_cot_cot", parity: Parity::Odd, target: Mutation::TrigShift, build: trig_cot_cot },
    CheckDef { id: "trig_mixed", parity: Parity::Odd, target: Mutation::TrigShift, build: trig_mixed },
    CheckDef { id: "trig_half_angle", parity: Parity::Even, target: Mutation::TrigShift, build: trig_half_angle },
    CheckDef { id: "trig_cot_sum", parity: Parity::Even, target: Mutation::TrigShift, build: trig_cot_sum },
    CheckDef { id: "dphi_squared", parity: Parity::Any, target: Mutation::BShift, build: dphi_squared },
    CheckDef { id: "s_props", parity: Parity::Even, target: Mutation::SDrop, build: s_props },
    CheckDef { id: "hk_two_forms", parity: Parity::Any, target: Mutation::Counterterm, build: hk_two_forms },
    CheckDef { id: "hk_invariance", parity: Parity::Any, target: Mutation::BShift, build: hk_invariance },
    CheckDef { id: "hk_projection", parity: Parity::Any, target: Mutation::HkPotential, build: hk_projection },
    CheckDef { id: "hk_selfadjoint", parity: Parity::Any, target: Mutation::OscPhase, build: hk_selfadjoint },
    CheckDef { id: "integral_commutes", parity: Parity::Any, target: Mutation::BShift, build: integral_commutes },
    CheckDef {
        id: "integral_projection",
        parity: Parity::Any,
        target: Mutation::XkPotential,
        build: integral_projection,
    },
    CheckDef { id: "k3_specialization", parity: Parity::Only(3), target: Mutation::AShift, build: k3_specialization },
    CheckDef { id: "k2_specialization", parity: Parity::Only(2), target: Mutation::AShift, build: k2_specialization },
];

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|c| c.id)
}

pub fn find_check(id: &str) -> Result<&'static CheckDef> {
    REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

// witness construction helpers

fn leaf(x: OpExpr) -> OpTree {
    OpTree::Leaf(x)
}

fn zleaf(b: &Builders, f: ZRat) -> OpTree {
    leaf(b.coeff(f))
}

fn trig(b: &Builders, kind: TrigKind, j: i64) -> Result<ZRat> {
    b.trig(kind, j)
}

fn int(b: &Builders, v: i64) -> OpTree {
    leaf(b.int(v))
}

fn prod2(x: &OpExpr, y: &OpExpr) -> OpTree {
    OpTree::prod([leaf(x.clone()), leaf(y.clone())])
}

fn display(b: &Builders, text: &str) -> Result<OpTree> {
    parse_expr(text, b.ctx()).map(leaf)
}

fn dphi_squared_tree(b: &Builders) -> OpTree {
    let d = leaf(b.dphi());
    OpTree::prod([d.clone(), d])
}

fn group_relations(b: &Builders) -> Result<Vec<Row>> {
    let k = b.k() as i64;
    let (r, i) = (b.rot(), b.refl());
    let one = int(b, 1);
    let r_last = leaf(b.g(2 * k - 1, false));
    Ok(Row::single(vec![
        Witness::new(leaf(r.clone()).pow(2 * k as usize), one.clone()),
        Witness::new(prod2(&i, &i), one),
        Witness::new(prod2(&i, &r), OpTree::prod([r_last.clone(), leaf(i.clone())])),
        Witness::new(leaf(r).adjoint(), r_last),
        Witness::new(leaf(i.clone()).adjoint(), leaf(i)),
    ]))
}

fn dr_adjoint_rhs_tree(b: &Builders) -> OpTree {
    OpTree::sum([leaf(b.dr()), OpTree::prod([leaf(b.r_pow(-1)), leaf(b.dr_measure_term())])]).neg()
}

fn dr_props(b: &Builders) -> Result<Vec<Row>> {
    let dr = b.dr();
    Ok(Row::single(vec![
        Witness::new(leaf(dr.clone()).adjoint(), dr_adjoint_rhs_tree(b)),
        Witness::new(prod2(&b.rot(), &dr), prod2(&dr, &b.rot())),
        Witness::new(prod2(&b.refl(), &dr), prod2(&dr, &b.refl())),
    ]))
}

fn dphi_props(b: &Builders) -> Result<Vec<Row>> {
    let d = b.dphi();
    Ok(Row::single(vec![
        Witness::new(leaf(d.clone()).adjoint(), leaf(d.clone()).neg()),
        Witness::new(prod2(&b.rot(), &d), prod2(&d, &b.rot())),
        Witness::new(prod2(&b.refl(), &d), prod2(&d, &b.refl()).neg()),
    ]))
}

fn dr_dphi_commutator(b: &Builders) -> Result<Vec<Row>> {
    let (dr, d) = (b.dr(), b.dphi());
    let lhs = prod2(&dr, &d).minus(prod2(&d, &dr));
    let rhs = OpTree::prod([int(b, -2), leaf(b.r_pow(-1)), leaf(b.exchange()), leaf(d.clone())]);
    let mut w = vec![Witness::new(lhs.clone(), rhs)];
    if b.k() == 3 {
        w.push(Witness::new(lhs, display(b, K3_COMMUTATOR)?));
    }
    Ok(Row::single(w))
}

/// `sum_{i<k} f(shift_i)` with the builder's (possibly mutated) summand shifts.
fn shifted_sum(b: &Builders, f: impl Fn(i64) -> Result<ZRat>) -> Result<ZRat> {
    let ctx = b.ctx();
    let parts = (0..b.k() as i64).map(|i| f(b.summand(i))).collect::<Result<Vec<_>>>()?;
    Ok(ZRat::sum(parts.iter(), ctx))
}

fn k_pow_trig(b: &Builders, kind: TrigKind, p: u32) -> Result<ZRat> {
    let k = b.k() as i64;
    Ok(trig(b, kind, 0)?.scale_int(k.pow(p), b.ctx()))
}

fn trig_sec2(b: &Builders) -> Result<Vec<Row>> {
    let sec2 = shifted_sum(b, |t| trig(b, TrigKind::Sec2Shift, t))?;
    let csc2 = shifted_sum(b, |t| trig(b, TrigKind::Csc2Shift, t))?;
    Ok(Row::single(vec![
        Witness::new(zleaf(b, sec2), zleaf(b, k_pow_trig(b, TrigKind::Sec2K, 2)?)),
        Witness::new(zleaf(b, csc2), zleaf(b, k_pow_trig(b, TrigKind::Csc2K, 2)?)),
    ]))
}

fn trig_csc2(b: &Builders) -> Result<Vec<Row>> {
    let csc2 = shifted_sum(b, |t| trig(b, TrigKind::Csc2Shift, t))?;
    Ok(Row::single(vec![Witness::new(zleaf(b, csc2), zleaf(b, k_pow_trig(b, TrigKind::Csc2K, 2)?))]))
}

/// One row per `j = 1..k-1` of `sum_i f(i + j) g(i + 2j) = value`.
fn pair_family(b: &Builders, terms: &[(TrigKind, TrigKind)], value: i64) -> Result<Vec<Row>> {
    let ctx = b.ctx();
    let k = b.k() as i64;
    (1..k)
        .map(|j| {
            let lhs = shifted_sum(b, |t| {
                let mut acc = ZRat::zero();
                for &(f, g) in terms {
                    acc = acc.add(&trig(b, f, t + j)?.mul(&trig(b, g, t + 2 * j)?, ctx), ctx);
                }
                Ok(acc)
            })?;
            Ok(Row { j: Some(j as usize), witnesses: vec![Witness::new(zleaf(b, lhs), int(b, value * k))] })
        })
        .collect()
}

fn trig_tan_tan(b: &Builders) -> Result<Vec<Row>> {
    pair_family(b, &[(TrigKind::TanShift, TrigKind::TanShift)], -1)
}

fn trig_cot_cot(b: &Builders) -> Result<Vec<Row>> {
    pair_family(b, &[(TrigKind::CotShift, TrigKind::CotShift)], -1)
}

fn trig_mixed(b: &Builders) -> Result<Vec<Row>> {
    pair_family(b, &[(TrigKind::TanShift, TrigKind::CotShift), (TrigKind::CotShift, TrigKind::TanShift)], 2)
}

fn trig_half_angle(b: &Builders) -> Result<Vec<Row>> {
    let ctx = b.ctx();
    let first = if b.mutation() == Some(Mutation::TrigShift) { TrigKind::HalfSumInv2 } else { TrigKind::HalfDiffInv2 };
    let lhs = trig(b, first, 0)?.add(&trig(b, TrigKind::HalfSumInv2, 0)?, ctx);
    let rhs = trig(b, TrigKind::Sec2K, 0)?.scale_int(2, ctx);
    Ok(Row::single(vec![Witness::new(zleaf(b, lhs), zleaf(b, rhs))]))
}

fn trig_cot_sum(b: &Builders) -> Result<Vec<Row>> {
    let ctx = b.ctx();
    let lhs = shifted_sum(b, |t| trig(b, TrigKind::CotShift, t))?;
    let cot_k = trig(b, TrigKind::TanK, 0)?.inv(ctx)?;
    Ok(Row::single(vec![Witness::new(zleaf(b, lhs), zleaf(b, cot_k.scale_int(b.k() as i64, ctx)))]))
}

fn dphi_squared(b: &Builders) -> Result<Vec<Row>> {
    let mut w = vec![Witness::new(dphi_squared_tree(b), leaf(b.dphi_squared_rhs()))];
    if b.k() == 3 {
        w.push(Witness::new(dphi_squared_tree(b), display(b, K3_DPHI_SQUARED)?));
    }
    Ok(Row::single(w))
}

fn s_props(b: &Builders) -> Result<Vec<Row>> {
    let s = b.s()?;
    let half_k = b.k() as i64 / 2;
    let (r, i) = (b.rot(), b.refl());
    Ok(Row::single(vec![
        Witness::new(prod2(&r, &s), prod2(&s, &r)),
        Witness::new(OpTree::prod([leaf(r.clone()).pow(4), leaf(s.clone())]), leaf(s.clone())),
        Witness::new(prod2(&s, &s), leaf(s.scale_int(half_k))),
        Witness::new(prod2(&i, &s), prod2(&s, &i)),
        Witness::new(leaf(s.clone()).adjoint(), leaf(s)),
    ]))
}

fn hk_two_forms(b: &Builders) -> Result<Vec<Row>> {
    Ok(Row::single(vec![Witness::new(b.hk_ext_tree(HkForm::ViaDphi), b.hk_ext_tree(HkForm::ViaDr))]))
}

fn hk_invariance(b: &Builders) -> Result<Vec<Row>> {
    let h = b.hk_ext_tree(HkForm::ViaDr);
    let mut w = Vec::new();
    for g in [b.rot(), b.refl()] {
        let g = leaf(g);
        w.push(Witness::new(OpTree::prod([g.clone(), h.clone()]), OpTree::prod([h.clone(), g])));
    }
    Ok(Row::single(w))
}

fn hk_projection(b: &Builders) -> Result<Vec<Row>> {
    Ok(Row::single(vec![Witness::projected(b.hk_ext_tree(HkForm::ViaDr), leaf(b.hk()))]))
}

fn hk_selfadjoint(b: &Builders) -> Result<Vec<Row>> {
    let h = b.hk_ext_tree(HkForm::ViaDr);
    Ok(Row::single(vec![Witness::new(h.clone().adjoint(), h)]))
}

fn integral_commutes(b: &Builders) -> Result<Vec<Row>> {
    let h = b.hk_ext_tree(HkForm::ViaDphi);
    let d2 = dphi_squared_tree(b);
    let (hk, xk) = (leaf(b.hk()), leaf(b.xk()));
    Ok(Row::single(vec![
        Witness::new(OpTree::prod([h.clone(), d2.clone()]), OpTree::prod([d2, h])),
        Witness::new(OpTree::prod([hk.clone(), xk.clone()]), OpTree::prod([xk, hk])),
    ]))
}

fn integral_projection(b: &Builders) -> Result<Vec<Row>> {
    let k = b.k() as i64;
    let ab = &b.a() + &b.b();
    let shift = (&ab * &ab).scale_int(k * k);
    let rhs = leaf(b.xk()).minus(leaf(shift));
    Ok(Row::single(vec![Witness::projected(dphi_squared_tree(b).neg(), rhs)]))
}

const K3_DR: &str = "dr - r^-1*(a*R + b)*(1 + R^2 + R^4)*I";
const K3_DPHI: &str = "dphi + a*(tan(phi)*R^3 + tan(phi + pi/k)*R^5 + tan(phi + 2*pi/k)*R)*I \
    - b*(cot(phi) + cot(phi + pi/k)*R^2 + cot(phi + 2*pi/k)*R^4)*I";
const K3_COMMUTATOR: &str = "-2*r^-1*(a*R + b)*(1 + R^2 + R^4)*I*Dphi";
const K3_DPHI_SQUARED: &str = "dphi^2 \
    - (sec2(phi)*a*(a - R^3*I) + sec2(phi + pi/k)*a*(a - R^5*I) + sec2(phi + 2*pi/k)*a*(a - R*I)) \
    - (csc2(phi)*b*(b - I) + csc2(phi + pi/k)*b*(b - R^2*I) + csc2(phi + 2*pi/k)*b*(b - R^4*I)) \
    + 3*(a^2 + b^2 + 2*a*b*R)*(1 + R^2 + R^4)";
const K3_HK_FIRST: &str = "-dr^2 - r^-1*dr - r^-2*(Dphi^2 - 3*(a^2 + b^2 + 2*a*b*R)*(1 + R^2 + R^4)) + w2*r^2";
const K3_HK_SECOND: &str = "-Dr^2 - r^-1*(1 + 2*(a*R + b)*(1 + R^2 + R^4)*I)*Dr - r^-2*Dphi^2 + w2*r^2";

const K2_DR: &str = "dr - r^-1*(a*R + b)*(1 + R^2)*I";
const K2_DPHI: &str = "dphi + a*((tank(phi) + seck(phi))*R^2 + tank(phi) - seck(phi))*R*I \
    + b*(tan(phi)*R^2 - cot(phi))*I";
const K2_DPHI_SQUARED: &str = "dphi^2 - 2*(hdiff2(phi)*a*(a - R^3*I) + hsum2(phi)*a*(a - R*I)) \
    - (sec2(phi)*b*(b - R^2*I) + csc2(phi)*b*(b - I)) + 2*(a^2 + b^2 + 2*a*b*R)*(1 + R^2)";
const K2_HK_FIRST: &str = "-dr^2 - r^-1*dr - r^-2*(Dphi^2 - 2*(a^2 + b^2 + 2*a*b*R)*(1 + R^2)) + w2*r^2";
const K2_HK_SECOND: &str = "-Dr^2 - r^-1*(1 + 2*(a*R + b)*(1 + R^2)*I)*Dr - r^-2*Dphi^2 + w2*r^2";

/// Displayed operators for `k = 3`, in input syntax.
pub const K3_DISPLAYS: [(&str, &str); 6] = [
    ("Dr", K3_DR),
    ("Dphi", K3_DPHI),
    ("[Dr, Dphi]", K3_COMMUTATOR),
    ("Dphi^2", K3_DPHI_SQUARED),
    ("HkExt", K3_HK_FIRST),
    ("HkExt", K3_HK_SECOND),
];

/// Displayed operators for `k = 2`, in input syntax.
pub const K2_DISPLAYS: [(&str, &str); 5] =
    [("Dr", K2_DR), ("Dphi", K2_DPHI), ("Dphi^2", K2_DPHI_SQUARED), ("HkExt", K2_HK_FIRST), ("HkExt", K2_HK_SECOND)];

fn specialization(b: &Builders, dr: &str, dphi: &str, hk: [&str; 2]) -> Result<Vec<Witness>> {
    let h = b.hk_ext_tree(HkForm::ViaDphi);
    Ok(vec![
        Witness::new(leaf(b.dr()), display(b, dr)?),
        Witness::new(leaf(b.dphi()), display(b, dphi)?),
        Witness::new(h.clone(), display(b, hk[0])?),
        Witness::new(h, display(b, hk[1])?),
    ])
}

fn k3_specialization(b: &Builders) -> Result<Vec<Row>> {
    specialization(b, K3_DR, K3_DPHI, [K3_HK_FIRST, K3_HK_SECOND]).map(Row::single)
}

fn k2_specialization(b: &Builders) -> Result<Vec<Row>> {
    let mut w = specialization(b, K2_DR, K2_DPHI, [K2_HK_FIRST, K2_HK_SECOND])?;
    w.push(Witness::new(dphi_squared_tree(b), display(b, K2_DPHI_SQUARED)?));
    Ok(Row::single(w))
}

/// Selects checks by id prefix, parity class, or everything.
#[derive(Clone, Debug)]
pub struct Filter {
    tokens: Vec<String>,
}

impl Filter {
    pub fn all() -> Filter {
        Filter { tokens: vec!["all".into()] }
    }

    /// Comma-separated tokens: `all`, `odd`, `even`, or check id prefixes.
    pub fn parse(text: &str) -> Result<Filter> {
        let tokens: Vec<String> = text.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
        if tokens.is_empty() {
            return Ok(Filter::all());
        }
        for t in &tokens {
            let known =
                matches!(t.as_str(), "all" | "odd" | "even") || check_ids().any(|id| id.starts_with(t.as_str()));
            if !known {
                return Err(Error::UnknownCheck(t.clone()));
            }
        }
        Ok(Filter { tokens })
    }

    pub fn selects(&self, c: &CheckDef) -> bool {
        self.tokens.iter().any(|t| match t.as_str() {
            "all" => true,
            "odd" => c.parity == Parity::Odd,
            "even" => c.parity == Parity::Even,
            p => c.id.starts_with(p),
        })
    }

    pub fn checks(&self) -> Vec<&'static CheckDef> {
        REGISTRY.iter().filter(|c| self.selects(c)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub mutation: Option<Mutation>,
    pub max_k: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { mutation: None, max_k: DEFAULT_MAX_K }
    }
}

fn row_id(base: &str, j: Option<usize>) -> String {
    match j {
        Some(j) => format!("{base}[j={j}]"),
        None => base.to_string(),
    }
}

fn skipped(id: &str, k: usize) -> CheckReport {
    CheckReport {
        check_id: id.to_string(),
        k,
        status: Status::Skipped,
        residual_term_count: 0,
        residual_sample: String::new(),
        elapsed_ms: 0,
    }
}

fn context(k: usize, opts: &SuiteOptions) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::with_max(k, opts.max_k)?))
}

fn run_def(def: &CheckDef, ctx: &Arc<FieldCtx>, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let k = ctx.k();
    let b = Builders::with_mutation(ctx, opts.mutation);
    let start = Instant::now();
    let rows = match def.rows(&b)? {
        None => return Ok(vec![skipped(def.id, k)]),
        Some(rows) if rows.is_empty() => return Ok(vec![skipped(def.id, k)]),
        Some(rows) => rows,
    };
    let mut out = Vec::new();
    for row in rows {
        let row_start = Instant::now();
        let mut count = 0;
        let mut sample = String::new();
        for w in &row.witnesses {
            let res = w.residual(ctx)?;
            if sample.is_empty() && !res.is_zero() {
                sample = pretty_first_term(&res);
            }
            count += res.entries().count();
        }
        out.push(CheckReport {
            check_id: row_id(def.id, row.j),
            k,
            status: if count == 0 { Status::Pass } else { Status::Fail },
            residual_term_count: count,
            residual_sample: sample,
            elapsed_ms: row_start.elapsed().as_millis() as u64,
        });
    }
    if out.len() == 1 {
        out[0].elapsed_ms = start.elapsed().as_millis() as u64;
    }
    Ok(out)
}

/// Runs one check at one `k`; families indexed by `j` yield one report per `j`.
pub fn check(id: &str, k: usize) -> Result<Vec<CheckReport>> {
    check_with(id, k, &SuiteOptions::default())
}

pub fn check_with(id: &str, k: usize, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let def = find_check(id)?;
    run_def(def, &context(k, opts)?, opts)
}

fn sort_key(id: &str) -> (String, usize) {
    match id.split_once("[j=") {
        Some((base, rest)) => (base.to_string(), rest.trim_end_matches(']').parse().unwrap_or(0)),
        None => (id.to_string(), 0),
    }
}

fn sort_reports<T>(v: &mut [T], key: impl Fn(&T) -> (usize, &str)) {
    v.sort_by(|x, y| {
        let (kx, ix) = key(x);
        let (ky, iy) = key(y);
        (kx, sort_key(ix)).cmp(&(ky, sort_key(iy)))
    });
}

fn tasks(k_list: &[usize], filter: &Filter, opts: &SuiteOptions) -> Result<Vec<(Arc<FieldCtx>, &'static CheckDef)>> {
    let mut out = Vec::new();
    for &k in k_list {
        let ctx = context(k, opts)?;
        for def in filter.checks() {
            out.push((ctx.clone(), def));
        }
    }
    Ok(out)
}

pub fn run_suite(k_list: &[usize], filter: &Filter) -> Result<Vec<CheckReport>> {
    run_suite_with(k_list, filter, &SuiteOptions::default())
}

/// Runs every selected check at every `k` in parallel; reports ordered by `k`, then id.
pub fn run_suite_with(k_list: &[usize], filter: &Filter, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let tasks = tasks(k_list, filter, opts)?;
    let parts: Vec<Vec<CheckReport>> =
        tasks.par_iter().map(|(ctx, def)| run_def(def, ctx, opts)).collect::<Result<_>>()?;
    let mut out: Vec<CheckReport> = parts.into_iter().flatten().collect();
    sort_reports(&mut out, |r| (r.k, r.check_id.as_str()));
    Ok(out)
}

fn oracle_def(
    def: &CheckDef,
    ctx: &Arc<FieldCtx>,
    opts: &SuiteOptions,
    cfg: &OracleConfig,
) -> Result<Vec<OracleReport>> {
    let k = ctx.k();
    let b = Builders::with_mutation(ctx, opts.mutation);
    let rows = def.rows(&b)?.unwrap_or_default();
    if rows.is_empty() {
        return Ok(vec![OracleReport {
            check_id: def.id.to_string(),
            k,
            status: Status::Skipped,
            trials: 0,
            max_deviation: 0.0,
            deviating_trials: 0,
            redraws: 0,
        }]);
    }
    Ok(rows
        .iter()
        .map(|row| {
            let pairs: Vec<_> = row.witnesses.iter().map(Witness::numeric_pair).collect();
            let rep = numeric_check_pairs(&pairs, ctx, cfg);
            OracleReport {
                check_id: row_id(def.id, row.j),
                k,
                status: if rep.pass { Status::Pass } else { Status::Fail },
                trials: rep.trials,
                max_deviation: rep.max_deviation,
                deviating_trials: rep.deviating_trials,
                redraws: rep.redraws,
            }
        })
        .collect())
}

/// Numeric shadow of [`run_suite_with`]: same witnesses, evaluated pointwise.
pub fn run_oracle_suite(
    k_list: &[usize],
    filter: &Filter,
    opts: &SuiteOptions,
    cfg: &OracleConfig,
) -> Result<Vec<OracleReport>> {
    let tasks = tasks(k_list, filter, opts)?;
    let parts: Vec<Vec<OracleReport>> =
        tasks.par_iter().map(|(ctx, def)| oracle_def(def, ctx, opts, cfg)).collect::<Result<_>>()?;
    let mut out: Vec<OracleReport> = parts.into_iter().flatten().collect();
    sort_reports(&mut out, |r| (r.k, r.check_id.as_str()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_sec2_k3_passes() {
        let r = check("trig_sec2", 3).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].status, Status::Pass);
    }

    #[test]
    fn empty_j_range_is_skipped() {
        let r = check("trig_tan_tan", 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].status, Status::Skipped);
    }

    #[test]
    fn perturbed_dphi_fails() {
        assert_eq!(check("dphi_squared", 5).unwrap()[0].status, Status::Pass);
        let opts = SuiteOptions { mutation: Some(Mutation::BShift), ..SuiteOptions::default() };
        let r = check_with("dphi_squared", 5, &opts).unwrap();
        assert_eq!(r[0].status, Status::Fail);
        assert!(r[0].residual_term_count > 0);
        assert!(!r[0].residual_sample.is_empty());
    }

    #[test]
    fn unknown_ids_rejected() {
        assert!(matches!(check("nope", 3), Err(Error::UnknownCheck(_))));
        assert!(Filter::parse("trig,bogus").is_err());
    }

    #[test]
    fn odd_filter_at_even_k_all_skipped() {
        let r = run_suite(&[2], &Filter::parse("odd").unwrap()).unwrap();
        assert!(!r.is_empty());
        assert!(r.iter().all(|x| x.status == Status::Skipped));
    }

    #[test]
    fn trig_rows_at_k3() {
        let r = run_suite(&[3], &Filter::parse("trig").unwrap()).unwrap();
        let live: Vec<_> = r.iter().filter(|x| x.status != Status::Skipped).collect();
        assert_eq!(live.len(), 1 + 3 * 2);
        assert!(live.iter().all(|x| x.status == Status::Pass));
        let ids: Vec<&str> = r.iter().map(|x| x.check_id.as_str()).collect();
        assert_eq!(ids[0], "trig_cot_cot[j=1]");
    }

    #[test]
    fn j_rows_sort_numerically() {
        let r = run_suite(&[11], &Filter::parse("trig_mixed").unwrap()).unwrap();
        let js: Vec<&str> = r.iter().map(|x| x.check_id.as_str()).collect();
        assert_eq!(js[1], "trig_mixed[j=2]");
        assert_eq!(js[9], "trig_mixed[j=10]");
    }
}
