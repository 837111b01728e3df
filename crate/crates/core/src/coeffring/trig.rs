//! Trigonometric coefficient functions as exact rational functions of `z`.
//!
//! With `u = e^{i theta}`: `cos = (u + 1/u)/2`, `sin = (u - 1/u)/(2i)`. Shifted
//! angles `phi + j pi / k` use `u = rho^j z`, multiples `k phi` use `u = z^k`
//! and the half angle `k phi / 2` uses `u = z^{k/2}`.

use std::fmt;
use std::str::FromStr;

use super::zpoly::ZPoly;
use super::zrat::ZRat;
use crate::cyclofield::{CycloScalar, FieldCtx};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrigKind {
    /// `tan(phi + j pi/k)`
    TanShift,
    /// `cot(phi + j pi/k)`
    CotShift,
    /// `sec^2(phi + j pi/k)`
    Sec2Shift,
    /// `csc^2(phi + j pi/k)`
    Csc2Shift,
    /// `sec(k phi)`
    SecK,
    /// `tan(k phi)`
    TanK,
    /// `csc^2(k phi)`
    Csc2K,
    /// `sec^2(k phi)`
    Sec2K,
    /// `1 / (cos(k phi/2) + sin(k phi/2))^2`, even k
    HalfSumInv2,
    /// `1 / (cos(k phi/2) - sin(k phi/2))^2`, even k
    HalfDiffInv2,
}

impl TrigKind {
    pub const ALL: [TrigKind; 10] = [
        TrigKind::TanShift,
        TrigKind::CotShift,
        TrigKind::Sec2Shift,
        TrigKind::Csc2Shift,
        TrigKind::SecK,
        TrigKind::TanK,
        TrigKind::Csc2K,
        TrigKind::Sec2K,
        TrigKind::HalfSumInv2,
        TrigKind::HalfDiffInv2,
    ];

    /// Whether the shift index is meaningful.
    pub fn is_shifted(self) -> bool {
        matches!(self, TrigKind::TanShift | TrigKind::CotShift | TrigKind::Sec2Shift | TrigKind::Csc2Shift)
    }

    /// Name in the expression language.
    pub fn name(self) -> &'static str {
        match self {
            TrigKind::TanShift => "tan",
            TrigKind::CotShift => "cot",
            TrigKind::Sec2Shift => "sec2",
            TrigKind::Csc2Shift => "csc2",
            TrigKind::SecK => "seck",
            TrigKind::TanK => "tank",
            TrigKind::Csc2K => "csc2k",
            TrigKind::Sec2K => "sec2k",
            TrigKind::HalfSumInv2 => "hsum2",
            TrigKind::HalfDiffInv2 => "hdiff2",
        }
    }

    /// Double-precision reference value at angle `phi`.
    pub fn eval_f64(self, j: i64, k: usize, phi: f64) -> f64 {
        let kf = k as f64;
        let th = phi + j as f64 * std::f64::consts::PI / kf;
        let kp = kf * phi;
        let half = kp / 2.0;
        match self {
            TrigKind::TanShift => th.tan(),
            TrigKind::CotShift => 1.0 / th.tan(),
            TrigKind::Sec2Shift => 1.0 / th.cos().powi(2),
            TrigKind::Csc2Shift => 1.0 / th.sin().powi(2),
            TrigKind::SecK => 1.0 / kp.cos(),
            TrigKind::TanK => kp.tan(),
            TrigKind::Csc2K => 1.0 / kp.sin().powi(2),
            TrigKind::Sec2K => 1.0 / kp.cos().powi(2),
            TrigKind::HalfSumInv2 => 1.0 / (half.cos() + half.sin()).powi(2),
            TrigKind::HalfDiffInv2 => 1.0 / (half.cos() - half.sin()).powi(2),
        }
    }
}

impl fmt::Display for TrigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrigKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        TrigKind::ALL.iter().copied().find(|t| t.name() == s).ok_or(())
    }
}

/// Polynomial `sum_m c_m u^m` with `u = scale * z^step`.
fn in_u(terms: &[(usize, CycloScalar)], scale: &CycloScalar, step: usize, ctx: &FieldCtx) -> ZPoly {
    let mut out = ZPoly::zero();
    for (m, c) in terms {
        let mut s = c.clone();
        for _ in 0..*m {
            s = ctx.mul(&s, scale);
        }
        out = out.add(&ZPoly::monomial(s, m * step, ctx));
    }
    out
}

/// Exact `z`-representation of a trigonometric coefficient.
pub fn trig(kind: TrigKind, j: i64, ctx: &FieldCtx) -> Result<ZRat> {
    let k = ctx.k();
    let one = ctx.one();
    let minus_one = ctx.from_int(-1);
    let i = ctx.imag_unit();
    let neg_i = i.neg();
    let (scale, step) = match kind {
        _ if kind.is_shifted() => {
            let j = j.rem_euclid(2 * k as i64);
            (ctx.root_power(j * ctx.rho_exp() as i64), 1)
        }
        TrigKind::HalfSumInv2 | TrigKind::HalfDiffInv2 => {
            if k % 2 != 0 {
                return Err(Error::ParityMismatch { what: "half-angle coefficient", k });
            }
            (one.clone(), k / 2)
        }
        _ => (one.clone(), k),
    };
    let u = |terms: &[(usize, CycloScalar)]| in_u(terms, &scale, step, ctx);
    let (num, den) = match kind {
        // tan = -i (u^2 - 1) / (u^2 + 1)
        TrigKind::TanShift | TrigKind::TanK => {
            (u(&[(2, neg_i.clone()), (0, i.clone())]), u(&[(2, one.clone()), (0, one.clone())]))
        }
        // cot = i (u^2 + 1) / (u^2 - 1)
        TrigKind::CotShift => (u(&[(2, i.clone()), (0, i.clone())]), u(&[(2, one.clone()), (0, minus_one)])),
        // sec^2 = 4 u^2 / (u^2 + 1)^2
        TrigKind::Sec2Shift | TrigKind::Sec2K => {
            let d = u(&[(2, one.clone()), (0, one.clone())]);
            (u(&[(2, ctx.from_int(4))]), d.mul(&d, ctx))
        }
        // csc^2 = -4 u^2 / (u^2 - 1)^2
        TrigKind::Csc2Shift | TrigKind::Csc2K => {
            let d = u(&[(2, one.clone()), (0, minus_one)]);
            (u(&[(2, ctx.from_int(-4))]), d.mul(&d, ctx))
        }
        // sec = 2 u / (u^2 + 1)
        TrigKind::SecK => (u(&[(1, ctx.from_int(2))]), u(&[(2, one.clone()), (0, one.clone())])),
        // cos + sin = ((1 - i) u^2 + (1 + i)) / (2u)
        TrigKind::HalfSumInv2 => {
            let d = u(&[(2, one.sub(&i)), (0, one.add(&i))]);
            (u(&[(2, ctx.from_int(4))]), d.mul(&d, ctx))
        }
        // cos - sin = ((1 + i) u^2 + (1 - i)) / (2u)
        TrigKind::HalfDiffInv2 => {
            let d = u(&[(2, one.add(&i)), (0, one.sub(&i))]);
            (u(&[(2, ctx.from_int(4))]), d.mul(&d, ctx))
        }
    };
    ZRat::new(num, den, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn at(f: &ZRat, phi: f64, ctx: &FieldCtx) -> Complex64 {
        f.eval(Complex64::from_polar(1.0, phi), ctx)
    }

    #[test]
    fn tan_k1_is_direct_substitution() {
        let ctx = FieldCtx::new(1).unwrap();
        let t = trig(TrigKind::TanShift, 0, &ctx).unwrap();
        let i = ctx.imag_unit();
        let num = ZPoly::from_coeffs(vec![i.clone(), ctx.zero(), i.neg()]);
        let den = ZPoly::from_coeffs(vec![ctx.one(), ctx.zero(), ctx.one()]);
        assert_eq!(t, ZRat::new(num, den, &ctx).unwrap());
    }

    #[test]
    fn sec2_k_numeric() {
        let ctx = FieldCtx::new(3).unwrap();
        let f = trig(TrigKind::Sec2K, 0, &ctx).unwrap();
        let v = at(&f, 0.7, &ctx);
        assert!((v.re - 1.0 / (2.1f64).cos().powi(2)).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn all_kinds_match_double_precision() {
        let angles = [0.03, 0.11, 0.2, 0.37, 0.41, 0.52, 0.66, 0.9, 1.23, 2.71];
        for k in 1..=8usize {
            let ctx = FieldCtx::new(k).unwrap();
            for kind in TrigKind::ALL {
                if matches!(kind, TrigKind::HalfSumInv2 | TrigKind::HalfDiffInv2) && k % 2 == 1 {
                    assert!(trig(kind, 0, &ctx).is_err());
                    continue;
                }
                for j in [0i64, 1, 2] {
                    let f = trig(kind, j, &ctx).unwrap();
                    for &phi in &angles {
                        let exact = kind.eval_f64(if kind.is_shifted() { j } else { 0 }, k, phi);
                        if exact.abs() > 1e6 {
                            continue;
                        }
                        let v = at(&f, phi, &ctx);
                        let tol = 1e-10 * exact.abs().max(1.0);
                        assert!(
                            (v.re - exact).abs() < tol && v.im.abs() < tol,
                            "{kind} k={k} j={j} phi={phi}: {v} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn derivatives_of_tan_and_cot() {
        for k in 1..=6 {
            let ctx = FieldCtx::new(k).unwrap();
            for j in 0..k as i64 {
                let tan = trig(TrigKind::TanShift, j, &ctx).unwrap();
                let sec2 = trig(TrigKind::Sec2Shift, j, &ctx).unwrap();
                assert!(tan.d_phi(&ctx).sub(&sec2, &ctx).is_zero());
                let cot = trig(TrigKind::CotShift, j, &ctx).unwrap();
                let csc2 = trig(TrigKind::Csc2Shift, j, &ctx).unwrap();
                assert!(cot.d_phi(&ctx).add(&csc2, &ctx).is_zero());
            }
        }
    }

    #[test]
    fn cot_derivative_numeric_first() {
        // finite differences on double trig, then the exact identity
        let h = 1e-5;
        for phi in [0.3f64, 0.5, 0.8, 1.1, 1.4] {
            let d = (1.0 / (phi + h).tan() - 1.0 / (phi - h).tan()) / (2.0 * h);
            assert!((d + 1.0 / phi.sin().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn reflection_and_conjugation() {
        let ctx = FieldCtx::new(3).unwrap();
        let tan = trig(TrigKind::TanShift, 0, &ctx).unwrap();
        assert_eq!(tan.reflect(&ctx), tan.neg());
        assert_eq!(tan.conj(&ctx), tan);
        for phi in [0.1, 0.4, 0.9] {
            assert!(at(&tan, phi, &ctx).im.abs() < 1e-12);
        }
    }

    #[test]
    fn odd_identity_sec2_sum() {
        let ctx = FieldCtx::new(3).unwrap();
        let sum = ZRat::sum(&(0..3).map(|j| trig(TrigKind::Sec2Shift, j, &ctx).unwrap()).collect::<Vec<_>>(), &ctx);
        let rhs = trig(TrigKind::Sec2K, 0, &ctx).unwrap().scale_int(9, &ctx);
        assert!(sum.sub(&rhs, &ctx).is_zero());
    }
}
