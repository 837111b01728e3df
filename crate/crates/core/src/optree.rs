//! Unevaluated operator expressions.
//!
//! A tree keeps the product structure that the symbolic side collapses by
//! normal ordering, so the numeric oracle can apply the factors one after
//! another instead.

use std::sync::Arc;

use crate::cyclofield::FieldCtx;
use crate::error::Result;
use crate::opalgebra::OpExpr;

#[derive(Clone, Debug)]
pub enum OpTree {
    Leaf(OpExpr),
    Sum(Vec<OpTree>),
    /// Left-to-right product; the rightmost factor acts first.
    Prod(Vec<OpTree>),
    Neg(Box<OpTree>),
    Adjoint(Box<OpTree>),
}

impl OpTree {
    pub fn leaf(x: &OpExpr) -> OpTree {
        OpTree::Leaf(x.clone())
    }

    pub fn int(ctx: &Arc<FieldCtx>, v: i64) -> OpTree {
        OpTree::Leaf(OpExpr::int(ctx, v))
    }

    pub fn prod(items: impl IntoIterator<Item = OpTree>) -> OpTree {
        OpTree::Prod(items.into_iter().collect())
    }

    pub fn sum(items: impl IntoIterator<Item = OpTree>) -> OpTree {
        OpTree::Sum(items.into_iter().collect())
    }

    pub fn neg(self) -> OpTree {
        OpTree::Neg(Box::new(self))
    }

    pub fn adjoint(self) -> OpTree {
        OpTree::Adjoint(Box::new(self))
    }

    pub fn pow(&self, n: usize) -> OpTree {
        OpTree::Prod(vec![self.clone(); n])
    }

    /// `self - other`.
    pub fn minus(self, other: OpTree) -> OpTree {
        OpTree::Sum(vec![self, other.neg()])
    }

    /// Normal form via the symbolic engine.
    pub fn eval(&self, ctx: &Arc<FieldCtx>) -> Result<OpExpr> {
        Ok(match self {
            OpTree::Leaf(x) => x.clone(),
            OpTree::Sum(items) => {
                let parts = items.iter().map(|t| t.eval(ctx)).collect::<Result<Vec<_>>>()?;
                OpExpr::sum_of(ctx, &parts)?
            }
            OpTree::Prod(items) => {
                let mut acc = OpExpr::one(ctx);
                for t in items {
                    acc = acc.mul(&t.eval(ctx)?)?;
                }
                acc
            }
            OpTree::Neg(t) => t.eval(ctx)?.neg(),
            OpTree::Adjoint(t) => t.eval(ctx)?.adjoint(),
        })
    }

    /// Largest total derivative order `p + q` the tree can apply.
    pub fn order(&self) -> usize {
        match self {
            OpTree::Leaf(x) => x.terms().keys().map(|k| (k.p + k.q) as usize).max().unwrap_or(0),
            OpTree::Sum(items) => items.iter().map(OpTree::order).max().unwrap_or(0),
            OpTree::Prod(items) => items.iter().map(OpTree::order).sum(),
            OpTree::Neg(t) | OpTree::Adjoint(t) => t.order(),
        }
    }
}

impl From<OpExpr> for OpTree {
    fn from(x: OpExpr) -> OpTree {
        OpTree::Leaf(x)
    }
}
