//! Exact operator algebra for dihedral Dunkl operators on the plane.
//!
//! Operators are normal-ordered sums `c(r, z; a, b, w2) dr^p dphi^q R^i I^e`
//! with `z = e^{i phi}`, exact coefficients over the cyclotomic field
//! Q(zeta_N), `N = lcm(4, 2k)`. On top of the algebra sit constructors for the
//! Dunkl operators `D_r`, `D_phi`, the Hamiltonians `H_k` and their
//! D_2k-extended forms, a registry of identity checks, and a numeric oracle
//! that evaluates the same identities pointwise without normal ordering.

pub mod builders;
pub mod coeffring;
pub mod cyclofield;
mod error;
pub mod exprparse;
pub mod gen;
pub mod identities;
pub mod opalgebra;
pub mod optree;
pub mod oracle;

pub use builders::{Builders, HkForm, Mutation};
pub use coeffring::{trig, Atom, Coefficient, Mono, TrigKind, ZPoly, ZRat};
pub use cyclofield::{CycloScalar, FieldCtx, DEFAULT_MAX_K};
pub use error::{Error, Result};
pub use exprparse::{parse, parse_expr, parse_tree, pretty};
pub use identities::{check, run_suite, run_suite_with, CheckReport, Filter, Status, SuiteOptions};
pub use opalgebra::{normal_form, Factor, OpExpr, OpKey};
pub use optree::OpTree;
pub use oracle::{Domain, NumericReport, OracleConfig};
