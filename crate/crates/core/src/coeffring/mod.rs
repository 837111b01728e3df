//! The commutative coefficient ring of operator terms.

mod coefficient;
mod trig;
mod zpoly;
mod zrat;

pub use coefficient::{Coefficient, Mono};
pub use trig::{trig, TrigKind};
pub use zpoly::{binomial_atoms, Atom, ZPoly};
pub use zrat::ZRat;
