//! Exact commutative symbolic arithmetic.

pub mod expr;
pub mod gcd;
pub mod poly;
pub mod ratfun;
pub mod semifield;

pub use expr::Expr;
pub use poly::{Exp, Poly};
pub use ratfun::RatFun;
pub use semifield::{PositiveRationals, PositiveReals, RationalFunctions, Semifield, TropicalInt, TropicalReal};

/// True iff `r`, fully reduced, is a Laurent polynomial whose coefficients
/// are all positive integers.
pub fn is_positive_laurent(r: &RatFun) -> bool {
    r.is_positive_laurent()
}
