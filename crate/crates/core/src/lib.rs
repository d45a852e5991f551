//! Exact computation in associative conformal algebras realized inside
//! `Cend_n = M_n(Q[D, v])`.

pub mod arith;
pub mod conformal;
pub mod counterexample;
pub mod fixtures;
pub mod lifting;
pub mod sample;
pub mod span;
pub mod weyl;
