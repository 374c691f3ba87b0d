//! Relative homology of diagonal pairs `(X^n, Y^(n))` in powers of finite
//! simplicial sets, the transition morphisms between consecutive levels, and
//! their comparison with truncated groupoid algebras of free groups.

pub mod beilinson;
pub mod cli;
pub mod exactla;
pub mod grpalg;
pub mod homology;
pub mod sset;
