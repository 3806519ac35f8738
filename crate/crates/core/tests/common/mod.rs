//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls the closure, emptiness or lattice code under test.
#![allow(dead_code)]

pub mod gen;
pub mod suites;

use octolyze_core::numeric::Rational;

pub fn q(n: i64) -> Rational {
    Rational::integer(n)
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
