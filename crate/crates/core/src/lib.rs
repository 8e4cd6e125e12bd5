//! Exact-arithmetic toolkit for desk-scale computations with `GL(m, D)` over
//! a local division algebra: residue-field arithmetic, twisted Laurent
//! series, Cartan invariants, Iwasawa coset enumeration and Satake
//! transforms, symmetric-group combinatorics, finite Steinberg modules,
//! pro-p-Iwahori Hecke modules for `GL(2, D)`, Iwahori-level convolution,
//! and Kostka/Kostka-Foulkes utilities.
//!
//! Everything is exact: integers and finite-field values only.

pub mod residue;
pub mod skew;
pub mod matd;
pub mod weyl;
pub mod linalg;
pub mod finite;
pub mod satake;
pub mod gl2;
pub mod iwahori;
pub mod kostka;
