//! Exact computation with virtual endomorphisms of finitely generated
//! torsion-free nilpotent groups, and the self-similar (tree) actions they
//! induce.
//!
//! Everything here is exact: integers are arbitrary precision, rationals are
//! reduced fractions of those, and every decision procedure either certifies
//! its answer or says it could not decide within the given bounds. No floats
//! anywhere.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `vend-cli` crate.
//!
//! Module layout, bottom up:
//!
//! * [`arith`]: big integers/rationals, exact matrices, characteristic
//!   polynomials, integer polynomial factorization, a root-location test.
//! * [`lattice`]: sublattices of Z^n in Hermite normal form, Smith normal
//!   form, indices, saturation, images/preimages under rational maps, and the
//!   maximal invariant sublattice computation.
//! * [`nilgroup`]: the two group backends (free abelian, and lattice-by-cyclic
//!   affine groups with a unipotent action), their subgroups, cosets,
//!   transversals, and central series data.
//! * [`vend`]: virtual endomorphism triples (G, H, f), simplicity and core
//!   computations, derived chains, degree bounds, and the registry of built-in
//!   example triples.
//! * [`selfsim`]: the induced automaton side: wreath decompositions, portraits,
//!   state sets, bisimulation equality, orders, level transitivity.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
pub mod lattice;
pub mod nilgroup;
pub mod selfsim;
pub mod vend;
