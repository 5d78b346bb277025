//! Littelmann path crystals for finite-type root systems, exact Weyl
//! characters, and random walks in the Weyl chamber.
//!
//! The crate is organised bottom-up:
//!
//! * [`cartan`]: Cartan data, weights, roots and the Weyl group.
//! * [`path`]: piecewise-linear paths and the root operators `e_i`, `f_i`.
//! * [`crystal`]: crystal graphs generated from dominant paths, tensor
//!   products, the Weyl group action on crystals and multiplicities.
//! * [`charalg`]: Laurent polynomials in `tau` with rational exponents,
//!   characters, the Weyl numerator and the harmonic function `psi`.
//! * [`markov`]: crystal distributions, transition tables, Doob transforms
//!   and the generalized Pitman transform.
//! * [`montecarlo`]: seeded parallel sampling of the walk and estimators
//!   for cone-exit statistics.
//!
//! All algebra is exact. Floating point only appears in Monte-Carlo
//! estimates, never in event determination.

pub mod cartan;
pub mod charalg;
pub mod crystal;
pub mod error;
pub mod markov;
pub mod montecarlo;
pub mod path;
pub mod rational;
pub mod system;

pub use cartan::{CartanDatum, CartanType, ChamberPosition, Weight, WeylElement, WeylGroup};
pub use charalg::{ExponentPolynomial, TauPoint};
pub use crystal::{
    CrystalGraph, CrystalOps, ModuleSpec, NodeRef, Summand, TensorCrystal, TensorNode,
};
pub use error::{Error, Result};
pub use markov::{CrystalDistribution, HarmonicWitness, StateSet, TableKind, TransitionTable};
pub use montecarlo::{EstimatorReport, WalkSample};
pub use path::{MaybePath, PiecewisePath};
pub use rational::{Frac, Q};
pub use system::RootSystem;
