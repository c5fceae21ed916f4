//! Analysis of systems of constant-coefficient differential-operator symbols:
//! Newton polyhedra and their anisotropy indices, the multi-quasi-ellipticity
//! decision, generalized Gevrey bounds and the wave-packet counterexample.

pub mod ellipticity;
pub mod error;
pub mod gevrey;
pub mod interval;
pub mod jet;
pub mod quadrature;
pub mod rational;
pub mod report;
pub mod polyhedron;
pub mod symbol;
pub mod systems;
pub mod verify;
pub mod wavepacket;

pub use error::{Error, Result};
pub use polyhedron::{build_polyhedron, NewtonPolyhedron};
pub use rational::Rational;
pub use symbol::{parse_symbol, parse_system, MultiIndex, OperatorSymbol, RPolynomial, SymbolSystem};
