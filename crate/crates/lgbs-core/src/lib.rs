//! Combinatorics of lambda-graph bisystems.
//!
//! A lambda-graph bisystem is a pair of labeled Bratteli diagrams on a common
//! vertex set, one carrying downward right-resolving edges and one carrying
//! upward left-resolving edges, compatible through a square-exchange ("local")
//! property.  Every two-sided subshift has a canonical bisystem built from its
//! central word classes, and the bisystem in turn presents a space of
//! two-dimensional configurations with a shift action, an AF equivalence
//! relation, and dimension-group style stage invariants.
//!
//! The crate is organized bottom-up:
//!
//! * [`subshift`] — finite presentations of subshifts (0-1 matrix, forbidden
//!   words, right-resolving labeled graph) and exact central-class machinery.
//! * [`bisystem`] — the bisystem data structure, axiom validators, incidence
//!   matrices and serialization.
//! * [`canonical`] — the canonical bisystem of a subshift, with stabilization
//!   detection that makes infinite-depth questions decidable for sofic inputs.
//! * [`configuration`] — triangles, rectangles, zigzag paths, the extension
//!   algorithms, the configuration ultrametric and the factor map.
//! * [`dynamics`] — semidecision procedures: condition (I), irreducibility,
//!   essential-freeness refutation search, factor-map separation probe.
//! * [`afstage`] — stage algebras of the AF relation, inclusion matrices,
//!   dimension-group systems and bounded intertwining comparison.

pub mod afstage;
pub mod alphabet;
pub mod bisystem;
pub mod canonical;
pub mod configuration;
pub mod dynamics;
pub mod error;
pub mod intmat;
pub mod subshift;

pub use alphabet::{Alphabet, Sym, Word};
pub use bisystem::LambdaBiSystem;
pub use error::LgbsError;
pub use subshift::SubshiftPresentation;
