//! Finite quotients that separate elements of free groups and of cyclic
//! amalgams of free groups by the orders of their images.

pub mod action_graph;
pub mod amalgam;
pub mod amalgam_graph;
pub mod error;
pub mod oracle;
pub mod perm;
pub mod search;
pub mod surgery;
pub mod words;

pub use action_graph::{ActionGraph, CyclePath, FiniteQuotient, Source};
pub use amalgam_graph::{AmalgamActionGraph, GluingSpec};
pub use amalgam::{AmalgamPresentation, AmalgamWord, Conjugacy, Side, Syllable};
pub use error::{Budget, Error, Result};
pub use perm::Perm;
pub use words::{Basis, Letter, Word};
