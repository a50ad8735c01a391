//! Double coverings of finite groups from presentations.
//!
//! Given `P = <X | R>` presenting a finite group `G`, every sign vector
//! `J` in `C_2^m` gives a lifted presentation `P_J = <X, i | R = J, i^2, [i, X]>`
//! which presents either `G` again or a double covering of `G`. This crate
//! enumerates those lifts up to presentation class, realizes them by coset
//! enumeration, sorts them into isomorphism classes and decides which are
//! strong coverings.

pub mod corpus;
pub mod coset_enum;
pub mod covering;
pub mod metacyclic;
pub mod report;
pub mod table_group;
pub mod words;

pub use coset_enum::{enumerate, EnumError, EnumLimits, Strategy};
pub use covering::{
    classify_coverings, Classification, ClassifyOptions, CoveringRecord, Strongness,
};
pub use metacyclic::{MetaParams, NormalForm};
pub use table_group::{Elem, FiniteGroup};
pub use words::{ParityMatrix, Presentation, SignVector, Word};
