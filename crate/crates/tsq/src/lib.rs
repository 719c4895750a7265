//! Toolkit for two-dimensional triangle-square complexes.
//!
//! A triangle-square complex is glued from unit equilateral triangles and
//! unit squares. This crate stores such complexes at the quotient level
//! (labelled edges plus face boundary words) and provides:
//!
//! * [`complex`] — the data model and validation,
//! * [`catalog`] — built-in complexes used throughout the test suites,
//! * [`specio`] — a line-oriented text format (`.tsq`) with a parser and a
//!   canonical serializer,
//! * [`links`] — vertex links, the Gromov link condition and the girth-6
//!   systolicity check, all in exact integer angle units of pi/6,
//! * [`flats`] — exact generators for finite patches of the Eisenstein
//!   plane and of the flats F, G and F_n,
//! * [`cellmaps`] — cellular maps, link-injectivity checking and the
//!   built-in maps from flats into the catalog complexes,
//! * [`develop`] — finite balls of universal covers and lifts of patch
//!   maps into them,
//! * [`geodesics`] — 1-skeleton geodesics, moves, choke points,
//!   Gersten-Short geodesics and fellow-traveling measurements.

pub mod catalog;
pub mod cellmaps;
pub mod complex;
pub mod develop;
pub mod flats;
pub mod geodesics;
pub mod links;
pub mod qsqrt3;
pub mod specio;

pub use complex::{build_complex, Complex, ComplexError, Description, DirectedEdge, Face, FaceKind};
pub use qsqrt3::QSqrt3;
