//! Symbolic engine for the path algebra of smash products.
//!
//! Design notes:
//! - Everything is syntax. Shapes describe iterated smash domains, terms are
//!   symbolic points, path expressions are formal 1-paths, and maps are clause
//!   tables giving values on point constructors and on every 1-path generator
//!   family of their domain. No general type theory is involved.
//! - Path equality is decided in the free groupoid on generator letters:
//!   normalization evaluates `ap` through clause tables, flattens composites,
//!   pushes inverses onto letters as signs and freely reduces. Equality is
//!   syntactic equality of reduced words — deliberately *not* equality modulo
//!   the opaque 2-cells, so the checker is a verifier, never an oracle.
//! - Square obligations encode "this square is filled by refl": the boundary
//!   words must agree after reduction. All coherence checks (pentagon,
//!   hexagon, triangle, involution, naturalities) are batches of such squares.
//! - A finite pointed-set model provides an independent brute-force
//!   cross-check at the level of points, where all path data is discrete.

pub mod term;
pub mod normalize;
pub mod maps;
pub mod induction;
pub mod model;
pub mod check;

pub use term::{
    endpoints, eval_point, shape_generators, substitute_path, substitute_term, AbstractSym, Ctx,
    GeneratorFamily, Leaf, MapDef, NodePath, PathExpr, PathRow, Pattern, PointRow, PushKind,
    Shape, Square, Step, TableMap, Term, TwoCellRow,
};

use serde::Serialize;
use thiserror::Error;

/// Library-wide error type. Obligation failures are data for reports as much
/// as errors; everything else indicates ill-formed input or a broken table.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum Error {
    #[error("ill-chained composite: segment ends at `{at}` but next begins at `{next}`")]
    IllChained { at: String, next: String },
    #[error("no clause for {0}")]
    UnknownClause(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("2-cell symbol `{0}` reached by evaluation; 2-cells are opaque")]
    TwoCellEncountered(String),
    #[error("non-constructor input: {0}")]
    NonConstructorInput(String),
    #[error("obligation {tag} failed: {detail}")]
    ObligationFailed { tag: String, detail: String },
    #[error("unknown diagram `{0}`")]
    UnknownDiagram(String),
    #[error("invalid clause table: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
