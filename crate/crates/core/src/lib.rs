//! Operation-count minimization for large multivariate polynomials.
//!
//! The pipeline is: parse a [`Polynomial`], pick a variable order
//! ([`HornerScheme`]), nest the polynomial with [`apply_scheme`], share common
//! subexpressions with [`build_dag`], then count or emit the result. The
//! [`search`] module looks for good orders with occurrence order, exhaustive
//! enumeration, MCTS (UCT or SA-UCT) and nested Monte Carlo search.

pub mod cli;
pub mod dag;
pub mod error;
pub mod expr;
pub mod horner;
pub mod report;
pub mod resolvent;
pub mod search;
pub mod sweep;

pub use dag::{build_dag, DagNode, ExprDag, NodeId, Operand};
pub use error::{Error, ParseError};
pub use expr::{Monomial, OpCount, Polynomial, Term, VarId, VarTable};
pub use horner::{apply_scheme, Direction, HornerExpr, HornerScheme};
pub use resolvent::{gen_res, symbolic_determinant, sylvester_matrix, ResolventSpec, SymbolicMatrix};
pub use search::{
    evaluate_scheme, exhaustive_search, mcts_search, nmcs_eval_count, nmcs_search, occurrence_search, Criterion,
    Evaluator, NmcsConfig, ScoreDelta, SearchConfig, SearchResult,
};
