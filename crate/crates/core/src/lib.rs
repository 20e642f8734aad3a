//! Belief programs with partial observability: parsing, exact execution
//! under two operational semantics, and a weakest-preexpectation calculus
//! over expected-value predicates.

pub mod ast;
pub mod belief;
pub mod check;
pub mod difftest;
pub mod fm;
pub mod gen;
pub mod invariant;
pub mod lexer;
pub mod normal;
pub mod parser;
pub mod predicate;
pub mod rational;
pub mod semantics;
pub mod wp;

pub use ast::{BinOp, Bound, CmpOp, Expr, Program, Prop, SampleSpec, Statement, Threshold, VarDecl, VarKind};
pub use belief::{Assignment, BeliefError, BeliefState, Signature};
pub use check::{check_observability, desugar, load, FrontendError, TypeError};
pub use parser::{parse, ParseError};
pub use rational::Rational;
