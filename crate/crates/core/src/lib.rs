//! Datalog over facts annotated with presence conditions.
//!
//! Every fact carries a propositional formula over feature names saying in
//! which configurations of a product line it exists. Inference runs once for
//! all configurations: a derived fact exists where the rule and all of its
//! premises exist, and facts that exist in no valid configuration of the
//! feature model are dropped.
//!
//! ```
//! use vdatalog::engine::{infer, Database, EngineConfig};
//! use vdatalog::pcbdd::BddManager;
//! use vdatalog::syntax::{parse_program, print_pc};
//!
//! let program = parse_program(
//!     ".decl Edge(a: symbol, b: symbol)
//!      .decl Path(a: symbol, b: symbol)
//!      Edge(A, B) @ X.
//!      Edge(B, C) @ !Y.
//!      Path(x, y) :- Edge(x, y).
//!      Path(x, z) :- Edge(x, y), Path(y, z).",
//! )
//! .unwrap();
//! let mut mgr = BddManager::new();
//! let config = EngineConfig::new(&mgr);
//! let result = infer(&program, Database::for_program(&program), &config, &mut mgr).unwrap();
//! let pc = result.database.exists("Path", &["A", "C"]).unwrap().unwrap();
//! assert_eq!(print_pc(pc, &mgr), "X /\\ !Y");
//! ```
//!
//! Modules:
//!
//! - [`pcbdd`]: presence conditions as hash-consed BDDs.
//! - [`syntax`]: programs with `@` annotations, and presence conditions.
//! - [`engine`]: annotated relations and lifted semi-naive inference.
//! - [`facts_io`]: annotated fact files.
//! - [`oracle`]: plain Datalog and the per-configuration check.
//! - [`workload`]: seeded random bundles.
//! - [`cli`]: the `vdatalog` command.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod engine;
mod error;
pub mod facts_io;
pub mod oracle;
pub mod pcbdd;
pub mod syntax;
pub mod workload;

pub use error::Error;
