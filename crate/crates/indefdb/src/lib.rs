//! Indefinite deductive databases with a single null value: two-set
//! databases `<D,E>`, possible-world semantics under integrity constraints,
//! Datalog(not) views evaluated by answer sets, and view-update repair
//! search with weak, relevant, minimal, and constrained repair classes.

pub mod database;
pub mod error;
pub mod facts;
pub mod repairs;
pub mod syntax;
pub mod updates;
pub mod views;
pub mod worlds;

pub use database::{IndefiniteDatabase, Schema};
pub use error::{Diagnostic, Error};
pub use facts::{Constant, Fact, Truth};
pub use syntax::{parse_instance, print_instance, Instance, Request};
