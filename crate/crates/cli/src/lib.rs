//! Parsing, lowering, and serialization behind the fiberlift binary, exposed
//! as a library so integration tests can drive the same code paths.

pub mod ast;
pub mod commands;
pub mod lower;
pub mod record;
