//! Text formats: instances, solution documents and DOT export.

pub mod document;
pub mod dot;
pub mod instance;

pub use document::{write_solutions, Format, SolutionsDocument, StructureEntry};
pub use dot::structure_to_dot;
pub use instance::{parse_instance, write_instance};
