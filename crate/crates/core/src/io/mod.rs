//! Instance files, random instances and front documents.

pub mod front;
pub mod generate;
pub mod solomon;

pub use front::{read_front, write_front, FrontDocument, FrontEntry, FrontError, ReadFront, FRONT_FORMAT};
pub use generate::{generate_random_instance, GeneratorParams};
pub use solomon::{emit_solomon, parse_solomon, parse_solomon_bytes, ParseError, ParseErrorKind};
