//! Command-line front end: exact input parsing, the `wrapkit/1` document format,
//! SVG rendering, and the `wrapkit` subcommands.

pub mod app;
pub mod document;
pub mod expr;
pub mod svg;

pub use app::{run_cli, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK};
pub use document::WrappingDocument;
pub use expr::parse_b;
