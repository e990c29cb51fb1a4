//! Configuration documents, tabular output and the shipped corpus.

pub mod corpus;
pub mod csv;
pub mod document;

pub use self::corpus::{corpus, corpus_entry, CorpusEntry, CORPUS};
pub use self::csv::{format_f64, Column, ColumnType, RunManifest, Table};
pub use self::document::{emit_config, load_config, parse_config, ConfigDocument, Kind, SCHEMA_VERSION};
