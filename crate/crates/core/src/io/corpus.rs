//! The shipped configuration documents.

use crate::config::TestConfiguration;
use crate::error::Result;

use super::document::{load_config, ConfigDocument};

pub const CORPUS: &[(&str, &str)] = &[
    ("trivial", include_str!("../../corpus/trivial.json")),
    ("product-p1", include_str!("../../corpus/product-p1.json")),
    ("normal-cone-p1", include_str!("../../corpus/normal-cone-p1.json")),
    ("tent", include_str!("../../corpus/tent.json")),
    ("p2-product", include_str!("../../corpus/p2-product.json")),
    ("blowup-product", include_str!("../../corpus/blowup-product.json")),
    ("flag-p1-point", include_str!("../../corpus/flag-p1-point.json")),
    ("flag-p2-fat", include_str!("../../corpus/flag-p2-fat.json")),
];

/// A parsed corpus entry.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
    pub document: ConfigDocument,
    pub config: TestConfiguration,
}

pub fn corpus() -> Result<Vec<CorpusEntry>> {
    CORPUS
        .iter()
        .map(|&(name, text)| {
            let (document, config) = load_config(text)?;
            Ok(CorpusEntry { name, text, document, config })
        })
        .collect()
}

pub fn corpus_entry(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
