//! Inputs shared by the benchmarks under `benches/`.

use kstab_core::io::{corpus_entry, load_config};
use kstab_core::TestConfiguration;

/// A shipped corpus configuration by name.
pub fn corpus_config(name: &str) -> TestConfiguration {
    let text = corpus_entry(name).unwrap_or_else(|| panic!("no corpus entry {name:?}"));
    load_config(text).expect("corpus documents parse").1
}
