//! Fixed workloads shared by the benchmarks.

use wiregen_core::dsl::serialize;
use wiregen_core::synth;
use wiregen_core::{normalize, FontClass, Rect, UiTree, WireframeDocument};

/// Normalized random trees of up to `max_nodes` nodes.
pub fn trees(count: u64, max_nodes: usize) -> Vec<UiTree> {
    (0..count)
        .map(|seed| normalize(&synth::random_raw_tree(seed, max_nodes)))
        .collect()
}

/// Serialized random documents, ready for the parser.
pub fn markup(count: u64, max_nodes: usize) -> Vec<String> {
    (0..count)
        .map(|seed| serialize(&synth::random_document(seed, max_nodes)))
        .collect()
}

/// Documents carrying planted layout flaws.
pub fn corrupted(count: u64) -> Vec<WireframeDocument> {
    (0..count)
        .map(|seed| synth::corrupted_document(seed).document)
        .collect()
}

/// A text of `words` words in a box it only partly fits.
pub fn text_block(words: usize) -> (String, FontClass, Rect) {
    let text = (0..words)
        .map(|i| ["tap", "to", "continue", "reading", "more"][i % 5])
        .collect::<Vec<_>>()
        .join(" ");
    (text, FontClass::Normal, Rect::new(0, 0, 220, 120))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_nonempty() {
        assert_eq!(trees(3, 20).len(), 3);
        assert!(markup(2, 20).iter().all(|m| m.ends_with("</html>")));
        assert_eq!(corrupted(2).len(), 2);
        assert_eq!(text_block(12).0.split(' ').count(), 12);
    }
}
