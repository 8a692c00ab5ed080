use std::collections::HashSet;

use serde::Serialize;

use super::{Tag, WireframeDocument};

/// One breached document invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Violation {
    ZeroScreenDims,
    EmptyId,
    DuplicateId(String),
    /// An image or video carrying label text.
    TextOnImage(String),
    /// A text-bearing element carrying alt text.
    AltOnText(String),
    /// A container with label or alt text.
    ContentOnContainer(String),
    /// Children under anything other than a container.
    ChildrenOnLeaf(String),
}

pub fn validate(doc: &WireframeDocument) -> Vec<Violation> {
    let mut out = Vec::new();
    if doc.screen_width == 0 || doc.screen_height == 0 {
        out.push(Violation::ZeroScreenDims);
    }
    let mut seen = HashSet::new();
    for el in doc.elements() {
        if el.id.is_empty() {
            out.push(Violation::EmptyId);
        } else if !seen.insert(el.id.as_str()) {
            out.push(Violation::DuplicateId(el.id.clone()));
        }
        if el.tag.carries_alt() && el.text.is_some() {
            out.push(Violation::TextOnImage(el.id.clone()));
        }
        if el.tag.carries_text() && el.alt_text.is_some() {
            out.push(Violation::AltOnText(el.id.clone()));
        }
        if el.tag == Tag::Container && (el.text.is_some() || el.alt_text.is_some()) {
            out.push(Violation::ContentOnContainer(el.id.clone()));
        }
        if el.tag != Tag::Container && !el.children.is_empty() {
            out.push(Violation::ChildrenOnLeaf(el.id.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Rect, WireframeElement};

    fn el(id: &str, tag: Tag) -> WireframeElement {
        WireframeElement::new(id, tag, Rect::new(0, 0, 10, 10))
    }

    #[test]
    fn well_formed_document() {
        let doc = WireframeDocument::new(
            100,
            100,
            vec![el("root", Tag::Container).with_children(vec![
                el("t", Tag::Paragraph).with_text("hi"),
                el("i", Tag::Image).with_alt("logo"),
            ])],
        );
        assert!(validate(&doc).is_empty());
    }

    #[test]
    fn text_on_image() {
        let doc = WireframeDocument::new(100, 100, vec![el("i", Tag::Image).with_text("oops")]);
        assert_eq!(validate(&doc), [Violation::TextOnImage("i".into())]);
    }

    #[test]
    fn structural_breaches() {
        let doc = WireframeDocument::new(
            0,
            100,
            vec![
                el("a", Tag::Button)
                    .with_alt("x")
                    .with_children(vec![el("a", Tag::Paragraph)]),
                el("", Tag::Container).with_text("y"),
            ],
        );
        assert_eq!(
            validate(&doc),
            [
                Violation::ZeroScreenDims,
                Violation::AltOnText("a".into()),
                Violation::ChildrenOnLeaf("a".into()),
                Violation::DuplicateId("a".into()),
                Violation::EmptyId,
                Violation::ContentOnContainer("".into()),
            ]
        );
    }
}
