//! The wireframe language: a constrained HTML body plus an absolute-position
//! style sheet.
//!
//! [`emit_dsl`] turns a normalized [`UiTree`](crate::hierarchy::UiTree) into
//! canonical text, [`parse_dsl`] reads (possibly broken) generated text back
//! into a [`WireframeDocument`], and [`validate`] reports invariant breaches.

mod classes;
mod emit;
mod parse;
mod validate;

use serde::{Deserialize, Serialize};

use crate::beautify::icons::IconId;
use crate::beautify::typography::TypographyPlan;

pub use classes::{map_class, Placement};
pub use emit::{emit_dsl, map_tree, serialize};
pub use parse::{parse_dsl, ParseError, DEFAULT_ELEMENT_HEIGHT};
pub use validate::{validate, Violation};

/// Closing tag used as the generation stop sequence.
pub const STOP_SEQUENCE: &str = "</html>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Paragraph,
    Button,
    Image,
    TextInput,
    Checkbox,
    Radio,
    DatePicker,
    Select,
    Video,
    Container,
}

impl Tag {
    pub const ALL: [Tag; 10] = [
        Tag::Paragraph,
        Tag::Button,
        Tag::Image,
        Tag::TextInput,
        Tag::Checkbox,
        Tag::Radio,
        Tag::DatePicker,
        Tag::Select,
        Tag::Video,
        Tag::Container,
    ];

    /// Image-like elements describe themselves through `alt`.
    pub fn carries_alt(self) -> bool {
        matches!(self, Tag::Image | Tag::Video)
    }

    pub fn carries_text(self) -> bool {
        !self.carries_alt() && self != Tag::Container
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Paragraph => "paragraph",
            Tag::Button => "button",
            Tag::Image => "image",
            Tag::TextInput => "text_input",
            Tag::Checkbox => "checkbox",
            Tag::Radio => "radio",
            Tag::DatePicker => "date_picker",
            Tag::Select => "select",
            Tag::Video => "video",
            Tag::Container => "container",
        }
    }
}

/// Absolute box in screen pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rect {
    pub left: i32,
    pub top: i32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub fn new(left: i32, top: i32, width: u32, height: u32) -> Self {
        Self {
            left,
            top,
            width,
            height,
        }
    }

    pub fn right(&self) -> i64 {
        i64::from(self.left) + i64::from(self.width)
    }

    pub fn bottom(&self) -> i64 {
        i64::from(self.top) + i64::from(self.height)
    }

    pub fn area(&self) -> i64 {
        i64::from(self.width) * i64::from(self.height)
    }

    /// Overlap as `(width, height)`; zero when the boxes do not intersect.
    pub fn overlap(&self, other: &Rect) -> (i64, i64) {
        let w = self.right().min(other.right()) - i64::from(self.left.max(other.left));
        let h = self.bottom().min(other.bottom()) - i64::from(self.top.max(other.top));
        (w.max(0), h.max(0))
    }

    pub fn intersection_area(&self, other: &Rect) -> i64 {
        let (w, h) = self.overlap(other);
        w * h
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            // two degenerate boxes at the same spot
            return if self == other { 1.0 } else { 0.0 };
        }
        inter as f64 / union as f64
    }

    pub fn within(&self, width: u32, height: u32) -> bool {
        self.left >= 0 && self.top >= 0 && self.right() <= i64::from(width) && self.bottom() <= i64::from(height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FontClass {
    Title,
    #[default]
    Normal,
    Subtitle,
}

impl FontClass {
    /// Font role implied by an element id. `subtitle` is checked before
    /// `title` since it contains it.
    pub fn from_id(id: &str) -> Self {
        let id = id.to_ascii_lowercase();
        if id.contains("subtitle") {
            FontClass::Subtitle
        } else if id.contains("title") {
            FontClass::Title
        } else {
            FontClass::Normal
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireframeElement {
    pub id: String,
    pub tag: Tag,
    pub text: Option<String>,
    pub alt_text: Option<String>,
    pub icon: Option<IconId>,
    pub font_class: FontClass,
    #[serde(rename = "box")]
    pub bbox: Rect,
    /// Set by the beautifier; drives text layout in the renderer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub typography: Option<TypographyPlan>,
    pub children: Vec<WireframeElement>,
}

impl WireframeElement {
    pub fn new(id: impl Into<String>, tag: Tag, bbox: Rect) -> Self {
        let id = id.into();
        Self {
            font_class: FontClass::from_id(&id),
            id,
            tag,
            text: None,
            alt_text: None,
            icon: None,
            bbox,
            typography: None,
            children: Vec::new(),
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_alt(mut self, alt: impl Into<String>) -> Self {
        self.alt_text = Some(alt.into());
        self
    }

    pub fn with_children(mut self, children: Vec<WireframeElement>) -> Self {
        self.children = children;
        self
    }

    /// Visible words for the element: label text, or alt for images.
    pub fn content(&self) -> Option<&str> {
        self.text.as_deref().or(self.alt_text.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireframeDocument {
    pub screen_width: u32,
    pub screen_height: u32,
    pub roots: Vec<WireframeElement>,
}

impl WireframeDocument {
    pub fn new(screen_width: u32, screen_height: u32, roots: Vec<WireframeElement>) -> Self {
        Self {
            screen_width,
            screen_height,
            roots,
        }
    }

    pub fn screen_rect(&self) -> Rect {
        Rect::new(0, 0, self.screen_width, self.screen_height)
    }

    /// Elements in depth-first preorder.
    pub fn elements(&self) -> Vec<&WireframeElement> {
        let mut out = Vec::new();
        let mut stack: Vec<&WireframeElement> = self.roots.iter().rev().collect();
        while let Some(el) = stack.pop() {
            out.push(el);
            stack.extend(el.children.iter().rev());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elements().len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<&WireframeElement> {
        self.elements().into_iter().find(|e| e.id == id)
    }

    /// Apply `f` to every element in preorder.
    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut WireframeElement)) {
        fn walk(el: &mut WireframeElement, f: &mut impl FnMut(&mut WireframeElement)) {
            f(el);
            for child in &mut el.children {
                walk(child, f);
            }
        }
        for root in &mut self.roots {
            walk(root, &mut f);
        }
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut WireframeElement> {
        fn walk<'a>(els: &'a mut [WireframeElement], id: &str) -> Option<&'a mut WireframeElement> {
            for el in els {
                if el.id == id {
                    return Some(el);
                }
                if let Some(found) = walk(&mut el.children, id) {
                    return Some(found);
                }
            }
            None
        }
        walk(&mut self.roots, id)
    }

    /// Remove the element with `id` together with its subtree.
    pub fn remove(&mut self, id: &str) -> Option<WireframeElement> {
        fn walk(els: &mut Vec<WireframeElement>, id: &str) -> Option<WireframeElement> {
            if let Some(pos) = els.iter().position(|e| e.id == id) {
                return Some(els.remove(pos));
            }
            els.iter_mut().find_map(|e| walk(&mut e.children, id))
        }
        walk(&mut self.roots, id)
    }
}
