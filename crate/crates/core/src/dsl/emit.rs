use std::fmt::Write as _;

use super::{map_class, Placement, Rect, Tag, WireframeDocument, WireframeElement};
use crate::beautify::typography::Alignment;
use crate::hierarchy::{UiNode, UiTree};

/// The document a tree denotes, before any text is serialized.
///
/// Only containers keep children; descendants of leaf widgets are hoisted to
/// follow their ancestor as siblings so preorder is unchanged.
pub fn map_tree(tree: &UiTree) -> WireframeDocument {
    let mut roots = Vec::new();
    let mut counter = 0;
    map_node(&tree.root, &mut roots, &mut counter);
    WireframeDocument::new(tree.screen_width, tree.screen_height, roots)
}

fn map_node(node: &UiNode, out: &mut Vec<WireframeElement>, counter: &mut usize) {
    let id = node.resource_id.clone().unwrap_or_else(|| format!("el{counter}"));
    *counter += 1;
    let (tag, placement) = map_class(&node.native_class);
    let b = node.bounds;
    let bbox = Rect::new(
        b.left as i32,
        b.top as i32,
        b.width().max(0) as u32,
        b.height().max(0) as u32,
    );
    let mut el = WireframeElement::new(id, tag, bbox);
    match placement {
        Placement::Alt => el.alt_text = node.content_desc.clone(),
        Placement::None => {}
        _ => el.text = node.text.clone(),
    }

    if tag == Tag::Container {
        for child in &node.children {
            map_node(child, &mut el.children, counter);
        }
        out.push(el);
    } else {
        out.push(el);
        for child in &node.children {
            map_node(child, out, counter);
        }
    }
}

/// Canonical wireframe text for a normalized tree. Byte-identical for equal
/// trees; always ends with `</html>`.
pub fn emit_dsl(tree: &UiTree) -> String {
    serialize(&map_tree(tree))
}

/// Canonical serialization: style block first (rules in preorder), then
/// the body.
pub fn serialize(doc: &WireframeDocument) -> String {
    let elements = doc.elements();
    let mut out = String::with_capacity(128 + elements.len() * 160);
    out.push_str("<html>\n<style>\n");
    let _ = writeln!(
        out,
        "body {{ width:{}px; height:{}px; }}",
        doc.screen_width, doc.screen_height
    );
    for el in &elements {
        write_rule(&mut out, el);
    }
    out.push_str("</style>\n<body>\n");
    for root in &doc.roots {
        write_element(&mut out, root, 0);
    }
    out.push_str("</body>\n</html>");
    out
}

fn write_rule(out: &mut String, el: &WireframeElement) {
    let b = el.bbox;
    let _ = write!(
        out,
        ".{} {{ position:absolute; top:{}px; left:{}px; width:{}px; height:{}px; ",
        el.id, b.top, b.left, b.width, b.height
    );
    if let Some(plan) = &el.typography {
        let _ = write!(
            out,
            "font-size:{}px; text-align:{}; ",
            plan.font_px,
            match plan.alignment {
                Alignment::Left => "left",
                Alignment::Center => "center",
                Alignment::Right => "right",
            }
        );
    }
    out.push_str("}\n");
}

fn write_element(out: &mut String, el: &WireframeElement, depth: usize) {
    let indent = "  ".repeat(depth);
    let id = &el.id;
    let inner = inner_text(el);
    let attr_text = attr_text(el);
    let icon = el
        .icon
        .map(|i| format!(" data-icon=\"{}\"", i.get()))
        .unwrap_or_default();
    match el.tag {
        Tag::Paragraph => {
            let _ = writeln!(out, "{indent}<p class={id}>{inner}</p>");
        }
        Tag::Button => {
            let _ = writeln!(out, "{indent}<button class={id}{icon}>{inner}</button>");
        }
        Tag::Image => {
            let alt = optional_attr("alt", el.alt_text.as_deref());
            let _ = writeln!(out, "{indent}<img class={id}{alt}{icon} />");
        }
        Tag::Video => {
            let alt = optional_attr("alt", el.alt_text.as_deref());
            let _ = writeln!(out, "{indent}<video class={id}{alt}{icon}></video>");
        }
        Tag::TextInput => {
            let placeholder = optional_attr("placeholder", attr_text.as_deref());
            let _ = writeln!(out, "{indent}<input class={id}{placeholder} type=\"text\">");
        }
        Tag::DatePicker => {
            let value = optional_attr("value", attr_text.as_deref());
            let _ = writeln!(out, "{indent}<input class={id} type=\"date\"{value}>");
        }
        Tag::Checkbox | Tag::Radio => {
            let kind = if el.tag == Tag::Checkbox { "checkbox" } else { "radio" };
            let _ = writeln!(out, "{indent}<input class={id} type=\"{kind}\">");
            let _ = writeln!(out, "{indent}<label for={id}>{inner}</label>");
        }
        Tag::Select => {
            let _ = writeln!(out, "{indent}<select class={id} type=\"radio\"></select>");
            let _ = writeln!(out, "{indent}<label for={id}>{inner}</label>");
        }
        Tag::Container => {
            if el.children.is_empty() {
                let _ = writeln!(out, "{indent}<div class={id}></div>");
            } else {
                let _ = writeln!(out, "{indent}<div class={id}>");
                for child in &el.children {
                    write_element(out, child, depth + 1);
                }
                let _ = writeln!(out, "{indent}</div>");
            }
        }
    }
}

/// Element text for tag content, with planned line breaks as `<br>`.
fn inner_text(el: &WireframeElement) -> String {
    match &el.typography {
        Some(plan) if plan.lines.len() > 1 => plan
            .lines
            .iter()
            .map(|l| escape_text(l))
            .collect::<Vec<_>>()
            .join("<br>"),
        _ => el.text.as_deref().map(escape_text).unwrap_or_default(),
    }
}

/// Element text for attribute values; planned line breaks become newlines.
fn attr_text(el: &WireframeElement) -> Option<String> {
    match &el.typography {
        Some(plan) if plan.lines.len() > 1 => Some(plan.lines.join("\n")),
        _ => el.text.clone(),
    }
}

fn optional_attr(name: &str, value: Option<&str>) -> String {
    value
        .map(|v| format!(" {name}=\"{}\"", escape_attr(v)))
        .unwrap_or_default()
}

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{normalize, PixelBounds, RICO_SCREEN};

    fn screen_tree(children: Vec<UiNode>) -> UiTree {
        let root = UiNode::new("FrameLayout", PixelBounds::new(0, 0, 1440, 2560))
            .with_id("root")
            .with_children(children);
        normalize(&UiTree::new(root, RICO_SCREEN))
    }

    #[test]
    fn text_view_and_rule() {
        let tree = screen_tree(vec![UiNode::new("TextView", PixelBounds::new(0, 84, 1440, 252))
            .with_id("title")
            .with_text("Settings")]);
        let dsl = emit_dsl(&tree);
        assert!(dsl.contains("<p class=title>Settings</p>"));
        assert!(dsl.contains(".title { position:absolute; top:84px; left:0px; width:1440px; height:168px; }"));
        assert!(dsl.contains("body { width:1440px; height:2560px; }"));
        assert!(dsl.ends_with("</html>"));
        assert!(!dsl.contains("margin") && !dsl.contains("inline"));
    }

    #[test]
    fn edit_text_uses_placeholder() {
        let tree = screen_tree(vec![UiNode::new("EditText", PixelBounds::new(0, 0, 100, 40))
            .with_id("email")
            .with_text("Email")]);
        assert!(emit_dsl(&tree).contains(r#"<input class=email placeholder="Email" type="text">"#));
    }

    #[test]
    fn image_uses_content_desc_as_alt() {
        let tree = screen_tree(vec![UiNode::new("ImageButton", PixelBounds::new(0, 0, 40, 40))
            .with_id("more")
            .with_text("ignored")
            .with_content_desc("More options")]);
        let dsl = emit_dsl(&tree);
        assert!(dsl.contains(r#"<img class=more alt="More options" />"#));
        assert!(!dsl.contains("ignored"));
    }

    #[test]
    fn container_with_two_children_in_preorder() {
        let tree = screen_tree(vec![
            UiNode::new("TextView", PixelBounds::new(0, 0, 10, 10)).with_id("a"),
            UiNode::new("Button", PixelBounds::new(0, 10, 10, 20)).with_id("b"),
        ]);
        let dsl = emit_dsl(&tree);
        let body = &dsl[dsl.find("<body>").unwrap()..];
        let opens = body.matches("<p ").count() + body.matches("<button ").count() + body.matches("<div ").count();
        assert_eq!(opens, 3);
        let (r, a, b) = (
            body.find("class=root").unwrap(),
            body.find("class=a").unwrap(),
            body.find("class=b").unwrap(),
        );
        assert!(r < a && a < b);
        let style = &dsl[..dsl.find("<body>").unwrap()];
        assert!(style.find(".root").unwrap() < style.find(".a ").unwrap());
    }

    #[test]
    fn leaf_children_are_hoisted() {
        let inner = UiNode::new("TextView", PixelBounds::new(0, 0, 10, 10)).with_id("inner");
        let tree = screen_tree(vec![UiNode::new("Button", PixelBounds::new(0, 0, 50, 50))
            .with_id("btn")
            .with_children(vec![inner])]);
        let doc = map_tree(&tree);
        let ids: Vec<_> = doc.roots[0].children.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["btn", "inner"]);
    }

    #[test]
    fn escapes_markup_in_text() {
        let tree = screen_tree(vec![UiNode::new("TextView", PixelBounds::new(0, 0, 10, 10))
            .with_id("t")
            .with_text("a < b & \"c\"")]);
        assert!(emit_dsl(&tree).contains("<p class=t>a &lt; b &amp; \"c\"</p>"));
    }
}
