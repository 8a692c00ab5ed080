//! Tolerant reader for generated wireframe markup.
//!
//! Generated text is frequently truncated or slightly off-grammar, so the
//! reader never rejects structure: unclosed tags close at their parent's
//! boundary, stray closers are ignored, unknown tags become containers and
//! elements without a style rule get a default box. Only text with no
//! recognizable element at all is an error.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{Rect, Tag, WireframeDocument, WireframeElement, STOP_SEQUENCE};
use crate::beautify::typography::{self, Alignment, TypographyPlan};
use crate::hierarchy::{collapse_whitespace, unique_id, RICO_SCREEN};
use crate::IconId;

/// Height given to elements that have no style rule.
pub const DEFAULT_ELEMENT_HEIGHT: u32 = 48;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("no recognizable wireframe element in input")]
    Unparseable,
}

const VOID: &[&str] = &["input", "img", "br", "meta", "link", "hr", "source", "wbr"];
const RAW_TEXT: &[&str] = &["style", "script", "title", "textarea"];
const TRANSPARENT: &[&str] = &["html", "body", "head"];
const SKIPPED: &[&str] = &["style", "script", "title", "meta", "link", "br", "hr", "option"];
const TEXTUAL: &[&str] = &[
    "p", "h1", "h2", "h3", "h4", "h5", "h6", "span", "a", "label", "strong", "b", "em", "i", "small", "u", "font",
    "text",
];
const INLINE: &[&str] = &[
    "span", "a", "strong", "b", "em", "i", "small", "u", "font", "br", "sup", "sub", "mark",
];

// ---------------------------------------------------------------------------
// Lexing and tree building

#[derive(Debug)]
enum Token {
    Start {
        name: String,
        attrs: Vec<(String, String)>,
        self_closing: bool,
    },
    End(String),
    Text(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn tokens(mut self) -> Vec<Token> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let rest = self.rest();
            if let Some(after) = rest.strip_prefix("<!--") {
                self.pos += 4 + after.find("-->").map_or(after.len(), |i| i + 3);
            } else if rest.starts_with("<!") || rest.starts_with("<?") {
                self.pos += rest.find('>').map_or(rest.len(), |i| i + 1);
            } else if let Some(after) = rest.strip_prefix("</") {
                let len = after.find('>').map_or(after.len(), |i| i + 1);
                // attributes on a closing tag are junk; keep the name only
                let name = after[..len]
                    .trim_end_matches('>')
                    .split(|c: char| c.is_whitespace() || c == '/')
                    .find(|s| !s.is_empty())
                    .unwrap_or_default()
                    .to_ascii_lowercase();
                self.pos += 2 + len;
                if !name.is_empty() {
                    out.push(Token::End(name));
                }
            } else if rest.starts_with('<') && rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
                let token = self.start_tag();
                if let Token::Start {
                    name,
                    self_closing: false,
                    ..
                } = &token
                {
                    if RAW_TEXT.contains(&name.as_str()) {
                        let name = name.clone();
                        out.push(token);
                        out.push(Token::Text(self.raw_text(&name)));
                        out.push(Token::End(name));
                        continue;
                    }
                }
                out.push(token);
            } else {
                // Text runs to the next plausible tag opener.
                let first = rest.chars().next().map_or(1, char::len_utf8);
                let next = rest[first..].find('<').map_or(rest.len(), |i| i + first);
                out.push(Token::Text(rest[..next].to_string()));
                self.pos += next;
            }
        }
        out
    }

    fn start_tag(&mut self) -> Token {
        self.pos += 1;
        let name = self.take_while(|c| !c.is_whitespace() && c != '>' && c != '/');
        let name = name.to_ascii_lowercase();
        let mut attrs = Vec::new();
        let mut self_closing = false;
        loop {
            self.skip_whitespace();
            let rest = self.rest();
            if rest.is_empty() {
                break;
            }
            if rest.starts_with('>') {
                self.pos += 1;
                break;
            }
            if rest.starts_with("/>") {
                self.pos += 2;
                self_closing = true;
                break;
            }
            if rest.starts_with('<') {
                // unterminated tag running into the next one
                break;
            }
            if rest.starts_with('/') {
                self.pos += 1;
                continue;
            }
            let attr = self.take_while(|c| !c.is_whitespace() && c != '=' && c != '>' && c != '/');
            if attr.is_empty() {
                self.pos += rest.chars().next().map_or(1, char::len_utf8);
                continue;
            }
            self.skip_whitespace();
            let value = if self.rest().starts_with('=') {
                self.pos += 1;
                self.skip_whitespace();
                self.attr_value()
            } else {
                String::new()
            };
            attrs.push((attr.to_ascii_lowercase(), decode_entities(&value)));
        }
        Token::Start {
            name,
            attrs,
            self_closing,
        }
    }

    fn attr_value(&mut self) -> String {
        let rest = self.rest();
        match rest.chars().next() {
            Some(q @ ('"' | '\'')) => {
                let body = &rest[1..];
                let end = body.find(q).unwrap_or(body.len());
                self.pos += 1 + end + usize::from(end < body.len());
                body[..end].to_string()
            }
            _ => self
                .take_while(|c| !c.is_whitespace() && c != '>')
                .trim_end_matches('/')
                .to_string(),
        }
    }

    fn raw_text(&mut self, name: &str) -> String {
        let rest = self.rest();
        let closer = format!("</{name}");
        let end = rest.to_ascii_lowercase().find(&closer).unwrap_or(rest.len());
        let text = rest[..end].to_string();
        self.pos += end;
        if self.pos < self.src.len() {
            let rest = self.rest();
            self.pos += rest.find('>').map_or(rest.len(), |i| i + 1);
        }
        text
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let len = rest.find(|c: char| !pred(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn skip_whitespace(&mut self) {
        self.take_while(char::is_whitespace);
    }
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let semi = rest[1..].find(';').map(|i| i + 1).filter(|&i| i <= 10);
        let decoded = semi.and_then(|i| {
            let entity = &rest[1..i];
            let c = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ => entity
                    .strip_prefix("#x")
                    .or_else(|| entity.strip_prefix("#X"))
                    .and_then(|h| u32::from_str_radix(h, 16).ok())
                    .or_else(|| entity.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            }?;
            Some((c, i + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[derive(Debug, Default)]
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Child>,
}

#[derive(Debug)]
enum Child {
    Node(Node),
    Text(String),
}

impl Node {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn nonempty_attr(&self, name: &str) -> Option<&str> {
        self.attr(name).filter(|v| !v.trim().is_empty())
    }
}

fn build_tree(tokens: Vec<Token>) -> Node {
    let mut stack = vec![Node {
        name: "#document".into(),
        ..Node::default()
    }];
    for token in tokens {
        match token {
            Token::Start {
                name,
                attrs,
                self_closing,
            } => {
                let node = Node {
                    name,
                    attrs,
                    children: Vec::new(),
                };
                if self_closing || VOID.contains(&node.name.as_str()) {
                    stack.last_mut().unwrap().children.push(Child::Node(node));
                } else {
                    stack.push(node);
                }
            }
            Token::End(name) => {
                if name == "html" {
                    break;
                }
                if let Some(depth) = stack.iter().rposition(|n| n.name == name) {
                    if depth == 0 {
                        continue;
                    }
                    while stack.len() > depth {
                        let node = stack.pop().unwrap();
                        stack.last_mut().unwrap().children.push(Child::Node(node));
                    }
                }
            }
            Token::Text(text) => {
                if let Some(top) = stack.last_mut() {
                    top.children.push(Child::Text(decode_entities(&text)));
                }
            }
        }
    }
    while stack.len() > 1 {
        let node = stack.pop().unwrap();
        stack.last_mut().unwrap().children.push(Child::Node(node));
    }
    stack.pop().unwrap()
}

// ---------------------------------------------------------------------------
// Style sheet

#[derive(Debug, Default, Clone)]
struct Props {
    top: Option<i64>,
    left: Option<i64>,
    width: Option<i64>,
    height: Option<i64>,
    font_px: Option<i64>,
    align: Option<Alignment>,
}

impl Props {
    fn or(self, other: &Props) -> Props {
        Props {
            top: self.top.or(other.top),
            left: self.left.or(other.left),
            width: self.width.or(other.width),
            height: self.height.or(other.height),
            font_px: self.font_px.or(other.font_px),
            align: self.align.or(other.align),
        }
    }
}

fn parse_declarations(decls: &str) -> Props {
    let mut props = Props::default();
    for decl in decls.split(';') {
        let Some((name, value)) = decl.split_once(':') else {
            continue;
        };
        let value = value.trim().trim_end_matches("!important").trim();
        let px = || parse_px(value);
        match name.trim().to_ascii_lowercase().as_str() {
            "top" => props.top = px(),
            "left" => props.left = px(),
            "width" => props.width = px(),
            "height" => props.height = px(),
            "font-size" => props.font_px = px(),
            "text-align" => {
                props.align = match value.to_ascii_lowercase().as_str() {
                    "left" | "start" => Some(Alignment::Left),
                    "center" => Some(Alignment::Center),
                    "right" | "end" => Some(Alignment::Right),
                    _ => None,
                }
            }
            _ => {}
        }
    }
    props
}

fn parse_px(value: &str) -> Option<i64> {
    let number = value.strip_suffix("px").unwrap_or(value).trim();
    let v: f64 = number.parse().ok()?;
    v.is_finite().then(|| v.round() as i64)
}

#[derive(Debug, Default)]
struct StyleSheet {
    rules: HashMap<String, Props>,
    screen: Props,
}

fn parse_style(css: &str) -> StyleSheet {
    let mut sheet = StyleSheet::default();
    let css = strip_css_comments(css);
    for block in css.split('}') {
        let Some((selectors, decls)) = block.split_once('{') else {
            continue;
        };
        let props = parse_declarations(decls);
        for selector in selectors.split(',') {
            let selector = selector.trim();
            let lower = selector.to_ascii_lowercase();
            if matches!(lower.as_str(), "body" | "html" | ":root" | "html, body") {
                sheet.screen = props.clone().or(&sheet.screen);
                continue;
            }
            let last = selector.split_whitespace().last().unwrap_or_default();
            if let Some(pos) = last.rfind(['.', '#']) {
                let name = &last[pos + 1..];
                if !name.is_empty() {
                    let merged = props.clone().or(sheet.rules.get(name).unwrap_or(&Props::default()));
                    sheet.rules.insert(name.to_string(), merged);
                }
            }
        }
    }
    sheet
}

fn strip_css_comments(css: &str) -> String {
    let mut out = String::with_capacity(css.len());
    let mut rest = css;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        rest = rest[start + 2..]
            .find("*/")
            .map_or("", |end| &rest[start + 2 + end + 2..]);
    }
    out.push_str(rest);
    out
}

fn collect_style(node: &Node, css: &mut String) {
    for child in &node.children {
        if let Child::Node(n) = child {
            if n.name == "style" {
                for c in &n.children {
                    if let Child::Text(t) = c {
                        css.push_str(t);
                        css.push('\n');
                    }
                }
            } else {
                collect_style(n, css);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Interpretation

#[derive(Debug)]
struct Proto {
    tag: Tag,
    source_id: Option<String>,
    lines: Vec<String>,
    alt: Option<String>,
    icon: Option<IconId>,
    inline: Props,
    parent: Option<usize>,
    wants_label: bool,
}

struct Builder {
    protos: Vec<Proto>,
}

impl Builder {
    fn push(&mut self, proto: Proto) -> usize {
        self.protos.push(proto);
        self.protos.len() - 1
    }

    fn walk_children(&mut self, node: &Node, parent: Option<usize>) {
        for child in &node.children {
            if let Child::Node(n) = child {
                self.walk(n, parent);
            }
        }
    }

    fn walk(&mut self, node: &Node, parent: Option<usize>) {
        let name = node.name.as_str();
        if TRANSPARENT.contains(&name) {
            return self.walk_children(node, parent);
        }
        if SKIPPED.contains(&name) {
            return;
        }
        match name {
            "img" => {
                self.leaf(node, Tag::Image, parent, Vec::new());
            }
            "video" => {
                self.leaf(node, Tag::Video, parent, Vec::new());
            }
            "input" => self.input(node, parent),
            "textarea" => {
                let mut lines = attr_lines(node.nonempty_attr("placeholder"));
                if lines.is_empty() {
                    lines = text_lines(node).0;
                }
                self.leaf(node, Tag::TextInput, parent, lines);
            }
            "select" => {
                let idx = self.leaf(node, Tag::Select, parent, Vec::new());
                // Fallback label: the first option, replaced by a real label if one follows.
                if let Some(option) = node.children.iter().find_map(|c| match c {
                    Child::Node(n) if n.name == "option" => Some(n),
                    _ => None,
                }) {
                    let lines = text_lines(option).0;
                    if !lines.is_empty() {
                        self.protos[idx].lines = lines;
                    }
                }
            }
            "label" => self.label(node, parent),
            "button" => {
                let (lines, nested) = text_lines(node);
                self.leaf(node, Tag::Button, parent, lines);
                for n in nested {
                    self.walk(n, parent);
                }
            }
            _ if TEXTUAL.contains(&name) => {
                let (lines, nested) = text_lines(node);
                self.leaf(node, Tag::Paragraph, parent, lines);
                for n in nested {
                    self.walk(n, parent);
                }
            }
            _ => {
                let idx = self.leaf(node, Tag::Container, parent, Vec::new());
                self.walk_children(node, Some(idx));
            }
        }
    }

    fn leaf(&mut self, node: &Node, tag: Tag, parent: Option<usize>, lines: Vec<String>) -> usize {
        let source_id = node
            .nonempty_attr("class")
            .and_then(|c| c.split_whitespace().next())
            .or_else(|| node.nonempty_attr("id"))
            .map(str::to_string);
        let alt = if tag.carries_alt() {
            node.nonempty_attr("alt")
                .or_else(|| node.nonempty_attr("aria-label"))
                .or_else(|| node.nonempty_attr("title"))
                .map(collapse_whitespace)
        } else {
            None
        };
        let icon = node
            .attr("data-icon")
            .and_then(|v| v.trim().parse::<u8>().ok())
            .and_then(IconId::new);
        let inline = node.attr("style").map(parse_declarations).unwrap_or_default();
        let wants_label = matches!(tag, Tag::Checkbox | Tag::Radio | Tag::Select | Tag::DatePicker);
        self.push(Proto {
            tag,
            source_id,
            lines: if tag.carries_text() { lines } else { Vec::new() },
            alt,
            icon,
            inline,
            parent,
            wants_label,
        })
    }

    fn input(&mut self, node: &Node, parent: Option<usize>) {
        let kind = node.attr("type").unwrap_or("text").trim().to_ascii_lowercase();
        let (tag, lines) = match kind.as_str() {
            "checkbox" | "switch" => (Tag::Checkbox, attr_lines(node.nonempty_attr("value"))),
            "radio" => (Tag::Radio, attr_lines(node.nonempty_attr("value"))),
            "date" | "datetime-local" | "time" | "month" | "week" => {
                (Tag::DatePicker, attr_lines(node.nonempty_attr("value")))
            }
            "submit" | "button" | "reset" => (Tag::Button, attr_lines(node.nonempty_attr("value"))),
            "image" => (Tag::Image, Vec::new()),
            _ => {
                let lines = attr_lines(node.nonempty_attr("placeholder"));
                let lines = if lines.is_empty() {
                    attr_lines(node.nonempty_attr("value"))
                } else {
                    lines
                };
                (Tag::TextInput, lines)
            }
        };
        let idx = self.leaf(node, tag, parent, lines);
        if !self.protos[idx].lines.is_empty() {
            self.protos[idx].wants_label = false;
        }
    }

    fn label(&mut self, node: &Node, parent: Option<usize>) {
        let (lines, nested) = text_lines(node);
        let first_new = self.protos.len();
        // `<label><input type=checkbox> text</label>` labels its own input.
        for n in nested {
            self.walk(n, parent);
        }
        let target = match node.nonempty_attr("for") {
            Some(target) => self
                .protos
                .iter()
                .rposition(|p| p.wants_label && p.source_id.as_deref() == Some(target.trim())),
            None => (first_new..self.protos.len())
                .find(|&i| self.protos[i].wants_label)
                .or_else(|| {
                    self.protos
                        .last()
                        .filter(|p| p.wants_label && first_new == self.protos.len())
                        .map(|_| self.protos.len() - 1)
                }),
        };
        match target {
            Some(i) => {
                self.protos[i].lines = lines;
                self.protos[i].wants_label = false;
            }
            None if !lines.is_empty() || node.attr("for").is_none() => {
                self.leaf(node, Tag::Paragraph, parent, lines);
            }
            // an empty label pointing at nothing carries no information
            None => {}
        }
    }
}

fn attr_lines(value: Option<&str>) -> Vec<String> {
    value
        .map(|v| {
            v.split('\n')
                .map(collapse_whitespace)
                .filter(|l| !l.is_empty())
                .collect()
        })
        .unwrap_or_default()
}

/// Inline text of a node split at `<br>`, plus nested non-inline elements
/// to be hoisted as following siblings.
fn text_lines(node: &Node) -> (Vec<String>, Vec<&Node>) {
    fn walk<'n>(node: &'n Node, lines: &mut Vec<String>, nested: &mut Vec<&'n Node>) {
        for child in &node.children {
            match child {
                Child::Text(t) => lines.last_mut().unwrap().push_str(t),
                Child::Node(n) if n.name == "br" => lines.push(String::new()),
                Child::Node(n) if INLINE.contains(&n.name.as_str()) && n.attr("class").is_none() => {
                    walk(n, lines, nested)
                }
                Child::Node(n) if SKIPPED.contains(&n.name.as_str()) => {}
                Child::Node(n) => {
                    // separate words on either side of a hoisted element
                    lines.last_mut().unwrap().push(' ');
                    nested.push(n);
                }
            }
        }
    }
    let mut lines = vec![String::new()];
    let mut nested = Vec::new();
    walk(node, &mut lines, &mut nested);
    let lines = lines
        .iter()
        .map(|l| collapse_whitespace(l))
        .filter(|l| !l.is_empty())
        .collect();
    (lines, nested)
}

/// Parse generated wireframe text. Anything after the first `</html>` is
/// ignored.
pub fn parse_dsl(raw: &str) -> Result<WireframeDocument, ParseError> {
    let raw = match raw.find(STOP_SEQUENCE) {
        Some(end) => &raw[..end + STOP_SEQUENCE.len()],
        None => raw,
    };
    let dom = build_tree(Lexer::new(raw).tokens());

    let mut css = String::new();
    collect_style(&dom, &mut css);
    let sheet = parse_style(&css);

    let mut builder = Builder { protos: Vec::new() };
    builder.walk_children(&dom, None);
    if builder.protos.is_empty() {
        return Err(ParseError::Unparseable);
    }

    let screen_width = positive(sheet.screen.width).unwrap_or(RICO_SCREEN.0);
    let screen_height = positive(sheet.screen.height).unwrap_or(RICO_SCREEN.1);

    let mut taken = HashSet::new();
    let mut elements: Vec<Option<WireframeElement>> = Vec::with_capacity(builder.protos.len());
    for (index, proto) in builder.protos.iter().enumerate() {
        let base = proto
            .source_id
            .as_deref()
            .map(sanitize_class)
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| format!("el{index}"));
        let id = unique_id(&base, &taken);
        taken.insert(id.clone());

        let props = match proto.source_id.as_deref().and_then(|s| sheet.rules.get(s)) {
            Some(rule) => rule.clone().or(&proto.inline),
            None => proto.inline.clone(),
        };
        let bbox = Rect::new(
            clamp_i32(props.left.unwrap_or(0)),
            clamp_i32(props.top.unwrap_or(0)),
            clamp_u32(props.width.unwrap_or(i64::from(screen_width))),
            clamp_u32(props.height.unwrap_or(i64::from(DEFAULT_ELEMENT_HEIGHT))),
        );

        let mut el = WireframeElement::new(id, proto.tag, bbox);
        el.alt_text = proto.alt.clone();
        el.icon = proto.icon;
        if !proto.lines.is_empty() {
            el.text = Some(proto.lines.join(" "));
        }
        if let Some(font_px) = props.font_px.filter(|&px| px > 0) {
            if !proto.lines.is_empty() {
                el.typography = Some(restore_plan(&proto.lines, clamp_u32(font_px), props.align, bbox));
            }
        }
        elements.push(Some(el));
    }

    // Attach children bottom-up; protos are in preorder so parents precede
    // children and a reverse pass keeps sibling order.
    for index in (0..builder.protos.len()).rev() {
        if let Some(parent) = builder.protos[index].parent {
            let child = elements[index].take().expect("child visited once");
            elements[parent]
                .as_mut()
                .expect("parent precedes child")
                .children
                .insert(0, child);
        }
    }
    let roots = elements.into_iter().flatten().collect();
    Ok(WireframeDocument::new(screen_width, screen_height, roots))
}

fn restore_plan(lines: &[String], font_px: u32, align: Option<Alignment>, bbox: Rect) -> TypographyPlan {
    let alignment = align.unwrap_or(if lines.len() == 1 {
        Alignment::Center
    } else {
        Alignment::Left
    });
    let metrics = typography::measure(lines, font_px, bbox);
    TypographyPlan {
        lines: lines.to_vec(),
        font_px,
        alignment,
        occupied_ratio: metrics.ratio(),
        fits: metrics.fits(),
    }
}

fn sanitize_class(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn positive(v: Option<i64>) -> Option<u32> {
    v.filter(|&v| v > 0).map(clamp_u32)
}

fn clamp_i32(v: i64) -> i32 {
    v.clamp(i64::from(i32::MIN), i64::from(i32::MAX)) as i32
}

fn clamp_u32(v: i64) -> u32 {
    v.clamp(0, i64::from(u32::MAX)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{emit_dsl, map_tree, serialize, validate, FontClass};
    use crate::hierarchy::normalize;
    use crate::synth;
    use proptest::prelude::*;

    #[test]
    fn missing_closers_and_style() {
        let doc = parse_dsl("<html><body><p class=a>Hi</p>").unwrap();
        assert_eq!(doc.roots.len(), 1);
        let p = &doc.roots[0];
        assert_eq!(p.tag, Tag::Paragraph);
        assert_eq!(p.text.as_deref(), Some("Hi"));
        assert_eq!(p.bbox, Rect::new(0, 0, 1440, DEFAULT_ELEMENT_HEIGHT));
    }

    #[test]
    fn empty_and_textless_inputs_are_unparseable() {
        assert_eq!(parse_dsl(""), Err(ParseError::Unparseable));
        assert_eq!(parse_dsl("just some words"), Err(ParseError::Unparseable));
        assert_eq!(
            parse_dsl("<html><style>.a { top:1px; }</style><body></body></html>"),
            Err(ParseError::Unparseable)
        );
    }

    #[test]
    fn unclosed_div_closes_at_parent_boundary() {
        let doc = parse_dsl(
            "<body><div class=outer><div class=inner><p class=t>x</p></div class=junk>\
             <button class=b>Go</button></body>",
        )
        .unwrap();
        assert_eq!(doc.roots.len(), 1);
        let outer = &doc.roots[0];
        assert_eq!(outer.children.len(), 2);
        assert_eq!(outer.children[0].id, "inner");
        assert_eq!(outer.children[1].tag, Tag::Button);
    }

    #[test]
    fn stray_closers_are_ignored() {
        let doc = parse_dsl("</div></p><p class=a>x</p></span>").unwrap();
        assert_eq!(doc.len(), 1);
    }

    #[test]
    fn unknown_tags_become_containers() {
        let doc = parse_dsl("<nav class=bar><marquee class=m></marquee></nav>").unwrap();
        assert_eq!(doc.roots[0].tag, Tag::Container);
        assert_eq!(doc.roots[0].children[0].tag, Tag::Container);
    }

    #[test]
    fn duplicate_ids_get_suffixes() {
        let doc = parse_dsl("<p class=a>1</p><p class=a>2</p><p class=a>3</p><p class=a_2>4</p>").unwrap();
        let ids: Vec<_> = doc.elements().iter().map(|e| e.id.clone()).collect();
        assert_eq!(ids, ["a", "a_2", "a_3", "a_2_2"]);
    }

    #[test]
    fn style_rules_and_inline_fallback() {
        let doc = parse_dsl(
            "<html><style>body { width:400px; height:800px; }\n\
             .a { position:absolute; top:10px; left:20px; width:30px; height:40px; }\n\
             /* comment */ p.b, #c { top: 5.6px; }</style>\
             <body><p class=a>x</p><p class=b>y</p><p id=c>z</p>\
             <p class=d style=\"top:1px; left:2px; width:3px; height:4px\">w</p></body></html>",
        )
        .unwrap();
        assert_eq!((doc.screen_width, doc.screen_height), (400, 800));
        let boxes: Vec<_> = doc.elements().iter().map(|e| e.bbox).collect();
        assert_eq!(boxes[0], Rect::new(20, 10, 30, 40));
        assert_eq!(boxes[1], Rect::new(0, 6, 400, DEFAULT_ELEMENT_HEIGHT));
        assert_eq!(boxes[2], Rect::new(0, 6, 400, DEFAULT_ELEMENT_HEIGHT));
        assert_eq!(boxes[3], Rect::new(2, 1, 3, 4));
    }

    #[test]
    fn labels_attach_to_their_inputs() {
        let doc = parse_dsl(
            "<input class=c type=\"checkbox\"><label for=c>Remember me</label>\
             <select class=s type=\"radio\"><option>One</option></select><label for=s>Size</label>\
             <label><input class=r type=radio> Wrapped</label>\
             <label for=nothing>Loose</label>",
        )
        .unwrap();
        let els = doc.elements();
        assert_eq!(els[0].tag, Tag::Checkbox);
        assert_eq!(els[0].text.as_deref(), Some("Remember me"));
        assert_eq!(els[1].tag, Tag::Select);
        assert_eq!(els[1].text.as_deref(), Some("Size"));
        assert_eq!(els[2].tag, Tag::Radio);
        assert_eq!(els[2].text.as_deref(), Some("Wrapped"));
        assert_eq!(els[3].tag, Tag::Paragraph);
        assert_eq!(els[3].text.as_deref(), Some("Loose"));
    }

    #[test]
    fn entities_and_inline_markup() {
        let doc = parse_dsl("<p class=t>Fish &amp; <b>chips</b>&#33;</p>").unwrap();
        assert_eq!(doc.roots[0].text.as_deref(), Some("Fish & chips!"));
    }

    #[test]
    fn nested_widgets_are_hoisted() {
        let doc = parse_dsl("<button class=b><img class=i alt=\"more options\"> More</button>").unwrap();
        let els = doc.elements();
        assert_eq!(els.len(), 2);
        assert_eq!(els[0].text.as_deref(), Some("More"));
        assert_eq!(els[1].tag, Tag::Image);
        assert_eq!(els[1].alt_text.as_deref(), Some("more options"));
    }

    #[test]
    fn text_after_stop_sequence_is_ignored() {
        let doc = parse_dsl("<p class=a>x</p></html><p class=b>y</p>").unwrap();
        assert_eq!(doc.len(), 1);
    }

    #[test]
    fn font_class_from_id() {
        let doc = parse_dsl("<p class=page_title>a</p><p class=subtitle>b</p><p class=body>c</p>").unwrap();
        let classes: Vec<_> = doc.elements().iter().map(|e| e.font_class).collect();
        assert_eq!(classes, [FontClass::Title, FontClass::Subtitle, FontClass::Normal]);
    }

    #[test]
    fn unterminated_tag_at_eof() {
        let doc = parse_dsl("<p class=a>x</p><img class=b alt=\"cut").unwrap();
        assert_eq!(doc.len(), 2);
        assert_eq!(doc.elements()[1].alt_text.as_deref(), Some("cut"));
    }

    #[test]
    fn typography_survives_serialization() {
        let mut doc = parse_dsl(
            "<style>.t { top:0px; left:0px; width:200px; height:100px; }</style><p class=t>one two three</p>",
        )
        .unwrap();
        let plan = typography::optimize_typography("one two three", FontClass::Normal, doc.roots[0].bbox).unwrap();
        doc.roots[0].typography = Some(plan.clone());
        let back = parse_dsl(&serialize(&doc)).unwrap();
        assert_eq!(back.roots[0].typography.as_ref(), Some(&plan));
        assert_eq!(back, doc);
    }

    proptest! {
        #[test]
        fn round_trip_matches_mapped_tree(seed in any::<u64>()) {
            let tree = normalize(&synth::random_raw_tree(seed, 50));
            let parsed = parse_dsl(&emit_dsl(&tree)).unwrap();
            prop_assert_eq!(parsed, map_tree(&tree));
        }

        #[test]
        fn parser_output_is_always_valid(text in ".{0,400}") {
            if let Ok(doc) = parse_dsl(&text) {
                prop_assert!(validate(&doc).is_empty());
            }
        }

        #[test]
        fn mangled_documents_stay_valid(seed in any::<u64>(), cut in 0usize..4000) {
            let dsl = emit_dsl(&normalize(&synth::random_raw_tree(seed, 30)));
            let mut end = cut.min(dsl.len());
            while !dsl.is_char_boundary(end) {
                end -= 1;
            }
            if let Ok(doc) = parse_dsl(&dsl[..end]) {
                prop_assert!(validate(&doc).is_empty());
            }
        }
    }
}
