//! Rico view-hierarchy ingestion.
//!
//! A Rico screen is a JSON document whose root node carries `class`,
//! `bounds` (`[left, top, right, bottom]` in screen pixels) and optional
//! `text`, `resource-id`, `content-desc`, `visible-to-user` and `children`.
//! Real dumps wrap the root as `{"activity": {"root": {...}}}`; bare root
//! objects and `{"root": {...}}` are accepted as well.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Screen size of the Rico capture device.
pub const RICO_SCREEN: (u32, u32) = (1440, 2560);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("malformed view hierarchy: {0}")]
    MalformedInput(String),
}

fn malformed(msg: impl Into<String>) -> IngestError {
    IngestError::MalformedInput(msg.into())
}

/// Integer screen-pixel bounds, edges inclusive-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelBounds {
    pub left: i64,
    pub top: i64,
    pub right: i64,
    pub bottom: i64,
}

impl PixelBounds {
    pub fn new(left: i64, top: i64, right: i64, bottom: i64) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    pub fn width(&self) -> i64 {
        self.right - self.left
    }

    pub fn height(&self) -> i64 {
        self.bottom - self.top
    }

    pub fn is_empty(&self) -> bool {
        self.width() <= 0 || self.height() <= 0
    }

    /// Clamp into `[0, width] x [0, height]`. Inverted edges collapse to
    /// zero size.
    pub fn clamp_to(&self, width: u32, height: u32) -> Self {
        let (w, h) = (i64::from(width), i64::from(height));
        let left = self.left.clamp(0, w);
        let top = self.top.clamp(0, h);
        let right = self.right.clamp(left, w);
        let bottom = self.bottom.clamp(top, h);
        Self::new(left, top, right, bottom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiNode {
    pub native_class: String,
    pub resource_id: Option<String>,
    pub text: Option<String>,
    pub content_desc: Option<String>,
    pub bounds: PixelBounds,
    pub clickable: bool,
    pub visible: bool,
    pub children: Vec<UiNode>,
}

impl UiNode {
    pub fn new(native_class: impl Into<String>, bounds: PixelBounds) -> Self {
        Self {
            native_class: native_class.into(),
            resource_id: None,
            text: None,
            content_desc: None,
            bounds,
            clickable: false,
            visible: true,
            children: Vec::new(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.resource_id = Some(id.into());
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_content_desc(mut self, desc: impl Into<String>) -> Self {
        self.content_desc = Some(desc.into());
        self
    }

    pub fn with_children(mut self, children: Vec<UiNode>) -> Self {
        self.children = children;
        self
    }

    /// Number of nodes in this subtree, including `self`.
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(UiNode::count).sum::<usize>()
    }

    /// Depth-first preorder walk.
    pub fn preorder(&self) -> Vec<&UiNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children.iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiTree {
    pub root: UiNode,
    pub screen_width: u32,
    pub screen_height: u32,
    pub app_id: String,
    pub category: String,
    /// Human-written screen summary, when one is paired with the screen.
    pub description: Option<String>,
}

impl UiTree {
    pub fn new(root: UiNode, screen: (u32, u32)) -> Self {
        Self {
            root,
            screen_width: screen.0,
            screen_height: screen.1,
            app_id: String::new(),
            category: String::new(),
            description: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }
}

/// Parse one Rico view-hierarchy document.
pub fn parse_hierarchy(raw: &str, screen: (u32, u32)) -> Result<UiTree, IngestError> {
    if screen.0 == 0 || screen.1 == 0 {
        return Err(malformed("screen dimensions must be positive"));
    }
    let value: Value = serde_json::from_str(raw).map_err(|e| malformed(format!("not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("top level is not an object"))?;

    let root_value = obj
        .get("activity")
        .and_then(|a| a.get("root"))
        .or_else(|| obj.get("root"))
        .or_else(|| obj.contains_key("class").then_some(&value))
        .ok_or_else(|| malformed("no root node"))?;

    let root = parse_node(root_value)?;
    let mut tree = UiTree::new(root, screen);
    if let Some(activity) = obj.get("activity_name").and_then(Value::as_str) {
        tree.app_id = activity.split('/').next().unwrap_or_default().to_string();
    }
    Ok(tree)
}

fn parse_node(value: &Value) -> Result<UiNode, IngestError> {
    let obj = value.as_object().ok_or_else(|| malformed("node is not an object"))?;
    let native_class = obj
        .get("class")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("node without class"))?
        .to_string();
    let bounds = parse_bounds(obj.get("bounds"))?;

    let visible = obj.get("visible-to-user").and_then(Value::as_bool).unwrap_or(true)
        && !matches!(
            obj.get("visibility").and_then(Value::as_str),
            Some("gone" | "invisible")
        );

    let mut children = Vec::new();
    if let Some(list) = obj.get("children").and_then(Value::as_array) {
        for child in list {
            // Rico dumps occasionally contain null slots in child lists.
            if child.is_null() {
                continue;
            }
            children.push(parse_node(child)?);
        }
    }

    Ok(UiNode {
        native_class,
        resource_id: string_field(obj.get("resource-id")).map(|id| short_resource_id(&id)),
        text: string_field(obj.get("text")),
        content_desc: string_field(obj.get("content-desc")).or_else(|| {
            // Some dumps store content-desc as a one-element array.
            obj.get("content-desc")
                .and_then(Value::as_array)
                .and_then(|a| a.first())
                .and_then(|v| string_field(Some(v)))
        }),
        bounds,
        clickable: obj.get("clickable").and_then(Value::as_bool).unwrap_or(false),
        visible,
        children,
    })
}

fn parse_bounds(value: Option<&Value>) -> Result<PixelBounds, IngestError> {
    let arr = value
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("bounds missing"))?;
    if arr.len() != 4 {
        return Err(malformed(format!("bounds has {} entries", arr.len())));
    }
    let mut edges = [0i64; 4];
    for (slot, v) in edges.iter_mut().zip(arr) {
        *slot = v
            .as_i64()
            .ok_or_else(|| malformed(format!("bounds entry {v} is not an integer")))?;
    }
    let [l, t, r, b] = edges;
    Ok(PixelBounds::new(l, t, r.max(l), b.max(t)))
}

/// Whitespace-collapsed, non-empty string value.
fn string_field(value: Option<&Value>) -> Option<String> {
    let s = value?.as_str()?;
    let collapsed = collapse_whitespace(s);
    (!collapsed.is_empty()).then_some(collapsed)
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `com.app:id/login_button` -> `login_button`.
fn short_resource_id(id: &str) -> String {
    id.rsplit('/').next().unwrap_or(id).to_string()
}

/// Restrict an id to characters usable as a bare CSS class name.
fn sanitize_id(id: &str) -> String {
    let mut out: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
        out.insert(0, '_');
    }
    out
}

/// Drop invisible subtrees, clamp to the screen, splice out zero-area
/// nodes, tidy text and assign unique ids. The root is always kept.
pub fn normalize(tree: &UiTree) -> UiTree {
    let (w, h) = (tree.screen_width, tree.screen_height);

    let mut root = tree.root.clone();
    root.bounds = root.bounds.clamp_to(w, h);
    root.visible = true;
    root.children = prune(&tree.root.children, w, h);

    let mut seen = HashSet::new();
    let mut counter = 0usize;
    assign_ids(&mut root, &mut seen, &mut counter);
    tidy_text(&mut root);

    UiTree { root, ..tree.clone() }
}

fn prune(children: &[UiNode], w: u32, h: u32) -> Vec<UiNode> {
    let mut out = Vec::new();
    for child in children {
        if !child.visible {
            continue;
        }
        let bounds = child.bounds.clamp_to(w, h);
        let kept = prune(&child.children, w, h);
        if bounds.is_empty() {
            // zero-area wrapper: its visible descendants take its place
            out.extend(kept);
        } else {
            out.push(UiNode {
                bounds,
                children: kept,
                ..child.clone()
            });
        }
    }
    out
}

fn assign_ids(node: &mut UiNode, seen: &mut HashSet<String>, counter: &mut usize) {
    let base = match node.resource_id.as_deref().map(sanitize_id) {
        Some(id) if !id.is_empty() => id,
        _ => format!("el{counter}"),
    };
    *counter += 1;
    let id = unique_id(&base, seen);
    seen.insert(id.clone());
    node.resource_id = Some(id);
    for child in &mut node.children {
        assign_ids(child, seen, counter);
    }
}

/// Collapse whitespace in text fields; blank ones become absent.
fn tidy_text(node: &mut UiNode) {
    for field in [&mut node.text, &mut node.content_desc] {
        *field = field.as_deref().map(collapse_whitespace).filter(|t| !t.is_empty());
    }
    for child in &mut node.children {
        tidy_text(child);
    }
}

/// First of `base`, `base_2`, `base_3`, ... not already taken.
pub(crate) fn unique_id(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|candidate| !taken.contains(candidate))
        .expect("unbounded suffix search")
}
