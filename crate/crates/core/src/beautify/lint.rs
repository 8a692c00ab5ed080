//! Layout lint for generated wireframes and the matching repairs.
//!
//! Three flaw classes are detected:
//!
//! * occlusion: two leaf elements overlap with positive area and at least
//!   one of them carries text;
//! * duplication: two leaf elements share tag and (case/whitespace
//!   insensitive) content and their boxes have IoU at or above a threshold;
//! * out-of-bound: an element's box leaves the screen.
//!
//! Containers are layout frames and never occlude or duplicate; they are
//! still checked against the screen bounds.

use serde::{Deserialize, Serialize};

use crate::dsl::{Rect, Tag, WireframeDocument, WireframeElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LintKind {
    Occlusion,
    Duplication,
    OutOfBound,
}

impl LintKind {
    pub fn repair(self) -> Repair {
        match self {
            LintKind::Occlusion => Repair::AddMargin,
            LintKind::Duplication => Repair::RemoveDuplicate,
            LintKind::OutOfBound => Repair::TrimBounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repair {
    AddMargin,
    RemoveDuplicate,
    TrimBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub kind: LintKind,
    /// Affected elements in document order; for pairs the second one is
    /// the element the repair acts on.
    pub element_ids: Vec<String>,
    pub detail: String,
    pub repair: Repair,
}

impl LintFinding {
    fn new(kind: LintKind, element_ids: Vec<String>, detail: String) -> Self {
        Self {
            kind,
            element_ids,
            detail,
            repair: kind.repair(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LintConfig {
    pub duplicate_iou: f64,
    pub margin_px: u32,
    pub max_iterations: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        Self {
            duplicate_iou: 0.7,
            margin_px: 8,
            max_iterations: 10,
        }
    }
}

fn normalized_content(el: &WireframeElement) -> String {
    el.content()
        .unwrap_or_default()
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_duplicate(a: &WireframeElement, b: &WireframeElement, cfg: &LintConfig) -> bool {
    a.tag == b.tag && normalized_content(a) == normalized_content(b) && a.bbox.iou(&b.bbox) >= cfg.duplicate_iou
}

fn has_text(el: &WireframeElement) -> bool {
    el.text.as_deref().is_some_and(|t| !t.trim().is_empty())
}

pub fn lint(doc: &WireframeDocument, cfg: &LintConfig) -> Vec<LintFinding> {
    let elements = doc.elements();
    let leaves: Vec<(usize, &WireframeElement)> = elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.tag != Tag::Container)
        .map(|(i, e)| (i, *e))
        .collect();

    // (kind, first index, second index, finding)
    let mut found: Vec<(LintKind, usize, usize, LintFinding)> = Vec::new();

    let mut duplicate_of: Vec<Option<usize>> = vec![None; elements.len()];
    for (pos, &(j, b)) in leaves.iter().enumerate() {
        if let Some(&(i, a)) = leaves[..pos]
            .iter()
            .find(|(i, a)| duplicate_of[*i].is_none() && is_duplicate(a, b, cfg))
        {
            duplicate_of[j] = Some(i);
            found.push((
                LintKind::Duplication,
                i,
                j,
                LintFinding::new(
                    LintKind::Duplication,
                    vec![a.id.clone(), b.id.clone()],
                    format!("{} repeats {} (IoU {:.2})", b.id, a.id, a.bbox.iou(&b.bbox)),
                ),
            ));
        }
    }

    for (pos, &(i, a)) in leaves.iter().enumerate() {
        for &(j, b) in &leaves[pos + 1..] {
            if duplicate_of[j] == Some(i) || !(has_text(a) || has_text(b)) {
                continue;
            }
            let (w, h) = a.bbox.overlap(&b.bbox);
            if w > 0 && h > 0 {
                found.push((
                    LintKind::Occlusion,
                    i,
                    j,
                    LintFinding::new(
                        LintKind::Occlusion,
                        vec![a.id.clone(), b.id.clone()],
                        format!("{} overlaps {} by {w}x{h}px", b.id, a.id),
                    ),
                ));
            }
        }
    }

    for (i, el) in elements.iter().enumerate() {
        if !el.bbox.within(doc.screen_width, doc.screen_height) {
            let b = el.bbox;
            found.push((
                LintKind::OutOfBound,
                i,
                i,
                LintFinding::new(
                    LintKind::OutOfBound,
                    vec![el.id.clone()],
                    format!(
                        "{} spans ({}, {})-({}, {}) outside {}x{}",
                        el.id,
                        b.left,
                        b.top,
                        b.right(),
                        b.bottom(),
                        doc.screen_width,
                        doc.screen_height
                    ),
                ),
            ));
        }
    }

    found.sort_by_key(|(kind, i, j, _)| (*kind, *i, *j));
    found.into_iter().map(|(_, _, _, f)| f).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub document: WireframeDocument,
    /// Lint passes that applied at least one change.
    pub iterations: usize,
    /// Every finding acted on, in the order repairs were applied.
    pub fixed: Vec<LintFinding>,
    /// Findings still present when the iteration cap was hit.
    pub residual: Vec<LintFinding>,
}

impl RepairOutcome {
    pub fn is_clean(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Apply `findings`, then re-lint and repair until clean or the iteration
/// cap. Repairs never add elements.
pub fn repair(doc: &WireframeDocument, findings: &[LintFinding], cfg: &LintConfig) -> RepairOutcome {
    let mut document = doc.clone();
    let mut fixed = Vec::new();
    let mut iterations = 0;
    let mut pending = findings.to_vec();
    while !pending.is_empty() && iterations < cfg.max_iterations {
        iterations += 1;
        for finding in &pending {
            if apply(&mut document, finding, cfg) {
                fixed.push(finding.clone());
            }
        }
        pending = lint(&document, cfg);
    }
    RepairOutcome {
        document,
        iterations,
        fixed,
        residual: pending,
    }
}

/// Lint and repair in one step.
pub fn lint_and_repair(doc: &WireframeDocument, cfg: &LintConfig) -> RepairOutcome {
    repair(doc, &lint(doc, cfg), cfg)
}

/// Returns whether the document changed.
fn apply(doc: &mut WireframeDocument, finding: &LintFinding, cfg: &LintConfig) -> bool {
    let (width, height) = (doc.screen_width, doc.screen_height);
    match finding.kind {
        LintKind::Duplication => {
            let [first, dup] = finding.element_ids.as_slice() else {
                return false;
            };
            doc.find(first).is_some() && doc.remove(dup).is_some()
        }
        LintKind::OutOfBound => {
            let Some(el) = finding.element_ids.first().and_then(|id| doc.find_mut(id)) else {
                return false;
            };
            let clamped = clamp_rect(el.bbox, width, height);
            let changed = clamped != el.bbox;
            el.bbox = clamped;
            changed
        }
        LintKind::Occlusion => {
            let [first, second] = finding.element_ids.as_slice() else {
                return false;
            };
            let Some(anchor) = doc.find(first).map(|e| e.bbox) else {
                return false;
            };
            let Some(el) = doc.find_mut(second) else {
                return false;
            };
            let (w, h) = anchor.overlap(&el.bbox);
            if w == 0 || h == 0 {
                return false;
            }
            el.bbox = separate(anchor, el.bbox, cfg.margin_px, width, height);
            true
        }
    }
}

fn clamp_rect(r: Rect, width: u32, height: u32) -> Rect {
    let (w, h) = (i64::from(width), i64::from(height));
    let left = i64::from(r.left).clamp(0, w);
    let top = i64::from(r.top).clamp(0, h);
    let right = r.right().clamp(left, w);
    let bottom = r.bottom().clamp(top, h);
    Rect::new(left as i32, top as i32, (right - left) as u32, (bottom - top) as u32)
}

/// Move `moving` clear of `anchor`: below it with a margin if that stays on
/// screen, else to its right, else trim `moving` to its largest part
/// outside `anchor`.
fn separate(anchor: Rect, moving: Rect, margin: u32, width: u32, height: u32) -> Rect {
    let margin = i64::from(margin);
    let below = anchor.bottom() + margin - i64::from(moving.top);
    let down = Rect {
        top: (i64::from(moving.top) + below) as i32,
        ..moving
    };
    if down.within(width, height) {
        return down;
    }
    let beside = anchor.right() + margin - i64::from(moving.left);
    let right = Rect {
        left: (i64::from(moving.left) + beside) as i32,
        ..moving
    };
    if right.within(width, height) {
        return right;
    }
    trim_outside(anchor, moving, margin)
}

fn trim_outside(anchor: Rect, moving: Rect, margin: i64) -> Rect {
    let (l, t, r, b) = (
        i64::from(moving.left),
        i64::from(moving.top),
        moving.right(),
        moving.bottom(),
    );
    let (al, at, ar, ab) = (
        i64::from(anchor.left),
        i64::from(anchor.top),
        anchor.right(),
        anchor.bottom(),
    );
    // Each side of the anchor, with the margin when there is room for it.
    let gap = |space: i64| if space > margin { margin } else { 0 };
    let candidates = [
        (l, t, r, (at - gap(at - t)).min(b)),
        ((ab + gap(b - ab)).max(t), l, b, r),
        (l, t, (al - gap(al - l)).min(r), b),
        ((ar + gap(r - ar)).max(l), t, r, b),
    ];
    let rects = [
        (candidates[0].0, candidates[0].1, candidates[0].2, candidates[0].3),
        (l, candidates[1].0, r, b),
        (candidates[2].0, candidates[2].1, candidates[2].2, candidates[2].3),
        (candidates[3].0, t, r, b),
    ];
    rects
        .into_iter()
        .filter(|(l, t, r, b)| r > l && b > t)
        .max_by_key(|(l, t, r, b)| (r - l) * (b - t))
        .map(|(l, t, r, b)| Rect::new(l as i32, t as i32, (r - l) as u32, (b - t) as u32))
        .unwrap_or(Rect { height: 0, ..moving })
}
