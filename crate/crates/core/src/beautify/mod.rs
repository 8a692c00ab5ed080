//! Turn a raw parsed wireframe into a polished one: icons from alt text,
//! typography plans for text, then layout lint and repair.

pub mod icons;
pub mod lint;
pub mod typography;

use serde::{Deserialize, Serialize};

use crate::dsl::{Rect, WireframeDocument, WireframeElement};
use icons::{resolve_icon, IconId, Lexicon};
use lint::{LintConfig, LintFinding};
use typography::{optimize_typography_with, TypographyConfig, TypographyPlan};

#[derive(Debug, Clone, Default)]
pub struct BeautifyConfig {
    pub lexicon: Lexicon,
    pub typography: TypographyConfig,
    pub lint: LintConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedIcon {
    pub element_id: String,
    pub alt_text: String,
    pub icon_id: IconId,
    pub glyph: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedText {
    pub element_id: String,
    pub plan: TypographyPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeautifyReport {
    pub icons: Vec<ResolvedIcon>,
    /// Final plans, after any repair moved or resized their boxes.
    pub typography: Vec<PlannedText>,
    /// Text elements left without a plan because their box has no area.
    pub skipped_text: Vec<String>,
    pub lint_iterations: usize,
    pub fixed: Vec<LintFinding>,
    pub residual: Vec<LintFinding>,
}

/// Run the full pipeline with the bundled defaults.
pub fn beautify(doc: &WireframeDocument) -> (WireframeDocument, BeautifyReport) {
    beautify_with(doc, &BeautifyConfig::default())
}

pub fn beautify_with(doc: &WireframeDocument, cfg: &BeautifyConfig) -> (WireframeDocument, BeautifyReport) {
    let mut doc = doc.clone();

    let mut icons = Vec::new();
    doc.for_each_mut(|el| {
        if let Some(resolved) = assign_icon(el, &cfg.lexicon) {
            icons.push(resolved);
        }
    });

    doc.for_each_mut(|el| plan_text(el, &cfg.typography));

    let before: Vec<(String, Rect)> = doc.elements().iter().map(|e| (e.id.clone(), e.bbox)).collect();
    let outcome = lint::lint_and_repair(&doc, &cfg.lint);
    let mut doc = outcome.document;
    doc.for_each_mut(|el| {
        let moved = before
            .iter()
            .find(|(id, _)| *id == el.id)
            .is_none_or(|(_, bbox)| *bbox != el.bbox);
        if moved {
            plan_text(el, &cfg.typography);
        }
    });

    let mut typography = Vec::new();
    let mut skipped_text = Vec::new();
    for el in doc.elements() {
        match (&el.typography, has_text(el)) {
            (Some(plan), _) => typography.push(PlannedText {
                element_id: el.id.clone(),
                plan: plan.clone(),
            }),
            (None, true) => skipped_text.push(el.id.clone()),
            (None, false) => {}
        }
    }

    let report = BeautifyReport {
        icons,
        typography,
        skipped_text,
        lint_iterations: outcome.iterations,
        fixed: outcome.fixed,
        residual: outcome.residual,
    };
    (doc, report)
}

fn has_text(el: &WireframeElement) -> bool {
    el.tag.carries_text() && el.text.as_deref().is_some_and(|t| !t.trim().is_empty())
}

fn assign_icon(el: &mut WireframeElement, lexicon: &Lexicon) -> Option<ResolvedIcon> {
    if !el.tag.carries_alt() {
        return None;
    }
    let alt = el.alt_text.as_deref()?;
    let icon_id = resolve_icon(alt, lexicon)?;
    el.icon = Some(icon_id);
    Some(ResolvedIcon {
        element_id: el.id.clone(),
        alt_text: alt.to_string(),
        icon_id,
        glyph: lexicon.glyph(icon_id).unwrap_or_default().to_string(),
    })
}

fn plan_text(el: &mut WireframeElement, cfg: &TypographyConfig) {
    el.typography = if has_text(el) {
        let text = el.text.as_deref().unwrap_or_default();
        optimize_typography_with(cfg, text, el.font_class, el.bbox).ok()
    } else {
        None
    };
}
