//! Text typography: choose a word wrapping and font size that fill a text
//! block as completely as possible.
//!
//! Text is measured with a fixed affine model (glyph advance and line height
//! proportional to the font size, in tenths of a pixel so every comparison
//! is exact integer arithmetic). A candidate `(wrapping, size)` is feasible
//! when its bounding box fits inside the block, and the chosen plan
//! maximizes bounding-box area over block area.
//!
//! The search is exact for any word count. For a fixed size and line count
//! the area only depends on the widest line, so it suffices to find the
//! widest line that can appear in some valid wrapping with that many lines.
//! A word run `i..=j` can be such a line iff the words before it and after
//! it can be split into the remaining lines under the width cap, and the
//! achievable line counts of a segment form the interval
//! `[min_lines, word_count]`.

use std::cmp::Ordering;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{FontClass, Rect};

const DEFAULT_CONFIG: &str = include_str!("../../resources/typography.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[default]
    Left,
    Center,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypographyPlan {
    pub lines: Vec<String>,
    pub font_px: u32,
    pub alignment: Alignment,
    /// Bounding-box area of the set text over block area.
    pub occupied_ratio: f64,
    /// False when even the smallest size overflows the block.
    pub fits: bool,
}

impl TypographyPlan {
    pub fn is_single_line(&self) -> bool {
        self.lines.len() == 1
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypographyError {
    #[error("text block has non-positive dimensions {0}x{1}")]
    EmptyBox(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladders {
    pub title: Vec<u32>,
    pub normal: Vec<u32>,
    pub subtitle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypographyConfig {
    pub version: u32,
    /// Average glyph advance per pixel of font size, in tenths.
    pub glyph_width_tenths: u64,
    /// Line height per pixel of font size, in tenths.
    pub line_height_tenths: u64,
    pub ladders: Ladders,
}

impl Default for TypographyConfig {
    fn default() -> Self {
        TypographyConfig::bundled().clone()
    }
}

impl TypographyConfig {
    pub fn bundled() -> &'static TypographyConfig {
        static CONFIG: OnceLock<TypographyConfig> = OnceLock::new();
        CONFIG.get_or_init(|| serde_json::from_str(DEFAULT_CONFIG).expect("bundled typography config is valid"))
    }

    /// Font sizes for a role, largest first.
    pub fn ladder(&self, font_class: FontClass) -> Vec<u32> {
        let mut sizes = match font_class {
            FontClass::Title => self.ladders.title.clone(),
            FontClass::Normal => self.ladders.normal.clone(),
            FontClass::Subtitle => self.ladders.subtitle.clone(),
        };
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes.dedup();
        sizes
    }
}

/// Exact size of set text, in tenths of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub width: u64,
    pub height: u64,
    pub box_width: u64,
    pub box_height: u64,
}

impl Metrics {
    pub fn area(&self) -> u128 {
        u128::from(self.width) * u128::from(self.height)
    }

    pub fn box_area(&self) -> u128 {
        u128::from(self.box_width) * u128::from(self.box_height)
    }

    pub fn fits(&self) -> bool {
        self.width <= self.box_width && self.height <= self.box_height
    }

    pub fn ratio(&self) -> f64 {
        if self.box_area() == 0 {
            return 0.0;
        }
        self.area() as f64 / self.box_area() as f64
    }

    /// Set area falling outside the block.
    pub fn overflow(&self) -> u128 {
        let inside = u128::from(self.width.min(self.box_width)) * u128::from(self.height.min(self.box_height));
        self.area() - inside
    }
}

/// Measure already-wrapped lines with the bundled model.
pub fn measure(lines: &[String], font_px: u32, bbox: Rect) -> Metrics {
    measure_with(TypographyConfig::bundled(), lines, font_px, bbox)
}

pub fn measure_with(cfg: &TypographyConfig, lines: &[String], font_px: u32, bbox: Rect) -> Metrics {
    let widest = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0) as u64;
    Metrics {
        width: cfg.glyph_width_tenths * u64::from(font_px) * widest,
        height: cfg.line_height_tenths * u64::from(font_px) * lines.len() as u64,
        box_width: 10 * u64::from(bbox.width),
        box_height: 10 * u64::from(bbox.height),
    }
}

pub fn optimize_typography(text: &str, font_class: FontClass, bbox: Rect) -> Result<TypographyPlan, TypographyError> {
    optimize_typography_with(TypographyConfig::bundled(), text, font_class, bbox)
}

pub fn optimize_typography_with(
    cfg: &TypographyConfig,
    text: &str,
    font_class: FontClass,
    bbox: Rect,
) -> Result<TypographyPlan, TypographyError> {
    if bbox.width == 0 || bbox.height == 0 {
        return Err(TypographyError::EmptyBox(bbox.width, bbox.height));
    }
    let ladder = cfg.ladder(font_class);
    let words: Vec<&str> = text.split_whitespace().collect();
    if words.is_empty() {
        return Ok(TypographyPlan {
            lines: Vec::new(),
            font_px: ladder.first().copied().unwrap_or(0),
            alignment: Alignment::Left,
            occupied_ratio: 0.0,
            fits: true,
        });
    }
    let lengths: Vec<u64> = words.iter().map(|w| w.chars().count() as u64).collect();

    let mut best: Option<(u128, u32, Vec<usize>)> = None;
    for &font_px in &ladder {
        let cap_chars = (10 * u64::from(bbox.width)) / (cfg.glyph_width_tenths * u64::from(font_px));
        let max_lines = (10 * u64::from(bbox.height)) / (cfg.line_height_tenths * u64::from(font_px));
        let Some(widest) = widest_line_per_count(&lengths, cap_chars) else {
            continue;
        };
        for (lines, candidate) in widest.iter().enumerate().skip(1) {
            if lines as u64 > max_lines {
                break;
            }
            let Some(run) = candidate else { continue };
            let score = u128::from(font_px).pow(2) * u128::from(run.chars) * lines as u128;
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                let breaks = wrapping_around(&lengths, cap_chars, lines, run);
                best = Some((score, font_px, breaks));
            }
        }
    }

    let (font_px, breaks) = match best {
        Some((_, font_px, breaks)) => (font_px, breaks),
        None => {
            let smallest = ladder.last().copied().unwrap_or(1);
            (smallest, least_overflow(cfg, &words, &lengths, smallest, bbox))
        }
    };
    let lines = split_at(&words, &breaks);
    let metrics = measure_with(cfg, &lines, font_px, bbox);
    Ok(TypographyPlan {
        alignment: if lines.len() == 1 {
            Alignment::Center
        } else {
            Alignment::Left
        },
        occupied_ratio: metrics.ratio(),
        fits: metrics.fits(),
        lines,
        font_px,
    })
}

#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    end: usize,
    chars: u64,
}

/// Width in characters of words `i..j` set on one line.
fn span_chars(prefix: &[u64], i: usize, j: usize) -> u64 {
    prefix[j] - prefix[i] + (j - i).saturating_sub(1) as u64
}

fn prefix_sums(lengths: &[u64]) -> Vec<u64> {
    let mut prefix = vec![0u64; lengths.len() + 1];
    for (i, len) in lengths.iter().enumerate() {
        prefix[i + 1] = prefix[i] + len;
    }
    prefix
}

/// Fewest lines for words `0..i`, every line within `cap`.
fn min_lines_prefix(prefix: &[u64], cap: u64) -> Vec<usize> {
    let n = prefix.len() - 1;
    let mut best = vec![usize::MAX; n + 1];
    best[0] = 0;
    for end in 1..=n {
        for start in (0..end).rev() {
            if span_chars(prefix, start, end) > cap {
                break;
            }
            if best[start] != usize::MAX {
                best[end] = best[end].min(best[start] + 1);
            }
        }
    }
    best
}

/// Fewest lines for words `j..n`, every line within `cap`.
fn min_lines_suffix(prefix: &[u64], cap: u64) -> Vec<usize> {
    let n = prefix.len() - 1;
    let mut best = vec![usize::MAX; n + 1];
    best[n] = 0;
    for start in (0..n).rev() {
        for end in start + 1..=n {
            if span_chars(prefix, start, end) > cap {
                break;
            }
            if best[end] != usize::MAX {
                best[start] = best[start].min(best[end] + 1);
            }
        }
    }
    best
}

/// For each line count `L` (index), the widest line any valid `L`-line
/// wrapping can have. `None` when some word alone exceeds `cap`.
#[allow(clippy::needless_range_loop)] // indexes two tables by the same bounds
fn widest_line_per_count(lengths: &[u64], cap: u64) -> Option<Vec<Option<Run>>> {
    if lengths.iter().any(|&l| l > cap) {
        return None;
    }
    let n = lengths.len();
    let prefix = prefix_sums(lengths);
    let before = min_lines_prefix(&prefix, cap);
    let after = min_lines_suffix(&prefix, cap);
    let mut widest: Vec<Option<Run>> = vec![None; n + 1];
    for start in 0..n {
        for end in start + 1..=n {
            let chars = span_chars(&prefix, start, end);
            if chars > cap {
                break;
            }
            let lo = before[start] + after[end] + 1;
            let hi = start + (n - end) + 1;
            for slot in widest.iter_mut().take(hi + 1).skip(lo) {
                if slot.is_none_or(|r| chars > r.chars) {
                    *slot = Some(Run { start, end, chars });
                }
            }
        }
    }
    Some(widest)
}

/// Break positions of an `lines`-line wrapping that contains `run` as one
/// line and keeps every line within `cap`.
fn wrapping_around(lengths: &[u64], cap: u64, lines: usize, run: &Run) -> Vec<usize> {
    let n = lengths.len();
    let prefix = prefix_sums(lengths);
    let before_min = min_lines_prefix(&prefix, cap)[run.start];
    let after_min = min_lines_suffix(&prefix, cap)[run.end];
    let rest = lines - 1;
    let before = before_min.max(rest.saturating_sub(n - run.end));
    let after = rest - before;
    debug_assert!(before <= run.start && after >= after_min && after <= n - run.end);

    let mut breaks = exact_partition(&prefix, 0, run.start, before, cap);
    if run.start > 0 {
        breaks.push(run.start);
    }
    if run.end < n {
        breaks.push(run.end);
    }
    breaks.extend(exact_partition(&prefix, run.end, n, after, cap));
    breaks
}

/// Interior break positions splitting words `from..to` into exactly `count`
/// lines within `cap`: a minimal greedy split, then multi-word lines are
/// divided until the count is reached.
fn exact_partition(prefix: &[u64], from: usize, to: usize, count: usize, cap: u64) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let mut starts = vec![from];
    let mut line_start = from;
    for end in from + 1..=to {
        if span_chars(prefix, line_start, end) > cap {
            line_start = end - 1;
            starts.push(line_start);
        }
    }
    let mut cursor = 0;
    while starts.len() < count {
        let line_end = starts.get(cursor + 1).copied().unwrap_or(to);
        if line_end - starts[cursor] > 1 {
            starts.insert(cursor + 1, starts[cursor] + 1);
        } else {
            cursor += 1;
        }
    }
    starts.remove(0);
    starts
}

/// Fallback when nothing fits: per line count, the wrapping with the
/// narrowest widest line, keeping the one that spills least.
fn least_overflow(cfg: &TypographyConfig, words: &[&str], lengths: &[u64], font_px: u32, bbox: Rect) -> Vec<usize> {
    let n = lengths.len();
    let prefix = prefix_sums(lengths);
    // narrowest[l][i]: min over splits of words 0..i into l lines of the widest line
    let mut narrowest = vec![vec![u64::MAX; n + 1]; n + 1];
    let mut choice = vec![vec![0usize; n + 1]; n + 1];
    narrowest[0][0] = 0;
    for l in 1..=n {
        for i in l..=n {
            for j in l - 1..i {
                if narrowest[l - 1][j] == u64::MAX {
                    continue;
                }
                let width = narrowest[l - 1][j].max(span_chars(&prefix, j, i));
                if width < narrowest[l][i] {
                    narrowest[l][i] = width;
                    choice[l][i] = j;
                }
            }
        }
    }
    let mut best: Option<(u128, Vec<usize>)> = None;
    for l in 1..=n {
        let mut breaks = Vec::with_capacity(l - 1);
        let mut i = n;
        for k in (1..=l).rev() {
            let j = choice[k][i];
            if j > 0 {
                breaks.push(j);
            }
            i = j;
        }
        breaks.reverse();
        let overflow = measure_with(cfg, &split_at(words, &breaks), font_px, bbox).overflow();
        if best.as_ref().is_none_or(|(o, _)| overflow.cmp(o) == Ordering::Less) {
            best = Some((overflow, breaks));
        }
    }
    best.map(|(_, b)| b).unwrap_or_default()
}

fn split_at(words: &[&str], breaks: &[usize]) -> Vec<String> {
    let mut lines = Vec::with_capacity(breaks.len() + 1);
    let mut start = 0;
    for &b in breaks.iter().chain(std::iter::once(&words.len())) {
        lines.push(words[start..b].join(" "));
        start = b;
    }
    lines
}
