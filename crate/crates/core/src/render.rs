//! Monochrome SVG rendering of wireframe documents.
//!
//! Output is one flat `<g>` per element in preorder, after a `<defs>` block
//! holding the icon glyphs. All colors are grays.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beautify::icons::{IconId, Lexicon};
use crate::beautify::typography::{Alignment, TypographyConfig};
use crate::dsl::{Tag, WireframeDocument, WireframeElement};

/// Icon glyphs drawn on a 24×24 grid, stroked.
pub const GLYPHS: [(&str, &str); 10] = [
    ("back_arrow", "M20 12H5M11 5l-7 7 7 7"),
    ("hamburger_menu", "M3 6h18M3 12h18M3 18h18"),
    (
        "gear",
        "M12 8.5a3.5 3.5 0 1 0 0 7a3.5 3.5 0 1 0 0-7zM12 2v3M12 19v3M2 12h3M19 12h3\
         M4.9 4.9l2.1 2.1M17 17l2.1 2.1M4.9 19.1L7 17M17 7l2.1-2.1",
    ),
    (
        "three_dots",
        "M12 4.5a1.5 1.5 0 1 0 0 3a1.5 1.5 0 1 0 0-3zM12 10.5a1.5 1.5 0 1 0 0 3a1.5 1.5 0 1 0 0-3z\
         M12 16.5a1.5 1.5 0 1 0 0 3a1.5 1.5 0 1 0 0-3z",
    ),
    ("info", "M12 2a10 10 0 1 0 0 20a10 10 0 1 0 0-20zM12 11v6M12 7v1"),
    (
        "person",
        "M12 3a4 4 0 1 0 0 8a4 4 0 1 0 0-8zM4 21c0-4.4 3.6-7 8-7s8 2.6 8 7",
    ),
    ("close", "M5 5l14 14M19 5L5 19"),
    ("magnifier", "M10 3a7 7 0 1 0 0 14a7 7 0 1 0 0-14zM15 15l6 6"),
    (
        "share",
        "M18 2.5a2.5 2.5 0 1 0 0 5a2.5 2.5 0 1 0 0-5zM6 9.5a2.5 2.5 0 1 0 0 5a2.5 2.5 0 1 0 0-5z\
         M18 16.5a2.5 2.5 0 1 0 0 5a2.5 2.5 0 1 0 0-5zM8.2 10.8l7.6-4.1M8.2 13.2l7.6 4.1",
    ),
    ("heart", "M12 20.5l-7.5-7.6A4.8 4.8 0 0 1 12 6.4a4.8 4.8 0 0 1 7.5 6.5z"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub stroke_px: u32,
    /// Fill gray level for buttons and controls.
    pub fill_gray: u8,
    pub font_family_token: String,
    /// Glyph name to symbol id in `<defs>`.
    pub icon_glyph_map: BTreeMap<String, String>,
    /// Clip elements to the canvas instead of reporting them.
    pub clip_out_of_canvas: bool,
    /// Output size relative to the screen; the drawing keeps screen units.
    pub scale: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            stroke_px: 2,
            fill_gray: 230,
            font_family_token: "sans-serif".into(),
            icon_glyph_map: GLYPHS
                .iter()
                .map(|(name, _)| (name.to_string(), format!("icon-{name}")))
                .collect(),
            clip_out_of_canvas: false,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("element {0} lies outside the {1}x{2} canvas")]
    OutOfCanvas(String, u32, u32),
    #[error("scale must be positive and finite")]
    BadScale,
}

const STROKE: &str = "#444444";
const TEXT: &str = "#222222";
const LIGHT_TEXT: &str = "#999999";
const FAINT: &str = "#bbbbbb";
const CANVAS: &str = "#ffffff";

fn gray(level: u8) -> String {
    format!("#{level:02x}{level:02x}{level:02x}")
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c if (c as u32) < 0x20 => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// Numbers with at most two decimals and no trailing zeros.
fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

struct Painter<'a> {
    out: String,
    style: &'a RenderStyle,
    lexicon: &'a Lexicon,
    typography: &'a TypographyConfig,
}

pub fn render_svg(doc: &WireframeDocument, style: &RenderStyle) -> Result<String, RenderError> {
    render_svg_with(doc, style, &Lexicon::default())
}

pub fn render_svg_with(doc: &WireframeDocument, style: &RenderStyle, lexicon: &Lexicon) -> Result<String, RenderError> {
    if !(style.scale.is_finite() && style.scale > 0.0) {
        return Err(RenderError::BadScale);
    }
    let elements = doc.elements();
    if !style.clip_out_of_canvas {
        if let Some(el) = elements
            .iter()
            .find(|e| !e.bbox.within(doc.screen_width, doc.screen_height))
        {
            return Err(RenderError::OutOfCanvas(
                el.id.clone(),
                doc.screen_width,
                doc.screen_height,
            ));
        }
    }

    let (w, h) = (doc.screen_width, doc.screen_height);
    let mut p = Painter {
        out: String::new(),
        style,
        lexicon,
        typography: TypographyConfig::bundled(),
    };
    let _ = writeln!(
        p.out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" \
         version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {w} {h}\" font-family=\"{}\">",
        num(f64::from(w) * style.scale),
        num(f64::from(h) * style.scale),
        esc(&style.font_family_token),
    );
    p.defs(w, h);
    let _ = writeln!(
        p.out,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"{CANVAS}\"/>"
    );
    for el in elements {
        p.element(el);
    }
    p.out.push_str("</svg>\n");
    Ok(p.out)
}

impl Painter<'_> {
    fn defs(&mut self, w: u32, h: u32) {
        self.out.push_str("<defs>\n");
        for (name, path) in GLYPHS {
            let id = self
                .style
                .icon_glyph_map
                .get(name)
                .cloned()
                .unwrap_or_else(|| format!("icon-{name}"));
            let _ = writeln!(
                self.out,
                "<symbol id=\"{}\" viewBox=\"0 0 24 24\"><path d=\"{path}\" fill=\"none\" stroke=\"{STROKE}\" \
                 stroke-width=\"2\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/></symbol>",
                esc(&id)
            );
        }
        if self.style.clip_out_of_canvas {
            let _ = writeln!(
                self.out,
                "<clipPath id=\"wf-canvas\"><rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\"/></clipPath>"
            );
        }
        self.out.push_str("</defs>\n");
    }

    fn element(&mut self, el: &WireframeElement) {
        let clip = if self.style.clip_out_of_canvas {
            " clip-path=\"url(#wf-canvas)\""
        } else {
            ""
        };
        let _ = writeln!(
            self.out,
            "<g id=\"wf-{}\" class=\"wf-{}\"{clip}>",
            esc(&el.id),
            el.tag.name().replace('_', "-")
        );
        let b = el.bbox;
        let (x, y, w, h) = (
            f64::from(b.left),
            f64::from(b.top),
            f64::from(b.width),
            f64::from(b.height),
        );
        let sw = self.style.stroke_px;
        match el.tag {
            Tag::Container => {
                self.rect(x, y, w, h, 0.0, "none", FAINT, sw.max(1) / 2 + 1);
            }
            Tag::Paragraph => self.text_block(el, x, y, w, h, TEXT),
            Tag::Button => {
                let r = (h / 2.0).min(8.0);
                self.rect(x, y, w, h, r, &gray(self.style.fill_gray), STROKE, sw);
                self.text_block(el, x, y, w, h, TEXT);
            }
            Tag::TextInput => {
                self.rect(x, y, w, h, 2.0, CANVAS, STROKE, sw);
                let pad = 8.0f64.min(w / 4.0);
                self.text_block(el, x + pad, y, (w - 2.0 * pad).max(1.0), h, LIGHT_TEXT);
            }
            Tag::Checkbox | Tag::Radio => {
                let side = h.min(24.0).min(w);
                let cy = y + h / 2.0;
                if el.tag == Tag::Checkbox {
                    self.rect(x, cy - side / 2.0, side, side, 2.0, CANVAS, STROKE, sw);
                } else {
                    let _ = writeln!(
                        self.out,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{CANVAS}\" stroke=\"{STROKE}\" stroke-width=\"{sw}\"/>",
                        num(x + side / 2.0),
                        num(cy),
                        num(side / 2.0)
                    );
                }
                let gap = side + 8.0;
                self.text_block(el, x + gap, y, (w - gap).max(1.0), h, TEXT);
            }
            Tag::DatePicker | Tag::Select => {
                self.rect(x, y, w, h, 2.0, CANVAS, STROKE, sw);
                let marker = h.min(16.0).min(w / 2.0);
                let mx = x + w - marker - 8.0f64.min(w / 4.0);
                let my = y + (h - marker) / 2.0;
                if el.tag == Tag::Select {
                    let _ = writeln!(
                        self.out,
                        "<path d=\"M{} {}h{}l-{} {}z\" fill=\"{STROKE}\"/>",
                        num(mx),
                        num(my + marker / 4.0),
                        num(marker),
                        num(marker / 2.0),
                        num(marker / 2.0)
                    );
                } else {
                    self.rect(mx, my, marker, marker, 1.0, "none", STROKE, 1);
                    let _ = writeln!(
                        self.out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{STROKE}\" stroke-width=\"1\"/>",
                        num(mx),
                        num(my + marker / 3.0),
                        num(mx + marker),
                        num(my + marker / 3.0)
                    );
                }
                let pad = 8.0f64.min(w / 4.0);
                self.text_block(el, x + pad, y, (mx - x - 2.0 * pad).max(1.0), h, TEXT);
            }
            Tag::Image | Tag::Video => match el.icon.and_then(|id| self.glyph_ref(id)) {
                Some(symbol) => {
                    let side = w.min(h);
                    let _ = writeln!(
                        self.out,
                        "<use xlink:href=\"#{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                        esc(&symbol),
                        num(x + (w - side) / 2.0),
                        num(y + (h - side) / 2.0),
                        num(side),
                        num(side)
                    );
                }
                None => {
                    self.rect(
                        x,
                        y,
                        w,
                        h,
                        0.0,
                        &gray(self.style.fill_gray.saturating_add(15)),
                        STROKE,
                        sw,
                    );
                    let _ = writeln!(
                        self.out,
                        "<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"{FAINT}\" stroke-width=\"{}\"/>",
                        num(x),
                        num(y),
                        num(x + w),
                        num(y + h),
                        num(x + w),
                        num(y),
                        num(x),
                        num(y + h),
                        sw.max(1)
                    );
                    if el.tag == Tag::Video {
                        let s = w.min(h) / 4.0;
                        let (cx, cy) = (x + w / 2.0, y + h / 2.0);
                        let _ = writeln!(
                            self.out,
                            "<path d=\"M{} {}L{} {}L{} {}z\" fill=\"{STROKE}\"/>",
                            num(cx - s / 2.0),
                            num(cy - s / 2.0),
                            num(cx + s / 2.0),
                            num(cy),
                            num(cx - s / 2.0),
                            num(cy + s / 2.0)
                        );
                    }
                }
            },
        }
        self.out.push_str("</g>\n");
    }

    fn glyph_ref(&self, id: IconId) -> Option<String> {
        let glyph = self.lexicon.glyph(id)?;
        self.style.icon_glyph_map.get(glyph).cloned()
    }

    #[allow(clippy::too_many_arguments)]
    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, r: f64, fill: &str, stroke: &str, sw: u32) {
        let _ = write!(
            self.out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
            num(x),
            num(y),
            num(w),
            num(h)
        );
        if r > 0.0 {
            let _ = write!(self.out, " rx=\"{}\"", num(r));
        }
        let _ = writeln!(self.out, " fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{sw}\"/>");
    }

    /// Lines of `el`'s text inside the given area, vertically centered.
    fn text_block(&mut self, el: &WireframeElement, x: f64, y: f64, w: f64, h: f64, color: &str) {
        let Some(text) = el.text.as_deref().filter(|t| !t.trim().is_empty()) else {
            return;
        };
        let ladder = self.typography.ladder(el.font_class);
        let (lines, font_px, alignment, fits) = match &el.typography {
            Some(plan) if !plan.lines.is_empty() => (plan.lines.clone(), plan.font_px, plan.alignment, plan.fits),
            _ => {
                let smallest = ladder.last().copied().unwrap_or(12);
                (vec![text.to_string()], smallest, Alignment::Left, false)
            }
        };
        let font = f64::from(font_px);
        let line_h = font * self.typography.line_height_tenths as f64 / 10.0;
        let block_h = line_h * lines.len() as f64;
        let top = if fits { y + (h - block_h) / 2.0 } else { y };
        let (anchor, tx) = match alignment {
            Alignment::Left => ("start", x),
            Alignment::Center => ("middle", x + w / 2.0),
            Alignment::Right => ("end", x + w),
        };

        let clip_id = format!("clip-{}", el.id);
        if !fits {
            let _ = writeln!(
                self.out,
                "<clipPath id=\"{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
                esc(&clip_id),
                num(x),
                num(y),
                num(w),
                num(h)
            );
            let _ = writeln!(
                self.out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{LIGHT_TEXT}\" \
                 stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
                num(x),
                num(y),
                num(w),
                num(h)
            );
        }
        let _ = write!(
            self.out,
            "<text font-size=\"{font_px}\" fill=\"{color}\" text-anchor=\"{anchor}\""
        );
        if !fits {
            let _ = write!(self.out, " clip-path=\"url(#{})\"", esc(&clip_id));
        }
        self.out.push('>');
        for (i, line) in lines.iter().enumerate() {
            // baseline sits at 80% of the font size below the line top
            let baseline = top + line_h * i as f64 + (line_h - font) / 2.0 + font * 0.8;
            let _ = write!(
                self.out,
                "<tspan x=\"{}\" y=\"{}\">{}</tspan>",
                num(tx),
                num(baseline),
                esc(line)
            );
        }
        self.out.push_str("</text>\n");
    }
}

/// Number of top-level element groups in rendered output.
pub fn count_groups(svg: &str) -> usize {
    svg.matches("<g id=\"wf-").count()
}

/// Every `#rrggbb` color in `svg`, for grayscale checks.
pub fn colors(svg: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let bytes = svg.as_bytes();
    let mut i = 0;
    while let Some(pos) = svg[i..].find('#') {
        let start = i + pos;
        let end = start + 7;
        if end <= svg.len() && bytes[start + 1..end].iter().all(u8::is_ascii_hexdigit) {
            out.push(&svg[start..end]);
        }
        i = start + 1;
    }
    out
}

pub fn is_grayscale(color: &str) -> bool {
    let hex = color.trim_start_matches('#');
    hex.len() == 6 && hex[0..2] == hex[2..4] && hex[2..4] == hex[4..6]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beautify::beautify;
    use crate::dsl::{parse_dsl, Rect};
    use crate::generation::mock_generate;
    use crate::synth;
    use proptest::prelude::*;

    #[test]
    fn one_group_per_element() {
        let doc = synth::random_document(5, 30);
        let svg = render_svg(&doc, &RenderStyle::default()).unwrap();
        assert_eq!(count_groups(&svg), doc.len());
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn login_template_structure() {
        let raw = parse_dsl(&mock_generate("a login page", 7, 0.0)).unwrap();
        let (doc, _) = beautify(&raw);
        let svg = render_svg(&doc, &RenderStyle::default()).unwrap();
        let group = |id: &str| {
            let start = svg.find(&format!("<g id=\"wf-{id}\"")).unwrap();
            let end = start + svg[start..].find("</g>").unwrap();
            svg[start..end].to_string()
        };
        let input = group("username");
        assert_eq!(input.matches("<rect").count(), 1);
        assert!(input.contains(&format!("<text font-size=\"16\" fill=\"{LIGHT_TEXT}\"")));
        assert!(input.contains(">Username</tspan>"));
        let button = group("login_button");
        assert_eq!(button.matches("<rect").count(), 1);
        assert!(button.contains(" rx="));
        assert!(button.contains(">Log in</tspan>"));
        assert_eq!(svg.matches("class=\"wf-text-input\"").count(), 1);
        assert_eq!(svg.matches("class=\"wf-button\"").count(), 1);
    }

    #[test]
    fn icons_and_placeholders() {
        let mut icon = WireframeElement::new("a", Tag::Image, Rect::new(0, 0, 40, 40)).with_alt("more options");
        icon.icon = IconId::new(4);
        let plain = WireframeElement::new("b", Tag::Image, Rect::new(50, 0, 40, 40)).with_alt("photo");
        let doc = WireframeDocument::new(100, 100, vec![icon, plain]);
        let svg = render_svg(&doc, &RenderStyle::default()).unwrap();
        assert!(svg.contains("<use xlink:href=\"#icon-three_dots\" x=\"0\" y=\"0\" width=\"40\" height=\"40\"/>"));
        assert!(svg.contains("M50 0L90 40M90 0L50 40"));
    }

    #[test]
    fn out_of_canvas_is_reported_unless_clipping() {
        let doc = WireframeDocument::new(
            100,
            100,
            vec![WireframeElement::new("x", Tag::Button, Rect::new(90, 0, 40, 40)).with_text("Go")],
        );
        assert_eq!(
            render_svg(&doc, &RenderStyle::default()),
            Err(RenderError::OutOfCanvas("x".into(), 100, 100))
        );
        let style = RenderStyle {
            clip_out_of_canvas: true,
            ..RenderStyle::default()
        };
        assert!(render_svg(&doc, &style).unwrap().contains("url(#wf-canvas)"));
    }

    #[test]
    fn infeasible_text_is_clipped_with_dashed_outline() {
        let raw = WireframeDocument::new(
            100,
            100,
            vec![WireframeElement::new("p", Tag::Paragraph, Rect::new(0, 0, 30, 10))
                .with_text("far too much text for this box")],
        );
        let (doc, _) = beautify(&raw);
        assert!(!doc.roots[0].typography.as_ref().unwrap().fits);
        let svg = render_svg(&doc, &RenderStyle::default()).unwrap();
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("clip-path=\"url(#clip-p)\""));
    }

    #[test]
    fn scale_changes_size_only() {
        let doc = synth::random_document(1, 10);
        let style = RenderStyle {
            scale: 0.25,
            ..RenderStyle::default()
        };
        let svg = render_svg(&doc, &style).unwrap();
        let w = f64::from(doc.screen_width) * 0.25;
        assert!(svg.contains(&format!("width=\"{}\"", num(w))));
        assert!(svg.contains(&format!("viewBox=\"0 0 {} {}\"", doc.screen_width, doc.screen_height)));
    }

    proptest! {
        #[test]
        fn deterministic_and_grayscale(seed in any::<u64>()) {
            let (doc, _) = beautify(&synth::random_document(seed, 40));
            let a = render_svg(&doc, &RenderStyle::default()).unwrap();
            let b = render_svg(&doc, &RenderStyle::default()).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(count_groups(&a), doc.len());
            for color in colors(&a) {
                prop_assert!(is_grayscale(color), "{}", color);
            }
        }
    }
}
