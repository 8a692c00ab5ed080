//! Wireframe compilation toolkit.
//!
//! Screens captured as Android view hierarchies are converted into a small
//! HTML-plus-CSS wireframe language ([`dsl`]), paired with descriptions to
//! build training corpora ([`corpus`]), and generated from descriptions by a
//! text-generation backend ([`generation`]). Generated markup is parsed
//! tolerantly, polished by [`beautify`] and drawn by [`render`].

pub mod beautify;
pub mod corpus;
pub mod dsl;
pub mod generation;
pub mod hierarchy;
pub mod render;
pub mod synth;

pub use beautify::icons::{resolve_icon, IconEntry, IconId, Lexicon};
pub use beautify::lint::{lint, lint_and_repair, repair, LintConfig, LintFinding, LintKind, Repair};
pub use beautify::typography::{optimize_typography, Alignment, TypographyPlan};
pub use beautify::{beautify, BeautifyReport};
pub use corpus::{CorpusConfig, ScreenIndexEntry, TrainingExample};
pub use dsl::{emit_dsl, parse_dsl, FontClass, ParseError, Rect, Tag, WireframeDocument, WireframeElement};
pub use generation::{assemble_prompt, Backend, GenerationConfig, GenerationError, Mode, PromptText};
pub use hierarchy::{normalize, parse_hierarchy, UiNode, UiTree};
pub use render::{render_svg, RenderStyle};
