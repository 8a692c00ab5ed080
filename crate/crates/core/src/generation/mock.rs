//! Offline backend: keyword-matched wireframe templates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::prompt::extract_description;
use crate::beautify::icons::{answer_icon_prompt, is_icon_prompt, Lexicon};
use crate::dsl::{serialize, Rect, Tag, WireframeDocument, WireframeElement};

/// Screen size of every template.
pub const MOCK_SCREEN: (u32, u32) = (360, 640);

#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    pub lexicon: Lexicon,
}

impl MockBackend {
    /// Answer icon queries lexically; everything else gets a template.
    pub fn complete(&self, prompt: &str, seed: u64, temperature: f64) -> String {
        if is_icon_prompt(prompt) {
            answer_icon_prompt(prompt, &self.lexicon)
        } else {
            mock_generate(prompt, seed, temperature)
        }
    }
}

fn el(id: &str, tag: Tag, left: i32, top: i32, width: u32, height: u32) -> WireframeElement {
    WireframeElement::new(id, tag, Rect::new(left, top, width, height))
}

fn text(id: &str, tag: Tag, rect: (i32, i32, u32, u32), label: &str) -> WireframeElement {
    el(id, tag, rect.0, rect.1, rect.2, rect.3).with_text(label)
}

fn image(id: &str, rect: (i32, i32, u32, u32), alt: &str) -> WireframeElement {
    el(id, Tag::Image, rect.0, rect.1, rect.2, rect.3).with_alt(alt)
}

fn screen(id: &str, children: Vec<WireframeElement>) -> Vec<WireframeElement> {
    vec![el(id, Tag::Container, 0, 0, MOCK_SCREEN.0, MOCK_SCREEN.1).with_children(children)]
}

fn login() -> Vec<WireframeElement> {
    screen(
        "login_screen",
        vec![
            image("logo", (130, 64, 100, 100), "App logo"),
            text("title", Tag::Paragraph, (40, 188, 280, 40), "Welcome back"),
            text("username", Tag::TextInput, (40, 256, 280, 48), "Username"),
            text("remember", Tag::Checkbox, (40, 320, 200, 32), "Remember me"),
            text("login_button", Tag::Button, (40, 376, 280, 48), "Log in"),
            text(
                "signup_hint",
                Tag::Paragraph,
                (40, 440, 280, 32),
                "New here? Create an account",
            ),
        ],
    )
}

fn search() -> Vec<WireframeElement> {
    let mut children = vec![
        image("back", (8, 16, 40, 40), "navigate up"),
        text("query", Tag::TextInput, (56, 16, 248, 40), "Search"),
        image("search_icon", (312, 16, 40, 40), "search"),
        text("recent_subtitle", Tag::Paragraph, (16, 72, 328, 24), "Recent searches"),
    ];
    for (i, item) in ["Coffee near me", "Weekend weather", "Train times", "Pizza recipes"]
        .iter()
        .enumerate()
    {
        children.push(text(
            &format!("result{i}"),
            Tag::Paragraph,
            (16, 104 + 48 * i as i32, 328, 40),
            item,
        ));
    }
    screen("search_screen", children)
}

fn settings() -> Vec<WireframeElement> {
    screen(
        "settings_screen",
        vec![
            image("back", (8, 16, 40, 40), "navigate up"),
            text("title", Tag::Paragraph, (56, 16, 248, 40), "Settings"),
            text("notifications", Tag::Checkbox, (16, 80, 328, 40), "Notifications"),
            text("dark_mode", Tag::Checkbox, (16, 128, 328, 40), "Dark mode"),
            text("language", Tag::Select, (16, 176, 328, 40), "Language"),
            text("privacy", Tag::Paragraph, (16, 232, 328, 40), "Privacy"),
            text("about_subtitle", Tag::Paragraph, (16, 280, 328, 40), "About this app"),
        ],
    )
}

fn music() -> Vec<WireframeElement> {
    screen(
        "player_screen",
        vec![
            image("back", (8, 16, 40, 40), "back"),
            image("menu", (312, 16, 40, 40), "more options"),
            image("album_art", (40, 80, 280, 280), "Album cover"),
            text("title", Tag::Paragraph, (40, 376, 280, 40), "Song title"),
            text("artist_subtitle", Tag::Paragraph, (40, 420, 280, 24), "Artist name"),
            text("previous", Tag::Button, (40, 480, 80, 48), "Prev"),
            text("play", Tag::Button, (140, 480, 80, 48), "Play"),
            text("next", Tag::Button, (240, 480, 80, 48), "Next"),
            image("favorite", (160, 552, 40, 40), "like"),
        ],
    )
}

fn flight() -> Vec<WireframeElement> {
    screen(
        "flight_screen",
        vec![
            text("title", Tag::Paragraph, (16, 16, 328, 40), "Book a flight"),
            text("one_way", Tag::Radio, (16, 72, 150, 32), "One way"),
            text("round_trip", Tag::Radio, (180, 72, 164, 32), "Round trip"),
            text("origin", Tag::TextInput, (16, 120, 328, 48), "From"),
            text("destination", Tag::TextInput, (16, 184, 328, 48), "To"),
            text("departure", Tag::DatePicker, (16, 248, 328, 48), "Departure date"),
            text("passengers", Tag::Select, (16, 312, 328, 48), "Passengers"),
            text("search_button", Tag::Button, (16, 384, 328, 48), "Search flights"),
        ],
    )
}

/// Five elements around the description itself.
fn generic(description: &str) -> Vec<WireframeElement> {
    let mut heading: String = description.split_whitespace().take(8).collect::<Vec<_>>().join(" ");
    if let Some(first) = heading.get(..1) {
        heading = first.to_uppercase() + &heading[1..];
    }
    if heading.is_empty() {
        heading = "Untitled screen".into();
    }
    vec![
        text("title", Tag::Paragraph, (16, 24, 328, 48), &heading),
        image("hero", (16, 88, 328, 200), "Illustration"),
        text(
            "body",
            Tag::Paragraph,
            (16, 304, 328, 96),
            "Short supporting text explaining what this screen is for.",
        ),
        text("primary_button", Tag::Button, (16, 424, 328, 48), "Continue"),
        image("menu", (304, 576, 40, 40), "more options"),
    ]
}

type Template = fn() -> Vec<WireframeElement>;

const TEMPLATES: &[(&str, Template)] = &[
    ("login", login),
    ("sign in", login),
    ("search", search),
    ("settings", settings),
    ("music", music),
    ("song", music),
    ("flight", flight),
];

fn fnv1a(seed: u64, text: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in seed.to_le_bytes().iter().chain(text.as_bytes()) {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

/// Sampling noise: at positive temperature elements drift by a few pixels
/// and, sometimes, the last leaf is emitted twice the way real generations
/// repeat themselves.
fn perturb(roots: &mut Vec<WireframeElement>, rng: &mut ChaCha8Rng, temperature: f64) {
    let jitter = (6.0 * temperature).round() as i32;
    if jitter > 0 {
        let mut doc = WireframeDocument::new(MOCK_SCREEN.0, MOCK_SCREEN.1, std::mem::take(roots));
        doc.for_each_mut(|el| {
            if el.tag != Tag::Container {
                el.bbox.top += rng.random_range(-jitter..=jitter);
                el.bbox.left += rng.random_range(-jitter..=jitter);
            }
        });
        *roots = doc.roots;
    }
    if rng.random_bool((temperature * 0.5).clamp(0.0, 1.0)) {
        let siblings = match roots.first_mut() {
            Some(first) if first.tag == Tag::Container => &mut first.children,
            _ => roots,
        };
        if let Some(last) = siblings.last().cloned() {
            let mut copy = last.clone();
            copy.id = format!("{}_again", last.id);
            copy.bbox.top += 2;
            copy.bbox.left += 2;
            siblings.push(copy);
        }
    }
}

/// Deterministic stand-in for a generation backend. At temperature zero
/// the output depends on the description only.
pub fn mock_generate(prompt: &str, seed: u64, temperature: f64) -> String {
    let description = extract_description(prompt);
    let lower = description.to_lowercase();
    let mut roots = TEMPLATES
        .iter()
        .filter_map(|(keyword, build)| lower.find(keyword).map(|at| (at, build)))
        .min_by_key(|(at, _)| *at)
        .map(|(_, build)| build())
        .unwrap_or_else(|| generic(description));
    if temperature > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(seed, description));
        perturb(&mut roots, &mut rng, temperature);
    }
    serialize(&WireframeDocument::new(MOCK_SCREEN.0, MOCK_SCREEN.1, roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_dsl, validate};

    #[test]
    fn login_template() {
        let doc = parse_dsl(&mock_generate("a login page", 7, 0.0)).unwrap();
        let els = doc.elements();
        let inputs: Vec<_> = els.iter().filter(|e| e.tag == Tag::TextInput).collect();
        assert_eq!(inputs.len(), 1);
        assert_eq!(inputs[0].text.as_deref(), Some("Username"));
        assert_eq!(els.iter().filter(|e| e.tag == Tag::Button).count(), 1);
    }

    #[test]
    fn earliest_keyword_wins() {
        let a = mock_generate("music search", 0, 0.0);
        assert!(a.contains("class=player_screen"));
        let b = mock_generate("search for music", 0, 0.0);
        assert!(b.contains("class=search_screen"));
    }

    #[test]
    fn unknown_intent_is_generic_and_parseable() {
        let doc = parse_dsl(&mock_generate("zzz unknown", 7, 0.65)).unwrap();
        assert!(validate(&doc).is_empty());
        assert!(doc.len() >= 5);
        let cold = parse_dsl(&mock_generate("zzz unknown", 7, 0.0)).unwrap();
        assert_eq!(cold.len(), 5);
        assert_eq!(cold.roots[0].text.as_deref(), Some("Zzz unknown"));
    }

    #[test]
    fn deterministic_per_seed() {
        for t in [0.0, 0.65, 1.0] {
            assert_eq!(
                mock_generate("a settings page", 7, t),
                mock_generate("a settings page", 7, t)
            );
        }
        assert_eq!(
            mock_generate("a login page", 1, 0.0),
            mock_generate("a login page", 2, 0.0)
        );
        let differs =
            (0..10).any(|s| mock_generate("a login page", s, 0.65) != mock_generate("a login page", 99, 0.65));
        assert!(differs);
    }

    #[test]
    fn every_template_parses() {
        for prompt in ["login", "search", "settings", "music", "flight", "", "üñí ✓"] {
            for seed in 0..5 {
                let doc = parse_dsl(&mock_generate(prompt, seed, 0.65)).unwrap();
                assert!(validate(&doc).is_empty(), "{prompt}");
            }
        }
    }
}
