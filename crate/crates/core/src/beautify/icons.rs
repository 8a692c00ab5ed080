//! Alt-text to icon resolution against the ten-category icon lexicon.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_LEXICON: &str = include_str!("../../resources/icon_lexicon.json");
const ICON_PROMPT: &str = include_str!("../../resources/icon_prompt.txt");

const ORDINALS: [&str; 10] = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];

/// Words too generic to vote for an icon on their own. They still match as
/// part of a whole phrase ("navigate up", "share button").
const WEAK_WORDS: &[&str] = &["up", "off", "button"];

/// Icon number in the lexicon, 1 through 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct IconId(u8);

impl IconId {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 10;

    pub fn new(n: u8) -> Option<Self> {
        (Self::MIN..=Self::MAX).contains(&n).then_some(Self(n))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for IconId {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        IconId::new(n).ok_or_else(|| format!("icon id {n} outside 1..=10"))
    }
}

impl From<IconId> for u8 {
    fn from(id: IconId) -> u8 {
        id.0
    }
}

impl fmt::Display for IconId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IconEntry {
    pub icon_id: IconId,
    pub glyph: String,
    pub semantics: Vec<String>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("lexicon must list each icon id 1..=10 exactly once")]
    BadIds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub version: u32,
    pub icons: Vec<IconEntry>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::from_json(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }
}

impl Lexicon {
    pub fn from_json(json: &str) -> Result<Self, LexiconError> {
        let mut lexicon: Lexicon = serde_json::from_str(json)?;
        let ids: HashSet<_> = lexicon.icons.iter().map(|e| e.icon_id).collect();
        if ids.len() != lexicon.icons.len() || lexicon.icons.len() != 10 {
            return Err(LexiconError::BadIds);
        }
        for entry in &mut lexicon.icons {
            for phrase in &mut entry.semantics {
                *phrase = phrase.to_lowercase();
            }
        }
        Ok(lexicon)
    }

    pub fn entry(&self, id: IconId) -> Option<&IconEntry> {
        self.icons.iter().find(|e| e.icon_id == id)
    }

    pub fn glyph(&self, id: IconId) -> Option<&str> {
        self.entry(id).map(|e| e.glyph.as_str())
    }

    pub fn len(&self) -> usize {
        self.icons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.icons.is_empty()
    }
}

/// Lowercase, punctuation to spaces, whitespace collapsed.
fn normalize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Lexical resolution: an exact phrase match wins outright; otherwise each
/// entry scores twice the word length of its longest phrase found in the
/// alt text plus the number of alt words in its vocabulary. Ties go to the
/// lower icon id, and a zero score means no icon.
pub fn resolve_icon(alt_text: &str, lexicon: &Lexicon) -> Option<IconId> {
    let words = normalize(alt_text);
    if words.is_empty() {
        return None;
    }

    let mut entries: Vec<&IconEntry> = lexicon.icons.iter().collect();
    entries.sort_by_key(|e| e.icon_id);

    if let Some(entry) = entries
        .iter()
        .find(|e| e.semantics.iter().any(|p| normalize(p) == words))
    {
        return Some(entry.icon_id);
    }

    let alt_words: HashSet<&str> = words.iter().map(String::as_str).collect();
    let mut best: Option<(usize, IconId)> = None;
    for entry in entries {
        let phrases: Vec<Vec<String>> = entry.semantics.iter().map(|p| normalize(p)).collect();
        let longest = phrases
            .iter()
            .filter(|p| contains_run(&words, p))
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        let vocab: HashSet<&str> = phrases.iter().flatten().map(String::as_str).collect();
        let overlap = alt_words
            .iter()
            .filter(|w| vocab.contains(*w) && !WEAK_WORDS.contains(*w))
            .count();
        let score = 2 * longest + overlap;
        if score > 0 && best.is_none_or(|(s, _)| score > s) {
            best = Some((score, entry.icon_id));
        }
    }
    best.map(|(_, id)| id)
}

/// Query text for delegating resolution to a text-generation backend.
pub fn icon_prompt(alt_text: &str, lexicon: &Lexicon) -> String {
    let mut entries: Vec<&IconEntry> = lexicon.icons.iter().collect();
    entries.sort_by_key(|e| e.icon_id);
    let categories = entries
        .iter()
        .map(|e| {
            let ordinal = ORDINALS[usize::from(e.icon_id.get()) - 1];
            format!(
                "{ordinal} icon can be assigned an alternative description of {}",
                e.semantics.join(", ")
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    ICON_PROMPT
        .trim_end()
        .replace("{categories}", &categories)
        .replace("{alt}", alt_text)
}

/// True when `prompt` was produced by [`icon_prompt`].
pub fn is_icon_prompt(prompt: &str) -> bool {
    let head = ICON_PROMPT.split("{categories}").next().unwrap_or_default();
    prompt.starts_with(head)
}

/// Extract the alt text back out of an [`icon_prompt`] query.
pub fn icon_prompt_alt(prompt: &str) -> Option<&str> {
    let marker = "alternative description of \"";
    let start = prompt.rfind(marker)? + marker.len();
    let len = prompt[start..].find('"')?;
    Some(&prompt[start..start + len])
}

/// Read a backend's answer: an ordinal word or a number picks that icon,
/// "no" (or anything unrecognized) means none.
pub fn parse_icon_reply(reply: &str) -> Option<IconId> {
    let words = normalize(reply);
    for word in &words {
        if let Some(pos) = ORDINALS.iter().position(|o| o == word) {
            return IconId::new(pos as u8 + 1);
        }
        if let Some(id) = word.parse::<u8>().ok().and_then(IconId::new) {
            return Some(id);
        }
        if word == "no" || word == "none" {
            return None;
        }
    }
    None
}

/// Answer an icon query the way a cooperative model would, using the
/// lexical resolver. Used by the offline backend.
pub fn answer_icon_prompt(prompt: &str, lexicon: &Lexicon) -> String {
    match icon_prompt_alt(prompt).and_then(|alt| resolve_icon(alt, lexicon)) {
        Some(id) => format!("The {} icon.", ORDINALS[usize::from(id.get()) - 1]),
        None => "no".to_string(),
    }
}
