use serde::{Deserialize, Serialize};

use super::{GenerationError, Mode};
use crate::corpus::{estimate_tokens, TrainingExample};

/// Fixed instruction that opens every prompt. Versioned by file name.
pub const INSTRUCTION_HEADER: &str = include_str!("../../resources/instruction_header.v1.txt");

const DESCRIPTION_MARKER: &str = "Description: ";
const OUTPUT_MARKER: &str = "HTML:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptText {
    pub text: String,
    pub token_estimate: usize,
}

impl PromptText {
    pub fn new(text: String) -> Self {
        Self {
            token_estimate: estimate_tokens(&text),
            text,
        }
    }
}

fn render(description: &str, exemplars: &[&TrainingExample]) -> String {
    let mut text = String::from(INSTRUCTION_HEADER.trim_end());
    text.push_str("\n\n");
    for ex in exemplars {
        text.push_str(DESCRIPTION_MARKER);
        text.push_str(ex.prompt.trim());
        text.push('\n');
        text.push_str(OUTPUT_MARKER);
        text.push('\n');
        text.push_str(ex.completion.trim_end());
        text.push_str("\n\n");
    }
    text.push_str(DESCRIPTION_MARKER);
    text.push_str(description.trim());
    text.push('\n');
    text.push_str(OUTPUT_MARKER);
    text.push('\n');
    text
}

/// Build the prompt for `description`.
///
/// Few-shot prompts take the first `k` exemplars. While the prompt is over
/// `budget`, the largest chosen exemplar is swapped for the next unused one;
/// if no such swap is left the prompt overflows.
pub fn assemble_prompt(
    description: &str,
    mode: Mode,
    exemplars: &[TrainingExample],
    budget: usize,
) -> Result<PromptText, GenerationError> {
    let bare = PromptText::new(render(description, &[]));
    if bare.token_estimate > budget {
        return Err(GenerationError::PromptOverflow {
            estimate: bare.token_estimate,
            budget,
        });
    }
    let k = match mode {
        Mode::ZeroShot | Mode::FineTuned => return Ok(bare),
        Mode::FewShot { k } => k,
    };
    if exemplars.len() < k {
        return Err(GenerationError::NotEnoughExemplars {
            needed: k,
            available: exemplars.len(),
        });
    }

    let mut chosen: Vec<usize> = (0..k).collect();
    let mut next = k;
    loop {
        let picked: Vec<&TrainingExample> = chosen.iter().map(|&i| &exemplars[i]).collect();
        let prompt = PromptText::new(render(description, &picked));
        if prompt.token_estimate <= budget {
            return Ok(prompt);
        }
        if next >= exemplars.len() {
            return Err(GenerationError::PromptOverflow {
                estimate: prompt.token_estimate,
                budget,
            });
        }
        let largest = (0..chosen.len())
            .max_by_key(|&p| (exemplars[chosen[p]].token_estimate, p))
            .expect("k >= 1");
        chosen.remove(largest);
        chosen.push(next);
        chosen.sort_unstable();
        next += 1;
    }
}

/// The final description in a prompt built by [`assemble_prompt`], or the
/// whole text when it carries no markers.
pub fn extract_description(prompt: &str) -> &str {
    match prompt.rfind(DESCRIPTION_MARKER) {
        Some(start) => {
            let rest = &prompt[start + DESCRIPTION_MARKER.len()..];
            rest.split('\n').next().unwrap_or(rest).trim()
        }
        None => prompt.trim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exemplar(desc: &str, size: usize) -> TrainingExample {
        TrainingExample::new(desc, format!("<html><body>{}</body></html>", "x".repeat(size)))
    }

    #[test]
    fn zero_shot_is_header_and_description() {
        let prompt = assemble_prompt("a login page", Mode::ZeroShot, &[], 4096).unwrap();
        assert!(prompt.text.starts_with(INSTRUCTION_HEADER.trim_end()));
        assert!(prompt.text.ends_with("Description: a login page\nHTML:\n"));
        assert_eq!(prompt.text.matches(DESCRIPTION_MARKER).count(), 1);
        assert_eq!(extract_description(&prompt.text), "a login page");
    }

    #[test]
    fn few_shot_puts_exemplars_first() {
        let ex = [exemplar("first screen", 10), exemplar("second screen", 10)];
        let prompt = assemble_prompt("a music player", Mode::FewShot { k: 2 }, &ex, 4096).unwrap();
        let text = &prompt.text;
        let final_at = text.rfind("a music player").unwrap();
        for e in &ex {
            let at = text.find(&e.completion).unwrap();
            assert!(at < final_at);
        }
        assert_eq!(text.matches(OUTPUT_MARKER).count(), 3);
        assert_eq!(extract_description(text), "a music player");
    }

    #[test]
    fn few_shot_needs_enough_exemplars() {
        let ex = [exemplar("only", 1)];
        let err = assemble_prompt("x", Mode::FewShot { k: 2 }, &ex, 4096).unwrap_err();
        assert!(matches!(
            err,
            GenerationError::NotEnoughExemplars {
                needed: 2,
                available: 1
            }
        ));
    }

    #[test]
    fn largest_exemplar_is_swapped_out() {
        let ex = [exemplar("big", 20_000), exemplar("small", 40), exemplar("spare", 40)];
        let prompt = assemble_prompt("x", Mode::FewShot { k: 2 }, &ex, 4096).unwrap();
        assert!(!prompt.text.contains("Description: big"));
        assert!(prompt.text.contains("Description: small"));
        assert!(prompt.text.contains("Description: spare"));
        assert!(prompt.token_estimate <= 4096);
    }

    #[test]
    fn overflow_is_reported() {
        let long = "word ".repeat(20_000);
        assert!(matches!(
            assemble_prompt(&long, Mode::ZeroShot, &[], 4096),
            Err(GenerationError::PromptOverflow { .. })
        ));
        let ex = [exemplar("big", 20_000), exemplar("bigger", 30_000)];
        assert!(matches!(
            assemble_prompt("x", Mode::FewShot { k: 1 }, &ex, 4096),
            Err(GenerationError::PromptOverflow { .. })
        ));
    }
}
