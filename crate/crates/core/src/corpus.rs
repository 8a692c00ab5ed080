//! Training corpus construction: app-disjoint sample selection and
//! prompt/completion JSONL emission.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{emit_dsl, STOP_SEQUENCE};
use crate::hierarchy::{normalize, parse_hierarchy, RICO_SCREEN};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("descriptions file: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line} is not a training example: {source}")]
    Jsonl { line: usize, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenIndexEntry {
    pub screen_id: String,
    pub app_id: String,
    pub category: String,
    pub description: String,
    pub hierarchy_path: PathBuf,
}

impl ScreenIndexEntry {
    pub fn is_selectable(&self) -> bool {
        !self.description.trim().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub max_tokens: usize,
    pub holdout_apps_per_category: usize,
    /// Screen size assumed for every hierarchy file.
    pub screen: (u32, u32),
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_samples: 1000,
            seed: 0,
            max_tokens: 4096,
            holdout_apps_per_category: 2,
            screen: RICO_SCREEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub train: Vec<ScreenIndexEntry>,
    pub holdout: Vec<ScreenIndexEntry>,
    /// How many train screens were requested but not available.
    pub shortfall: usize,
}

/// Read a `screen_id,app_id,category,description` CSV; each screen's
/// hierarchy is expected at `{rico_dir}/{screen_id}.json`.
pub fn load_index(descriptions: &Path, rico_dir: &Path) -> Result<Vec<ScreenIndexEntry>, CorpusError> {
    #[derive(Deserialize)]
    struct Row {
        screen_id: String,
        app_id: String,
        category: String,
        description: String,
    }
    let mut reader = csv::Reader::from_path(descriptions)?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: Row = row?;
        out.push(ScreenIndexEntry {
            hierarchy_path: rico_dir.join(format!("{}.json", row.screen_id)),
            screen_id: row.screen_id,
            app_id: row.app_id,
            category: row.category,
            description: row.description,
        });
    }
    Ok(out)
}

/// Split `index` into an app-level holdout and a category-balanced train
/// sample. Only entries with a description take part.
///
/// The holdout takes every screen of `holdout_apps_per_category` seeded
/// random apps in each category. Train cycles over categories, and within a
/// category over its remaining apps, taking one screen per visit until
/// `n_samples` are drawn or the pool is exhausted.
pub fn select_samples(index: &[ScreenIndexEntry], cfg: &CorpusConfig) -> Selection {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // category -> app -> screens, all in sorted order before shuffling
    let mut by_category: BTreeMap<&str, BTreeMap<&str, Vec<&ScreenIndexEntry>>> = BTreeMap::new();
    for entry in index.iter().filter(|e| e.is_selectable()) {
        by_category
            .entry(&entry.category)
            .or_default()
            .entry(&entry.app_id)
            .or_default()
            .push(entry);
    }
    for apps in by_category.values_mut() {
        for screens in apps.values_mut() {
            screens.sort_by(|a, b| a.screen_id.cmp(&b.screen_id));
        }
    }

    let mut held_apps: HashSet<&str> = HashSet::new();
    for apps in by_category.values() {
        let mut names: Vec<&str> = apps.keys().copied().collect();
        names.shuffle(&mut rng);
        held_apps.extend(names.into_iter().take(cfg.holdout_apps_per_category));
    }

    let mut holdout = Vec::new();
    // per category: queue of (app screens) still offering samples
    let mut queues: Vec<Vec<Vec<&ScreenIndexEntry>>> = Vec::new();
    for apps in by_category.values() {
        let mut remaining = Vec::new();
        for (app, screens) in apps {
            if held_apps.contains(app) {
                holdout.extend(screens.iter().map(|e| (*e).clone()));
            } else {
                let mut screens = screens.clone();
                screens.shuffle(&mut rng);
                remaining.push(screens);
            }
        }
        remaining.shuffle(&mut rng);
        if !remaining.is_empty() {
            queues.push(remaining);
        }
    }

    let mut train = Vec::with_capacity(cfg.n_samples);
    let mut cursors = vec![0usize; queues.len()];
    let mut taken: Vec<Vec<usize>> = queues.iter().map(|apps| vec![0; apps.len()]).collect();
    'outer: while train.len() < cfg.n_samples {
        let mut progressed = false;
        for (c, apps) in queues.iter().enumerate() {
            if train.len() == cfg.n_samples {
                break 'outer;
            }
            // next app in this category's rotation that still has screens
            for _ in 0..apps.len() {
                let a = cursors[c] % apps.len();
                cursors[c] += 1;
                if let Some(entry) = apps[a].get(taken[c][a]) {
                    taken[c][a] += 1;
                    train.push((*entry).clone());
                    progressed = true;
                    break;
                }
            }
        }
        if !progressed {
            break;
        }
    }

    Selection {
        shortfall: cfg.n_samples - train.len(),
        train,
        holdout,
    }
}

/// Rough token count: a quarter of the character count, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub prompt: String,
    pub completion: String,
    #[serde(skip)]
    pub token_estimate: usize,
}

impl TrainingExample {
    pub fn new(prompt: impl Into<String>, completion: impl Into<String>) -> Self {
        let (prompt, completion) = (prompt.into(), completion.into());
        let token_estimate = estimate_tokens(&prompt) + estimate_tokens(&completion);
        Self {
            prompt,
            completion,
            token_estimate,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub examples: Vec<TrainingExample>,
    /// Screens whose example would exceed the token ceiling.
    pub skipped_oversized: usize,
    /// Screens that could not be read or parsed, with the reason.
    pub failed: Vec<(String, String)>,
}

enum Built {
    Example(TrainingExample),
    Oversized,
    Failed(String),
}

/// Convert each sample to a training example, in input order.
pub fn build_examples(samples: &[ScreenIndexEntry], cfg: &CorpusConfig) -> BuildReport {
    let built: Vec<Built> = samples
        .par_iter()
        .map(|entry| {
            let raw = match fs::read_to_string(&entry.hierarchy_path) {
                Ok(raw) => raw,
                Err(e) => return Built::Failed(format!("{}: {e}", entry.hierarchy_path.display())),
            };
            let tree = match parse_hierarchy(&raw, cfg.screen) {
                Ok(tree) => tree,
                Err(e) => return Built::Failed(e.to_string()),
            };
            let example = TrainingExample::new(entry.description.clone(), emit_dsl(&normalize(&tree)));
            if example.token_estimate > cfg.max_tokens {
                Built::Oversized
            } else {
                Built::Example(example)
            }
        })
        .collect();

    let mut report = BuildReport::default();
    for (entry, outcome) in samples.iter().zip(built) {
        match outcome {
            Built::Example(example) => report.examples.push(example),
            Built::Oversized => {
                tracing::info!(screen = %entry.screen_id, "skipping screen over token ceiling");
                report.skipped_oversized += 1;
            }
            Built::Failed(reason) => {
                tracing::warn!(screen = %entry.screen_id, %reason, "skipping unreadable screen");
                report.failed.push((entry.screen_id.clone(), reason));
            }
        }
    }
    report
}

/// One `{"prompt": …, "completion": …}` object per line.
pub fn write_jsonl(examples: &[TrainingExample], mut out: impl Write) -> io::Result<()> {
    for example in examples {
        serde_json::to_writer(&mut out, example)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn emit_jsonl(examples: &[TrainingExample], path: &Path) -> Result<(), CorpusError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_jsonl(examples, io::BufWriter::new(file)).map_err(io_err(path))
}

pub fn read_jsonl(input: impl BufRead) -> Result<Vec<TrainingExample>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: PathBuf::from("<jsonl>"),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let example: TrainingExample =
            serde_json::from_str(&line).map_err(|source| CorpusError::Jsonl { line: i + 1, source })?;
        out.push(TrainingExample::new(example.prompt, example.completion));
    }
    Ok(out)
}

pub fn load_jsonl(path: &Path) -> Result<Vec<TrainingExample>, CorpusError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    read_jsonl(io::BufReader::new(file))
}

/// Hyperparameters handed to an external fine-tune job.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinetuneManifest {
    pub learning_rate: f64,
    pub batch_size: u32,
    pub epochs: u32,
}

impl Default for FinetuneManifest {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            batch_size: 256,
            epochs: 4,
        }
    }
}

pub fn finetune_manifest() -> String {
    serde_json::to_string(&FinetuneManifest::default()).expect("manifest serializes")
}

pub fn emit_finetune_manifest(path: &Path) -> Result<(), CorpusError> {
    fs::write(path, finetune_manifest()).map_err(io_err(path))
}

/// Sanity view of a selection: (categories in train, apps in both sets).
pub fn selection_stats(sel: &Selection) -> (usize, usize) {
    let categories: BTreeSet<&str> = sel.train.iter().map(|e| e.category.as_str()).collect();
    let train_apps: BTreeSet<&str> = sel.train.iter().map(|e| e.app_id.as_str()).collect();
    let overlap = sel
        .holdout
        .iter()
        .map(|e| e.app_id.as_str())
        .collect::<BTreeSet<_>>()
        .intersection(&train_apps)
        .count();
    (categories.len(), overlap)
}

/// Every completion must end at the stop sequence.
pub fn completion_is_terminated(example: &TrainingExample) -> bool {
    example.completion.ends_with(STOP_SEQUENCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use proptest::prelude::*;

    fn entry(screen: &str, app: &str, category: &str) -> ScreenIndexEntry {
        ScreenIndexEntry {
            screen_id: screen.into(),
            app_id: app.into(),
            category: category.into(),
            description: format!("screen {screen}"),
            hierarchy_path: PathBuf::from(format!("{screen}.json")),
        }
    }

    #[test]
    fn token_estimates() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("12345678"), 2);
        assert_eq!(estimate_tokens("123456789"), 3);
        assert_eq!(estimate_tokens("日本語"), 1);
    }

    #[test]
    fn two_apps_one_category_split() {
        let index = vec![
            entry("1", "a", "c"),
            entry("2", "a", "c"),
            entry("3", "b", "c"),
            entry("4", "b", "c"),
        ];
        let cfg = CorpusConfig {
            n_samples: 2,
            holdout_apps_per_category: 1,
            ..CorpusConfig::default()
        };
        // Brute force: the only splits with disjoint apps, one held-out app
        // and two train screens put both screens of one app on each side.
        for seed in 0..20 {
            let sel = select_samples(&index, &CorpusConfig { seed, ..cfg });
            let train_apps = synth::apps_of(&sel.train);
            let hold_apps = synth::apps_of(&sel.holdout);
            assert_eq!(train_apps.len(), 1);
            assert_eq!(hold_apps.len(), 1);
            assert!(train_apps.is_disjoint(&hold_apps));
            assert_eq!(sel.train.len(), 2);
            assert_eq!(sel.holdout.len(), 2);
            assert_eq!(sel.shortfall, 0);
        }
    }

    #[test]
    fn zero_samples_still_holds_out() {
        let index = synth::synthetic_index(3, 4, 5);
        let sel = select_samples(
            &index,
            &CorpusConfig {
                n_samples: 0,
                ..CorpusConfig::default()
            },
        );
        assert!(sel.train.is_empty());
        assert_eq!(sel.holdout.len(), 3 * 2 * 5);
    }

    #[test]
    fn shortfall_is_reported() {
        let index = synth::synthetic_index(2, 3, 2);
        let sel = select_samples(
            &index,
            &CorpusConfig {
                n_samples: 10,
                ..CorpusConfig::default()
            },
        );
        assert_eq!(sel.train.len(), 4);
        assert_eq!(sel.shortfall, 6);
    }

    #[test]
    fn descriptionless_screens_are_not_selected() {
        let mut index = synth::synthetic_index(1, 3, 2);
        index[4].description = "  ".into();
        let sel = select_samples(
            &index,
            &CorpusConfig {
                n_samples: 10,
                holdout_apps_per_category: 0,
                ..CorpusConfig::default()
            },
        );
        assert_eq!(sel.train.len(), 5);
    }

    #[test]
    fn categories_are_interleaved() {
        let index = synth::synthetic_index(5, 4, 10);
        let sel = select_samples(
            &index,
            &CorpusConfig {
                n_samples: 10,
                ..CorpusConfig::default()
            },
        );
        let (categories, overlap) = selection_stats(&sel);
        assert_eq!(categories, 5);
        assert_eq!(overlap, 0);
        let first_round: BTreeSet<_> = sel.train[..5].iter().map(|e| &e.category).collect();
        assert_eq!(first_round.len(), 5);
    }

    #[test]
    fn build_counts_skips_and_failures() {
        let dir = tempfile::tempdir().unwrap();
        let mut index = synth::write_synthetic_corpus(dir.path(), 1, 1, 3, 1).unwrap();
        index[1].hierarchy_path = dir.path().join("missing.json");
        let cfg = CorpusConfig::default();
        let report = build_examples(&index, &cfg);
        assert_eq!(report.examples.len(), 2);
        assert_eq!(report.failed.len(), 1);
        assert_eq!(report.examples[0].prompt, index[0].description);
        assert!(report.examples.iter().all(completion_is_terminated));

        let tight = CorpusConfig { max_tokens: 10, ..cfg };
        let report = build_examples(&index, &tight);
        assert!(report.examples.is_empty());
        assert_eq!(report.skipped_oversized, 2);

        assert!(build_examples(&[], &cfg).examples.is_empty());
    }

    #[test]
    fn manifest_values() {
        assert_eq!(
            finetune_manifest(),
            r#"{"learning_rate":0.1,"batch_size":256,"epochs":4}"#
        );
    }

    #[test]
    fn jsonl_lines_parse() {
        let examples = vec![
            TrainingExample::new("a", "<html></html>"),
            TrainingExample::new("b \"q\"", "x\ny"),
            TrainingExample::new("c", "z"),
        ];
        let mut buf = Vec::new();
        write_jsonl(&examples, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        for line in text.lines() {
            serde_json::from_str::<serde_json::Value>(line).unwrap();
        }
    }

    proptest! {
        #[test]
        fn estimate_is_subadditive(a in ".{0,64}", b in ".{0,64}") {
            let joined = format!("{a}{b}");
            prop_assert!(estimate_tokens(&joined) <= estimate_tokens(&a) + estimate_tokens(&b) + 1);
            prop_assert!(estimate_tokens(&joined) >= estimate_tokens(&a));
        }

        #[test]
        fn jsonl_round_trip(pairs in proptest::collection::vec((".{0,40}", ".{0,80}"), 0..8)) {
            let examples: Vec<_> = pairs.iter().map(|(p, c)| TrainingExample::new(p.clone(), c.clone())).collect();
            let mut buf = Vec::new();
            write_jsonl(&examples, &mut buf).unwrap();
            prop_assert_eq!(read_jsonl(buf.as_slice()).unwrap(), examples);
        }

        #[test]
        fn train_and_holdout_never_share_apps(seed in any::<u64>(), n in 0usize..200) {
            let index = synth::synthetic_index(4, 5, 6);
            let sel = select_samples(&index, &CorpusConfig { n_samples: n, seed, ..CorpusConfig::default() });
            prop_assert!(synth::apps_of(&sel.train).is_disjoint(&synth::apps_of(&sel.holdout)));
            prop_assert_eq!(sel.train.len() + sel.shortfall, n);
        }
    }
}
