//! Seeded generators for synthetic test data.
//!
//! Used by the property tests, the acceptance suite and the benches. Every
//! generator is a pure function of its seed.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::beautify::icons::IconId;
use crate::beautify::lint::LintKind;
use crate::corpus::ScreenIndexEntry;
use crate::dsl::{map_tree, Rect, Tag, WireframeDocument, WireframeElement};
use crate::hierarchy::{normalize, PixelBounds, UiNode, UiTree, RICO_SCREEN};

/// Every class named in the conversion table, plus common layouts and a
/// few vendor widgets that fall through to containers.
pub const CLASSES: &[&str] = &[
    "android.widget.TextView",
    "android.widget.Button",
    "android.widget.ToggleButton",
    "android.widget.ImageView",
    "android.widget.ImageButton",
    "android.widget.EditText",
    "android.widget.CheckBox",
    "android.widget.Switch",
    "android.widget.RadioButton",
    "android.widget.DatePicker",
    "android.widget.Spinner",
    "android.widget.VideoView",
    "android.widget.LinearLayout",
    "android.widget.FrameLayout",
    "android.widget.RelativeLayout",
    "android.support.v7.widget.RecyclerView",
    "com.example.CustomCardView",
];

const WORDS: &[&str] = &[
    "settings",
    "Sign",
    "in",
    "Search",
    "flights",
    "more",
    "options",
    "Back",
    "profile",
    "Share",
    "a",
    "the",
    "Play",
    "music",
    "café",
    "naïve",
    "Fish",
    "&",
    "chips",
    "<b>",
    "\"quoted\"",
    "it's",
    "50%",
    "x>y",
    "日本",
    "🎵",
    "navigate",
    "up",
    "Close",
    "help",
    "home",
    "menu",
];

const ID_POOL: &[&str] = &[
    "title",
    "subtitle",
    "button",
    "icon",
    "text",
    "com.app:id/login_button",
    "android:id/content",
    "toolbar",
    "9lives",
    "weird id!",
    "a.b.c",
    "",
];

fn phrase(rng: &mut ChaCha8Rng, max_words: usize) -> String {
    let n = rng.random_range(1..=max_words);
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    if rng.random_bool(0.1) {
        // stray whitespace that ingest must collapse
        words.insert(0, " \t");
    }
    words.join(" ")
}

fn random_bounds(rng: &mut ChaCha8Rng, parent: PixelBounds, screen: (u32, u32)) -> PixelBounds {
    let (w, h) = (i64::from(screen.0), i64::from(screen.1));
    match rng.random_range(0..20) {
        // zero area
        0 => {
            let l = rng.random_range(0..w);
            let t = rng.random_range(0..h);
            PixelBounds::new(l, t, l, t + rng.random_range(0..50))
        }
        // partly or wholly off screen
        1 => {
            let l = rng.random_range(-200..w + 200);
            let t = rng.random_range(-200..h + 200);
            PixelBounds::new(l, t, l + rng.random_range(1..400), t + rng.random_range(1..400))
        }
        _ => {
            let pw = parent.width().max(1);
            let ph = parent.height().max(1);
            let l = parent.left + rng.random_range(0..pw);
            let t = parent.top + rng.random_range(0..ph);
            let r = (l + rng.random_range(1..=pw)).min(parent.right.max(l + 1));
            let b = (t + rng.random_range(1..=ph)).min(parent.bottom.max(t + 1));
            PixelBounds::new(l, t, r, b)
        }
    }
}

fn random_node(rng: &mut ChaCha8Rng, parent: PixelBounds, screen: (u32, u32)) -> UiNode {
    let class = *CLASSES.choose(rng).unwrap();
    let mut node = UiNode::new(class, random_bounds(rng, parent, screen));
    if rng.random_bool(0.6) {
        node.resource_id = Some(ID_POOL.choose(rng).unwrap().to_string());
    }
    if rng.random_bool(0.7) {
        node.text = Some(phrase(rng, 6));
    }
    if rng.random_bool(0.5) {
        node.content_desc = Some(phrase(rng, 4));
    }
    node.clickable = rng.random_bool(0.3);
    node.visible = rng.random_bool(0.92);
    node
}

/// A raw, unnormalized screen tree with up to `max_nodes` nodes. It mixes
/// in the awkward cases real dumps have: hidden or degenerate nodes, bad
/// ids and text that needs escaping.
pub fn random_raw_tree(seed: u64, max_nodes: usize) -> UiTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let screen = *[RICO_SCREEN, (1080, 1920), (360, 640)].choose(&mut rng).unwrap();
    let root_bounds = PixelBounds::new(0, 0, i64::from(screen.0), i64::from(screen.1));
    let mut root = UiNode::new("android.widget.FrameLayout", root_bounds);
    if rng.random_bool(0.5) {
        root.resource_id = Some("content".into());
    }

    let n = rng.random_range(0..max_nodes.max(1));
    // Grow by attaching each new node under a random existing node, addressed
    // by its child-index path from the root.
    let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        let parent_path = paths.choose(&mut rng).unwrap().clone();
        let parent = node_at(&mut root, &parent_path);
        let child = random_node(&mut rng, parent.bounds, screen);
        parent.children.push(child);
        let mut path = parent_path;
        path.push(parent.children.len() - 1);
        paths.push(path);
    }
    UiTree::new(root, screen)
}

fn node_at<'a>(root: &'a mut UiNode, path: &[usize]) -> &'a mut UiNode {
    path.iter().fold(root, |node, &i| &mut node.children[i])
}

/// Serialize a tree in the Rico view-hierarchy layout.
pub fn rico_json(tree: &UiTree) -> String {
    fn node(n: &UiNode) -> Value {
        let b = n.bounds;
        let mut obj = json!({
            "class": n.native_class,
            "bounds": [b.left, b.top, b.right, b.bottom],
            "clickable": n.clickable,
            "visible-to-user": n.visible,
        });
        let map = obj.as_object_mut().unwrap();
        if let Some(id) = &n.resource_id {
            map.insert("resource-id".into(), json!(id));
        }
        if let Some(text) = &n.text {
            map.insert("text".into(), json!(text));
        }
        if let Some(desc) = &n.content_desc {
            map.insert("content-desc".into(), json!([desc]));
        }
        if !n.children.is_empty() {
            map.insert("children".into(), n.children.iter().map(node).collect());
        }
        obj
    }
    let activity = if tree.app_id.is_empty() {
        "com.example/.Main".to_string()
    } else {
        format!("{}/.Main", tree.app_id)
    };
    json!({
        "activity_name": activity,
        "activity": { "root": node(&tree.root) },
    })
    .to_string()
}

/// A random document as the parser would return it for a converted
/// screen, with icons assigned to some images.
pub fn random_document(seed: u64, max_nodes: usize) -> WireframeDocument {
    let mut doc = map_tree(&normalize(&random_raw_tree(seed, max_nodes)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1c0);
    doc.for_each_mut(|el| {
        if el.tag.carries_alt() && rng.random_bool(0.5) {
            el.icon = IconId::new(rng.random_range(1..=10));
        }
    });
    doc
}

/// A flaw planted in a [`CorruptedDocument`], with the element ids the
/// linter is expected to report for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededFlaw {
    pub kind: LintKind,
    pub element_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedDocument {
    pub document: WireframeDocument,
    pub seeded: Vec<SeededFlaw>,
}

const LABELS: &[&str] = &[
    "Sign in",
    "Create account",
    "Forgot password",
    "Search",
    "Recent",
    "Favorites",
    "Settings",
    "Profile",
    "Notifications",
    "Help",
    "About",
    "Privacy",
    "Language",
    "Storage",
    "Share app",
    "Rate us",
];

/// A clean single-column layout with one of each flaw class planted (more
/// for larger seeds' layouts). The clean base has no lint findings.
pub fn corrupted_document(seed: u64) -> CorruptedDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (width, height) = (360u32, 640u32);
    let rows = rng.random_range(4..=8usize);
    let mut labels: Vec<&str> = LABELS.to_vec();
    labels.shuffle(&mut rng);

    let mut elements: Vec<WireframeElement> = (0..rows)
        .map(|i| {
            let top = 16 + 64 * i as i32;
            let tag = *[Tag::Paragraph, Tag::Button, Tag::TextInput, Tag::Checkbox]
                .choose(&mut rng)
                .unwrap();
            let left = rng.random_range(8..40);
            let w = rng.random_range(120..(width as i32 - left - 8)) as u32;
            WireframeElement::new(format!("row{i}"), tag, Rect::new(left, top, w, 40)).with_text(labels[i])
        })
        .collect();
    if rng.random_bool(0.5) {
        // an icon beside the first row
        elements.push(
            WireframeElement::new("icon", Tag::Image, Rect::new(width as i32 - 48, 600, 40, 32))
                .with_alt("more options"),
        );
    }

    let mut seeded = Vec::new();
    let mut rows_left: Vec<usize> = (0..rows).collect();
    rows_left.shuffle(&mut rng);

    // Duplicate: a near-copy of a row directly after it.
    let dup_of = rows_left.pop().unwrap();
    let original = elements[dup_of].clone();
    let dup_id = format!("{}_copy", original.id);
    let mut copy = WireframeElement::new(&dup_id, original.tag, original.bbox);
    copy.text = original.text.clone();
    copy.bbox.left += rng.random_range(0..=3);
    copy.bbox.top += rng.random_range(0..=3);
    seeded.push(SeededFlaw {
        kind: LintKind::Duplication,
        element_ids: vec![original.id.clone(), dup_id],
    });

    // Occlusion: a new text element over the lower part of another row.
    let under = rows_left.pop().unwrap();
    let anchor = elements[under].bbox;
    let overlay_id = format!("overlay{under}");
    let overlay = WireframeElement::new(
        &overlay_id,
        Tag::Paragraph,
        Rect::new(
            anchor.left + rng.random_range(0..20),
            anchor.top + rng.random_range(10..30),
            100,
            30,
        ),
    )
    .with_text("Overlay note");
    seeded.push(SeededFlaw {
        kind: LintKind::Occlusion,
        element_ids: vec![elements[under].id.clone(), overlay_id],
    });

    // Out of bound: stretch a row past the right or bottom edge, or left.
    let off = rows_left.pop().unwrap();
    let el = &mut elements[off];
    match rng.random_range(0..3) {
        0 => el.bbox.width = (width as i32 - el.bbox.left) as u32 + rng.random_range(10..200),
        1 => el.bbox.left = -rng.random_range(5..40),
        _ => el.bbox.top = height as i32 - 20,
    }
    seeded.push(SeededFlaw {
        kind: LintKind::OutOfBound,
        element_ids: vec![el.id.clone()],
    });

    // Assemble in order: originals, with the copy and the overlay following
    // the rows they relate to.
    let mut ordered = Vec::new();
    for (i, el) in elements.into_iter().enumerate() {
        ordered.push(el);
        if i == dup_of {
            ordered.push(copy.clone());
        }
        if i == under {
            ordered.push(overlay.clone());
        }
    }

    let roots = if rng.random_bool(0.5) {
        vec![WireframeElement::new("screen", Tag::Container, Rect::new(0, 0, width, height)).with_children(ordered)]
    } else {
        ordered
    };
    CorruptedDocument {
        document: WireframeDocument::new(width, height, roots),
        seeded,
    }
}

/// Write `categories × apps × screens` synthetic Rico screens into `dir`
/// and return their index. Every screen has a description.
pub fn write_synthetic_corpus(
    dir: &Path,
    categories: usize,
    apps_per_category: usize,
    screens_per_app: usize,
    seed: u64,
) -> io::Result<Vec<ScreenIndexEntry>> {
    fs::create_dir_all(dir)?;
    let mut index = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in 0..categories {
        let category = format!("category_{c:02}");
        for a in 0..apps_per_category {
            let app_id = format!("com.synthetic.c{c:02}.app{a:02}");
            for s in 0..screens_per_app {
                let screen_id = format!("{c:02}{a:02}{s:03}");
                let mut tree = random_raw_tree(rng.random(), 15);
                tree.app_id = app_id.clone();
                let path = dir.join(format!("{screen_id}.json"));
                fs::write(&path, rico_json(&tree))?;
                index.push(ScreenIndexEntry {
                    screen_id,
                    app_id: app_id.clone(),
                    category: category.clone(),
                    description: format!("screen {s} of app {a} in {category}"),
                    hierarchy_path: path,
                });
            }
        }
    }
    Ok(index)
}

/// Index entries without files, for selection-only tests.
pub fn synthetic_index(categories: usize, apps_per_category: usize, screens_per_app: usize) -> Vec<ScreenIndexEntry> {
    let mut index = Vec::new();
    for c in 0..categories {
        for a in 0..apps_per_category {
            for s in 0..screens_per_app {
                let screen_id = format!("{c:02}{a:02}{s:03}");
                index.push(ScreenIndexEntry {
                    hierarchy_path: format!("{screen_id}.json").into(),
                    screen_id,
                    app_id: format!("com.synthetic.c{c:02}.app{a:02}"),
                    category: format!("category_{c:02}"),
                    description: format!("screen {s}"),
                });
            }
        }
    }
    index
}

/// Distinct app ids in a set of entries.
pub fn apps_of(entries: &[ScreenIndexEntry]) -> BTreeSet<&str> {
    entries.iter().map(|e| e.app_id.as_str()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beautify::lint::{lint, LintConfig};
    use crate::dsl::validate;
    use crate::hierarchy::parse_hierarchy;

    #[test]
    fn raw_trees_are_seed_stable() {
        assert_eq!(random_raw_tree(3, 30), random_raw_tree(3, 30));
        assert_ne!(random_raw_tree(3, 30), random_raw_tree(4, 30));
    }

    #[test]
    fn rico_json_round_trips() {
        for seed in 0..20 {
            let tree = random_raw_tree(seed, 25);
            let back = parse_hierarchy(&rico_json(&tree), (tree.screen_width, tree.screen_height)).unwrap();
            assert_eq!(back.node_count(), tree.node_count());
            assert_eq!(normalize(&back).root.count(), normalize(&tree).root.count());
        }
    }

    #[test]
    fn corrupted_documents_are_valid_and_seeded() {
        for seed in 0..50 {
            let c = corrupted_document(seed);
            assert!(validate(&c.document).is_empty());
            assert_eq!(c.seeded.len(), 3);
            let findings = lint(&c.document, &LintConfig::default());
            for flaw in &c.seeded {
                assert!(
                    findings
                        .iter()
                        .any(|f| f.kind == flaw.kind && f.element_ids == flaw.element_ids),
                    "seed {seed}: {flaw:?} not in {findings:?}"
                );
            }
        }
    }
}
