//! Typography plans checked against exhaustive enumeration of every word
//! wrapping at every ladder size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiregen_core::beautify::typography::{measure, TypographyConfig};
use wiregen_core::{optimize_typography, Alignment, FontClass, Rect};

/// Largest feasible bounding area (tenths of px squared) over all
/// `2^(k-1)` wrappings and all sizes, or `None` if nothing fits.
fn brute_force(words: &[&str], font_class: FontClass, bbox: Rect) -> Option<u128> {
    let cfg = TypographyConfig::bundled();
    let k = words.len();
    let mut best = None;
    for mask in 0u32..(1 << (k - 1)) {
        let mut widest = 0u64;
        let mut lines = 1u64;
        let mut current = words[0].chars().count() as u64;
        for (i, word) in words.iter().enumerate().skip(1) {
            let len = word.chars().count() as u64;
            if mask & (1 << (i - 1)) != 0 {
                widest = widest.max(current);
                current = len;
                lines += 1;
            } else {
                current += 1 + len;
            }
        }
        widest = widest.max(current);
        for font in cfg.ladder(font_class) {
            let f = u64::from(font);
            let width = cfg.glyph_width_tenths * f * widest;
            let height = cfg.line_height_tenths * f * lines;
            if width <= 10 * u64::from(bbox.width) && height <= 10 * u64::from(bbox.height) {
                let area = u128::from(width) * u128::from(height);
                best = Some(best.map_or(area, |b: u128| b.max(area)));
            }
        }
    }
    best
}

fn random_case(rng: &mut ChaCha8Rng) -> (String, FontClass, Rect) {
    let k = rng.random_range(1..=12);
    let words: Vec<String> = (0..k)
        .map(|_| {
            let len = rng.random_range(1..=10);
            (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
        })
        .collect();
    let class = [FontClass::Title, FontClass::Normal, FontClass::Subtitle][rng.random_range(0..3)];
    let bbox = Rect::new(0, 0, rng.random_range(10..600), rng.random_range(8..240));
    (words.join(" "), class, bbox)
}

#[test]
fn plans_match_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let mut feasible = 0;
    for case in 0..200 {
        let (text, class, bbox) = random_case(&mut rng);
        let words: Vec<&str> = text.split(' ').collect();
        let plan = optimize_typography(&text, class, bbox).unwrap();
        assert_eq!(plan.lines.join(" "), text, "case {case}");

        let metrics = measure(&plan.lines, plan.font_px, bbox);
        match brute_force(&words, class, bbox) {
            Some(best) => {
                feasible += 1;
                assert!(plan.fits, "case {case}: {text:?} in {bbox:?}");
                assert!(metrics.fits());
                assert_eq!(metrics.area(), best, "case {case}: {text:?} in {bbox:?}");
                assert_eq!(plan.occupied_ratio, best as f64 / metrics.box_area() as f64);
            }
            None => assert!(!plan.fits, "case {case}"),
        }
        let expected = if plan.lines.len() == 1 {
            Alignment::Center
        } else {
            Alignment::Left
        };
        assert_eq!(plan.alignment, expected, "case {case}");
    }
    // the generator must exercise the feasible path most of the time
    assert!(feasible > 120, "only {feasible} feasible cases");
}
