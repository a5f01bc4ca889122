//! Regenerates the bundled synthetic corpus under `fixtures/synthetic`.
//!
//! ```text
//! cargo run -p capsift-core --example make_fixture [-- <out-dir>]
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 24;
const SEED: u64 = 2021;

const STOP: &[&str] = &[
    "the", "and", "of", "to", "is", "that", "it", "this", "in", "they", "we", "you", "are", "was", "for", "with",
];

const MISINFO: &[&str] = &[
    "hoax",
    "coverup",
    "secret",
    "elites",
    "lies",
    "hidden",
    "agenda",
    "sheeple",
    "wake",
    "suppressed",
    "truthers",
    "controlled",
    "propaganda",
    "fake",
    "conspiracy",
];
const NEUTRAL: &[&str] = &[
    "today",
    "weather",
    "recipe",
    "garden",
    "travel",
    "music",
    "weekend",
    "family",
    "morning",
    "coffee",
    "channel",
    "subscribe",
    "video",
    "update",
    "episode",
];
const DEBUNK: &[&str] = &[
    "evidence",
    "study",
    "scientists",
    "data",
    "peer",
    "reviewed",
    "myth",
    "debunked",
    "experiment",
    "measurement",
    "physics",
    "research",
    "consensus",
    "verified",
    "analysis",
];
const FILLER: &[&str] = &[
    "people", "thing", "really", "going", "know", "look", "time", "world", "just", "think", "make", "good", "right",
    "little", "talk", "show", "see", "year", "point", "question",
];
const VACCINES: &[&str] = &["vaccine", "vaccines", "shot", "immunity", "virus", "doctor"];
const FLATEARTH: &[&str] = &["earth", "flat", "globe", "horizon", "curve", "nasa"];

fn class_words(label: i32) -> &'static [&'static str] {
    match label {
        1 => MISINFO,
        0 => NEUTRAL,
        _ => DEBUNK,
    }
}

fn caption(rng: &mut ChaCha8Rng, label: i32, topic_words: &[&str], words: usize) -> String {
    let cue_rate = rng.random_range(0.05..0.3);
    let mut out = String::new();
    for i in 0..words {
        let r: f64 = rng.random();
        let w = if r < 0.3 {
            STOP.choose(rng).unwrap()
        } else if r < 0.3 + cue_rate * 0.7 {
            // cues leak across classes so the task is not trivially separable
            let cue_class = if rng.random::<f64>() < 0.45 {
                rng.random_range(-1..=1)
            } else {
                label
            };
            class_words(cue_class).choose(rng).unwrap()
        } else if r < 0.85 {
            FILLER.choose(rng).unwrap()
        } else {
            topic_words.choose(rng).unwrap()
        };
        if i > 0 {
            out.push(if i % 12 == 0 { '\n' } else { ' ' });
        }
        out.push_str(w);
        if i % 12 == 11 {
            out.push('.');
        }
    }
    out.push('\n');
    out
}

fn vector(rng: &mut ChaCha8Rng, direction: Option<usize>) -> Vec<f32> {
    let mut v: Vec<f32> = (0..DIM).map(|_| rng.random_range(-0.5f32..0.5)).collect();
    if let Some(d) = direction {
        v[d] += 2.0;
    }
    v
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic"));
    let captions = out.join("captions");
    fs::create_dir_all(&captions).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut glove = String::new();
    for (class, words) in [(0, MISINFO), (1, NEUTRAL), (2, DEBUNK)] {
        for w in words {
            let v = vector(&mut rng, Some(class));
            writeln!(
                glove,
                "{w} {}",
                v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(" ")
            )
            .unwrap();
        }
    }
    for w in FILLER.iter().chain(VACCINES).chain(FLATEARTH) {
        let v = vector(&mut rng, None);
        writeln!(
            glove,
            "{w} {}",
            v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(" ")
        )
        .unwrap();
    }
    fs::write(out.join("synth24.glove.txt"), glove).unwrap();

    let mut manifest = String::from("video_id,topic,label,caption_path,views,likes,dislikes,comments\n");
    // imbalanced: misinformation, neutral, debunking
    let plan = [(1, 16), (0, 10), (-1, 6)];
    for (topic, topic_words) in [("vaccines", VACCINES), ("flatearth", FLATEARTH)] {
        let mut n = 0;
        for (label, count) in plan {
            for _ in 0..count {
                n += 1;
                let id = format!("{topic}-{n:03}");
                let words = rng.random_range(120..200);
                fs::write(
                    captions.join(format!("{id}.txt")),
                    caption(&mut rng, label, topic_words, words),
                )
                .unwrap();
                let views: u64 = rng.random_range(100..500_000);
                writeln!(
                    manifest,
                    "{id},{topic},{label},{id}.txt,{views},{},{},{}",
                    views / rng.random_range(10..60),
                    views / rng.random_range(100..900),
                    views / rng.random_range(50..400)
                )
                .unwrap();
            }
        }
    }

    // edge cases: too short, no in-vocabulary tokens, missing caption file
    fs::write(captions.join("vaccines-short.txt"), "the shot is a hoax and they lie\n").unwrap();
    writeln!(manifest, "vaccines-short,vaccines,1,vaccines-short.txt,10,1,0,0").unwrap();
    let mut oov = String::new();
    for i in 0..90 {
        write!(oov, "{} zorblat{} ", STOP[i % STOP.len()], i % 7).unwrap();
    }
    fs::write(captions.join("flatearth-oov.txt"), oov.trim_end().to_string() + "\n").unwrap();
    writeln!(manifest, "flatearth-oov,flatearth,0,flatearth-oov.txt,20,2,0,1").unwrap();
    writeln!(manifest, "flatearth-missing,flatearth,-1,flatearth-missing.txt,30,,,").unwrap();

    fs::write(out.join("manifest.csv"), manifest).unwrap();
    fs::write(
        out.join("capsift.conf"),
        "# synthetic two-topic corpus\n\
         manifest = manifest.csv\n\
         captions = captions\n\
         embedding.synth24 = synth24.glove.txt\n\
         topics = vaccines,flatearth\n\
         task = both\n\
         seed = 7\n\
         t_values = 1,3,5\n\
         out = out\n",
    )
    .unwrap();
    println!("wrote fixture to {}", out.display());
}
