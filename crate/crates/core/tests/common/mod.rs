//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use chronoturn::corpus::Corpus;
use chronoturn::synthgen::{disjoint_topics, generate, EpochSpec, SyntheticTruth};

/// Consecutive epochs of `len` years from `start`, epoch `e` dominated by
/// topics `2e` and `2e + 1` (0.4 each, 0.05 on every other topic).
pub fn epoch_specs(
    start: i32,
    epochs: usize,
    len: i32,
    docs_per_year: usize,
    doc_length: usize,
) -> Vec<EpochSpec> {
    let k = 2 * epochs;
    (0..epochs)
        .map(|e| {
            let mut mixture = vec![0.2 / (k - 2).max(1) as f64; k];
            mixture[2 * e] = 0.4;
            mixture[2 * e + 1] = 0.4;
            if k == 2 {
                mixture = vec![0.5, 0.5];
            }
            let first = start + e as i32 * len;
            EpochSpec {
                start: first,
                end: first + len - 1,
                mixture,
                docs_per_year,
                doc_length,
            }
        })
        .collect()
}

/// Planted-epoch corpus over disjoint per-topic vocabularies.
pub fn planted_corpus(
    epochs: usize,
    len: i32,
    docs_per_year: usize,
    doc_length: usize,
    words_per_topic: usize,
    seed: u64,
) -> (Corpus, SyntheticTruth) {
    let specs = epoch_specs(1990, epochs, len, docs_per_year, doc_length);
    let topic_word = disjoint_topics(2 * epochs, words_per_topic, 0, 0.0);
    generate(&specs, &topic_word, seed).expect("valid synthetic spec")
}

/// TOML spec for the `synth` command matching [`planted_corpus`].
pub fn planted_spec_toml(
    epochs: usize,
    len: i32,
    docs_per_year: usize,
    doc_length: usize,
    seed: u64,
) -> String {
    let mut s = format!(
        "seed = {seed}\n\n[topics]\ncount = {}\nwords_per_topic = 30\n",
        2 * epochs
    );
    for e in epoch_specs(1990, epochs, len, docs_per_year, doc_length) {
        let mixture: Vec<String> = e.mixture.iter().map(|m| format!("{m:?}")).collect();
        s.push_str(&format!(
            "\n[[epoch]]\nstart = {}\nend = {}\nmixture = [{}]\ndocs_per_year = {}\ndoc_length = {}\n",
            e.start,
            e.end,
            mixture.join(", "),
            e.docs_per_year,
            e.doc_length
        ));
    }
    s
}

pub fn chronoturn(args: &[&str], dir: &Path) -> Output {
    chronoturn_with_input(args, dir, None)
}

pub fn chronoturn_with_input(args: &[&str], dir: &Path, stdin: Option<&str>) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_chronoturn"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn chronoturn");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().expect("chronoturn output")
}

/// Runs the binary and panics with its stderr on failure; returns stdout.
pub fn chronoturn_ok(args: &[&str], dir: &Path) -> String {
    let out = chronoturn(args, dir);
    assert!(
        out.status.success(),
        "chronoturn {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}
