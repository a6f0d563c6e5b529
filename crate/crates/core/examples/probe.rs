use chronoturn::chronometrics::{cross_validate, rank_years};
use chronoturn::pipeline::{fit, PipelineSettings};
use chronoturn::synthgen::{disjoint_topics, generate, EpochSpec};

fn main() {
    let mode = std::env::args().nth(1).unwrap_or("cv".into());
    let tw = disjoint_topics(6, 50, 0, 0.0);
    let mix = |e: usize| {
        let mut m = vec![0.05; 6];
        m[2 * e] = 0.4;
        m[2 * e + 1] = 0.4;
        m
    };
    let epochs: Vec<EpochSpec> = (0..3)
        .map(|e| EpochSpec {
            start: 1990 + 10 * e as i32,
            end: 1999 + 10 * e as i32,
            mixture: mix(e),
            docs_per_year: 20,
            doc_length: 100,
        })
        .collect();
    let settings = PipelineSettings {
        k_topics: 6,
        ..PipelineSettings::default()
    };
    for seed in 0..10u64 {
        let t = std::time::Instant::now();
        let (corpus, truth) = generate(&epochs, &tw, 1000 + seed).unwrap();
        let records = if mode == "cv" {
            cross_validate(&corpus, &settings, 10, seed)
                .unwrap()
                .records
        } else {
            let out = fit(&corpus, &settings, seed).unwrap();
            out.resubstitution_records(&corpus).unwrap()
        };
        let ranked = rank_years(&records, &corpus).unwrap();
        let top: Vec<String> = ranked
            .iter()
            .take(6)
            .map(|s| format!("{}:{:.3}", s.year, s.score))
            .collect();
        let hit = truth
            .boundaries
            .iter()
            .all(|b| ranked.iter().take(3).any(|s| s.year == *b));
        // distribution of predictions per epoch
        let mut hist = std::collections::BTreeMap::new();
        for r in &records {
            *hist.entry(r.predicted_year).or_insert(0) += 1;
        }
        println!(
            "seed {seed} hit={hit} {:?} {:.1}s",
            top,
            t.elapsed().as_secs_f64()
        );
        println!("   preds {:?}", hist);
    }
}
