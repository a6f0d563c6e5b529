//! Collapsed Gibbs sampling.
//!
//! Documents are swept in input order and each document's tokens in term-id
//! order (a bag of words carries no positions). Point estimates come from
//! the final sample.

use statrs::function::gamma::ln_gamma;

use super::{LdaParams, TopicDistribution, TopicError, TopicModel};
use crate::corpus::BowVector;
use crate::rng::{self, SeededRng};

/// Iterations at which the training trace records the log joint, besides
/// the first and last.
pub const TRACE_EVERY: usize = 50;

#[derive(Debug, Clone)]
pub struct LdaFit {
    pub model: TopicModel,
    /// One per input document; empty documents get the uniform prior mean.
    pub thetas: Vec<TopicDistribution>,
    /// `(iteration, log p(w, z))` after iteration 1, every [`TRACE_EVERY`]
    /// iterations, and the last one.
    pub log_likelihood: Vec<(usize, f64)>,
}

/// Token-topic assignments and the count tables they induce.
struct GibbsState {
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    words: Vec<u32>,
    doc_start: Vec<usize>,
    z: Vec<u32>,
    /// D x K
    ndk: Vec<u32>,
    /// V x K, word-major so one token's column is contiguous
    nwk: Vec<u32>,
    nk: Vec<u32>,
}

impl GibbsState {
    fn init(docs: &[BowVector], v: usize, params: &LdaParams, rng: &mut SeededRng) -> Self {
        let k = params.k;
        let mut words = Vec::new();
        let mut doc_start = Vec::with_capacity(docs.len() + 1);
        for doc in docs {
            doc_start.push(words.len());
            words.extend(doc.token_ids().map(|w| w as u32));
        }
        doc_start.push(words.len());

        let mut state = Self {
            k,
            v,
            alpha: params.alpha,
            beta: params.beta,
            z: vec![0; words.len()],
            ndk: vec![0; docs.len() * k],
            nwk: vec![0; v * k],
            nk: vec![0; k],
            words,
            doc_start,
        };
        for d in 0..docs.len() {
            for i in state.doc_start[d]..state.doc_start[d + 1] {
                let t = rng::index(rng, k);
                state.z[i] = t as u32;
                state.add(d, state.words[i] as usize, t);
            }
        }
        state
    }

    fn n_docs(&self) -> usize {
        self.doc_start.len() - 1
    }

    fn add(&mut self, d: usize, w: usize, t: usize) {
        self.ndk[d * self.k + t] += 1;
        self.nwk[w * self.k + t] += 1;
        self.nk[t] += 1;
    }

    fn remove(&mut self, d: usize, w: usize, t: usize) {
        self.ndk[d * self.k + t] -= 1;
        self.nwk[w * self.k + t] -= 1;
        self.nk[t] -= 1;
    }

    fn sweep(&mut self, rng: &mut SeededRng, weights: &mut [f64]) {
        let k = self.k;
        let vbeta = self.v as f64 * self.beta;
        // 1 / (n_k + V beta), refreshed only for the topics a draw touches
        let mut inv: Vec<f64> = self
            .nk
            .iter()
            .map(|&n| 1.0 / (f64::from(n) + vbeta))
            .collect();
        for d in 0..self.n_docs() {
            for i in self.doc_start[d]..self.doc_start[d + 1] {
                let w = self.words[i] as usize;
                let old = self.z[i] as usize;
                self.remove(d, w, old);
                inv[old] = 1.0 / (f64::from(self.nk[old]) + vbeta);
                let ndk = &self.ndk[d * k..(d + 1) * k];
                let nwk = &self.nwk[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    let p =
                        (f64::from(ndk[t]) + self.alpha) * (f64::from(nwk[t]) + self.beta) * inv[t];
                    weights[t] = p;
                    total += p;
                }
                let t = rng::weighted(rng, weights, total);
                self.z[i] = t as u32;
                self.add(d, w, t);
                inv[t] = 1.0 / (f64::from(self.nk[t]) + vbeta);
            }
        }
    }

    /// Collapsed log joint `log p(w, z)` with theta and phi integrated out.
    fn log_joint(&self) -> f64 {
        let (k, v) = (self.k as f64, self.v as f64);
        let (alpha, beta) = (self.alpha, self.beta);
        let mut ll = k * (ln_gamma(v * beta) - v * ln_gamma(beta));
        for t in 0..self.k {
            for w in 0..self.v {
                ll += ln_gamma(f64::from(self.nwk[w * self.k + t]) + beta);
            }
            ll -= ln_gamma(f64::from(self.nk[t]) + v * beta);
        }
        ll += self.n_docs() as f64 * (ln_gamma(k * alpha) - k * ln_gamma(alpha));
        for d in 0..self.n_docs() {
            let len = (self.doc_start[d + 1] - self.doc_start[d]) as f64;
            for t in 0..self.k {
                ll += ln_gamma(f64::from(self.ndk[d * self.k + t]) + alpha);
            }
            ll -= ln_gamma(len + k * alpha);
        }
        ll
    }

    fn phi(&self) -> Vec<f64> {
        let vbeta = self.v as f64 * self.beta;
        let mut phi = vec![0.0; self.k * self.v];
        for t in 0..self.k {
            let denom = f64::from(self.nk[t]) + vbeta;
            for w in 0..self.v {
                phi[t * self.v + w] = (f64::from(self.nwk[w * self.k + t]) + self.beta) / denom;
            }
        }
        phi
    }

    fn thetas(&self) -> Vec<TopicDistribution> {
        self.ndk
            .chunks(self.k)
            .map(|row| TopicDistribution::from_counts(row, self.alpha))
            .collect()
    }
}

fn check_terms(doc: &BowVector, vocab_size: usize) -> Result<(), TopicError> {
    match doc.entries().last() {
        Some(&(term, _)) if term >= vocab_size => {
            Err(TopicError::TermOutOfRange { term, vocab_size })
        }
        _ => Ok(()),
    }
}

/// Fits a K-topic model to `docs`, whose term ids index a vocabulary of
/// `vocab_size` terms. Identical inputs give bit-identical output.
pub fn train_lda(
    docs: &[BowVector],
    vocab_size: usize,
    params: &LdaParams,
) -> Result<LdaFit, TopicError> {
    params.validate()?;
    if vocab_size == 0 {
        return Err(TopicError::EmptyVocabulary);
    }
    for doc in docs {
        check_terms(doc, vocab_size)?;
    }
    if docs.iter().all(BowVector::is_empty) {
        return Err(TopicError::NoTokens);
    }

    let mut rng = rng::seeded(params.seed);
    let mut state = GibbsState::init(docs, vocab_size, params, &mut rng);
    let mut weights = vec![0.0; params.k];
    let mut trace = Vec::new();
    for it in 1..=params.iterations {
        state.sweep(&mut rng, &mut weights);
        if it == 1 || it % TRACE_EVERY == 0 || it == params.iterations {
            trace.push((it, state.log_joint()));
        }
    }

    Ok(LdaFit {
        model: TopicModel {
            k: params.k,
            vocab_size,
            alpha: params.alpha,
            beta: params.beta,
            iterations: params.iterations,
            seed: params.seed,
            phi: state.phi(),
        },
        thetas: state.thetas(),
        log_likelihood: trace,
    })
}

/// Log joint of explicit assignments `z` (one per token of
/// `BowVector::token_ids`, document by document).
pub fn joint_log_likelihood(
    docs: &[BowVector],
    z: &[Vec<usize>],
    vocab_size: usize,
    k: usize,
    alpha: f64,
    beta: f64,
) -> f64 {
    let mut state = GibbsState {
        k,
        v: vocab_size,
        alpha,
        beta,
        words: Vec::new(),
        doc_start: Vec::new(),
        z: Vec::new(),
        ndk: vec![0; docs.len() * k],
        nwk: vec![0; vocab_size * k],
        nk: vec![0; k],
    };
    for (d, (doc, zd)) in docs.iter().zip(z).enumerate() {
        state.doc_start.push(state.words.len());
        for (w, &t) in doc.token_ids().zip(zd) {
            state.words.push(w as u32);
            state.z.push(t as u32);
            state.add(d, w, t);
        }
    }
    state.doc_start.push(state.words.len());
    state.log_joint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub theta: TopicDistribution,
    /// Set when the document had no tokens and `theta` is the uniform prior.
    pub empty: bool,
}

/// Fold-in Gibbs sampling with `model`'s topic-word distributions fixed.
pub fn infer_theta(
    model: &TopicModel,
    doc: &BowVector,
    iterations: usize,
    seed: u64,
) -> Result<Inference, TopicError> {
    if iterations == 0 {
        return Err(TopicError::NoIterations);
    }
    check_terms(doc, model.vocab_size())?;
    let k = model.k();
    if doc.is_empty() {
        return Ok(Inference {
            theta: TopicDistribution::uniform(k),
            empty: true,
        });
    }

    let mut rng = rng::seeded(seed);
    let words: Vec<usize> = doc.token_ids().collect();
    let mut z: Vec<usize> = Vec::with_capacity(words.len());
    let mut ndk = vec![0u32; k];
    for _ in &words {
        let t = rng::index(&mut rng, k);
        z.push(t);
        ndk[t] += 1;
    }
    let mut weights = vec![0.0; k];
    for _ in 0..iterations {
        for (i, &w) in words.iter().enumerate() {
            ndk[z[i]] -= 1;
            let mut total = 0.0;
            for t in 0..k {
                let p = (f64::from(ndk[t]) + model.alpha()) * model.phi(t, w);
                weights[t] = p;
                total += p;
            }
            let t = rng::weighted(&mut rng, &weights, total);
            z[i] = t;
            ndk[t] += 1;
        }
    }
    Ok(Inference {
        theta: TopicDistribution::from_counts(&ndk, model.alpha()),
        empty: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::check_simplex;

    fn bow(ids: &[usize]) -> BowVector {
        BowVector::from_term_ids(ids.iter().copied())
    }

    /// Two clusters over disjoint halves of a 10-term vocabulary.
    fn two_clusters(n_per: usize, len: usize, seed: u64) -> (Vec<BowVector>, Vec<usize>) {
        let mut rng = rng::seeded(seed);
        let mut docs = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2 {
            for _ in 0..n_per {
                let ids: Vec<usize> = (0..len).map(|_| c * 5 + rng::index(&mut rng, 5)).collect();
                docs.push(bow(&ids));
                labels.push(c);
            }
        }
        (docs, labels)
    }

    #[test]
    fn single_term_vocabulary() {
        let docs = vec![bow(&[0, 0, 0]), bow(&[0]), bow(&[])];
        for k in [2, 5] {
            let mut p = LdaParams::new(k);
            p.iterations = 20;
            let fit = train_lda(&docs, 1, &p).unwrap();
            for row in fit.model.phi_rows() {
                assert_eq!(row, [1.0]);
            }
            for theta in &fit.thetas {
                check_simplex(theta.as_slice()).unwrap();
            }
            assert_eq!(fit.thetas[2], TopicDistribution::uniform(k));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = LdaParams::new(2);
        assert!(matches!(
            train_lda(&[bow(&[]), bow(&[])], 3, &p),
            Err(TopicError::NoTokens)
        ));
        assert!(matches!(
            train_lda(&[bow(&[3])], 3, &p),
            Err(TopicError::TermOutOfRange {
                term: 3,
                vocab_size: 3
            })
        ));
        let mut bad = p.clone();
        bad.alpha = -1.0;
        assert!(train_lda(&[bow(&[0])], 3, &bad).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (docs, _) = two_clusters(10, 30, 1);
        let mut p = LdaParams::new(3);
        p.iterations = 30;
        let a = train_lda(&docs, 10, &p).unwrap();
        let b = train_lda(&docs, 10, &p).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.thetas, b.thetas);
        p.seed += 1;
        let c = train_lda(&docs, 10, &p).unwrap();
        assert_ne!(a.thetas, c.thetas);
    }

    #[test]
    fn recovers_two_clusters_and_likelihood_rises() {
        let (docs, labels) = two_clusters(40, 60, 7);
        let mut p = LdaParams::new(2);
        p.iterations = 250;
        let fit = train_lda(&docs, 10, &p).unwrap();
        let assigned: Vec<usize> = fit.thetas.iter().map(TopicDistribution::argmax).collect();
        let agree = assigned.iter().zip(&labels).filter(|(a, l)| a == l).count();
        let purity = agree.max(labels.len() - agree) as f64 / labels.len() as f64;
        assert!(purity >= 0.95, "purity {purity}");
        let first = fit.log_likelihood[0];
        let late = fit
            .log_likelihood
            .iter()
            .find(|(it, _)| *it >= 200)
            .unwrap();
        assert_eq!(first.0, 1);
        assert!(late.1 > first.1, "{late:?} vs {first:?}");
    }

    #[test]
    fn log_joint_matches_sequential_urn() {
        // oracle: chain rule over tokens with Polya-urn predictive terms
        let docs = vec![bow(&[0, 1, 1, 2]), bow(&[2, 2]), bow(&[0, 3])];
        let z = vec![vec![0, 1, 1, 0], vec![1, 0], vec![0, 0]];
        let (v, k, alpha, beta) = (4usize, 2usize, 0.7, 0.3);
        let mut ndk = vec![vec![0.0; k]; docs.len()];
        let mut nkw = vec![vec![0.0; v]; k];
        let mut nk = vec![0.0; k];
        let mut urn = 0.0;
        for (d, doc) in docs.iter().enumerate() {
            for (i, w) in doc.token_ids().enumerate() {
                let t = z[d][i];
                let nd: f64 = ndk[d].iter().sum();
                urn += ((ndk[d][t] + alpha) / (nd + k as f64 * alpha)).ln();
                urn += ((nkw[t][w] + beta) / (nk[t] + v as f64 * beta)).ln();
                ndk[d][t] += 1.0;
                nkw[t][w] += 1.0;
                nk[t] += 1.0;
            }
        }
        let closed = joint_log_likelihood(&docs, &z, v, k, alpha, beta);
        assert!((closed - urn).abs() < 1e-10, "{closed} vs {urn}");
    }

    #[test]
    fn fold_in_empty_is_uniform() {
        let m = TopicModel::from_phi(vec![vec![0.5, 0.5], vec![0.5, 0.5]], 1.0, 0.1).unwrap();
        let inf = infer_theta(&m, &bow(&[]), 10, 0).unwrap();
        assert!(inf.empty);
        assert_eq!(inf.theta.as_slice(), [0.5, 0.5]);
        assert!(infer_theta(&m, &bow(&[2]), 10, 0).is_err());
    }

    #[test]
    fn fold_in_is_deterministic() {
        let m = TopicModel::from_phi(vec![vec![0.6, 0.4], vec![0.3, 0.7]], 0.5, 0.1).unwrap();
        let doc = bow(&[0, 1, 1, 0, 1]);
        let a = infer_theta(&m, &doc, 50, 11).unwrap();
        let b = infer_theta(&m, &doc, 50, 11).unwrap();
        assert_eq!(a, b);
        let bits = |i: &Inference| {
            i.theta
                .as_slice()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    /// Exact posterior mean of theta for a fixed-phi model by enumerating
    /// every assignment of the document's tokens.
    fn exact_posterior_mean(phi: &[[f64; 2]; 2], words: &[usize], alpha: f64) -> [f64; 2] {
        let n = words.len();
        let mut norm = 0.0;
        let mut mean = [0.0; 2];
        for mask in 0u32..(1 << n) {
            let mut lik = 1.0;
            let mut counts = [0usize; 2];
            for (i, &w) in words.iter().enumerate() {
                let t = ((mask >> i) & 1) as usize;
                lik *= phi[t][w];
                counts[t] += 1;
            }
            // Dirichlet-multinomial prior of this assignment
            let prior = (ln_gamma(2.0 * alpha) - ln_gamma(n as f64 + 2.0 * alpha)
                + counts
                    .iter()
                    .map(|&c| ln_gamma(c as f64 + alpha) - ln_gamma(alpha))
                    .sum::<f64>())
            .exp();
            let weight = lik * prior;
            norm += weight;
            for t in 0..2 {
                mean[t] += weight * (counts[t] as f64 + alpha) / (n as f64 + 2.0 * alpha);
            }
        }
        [mean[0] / norm, mean[1] / norm]
    }

    #[test]
    fn fold_in_matches_exact_posterior() {
        let phi = [[0.9, 0.1], [0.05, 0.95]];
        let model =
            TopicModel::from_phi(phi.iter().map(|r| r.to_vec()).collect(), 0.5, 0.1).unwrap();
        for (words, expect_top) in [(vec![0, 0, 0, 0, 0], 0), (vec![1, 1, 1, 1, 1, 1], 1)] {
            let exact = exact_posterior_mean(&phi, &words, 0.5);
            let exact_top = if exact[1] > exact[0] { 1 } else { 0 };
            assert_eq!(exact_top, expect_top);
            let doc = BowVector::from_term_ids(words.iter().copied());
            let inf = infer_theta(&model, &doc, 100, 5).unwrap();
            assert_eq!(inf.theta.argmax(), exact_top);

            // averaging final samples over many seeds approaches the exact mean
            let runs = 400;
            let mut avg = 0.0;
            for s in 0..runs {
                avg += infer_theta(&model, &doc, 20, s).unwrap().theta.as_slice()[0];
            }
            avg /= runs as f64;
            assert!((avg - exact[0]).abs() < 0.02, "{avg} vs {}", exact[0]);
        }
    }
}
