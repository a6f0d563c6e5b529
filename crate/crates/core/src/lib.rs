//! Turnaround-year detection for timestamped document collections.
//!
//! The pipeline learns an LDA topic model over the corpus, trains a
//! one-vs-rest linear SVM that predicts each document's publication year
//! from its topic distribution, and scores every year by how far its
//! documents are mispredicted toward the future versus the past.

pub mod chronometrics;
pub mod cli;
pub mod corpus;
pub mod pipeline;
pub mod synthgen;
pub mod topics;
pub mod yearclf;

mod rng;
mod textfmt;
