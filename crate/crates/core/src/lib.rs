//! Sentiment-scored word co-occurrence networks.
//!
//! The pipeline parses a corpus of short documents into word tokens, builds
//! the co-occurrence network, scores words with a happiness lexicon,
//! compares the network against null models, extracts a backbone and
//! attributes sentiment to the communities found in it.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backbone;
pub mod community;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod histogram;
pub mod lexicon;
pub mod null_models;
pub mod pipeline;
pub mod profiles;
pub mod rng;

pub use error::{Error, Result};
