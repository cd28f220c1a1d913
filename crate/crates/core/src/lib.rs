pub mod characterize;
pub mod cli;
pub mod corpus;
pub mod defaults;
pub mod embedstore;
pub mod ensemble;
pub mod error;
pub mod evalkit;
pub mod experiment;
pub mod io;
pub mod labelnet;
pub mod learners;
pub mod lexicon;
pub mod rng;
pub mod sampler;
pub mod synthgen;

pub use error::{Error, Result};
