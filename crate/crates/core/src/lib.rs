//! Control-tag annotation for chess commentary: rule-based tag extraction,
//! input rendering, engine-derived tags, corpus tooling, model-free
//! inference with grounding checks, and belief-state probing.

pub mod backend;
pub mod corpus;
pub mod engine;
pub mod inference;
pub mod probe;
pub mod representation;
pub mod tags;
pub mod text;
