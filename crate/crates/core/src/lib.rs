pub mod dataset;
pub mod eval;
pub mod oracles;
pub mod render;
pub mod server;
pub mod taskgen;
pub mod topology;
