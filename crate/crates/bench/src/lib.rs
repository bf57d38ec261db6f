//! Benchmark inputs shared by the criterion benches.

use flatcg::synth::{generate_with, SynthConfig};

pub const BANANAS: &str = include_str!("../../core/fixtures/bananas.py");
pub const VISITOR: &str = include_str!("../../core/fixtures/visitor.py");

/// A generated program roughly `scale` times the default size.
pub fn synthetic(seed: u64, scale: usize) -> String {
    let cfg = SynthConfig {
        max_classes: 4 * scale,
        max_functions: 3 * scale,
        ..SynthConfig::default()
    };
    generate_with(seed, cfg)
}
