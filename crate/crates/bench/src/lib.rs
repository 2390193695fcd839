//! Shared fixtures for the criterion benches.

use slicegauss::synth::{synthesize, SynthKind};
use slicegauss::Image;

/// Square one-over-f image used by every filter bench.
pub fn fixture(side: usize) -> Image {
    synthesize(SynthKind::OneOverF, side, side, 0x5eed).expect("non-empty fixture")
}
