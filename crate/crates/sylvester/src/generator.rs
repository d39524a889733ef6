//! Reproducible random box instances from a small linear congruential
//! generator.
//!
//! The raw stream is a_{i+1} = (445 a_i + 1) mod 4096; each state maps to
//! a coordinate b = a * 100 / 4096 in [0, 100). Both the state update and
//! the scaling are exact in f64, so generated instances are identical
//! across platforms. Two seed conventions exist because either the seed
//! state itself or its successor can be treated as the first draw; both
//! are kept so published tables can be matched either way.

use crate::geometry::{ConvexSet, Dynamic};
use crate::timefns::{InstanceError, SylvesterInstance};

const LCG_MULTIPLIER: u32 = 445;
const LCG_INCREMENT: u32 = 1;
const LCG_MODULUS: u32 = 4096;

/// The raw congruential state stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lcg {
    state: u32,
}

impl Lcg {
    pub fn new(seed: u32) -> Self {
        Lcg { state: seed % LCG_MODULUS }
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    /// Advance and return the new state.
    pub fn next_state(&mut self) -> u32 {
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) % LCG_MODULUS;
        self.state
    }

    /// Coordinate value of the current state, exactly state * 100 / 4096.
    pub fn coordinate(&self) -> f64 {
        f64::from(self.state) * 100.0 / 4096.0
    }
}

/// Whether the seed state itself contributes the first coordinate or is
/// discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedConvention {
    /// First coordinate comes from the successor of the seed.
    SkipSeed,
    /// First coordinate comes from the seed state itself.
    IncludeSeed,
}

/// The first `count` coordinate values under a convention.
pub fn lcg_sequence(seed: u32, count: usize, convention: SeedConvention) -> Vec<f64> {
    let mut lcg = Lcg::new(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 || convention == SeedConvention::SkipSeed {
            lcg.next_state();
        }
        out.push(lcg.coordinate());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxConfig {
    /// Ambient dimension.
    pub dim: usize,
    /// Number of boxes.
    pub count: usize,
    /// LCG seed.
    pub seed: u32,
    pub convention: SeedConvention,
}

/// Generate an unconstrained Euclidean instance whose intersect targets
/// are axis-aligned boxes. Each box consumes dim + 1 coordinates from the
/// stream: first its half-width as b / 10, then its center.
pub fn generate_boxes(config: &BoxConfig) -> Result<SylvesterInstance, InstanceError> {
    let coords = lcg_sequence(config.seed, config.count * (config.dim + 1), config.convention);
    let mut it = coords.into_iter();
    let mut targets = Vec::with_capacity(config.count);
    for _ in 0..config.count {
        let radius = it.next().expect("sequence length covers all boxes") / 10.0;
        let center: Vec<f64> = (&mut it).take(config.dim).collect();
        targets.push(ConvexSet::cube(center, radius)?);
    }
    SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(config.dim)?,
        targets,
        vec![],
    )
}
