// SPDX-License-Identifier: Apache-2.0

//! Two-group stochastic block model with group-aligned labels.
//!
//! Nodes `0..n₋₁` form group `s = -1` and the rest group `s = +1`. Each pair
//! `i < j` (lexicographic order, one uniform draw per pair) is joined with
//! probability `p_intra` inside a group and `p_inter` across groups. A node's
//! label equals its group with probability `q` and the opposite value
//! otherwise. Features are `y · (snr/2) · u + ε` with `u = 1/√F` in every
//! coordinate and `ε` standard normal (Box-Muller), so the class means sit
//! `snr` noise units apart.
//!
//! Streams of `ChaCha8Rng::seed_from_u64(seed)`: 0 labels, 1 edges,
//! 2 features. Attempt `k` of the connectivity retry uses `seed + k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::build_graph;

use super::{Dataset, Provenance, SignalSet};

const MAX_RETRIES: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SbmSpec {
    /// Sizes of groups `s = -1` and `s = +1`.
    pub sizes: [usize; 2],
    pub p_intra: f64,
    pub p_inter: f64,
    /// Probability that a node's label equals its group.
    pub q: f64,
    pub features: usize,
    /// Class-mean separation over noise scale.
    pub snr: f64,
    pub seed: u64,
}

impl Default for SbmSpec {
    fn default() -> Self {
        Self {
            sizes: [200, 200],
            p_intra: 0.2,
            p_inter: 0.02,
            q: 0.8,
            features: 8,
            snr: 1.0,
            seed: 0,
        }
    }
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_intra", self.p_intra),
            ("p_inter", self.p_inter),
            ("q", self.q),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.sizes.iter().any(|&s| s < 2) {
            return Err(Error::Domain("each group needs at least 2 nodes".into()));
        }
        if !self.snr.is_finite() || self.snr < 0.0 {
            return Err(Error::Domain(format!(
                "snr = {} must be finite and >= 0",
                self.snr
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sizes[0] + self.sizes[1]
    }

    fn group(&self, i: usize) -> i8 {
        if i < self.sizes[0] {
            -1
        } else {
            1
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Standard normal pairs by Box-Muller.
struct Gaussian {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Gaussian {
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = self.rng.random();
        let u2: f64 = self.rng.random();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

pub fn generate_sbm(spec: &SbmSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n();
    let mut last_reason = String::new();
    for attempt in 0..=MAX_RETRIES {
        let seed = spec.seed.wrapping_add(attempt);

        let mut edge_rng = stream(seed, 1);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = if spec.group(i) == spec.group(j) {
                    spec.p_intra
                } else {
                    spec.p_inter
                };
                let u: f64 = edge_rng.random();
                if u < p {
                    edges.push((i, j));
                }
            }
        }
        let graph = match build_graph(&edges, n) {
            Ok(g) => g,
            Err(Error::IsolatedNode(i)) => {
                last_reason = format!("node {i} isolated");
                continue;
            }
            Err(e) => return Err(e),
        };
        if !graph.is_connected() {
            last_reason = format!("{} connected components", graph.component_count());
            continue;
        }

        let sensitive: Vec<i8> = (0..n).map(|i| spec.group(i)).collect();
        let mut label_rng = stream(seed, 0);
        let labels: Vec<Option<i8>> = sensitive
            .iter()
            .map(|&s| {
                let u: f64 = label_rng.random();
                Some(if u < spec.q { s } else { -s })
            })
            .collect();

        let mut noise = Gaussian {
            rng: stream(seed, 2),
            spare: None,
        };
        let half_gap = if spec.features == 0 {
            0.0
        } else {
            0.5 * spec.snr / (spec.features as f64).sqrt()
        };
        let mut features = DMatrix::zeros(n, spec.features);
        for i in 0..n {
            let y = f64::from(labels[i].unwrap_or(0));
            for k in 0..spec.features {
                features[(i, k)] = y * half_gap + noise.next();
            }
        }

        return Dataset::new(
            graph,
            SignalSet {
                sensitive,
                labels,
                features,
            },
            Provenance {
                source: "sbm".into(),
                seed: Some(spec.seed),
                effective_seed: Some(seed),
            },
        );
    }
    Err(Error::GenerationFailure(format!(
        "no connected graph in {} attempts (last: {last_reason})",
        MAX_RETRIES + 1
    )))
}
