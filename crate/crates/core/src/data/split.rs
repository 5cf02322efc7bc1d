// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::Dataset;

const SPLIT_STREAM: u64 = 3;

/// Sorted, disjoint node index sets covering every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffles nodes (within `(s, y)` cells when stratifying, cells visited in
/// a fixed order) and deals them out so that after every prefix of the
/// sequence each part holds its share of nodes to within one. Part sizes are
/// therefore `n·fᵢ` rounded, and each cell is split in proportion.
pub fn split(dataset: &Dataset, fractions: [f64; 3], seed: u64, stratify: bool) -> Result<Split> {
    if fractions.iter().any(|&f| !(0.0..=1.0).contains(&f))
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidArgument(format!(
            "split fractions {fractions:?} must be in [0, 1] and sum to 1"
        )));
    }
    let signals = &dataset.signals;
    let n = dataset.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);

    let cell_of = |i: usize| -> usize {
        let s = usize::from(signals.sensitive[i] > 0);
        let y = match signals.labels[i] {
            Some(-1) => 0,
            Some(_) => 1,
            None => 2,
        };
        3 * s + y
    };
    let n_cells = if stratify { 6 } else { 1 };
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n_cells];
    for i in 0..n {
        cells[if stratify { cell_of(i) } else { 0 }].push(i);
    }
    if stratify && signals.labels.iter().any(Option::is_some) {
        for (cell, name) in [
            (0, "s=-1,y=-1"),
            (1, "s=-1,y=1"),
            (3, "s=1,y=-1"),
            (4, "s=1,y=1"),
        ] {
            if cells[cell].is_empty() {
                return Err(Error::EmptyCell(name.into()));
            }
        }
    }

    let mut parts: [Vec<usize>; 3] = Default::default();
    let mut dealt = 0usize;
    for cell in &mut cells {
        cell.shuffle(&mut rng);
        let mut got_train = false;
        for &node in cell.iter() {
            dealt += 1;
            let mut best = 0;
            let mut best_deficit = f64::NEG_INFINITY;
            for (k, &f) in fractions.iter().enumerate() {
                let deficit = f * dealt as f64 - parts[k].len() as f64;
                if deficit > best_deficit {
                    best = k;
                    best_deficit = deficit;
                }
            }
            got_train |= best == 0;
            parts[best].push(node);
        }
        if stratify && !cell.is_empty() && !got_train && fractions[0] > 0.0 {
            return Err(Error::EmptyCell(format!(
                "a cell of {} nodes received no training nodes",
                cell.len()
            )));
        }
    }
    let [mut train, mut val, mut test] = parts;
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, val, test })
}
