// SPDX-License-Identifier: Apache-2.0

//! Where the sensitive attribute and the labels live in the graph spectrum.
//!
//!     cargo run --example spectrum

use fairfilt::data::{generate_sbm, SbmSpec};
use fairfilt::graph::normalized_operators;
use fairfilt::spectral::{decompose, spectrum_table};

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec {
        sizes: [100, 100],
        ..SbmSpec::default()
    })?;
    let spec = decompose(&normalized_operators(&data.graph))?;
    let rows = spectrum_table(&spec, &data.signals.s_signal(), &data.signals.y_signal()?)?;

    println!(
        "{:>5} {:>8} {:>10} {:>10}",
        "index", "lambda", "|s~|", "|y~|"
    );
    for row in rows.iter().take(8) {
        println!(
            "{:>5} {:>8.4} {:>10.4} {:>10.4}",
            row.index, row.lambda, row.abs_s_tilde, row.abs_y_tilde
        );
    }

    // energy share of the two lowest frequencies
    let share = |f: fn(&fairfilt::spectral::SpectrumRow) -> f64| {
        let total: f64 = rows.iter().map(|r| f(r).powi(2)).sum();
        rows.iter().take(2).map(|r| f(r).powi(2)).sum::<f64>() / total
    };
    println!(
        "s energy in first 2 frequencies: {:.1}%",
        100.0 * share(|r| r.abs_s_tilde)
    );
    println!(
        "y energy in first 2 frequencies: {:.1}%",
        100.0 * share(|r| r.abs_y_tilde)
    );
    Ok(())
}
