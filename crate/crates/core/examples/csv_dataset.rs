// SPDX-License-Identifier: Apache-2.0

//! Round trip through the CSV formats used by the command line, then a
//! design on the reloaded data.
//!
//!     cargo run --example csv_dataset [edges.csv nodes.csv]

use std::path::PathBuf;

use fairfilt::data::{generate_sbm, load_dataset, save_dataset, SbmSpec};
use fairfilt::design::{design_closed_form, objective_report, DesignConfig};
use fairfilt::graph::normalized_operators;
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let args: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    let (edges, nodes) = match args.as_slice() {
        [e, n] => (e.clone(), n.clone()),
        _ => {
            let dir = std::env::temp_dir().join("fairfilt-example");
            std::fs::create_dir_all(&dir)?;
            let (e, n) = (dir.join("edges.csv"), dir.join("nodes.csv"));
            let data = generate_sbm(&SbmSpec {
                sizes: [50, 30],
                ..SbmSpec::default()
            })?;
            save_dataset(&data, &e, &n)?;
            println!("wrote {} and {}", e.display(), n.display());
            (e, n)
        }
    };

    let data = load_dataset(&edges, &nodes)?;
    let groups = data.signals.sensitive.iter().filter(|&&s| s == 1).count();
    println!(
        "{} nodes, {} edges, |S_1| = {groups}, |S_-1| = {}",
        data.n(),
        data.graph.edge_count(),
        data.n() - groups
    );
    let spec = decompose(&normalized_operators(&data.graph))?;
    let ctx = BiasContext::new(&spec, &data.signals.s_signal())?;
    let filt = design_closed_form(&ctx, &DesignConfig::with_tau(0.9))?;
    println!(
        "closed-form filter at tau 0.9: rho {:.4}",
        objective_report(&ctx, &filt)?.rho
    );
    Ok(())
}
