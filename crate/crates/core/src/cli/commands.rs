// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;

use super::config::{Domain, RunConfig};
use super::experiment::{
    evaluate, filtered_scores, report_on, seed_labels, sweep, EvalSummary, Experiment,
    MetricSummary, SweepRow,
};
use crate::apply::{apply_frequency, apply_vertex, effective_operator};
use crate::data::{split, write_edges, write_nodes, Dataset, Provenance};
use crate::design::{design, objective_report, FilterSpec};
use crate::error::{check_len, Error, Result};
use crate::graph::{normalized_operators, NormalizedOperators};
use crate::learners::{
    label_propagation, threshold_scores, train_gcn, write_predictions, write_training_curve,
    Placement,
};
use crate::metrics::{rho_separable, BiasContext};
use crate::spectral::{decompose, spectrum_table, write_spectrum_csv, SpectralDecomposition};

/// Writes files into the output directory, each with a
/// `<file>.config.json` sidecar holding the resolved configuration.
pub(crate) struct Outputs<'a> {
    command: &'static str,
    cfg: &'a RunConfig,
    provenance: Option<&'a Provenance>,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(
        command: &'static str,
        cfg: &'a RunConfig,
        provenance: Option<&'a Provenance>,
    ) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out)?;
        Ok(Self {
            command,
            cfg,
            provenance,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let path = self.cfg.out.join(name);
        let mut file = BufWriter::new(File::create(&path)?);
        body(&mut file)?;
        file.flush()?;
        let sidecar = json!({
            "command": self.command,
            "output": name,
            "config": self.cfg,
            "dataset": self.provenance,
            "version": env!("CARGO_PKG_VERSION"),
        });
        std::fs::write(
            self.cfg.out.join(format!("{name}.config.json")),
            serde_json::to_string_pretty(&sidecar)?,
        )?;
        self.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

struct Loaded {
    dataset: Dataset,
    ops: NormalizedOperators,
    spec: SpectralDecomposition,
}

impl Loaded {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let dataset = cfg.load_dataset()?;
        let ops = normalized_operators(&dataset.graph);
        let spec = decompose(&ops)?;
        Ok(Self { dataset, ops, spec })
    }

    fn experiment(&self) -> Experiment<'_> {
        Experiment {
            dataset: &self.dataset,
            ops: &self.ops,
            spec: &self.spec,
        }
    }

    fn context(&self) -> Result<BiasContext> {
        BiasContext::new(&self.spec, &self.dataset.signals.s_signal())
    }

    /// The filter from `--filter`, or one designed with `--method`.
    fn filter(&self, cfg: &RunConfig) -> Result<FilterSpec> {
        match &cfg.filter {
            Some(path) => read_filter(path, self.dataset.n()),
            None => design(cfg.method, &self.context()?, &self.spec, &cfg.design),
        }
    }
}

fn read_filter(path: &Path, n: usize) -> Result<FilterSpec> {
    let filt = FilterSpec::from_json(&std::fs::read_to_string(path)?)?;
    check_len("filter length", n, filt.n())?;
    Ok(filt)
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

/// Metrics ×100 with two decimals.
fn write_summary_table(rows: &[(&str, &MetricSummary)], out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "model",
        "accuracy_mean",
        "accuracy_std",
        "delta_sp_mean",
        "delta_sp_std",
        "delta_eo_mean",
        "delta_eo_std",
    ])?;
    for (name, m) in rows {
        writer.write_record([
            name.to_string(),
            pct(m.accuracy.mean),
            pct(m.accuracy.std),
            pct(m.delta_sp.mean),
            pct(m.delta_sp.std),
            pct(m.delta_eo.mean),
            pct(m.delta_eo.std),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "parameter",
        "value",
        "rho",
        "accuracy_mean",
        "accuracy_std",
        "delta_sp_mean",
        "delta_sp_std",
        "delta_eo_mean",
        "delta_eo_std",
    ])?;
    for row in rows {
        let m = &row.summary.with;
        let parameter = serde_json::to_value(row.parameter)?;
        writer.write_record([
            parameter.as_str().unwrap_or_default().to_string(),
            row.value.to_string(),
            row.rho.to_string(),
            pct(m.accuracy.mean),
            pct(m.accuracy.std),
            pct(m.delta_sp.mean),
            pct(m.delta_sp.std),
            pct(m.delta_eo.mean),
            pct(m.delta_eo.std),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_matrix_csv(matrix: &DMatrix<f64>, out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record((1..=matrix.ncols()).map(|k| format!("f{k}")))?;
    for row in matrix.row_iter() {
        writer.write_record(row.iter().map(|x| x.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let signals = &data.dataset.signals;
    if !signals.is_fully_labeled() {
        return Err(Error::Domain("spectrum needs a label on every node".into()));
    }
    let rows = spectrum_table(&data.spec, &signals.s_signal(), &signals.y_signal()?)?;
    let mut out = Outputs::new("spectrum", cfg, Some(&data.dataset.provenance))?;
    out.write("spectrum.csv", |w| write_spectrum_csv(&rows, w))?;
    Ok(out.written)
}

pub(crate) fn design_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let ctx = data.context()?;
    let filt = design(cfg.method, &ctx, &data.spec, &cfg.design)?;
    let report = objective_report(&ctx, &filt)?;
    let rho_before = rho_separable(&ctx, &FilterSpec::all_pass(ctx.n()).response())?;
    let mut out = Outputs::new("design", cfg, Some(&data.dataset.provenance))?;
    out.write("filter.json", |w| {
        writeln!(w, "{}", filt.to_json()?)?;
        Ok(())
    })?;
    out.json(
        "objective.json",
        &json!({
            "method": cfg.method,
            "rho_before": rho_before,
            "rho_after": report.rho,
            "bound_after": report.bound,
            "budget_slack": report.budget_slack,
        }),
    )?;
    Ok(out.written)
}

pub(crate) fn apply(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let filt = data.filter(cfg)?;
    let features = &data.dataset.signals.features;
    let filtered = match cfg.domain {
        Domain::Frequency => apply_frequency(&data.spec, &filt, features)?,
        Domain::Vertex => apply_vertex(&data.ops, &filt, features)?,
    };
    let mut out = Outputs::new("apply", cfg, Some(&data.dataset.provenance))?;
    out.write("features_filtered.csv", |w| write_matrix_csv(&filtered, w))?;
    Ok(out.written)
}

pub(crate) fn label_prop(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let opts = cfg.learner_options();
    let part = split(&data.dataset, opts.splits, cfg.seed, opts.stratify)?;
    let outcome = label_propagation(
        &data.ops,
        &seed_labels(&data.dataset, &part),
        &opts.label_prop,
    )?;
    let scores = match opts.placement {
        Placement::Post => filtered_scores(&data.spec, &data.filter(cfg)?, &outcome.scores)?,
        Placement::None => outcome.scores.clone(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "label propagation takes placement post or none, got {other:?}"
            )))
        }
    };
    let y_hat = threshold_scores(&scores, opts.label_prop.threshold);
    let report = report_on(&data.dataset, &y_hat, &part.test)?;
    let mut out = Outputs::new("label-prop", cfg, Some(&data.dataset.provenance))?;
    out.write("predictions.csv", |w| write_predictions(&y_hat, &scores, w))?;
    out.json(
        "report.json",
        &json!({ "iterations": outcome.iterations, "test": report }),
    )?;
    Ok(out.written)
}

pub(crate) fn train_gcn_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let opts = cfg.learner_options();
    let part = split(&data.dataset, opts.splits, cfg.seed, opts.stratify)?;
    let filt = match opts.placement {
        Placement::None => None,
        Placement::Post => {
            return Err(Error::InvalidArgument(
                "the GCN takes pre1, pre2, both or none".into(),
            ))
        }
        _ => Some(data.filter(cfg)?),
    };
    let gcn = crate::learners::GcnConfig {
        seed: cfg.seed,
        ..opts.gcn
    };
    let run = train_gcn(
        &data.ops,
        &data.spec,
        &data.dataset.signals,
        filt.as_ref(),
        opts.placement,
        &part,
        &gcn,
    )?;
    let report = report_on(&data.dataset, &run.predictions, &part.test)?;
    let mut out = Outputs::new("train-gcn", cfg, Some(&data.dataset.provenance))?;
    out.write("predictions.csv", |w| {
        write_predictions(&run.predictions, &run.soft_scores, w)
    })?;
    out.write("training_curve.csv", |w| {
        write_training_curve(&run.curve, w)
    })?;
    out.json("report.json", &json!({ "test": report }))?;
    Ok(out.written)
}

pub(crate) fn eval(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let filt = data.filter(cfg)?;
    let summary: EvalSummary = evaluate(
        data.experiment(),
        &filt,
        &cfg.learner_options(),
        &cfg.seed_list(),
    )?;
    let mut out = Outputs::new("eval", cfg, Some(&data.dataset.provenance))?;
    out.json("eval.json", &summary)?;
    out.write("eval_table.csv", |w| {
        write_summary_table(&[("without", &summary.without), ("with", &summary.with)], w)
    })?;
    Ok(out.written)
}

pub(crate) fn sweep_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.taus.is_empty() && cfg.orders.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs --taus and/or --orders".into(),
        ));
    }
    let data = Loaded::new(cfg)?;
    let rows = sweep(
        data.experiment(),
        cfg.method,
        &cfg.design,
        &cfg.taus,
        &cfg.orders,
        &cfg.learner_options(),
        &cfg.seed_list(),
    )?;
    let mut out = Outputs::new("sweep", cfg, Some(&data.dataset.provenance))?;
    out.write("sweep.csv", |w| write_sweep_csv(&rows, w))?;
    out.json("sweep.json", &rows)?;
    Ok(out.written)
}

pub(crate) fn effective(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data = Loaded::new(cfg)?;
    let filt = data.filter(cfg)?;
    let s = data.dataset.signals.s_signal();
    let before = effective_operator(&data.spec, &FilterSpec::all_pass(data.dataset.n()), &s)?;
    let after = effective_operator(&data.spec, &filt, &s)?;
    let mut out = Outputs::new("effective", cfg, Some(&data.dataset.provenance))?;
    out.json(
        "effective.json",
        &json!({
            "intra_before": before.intra_weight,
            "inter_before": before.inter_weight,
            "intra_after": after.intra_weight,
            "inter_after": after.inter_weight,
        }),
    )?;
    if cfg.write_matrix {
        out.write("effective_matrix.csv", |w| after.write_csv(w))?;
    }
    Ok(out.written)
}

pub(crate) fn sbm_gen(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut cfg = cfg.clone();
    if cfg.edges.is_none() && cfg.sbm.is_none() {
        cfg.sbm = Some(crate::data::SbmSpec {
            seed: cfg.seed,
            ..Default::default()
        });
    }
    let dataset = cfg.load_dataset()?;
    let mut out = Outputs::new("sbm-gen", &cfg, Some(&dataset.provenance))?;
    out.write("edges.csv", |w| write_edges(&dataset, w))?;
    out.write("nodes.csv", |w| write_nodes(&dataset, w))?;
    Ok(out.written)
}
