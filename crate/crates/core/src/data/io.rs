// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::build_graph;

use super::{Dataset, Provenance, SignalSet};

fn parse_err(file: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line: line as usize,
        message: message.into(),
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn parse_sign(field: &str) -> Option<i8> {
    match field {
        "1" | "+1" | "1.0" => Some(1),
        "-1" | "-1.0" => Some(-1),
        _ => None,
    }
}

/// Parses `src,dst` edges and `id,s,y,f1..fF` nodes. `names` label the two
/// sources in error messages.
pub fn read_dataset<E: Read, N: Read>(edges: E, nodes: N, names: (&str, &str)) -> Result<Dataset> {
    let (edges_name, nodes_name) = names;

    let mut node_reader = reader(nodes);
    let header = node_reader.headers()?.clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "s" || &header[2] != "y" {
        return Err(parse_err(nodes_name, 1, "header must start with id,s,y"));
    }
    let n_features = header.len() - 3;
    let mut rows: Vec<Option<(i8, Option<i8>, Vec<f64>)>> = Vec::new();
    for record in node_reader.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != header.len() {
            return Err(parse_err(
                nodes_name,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let id: usize = record[0]
            .parse()
            .map_err(|_| parse_err(nodes_name, line, format!("bad node id {:?}", &record[0])))?;
        let s = parse_sign(&record[1]).ok_or_else(|| Error::NonBinarySensitive {
            file: nodes_name.to_string(),
            line: line as usize,
            value: record[1].to_string(),
        })?;
        let y = if record[2].is_empty() {
            None
        } else {
            Some(parse_sign(&record[2]).ok_or_else(|| {
                parse_err(
                    nodes_name,
                    line,
                    format!("label {:?} not in {{-1, 1}}", &record[2]),
                )
            })?)
        };
        let features = (3..record.len())
            .map(|k| {
                record[k].parse::<f64>().map_err(|_| {
                    parse_err(
                        nodes_name,
                        line,
                        format!("bad feature value {:?}", &record[k]),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if id >= rows.len() {
            rows.resize(id + 1, None);
        }
        if rows[id].is_some() {
            return Err(parse_err(
                nodes_name,
                line,
                format!("duplicate node id {id}"),
            ));
        }
        rows[id] = Some((s, y, features));
    }
    let n = rows.len();
    let mut sensitive = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut features = DMatrix::zeros(n, n_features);
    for (i, row) in rows.into_iter().enumerate() {
        let (s, y, f) = row.ok_or_else(|| {
            parse_err(
                nodes_name,
                0,
                format!("node ids are not contiguous: {i} missing"),
            )
        })?;
        sensitive.push(s);
        labels.push(y);
        for (k, v) in f.into_iter().enumerate() {
            features[(i, k)] = v;
        }
    }

    let mut edge_reader = reader(edges);
    let header = edge_reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "src" || &header[1] != "dst" {
        return Err(parse_err(edges_name, 1, "header must be src,dst"));
    }
    let mut edge_list = Vec::new();
    for record in edge_reader.records() {
        let record = record?;
        let line = line_of(&record);
        let endpoint = |k: usize| -> Result<usize> {
            record[k].parse().map_err(|_| {
                parse_err(edges_name, line, format!("bad node index {:?}", &record[k]))
            })
        };
        edge_list.push((endpoint(0)?, endpoint(1)?));
    }

    let graph = build_graph(&edge_list, n)?;
    Dataset::new(
        graph,
        SignalSet {
            sensitive,
            labels,
            features,
        },
        Provenance {
            source: format!("csv:{edges_name},{nodes_name}"),
            seed: None,
            effective_seed: None,
        },
    )
}

pub fn load_dataset(edges_path: &Path, nodes_path: &Path) -> Result<Dataset> {
    read_dataset(
        File::open(edges_path)?,
        File::open(nodes_path)?,
        (
            &edges_path.display().to_string(),
            &nodes_path.display().to_string(),
        ),
    )
}

pub fn write_edges<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["src", "dst"])?;
    for (i, j) in dataset.graph.edges() {
        writer.write_record([i.to_string(), j.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Numbers use Rust's shortest round-trip decimal formatting.
pub fn write_nodes<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let signals = &dataset.signals;
    let n_features = signals.features.ncols();
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "s".to_string(), "y".to_string()];
    header.extend((1..=n_features).map(|k| format!("f{k}")));
    writer.write_record(&header)?;
    for i in 0..signals.n() {
        let mut row = vec![
            i.to_string(),
            signals.sensitive[i].to_string(),
            signals.labels[i].map_or(String::new(), |y| y.to_string()),
        ];
        row.extend((0..n_features).map(|k| signals.features[(i, k)].to_string()));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn save_dataset(dataset: &Dataset, edges_path: &Path, nodes_path: &Path) -> Result<()> {
    write_edges(dataset, File::create(edges_path)?)?;
    write_nodes(dataset, File::create(nodes_path)?)?;
    Ok(())
}
