//! File formats: point sets and edge lists as CSV, connection functions as
//! JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use softrgg_core::softgraph::Edge;
use softrgg_core::{ConnectionFunction, PointSet, SoftGraph};

use crate::error::{HarnessError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl Into<String>) -> HarnessError {
    HarnessError::Format { path: path.to_path_buf(), message: message.into() }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|source| HarnessError::Json { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|source| HarnessError::Json { path: path.to_path_buf(), source })?;
    writeln!(out).and_then(|_| out.flush()).map_err(io_err(path))
}

pub fn read_connection(path: &Path) -> Result<ConnectionFunction> {
    read_json(path)
}

pub fn write_connection(path: &Path, f: &ConnectionFunction) -> Result<()> {
    write_json(path, f)
}

/// One point per row, columns `x0 .. x{d-1}`.
pub fn write_points(path: &Path, points: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = (0..points.dimension()).map(|k| format!("x{k}")).collect();
    w.write_record(&header).map_err(csv_err(path))?;
    for p in points.iter() {
        w.write_record(p.iter().map(|c| c.to_string())).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    let d = header.len();
    if header.iter().enumerate().any(|(k, h)| h != format!("x{k}")) {
        return Err(format_err(path, format!("expected columns x0..x{}, found {:?}", d.saturating_sub(1), header)));
    }
    let mut coords = Vec::new();
    for row in r.records() {
        let row = row.map_err(csv_err(path))?;
        for field in &row {
            coords.push(field.trim().parse::<f64>().map_err(|e| format_err(path, format!("{field:?}: {e}")))?);
        }
    }
    PointSet::from_coords(d, coords).map_err(|e| format_err(path, e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    i: usize,
    j: usize,
    length: f64,
}

/// Edge list with columns `i, j, length`.
pub fn write_edges(path: &Path, graph: &SoftGraph) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for e in graph.edges() {
        w.serialize(EdgeRow { i: e.i, j: e.j, length: e.length }).map_err(csv_err(path))?;
    }
    if graph.edges().is_empty() {
        w.write_record(["i", "j", "length"]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_edges(path: &Path, n_vertices: usize) -> Result<SoftGraph> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut edges = Vec::new();
    for row in r.deserialize::<EdgeRow>() {
        let row = row.map_err(csv_err(path))?;
        edges.push(Edge { i: row.i, j: row.j, length: row.length });
    }
    SoftGraph::from_edges(n_vertices, edges).map_err(|e| format_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use softrgg_core::points::sample_binomial;
    use softrgg_core::softgraph::{sample_graph, SamplerMode};
    use softrgg_core::SeedSpec;

    #[test]
    fn points_and_edges_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for d in [2, 3] {
            let pts = sample_binomial(50, d, SeedSpec::new(1, 2)).unwrap();
            let f = ConnectionFunction::step(0.3, 0.5, d).unwrap();
            let g = sample_graph(&pts, &f, SeedSpec::new(1, 3), SamplerMode::Exact).unwrap();
            let pp = dir.path().join("points.csv");
            let ep = dir.path().join("edges.csv");
            write_points(&pp, &pts).unwrap();
            write_edges(&ep, &g).unwrap();
            let back = read_points(&pp).unwrap();
            assert_eq!(back.coords(), pts.coords());
            assert_eq!(read_edges(&ep, back.len()).unwrap(), g);
        }
    }

    #[test]
    fn empty_edge_list_keeps_header() {
        let dir = tempfile::tempdir().unwrap();
        let ep = dir.path().join("edges.csv");
        let g = SoftGraph::from_edges(3, []).unwrap();
        write_edges(&ep, &g).unwrap();
        assert_eq!(std::fs::read_to_string(&ep).unwrap().trim(), "i,j,length");
        assert_eq!(read_edges(&ep, 3).unwrap(), g);
    }

    #[test]
    fn errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.csv");
        let err = read_points(&missing).unwrap_err();
        assert!(err.to_string().contains("nope.csv"));
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "x0,x1\n0.5,1.5\n").unwrap();
        assert!(read_points(&bad).unwrap_err().to_string().contains("bad.csv"));
    }

    #[test]
    fn connection_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        let f = ConnectionFunction::rayleigh(1.0, 2.0, 0.1, 2, 0.5).unwrap();
        write_connection(&path, &f).unwrap();
        assert_eq!(read_connection(&path).unwrap(), f);
    }
}
