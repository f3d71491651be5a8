//! Plain-text reference table: `t_layer,cell_index,x_center,phi_layer,phi_interval_avg`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::benchmark::ReferenceSolution;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t_layer: f64,
    cell_index: usize,
    x_center: f64,
    phi_layer: f64,
    phi_interval_avg: f64,
}

fn format_err(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

/// Writes one row per (layer, cell); values use the shortest round-trip representation.
pub fn save_reference(path: &Path, r: &ReferenceSolution) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format_err(path, e))?;
    for (n, &t) in r.t_layers.iter().enumerate() {
        for (i, &x) in r.x_centers.iter().enumerate() {
            w.serialize(Row {
                t_layer: t,
                cell_index: i,
                x_center: x,
                phi_layer: r.phi_layer[n][i],
                phi_interval_avg: r.phi_interval[n][i],
            })
            .map_err(|e| format_err(path, e))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a reference table and validates it against `cells` cells and at least `steps` layers.
pub fn load_reference(path: &Path, cells: usize, steps: usize) -> Result<ReferenceSolution> {
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format_err(path, e))?;
    let mut t_layers: Vec<f64> = Vec::new();
    let mut x_centers = vec![f64::NAN; cells];
    let mut phi_layer: Vec<Vec<f64>> = Vec::new();
    let mut phi_interval: Vec<Vec<f64>> = Vec::new();
    let mut seen: Vec<Vec<bool>> = Vec::new();
    for (line, row) in rd.deserialize::<Row>().enumerate() {
        let row: Row = row.map_err(|e| format_err(path, format!("row {}: {e}", line + 2)))?;
        if row.cell_index >= cells {
            return Err(Error::Shape {
                what: format!("reference cell index in {}", path.display()),
                expected: cells,
                found: row.cell_index + 1,
            });
        }
        let n = match t_layers.iter().position(|&t| t == row.t_layer) {
            Some(n) => n,
            None => {
                if t_layers.last().is_some_and(|&t| row.t_layer < t) {
                    return Err(format_err(path, format!("row {}: layers must be increasing", line + 2)));
                }
                t_layers.push(row.t_layer);
                phi_layer.push(vec![0.0; cells]);
                phi_interval.push(vec![0.0; cells]);
                seen.push(vec![false; cells]);
                t_layers.len() - 1
            }
        };
        if seen[n][row.cell_index] {
            return Err(format_err(path, format!("row {}: duplicate cell {}", line + 2, row.cell_index)));
        }
        seen[n][row.cell_index] = true;
        x_centers[row.cell_index] = row.x_center;
        phi_layer[n][row.cell_index] = row.phi_layer;
        phi_interval[n][row.cell_index] = row.phi_interval_avg;
    }
    for (n, s) in seen.iter().enumerate() {
        let found = s.iter().filter(|&&b| b).count();
        if found != cells {
            return Err(Error::Shape {
                what: format!("cells of reference layer {}", n + 1),
                expected: cells,
                found,
            });
        }
    }
    let r = ReferenceSolution {
        t_layers,
        x_centers,
        phi_layer,
        phi_interval,
        description: format!("loaded from {}", path.display()),
    };
    r.check_shape(cells, steps)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReferenceSolution {
        ReferenceSolution {
            t_layers: vec![1.0, 2.0],
            x_centers: vec![-0.5, 0.5],
            phi_layer: vec![vec![0.1, 1.0 / 3.0], vec![2.5e-300, 7.0]],
            phi_interval: vec![vec![0.2, std::f64::consts::PI], vec![1e-17, 0.0]],
            description: String::new(),
        }
    }

    #[test]
    fn round_trip_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.csv");
        let r = sample();
        save_reference(&path, &r).unwrap();
        let back = load_reference(&path, 2, 2).unwrap();
        assert_eq!(back.phi_layer, r.phi_layer);
        assert_eq!(back.phi_interval, r.phi_interval);
        assert_eq!(back.t_layers, r.t_layers);
        let header = std::fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("t_layer,cell_index,x_center,phi_layer,phi_interval_avg"));
    }

    #[test]
    fn wrong_cell_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.csv");
        save_reference(&path, &sample()).unwrap();
        match load_reference(&path, 3, 2) {
            Err(Error::Shape { expected, found, .. }) => assert_eq!((expected, found), (3, 2)),
            other => panic!("{other:?}"),
        }
        assert!(load_reference(&path, 2, 5).is_err());
    }

    #[test]
    fn malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t_layer,cell_index,x_center,phi_layer,phi_interval_avg\n1.0,0,abc,1,1\n").unwrap();
        assert!(matches!(load_reference(&path, 1, 1), Err(Error::Format { .. })));
    }
}
