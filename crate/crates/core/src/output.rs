//! Run output files: per-step tables, the summary table and run metadata.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::driver::{RunRecord, StepRecord};
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

pub const STEP_COLUMNS: [&str; 10] = [
    "cell",
    "x_center",
    "phi_track",
    "sigma",
    "phi_census",
    "J_census",
    "F_census",
    "ww_center",
    "phi_hlosm",
    "tracks_per_source",
];

pub const SUMMARY_COLUMNS: [&str; 29] = [
    "step",
    "t",
    "runtime_s",
    "histories",
    "rel_l2_error",
    "rel_modified_l2_error",
    "rel_l2_error_census",
    "rel_l2_error_hybrid",
    "fom_err_l2",
    "fom_err_modified",
    "fom_sigma_l2",
    "fom_sigma_modified",
    "relative_sigma_l2",
    "alpha",
    "census_weight",
    "census_weight_sigma",
    "occupied_cells",
    "comb_in_count",
    "comb_out_count",
    "comb_in_weight",
    "comb_out_weight",
    "collisions",
    "splits",
    "split_daughters",
    "roulette_kills",
    "roulette_survivals",
    "leakage_weight",
    "aborted_histories",
    "hybrid_failures",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// Writes plot-ready run output into one directory.
pub struct OutputWriter {
    dir: PathBuf,
    write_closures: bool,
    summary: csv::Writer<fs::File>,
    summary_path: PathBuf,
}

impl OutputWriter {
    pub fn create(dir: &Path, write_closures: bool) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let _ = fs::remove_file(dir.join("INCOMPLETE"));
        let summary_path = dir.join("summary.csv");
        let mut summary = csv::Writer::from_path(&summary_path).map_err(|e| csv_err(&summary_path, e))?;
        summary.write_record(SUMMARY_COLUMNS).map_err(|e| csv_err(&summary_path, e))?;
        summary.flush()?;
        Ok(Self {
            dir: dir.to_path_buf(),
            write_closures,
            summary,
            summary_path,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_step(&mut self, rec: &StepRecord, mesh: &Mesh1D<f64>) -> Result<()> {
        write_step_csv(&self.dir.join(format!("step_{}.csv", rec.n)), rec, mesh)?;
        if self.write_closures {
            if let (Some(raw), Some(filt)) = (&rec.closure_raw, &rec.closure_filtered) {
                let path = self.dir.join(format!("closures_{}.csv", rec.n));
                let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
                w.write_record(["cell", "x_center", "F_raw", "F_filtered"]).map_err(|e| csv_err(&path, e))?;
                for (i, x) in mesh.centers().iter().enumerate() {
                    w.write_record([i.to_string(), x.to_string(), raw[i].to_string(), filt[i].to_string()])
                        .map_err(|e| csv_err(&path, e))?;
                }
                w.flush()?;
            }
        }
        let m = &rec.metrics;
        let c = &rec.counters;
        let comb = rec.comb.as_ref();
        let row = vec![
            m.step.to_string(),
            m.t.to_string(),
            m.runtime_s.to_string(),
            m.histories.to_string(),
            opt(m.rel_l2_error),
            opt(m.rel_modified_l2_error),
            opt(m.rel_l2_error_census),
            opt(m.rel_l2_error_hybrid),
            opt(m.fom_err_l2),
            opt(m.fom_err_modified),
            opt(m.fom_sigma_l2),
            opt(m.fom_sigma_modified),
            opt(m.relative_sigma_l2),
            opt(m.alpha),
            m.census_weight.to_string(),
            opt(m.census_weight_sigma),
            m.occupied_cells.to_string(),
            comb.map(|s| s.input_count.to_string()).unwrap_or_default(),
            comb.map(|s| s.output_count.to_string()).unwrap_or_default(),
            opt(comb.map(|s| s.input_weight)),
            opt(comb.map(|s| s.output_weight)),
            c.collisions.to_string(),
            c.splits.to_string(),
            c.split_daughters.to_string(),
            c.roulette_kills.to_string(),
            c.roulette_survivals.to_string(),
            c.leakage_weight.to_string(),
            c.aborted_histories.to_string(),
            rec.hybrid.iter().filter(|h| h.phi.is_none()).count().to_string(),
        ];
        self.summary.write_record(&row).map_err(|e| csv_err(&self.summary_path, e))?;
        self.summary.flush()?;
        Ok(())
    }

    pub fn finish(mut self, record: &RunRecord) -> Result<()> {
        self.summary.flush()?;
        write_run_json(&self.dir.join("run.json"), record)
    }

    /// Leaves a marker explaining why the output is partial.
    pub fn mark_incomplete(dir: &Path, reason: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("INCOMPLETE"), format!("{reason}\n"))?;
        Ok(())
    }
}

pub fn write_step_csv(path: &Path, rec: &StepRecord, mesh: &Mesh1D<f64>) -> Result<()> {
    let r = &rec.report;
    let h = r.histories.max(1) as f64;
    let hy = rec.last_hybrid();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(STEP_COLUMNS).map_err(|e| csv_err(path, e))?;
    for (i, x) in mesh.centers().iter().enumerate() {
        w.write_record([
            i.to_string(),
            x.to_string(),
            r.phi_track[i].to_string(),
            opt(r.sigma.as_ref().map(|s| s[i])),
            r.phi_census[i].to_string(),
            r.j_census[i].to_string(),
            r.f_census[i].to_string(),
            opt(rec.centers.as_ref().map(|c| c[i])),
            opt(hy.map(|p| p[i])),
            (rec.counters.tracks[i] as f64 / h).to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunJson<'a> {
    version: &'a str,
    seed: u64,
    config: &'a RunConfig,
    steps: usize,
    total_runtime_s: f64,
    reference: Option<&'a str>,
    threads: usize,
}

pub fn write_run_json(path: &Path, record: &RunRecord) -> Result<()> {
    let j = RunJson {
        version: env!("CARGO_PKG_VERSION"),
        seed: record.config.seed,
        config: &record.config,
        steps: record.steps.len(),
        total_runtime_s: record.total_runtime_s,
        reference: record.reference.as_deref(),
        threads: rayon::current_num_threads(),
    };
    let text = serde_json::to_string_pretty(&j).map_err(|e| csv_err(path, e))?;
    fs::write(path, text)?;
    Ok(())
}
