//! CSV panels and JSON sidecars.

use crate::report::{Panel, Report};
use serde_json::json;
use std::io;
use std::path::{Path, PathBuf};

/// Everything recorded next to each CSV.
pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub settings: serde_json::Value,
    pub seed: u64,
}

fn write_panel(dir: &Path, panel: &Panel) -> io::Result<PathBuf> {
    let path = dir.join(format!("{}.csv", panel.name));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&panel.header)?;
    for row in &panel.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes `<out>/<experiment>/<panel>.csv` with a `<panel>.json` sidecar and
/// a `summary.json` holding every check. Returns the CSV paths.
pub fn write_report(out: &Path, info: &RunInfo<'_>, report: &Report) -> io::Result<Vec<PathBuf>> {
    let dir = out.join(info.experiment);
    std::fs::create_dir_all(&dir)?;
    let versions = json!({
        "mlzlab-cli": env!("CARGO_PKG_VERSION"),
        "mlzlab-core": mlzlab_core::VERSION,
    });
    let mut written = Vec::new();
    for panel in &report.panels {
        let path = write_panel(&dir, panel)?;
        let meta = json!({
            "experiment": info.experiment,
            "panel": panel.name,
            "columns": panel.header,
            "rows": panel.rows.len(),
            "settings": info.settings,
            "seed": info.seed,
            "versions": versions,
        });
        std::fs::write(dir.join(format!("{}.json", panel.name)), serde_json::to_string_pretty(&meta)? + "\n")?;
        written.push(path);
    }
    let summary: serde_json::Map<String, serde_json::Value> =
        report.summary.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let doc = json!({
        "experiment": info.experiment,
        "pass": report.pass(),
        "checks": report.checks,
        "failures": report.failures().collect::<Vec<_>>(),
        "summary": summary,
        "settings": info.settings,
        "seed": info.seed,
        "versions": versions,
    });
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(written)
}
