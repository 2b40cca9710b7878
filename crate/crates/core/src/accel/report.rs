use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::SimReport;

#[derive(Debug, Clone, PartialEq)]
pub struct UtilizationSummary {
    /// Busy cycles over the run length, per PE.
    pub per_pe: Vec<f64>,
    pub aggregate: f64,
}

pub fn report_utilization(sim: &SimReport) -> UtilizationSummary {
    let busy: u64 = sim.per_pe.iter().map(|s| s.cycles).sum();
    let slots = sim.per_pe.len() as u64 * sim.total_cycles;
    UtilizationSummary {
        per_pe: sim.per_pe_utilization.clone(),
        aggregate: if slots == 0 { 1.0 } else { busy as f64 / slots as f64 },
    }
}

impl SimReport {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let u = report_utilization(self);
        let mut out = String::new();
        let sums: Vec<String> = self.class_sums.iter().map(i32::to_string).collect();
        let per: Vec<String> = u.per_pe.iter().map(|x| format!("{x:.4}")).collect();
        writeln!(out, "total_cycles: {}", self.total_cycles).unwrap();
        writeln!(out, "logic_ops: {}", self.logic_ops).unwrap();
        writeln!(out, "logic_ops_short_circuit: {}", self.logic_ops_short_circuit).unwrap();
        writeln!(out, "model_mem_reads: {}", self.model_mem_reads).unwrap();
        writeln!(out, "feature_mem_reads: {}", self.feature_mem_reads).unwrap();
        writeln!(out, "num_pes: {}", self.per_pe.len()).unwrap();
        writeln!(out, "pe_utilization: {:.4}", u.aggregate).unwrap();
        writeln!(out, "per_pe_utilization: {}", per.join(",")).unwrap();
        writeln!(out, "class_sums: {}", sums.join(",")).unwrap();
        out
    }
}

/// CSV `cycle,pe,job,block_index`, one row per block fetch.
pub fn write_trace_csv(path: &Path, sim: &SimReport) -> Result<()> {
    let io = |e| Error::io(path, e);
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "cycle,pe,job,block_index").map_err(io)?;
    for e in sim.trace.iter().flatten() {
        writeln!(w, "{},{},{},{}", e.cycle, e.pe, e.job, e.block_index).map_err(io)?;
    }
    w.flush().map_err(io)
}
