use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{ClauseJob, Schedule};

pub const SCHEDULE_TAG: &str = "# tkws-schedule 1";

/// Text form: tag line, `#` comment lines (free-form, e.g. the config echo), a
/// `num_pes N` line, one `job_id pe cost` line per job, then footer lines
/// `makespan M` and `utilization U` with U to 4 decimal places.
pub fn schedule_to_text(s: &Schedule, comments: &[String]) -> String {
    let mut out = String::new();
    writeln!(out, "{SCHEDULE_TAG}").unwrap();
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}").unwrap();
        }
    }
    writeln!(out, "num_pes {}", s.num_pes()).unwrap();
    for (j, job) in s.jobs().iter().enumerate() {
        writeln!(out, "{} {} {}", job.id, s.pe_of(j), job.cost).unwrap();
    }
    writeln!(out, "makespan {}", s.makespan()).unwrap();
    writeln!(out, "utilization {:.4}", s.utilization()).unwrap();
    out
}

pub fn schedule_from_text(text: &str) -> Result<Schedule> {
    let hdr = |d: String| Error::Header {
        artifact: "schedule".into(),
        detail: d,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim_end() == SCHEDULE_TAG => {}
        other => return Err(hdr(format!("expected `{SCHEDULE_TAG}`, found {:?}", other.map(|x| x.1)))),
    }
    let mut num_pes = None;
    let (mut jobs, mut assignment) = (Vec::new(), Vec::new());
    let (mut makespan, mut util) = (None, None);
    for (no, line) in lines {
        let bad = |d: &str| Error::Decode {
            artifact: "schedule".into(),
            offset: no as u64 + 1,
            detail: format!("line {}: {d}", no + 1),
        };
        if line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            [] => {}
            ["num_pes", v] if num_pes.is_none() => num_pes = Some(v.parse::<usize>().map_err(|_| bad("bad num_pes"))?),
            ["makespan", v] => makespan = Some(v.parse::<u64>().map_err(|_| bad("bad makespan"))?),
            ["utilization", v] => util = Some(v.to_string()),
            [id, pe, cost] if num_pes.is_some() && makespan.is_none() => {
                let p = |s: &str| s.parse::<u64>().map_err(|_| bad("expected `job_id pe cost`"));
                jobs.push(ClauseJob {
                    id: p(id)? as usize,
                    cost: p(cost)?,
                });
                assignment.push(p(pe)? as usize);
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    let num_pes = num_pes.ok_or_else(|| hdr("missing `num_pes` line".into()))?;
    let s = Schedule::new(&jobs, num_pes, assignment)?;
    let (Some(m), Some(u)) = (makespan, util) else {
        return Err(hdr("missing makespan/utilization footer".into()));
    };
    if m != s.makespan() || u != format!("{:.4}", s.utilization()) {
        return Err(Error::Mismatch(format!(
            "schedule footer says makespan {m}, utilization {u}; jobs give {} and {:.4}",
            s.makespan(),
            s.utilization()
        )));
    }
    Ok(s)
}

pub fn write_schedule_file(path: &Path, s: &Schedule, comments: &[String]) -> Result<()> {
    std::fs::write(path, schedule_to_text(s, comments)).map_err(|e| Error::io(path, e))
}

pub fn read_schedule_file(path: &Path) -> Result<Schedule> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    schedule_from_text(&text)
}
