//! Per-iteration trace CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use augdual_core::{IterationRecord, SolveTrace};

use crate::error::{CliError, CliResult};
use crate::files::fmt_f64;

pub const TRACE_HEADER: &str = "k,primal_residual,dual_objective,x_change,y_change";

pub fn emit_trace(trace: &SolveTrace<f64>, path: &Path) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "{TRACE_HEADER}").map_err(io)?;
    for r in &trace.records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.k,
            fmt_f64(r.primal_residual),
            fmt_f64(r.dual_objective),
            fmt_f64(r.x_change),
            fmt_f64(r.y_change)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_trace(path: &Path) -> CliResult<Vec<IterationRecord<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(CliError::format(path, format!("missing header {TRACE_HEADER:?}")));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let bad = |what: &str| CliError::format(path, format!("line {}: {what}", n + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        out.push(IterationRecord {
            k: f[0].parse().map_err(|_| bad("bad iteration index"))?,
            primal_residual: num(f[1])?,
            dual_objective: num(f[2])?,
            x_change: num(f[3])?,
            y_change: num(f[4])?,
        });
    }
    Ok(out)
}
