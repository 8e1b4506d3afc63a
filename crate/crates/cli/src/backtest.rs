//! Back-test table: one row per (weight, model) with that weight's summary
//! repeated on each row. Empty cells mark skipped normalizations and
//! undefined correlations.

use std::io::Write;

use paretoscore_core::synth::BacktestTable;

use crate::error::{Error, Result};
use crate::real::render;

const HEADER: [&str; 11] = [
    "model_id",
    "w",
    "s_p",
    "s_o",
    "s_p_norm",
    "s_o_norm",
    "rank_p",
    "rank_o",
    "spearman",
    "s_p_degenerate",
    "s_o_degenerate",
];

fn optional(x: Option<f64>) -> String {
    x.map(render).unwrap_or_default()
}

pub fn write_backtest<W: Write>(table: &BacktestTable, output: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    let context = "backtest table";
    writer.write_record(HEADER).map_err(|e| Error::csv(context, e))?;
    for row in &table.rows {
        let summary = table
            .summaries
            .iter()
            .find(|s| s.w == row.w)
            .ok_or_else(|| Error::Format(format!("no summary for w = {}", row.w)))?;
        writer
            .write_record([
                row.model_id.clone(),
                render(row.w),
                render(row.s_p),
                render(row.s_o),
                optional(row.s_p_norm),
                optional(row.s_o_norm),
                row.rank_p.to_string(),
                row.rank_o.to_string(),
                optional(summary.spearman),
                summary.s_p_degenerate.to_string(),
                summary.s_o_degenerate.to_string(),
            ])
            .map_err(|e| Error::csv(context, e))?;
    }
    writer.flush().map_err(|e| Error::io(context, e))?;
    Ok(())
}
