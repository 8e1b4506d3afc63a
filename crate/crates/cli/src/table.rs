//! Metric table: `model_id,fold,<metric-id>...`, one row per model and fold.
//!
//! An empty `fold` cell marks a pre-aggregated model given as a single row.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use paretoscore_core::{MetricVector, ModelRecord};

use crate::error::{Error, Result};
use crate::real::{parse_real, render};

struct Row {
    fold: Option<u64>,
    line: u64,
    values: MetricVector,
}

/// Reads a metric table into records, in order of first appearance.
pub fn parse_metric_table<R: Read>(input: R) -> Result<Vec<ModelRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::csv("metric table header", e))?
        .clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns.len() < 3 || columns[0] != "model_id" || columns[1] != "fold" {
        return Err(Error::Format(
            "metric table header must be `model_id,fold,<metric-id>...`".into(),
        ));
    }
    let metrics = &columns[2..];
    let mut seen = BTreeSet::new();
    for id in metrics {
        if id.is_empty() || !seen.insert(*id) {
            return Err(Error::Format(format!(
                "metric table header: metric column `{id}` is empty or repeated"
            )));
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<Row>> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv("metric table", e))?;
        let line = record.position().map_or(0, |p| p.line());
        let model_id = &record[0];
        if model_id.is_empty() {
            return Err(Error::Format(format!("row {line}: empty model_id")));
        }
        let fold = match &record[1] {
            "" => None,
            text => Some(
                text.parse::<u64>()
                    .map_err(|_| Error::Format(format!("row {line}: fold `{text}` is not a nonnegative integer")))?,
            ),
        };
        let mut values = MetricVector::new();
        for (id, cell) in metrics.iter().zip(record.iter().skip(2)) {
            values.insert(*id, parse_real(cell, || format!("row {line}, column `{id}`"))?)?;
        }
        let rows = groups.entry(model_id.to_string()).or_insert_with(|| {
            order.push(model_id.to_string());
            Vec::new()
        });
        if let Some(first) = rows.iter().find(|r| r.fold == fold) {
            let fold_text = fold.map_or_else(|| "<empty>".to_string(), |f| f.to_string());
            return Err(Error::Format(format!(
                "row {line}: duplicate (model_id `{model_id}`, fold {fold_text}); first given on row {}",
                first.line
            )));
        }
        if rows.iter().any(|r| r.fold.is_none() != fold.is_none()) {
            return Err(Error::Format(format!(
                "row {line}: model `{model_id}` mixes a pre-aggregated row (empty fold) with fold rows"
            )));
        }
        rows.push(Row { fold, line, values });
    }
    if order.is_empty() {
        return Err(Error::Format("metric table has no rows".into()));
    }

    order
        .into_iter()
        .map(|model_id| {
            let mut rows = groups.remove(&model_id).unwrap_or_default();
            rows.sort_by_key(|r| r.fold);
            let folds = rows.into_iter().map(|r| r.values).collect();
            Ok(ModelRecord::from_folds(model_id, folds)?)
        })
        .collect()
}

/// Writes every fold vector of every record, folds numbered from 0, metric
/// columns in id order.
pub fn write_metric_table<W: Write>(records: &[ModelRecord], output: W) -> Result<()> {
    let first = records
        .first()
        .and_then(|r| r.fold_vectors.first())
        .ok_or_else(|| Error::Format("no records to write".into()))?;
    let metrics: Vec<&str> = first.keys().collect();
    let mut writer = csv::Writer::from_writer(output);
    let context = "metric table";
    let mut header = vec!["model_id", "fold"];
    header.extend(&metrics);
    writer.write_record(&header).map_err(|e| Error::csv(context, e))?;
    for record in records {
        for (fold, v) in record.fold_vectors.iter().enumerate() {
            if !v.same_keys(first) {
                return Err(Error::Format(format!(
                    "model `{}` fold {fold} has different metrics than the first row",
                    record.model_id
                )));
            }
            let mut row = vec![record.model_id.clone(), fold.to_string()];
            row.extend(v.iter().map(|(_, x)| render(x)));
            writer.write_record(&row).map_err(|e| Error::csv(context, e))?;
        }
    }
    writer.flush().map_err(|e| Error::io("metric table", e))?;
    Ok(())
}

pub fn metric_table_string(records: &[ModelRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_metric_table(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output of utf-8 input is utf-8"))
}
