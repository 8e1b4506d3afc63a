//! Item embeddings: `item_id,d0,d1,...`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use paretoscore_core::rsmetrics::ItemEmbeddings;

use crate::error::{Error, Result};
use crate::real::{parse_real, render};

/// What loading did to the input vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingLoadReport {
    /// Items whose vectors were rescaled to unit length.
    pub normalized: Vec<String>,
}

/// Parses embeddings, rescaling any vector whose norm is off by more than
/// the unit-norm tolerance.
pub fn parse_embeddings<R: Read>(input: R) -> Result<(ItemEmbeddings, EmbeddingLoadReport)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::csv("embeddings header", e))?
        .clone();
    let columns: Vec<&str> = header.iter().collect();
    let dims_ok = columns.len() >= 2
        && columns[0] == "item_id"
        && columns[1..].iter().enumerate().all(|(i, c)| *c == format!("d{i}"));
    if !dims_ok {
        return Err(Error::Format("embeddings header must be `item_id,d0,d1,...`".into()));
    }
    let mut vectors = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv("embeddings", e))?;
        let line = record.position().map_or(0, |p| p.line());
        let item = &record[0];
        let v = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, cell)| parse_real(cell, || format!("row {line}, column d{}", i - 1)))
            .collect::<Result<Vec<f64>>>()?;
        if vectors.insert(item.to_string(), v).is_some() {
            return Err(Error::Format(format!("row {line}: duplicate item `{item}`")));
        }
    }
    let (embeddings, normalized) = ItemEmbeddings::normalized(vectors)?;
    Ok((embeddings, EmbeddingLoadReport { normalized }))
}

pub fn write_embeddings<W: Write>(embeddings: &ItemEmbeddings, output: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    let context = "embeddings";
    let mut header = vec!["item_id".to_string()];
    header.extend((0..embeddings.dim()).map(|i| format!("d{i}")));
    writer.write_record(&header).map_err(|e| Error::csv(context, e))?;
    for (item, v) in embeddings.iter() {
        let mut row = vec![item.to_string()];
        row.extend(v.iter().map(|&x| render(x)));
        writer.write_record(&row).map_err(|e| Error::csv(context, e))?;
    }
    writer.flush().map_err(|e| Error::io("embeddings", e))?;
    Ok(())
}
