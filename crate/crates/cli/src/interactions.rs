//! Interaction log: `user_id,item_id,artist_id,timestamp[,attr_<name>...]`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use paretoscore_core::bncv::{Event, InteractionDataset};

use crate::error::{Error, Result};

const FIXED_COLUMNS: [&str; 4] = ["user_id", "item_id", "artist_id", "timestamp"];
const ATTRIBUTE_PREFIX: &str = "attr_";

/// Parses an interaction log. Empty attribute cells mean "unknown"; a user
/// whose rows disagree on an attribute is an error.
pub fn parse_interactions<R: Read>(input: R) -> Result<InteractionDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::csv("interactions header", e))?
        .clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns.len() < 4 || columns[..4] != FIXED_COLUMNS {
        return Err(Error::Format(
            "interactions header must start with `user_id,item_id,artist_id,timestamp`".into(),
        ));
    }
    let mut attributes = Vec::new();
    for column in &columns[4..] {
        match column.strip_prefix(ATTRIBUTE_PREFIX) {
            Some(name) if !name.is_empty() && !attributes.contains(&name) => attributes.push(name),
            _ => {
                return Err(Error::Format(format!(
                    "interactions header: unexpected column `{column}` (extra columns must be distinct `attr_<name>`)"
                )))
            }
        }
    }

    let mut events = Vec::new();
    let mut user_attributes: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv("interactions", e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (i, name) in FIXED_COLUMNS[..3].iter().enumerate() {
            if record[i].is_empty() {
                return Err(Error::Format(format!("row {line}: empty {name}")));
            }
        }
        let timestamp: i64 = record[3]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("row {line}: timestamp `{}` is not an integer", &record[3])))?;
        let user = &record[0];
        let attrs = user_attributes.entry(user.to_string()).or_default();
        for (name, value) in attributes.iter().zip(record.iter().skip(4)) {
            if value.is_empty() {
                continue;
            }
            if let Some(previous) = attrs.insert(name.to_string(), value.to_string()) {
                if previous != value {
                    return Err(Error::Format(format!(
                        "row {line}: user `{user}` has conflicting {ATTRIBUTE_PREFIX}{name} values `{previous}` and `{value}`"
                    )));
                }
            }
        }
        events.push(Event::new(user, &record[1], &record[2], timestamp));
    }
    user_attributes.retain(|_, a| !a.is_empty());
    Ok(InteractionDataset::new(events, user_attributes)?)
}

/// Writes events in dataset order with one `attr_` column per known attribute.
pub fn write_interactions<W: Write>(dataset: &InteractionDataset, output: W) -> Result<()> {
    let names: Vec<&str> = dataset.attribute_names().into_iter().collect();
    let mut writer = csv::Writer::from_writer(output);
    let context = "interactions";
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.extend(names.iter().map(|n| format!("{ATTRIBUTE_PREFIX}{n}")));
    writer.write_record(&header).map_err(|e| Error::csv(context, e))?;
    for e in dataset.events() {
        let attrs = dataset.user_attributes().get(&e.user_id);
        let mut row = vec![
            e.user_id.clone(),
            e.item_id.clone(),
            e.artist_id.clone(),
            e.timestamp.to_string(),
        ];
        row.extend(
            names
                .iter()
                .map(|n| attrs.and_then(|a| a.get(*n)).cloned().unwrap_or_default()),
        );
        writer.write_record(&row).map_err(|e| Error::csv(context, e))?;
    }
    writer.flush().map_err(|e| Error::io("interactions", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_users_three_events_each() {
        let text = "user_id,item_id,artist_id,timestamp,attr_country\n\
                    u1,a,x,1,de\nu1,b,x,2,de\nu1,c,y,3,\nu2,a,x,1,us\nu2,d,z,5,us\nu2,e,z,9,us\n";
        let data = parse_interactions(text.as_bytes()).unwrap();
        assert_eq!(data.events().len(), 6);
        assert_eq!(data.user_attributes()["u1"]["country"], "de");
    }

    #[test]
    fn conflicting_attribute_is_an_error() {
        let text = "user_id,item_id,artist_id,timestamp,attr_country\nu1,a,x,1,de\nu1,b,x,2,fr\n";
        let msg = parse_interactions(text.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("attr_country") && msg.contains("u1"), "{msg}");
    }

    #[test]
    fn timestamp_ties_keep_input_order() {
        let text = "user_id,item_id,artist_id,timestamp\nu,b,x,5\nu,a,x,5\nu,c,x,1\n";
        let data = parse_interactions(text.as_bytes()).unwrap();
        let items: Vec<&str> = data.user_events("u").iter().map(|e| e.item_id.as_str()).collect();
        assert_eq!(items, ["c", "b", "a"]);
    }

    #[test]
    fn rejects_bad_rows() {
        for text in [
            "user_id,item_id,artist_id,timestamp\nu,a,x,1\n",
            "user_id,item_id,artist_id,timestamp\nu,a,x,one\nu,b,x,2\n",
            "user_id,item_id,artist_id,time\nu,a,x,1\nu,b,x,2\n",
            "user_id,item_id,artist_id,timestamp,country\nu,a,x,1,de\nu,b,x,2,de\n",
        ] {
            assert!(parse_interactions(text.as_bytes()).is_err(), "{text}");
        }
    }

    #[test]
    fn round_trips() {
        let text = "user_id,item_id,artist_id,timestamp,attr_gender\nu1,a,x,1,f\nu1,b,x,2,f\nu2,a,x,1,\nu2,c,y,2,\n";
        let data = parse_interactions(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_interactions(&data, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
