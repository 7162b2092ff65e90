use serde_json::Value;

use crate::{InputError, Report, Table};

pub fn json(report: &Report) -> Result<String, InputError> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| InputError::new("output", e))?;
    s.push('\n');
    Ok(s)
}

pub fn csv(table: &Table) -> Result<String, InputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| InputError::new("output", e);
    w.write_record(&table.header).map_err(err)?;
    for row in &table.rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| InputError::new("output", e))?;
    String::from_utf8(bytes).map_err(|e| InputError::new("output", e))
}

/// Two-column rendering of the same payload: one line per leaf, keyed by
/// its path. Arrays of scalars stay on one line.
pub fn table(report: &Report) -> String {
    let mut lines: Vec<(String, String)> = vec![
        ("command".into(), report.command.clone()),
        ("status".into(), report.status.into()),
        ("version".into(), report.version.into()),
    ];
    flatten("config", &report.config, &mut lines);
    flatten("results", &report.results, &mut lines);
    for (k, w) in report.warnings.iter().enumerate() {
        lines.push((format!("warnings[{k}]"), w.clone()));
    }
    let width = lines.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

fn flatten(path: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten(&format!("{path}.{k}"), x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            for (k, x) in xs.iter().enumerate() {
                flatten(&format!("{path}[{k}]"), x, out);
            }
        }
        Value::String(s) => out.push((path.to_string(), s.clone())),
        other => out.push((path.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_keeps_scalar_arrays_inline() {
        let mut out = Vec::new();
        flatten("r", &json!({"a": [1, 2], "b": [{"c": "x"}], "d": {}}), &mut out);
        assert_eq!(
            out,
            vec![
                ("r.a".to_string(), "[1,2]".to_string()),
                ("r.b[0].c".to_string(), "x".to_string()),
                ("r.d".to_string(), "{}".to_string()),
            ]
        );
    }
}
