//! JSON and CSV emission.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes `value` as one JSON line, or as CSV: an object becomes one row, an
/// array of objects one row each. Nested values are written as JSON text.
pub fn emit(out: &mut impl Write, value: &Value, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{value}"),
        Format::Csv => {
            let rows: Vec<&serde_json::Map<String, Value>> = match value {
                Value::Object(m) => vec![m],
                Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
                _ => Vec::new(),
            };
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(["value"])?;
                w.write_record([cell(value)])?;
            } else {
                w.write_record(rows[0].keys())?;
                for row in rows {
                    w.write_record(row.values().map(cell))?;
                }
            }
            w.flush()
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn render(v: Value, f: Format) -> String {
        let mut buf = Vec::new();
        emit(&mut buf, &v, f).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_rows() {
        let v = json!({"value": 1.5, "method": "grid", "config": {"a": 1}});
        assert_eq!(render(v, Format::Csv), "config,method,value\n\"{\"\"a\"\":1}\",grid,1.5\n");
        let v = json!([{"x": 1}, {"x": 2}]);
        assert_eq!(render(v, Format::Csv), "x\n1\n2\n");
        assert_eq!(render(json!(3), Format::Csv), "value\n3\n");
    }

    #[test]
    fn json_line() {
        assert_eq!(render(json!({"pairs": 3, "x3": 1}), Format::Json), "{\"pairs\":3,\"x3\":1}\n");
    }
}
