use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;

/// A table plus named extras, rendered as CSV (extras as `# key=value`
/// comment lines after the schema header) or as one JSON object.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub extras: Map<String, Value>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn extra(&mut self, key: &str, value: Value) {
        self.extras.insert(key.to_string(), value);
    }

    pub fn write(&self, subcommand: &str, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("schema".into(), json!(1));
                obj.insert("subcommand".into(), json!(subcommand));
                obj.insert("columns".into(), json!(self.columns));
                obj.insert("rows".into(), json!(self.rows));
                obj.extend(self.extras.clone());
                serde_json::to_writer_pretty(&mut *out, &Value::Object(obj))?;
                writeln!(out)
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# schema=1")?;
        for (k, v) in &self.extras {
            writeln!(out, "# {k}={}", serde_json::to_string(v)?)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_extras() {
        let mut r = Report::new(&["a", "b"]);
        r.push(vec![json!(1), json!("x,y")]);
        r.push(vec![Value::Null, json!(0.5)]);
        r.extra("note", json!({"k": 2}));
        let mut buf = Vec::new();
        r.write("count", Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# schema=1\n# note={\"k\":2}\na,b\n1,\"x,y\"\n,0.5\n");
    }

    #[test]
    fn json_carries_schema() {
        let mut r = Report::new(&["a"]);
        r.push(vec![json!(3)]);
        let mut buf = Vec::new();
        r.write("count", Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"][0][0], 3);
    }
}
