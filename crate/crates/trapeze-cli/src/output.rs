//! JSON envelope and CSV tables.

use serde::Serialize;
use serde_json::{json, Value};
use std::io;

pub const SCHEMA: &str = "trapeze/1";

/// Compact JSON with every float written with 17 significant digits.
struct Scientific;

impl serde_json::ser::Formatter for Scientific {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Scientific);
    value.serialize(&mut ser).expect("serializing a JSON value cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn envelope(command: &str, params: Value, curve: Option<Value>, result: Value) -> Value {
    let mut v = json!({
        "schema": SCHEMA,
        "command": command,
        "params": params,
        "result": result,
    });
    if let Some(c) = curve {
        v["curve"] = c;
    }
    v
}

pub fn error_document(code: &str, message: &str) -> Value {
    json!({
        "schema": SCHEMA,
        "error": { "code": code, "message": message },
    })
}

/// CSV text for a table of serializable rows.
pub fn csv_table<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("rows are flat records");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&json!({"a": 0.1, "b": 3, "c": [1.0, -2.5e-20]}));
        assert_eq!(
            s,
            r#"{"a":1.0000000000000001e-1,"b":3,"c":[1.0000000000000000e0,-2.4999999999999999e-20]}"#
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_has_a_header() {
        #[derive(Serialize)]
        struct Row {
            theta: f64,
            action: f64,
        }
        let t = csv_table(&[Row { theta: 0.5, action: 1.25 }]);
        assert_eq!(t, "theta,action\n0.5,1.25\n");
    }
}
