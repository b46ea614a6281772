//! Tabular results with a fixed column schema, written as CSV or JSON with
//! 17 significant digits and read back by the same module.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io::{self, Write};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON whose floats use [`fmt_f64`].
pub struct SciFormatter(PrettyFormatter<'static>);

impl SciFormatter {
    pub fn new() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

impl Default for SciFormatter {
    fn default() -> Self {
        Self::new()
    }
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with 17-digit floats and a trailing
/// newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter::new());
    value.serialize(&mut ser).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramTable {
    pub columns: Vec<String>,
    /// Columns whose cells may be empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optional: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Per-row status text, when the schema has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Vec<String>>,
}

const STATUS: &str = "status";

impl DiagramTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), optional: Vec::new(), rows: Vec::new(), status: None }
    }

    pub fn with_optional(mut self, columns: &[&str]) -> Self {
        self.optional = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn with_status(mut self) -> Self {
        self.status = Some(Vec::new());
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    fn check_row(&self, row: &[Option<f64>]) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Io(format!("row has {} cells for {} columns", row.len(), self.columns.len())));
        }
        for (name, v) in self.columns.iter().zip(row) {
            let ok = v.is_some_and(f64::is_finite) || self.optional.contains(name);
            if !ok {
                return Err(CliError::Io(format!("non-finite value in required column {name}")));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) -> Result<(), CliError> {
        if self.status.is_some() {
            return Err(CliError::Io("table has a status column; use push_with_status".into()));
        }
        self.check_row(&row)?;
        self.rows.push(row);
        Ok(())
    }

    pub fn push_with_status(&mut self, row: Vec<Option<f64>>, status: &str) -> Result<(), CliError> {
        self.check_row(&row)?;
        self.status
            .as_mut()
            .ok_or_else(|| CliError::Io("table has no status column".into()))?
            .push(status.to_string());
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.columns.clone();
        if self.status.is_some() {
            header.push(STATUS.into());
        }
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&header).map_err(io)?;
        for (k, row) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.filter(|x| x.is_finite()).map(fmt_f64).unwrap_or_default()).collect();
            if let Some(st) = &self.status {
                rec.push(st[k].clone());
            }
            w.write_record(&rec).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    /// Reads CSV written by [`Self::to_csv`]. Empty cells mark their column
    /// optional.
    pub fn from_csv(data: &[u8]) -> Result<Self, CliError> {
        let mut rdr = csv::Reader::from_reader(data);
        let parse_err = |e: csv::Error| CliError::Config(e.to_string());
        let mut columns: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(String::from).collect();
        let has_status = columns.last().is_some_and(|c| c == STATUS);
        if has_status {
            columns.pop();
        }
        let mut table = Self { columns, optional: Vec::new(), rows: Vec::new(), status: has_status.then(Vec::new) };
        for rec in rdr.records() {
            let rec = rec.map_err(parse_err)?;
            let mut row = Vec::with_capacity(table.columns.len());
            for (k, cell) in rec.iter().take(table.columns.len()).enumerate() {
                if cell.is_empty() {
                    let name = &table.columns[k];
                    if !table.optional.contains(name) {
                        table.optional.push(name.clone());
                    }
                    row.push(None);
                } else {
                    row.push(Some(cell.parse::<f64>().map_err(|e| CliError::Config(format!("{cell:?}: {e}")))?));
                }
            }
            if let Some(st) = table.status.as_mut() {
                st.push(rec.get(table.columns.len()).unwrap_or_default().to_string());
            }
            if row.len() != table.columns.len() {
                return Err(CliError::Config("short CSV record".into()));
            }
            table.rows.push(row);
        }
        let order: Vec<String> = table.columns.iter().filter(|c| table.optional.contains(c)).cloned().collect();
        table.optional = order;
        Ok(table)
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        to_json_bytes(self)
    }

    pub fn from_json(data: &[u8]) -> Result<Self, CliError> {
        let t: Self = serde_json::from_slice(data).map_err(|e| CliError::Config(e.to_string()))?;
        for row in &t.rows {
            t.check_row(row).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if t.status.as_ref().is_some_and(|s| s.len() != t.rows.len()) {
            return Err(CliError::Config("status length differs from row count".into()));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DiagramTable {
        let mut t = DiagramTable::new(&["value", "h0"]).with_optional(&["h0"]).with_status();
        t.push_with_status(vec![Some(1.0 / 3.0), Some(-2.5e-300)], "ok").unwrap();
        t.push_with_status(vec![Some(2.0), None], "NoCriticalLength").unwrap();
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let bytes = t.to_csv().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("value,h0,status\n3.3333333333333331e-1,"));
        assert_eq!(DiagramTable::from_csv(&bytes).unwrap(), t);
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let bytes = t.to_json().unwrap();
        assert_eq!(DiagramTable::from_json(&bytes).unwrap(), t);
    }

    #[test]
    fn required_columns_must_be_finite() {
        let mut t = DiagramTable::new(&["a"]);
        assert!(t.push(vec![Some(f64::NAN)]).is_err());
        assert!(t.push(vec![None]).is_err());
        assert!(t.push(vec![Some(1.0), Some(2.0)]).is_err());
        t.push(vec![Some(1.0)]).unwrap();
        assert_eq!(t.len(), 1);
    }
}
