//! A small rectangular table rendered as CSV, Markdown or JSON.

use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::Value;

use switchrun::format::format_probability;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Written with twelve significant digits in CSV and Markdown.
    Prob(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Prob(v) => format_probability(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Prob(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Header row then data rows; the title is not part of the CSV.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let bad = |e: csv::Error| CliError::Internal(format!("csv: {e}"));
        writer.write_record(&self.header).map_err(bad)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::render))
                .map_err(bad)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    /// Reads a table written by [`Table::to_csv`]; every cell comes back as text.
    pub fn from_csv(title: impl Into<String>, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let bad = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
        let header = match records.next() {
            Some(r) => r.map_err(bad)?.iter().map(str::to_string).collect(),
            None => Vec::new(),
        };
        let mut rows = Vec::new();
        for record in records {
            rows.push(record.map_err(bad)?.iter().map(Cell::text).collect());
        }
        Ok(Self {
            title: title.into(),
            header,
            rows,
        })
    }

    pub fn to_markdown(&self) -> String {
        let escape = |s: String| s.replace('|', "\\|");
        let mut out = format!("### {}\n\n", self.title);
        out += &format!(
            "| {} |\n",
            self.header
                .iter()
                .cloned()
                .map(escape)
                .collect::<Vec<_>>()
                .join(" | ")
        );
        out += &format!("|{}\n", "---|".repeat(self.header.len()));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(c.render())).collect();
            out += &format!("| {} |\n", cells.join(" | "));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Md => Ok(self.to_markdown()),
        }
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect())
            .collect();
        let mut s = serializer.serialize_struct("Table", 3)?;
        s.serialize_field("title", &self.title)?;
        s.serialize_field("columns", &self.header)?;
        s.serialize_field("rows", &rows)?;
        s.end()
    }
}
