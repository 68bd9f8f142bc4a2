//! Dataset ingestion.
//!
//! CSV rows are `label,v1,v2,...` for vector data and `label,text` for
//! string data. A first row whose first cell is `label` (any case) is a
//! header and is skipped. JSONL rows are objects with a `label` and either
//! a numeric `vector` or a `string`. Blank lines are ignored in both.
//!
//! Query files for prediction may omit the label: a CSV row with exactly as
//! many cells as the model's payload needs is read as unlabeled, one extra
//! leading cell is read as a label. JSONL rows simply leave `label` out.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use clap::ValueEnum;
use metric_margin_core::metric::Point;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.ndjson`/`.json` files are JSONL, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("jsonl" | "ndjson" | "json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    Vector,
    Text,
}

impl Payload {
    pub fn of(p: &Point) -> Self {
        match p {
            Point::Vector(_) => Payload::Vector,
            Point::Text(_) => Payload::Text,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Payload::Vector => "vector",
            Payload::Text => "string",
        }
    }
}

/// What the reader should expect.
#[derive(Debug, Clone, Copy)]
pub struct Expect {
    /// `None` lets the first row decide (JSONL only; CSV defaults to vectors).
    pub payload: Option<Payload>,
    /// Required vector length, if known.
    pub dim: Option<usize>,
    pub labels_required: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub points: Vec<Point>,
    /// Raw label names; `None` for unlabeled query rows.
    pub labels: Vec<Option<String>>,
    /// 1-based line numbers in the source file.
    pub lines: Vec<u64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn payload(&self) -> Option<Payload> {
        self.points.first().map(Payload::of)
    }

    fn push(&mut self, line: u64, label: Option<String>, point: Point, expect: &mut Expect) -> Result<()> {
        let payload = Payload::of(&point);
        match expect.payload {
            Some(want) if want != payload => {
                return Err(row_error(
                    line,
                    format!("{} payload where {} data is expected", payload.name(), want.name()),
                ))
            }
            _ => expect.payload = Some(payload),
        }
        if let Point::Vector(v) = &point {
            match expect.dim {
                Some(d) if d != v.len() => {
                    return Err(row_error(
                        line,
                        format!("vector has {} coordinates, expected {d}", v.len()),
                    ))
                }
                _ => expect.dim = Some(v.len()),
            }
        }
        if expect.labels_required && label.is_none() {
            return Err(row_error(line, "missing label"));
        }
        self.points.push(point);
        self.labels.push(label);
        self.lines.push(line);
        Ok(())
    }
}

fn row_error(line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("row {line}: {msg}"))
}

pub fn read_dataset(path: &Path, format: Option<Format>, expect: Expect) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| CliError::validation(format!("cannot open {}: {e}", path.display())))?;
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let data = match format {
        Format::Csv => parse_csv(file, expect),
        Format::Jsonl => parse_jsonl(BufReader::new(file), expect),
    }
    .map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if data.is_empty() {
        return Err(CliError::validation(format!("{}: no data rows", path.display())));
    }
    Ok(data)
}

fn parse_number(line: u64, col: usize, cell: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(row_error(line, format!("column {col}: non-finite value `{cell}`"))),
        Err(_) => Err(row_error(line, format!("column {col}: `{cell}` is not a number"))),
    }
}

pub fn parse_csv<R: Read>(mut input: R, mut expect: Expect) -> Result<Dataset> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| CliError::runtime(format!("read error: {e}")))?;
    // the reader's own line counter skips blank lines; count from byte offsets
    // (record positions can point at blank lines preceding the record)
    let line_at = |byte: u64| {
        let start = bytes[byte as usize..]
            .iter()
            .position(|&b| b != b'\n' && b != b'\r')
            .map_or(bytes.len(), |p| p + byte as usize);
        bytes[..start].iter().filter(|&&b| b == b'\n').count() as u64 + 1
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let payload = *expect.payload.get_or_insert(Payload::Vector);
    let mut out = Dataset::default();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| line_at(p.byte()));
            row_error(line, e)
        })?;
        let line = record.position().map_or(0, |p| line_at(p.byte()));
        if record.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && record.get(0).is_some_and(|c| c.eq_ignore_ascii_case("label")) {
            continue;
        }
        let cells: Vec<&str> = record.iter().collect();
        let needed = match payload {
            Payload::Text => Some(1),
            Payload::Vector => expect.dim,
        };
        let labeled = match needed {
            Some(d) if cells.len() == d + 1 => true,
            Some(d) if cells.len() == d && !expect.labels_required => false,
            Some(d) => {
                return Err(row_error(
                    line,
                    format!("{} cells, expected {} (label plus {d} payload)", cells.len(), d + 1),
                ))
            }
            None if cells.len() >= 2 => true,
            None => return Err(row_error(line, "expected a label and at least one coordinate")),
        };
        let (label, rest) = if labeled {
            (Some(cells[0].to_string()), &cells[1..])
        } else {
            (None, &cells[..])
        };
        if label.as_deref() == Some("") {
            return Err(row_error(line, "empty label"));
        }
        let point = match payload {
            Payload::Text => Point::text(rest[0]),
            Payload::Vector => Point::Vector(
                rest.iter()
                    .enumerate()
                    .map(|(i, c)| parse_number(line, i + 1 + labeled as usize, c))
                    .collect::<Result<_>>()?,
            ),
        };
        out.push(line, label, point, &mut expect)?;
    }
    Ok(out)
}

fn json_label(line: u64, v: &Value) -> Result<String> {
    match v {
        Value::String(s) if !s.is_empty() => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(row_error(line, "label must be a non-empty string, number or boolean")),
    }
}

pub fn parse_jsonl<R: BufRead>(input: R, mut expect: Expect) -> Result<Dataset> {
    let mut out = Dataset::default();
    for (i, text) in input.lines().enumerate() {
        let line = i as u64 + 1;
        let text = text.map_err(|e| CliError::runtime(format!("read error at row {line}: {e}")))?;
        if text.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| row_error(line, format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| row_error(line, "expected a JSON object"))?;
        let label = obj.get("label").map(|v| json_label(line, v)).transpose()?;
        let point = match (obj.get("vector"), obj.get("string")) {
            (Some(_), Some(_)) => return Err(row_error(line, "both `vector` and `string` given")),
            (Some(Value::Array(xs)), None) => Point::Vector(
                xs.iter()
                    .enumerate()
                    .map(|(j, x)| match x.as_f64() {
                        Some(v) if v.is_finite() => Ok(v),
                        _ => Err(row_error(line, format!("vector entry {j} is not a finite number"))),
                    })
                    .collect::<Result<_>>()?,
            ),
            (Some(_), None) => return Err(row_error(line, "`vector` must be an array of numbers")),
            (None, Some(Value::String(s))) => Point::text(s),
            (None, Some(_)) => return Err(row_error(line, "`string` must be a string")),
            (None, None) => return Err(row_error(line, "expected a `vector` or `string` field")),
        };
        if matches!(&point, Point::Vector(v) if v.is_empty()) {
            return Err(row_error(line, "empty vector"));
        }
        out.push(line, label, point, &mut expect)?;
    }
    Ok(out)
}

/// Label names and their dense ids. Ids follow sorted name order, numeric
/// when every name is an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    names: Vec<String>,
}

impl LabelTable {
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut names: Vec<String> = names.into_iter().map(str::to_string).collect();
        names.sort();
        names.dedup();
        if names.iter().all(|n| n.parse::<i64>().is_ok()) {
            names.sort_by(|a, b| {
                let (x, y) = (a.parse::<i64>().unwrap(), b.parse::<i64>().unwrap());
                x.cmp(&y).then_with(|| a.cmp(b))
            });
        }
        Self { names }
    }

    pub fn from_stored(names: Vec<String>) -> Self {
        Self { names }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    /// Ids for every labeled row of `data`.
    pub fn encode(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.labels
            .iter()
            .zip(&data.lines)
            .map(|(l, &line)| {
                let l = l.as_deref().ok_or_else(|| row_error(line, "missing label"))?;
                self.id(l)
                    .ok_or_else(|| row_error(line, format!("unknown label `{l}`")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn train() -> Expect {
        Expect {
            payload: None,
            dim: None,
            labels_required: true,
        }
    }

    #[test]
    fn csv_with_header_and_blank_lines() {
        let d = parse_csv("label,x,y\nA,0,1\n\nB, 2.5 ,3\n".as_bytes(), train()).unwrap();
        assert_eq!(
            d.points,
            vec![Point::Vector(vec![0.0, 1.0]), Point::Vector(vec![2.5, 3.0])]
        );
        assert_eq!(d.labels, vec![Some("A".into()), Some("B".into())]);
        assert_eq!(d.lines, vec![2, 4]);
    }

    #[test]
    fn csv_errors_name_the_row() {
        let e = parse_csv("A,0\nB,x\n".as_bytes(), train()).unwrap_err();
        assert_eq!(e.to_string(), "row 2: column 2: `x` is not a number");
        let e = parse_csv("A,0\nB,1,2\n".as_bytes(), train()).unwrap_err();
        assert!(e.to_string().starts_with("row 2: 3 cells"), "{e}");
        let e = parse_csv("A,0\nB,inf\n".as_bytes(), train()).unwrap_err();
        assert!(e.to_string().contains("non-finite"));
    }

    #[test]
    fn csv_queries_may_omit_labels() {
        let q = Expect {
            payload: Some(Payload::Vector),
            dim: Some(2),
            labels_required: false,
        };
        let d = parse_csv("0.5,1\nA,0.5,1\n".as_bytes(), q).unwrap();
        assert_eq!(d.labels, vec![None, Some("A".into())]);
        assert_eq!(d.points[0], d.points[1]);
    }

    #[test]
    fn csv_strings() {
        let e = Expect {
            payload: Some(Payload::Text),
            ..train()
        };
        let d = parse_csv("label,text\nx,kitten\ny,\"sit,ting\"\n".as_bytes(), e).unwrap();
        assert_eq!(d.points[1], Point::text("sit,ting"));
    }

    #[test]
    fn jsonl_rows() {
        let text = "{\"label\": 1, \"vector\": [0.5]}\n\n{\"label\": \"b\", \"vector\": [2]}\n";
        let d = parse_jsonl(text.as_bytes(), train()).unwrap();
        assert_eq!(d.labels, vec![Some("1".into()), Some("b".into())]);
        assert_eq!(d.lines, vec![1, 3]);
        let e = parse_jsonl(
            "{\"label\": 1, \"vector\": [0.5]}\n{\"label\": 2, \"string\": \"ab\"}\n".as_bytes(),
            train(),
        )
        .unwrap_err();
        assert_eq!(e.to_string(), "row 2: string payload where vector data is expected");
        let e = parse_jsonl("{\"vector\": [1]}\n".as_bytes(), train()).unwrap_err();
        assert_eq!(e.to_string(), "row 1: missing label");
        let e = parse_jsonl("{\"label\": 1, \"vector\": [1]\n".as_bytes(), train()).unwrap_err();
        assert!(e.to_string().starts_with("row 1: invalid JSON"));
    }

    #[test]
    fn label_order() {
        let t = LabelTable::from_names(["10", "9", "-1", "9"]);
        assert_eq!(t.names(), ["-1", "9", "10"]);
        let t = LabelTable::from_names(["b", "A", "a", "10", "9"]);
        assert_eq!(t.names(), ["10", "9", "A", "a", "b"]);
        assert_eq!(t.id("a"), Some(3));
    }
}
