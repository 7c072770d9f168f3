//! CSV ingestion for series and labelled samples.
//!
//! * Wide: a header row, then one row per time step and one column per
//!   channel. A leading `t`, `time`, `timestamp` or `date` column is dropped.
//! * Long: header exactly `timestamp,channel,value`; channels keep their order
//!   of first appearance and values their file order.
//! * Labelled: one sample per row, features followed by an integer label; an
//!   optional header row is detected by a non-numeric first row.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

const TIME_COLUMNS: [&str; 4] = ["t", "time", "timestamp", "date"];
const LONG_HEADER: [&str; 3] = ["timestamp", "channel", "value"];

/// Named channels of equal or unequal length.
#[derive(Debug, Clone, PartialEq)]
pub struct WideTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub inputs: PointSet,
    pub labels: Vec<i64>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn reader<R: Read>(src: R, headers: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(src)
}

fn number(cell: &str, line: u64) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line: line as usize,
            message: format!("expected a finite number, got `{cell}`"),
        })
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn read_wide(path: &Path) -> Result<WideTable> {
    parse_wide(open(path)?)
}

pub fn read_long(path: &Path) -> Result<WideTable> {
    parse_long(open(path)?)
}

/// Long format if the header is `timestamp,channel,value`, wide otherwise.
pub fn read_series(path: &Path) -> Result<WideTable> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .unwrap_or("");
    let fields: Vec<String> = header.split(',').map(|f| f.trim().to_ascii_lowercase()).collect();
    if fields == LONG_HEADER {
        parse_long(text.as_bytes())
    } else {
        parse_wide(text.as_bytes())
    }
}

pub fn read_labeled(path: &Path) -> Result<LabeledSet> {
    parse_labeled(open(path)?)
}

pub(crate) fn parse_wide<R: Read>(src: R) -> Result<WideTable> {
    let mut rdr = reader(src, true);
    let mut names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let skip = usize::from(
        names
            .first()
            .is_some_and(|h| TIME_COLUMNS.contains(&h.to_ascii_lowercase().as_str())),
    );
    names.drain(..skip);
    if names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "wide CSV has no value columns".into(),
        });
    }
    let mut columns = vec![Vec::new(); names.len()];
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        for (col, cell) in columns.iter_mut().zip(rec.iter().skip(skip)) {
            col.push(number(cell, line)?);
        }
    }
    Ok(WideTable { names, columns })
}

pub(crate) fn parse_long<R: Read>(src: R) -> Result<WideTable> {
    let mut rdr = reader(src, true);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    if header != LONG_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("long CSV header must be `timestamp,channel,value`, got `{}`", header.join(",")),
        });
    }
    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let value = number(&rec[2], line_of(&rec))?;
        let slot = match names.iter().position(|n| n == &rec[1]) {
            Some(i) => i,
            None => {
                names.push(rec[1].to_string());
                columns.push(Vec::new());
                names.len() - 1
            }
        };
        columns[slot].push(value);
    }
    if names.is_empty() {
        return Err(Error::InsufficientData("long CSV has no rows".into()));
    }
    Ok(WideTable { names, columns })
}

pub(crate) fn parse_labeled<R: Read>(src: R) -> Result<LabeledSet> {
    let mut rdr = reader(src, false);
    let mut rows: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = line_of(&rec);
        if i == 0 && rec.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Parse {
                line: line as usize,
                message: "a labelled row needs at least one feature and a label".into(),
            });
        }
        let label_cell = &rec[rec.len() - 1];
        let label = label_cell.parse::<i64>().map_err(|_| Error::Parse {
            line: line as usize,
            message: format!("label must be an integer, got `{label_cell}`"),
        })?;
        for cell in rec.iter().take(rec.len() - 1) {
            rows.push(number(cell, line)?);
        }
        width.get_or_insert(rec.len() - 1);
        labels.push(label);
    }
    let d = width.ok_or_else(|| Error::InsufficientData("labelled CSV has no rows".into()))?;
    Ok(LabeledSet {
        inputs: PointSet::new(rows, d)?,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_drops_time_column() {
        let t = parse_wide("timestamp,a,b\n2020-01-01,1,2\n2020-01-02,3,4.5\n".as_bytes()).unwrap();
        assert_eq!(t.names, ["a", "b"]);
        assert_eq!(t.columns, vec![vec![1.0, 3.0], vec![2.0, 4.5]]);
        let t = parse_wide("x1\n1\n2\n".as_bytes()).unwrap();
        assert_eq!(t.columns, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn wide_reports_bad_cells() {
        let err = parse_wide("a\n1\nfoo\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn long_groups_channels() {
        let text = "timestamp,channel,value\n0,b,1\n0,a,2\n1,b,3\n1,a,4\n";
        let t = parse_long(text.as_bytes()).unwrap();
        assert_eq!(t.names, ["b", "a"]);
        assert_eq!(t.columns, vec![vec![1.0, 3.0], vec![2.0, 4.0]]);
        assert!(parse_long("time,chan,v\n".as_bytes()).is_err());
    }

    #[test]
    fn labeled_with_and_without_header() {
        let a = parse_labeled("f1,f2,label\n0.5,1,0\n2,3,1\n".as_bytes()).unwrap();
        let b = parse_labeled("0.5,1,0\n2,3,1\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels, [0, 1]);
        assert_eq!(a.inputs.point(1), &[2.0, 3.0]);
        assert!(parse_labeled("1,2,0.5\n".as_bytes()).is_err());
        assert!(parse_labeled("1,2,0\n1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn series_autodetects() {
        let dir = tempfile::tempdir().unwrap();
        let long = dir.path().join("long.csv");
        std::fs::write(&long, "timestamp,channel,value\n0,x,1\n1,x,2\n").unwrap();
        assert_eq!(read_series(&long).unwrap().columns, vec![vec![1.0, 2.0]]);
        let wide = dir.path().join("wide.csv");
        std::fs::write(&wide, "t,x\n0,1\n1,2\n").unwrap();
        assert_eq!(read_series(&wide).unwrap().columns, vec![vec![1.0, 2.0]]);
    }
}
