//! Loading series from delimited text.
//!
//! Two layouts are understood:
//!
//! * `csv`: one sample per row, the series taken from a chosen column. A
//!   first row that does not parse is treated as a header.
//! * `ucr-tsv`: one series per row as in the UCR archive, a class label
//!   followed by the samples, separated by tabs, commas or spaces. The
//!   column selector picks the row.
//!
//! Row numbers in errors are 1-based line numbers.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use shrink_core::codec::{detect_decimals, MAX_DECIMALS};
use shrink_core::TimeSeries;

use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    UcrTsv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "ucr-tsv" | "ucr" | "tsv" => Ok(Format::UcrTsv),
            other => Err(config("format", format!("unknown format {other:?}"))),
        }
    }
}

/// A loaded series and what was learned about it.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub series: TimeSeries,
    /// Decimal places every sample fits in, if at most [`MAX_DECIMALS`].
    pub decimals: Option<u32>,
}

impl Ingested {
    fn new(series: TimeSeries) -> Self {
        let decimals = detect_decimals(series.values(), MAX_DECIMALS);
        Self { series, decimals }
    }

    pub fn n(&self) -> usize {
        self.series.len()
    }

    pub fn range(&self) -> f64 {
        self.series.range()
    }
}

pub fn ingest(path: &Path, format: Format, column: usize) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse(&text, format, column, name)
}

pub fn parse(text: &str, format: Format, column: usize, name: impl Into<String>) -> Result<Ingested> {
    let values = match format {
        Format::Csv => parse_csv(text, column)?,
        Format::UcrTsv => parse_ucr(text, column)?,
    };
    if values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(Ingested::new(TimeSeries::new(name, values)?))
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_csv(text: &str, column: usize) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let cell = record.get(column).ok_or(Error::MissingColumn { row, column })?;
        match parse_cell(cell) {
            Some(v) => values.push(v),
            None if first && !looks_numeric(cell) => {}
            None => {
                return Err(Error::NotNumeric {
                    row,
                    column,
                    cell: cell.to_string(),
                })
            }
        }
        first = false;
    }
    Ok(values)
}

/// Header cells are words; "NaN", "inf" and malformed numbers are data errors.
fn looks_numeric(cell: &str) -> bool {
    let lower = cell.trim().to_ascii_lowercase();
    lower.parse::<f64>().is_ok()
        || lower
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'))
}

fn parse_ucr(text: &str, selected: usize) -> Result<Vec<f64>> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .collect();
    let &(line_index, line) = rows.get(selected).ok_or(Error::MissingRow {
        row: selected,
        rows: rows.len(),
    })?;
    let row = line_index as u64 + 1;
    line.split(|c: char| c == '\t' || c == ',' || c.is_whitespace())
        .filter(|cell| !cell.is_empty())
        .enumerate()
        .skip(1)
        .map(|(column, cell)| {
            parse_cell(cell).ok_or_else(|| Error::NotNumeric {
                row,
                column,
                cell: cell.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_csv() {
        let got = parse("1.5\n2.25\n-3\n4\n", Format::Csv, 0, "x").unwrap();
        assert_eq!(got.series.values(), &[1.5, 2.25, -3.0, 4.0]);
        assert_eq!(got.decimals, Some(2));
        assert_eq!(got.n(), 4);
        assert_eq!(got.range(), 7.0);
    }

    #[test]
    fn header_and_column_selection() {
        let text = "time,value\n0,1.0\n1,1.5\n";
        let got = parse(text, Format::Csv, 1, "x").unwrap();
        assert_eq!(got.series.values(), &[1.0, 1.5]);
    }

    #[test]
    fn nan_cell_names_the_row() {
        let err = parse("1\n2\nNaN\n4\n", Format::Csv, 0, "x").unwrap_err();
        match err {
            Error::NotNumeric { row, .. } => assert_eq!(row, 3),
            e => panic!("unexpected {e}"),
        }
        assert!(parse("NaN\n1\n", Format::Csv, 0, "x").is_err());
        assert!(parse("1\nabc\n", Format::Csv, 0, "x").is_err());
    }

    #[test]
    fn missing_column_is_reported() {
        let err = parse("1,2\n3\n", Format::Csv, 1, "x").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { row: 2, column: 1 }));
    }

    #[test]
    fn ucr_rows() {
        let text = "1\t0.1\t0.2\t0.3\n2\t1.5\t-2.5\n\n1\t7\t8\t9\t10\n";
        let got = parse(text, Format::UcrTsv, 1, "x").unwrap();
        assert_eq!(got.series.values(), &[1.5, -2.5]);
        let got = parse(text, Format::UcrTsv, 2, "x").unwrap();
        assert_eq!(got.series.values(), &[7.0, 8.0, 9.0, 10.0]);
        assert!(matches!(
            parse(text, Format::UcrTsv, 3, "x"),
            Err(Error::MissingRow { row: 3, rows: 3 })
        ));
        let err = parse("1,0.5,NaN\n", Format::UcrTsv, 0, "x").unwrap_err();
        assert!(matches!(err, Error::NotNumeric { row: 1, column: 2, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse("", Format::Csv, 0, "x"), Err(Error::Empty)));
        assert!(matches!(parse("value\n", Format::Csv, 0, "x"), Err(Error::Empty)));
    }
}
