//! Surveillance CSV ingestion: two columns, `date,count`, ISO-8601 dates,
//! non-negative integer counts, strictly increasing dates (gaps allowed).

use std::path::Path;

use chrono::NaiveDate;
use seiprd::dates;
use seiprd::observation::CountSeries;

use crate::error::{CliError, Result};

pub fn ingest_csv(path: &Path) -> Result<CountSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;

    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "count" {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            row: 0,
            message: format!(
                "expected header 'date,count', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut days = Vec::new();
    let mut counts = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
            CliError::Format {
                path: path.to_path_buf(),
                row,
                message: format!("unparseable date '{}': {e}", &record[0]),
            }
        })?;
        let count: i64 = record[1].parse().map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            row,
            message: format!("unparseable count '{}': {e}", &record[1]),
        })?;
        if count < 0 {
            return Err(CliError::Validation {
                path: path.to_path_buf(),
                row,
                message: format!("negative count {count}"),
            });
        }
        let day = dates::day_of(date);
        if let Some(&prev) = days.last() {
            if day <= prev {
                return Err(CliError::Ordering {
                    path: path.to_path_buf(),
                    row,
                    message: format!(
                        "date {} does not increase over the previous row ({})",
                        record[0].to_string(),
                        dates::date_of(prev)
                    ),
                });
            }
        }
        days.push(day);
        counts.push(count as u64);
    }

    CountSeries::new(days, counts).map_err(|e| CliError::Internal(e.to_string()))
}
