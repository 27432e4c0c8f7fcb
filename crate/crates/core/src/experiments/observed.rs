use std::path::Path;

use crate::error::{Error, Result};

pub const OBSERVED_HEADER: &str = "wait_minutes";

/// Parses an observed-wait CSV: header `wait_minutes`, one wait per line.
pub fn parse_observed_csv(text: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |message: String| Error::Parse {
        what: "observed waits".into(),
        message,
    };
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?;
    if headers.len() != 1 || &headers[0] != OBSERVED_HEADER {
        return Err(parse_err(format!(
            "expected a single `{OBSERVED_HEADER}` column"
        )));
    }
    let mut waits = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let value: f64 = record[0].parse().map_err(|_| {
            parse_err(format!(
                "row {}: `{}` is not a number",
                line + 1,
                &record[0]
            ))
        })?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(parse_err(format!(
                "row {}: wait must be non-negative",
                line + 1
            )));
        }
        waits.push(value);
    }
    if waits.is_empty() {
        return Err(parse_err("no observations".into()));
    }
    Ok(waits)
}

pub fn read_observed_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_observed_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_column() {
        assert_eq!(
            parse_observed_csv("wait_minutes\n0\n1.5\n 2.25 \n").unwrap(),
            vec![0.0, 1.5, 2.25]
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_observed_csv("wait\n1\n").is_err());
        assert!(parse_observed_csv("wait_minutes\nabc\n").is_err());
        assert!(parse_observed_csv("wait_minutes\n-1\n").is_err());
        assert!(parse_observed_csv("wait_minutes\n").is_err());
    }
}
