//! Line-oriented `key = value` reader used by the Sellmeier data files and the
//! run-configuration files. Comments start with `#`; blank lines are ignored.

use crate::error::{Error, Result};

/// One parsed assignment with its source line for error reporting.
#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parse the full text of a key-value file. Later assignments to the same key
/// win; callers that need duplicate detection can inspect the entry list.
pub fn parse(text: &str, path: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                msg: format!("expected `key = value`, got `{trimmed}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                msg: "empty key before `=`".to_string(),
            });
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(entries)
}

pub fn parse_f64(entry: &Entry, path: &str) -> Result<f64> {
    entry.value.parse::<f64>().map_err(|e| Error::Parse {
        path: path.to_string(),
        line: entry.line,
        msg: format!("key `{}`: cannot parse `{}` as a number: {e}", entry.key, entry.value),
    })
}

/// Comma-separated list of reals.
pub fn parse_f64_list(entry: &Entry, path: &str) -> Result<Vec<f64>> {
    entry
        .value
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_string(),
                line: entry.line,
                msg: format!("key `{}`: cannot parse `{}` as a number: {e}", entry.key, s.trim()),
            })
        })
        .collect()
}

/// Comma-separated list of integers.
pub fn parse_i32_list(entry: &Entry, path: &str) -> Result<Vec<i32>> {
    entry
        .value
        .split(',')
        .map(|s| {
            s.trim().parse::<i32>().map_err(|e| Error::Parse {
                path: path.to_string(),
                line: entry.line,
                msg: format!("key `{}`: cannot parse `{}` as an integer: {e}", entry.key, s.trim()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let text = "# header\n\na = 1\n  b = two words  \n";
        let entries = parse(text, "test").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].key, "a");
        assert_eq!(entries[1].value, "two words");
        assert_eq!(entries[1].line, 4);
    }

    #[test]
    fn rejects_missing_equals() {
        let err = parse("just words\n", "cfg").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg:1"), "{msg}");
        assert!(msg.contains("key = value"), "{msg}");
    }

    #[test]
    fn list_parse_reports_key() {
        let entries = parse("coefficients = 1.0, nope, 3.0\n", "f").unwrap();
        let err = parse_f64_list(&entries[0], "f").unwrap_err();
        assert!(err.to_string().contains("coefficients"), "{err}");
    }
}
