//! CSV ingestion: one labelled example per row, aggregated into per-value
//! class-count vectors.
//!
//! The reader takes two columns — an attribute value and a class label —
//! and counts how often each (value, class) pair occurs. Value and class
//! orderings follow first appearance in the file, so ingestion is
//! deterministic and the resulting vectors are stable identifiers.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

/// What can go wrong while reading a dataset; messages carry the file and
/// the 1-based line where the problem sits.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}: column '{name}' not found (available: {available})")]
    MissingColumn {
        path: String,
        name: String,
        available: String,
    },
    #[error("{path} line {line}: row has {got} fields, expected at least {expected}")]
    ShortRow {
        path: String,
        line: u64,
        expected: usize,
        got: usize,
    },
    #[error("{path} line {line}: empty {what} token")]
    EmptyToken {
        path: String,
        line: u64,
        what: &'static str,
    },
    #[error("{path}: no data rows")]
    NoRows { path: String },
}

/// An ingested dataset: names plus the count matrix, in first-appearance
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    /// Header name of the attribute column used.
    pub attribute_column: String,
    /// Header name of the class column used.
    pub class_column: String,
    /// Distinct attribute values.
    pub values: Vec<String>,
    /// Distinct class labels.
    pub classes: Vec<String>,
    /// `vectors[i][j]` = occurrences of (values[i], classes[j]).
    pub vectors: Vec<Vec<u64>>,
}

/// Reads a CSV file with a header row and counts (value, class) pairs.
///
/// `attribute_column` defaults to the first column, `class_column` to the
/// last. Fields are trimmed; empty tokens and missing fields are errors
/// that name the offending line.
pub fn ingest_csv(
    path: &Path,
    attribute_column: Option<&str>,
    class_column: Option<&str>,
) -> Result<Dataset, IngestError> {
    let display = path.display().to_string();
    let io_err = |source| IngestError::Io {
        path: display.clone(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => io_err(source),
            other => IngestError::Malformed {
                path: display.clone(),
                message: format!("{other:?}"),
            },
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Malformed {
            path: display.clone(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(IngestError::Malformed {
            path: display,
            message: "file has no header row".into(),
        });
    }

    let resolve = |wanted: Option<&str>, default: usize| -> Result<usize, IngestError> {
        match wanted {
            None => Ok(default),
            Some(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::MissingColumn {
                    path: display.clone(),
                    name: name.to_string(),
                    available: headers.join(", "),
                }),
        }
    };
    let value_index = resolve(attribute_column, 0)?;
    let class_index = resolve(class_column, headers.len() - 1)?;

    let mut values: Vec<String> = Vec::new();
    let mut classes: Vec<String> = Vec::new();
    let mut value_slot: HashMap<String, usize> = HashMap::new();
    let mut class_slot: HashMap<String, usize> = HashMap::new();
    let mut vectors: Vec<Vec<u64>> = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Malformed {
            path: display.clone(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let needed = value_index.max(class_index) + 1;
        if record.len() < needed {
            return Err(IngestError::ShortRow {
                path: display.clone(),
                line,
                expected: needed,
                got: record.len(),
            });
        }
        let value = record[value_index].trim();
        if value.is_empty() {
            return Err(IngestError::EmptyToken {
                path: display.clone(),
                line,
                what: "attribute",
            });
        }
        let class = record[class_index].trim();
        if class.is_empty() {
            return Err(IngestError::EmptyToken {
                path: display.clone(),
                line,
                what: "class",
            });
        }

        let class_id = *class_slot.entry(class.to_string()).or_insert_with(|| {
            classes.push(class.to_string());
            for v in vectors.iter_mut() {
                v.push(0);
            }
            classes.len() - 1
        });
        let value_id = *value_slot.entry(value.to_string()).or_insert_with(|| {
            values.push(value.to_string());
            vectors.push(vec![0; classes.len()]);
            values.len() - 1
        });
        vectors[value_id][class_id] += 1;
    }

    if values.is_empty() {
        return Err(IngestError::NoRows { path: display });
    }
    Ok(Dataset {
        attribute_column: headers[value_index].clone(),
        class_column: headers[class_index].clone(),
        values,
        classes,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::Builder::new()
            .suffix(".csv")
            .tempfile()
            .unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    #[test]
    fn aggregates_counts_in_first_appearance_order() {
        let file = write_csv(
            "animal,class\n\
             a,red\na,red\na,red\na,red\n\
             b,blue\nb,blue\nb,blue\nb,blue\n\
             c,red\nc,red\nc,red\nc,blue\n",
        );
        let dataset = ingest_csv(file.path(), None, None).unwrap();
        assert_eq!(dataset.values, vec!["a", "b", "c"]);
        assert_eq!(dataset.classes, vec!["red", "blue"]);
        assert_eq!(
            dataset.vectors,
            vec![vec![4, 0], vec![0, 4], vec![3, 1]],
        );
        assert_eq!(dataset.attribute_column, "animal");
        assert_eq!(dataset.class_column, "class");
    }

    #[test]
    fn honors_named_columns() {
        let file = write_csv("id,shape,color\n1,square,red\n2,round,blue\n");
        let dataset =
            ingest_csv(file.path(), Some("shape"), Some("color")).unwrap();
        assert_eq!(dataset.values, vec!["square", "round"]);
        assert_eq!(dataset.classes, vec!["red", "blue"]);
        // Default columns: first and last.
        let defaults = ingest_csv(file.path(), None, None).unwrap();
        assert_eq!(defaults.values, vec!["1", "2"]);
        assert_eq!(defaults.classes, vec!["red", "blue"]);
    }

    #[test]
    fn trims_whitespace() {
        let file = write_csv("v,c\n a , x \nb,y\n");
        let dataset = ingest_csv(file.path(), None, None).unwrap();
        assert_eq!(dataset.values, vec!["a", "b"]);
        assert_eq!(dataset.classes, vec!["x", "y"]);
    }

    #[test]
    fn reports_missing_column_with_alternatives() {
        let file = write_csv("v,c\na,x\n");
        let err = ingest_csv(file.path(), Some("nope"), None).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("'nope'"), "{message}");
        assert!(message.contains("v, c"), "{message}");
    }

    #[test]
    fn reports_empty_tokens_with_line_numbers() {
        let file = write_csv("v,c\na,x\n,y\n");
        let err = ingest_csv(file.path(), None, None).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 3"), "{message}");
        assert!(message.contains("attribute"), "{message}");

        let file = write_csv("v,c\na,  \n");
        let err = ingest_csv(file.path(), None, None).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 2"), "{message}");
        assert!(message.contains("class"), "{message}");
    }

    #[test]
    fn reports_short_rows() {
        let file = write_csv("v,c\na\n");
        let err = ingest_csv(file.path(), None, None).unwrap_err();
        assert!(matches!(err, IngestError::ShortRow { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_header_only_files() {
        let file = write_csv("v,c\n");
        let err = ingest_csv(file.path(), None, None).unwrap_err();
        assert!(matches!(err, IngestError::NoRows { .. }));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = ingest_csv(Path::new("/nonexistent/data.csv"), None, None).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }
}
