//! Label (`.lab`) files: one annotation per line, `start end name`, seconds
//! as decimal numbers, UTF-8, LF line endings.

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Label<T> {
    pub start: T,
    pub end: T,
    pub name: String,
}

impl<T: Real> Label<T> {
    pub fn new(start: T, end: T, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if end < start {
            return Err(Error::LabelOrder {
                start: start.as_f64(),
                end: end.as_f64(),
            });
        }
        if start < T::zero() {
            return Err(Error::Config(format!("label start {start} is negative")));
        }
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!("label name `{name}` is not a single token")));
        }
        Ok(Label { start, end, name })
    }
}

/// Parse labels, sorted by start time.
pub fn read_labels<T: Real>(text: &str) -> Result<Vec<Label<T>>> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected `start end name`, found {} field(s)", fields.len()),
            ));
        }
        let start: T = fields[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad start time `{}`", fields[0])))?;
        let end: T = fields[1]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad end time `{}`", fields[1])))?;
        if end < start {
            return Err(Error::LabelOrder {
                start: start.as_f64(),
                end: end.as_f64(),
            });
        }
        if start < T::zero() {
            return Err(Error::parse(line_no, "negative start time"));
        }
        labels.push(Label {
            start,
            end,
            name: fields[2].to_string(),
        });
    }
    labels.sort_by(|a, b| a.start.partial_cmp(&b.start).expect("finite times"));
    Ok(labels)
}

/// Render labels in canonical form; inverse of [`read_labels`] on sorted
/// input.
pub fn write_labels<T: Real>(labels: &[Label<T>]) -> Result<String> {
    let mut out = String::new();
    for l in labels {
        if l.name.is_empty() || l.name.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!("label name `{}` is not a single token", l.name)));
        }
        if l.end < l.start {
            return Err(Error::LabelOrder {
                start: l.start.as_f64(),
                end: l.end.as_f64(),
            });
        }
        out.push_str(&format!("{} {} {}\n", l.start, l.end, l.name));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_label() {
        let labels = read_labels::<f64>("0.5 1.25 laugh\n").unwrap();
        assert_eq!(labels, vec![Label::new(0.5, 1.25, "laugh").unwrap()]);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = "0.5 1.25 laugh\n2 2.75 wave\n10.125 11 jump\n";
        let labels = read_labels::<f64>(text).unwrap();
        assert_eq!(write_labels(&labels).unwrap(), text);
    }

    #[test]
    fn read_sorts_by_start() {
        let labels = read_labels::<f64>("3 4 b\n1 2 a\n").unwrap();
        assert_eq!(labels[0].name, "a");
        assert_eq!(labels[1].name, "b");
    }

    #[test]
    fn reversed_interval_rejected() {
        assert!(matches!(
            read_labels::<f64>("2.0 1.0 x\n"),
            Err(Error::LabelOrder { .. })
        ));
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(read_labels::<f64>("0.5 laugh\n").is_err());
        assert!(read_labels::<f64>("a b c\n").is_err());
        assert!(read_labels::<f64>("-1 2 x\n").is_err());
    }

    #[test]
    fn blank_lines_ignored() {
        let labels = read_labels::<f64>("\n0 1 a\n\n").unwrap();
        assert_eq!(labels.len(), 1);
    }
}
