//! CSV export of feature series: header `time,<name>,...`, one row per
//! frame, `.` decimal separator, LF line endings. Numbers use the shortest
//! decimal rendering that parses back to the same value.

use crate::error::{Error, Result};
use crate::features::FeatureSeries;
use crate::num::Real;

fn column_names<T: Real>(series: &FeatureSeries<T>) -> Vec<String> {
    match series.series.dims() {
        1 => vec![series.name.clone()],
        3 => ["x", "y", "z"]
            .iter()
            .map(|axis| format!("{}_{}", series.name, axis))
            .collect(),
        d => (0..d).map(|i| format!("{}_{}", series.name, i)).collect(),
    }
}

/// Render a feature table. All series must share one time base.
pub fn export_feature_csv<T: Real>(series: &[FeatureSeries<T>]) -> Result<String> {
    let first = series
        .first()
        .ok_or_else(|| Error::Config("no feature series to export".into()))?;
    for s in &series[1..] {
        if s.series.len() != first.series.len() {
            return Err(Error::FrameCountMismatch {
                a: first.series.len(),
                b: s.series.len(),
            });
        }
        if !s.series.same_time_base(&first.series) {
            return Err(Error::TimeModelMismatch);
        }
    }
    let mut out = String::from("time");
    for s in series {
        for name in column_names(s) {
            out.push(',');
            out.push_str(&name);
        }
    }
    out.push('\n');
    for frame in 0..first.series.len() {
        out.push_str(&format!("{}", first.series.time_of_index(frame)?));
        for s in series {
            for dim in 0..s.series.dims() {
                out.push_str(&format!(",{}", s.series.value(dim, frame)?));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parse a table produced by [`export_feature_csv`] back into column names
/// (without the leading `time`) and rows (time first).
pub fn parse_feature_csv<T: Real>(text: &str) -> Result<(Vec<String>, Vec<Vec<T>>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty document"))?;
    let mut names: Vec<String> = header.split(',').map(str::to_string).collect();
    if names.first().map(String::as_str) != Some("time") {
        return Err(Error::parse(1, "header must start with `time`"));
    }
    names.remove(0);
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() + 1 {
            return Err(Error::parse(
                i + 1,
                format!("expected {} fields, found {}", names.len() + 1, fields.len()),
            ));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<T>()
                    .map_err(|_| Error::parse(i + 1, format!("bad number `{f}`")))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    Ok((names, rows))
}
