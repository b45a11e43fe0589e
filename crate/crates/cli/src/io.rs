//! CSV inputs. Every parse failure names the file and the line.

use std::fs::File;
use std::path::Path;

use calmix_core::CalibrationData;

use crate::error::{CliError, CliResult};

struct Rows {
    headers: Vec<String>,
    /// `(line, fields)` per data record.
    records: Vec<(u64, Vec<String>)>,
}

fn read_rows(path: &Path) -> CliResult<Rows> {
    let shown = path.display();
    let file = File::open(path).map_err(|e| CliError::input(format!("{shown}: {e}")))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(&shown, e))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(&shown, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec.iter().map(str::to_string).collect()));
    }
    if records.is_empty() {
        return Err(CliError::input(format!("{shown}: no data rows")));
    }
    Ok(Rows { headers, records })
}

fn csv_error(shown: &impl std::fmt::Display, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => {
            let line = pos.as_ref().map_or(0, |p| p.line());
            CliError::input(format!(
                "{shown}: line {line}: expected {expected_len} fields, found {len}"
            ))
        }
        _ => CliError::input(format!("{shown}: {e}")),
    }
}

impl Rows {
    fn column(&self, path: &Path, name: &str) -> CliResult<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::input(format!(
                "{}: missing column `{name}` (found: {})",
                path.display(),
                self.headers.join(", ")
            ))
        })
    }

    fn numbers(&self, path: &Path, name: &str) -> CliResult<Vec<f64>> {
        let j = self.column(path, name)?;
        self.records
            .iter()
            .map(|(line, fields)| {
                let raw = &fields[j];
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(CliError::input(format!(
                        "{}: line {line}: column `{name}`: `{raw}` is not a finite number",
                        path.display()
                    ))),
                }
            })
            .collect()
    }
}

/// Calibration pairs from columns `x` (instrument reading) and `u`
/// (reference value).
pub fn read_calibration(path: &Path) -> CliResult<CalibrationData> {
    let rows = read_rows(path)?;
    let x = rows.numbers(path, "x")?;
    let u = rows.numbers(path, "u")?;
    Ok(CalibrationData::new(x, u)?)
}

/// One numeric column.
pub fn read_series(path: &Path, column: &str) -> CliResult<Vec<f64>> {
    read_rows(path)?.numbers(path, column)
}

/// Grouped observations from columns `group` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedData {
    /// Labels in order of first appearance.
    pub labels: Vec<String>,
    pub sizes: Vec<usize>,
    /// Observations stored group by group.
    pub y: Vec<f64>,
}

pub fn read_groups(path: &Path) -> CliResult<GroupedData> {
    let rows = read_rows(path)?;
    let g = rows.column(path, "group")?;
    let y = rows.numbers(path, "y")?;
    let mut labels: Vec<String> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for ((_, fields), v) in rows.records.iter().zip(y) {
        let label = &fields[g];
        match labels.iter().position(|l| l == label) {
            Some(i) => members[i].push(v),
            None => {
                labels.push(label.clone());
                members.push(vec![v]);
            }
        }
    }
    Ok(GroupedData {
        labels,
        sizes: members.iter().map(Vec::len).collect(),
        y: members.into_iter().flatten().collect(),
    })
}
