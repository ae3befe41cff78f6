//! CSV and JSON input/output. Complex numbers are always split into
//! `_re`/`_im` columns; floats are written with 17 significant digits.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use minirat::{Complex, SampleSet, SolveTrace};
use serde::Serialize;

use crate::CliError;

type C64 = Complex<f64>;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Rows of a CSV file as floats, with the header (if any) split off. A first
/// row that does not parse as numbers is taken to be the header.
type Table = (Option<Vec<String>>, Vec<Vec<f64>>);

fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);
    let mut header = None;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => header = Some(rec.iter().map(str::to_owned).collect()),
            Err(e) => {
                return Err(CliError::Config(format!("{}: line {}: {e}", path.display(), i + 1)))
            }
        }
    }
    Ok((header, rows))
}

fn column(header: &Option<Vec<String>>, names: &[&str]) -> Option<usize> {
    header.as_ref()?.iter().position(|h| names.contains(&h.as_str()))
}

/// Sample file with columns `x_re,x_im` and optionally `f_re,f_im`.
pub fn read_samples(path: &Path) -> Result<(Vec<C64>, Option<Vec<C64>>), CliError> {
    let (header, rows) = read_table(path)?;
    let xr = column(&header, &["x_re"]).unwrap_or(0);
    let xi = column(&header, &["x_im"]).unwrap_or(1);
    let fr = column(&header, &["f_re"]).or(if header.is_none() { Some(2) } else { None });
    let fi = column(&header, &["f_im"]).or(if header.is_none() { Some(3) } else { None });
    let width = rows.first().map_or(0, Vec::len);
    if width < 2 {
        return Err(CliError::Config(format!(
            "{}: expected at least x_re,x_im columns",
            path.display()
        )));
    }
    let x = rows.iter().map(|r| C64::new(r[xr], r[xi])).collect();
    let f = match (fr, fi) {
        (Some(a), Some(b)) if a.max(b) < width => {
            Some(rows.iter().map(|r| C64::new(r[a], r[b])).collect())
        }
        _ => None,
    };
    Ok((x, f))
}

/// Node file: `y_re,y_im` (or `x_re,x_im`), or the first two columns.
pub fn read_nodes(path: &Path) -> Result<Vec<C64>, CliError> {
    let (header, rows) = read_table(path)?;
    let re = column(&header, &["y_re", "x_re"]).unwrap_or(0);
    let im = column(&header, &["y_im", "x_im"]).unwrap_or(1);
    if rows.first().map_or(0, Vec::len) <= re.max(im) {
        return Err(CliError::Config(format!("{}: expected re,im columns", path.display())));
    }
    let y: Vec<C64> = rows.iter().map(|r| C64::new(r[re], r[im])).collect();
    if let Some(j) = y.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(CliError::Config(format!(
            "{}: non-finite node in row {}",
            path.display(),
            j + 1
        )));
    }
    Ok(y)
}

/// One weight per row, first column.
pub fn read_weights(path: &Path) -> Result<Vec<f64>, CliError> {
    let (_, rows) = read_table(path)?;
    Ok(rows.iter().map(|r| r[0]).collect())
}

fn create(path: &Path) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn io_of(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

pub fn write_trace(path: &Path, trace: &SolveTrace) -> Result<(), CliError> {
    let mut w = create(path)?;
    let run = |w: &mut csv::Writer<File>| -> Result<(), csv::Error> {
        w.write_record(["iter", "sqrt_d2", "max_err", "gap", "active_nodes"])?;
        for r in &trace.records {
            w.write_record([
                r.k.to_string(),
                fmt(r.sqrt_d2),
                fmt(r.max_err),
                fmt(r.gap),
                r.active_count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| io_of(path, e))
}

pub fn write_error_curve(path: &Path, samples: &SampleSet, xi: &[C64]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let run = |w: &mut csv::Writer<File>| -> Result<(), csv::Error> {
        w.write_record(["x_re", "x_im", "f_re", "f_im", "xi_re", "xi_im", "abs_err"])?;
        for ((x, f), v) in samples.x().iter().zip(samples.f()).zip(xi) {
            w.write_record([x.re, x.im, f.re, f.im, v.re, v.im, (f - v).norm()].map(fmt))?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| io_of(path, e))
}

pub fn write_eval_to(out: impl Write, y: &[C64], xi: &[C64]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y_re", "y_im", "xi_re", "xi_im"])?;
    for (a, b) in y.iter().zip(xi) {
        w.write_record([a.re, a.im, b.re, b.im].map(fmt))?;
    }
    w.flush()
}

pub fn write_eval(path: &Path, y: &[C64], xi: &[C64]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_eval_to(file, y, xi).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 8.6262e-3, -2.5e-300, 1e300] {
            let s = fmt(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt(f64::NAN), "NaN");
        assert_eq!(fmt(f64::INFINITY), "inf");
    }
}
