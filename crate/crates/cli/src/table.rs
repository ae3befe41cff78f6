//! `minirat table`: reruns a benchmark table with every implemented method
//! and appends the published numbers of the external methods.

use std::path::Path;

use minirat::benchmarks::Table;
use minirat::solvers::solve;
use minirat::{Method, SolveError, SolverConfig};
use rayon::prelude::*;

use crate::io::fmt;
use crate::{CliError, SolverArgs};

const REFERENCE: &str = include_str!("../data/published_reference.csv");

/// Published AAA and RKFIT maximum errors for one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Published {
    pub e_aaa: String,
    pub e_rkfit: String,
}

pub fn published(table: &str, n1: usize, n2: usize) -> Option<Published> {
    let mut rdr = csv::Reader::from_reader(REFERENCE.as_bytes());
    let headers = rdr.headers().ok()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (t, a, b, aaa, rk) =
        (col("table")?, col("n1")?, col("n2")?, col("e_aaa")?, col("e_rkfit")?);
    rdr.records().flatten().find_map(|r| {
        (r[t] == *table && r[a] == n1.to_string() && r[b] == n2.to_string())
            .then(|| Published { e_aaa: r[aaa].to_string(), e_rkfit: r[rk].to_string() })
    })
}

struct Row {
    n: usize,
    gap: f64,
    sqrt_d2: f64,
    e: [f64; 3],
}

fn run_row(table: &Table, n: usize, base: &SolverConfig) -> Result<Row, SolveError> {
    let samples = table.samples().expect("benchmark samples are valid");
    let mut e = [f64::NAN; 3];
    let (mut gap, mut sqrt_d2) = (f64::NAN, f64::NAN);
    for (i, method) in [Method::DLawson, Method::SK, Method::SSK].into_iter().enumerate() {
        let out = solve(&samples, n, n, &SolverConfig { method, ..base.clone() })?;
        e[i] = out.max_err();
        if let Some(c) = out.certificate {
            gap = c.gap;
            sqrt_d2 = c.sqrt_d2;
        }
    }
    Ok(Row { n, gap, sqrt_d2, e })
}

pub fn cmd_table(id: &str, out: Option<&Path>, solver: &SolverArgs) -> Result<(), CliError> {
    let table = Table::find(id)
        .ok_or_else(|| CliError::Config(format!("unknown table `{id}` (expected t1..t8)")))?;
    let cfg = solver.config()?;
    let rows: Vec<Result<Row, SolveError>> =
        table.degrees.par_iter().map(|&n| run_row(table, n, &cfg)).collect();

    let mut text = String::from(
        "n1,n2,gap,sqrt_d2,e_dlawson,e_sk,e_ssk,published_reference_e_aaa,published_reference_e_rkfit\n",
    );
    for row in rows {
        let row = row.map_err(|e| match e {
            SolveError::Aborted { .. } => CliError::Aborted(e.to_string()),
            other => CliError::Config(other.to_string()),
        })?;
        let p = published(id, row.n, row.n)
            .unwrap_or(Published { e_aaa: String::new(), e_rkfit: String::new() });
        text.push_str(&format!(
            "{n},{n},{},{},{},{},{},{},{}\n",
            fmt(row.gap),
            fmt(row.sqrt_d2),
            fmt(row.e[0]),
            fmt(row.e[1]),
            fmt(row.e[2]),
            p.e_aaa,
            p.e_rkfit,
            n = row.n
        ));
    }
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use minirat::benchmarks::TABLES;

    #[test]
    fn reference_covers_every_row() {
        for t in TABLES.iter() {
            for &n in t.degrees {
                assert!(published(t.id, n, n).is_some(), "{} ({n},{n})", t.id);
            }
        }
        let p = published("t1", 4, 4).unwrap();
        assert_eq!(p.e_aaa, "9.1480e-03");
        assert_eq!(p.e_rkfit, "2.1156e-02");
    }
}
