//! The benchmark tables: which function and which diagonal types each
//! covers. Every table samples 2000 points with the function's default scheme.

use crate::error::ProblemError;
use crate::problems::{generate_nodes, sample, FunctionId, SampleSet};

pub const TABLE_M: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table {
    pub id: &'static str,
    pub function: usize,
    pub degrees: &'static [usize],
}

pub const TABLES: [Table; 8] = [
    Table { id: "t1", function: 0, degrees: &[4, 8, 12, 16, 20, 24, 28] },
    Table { id: "t2", function: 1, degrees: &[1, 3, 5, 7, 9, 11] },
    Table { id: "t3", function: 2, degrees: &[12, 16, 20, 24, 28, 32] },
    Table { id: "t4", function: 3, degrees: &[16, 18, 20, 22, 24, 26] },
    Table { id: "t5", function: 4, degrees: &[1, 3, 5, 7, 9, 11] },
    Table { id: "t6", function: 5, degrees: &[1, 3, 5, 7, 9, 11] },
    Table { id: "t7", function: 6, degrees: &[1, 3, 5, 7, 9, 11] },
    Table { id: "t8", function: 7, degrees: &[6, 10, 14, 18, 22, 26] },
];

impl Table {
    pub fn find(id: &str) -> Option<&'static Table> {
        TABLES.iter().find(|t| t.id == id)
    }

    pub fn function_id(&self) -> FunctionId {
        FunctionId::BENCHMARKS[self.function].clone()
    }

    /// Samples of the table's function on its default 2000-point scheme.
    pub fn samples(&self) -> Result<SampleSet, ProblemError> {
        let fid = self.function_id();
        let scheme = fid.default_scheme(TABLE_M).expect("benchmark functions have a scheme");
        sample(&fid, &generate_nodes(&scheme)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_cover_all_benchmarks() {
        for (i, t) in TABLES.iter().enumerate() {
            assert_eq!(t.function, i);
            assert_eq!(t.function_id().name(), format!("f{}", i + 1));
            assert_eq!(Table::find(t.id), Some(t));
        }
        assert!(Table::find("t9").is_none());
    }
}
