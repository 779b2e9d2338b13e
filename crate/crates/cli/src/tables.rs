//! The three summary tables: longest alternating blocks (Table 1), the
//! `log_λ N` grid (Table 2) and ten runs at `N = 10000` (Table 3).
//!
//! Table 2 is deterministic. Tables 1 and 3 come from seeded simulations.

use switchrun::montecarlo::simulate_stats;
use switchrun::rng::mix_seed;
use switchrun::{log_lambda, BernoulliParams};

use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// Row labels and success probabilities used by all three tables.
pub const TABLE_PROBABILITIES: [(&str, f64); 3] =
    [("1/3", 1.0 / 3.0), ("1/4", 0.25), ("1/10", 0.1)];

/// Sequence lengths of Tables 1 and 2.
pub const TABLE_LENGTHS: [u64; 5] = [200, 500, 1000, 2000, 5000];

pub const TABLE3_LENGTH: u64 = 10_000;
pub const TABLE3_RUNS: u64 = 10;

/// Expected Table 2 values for each probability row.
pub const TABLE2_VALUES: [[i64; 5]; 3] = [[7, 8, 9, 10, 11], [6, 7, 8, 9, 10], [4, 5, 6, 6, 7]];

fn params(p: f64) -> BernoulliParams {
    BernoulliParams::new(p).expect("table probabilities are valid")
}

/// `⌊log_λ N⌋`.
pub fn log_lambda_floor(n: u64, p: BernoulliParams) -> i64 {
    log_lambda(n as f64, p).expect("N >= 1").floor() as i64
}

/// `log_λ N` rounded to the nearest integer, as printed in Table 2
/// and in the last row of Table 3.
pub fn log_lambda_nearest(n: u64, p: BernoulliParams) -> i64 {
    log_lambda(n as f64, p).expect("N >= 1").round() as i64
}

/// The `log_λ N` grid with a caller-chosen integerization.
pub fn log_lambda_grid(integerize: impl Fn(u64, BernoulliParams) -> i64) -> [[i64; 5]; 3] {
    let mut grid = [[0; 5]; 3];
    for (row, &(_, p)) in TABLE_PROBABILITIES.iter().enumerate() {
        for (col, &n) in TABLE_LENGTHS.iter().enumerate() {
            grid[row][col] = integerize(n, params(p));
        }
    }
    grid
}

fn grid_header() -> Vec<String> {
    std::iter::once("p".to_string())
        .chain(TABLE_LENGTHS.iter().map(|n| n.to_string()))
        .collect()
}

fn braced(pattern: &str) -> String {
    format!("{{{pattern}}}")
}

/// One simulated path per (p, N) cell; the cell shows its leftmost longest
/// alternating block. Cell seed: `mix_seed(seed, row, column)`.
pub fn table1(seed: u64) -> Table {
    let mut table = Table {
        title: "Longest consecutive-switch pattern, one simulated path per cell".into(),
        header: grid_header(),
        rows: Vec::new(),
    };
    for (row, &(label, p)) in TABLE_PROBABILITIES.iter().enumerate() {
        let mut cells = vec![Cell::text(label)];
        for (col, &n) in TABLE_LENGTHS.iter().enumerate() {
            let stats = simulate_stats(n, params(p), mix_seed(seed, row as u64, col as u64));
            cells.push(Cell::Text(braced(&stats.pattern(n as usize))));
        }
        table.push(cells);
    }
    table
}

pub fn table2() -> Table {
    let grid = log_lambda_grid(log_lambda_nearest);
    let mut table = Table {
        title: "log_λ N grid, rounded to the nearest integer".into(),
        header: grid_header(),
        rows: Vec::new(),
    };
    for (row, &(label, _)) in TABLE_PROBABILITIES.iter().enumerate() {
        let mut cells = vec![Cell::text(label)];
        cells.extend(grid[row].iter().map(|&v| Cell::Int(v)));
        table.push(cells);
    }
    table
}

/// Ten simulated paths of length 10000 per probability. Run `r` of column
/// `c` uses seed `mix_seed(seed, c, r)`. The last row holds `log_λ N`
/// rounded to the nearest integer.
pub fn table3(seed: u64) -> Table {
    let mut header = vec!["run".to_string()];
    header.extend(
        TABLE_PROBABILITIES
            .iter()
            .map(|(label, _)| label.to_string()),
    );
    let mut table = Table {
        title: format!(
            "Longest consecutive switches in {TABLE3_RUNS} paths of N = {TABLE3_LENGTH}"
        ),
        header,
        rows: Vec::new(),
    };
    for run in 0..TABLE3_RUNS {
        let mut cells = vec![Cell::Text(format!("T-{}", run + 1))];
        for (col, &(_, p)) in TABLE_PROBABILITIES.iter().enumerate() {
            let stats = simulate_stats(TABLE3_LENGTH, params(p), mix_seed(seed, col as u64, run));
            cells.push(Cell::Text(format!(
                "{} M_N={}",
                braced(&stats.pattern(TABLE3_LENGTH as usize)),
                stats.longest_run
            )));
        }
        table.push(cells);
    }
    let mut last = vec![Cell::text("log_λ N")];
    last.extend(
        TABLE_PROBABILITIES
            .iter()
            .map(|&(_, p)| Cell::Int(log_lambda_nearest(TABLE3_LENGTH, params(p)))),
    );
    table.push(last);
    table
}

pub fn table(id: u8, seed: u64) -> Result<Table> {
    match id {
        1 => Ok(table1(seed)),
        2 => Ok(table2()),
        3 => Ok(table3(seed)),
        _ => Err(CliError::Usage(format!(
            "unknown table {id}; expected 1, 2 or 3"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_grid_matches_table2_values() {
        assert_eq!(log_lambda_grid(log_lambda_nearest), TABLE2_VALUES);
    }

    #[test]
    fn floor_grid_differs_in_one_cell() {
        let floor = log_lambda_grid(log_lambda_floor);
        let mut diffs = Vec::new();
        for r in 0..3 {
            for c in 0..5 {
                if floor[r][c] != TABLE2_VALUES[r][c] {
                    diffs.push((TABLE_PROBABILITIES[r].0, TABLE_LENGTHS[c], floor[r][c]));
                }
            }
        }
        assert_eq!(diffs, vec![("1/10", 1000, 5)]);
        assert_eq!(floor[0][4], 11);
        assert_eq!(floor[1][0], 6);
    }

    #[test]
    fn table3_last_row_values() {
        let t = table3(1);
        let last = t.rows.last().unwrap();
        assert_eq!(&last[1..], &[Cell::Int(12), Cell::Int(11), Cell::Int(8)]);
    }

    #[test]
    fn simulated_tables_layout() {
        let t1 = table1(5);
        assert_eq!(t1.rows.len(), 3);
        assert!(t1
            .rows
            .iter()
            .flatten()
            .skip(1)
            .all(|c| matches!(c, Cell::Text(_))));
        let Cell::Text(cell) = &t1.rows[0][1] else {
            panic!()
        };
        assert!(cell.starts_with('{') && cell.ends_with('}'));
        let t3 = table3(5);
        assert_eq!(t3.rows.len(), TABLE3_RUNS as usize + 1);
        assert_eq!(t1, table1(5));
        assert!(table(4, 0).is_err());
    }
}
