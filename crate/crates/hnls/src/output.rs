//! CSV outputs. Every file starts with a `# config_hash=0x…` comment line,
//! then a header row; missing quantities are empty cells.

use std::io::Write;
use std::path::Path;

/// Columns of the per-stamp observables file.
pub const OBSERVABLE_COLUMNS: [&str; 12] = [
    "t",
    "mass",
    "hamiltonian",
    "h1",
    "h2",
    "h4",
    "d2k_norm",
    "moment2k",
    "E_mod",
    "S_term",
    "R_term",
    "residual",
];

/// Columns of the bilinear ratio table.
pub const RATIO_COLUMNS: [&str; 9] = ["N", "M", "trials", "max_ratio", "median_ratio", "T", "seed", "n_max", "status"];

/// Columns of the residual-convergence file shared by the identity checks.
pub const RESIDUAL_COLUMNS: [&str; 5] = ["check", "case", "dt", "residual", "refinement_ratio"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(Some(x)) if x.is_finite() => format!("{x:e}"),
            Cell::Num(_) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(Some(x))
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Cell {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.into())
    }
}

/// Serializes a table to bytes, the exact content written by [`write_table`].
pub fn render_table(hash: u64, header: &[&str], rows: &[Vec<Cell>]) -> Vec<u8> {
    let mut out = format!("# config_hash={hash:#018x}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).expect("in-memory write");
        for row in rows {
            assert_eq!(row.len(), header.len(), "row width differs from header");
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        w.flush().expect("in-memory flush");
    }
    out
}

pub fn write_table(path: &Path, hash: u64, header: &[&str], rows: &[Vec<Cell>]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&render_table(hash, header, rows))?;
    f.sync_all()
}

/// A table read back: hash, header and raw cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub hash: u64,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].parse::<f64>().ok()).collect())
    }
}

pub fn read_table(bytes: &[u8]) -> Result<Table, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
    let (first, rest) = text.split_once('\n').ok_or("missing hash line")?;
    let hex = first
        .strip_prefix("# config_hash=0x")
        .ok_or_else(|| format!("first line `{first}` is not a config hash"))?;
    let hash = u64::from_str_radix(hex, 16).map_err(|e| e.to_string())?;
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok(Table { hash, header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_values_are_empty() {
        let bytes = render_table(0xab, &["t", "x"], &[vec![0.5.into(), Cell::Num(None)], vec![1.0.into(), f64::NAN.into()]]);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text, "# config_hash=0x00000000000000ab\nt,x\n5e-1,\n1e0,\n");
        let t = read_table(&bytes).unwrap();
        assert_eq!(t.hash, 0xab);
        assert_eq!(t.column("x").unwrap(), vec![None, None]);
        assert_eq!(t.column("t").unwrap(), vec![Some(0.5), Some(1.0)]);
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1 + 0.2;
        let t = read_table(&render_table(1, &["v"], &[vec![x.into()]])).unwrap();
        assert_eq!(t.column("v").unwrap()[0], Some(x));
    }
}
