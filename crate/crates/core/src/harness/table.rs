use rug::Float;
use serde_json::{Map, Value};

use crate::numerics::to_decimal;

pub const DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn big(x: &Float) -> Cell {
        Cell::Text(to_decimal(x, DIGITS))
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.12e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Cell {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV with a leading `# manifest <hash>` comment line.
    pub fn to_csv(&self, manifest_hash: &str) -> String {
        let mut out = format!("# manifest {manifest_hash}\n{}\n", self.columns.join(","));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Whitespace-separated columns for gnuplot.
    pub fn to_gnuplot(&self, manifest_hash: &str) -> String {
        let mut out = format!("# manifest {manifest_hash}\n# {}\n", self.columns.join(" "));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new(&["n", "x", "label"]);
        t.push(vec![3usize.into(), 0.5.into(), "a".into()]);
        let csv = t.to_csv("abc");
        assert_eq!(csv, "# manifest abc\nn,x,label\n3,5.000000000000e-1,a\n");
        let j = t.to_json();
        assert_eq!(j[0]["n"], 3);
        assert_eq!(j[0]["label"], "a");
        assert!(t.to_gnuplot("abc").contains("# n x label\n"));
    }
}
