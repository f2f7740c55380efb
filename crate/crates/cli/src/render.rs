use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    JsonLines,
    Csv,
}

/// A cell carries its structured value (for JSON) and its display text
/// (for tables and CSV).
#[derive(Debug, Clone)]
pub struct Cell {
    pub json: Value,
    pub text: String,
}

impl Cell {
    pub fn new(json: Value, text: impl Into<String>) -> Self {
        Cell {
            json,
            text: text.into(),
        }
    }

    pub fn empty() -> Self {
        Cell::new(Value::Null, "")
    }
}

impl<T: Into<Value> + ToString> From<T> for Cell {
    fn from(v: T) -> Self {
        let text = v.to_string();
        Cell::new(v.into(), text)
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::JsonLines => self.render_json_lines(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_table(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.text.chars().count());
            }
        }
        let line = |cells: Vec<&str>| -> String {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(self.columns.iter().map(|s| s.as_str()).collect()));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(|c| c.text.as_str()).collect()));
            out.push('\n');
        }
        out
    }

    fn render_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .cloned()
                .zip(row.iter().map(|c| c.json.clone()))
                .collect();
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text.as_str())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["group", "value"]);
        t.push(vec!["2,4".into(), 5u64.into()]);
        t.push(vec!["6".into(), Cell::empty()]);
        t
    }

    #[test]
    fn table_is_aligned() {
        assert_eq!(sample().render(Format::Table), "group  value\n-----  -----\n2,4    5\n6\n");
    }

    #[test]
    fn json_lines_keep_types() {
        assert_eq!(
            sample().render(Format::JsonLines),
            "{\"group\":\"2,4\",\"value\":5}\n{\"group\":\"6\",\"value\":null}\n"
        );
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(sample().render(Format::Csv), "group,value\n\"2,4\",5\n6,\n");
    }
}
