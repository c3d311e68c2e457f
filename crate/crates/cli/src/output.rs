use std::fs;
use std::path::{Path, PathBuf};

/// CSV writer with a fixed number of significant digits.
pub struct CsvTable {
    precision: usize,
    writer: csv::Writer<fs::File>,
    path: PathBuf,
}

impl CsvTable {
    pub fn create(dir: &Path, name: &str, header: &[&str], precision: usize) -> Result<Self, String> {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let path = dir.join(name);
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
        writer
            .write_record(header)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        Ok(CsvTable { precision, writer, path })
    }

    pub fn row(&mut self, ints: &[usize], values: &[f64]) -> Result<(), String> {
        let fields = ints
            .iter()
            .map(|i| i.to_string())
            .chain(values.iter().map(|v| format_sig(*v, self.precision)));
        self.writer
            .write_record(fields)
            .map_err(|e| format!("cannot write {}: {e}", self.path.display()))
    }

    pub fn finish(mut self) -> Result<PathBuf, String> {
        self.writer
            .flush()
            .map_err(|e| format!("cannot write {}: {e}", self.path.display()))?;
        Ok(self.path)
    }
}

/// `v` with `digits` significant digits in scientific notation.
pub fn format_sig(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.max(1) - 1, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MAX, 5e-324] {
            let s = format_sig(v, 17);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_sig(2.0, 3), "2.00e0");
    }
}
