//! Report serialization helpers shared by the subcommands.

use adasub::Error;

use crate::CommonArgs;

/// All CSV reports open with this line so consumers can sniff the dialect.
pub const CSV_HEADER: &str = "# adasub-csv v1";

/// Shortest exact decimal form, so equal values always print identically.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// A CSV report under the versioned comment header.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new<const N: usize>(header: [&str; N]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory CSV");
        CsvTable { writer }
    }

    pub fn row<const N: usize>(&mut self, fields: [String; N]) {
        self.writer.write_record(&fields).expect("in-memory CSV");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory CSV");
        let body = String::from_utf8(bytes).expect("CSV output is UTF-8");
        format!("{CSV_HEADER}\n{body}")
    }
}

/// Writes the report to `--out` when given, stdout otherwise.
pub fn write_report(common: &CommonArgs, text: &str) -> Result<(), Error> {
    match &common.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|err| Error::InvalidConfig(format!("cannot write {}: {err}", path.display()))),
    }
}
