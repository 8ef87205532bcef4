//! Append-only CSV ledgers.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// One CSV record without the trailing newline, quoting fields as needed.
pub(crate) fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields.iter().map(|f| f.as_ref())).expect("writing to memory");
    let bytes = w.into_inner().expect("writing to memory");
    String::from_utf8(bytes).expect("fields are UTF-8").trim_end_matches('\n').to_owned()
}

/// Appends rows, writing `header` first when the file is new or empty.
pub fn append_rows(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{header}")?;
    }
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_fields_with_commas() {
        assert_eq!(csv_line(&["a", "d2[1,0]", "3"]), "a,\"d2[1,0]\",3");
    }
}
