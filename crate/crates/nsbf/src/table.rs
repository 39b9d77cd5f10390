//! CSV tables of numbers: `,` delimiter, header row, LF line endings,
//! values in [`g17`] format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nsbf_core::grid::SampledMat2Fn;
use nsbf_core::ComplexMat2;

use crate::format::g17;

/// Header of coefficient dumps.
pub const MATRIX_HEADER: [&str; 10] = ["n", "x", "re11", "im11", "re12", "im12", "re21", "im21", "re22", "im22"];

/// A CSV file being written.
pub struct Table {
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let file = BufWriter::new(File::create(path)?);
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        writer.write_record(header).map_err(std::io::Error::other)?;
        Ok(Self { writer })
    }

    /// Writes a row of plain text fields.
    pub fn row<I, S>(&mut self, fields: I) -> std::io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(std::io::Error::other)
    }

    /// Writes a row whose first field is an integer label.
    pub fn labelled(&mut self, label: i64, values: &[f64]) -> std::io::Result<()> {
        let fields = std::iter::once(label.to_string()).chain(values.iter().map(|&v| g17(v)));
        self.row(fields)
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.writer.flush()?;
        self.writer.into_inner().map_err(|e| e.into_error())?.flush()
    }
}

/// The eight real entries of a matrix, row-major, real part first.
pub fn matrix_fields(m: &ComplexMat2) -> [f64; 8] {
    let [a, b, c, d] = m.entries();
    [a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im]
}

/// Writes `(n, f_n)` pairs in the coefficient-dump format.
pub fn write_matrix_functions<'a>(
    path: &Path,
    functions: impl IntoIterator<Item = (i64, &'a SampledMat2Fn)>,
) -> std::io::Result<()> {
    let mut table = Table::create(path, &MATRIX_HEADER)?;
    for (n, f) in functions {
        for (i, x) in f.grid().nodes().enumerate() {
            let mut values = [0.0; 9];
            values[0] = x;
            values[1..].copy_from_slice(&matrix_fields(&f.value(i)));
            table.labelled(n, &values)?;
        }
    }
    table.finish()
}
