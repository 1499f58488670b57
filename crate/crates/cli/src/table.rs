//! Delimited output with fixed formatting.

use std::io::{self, Write};

use berrybell::format::csv;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

/// Writes rows joined by the format's separator, always ending lines in `\n`.
pub struct Table<'a> {
    out: &'a mut dyn Write,
    sep: char,
}

impl<'a> Table<'a> {
    pub fn new(out: &'a mut dyn Write, format: Format) -> Self {
        Self {
            out,
            sep: format.separator(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        let mut line = String::new();
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                line.push(self.sep);
            }
            line.push_str(f.as_ref());
        }
        line.push('\n');
        self.out.write_all(line.as_bytes())
    }
}

/// Number cell: 9 significant digits.
pub fn num(x: f64) -> String {
    csv(x)
}
