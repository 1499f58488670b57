//! Settings files: one `chi_deg delta1_deg delta2_deg` per line, `#` starts a comment.

use std::path::Path;

use crate::CliError;

/// One path/spin setting, in degrees as written.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    pub chi_deg: f64,
    pub delta1_deg: f64,
    pub delta2_deg: f64,
}

pub fn parse(text: &str, origin: &str) -> Result<Vec<Setting>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad =
            |why: &str| CliError::Usage(format!("{origin}:{}: {why}: {:?}", i + 1, raw.trim_end()));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("expected three angles `chi_deg delta1_deg delta2_deg`"));
        }
        let mut v = [0.0; 3];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse::<f64>().map_err(|_| bad("not a number"))?;
            if !slot.is_finite() {
                return Err(bad("angle must be finite"));
            }
        }
        out.push(Setting {
            chi_deg: v[0],
            delta1_deg: v[1],
            delta2_deg: v[2],
        });
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{origin}: no settings found")));
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Vec<Setting>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}
