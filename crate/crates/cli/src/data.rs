//! Locating and loading the death-rate file.

use std::path::{Path, PathBuf};

use mortality::{build_surface, parse_hmd_rates, Gender, HmdRecord, MortalitySurface};

use crate::args::Window;
use crate::error::CliError;

/// File names tried, in order, when `--data` is a directory.
pub const CANDIDATES: [&str; 2] = ["Mx_1x1.txt", "ITA.Mx_1x1.txt"];

/// `path` itself if it is a file; otherwise the first known death-rate
/// file inside it, falling back to any `*Mx_1x1.txt`.
pub fn resolve(path: &Path) -> Result<PathBuf, CliError> {
    if path.is_file() {
        return Ok(path.to_path_buf());
    }
    if !path.is_dir() {
        return Err(CliError::file(path, "no such file or directory"));
    }
    for name in CANDIDATES {
        let p = path.join(name);
        if p.is_file() {
            return Ok(p);
        }
    }
    let mut others: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::file(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with("Mx_1x1.txt")))
        .collect();
    others.sort();
    others.into_iter().next().ok_or_else(|| CliError::file(path, format!("directory holds none of {}", CANDIDATES.join(", "))))
}

pub fn read_records(path: &Path) -> Result<(PathBuf, Vec<HmdRecord>), CliError> {
    let file = resolve(path)?;
    let text = std::fs::read_to_string(&file).map_err(|e| CliError::file(&file, e))?;
    let records = parse_hmd_rates(&text).map_err(|e| CliError::file(&file, e))?;
    Ok((file, records))
}

/// Surface for `gender` on `ages × years`; `years` defaults to every year in
/// the file.
pub fn load_surface(path: &Path, gender: Gender, ages: Window, years: Option<Window>) -> Result<(PathBuf, MortalitySurface), CliError> {
    let (file, records) = read_records(path)?;
    let years = match years {
        Some(w) => w,
        None => {
            let lo = records.iter().map(|r| r.year).min();
            let hi = records.iter().map(|r| r.year).max();
            match (lo, hi) {
                (Some(start), Some(end)) => Window { start, end },
                _ => return Err(CliError::file(&file, "no records")),
            }
        }
    };
    let surface = build_surface(&records, gender, ages.start, ages.end, years.start, years.end)
        .map_err(|e| CliError::file(&file, e))?;
    Ok((file, surface))
}
