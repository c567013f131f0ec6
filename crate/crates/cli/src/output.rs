use std::fs::File;
use std::io::Write;
use std::path::Path;

use robust_contracts::io::format_sig;

/// Writes `rows` under `header` to `path`, or to `fallback` when no path is given.
pub fn write_csv(
    path: Option<&Path>,
    fallback: &mut dyn Write,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<(), crate::CliError> {
    match path {
        Some(p) => {
            let mut w = csv::Writer::from_writer(File::create(p)?);
            write_rows(&mut w, header, rows)?;
            log::info!("wrote {} rows to {}", rows.len(), p.display());
        }
        None => {
            let mut w = csv::Writer::from_writer(fallback);
            write_rows(&mut w, header, rows)?;
        }
    }
    Ok(())
}

fn write_rows<W: Write>(w: &mut csv::Writer<W>, header: &[String], rows: &[Vec<String>]) -> Result<(), crate::CliError> {
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn num(x: f64) -> String {
    format_sig(x)
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
