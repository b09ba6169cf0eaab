use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::commands::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A rendered report and where it goes; `None` is standard output.
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(path: Option<&Path>, bytes: Vec<u8>) -> Self {
        Artifact { path: path.map(Path::to_path_buf), bytes }
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn csv<R, I>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Writes every artifact; called only after all of them rendered.
pub fn emit(artifacts: Vec<Artifact>) -> Result<(), CliError> {
    for a in artifacts {
        match a.path {
            Some(path) => fs::write(&path, &a.bytes)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&a.bytes).and_then(|()| out.flush()).map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let bytes = csv(&["p", "hit"], [["2", "true"], ["3", "false"]]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "p,hit\n2,true\n3,false\n");
        assert_eq!(csv(&["p"], Vec::<[&str; 1]>::new()).unwrap(), b"p\n");
    }

    #[test]
    fn json_ends_with_newline() {
        assert_eq!(json(&[1, 2]).unwrap(), b"[\n  1,\n  2\n]\n");
    }
}
