//! CSV ingestion and export.
//!
//! The first record is a header. Column kinds are never guessed: they come
//! from an explicit list, a sidecar `<file>.schema`, or a leading
//! `# types: cont,disc,cat` comment line, in that order of precedence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::data::{build_dataset, ColumnKind, Dataset};
use crate::error::{Error, Result};

const TYPES_PREFIX: &str = "types:";

/// Parses `cont,disc,cat` (long names accepted too).
pub fn parse_kinds(list: &str) -> Result<Vec<ColumnKind>> {
    let list = list.trim();
    let list = list.strip_prefix('#').unwrap_or(list).trim();
    let list = list.strip_prefix(TYPES_PREFIX).unwrap_or(list).trim();
    if list.is_empty() {
        return Err(Error::Schema("empty type list".into()));
    }
    list.split(',').map(|t| t.trim().parse()).collect()
}

pub fn format_kinds(kinds: &[ColumnKind]) -> String {
    kinds.iter().map(|k| k.tag()).collect::<Vec<_>>().join(",")
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".schema");
    PathBuf::from(s)
}

/// Reads a CSV file, resolving the schema from `kinds`, the sidecar file or
/// the types comment.
pub fn read_csv(path: &Path, kinds: Option<&[ColumnKind]>) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let sidecar = sidecar_path(path);
    let from_sidecar = match kinds {
        Some(_) => None,
        None if sidecar.exists() => {
            let raw = fs::read_to_string(&sidecar)?;
            let line = raw.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
            Some(parse_kinds(line)?)
        }
        None => None,
    };
    parse_csv(&text, kinds.or(from_sidecar.as_deref()))
}

/// Parses CSV text. Without `kinds` the text must start with a types comment.
pub fn parse_csv(text: &str, kinds: Option<&[ColumnKind]>) -> Result<Dataset> {
    let first = text.lines().next().unwrap_or("").trim();
    let embedded = if first.starts_with('#') && first[1..].trim_start().starts_with(TYPES_PREFIX) {
        Some(parse_kinds(first)?)
    } else {
        None
    };
    let kinds: Vec<ColumnKind> = match (kinds, embedded) {
        (Some(k), _) => k.to_vec(),
        (None, Some(k)) => k,
        (None, None) => {
            return Err(Error::Schema(
                "column kinds not declared; pass --types, add a .schema sidecar or a '# types:' line".into(),
            ))
        }
    };

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() != kinds.len() {
        return Err(Error::Schema(format!(
            "{} column kinds declared for {} header columns",
            kinds.len(),
            header.len()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let columns: Vec<(String, ColumnKind)> = header.into_iter().zip(kinds).collect();
    build_dataset(&columns, &rows)
}

/// Writes the types comment, the header and every row.
pub fn write_csv<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut out = out;
    let kinds: Vec<ColumnKind> = ds.columns().map(|c| c.kind()).collect();
    writeln!(out, "# {TYPES_PREFIX} {}", format_kinds(&kinds))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ds.columns().map(|c| c.name()))?;
    for r in 0..ds.n_rows() {
        w.write_record(ds.row(r).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(ds: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MixedValue;
    use crate::simulators::{generate, Scenario, ScenarioSpec};

    #[test]
    fn embedded_types_line() {
        let text = "# types: cont,disc,cat\na,b,c\n0.5,1,u\n1e-3,2,v\n";
        let ds = parse_csv(text, None).unwrap();
        assert_eq!((ds.n_rows(), ds.n_cols()), (2, 3));
        assert_eq!(ds.value(1, 0), MixedValue::Numeric(1e-3));
        assert_eq!(ds.column(2).alphabet().unwrap(), ["u", "v"]);
    }

    #[test]
    fn schema_is_required() {
        assert!(matches!(parse_csv("a\n1\n", None), Err(Error::Schema(_))));
        let kinds = [ColumnKind::Continuous];
        assert_eq!(parse_csv("a\n1\n", Some(&kinds)).unwrap().n_rows(), 1);
        let two = [ColumnKind::Continuous, ColumnKind::Continuous];
        assert!(matches!(parse_csv("a\n1\n", Some(&two)), Err(Error::Schema(_))));
    }

    #[test]
    fn bad_cells_are_located() {
        let kinds = [ColumnKind::Continuous, ColumnKind::Categorical];
        match parse_csv("a,b\n1,x\nNaN,y\n", Some(&kinds)) {
            Err(Error::NonFinite { row: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("a,b\n1,x\n2\n", Some(&kinds)), Err(Error::RaggedRow { row: 1, .. })));
        assert!(matches!(parse_csv("a,b\n1,x\n,y\n", Some(&kinds)), Err(Error::MissingValue { row: 1, .. })));
        assert!(matches!(
            parse_csv("a,b\nabc,x\n", Some(&kinds)),
            Err(Error::KindMismatch { row: 0, .. })
        ));
    }

    #[test]
    fn sidecar_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        fs::write(&path, "p,q\n1,a\n2,b\n").unwrap();
        assert!(read_csv(&path, None).is_err());
        fs::write(sidecar_path(&path), "disc,cat\n").unwrap();
        let ds = read_csv(&path, None).unwrap();
        assert_eq!(ds.column(1).kind(), ColumnKind::Categorical);
        // explicit kinds win over the sidecar
        let ds = read_csv(&path, Some(&[ColumnKind::Continuous, ColumnKind::Categorical])).unwrap();
        assert_eq!(ds.column(0).kind(), ColumnKind::Continuous);
    }

    #[test]
    fn round_trip_preserves_cells() {
        for id in Scenario::ALL {
            let (ds, _) = generate(&ScenarioSpec { id, n: 200, seed: 4 }).unwrap();
            let back = parse_csv(&to_csv_string(&ds).unwrap(), None).unwrap();
            assert_eq!(back, ds);
        }
        let mixed = parse_csv("# types: cat,cont\ns,v\n\"a,b\",0.1\nc,-2\n", None).unwrap();
        assert_eq!(parse_csv(&to_csv_string(&mixed).unwrap(), None).unwrap(), mixed);
    }
}
