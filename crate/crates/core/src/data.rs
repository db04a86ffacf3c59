//! Typed tabular samples and the X/Y/Z role split consumed by every estimator.
//!
//! A [`Dataset`] is immutable once built. Columns are reference counted, so
//! [`Dataset::project`] is a cheap view over the same cells.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metric semantics of a column.
///
/// Numeric kinds (continuous and discrete) use the absolute difference per
/// coordinate; categorical columns use the 0/1 discrete metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    DiscreteNumeric,
    Categorical,
}

impl ColumnKind {
    pub fn is_numeric(self) -> bool {
        !matches!(self, ColumnKind::Categorical)
    }

    /// Short tag used by the CSV schema line (`cont`, `disc`, `cat`).
    pub fn tag(self) -> &'static str {
        match self {
            ColumnKind::Continuous => "cont",
            ColumnKind::DiscreteNumeric => "disc",
            ColumnKind::Categorical => "cat",
        }
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ColumnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cont" | "continuous" => Ok(ColumnKind::Continuous),
            "disc" | "discrete" | "discrete_numeric" => Ok(ColumnKind::DiscreteNumeric),
            "cat" | "categorical" => Ok(ColumnKind::Categorical),
            other => Err(Error::Schema(format!(
                "unknown column kind {other:?} (expected cont, disc or cat)"
            ))),
        }
    }
}

/// A single cell.
#[derive(Debug, Clone, PartialEq)]
pub enum MixedValue {
    Numeric(f64),
    Symbol(String),
}

impl fmt::Display for MixedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixedValue::Numeric(v) => write!(f, "{v}"),
            MixedValue::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Symbols are stored as codes into `alphabet`, which is kept in order of
    /// first appearance.
    Categorical { alphabet: Vec<String>, codes: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    kind: ColumnKind,
    data: ColumnData,
}

impl Column {
    /// Numeric column. Every value must be finite.
    pub fn numeric(name: impl Into<String>, kind: ColumnKind, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if !kind.is_numeric() {
            return Err(Error::Schema(format!(
                "column {name:?}: numeric values supplied for a categorical column"
            )));
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row,
                column: name,
                value: values[row].to_string(),
            });
        }
        Ok(Self {
            name,
            kind,
            data: ColumnData::Numeric(values),
        })
    }

    /// Categorical column; the alphabet is collected from the symbols as they appear.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, symbols: &[S]) -> Result<Self> {
        let name = name.into();
        let mut alphabet: Vec<String> = Vec::new();
        let mut lookup: HashMap<&str, u32> = HashMap::new();
        let mut codes = Vec::with_capacity(symbols.len());
        for (row, s) in symbols.iter().enumerate() {
            let s = s.as_ref();
            if s.is_empty() {
                return Err(Error::MissingValue { row, column: name });
            }
            let code = match lookup.get(s) {
                Some(&c) => c,
                None => {
                    let c = alphabet.len() as u32;
                    alphabet.push(s.to_string());
                    lookup.insert(s, c);
                    c
                }
            };
            codes.push(code);
        }
        Ok(Self {
            name,
            kind: ColumnKind::Categorical,
            data: ColumnData::Categorical { alphabet, codes },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.kind
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet(&self) -> Option<&[String]> {
        match &self.data {
            ColumnData::Categorical { alphabet, .. } => Some(alphabet),
            ColumnData::Numeric(_) => None,
        }
    }

    /// Code of `symbol` in this column's closed alphabet.
    pub fn code_of(&self, symbol: &str) -> Result<u32> {
        self.alphabet()
            .and_then(|a| a.iter().position(|s| s == symbol))
            .map(|p| p as u32)
            .ok_or_else(|| Error::UnseenSymbol {
                column: self.name.clone(),
                symbol: symbol.to_string(),
            })
    }

    pub fn value(&self, row: usize) -> MixedValue {
        match &self.data {
            ColumnData::Numeric(v) => MixedValue::Numeric(v[row]),
            ColumnData::Categorical { alphabet, codes } => {
                MixedValue::Symbol(alphabet[codes[row] as usize].clone())
            }
        }
    }

    /// Distance between rows `i` and `j` along this coordinate.
    #[inline]
    pub fn coord_distance(&self, i: usize, j: usize) -> f64 {
        match &self.data {
            ColumnData::Numeric(v) => (v[i] - v[j]).abs(),
            ColumnData::Categorical { codes, .. } => {
                if codes[i] == codes[j] {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    fn permuted(&self, perm: &[usize]) -> Column {
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(perm.iter().map(|&p| v[p]).collect()),
            ColumnData::Categorical { alphabet, codes } => ColumnData::Categorical {
                alphabet: alphabet.clone(),
                codes: perm.iter().map(|&p| codes[p]).collect(),
            },
        };
        Column {
            name: self.name.clone(),
            kind: self.kind,
            data,
        }
    }
}

/// An `n x d` sample with typed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Arc<Column>>,
    n: usize,
}

impl Dataset {
    pub fn from_columns(columns: Vec<Column>) -> Result<Self> {
        Self::from_shared(columns.into_iter().map(Arc::new).collect())
    }

    fn from_shared(columns: Vec<Arc<Column>>) -> Result<Self> {
        let n = columns.first().map(|c| c.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidColumns(format!(
                "column {:?} has {} rows, expected {n}",
                c.name(),
                c.len()
            )));
        }
        Ok(Self { columns, n })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().map(|c| c.as_ref())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn value(&self, row: usize, col: usize) -> MixedValue {
        self.columns[col].value(row)
    }

    pub fn row(&self, row: usize) -> Vec<MixedValue> {
        self.columns.iter().map(|c| c.value(row)).collect()
    }

    pub fn is_all_numeric(&self) -> bool {
        self.columns.iter().all(|c| c.kind().is_numeric())
    }

    /// View over the selected columns, in the order given.
    pub fn project(&self, cols: &[usize]) -> Result<Dataset> {
        if cols.is_empty() {
            return Err(Error::InvalidColumns("empty column selection".into()));
        }
        let mut seen = vec![false; self.columns.len()];
        for &c in cols {
            if c >= self.columns.len() {
                return Err(Error::InvalidColumns(format!(
                    "column index {c} out of range for {} columns",
                    self.columns.len()
                )));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidColumns(format!("column index {c} repeated")));
            }
        }
        Ok(Dataset {
            columns: cols.iter().map(|&c| Arc::clone(&self.columns[c])).collect(),
            n: self.n,
        })
    }

    /// New dataset whose row `r` is this dataset's row `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Dataset> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidColumns("row permutation is not a bijection".into()));
        }
        Ok(Dataset {
            columns: self.columns.iter().map(|c| Arc::new(c.permuted(perm))).collect(),
            n: self.n,
        })
    }

    /// New dataset made of the listed rows, repeats allowed.
    pub fn take_rows(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= self.n) {
            return Err(Error::InvalidColumns(format!("row {r} out of range for {} rows", self.n)));
        }
        Ok(Dataset {
            columns: self.columns.iter().map(|c| Arc::new(c.permuted(rows))).collect(),
            n: rows.len(),
        })
    }

    /// Applies `f` to every numeric cell; categorical columns are shared unchanged.
    pub fn map_numeric(&self, f: impl Fn(f64) -> f64) -> Result<Dataset> {
        let columns = self
            .columns
            .iter()
            .map(|c| match c.data() {
                ColumnData::Numeric(v) => {
                    Column::numeric(c.name(), c.kind(), v.iter().map(|&x| f(x)).collect()).map(Arc::new)
                }
                ColumnData::Categorical { .. } => Ok(Arc::clone(c)),
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_shared(columns)
    }
}

/// Parses a grid of raw text cells into a validated [`Dataset`].
pub fn build_dataset<S: AsRef<str>>(columns: &[(String, ColumnKind)], rows: &[Vec<S>]) -> Result<Dataset> {
    let d = columns.len();
    if d == 0 || rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::RaggedRow {
                row: r,
                expected: d,
                found: row.len(),
            });
        }
    }

    let mut built = Vec::with_capacity(d);
    for (c, (name, kind)) in columns.iter().enumerate() {
        let col = if kind.is_numeric() {
            let mut values = Vec::with_capacity(rows.len());
            for (r, row) in rows.iter().enumerate() {
                values.push(parse_numeric(row[c].as_ref(), r, name)?);
            }
            Column::numeric(name.clone(), *kind, values)?
        } else {
            let cells: Vec<&str> = rows.iter().map(|row| row[c].as_ref()).collect();
            Column::categorical(name.clone(), &cells)?
        };
        built.push(col);
    }
    Dataset::from_columns(built)
}

fn parse_numeric(cell: &str, row: usize, column: &str) -> Result<f64> {
    let t = cell.trim();
    if t.is_empty() {
        return Err(Error::MissingValue {
            row,
            column: column.to_string(),
        });
    }
    let v: f64 = t.parse().map_err(|_| Error::KindMismatch {
        row,
        column: column.to_string(),
        value: t.to_string(),
        expected: "a decimal number",
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            row,
            column: column.to_string(),
            value: t.to_string(),
        });
    }
    Ok(v)
}

/// Partition of column indices into the X, Y and (possibly empty) Z groups.
///
/// An empty Z group means plain mutual information.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignment {
    x: Vec<usize>,
    y: Vec<usize>,
    z: Vec<usize>,
}

impl RoleAssignment {
    pub fn new(x: Vec<usize>, y: Vec<usize>, z: Vec<usize>, n_cols: usize) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidRoles("x and y groups must be nonempty".into()));
        }
        let mut owner = vec![None; n_cols];
        for (label, group) in [("x", &x), ("y", &y), ("z", &z)] {
            for &c in group.iter() {
                if c >= n_cols {
                    return Err(Error::InvalidRoles(format!(
                        "{label} column {c} out of range for {n_cols} columns"
                    )));
                }
                if let Some(prev) = owner[c].replace(label) {
                    return Err(Error::InvalidRoles(format!(
                        "column {c} assigned to both {prev} and {label}"
                    )));
                }
            }
        }
        Ok(Self { x, y, z })
    }

    pub fn from_names<S: AsRef<str>>(ds: &Dataset, x: &[S], y: &[S], z: &[S]) -> Result<Self> {
        let lookup = |names: &[S]| {
            names
                .iter()
                .map(|n| ds.column_index(n.as_ref()))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(lookup(x)?, lookup(y)?, lookup(z)?, ds.n_cols())
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }

    pub fn is_mi(&self) -> bool {
        self.z.is_empty()
    }

    /// Same assignment with the X and Y groups exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            z: self.z.clone(),
        }
    }

    pub fn joint(&self) -> Vec<usize> {
        [&self.x[..], &self.y[..], &self.z[..]].concat()
    }

    pub fn xz(&self) -> Vec<usize> {
        [&self.x[..], &self.z[..]].concat()
    }

    pub fn yz(&self) -> Vec<usize> {
        [&self.y[..], &self.z[..]].concat()
    }
}
