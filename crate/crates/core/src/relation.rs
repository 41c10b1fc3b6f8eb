// Copyright 2026 The faqai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Real-valued relational tables and the database they form.
//!
//! Tables are bags: duplicate rows are kept. A feature name shared by several
//! tables is a natural-join attribute.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Turns `-0.0` into `0.0` so that equal reals compare equal under `total_cmp`.
#[inline]
pub(crate) fn canon(x: f64) -> f64 {
    x + 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    schema: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(
        name: impl Into<String>,
        schema: Vec<String>,
        mut rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let name = name.into();
        let mut seen = HashSet::new();
        for f in &schema {
            if !seen.insert(f.as_str()) {
                return Err(Error::DuplicateFeature {
                    table: name,
                    feature: f.clone(),
                });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::RaggedRow {
                    table: name,
                    row: i + 1,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    table: name,
                    row: i + 1,
                    column: schema[j].clone(),
                    value: v.to_string(),
                });
            }
        }
        for v in rows.iter_mut().flatten() {
            *v = canon(*v);
        }
        Ok(Table { name, schema, rows })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, feature: &str) -> Option<usize> {
        self.schema.iter().position(|f| f == feature)
    }

    /// Writes the table as CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv {
            table: self.name.clone(),
            message: e.to_string(),
        };
        w.write_record(&self.schema).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Parses a CSV stream into a table.
///
/// With `header` set the first record names the features; otherwise columns
/// are named `c1`, `c2`, ... . Row numbers in errors count data rows from 1.
pub fn load_table<R: Read>(source: R, name: &str, header: bool) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let csv_err = |e: csv::Error| Error::Csv {
        table: name.to_string(),
        message: e.to_string(),
    };

    let mut schema: Option<Vec<String>> = if header {
        Some(
            reader
                .headers()
                .map_err(csv_err)?
                .iter()
                .map(str::to_string)
                .collect(),
        )
    } else {
        None
    };

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row_no = i + 1;
        let schema =
            schema.get_or_insert_with(|| (1..=record.len()).map(|k| format!("c{k}")).collect());
        if record.len() != schema.len() {
            return Err(Error::RaggedRow {
                table: name.to_string(),
                row: row_no,
                expected: schema.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::NonNumeric {
                        table: name.to_string(),
                        row: row_no,
                        column: schema[j].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    Table::new(name, schema.unwrap_or_default(), rows)
}

/// Loads every `.csv` file in `dir` as a table named by its file stem, in
/// file-name order.
pub fn load_dir(dir: &Path) -> Result<Database> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    load_files(&paths)
}

pub fn load_files<P: AsRef<Path>>(paths: &[P]) -> Result<Database> {
    let mut tables = Vec::with_capacity(paths.len());
    for p in paths {
        let p = p.as_ref();
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string());
        let file = std::fs::File::open(p)?;
        tables.push(load_table(std::io::BufReader::new(file), &name, true)?);
    }
    Database::new(tables)
}

/// Summary sizes of a database.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    /// Number of tables.
    pub m: usize,
    /// Largest row count of any table.
    pub n: usize,
    /// Number of distinct features.
    pub d: usize,
}

/// An ordered collection of tables plus the feature-to-tables index.
///
/// Features are numbered in order of first appearance, scanning tables in
/// order and each schema left to right.
#[derive(Debug, Clone)]
pub struct Database {
    tables: Vec<Table>,
    features: Vec<String>,
    feature_ids: BTreeMap<String, usize>,
    // per table: feature id of each column
    columns: Vec<Vec<usize>>,
    // per feature: tables containing it, ascending
    holders: Vec<Vec<usize>>,
}

impl Database {
    pub fn new(tables: Vec<Table>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::NoTables);
        }
        let mut names = HashSet::new();
        for t in &tables {
            if !names.insert(t.name.as_str()) {
                return Err(Error::DuplicateTable(t.name.clone()));
            }
        }
        let mut features = Vec::new();
        let mut feature_ids = BTreeMap::new();
        let mut columns = Vec::with_capacity(tables.len());
        let mut holders: Vec<Vec<usize>> = Vec::new();
        for (ti, t) in tables.iter().enumerate() {
            let mut cols = Vec::with_capacity(t.schema.len());
            for f in &t.schema {
                let id = *feature_ids.entry(f.clone()).or_insert_with(|| {
                    features.push(f.clone());
                    holders.push(Vec::new());
                    features.len() - 1
                });
                holders[id].push(ti);
                cols.push(id);
            }
            columns.push(cols);
        }
        Ok(Database {
            tables,
            features,
            feature_ids,
            columns,
            holders,
        })
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, i: usize) -> &Table {
        &self.tables[i]
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    /// All feature names, indexed by feature id.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_id(&self, name: &str) -> Option<usize> {
        self.feature_ids.get(name).copied()
    }

    pub fn require_feature(&self, name: &str) -> Result<usize> {
        self.feature_id(name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    /// Feature ids of table `t`'s columns, in column order.
    pub fn columns(&self, t: usize) -> &[usize] {
        &self.columns[t]
    }

    /// Tables containing feature `f`, ascending.
    pub fn holders(&self, f: usize) -> &[usize] {
        &self.holders[f]
    }

    pub fn stats(&self) -> Stats {
        Stats {
            m: self.tables.len(),
            n: self.tables.iter().map(Table::len).max().unwrap_or(0),
            d: self.features.len(),
        }
    }

    /// Sorted distinct values of a feature across every table holding it.
    pub fn active_domain(&self, feature: &str) -> Result<Vec<f64>> {
        let f = self.require_feature(feature)?;
        Ok(self.active_domain_of(f))
    }

    pub(crate) fn active_domain_of(&self, f: usize) -> Vec<f64> {
        let mut values: Vec<f64> = self.holders[f]
            .iter()
            .flat_map(|&t| {
                let col = self.columns[t].iter().position(|&c| c == f).unwrap();
                self.tables[t].rows.iter().map(move |r| canon(r[col]))
            })
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        values
    }
}
