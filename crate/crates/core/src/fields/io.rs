//! Field files: a `# {json header}` line followed by CSV rows of node
//! coordinates and `re_k, im_k` per component.

use super::{BoundaryField, DecayClass, GridSpec};
use crate::error::{Error, Result};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub grid: GridSpec,
    #[serde(rename = "M")]
    pub m: usize,
    pub decay_class: DecayClass,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_field(field: &BoundaryField, mut out: impl Write) -> Result<()> {
    let g = *field.grid();
    let header = FieldHeader { grid: g, m: field.m(), decay_class: field.decay() };
    writeln!(out, "# {}", serde_json::to_string(&header).map_err(io_err)?).map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    let mut names: Vec<String> = (1..=g.d).map(|a| format!("x{a}")).collect();
    for k in 0..field.m() {
        names.push(format!("re{k}"));
        names.push(format!("im{k}"));
    }
    w.write_record(&names).map_err(io_err)?;
    for (idx, x) in g.nodes().enumerate() {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        for k in 0..field.m() {
            let z = field.component(k)[idx];
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_field(mut input: impl BufRead) -> Result<BoundaryField> {
    let mut first = String::new();
    input.read_line(&mut first).map_err(io_err)?;
    let json = first
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("field file must start with a `# {header}` line".into()))?;
    let header: FieldHeader =
        serde_json::from_str(json.trim()).map_err(|e| Error::Parse(format!("field header: {e}")))?;
    header.grid.validate()?;
    let g = header.grid;
    let mut values = vec![C64::default(); header.m * g.len()];
    let mut rows = 0;
    let mut reader = csv::Reader::from_reader(input);
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if idx >= g.len() || record.len() != g.d + 2 * header.m {
            return Err(Error::Parse(format!("unexpected row {}", idx + 2)));
        }
        let num = |i: usize| -> Result<f64> {
            record[i].parse().map_err(|_| Error::Parse(format!("row {}: bad number `{}`", idx + 2, &record[i])))
        };
        for k in 0..header.m {
            values[k * g.len() + idx] = C64::new(num(g.d + 2 * k)?, num(g.d + 2 * k + 1)?);
        }
        rows += 1;
    }
    if rows != g.len() {
        return Err(Error::Parse(format!("{rows} rows for {} nodes", g.len())));
    }
    BoundaryField::new(g, header.m, values, header.decay_class)
}
