//! Plain-text file formats.
//!
//! - Orbit CSV: header `n,symbol,x1,...,xd`; row 0 has an empty symbol.
//! - Cloud CSV: one point per row, no header.
//! - System CSV: `a1,...,ad,b` per row, no header.
//! - Sequence file: one 1-based symbol per line.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces every coordinate bit for bit. Lines starting with `#` are
//! ignored by the CSV readers.

use std::io::{BufRead, Read, Write};

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::ifs::Orbit;
use crate::kaczmarz::LinearSystem;
use crate::omega::PointCloud;

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn reader<R: Read>(r: R, headers: bool) -> csv::Reader<R> {
    ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn record_line(rec: &StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("'{field}' is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("'{field}' is not finite"),
        });
    }
    Ok(value)
}

fn parse_vector(fields: &[&str], line: usize) -> Result<Vector> {
    let coords = fields
        .iter()
        .map(|f| parse_f64(f, line))
        .collect::<Result<Vec<_>>>()?;
    Vector::new(coords).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })
}

pub fn write_orbit_csv<W: Write>(orbit: &Orbit, w: W) -> Result<()> {
    let dim = orbit.start().dim();
    let mut out = WriterBuilder::new().from_writer(w);
    let mut header = vec!["n".to_string(), "symbol".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    out.write_record(&header)?;
    for (n, p) in orbit.points.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.push(if n == 0 {
            String::new()
        } else {
            orbit.symbols[n - 1].to_string()
        });
        row.extend(p.as_slice().iter().map(|&c| fmt_f64(c)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_orbit_csv<R: Read>(r: R) -> Result<Orbit> {
    let mut rdr = reader(r, true);
    let header = rdr.headers()?.clone();
    let dim = header.len().saturating_sub(2);
    if dim == 0 || &header[0] != "n" || &header[1] != "symbol" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header n,symbol,x1,...,xd".into(),
        });
    }
    let mut points = Vec::new();
    let mut symbols = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        if rec.len() != dim + 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", dim + 2, rec.len()),
            });
        }
        let n: usize = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad step index '{}'", &rec[0]),
        })?;
        if n != points.len() {
            return Err(Error::Parse {
                line,
                message: format!("step index {n}, expected {}", points.len()),
            });
        }
        match (n, &rec[1]) {
            (0, "") => {}
            (0, s) => {
                return Err(Error::Parse {
                    line,
                    message: format!("row 0 must have an empty symbol, found '{s}'"),
                })
            }
            (_, s) => symbols.push(s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("bad symbol '{s}'"),
            })?),
        }
        let fields: Vec<&str> = rec.iter().skip(2).collect();
        points.push(parse_vector(&fields, line)?);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "orbit has no points".into(),
        });
    }
    Ok(Orbit { points, symbols })
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, w: W) -> Result<()> {
    let mut out = WriterBuilder::new().has_headers(false).from_writer(w);
    for p in cloud {
        out.write_record(p.as_slice().iter().map(|&c| fmt_f64(c)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cloud_csv<R: Read>(r: R) -> Result<PointCloud> {
    let mut points = Vec::new();
    for rec in reader(r, false).records() {
        let rec = rec?;
        let line = record_line(&rec);
        let fields: Vec<&str> = rec.iter().collect();
        points.push(parse_vector(&fields, line)?);
    }
    PointCloud::new(points)
}

pub fn read_system_csv<R: Read>(r: R) -> Result<LinearSystem> {
    let mut rows = Vec::new();
    for rec in reader(r, false).records() {
        let rec = rec?;
        let line = record_line(&rec);
        if rec.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "row needs at least one coefficient and a right-hand side".into(),
            });
        }
        let fields: Vec<&str> = rec.iter().collect();
        let (coef, rhs) = fields.split_at(fields.len() - 1);
        let a = parse_vector(coef, line)?;
        if let Some((first, _)) = rows.first() {
            let first: &Vector = first;
            if first.dim() != a.dim() {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} coefficients, expected {}", a.dim(), first.dim()),
                });
            }
        }
        rows.push((a, parse_f64(rhs[0], line)?));
    }
    LinearSystem::new(rows)
}

pub fn write_system_csv<W: Write>(sys: &LinearSystem, w: W) -> Result<()> {
    let mut out = WriterBuilder::new().has_headers(false).from_writer(w);
    for (a, b) in sys.rows() {
        let mut row: Vec<String> = a.as_slice().iter().map(|&c| fmt_f64(c)).collect();
        row.push(fmt_f64(*b));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sequence<R: BufRead>(r: R) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let s: usize = t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("'{t}' is not a positive integer symbol"),
        })?;
        if s == 0 {
            return Err(Error::Parse {
                line: i + 1,
                message: "symbols are 1-based".into(),
            });
        }
        out.push(s);
    }
    Ok(out)
}

pub fn write_sequence<W: Write>(seq: &[usize], mut w: W) -> Result<()> {
    for s in seq {
        writeln!(w, "{s}")?;
    }
    Ok(())
}
