//! File formats: JSON models, port-Hamiltonian forms, tangential data and
//! certificates; CSV samples, singular values, zeros, sweeps and magnitudes.
//!
//! Matrices are row-major arrays of rows. An entry is either a number or a
//! `[re, im]` pair.

use std::fs;
use std::path::Path;

use nalgebra::{DVector, RowDVector};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use phid_core::linalg::{CMatrix, RMatrix};
use phid_core::passivity::SweepPoint;
use phid_core::pipeline::{FrequencySample, FrequencySampleSet};
use phid_core::{LeftDatum, PortHamiltonianForm, RightDatum, SpectralZeroSet, StateSpace, TangentialDataSet};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn data_err(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("values are serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn parse_entry(v: &Value, what: &str) -> Result<Complex64> {
    match v {
        Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(data_err(format!("{what}: [re, im] pair must hold two numbers"))),
        },
        _ => Err(data_err(format!("{what}: expected a number or [re, im] pair, got {v}"))),
    }
}

fn entry_value(z: Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn pair_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Rows of a matrix; an empty array stands for any matrix with no entries,
/// which takes the shape `empty_shape`.
fn parse_matrix(v: &Value, name: &str, empty_shape: (usize, usize)) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| data_err(format!("{name} must be an array of rows")))?;
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| data_err(format!("{name}: row {i} is not an array")))?;
        let entries = row
            .iter()
            .enumerate()
            .map(|(j, x)| parse_entry(x, &format!("{name}[{i}][{j}]")))
            .collect::<Result<Vec<_>>>()?;
        parsed.push(entries);
    }
    let cols = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(data_err(format!("{name}: rows have different lengths")));
    }
    if parsed.len() * cols == 0 && empty_shape.0 * empty_shape.1 == 0 {
        return Ok(CMatrix::zeros(empty_shape.0, empty_shape.1));
    }
    Ok(CMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

fn to_real(m: &CMatrix, name: &str) -> Result<RMatrix> {
    if m.iter().any(|z| z.im != 0.0) {
        return Err(data_err(format!("{name} must be real")));
    }
    Ok(m.map(|z| z.re))
}

pub fn matrix_value(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|&z| entry_value(z)).collect()))
            .collect(),
    )
}

pub fn real_matrix_value(m: &RMatrix) -> Value {
    Value::Array(m.row_iter().map(|row| Value::Array(row.iter().map(|&x| json!(x)).collect())).collect())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| data_err(format!("missing key \"{key}\"")))
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| data_err("expected a JSON object"))
}

/// Dimensions of a stored model: `n` from the rows of `A`, `m` from `D`.
fn dims(obj: &Map<String, Value>, state: &str, feed: &str) -> Result<(usize, usize)> {
    let count = |key: &str| -> Result<usize> {
        field(obj, key)?
            .as_array()
            .map(Vec::len)
            .ok_or_else(|| data_err(format!("{key} must be an array of rows")))
    };
    Ok((count(state)?, count(feed)?))
}

pub fn model_from_value(v: &Value) -> Result<StateSpace> {
    let obj = object(v)?;
    let (n, m) = dims(obj, "A", "D")?;
    let e = obj.get("E").map(|x| parse_matrix(x, "E", (n, n))).transpose()?;
    let a = parse_matrix(field(obj, "A")?, "A", (n, n))?;
    let b = parse_matrix(field(obj, "B")?, "B", (n, m))?;
    let c = parse_matrix(field(obj, "C")?, "C", (m, n))?;
    let d = parse_matrix(field(obj, "D")?, "D", (m, m))?;
    Ok(StateSpace::new(e, a, b, c, d)?)
}

pub fn model_value(model: &StateSpace) -> Value {
    let mut obj = Map::new();
    if !model.has_identity_e() {
        obj.insert("E".into(), matrix_value(model.e()));
    }
    obj.insert("A".into(), matrix_value(model.a()));
    obj.insert("B".into(), matrix_value(model.b()));
    obj.insert("C".into(), matrix_value(model.c()));
    obj.insert("D".into(), matrix_value(model.d()));
    Value::Object(obj)
}

pub fn is_ph_value(v: &Value) -> bool {
    v.get("J").is_some()
}

pub fn ph_from_value(v: &Value) -> Result<PortHamiltonianForm> {
    let obj = object(v)?;
    let (n, m) = dims(obj, "J", "S")?;
    let get = |key: &str, shape: (usize, usize)| -> Result<RMatrix> {
        to_real(&parse_matrix(field(obj, key)?, key, shape)?, key)
    };
    Ok(PortHamiltonianForm::new(
        get("J", (n, n))?,
        get("R", (n, n))?,
        get("G", (n, m))?,
        get("P", (n, m))?,
        get("N", (m, m))?,
        get("S", (m, m))?,
        get("Q", (n, n))?,
    )?)
}

pub fn ph_value(ph: &PortHamiltonianForm) -> Value {
    json!({
        "J": real_matrix_value(ph.j()),
        "R": real_matrix_value(ph.r()),
        "G": real_matrix_value(ph.g()),
        "P": real_matrix_value(ph.p()),
        "N": real_matrix_value(ph.n_feed()),
        "S": real_matrix_value(ph.s()),
        "Q": real_matrix_value(ph.q()),
    })
}

/// A real square matrix stored either bare or under `key`.
pub fn load_named_matrix(path: &Path, key: &str) -> Result<RMatrix> {
    let v = read_json(path)?;
    let inner = match &v {
        Value::Object(obj) => field(obj, key)?,
        other => other,
    };
    let rows = inner.as_array().map_or(0, Vec::len);
    let m = to_real(&parse_matrix(inner, key, (rows, rows))?, key)?;
    if !m.is_square() {
        return Err(data_err(format!("{}: {key} must be square", path.display())));
    }
    Ok(m)
}

fn parse_vector(v: &Value, name: &str) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| data_err(format!("{name} must be an array")))?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_entry(x, &format!("{name}[{i}]")))
        .collect()
}

fn vector_value<'a>(it: impl Iterator<Item = &'a Complex64>) -> Value {
    Value::Array(it.map(|&z| pair_value(z)).collect())
}

/// Tangential data file. Without `"lefts"` the data are taken as spectral
/// zeros and the left data are mirrored from the right ones.
pub fn tangential_from_value(v: &Value) -> Result<TangentialDataSet> {
    let obj = object(v)?;
    let m = field(obj, "m")?
        .as_u64()
        .ok_or_else(|| data_err("\"m\" must be a positive integer"))? as usize;
    let d = to_real(&parse_matrix(field(obj, "D")?, "D", (m, m))?, "D")?;
    let rights = field(obj, "rights")?
        .as_array()
        .ok_or_else(|| data_err("\"rights\" must be an array"))?
        .iter()
        .enumerate()
        .map(|(k, item)| {
            let o = object(item)?;
            Ok(RightDatum::new(
                parse_entry(field(o, "lambda")?, &format!("rights[{k}].lambda"))?,
                DVector::from_vec(parse_vector(field(o, "r")?, &format!("rights[{k}].r"))?),
                DVector::from_vec(parse_vector(field(o, "w")?, &format!("rights[{k}].w"))?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(lefts) = obj.get("lefts") else {
        return Ok(phid_core::left_from_spectral(rights, d)?);
    };
    let lefts = lefts
        .as_array()
        .ok_or_else(|| data_err("\"lefts\" must be an array"))?
        .iter()
        .enumerate()
        .map(|(k, item)| {
            let o = object(item)?;
            Ok(LeftDatum::new(
                parse_entry(field(o, "mu")?, &format!("lefts[{k}].mu"))?,
                RowDVector::from_vec(parse_vector(field(o, "ell")?, &format!("lefts[{k}].ell"))?),
                RowDVector::from_vec(parse_vector(field(o, "v")?, &format!("lefts[{k}].v"))?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let ds = TangentialDataSet::new(rights, lefts, d);
    let violations = phid_core::validate(&ds);
    if !violations.is_empty() {
        return Err(phid_core::Error::InvalidTangentialData(violations).into());
    }
    Ok(ds)
}

pub fn tangential_value(ds: &TangentialDataSet) -> Value {
    let rights: Vec<Value> = ds
        .rights
        .iter()
        .map(|r| json!({"lambda": pair_value(r.lambda), "r": vector_value(r.r.iter()), "w": vector_value(r.w.iter())}))
        .collect();
    let mut obj = Map::new();
    obj.insert("m".into(), json!(ds.m));
    obj.insert("D".into(), real_matrix_value(&ds.d));
    obj.insert("rights".into(), Value::Array(rights));
    if !ds.spectral {
        let lefts: Vec<Value> = ds
            .lefts
            .iter()
            .map(|l| json!({"mu": pair_value(l.mu), "ell": vector_value(l.ell.iter()), "v": vector_value(l.v.iter())}))
            .collect();
        obj.insert("lefts".into(), Value::Array(lefts));
    }
    Value::Object(obj)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| data_err(format!("{}: {e}", path.display()))
}

/// Shortest round-trip text, in exponent form for very small or large values.
fn fmt(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn write_rows(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(&header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt(x))).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn entry_labels(m: usize, prefixes: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            for p in prefixes {
                out.push(format!("{p}_z{i}{j}"));
            }
        }
    }
    out
}

/// Columns `omega, re_z11, im_z11, re_z12, …` in row-major entry order.
pub fn write_samples(path: &Path, fs: &FrequencySampleSet) -> Result<()> {
    let mut header = vec!["omega".to_string()];
    header.extend(entry_labels(fs.m(), &["re", "im"]));
    write_rows(
        path,
        header,
        fs.samples().iter().map(|s| {
            let mut row = vec![s.omega];
            for z in s.z.transpose().iter() {
                row.push(z.re);
                row.push(z.im);
            }
            row
        }),
    )
}

/// Reads a sample file; a first line that does not start with a number is
/// taken as the header, lines starting with `#` are ignored.
pub fn read_samples(path: &Path) -> Result<FrequencySampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        if line == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let values = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| data_err(format!("{}: record {}: {e}", path.display(), line + 1)))?;
        let pairs = values.len().saturating_sub(1) / 2;
        let m = (pairs as f64).sqrt().round() as usize;
        if values.len() < 3 || m * m != pairs || values.len() != 1 + 2 * pairs {
            return Err(data_err(format!(
                "{}: record {} has {} columns, expected 1 + 2m^2",
                path.display(),
                line + 1,
                values.len()
            )));
        }
        let z = CMatrix::from_fn(m, m, |i, j| {
            let k = 1 + 2 * (i * m + j);
            Complex64::new(values[k], values[k + 1])
        });
        samples.push(FrequencySample { omega: values[0], z });
    }
    Ok(FrequencySampleSet::new(samples)?)
}

pub fn write_singular_values(path: &Path, sv: &[f64]) -> Result<()> {
    write_rows(
        path,
        vec!["index".into(), "value".into()],
        sv.iter().enumerate().map(|(k, &s)| vec![(k + 1) as f64, s]),
    )
}

/// Columns `re, im, re_r1, im_r1, …`.
pub fn write_zeros(path: &Path, zs: &SpectralZeroSet, m: usize) -> Result<()> {
    let mut header = vec!["re".to_string(), "im".to_string()];
    for k in 1..=m {
        header.push(format!("re_r{k}"));
        header.push(format!("im_r{k}"));
    }
    write_rows(
        path,
        header,
        zs.zeros.iter().zip(&zs.directions).map(|(z, r)| {
            let mut row = vec![z.re, z.im];
            for x in r.iter() {
                row.push(x.re);
                row.push(x.im);
            }
            row
        }),
    )
}

/// Columns `omega, lambda_min`; a failed evaluation leaves the value empty.
pub fn write_sweep(path: &Path, sweep: &[SweepPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["omega", "lambda_min"]).map_err(csv_err(path))?;
    for p in sweep {
        let value = p.lambda_min.map_or(String::new(), fmt);
        w.write_record([fmt(p.omega), value]).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Columns `omega, abs_z11, abs_z12, …`.
pub fn write_bode(path: &Path, model: &StateSpace, omegas: &[f64]) -> Result<()> {
    let mut header = vec!["omega".to_string()];
    header.extend(entry_labels(model.m(), &["abs"]));
    let rows = omegas
        .iter()
        .map(|&w| {
            let z = model.eval_transfer(Complex64::new(0.0, w))?;
            let mut row = vec![w];
            row.extend(z.transpose().iter().map(|x| x.norm()));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(path, header, rows.into_iter())
}

/// Finite numbers as JSON numbers, everything else as `null`.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}
