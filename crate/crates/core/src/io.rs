//! Coefficient CSV: header `kind,i,j,m1,...,mn,value`, one row per nonzero
//! coefficient. Scaling rows have `kind = scaling` and empty `i`, `j`;
//! wavelet rows have `kind = wavelet`.

use std::io::{Read, Write};

use crate::seqnorm::CoefficientField;
use crate::{Error, Result};

pub fn coefficient_header(n: usize) -> Vec<String> {
    let mut header = vec!["kind".to_string(), "i".to_string(), "j".to_string()];
    header.extend((1..=n).map(|k| format!("m{k}")));
    header.push("value".to_string());
    header
}

pub fn write_coefficients<W: Write>(field: &CoefficientField, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(coefficient_header(field.dim()))?;
    for (offset, value) in field.scaling() {
        let mut record = vec!["scaling".to_string(), String::new(), String::new()];
        record.extend(offset.iter().map(i64::to_string));
        record.push(value.to_string());
        writer.write_record(&record)?;
    }
    for (key, value) in field.wavelet() {
        let mut record = vec!["wavelet".to_string(), key.type_i.to_string(), key.level.to_string()];
        record.extend(key.offset.iter().map(i64::to_string));
        record.push(value.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_coefficients<R: Read>(input: R) -> Result<CoefficientField> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = reader.headers()?.clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns.len() < 5 {
        return Err(Error::invalid("coefficient CSV needs at least one offset column"));
    }
    let n = columns.len() - 4;
    let expected = coefficient_header(n);
    if columns != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::invalid(format!(
            "unexpected coefficient header {columns:?}, expected {expected:?}"
        )));
    }
    let mut field = CoefficientField::new(n);
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let parse_int = |k: usize| -> Result<i64> {
            record[k].trim().parse().map_err(|_| {
                Error::invalid(format!(
                    "line {line}: bad integer {:?} in column {}",
                    &record[k], columns[k]
                ))
            })
        };
        let offset = (3..3 + n).map(parse_int).collect::<Result<Vec<_>>>()?;
        let value: f64 = record[3 + n]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("line {line}: bad value {:?}", &record[3 + n])))?;
        match record[0].trim() {
            "scaling" => {
                if !record[1].trim().is_empty() || !record[2].trim().is_empty() {
                    return Err(Error::invalid(format!("line {line}: scaling rows take no i or j")));
                }
                field.insert_scaling(offset, value)?;
            }
            "wavelet" => {
                let type_i = u32::try_from(parse_int(1)?)
                    .map_err(|_| Error::invalid(format!("line {line}: negative wavelet type")))?;
                let level = i32::try_from(parse_int(2)?)
                    .map_err(|_| Error::invalid(format!("line {line}: level out of range")))?;
                field.insert_wavelet(type_i, level, offset, value)?;
            }
            other => return Err(Error::invalid(format!("line {line}: unknown kind {other:?}"))),
        }
    }
    Ok(field)
}
