//! CSV schemas.
//!
//! Orbit files have the header `step,x,y,rule_index,carrier,flag`. Row `k` is
//! the point after `k` rule applications; `rule_index` is the rule applied to
//! it next and `carrier` the label of the line it lies on. `flag` is `ok`,
//! `tie_hit` (the next rule fixes the point and the run stops) or `converged`
//! (the point repeats with the detected period until the end of the run).
//!
//! Curve files have the header `k,x,y,carrier,realized_angle_deg`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Ok,
    TieHit,
    Converged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub rule_index: usize,
    pub carrier: String,
    pub flag: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub k: usize,
    pub x: f64,
    pub y: f64,
    pub carrier: String,
    pub realized_angle_deg: f64,
}

pub fn write_records<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
