//! Calibration text files: one record per line, `id f rx ry rz tx ty tz`.
//! Blank lines and lines starting with `#` are skipped. The principal point is
//! not stored; it is the image center supplied when building the camera.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::camera::CameraModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub id: String,
    pub focal: f64,
    pub rotation: [f64; 3],
    pub translation: [f64; 3],
}

impl CalibrationRecord {
    pub fn from_camera(id: impl Into<String>, camera: &CameraModel) -> Self {
        Self {
            id: id.into(),
            focal: camera.focal,
            rotation: camera.rotation,
            translation: camera.translation,
        }
    }

    pub fn camera(&self, width: usize, height: usize) -> CameraModel {
        CameraModel::new(self.focal, self.rotation, self.translation, width, height)
    }
}

pub fn parse_calibrations(text: &str) -> Result<Vec<CalibrationRecord>, IoError> {
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| IoError::Malformed {
            line: i as u64 + 1,
            message,
        };
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 8 {
            return Err(malformed(format!(
                "expected 8 fields, found {}",
                fields.len()
            )));
        }
        let mut v = [0.0; 7];
        for (slot, text) in v.iter_mut().zip(&fields[1..]) {
            *slot = text
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| malformed(format!("not a finite number: {text:?}")))?;
        }
        if v[0] <= 0.0 {
            return Err(malformed("focal length must be positive".into()));
        }
        records.push(CalibrationRecord {
            id: fields[0].to_string(),
            focal: v[0],
            rotation: [v[1], v[2], v[3]],
            translation: [v[4], v[5], v[6]],
        });
    }
    Ok(records)
}

pub fn format_calibrations(records: &[CalibrationRecord]) -> String {
    let mut out = String::from("# id f rx ry rz tx ty tz\n");
    for r in records {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            r.id,
            r.focal,
            r.rotation[0],
            r.rotation[1],
            r.rotation[2],
            r.translation[0],
            r.translation[1],
            r.translation[2]
        );
    }
    out
}
