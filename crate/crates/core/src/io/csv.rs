//! Per-clip label CSV: `Frame,Visibility,X,Y,Theta,L`.
//!
//! `X`/`Y` hold the streak position, `Theta` is in degrees (full range
//! accepted) and `L` is the streak half-length. Rows with `Visibility = 0`
//! carry no label. Header names are matched case-insensitively with a few
//! aliases (`θ`, `angle`, `length`); unknown columns are ignored except an
//! optional `Confidence`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{format_decimal, write_atomic, IoError};
use crate::eval::LabelConvention;
use crate::geometry::{from_front_label, to_front_label, BlurLabel, FrameAnnotation, Point2};

pub const HEADER: [&str; 6] = ["Frame", "Visibility", "X", "Y", "Theta", "L"];

/// Decimals written by default.
pub const DEFAULT_DECIMALS: usize = 2;

/// Labels of one clip plus the text details needed to write it back unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabelTable {
    /// Zero-pad width of frame ids; 0 for no padding.
    pub frame_digits: usize,
    pub rows: Vec<FrameAnnotation>,
    /// Per-row detector confidence, when the file has that column.
    pub confidence: Option<Vec<f64>>,
}

impl LabelTable {
    pub fn new(rows: Vec<FrameAnnotation>) -> Self {
        Self {
            frame_digits: 6,
            rows,
            confidence: None,
        }
    }
}

fn column(headers: &::csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().to_lowercase() == *n))
}

pub fn read_labels<R: Read>(reader: R) -> Result<LabelTable, IoError> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .trim(::csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let need = |names: &[&str], label: &'static str| {
        column(&headers, names).ok_or(IoError::MissingColumn(label))
    };
    let c_frame = need(&["frame"], "Frame")?;
    let c_vis = need(&["visibility", "visible"], "Visibility")?;
    let c_x = need(&["x"], "X")?;
    let c_y = need(&["y"], "Y")?;
    let c_theta = need(&["θ", "theta", "angle"], "Theta")?;
    let c_l = need(&["l", "length", "half_length"], "L")?;
    let c_conf = column(&headers, &["confidence", "conf"]);

    let mut table = LabelTable {
        frame_digits: 0,
        rows: Vec::new(),
        confidence: c_conf.map(|_| Vec::new()),
    };
    let mut padded = false;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<&str, IoError> {
            record.get(i).ok_or_else(|| IoError::Malformed {
                line,
                message: format!("missing field {name}"),
            })
        };
        let number = |i: usize, name: &str| -> Result<f64, IoError> {
            let raw = field(i, name)?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IoError::Malformed {
                    line,
                    message: format!("{name}: not a finite number: {raw:?}"),
                })
        };
        let frame_text = field(c_frame, "Frame")?;
        let frame_index: u64 = frame_text.parse().map_err(|_| IoError::Malformed {
            line,
            message: format!("Frame: not a frame number: {frame_text:?}"),
        })?;
        if frame_text.len() > 1 && frame_text.starts_with('0') {
            padded = true;
        }
        table.frame_digits = table.frame_digits.max(frame_text.len());
        let visibility = number(c_vis, "Visibility")?;
        let label = if visibility != 0.0 {
            let l = number(c_l, "L")?;
            if l < 0.0 {
                return Err(IoError::Malformed {
                    line,
                    message: "L: negative half-length".into(),
                });
            }
            Some(BlurLabel::new(
                Point2::new(number(c_x, "X")?, number(c_y, "Y")?),
                number(c_theta, "Theta")?.to_radians(),
                l,
            ))
        } else {
            None
        };
        if let (Some(c), Some(values)) = (c_conf, table.confidence.as_mut()) {
            values.push(number(c, "Confidence")?);
        }
        table.rows.push(FrameAnnotation { frame_index, label });
    }
    if !padded {
        table.frame_digits = 0;
    }
    Ok(table)
}

pub fn write_labels<W: Write>(
    writer: W,
    table: &LabelTable,
    decimals: usize,
) -> Result<(), IoError> {
    let mut wtr = ::csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = HEADER.to_vec();
    if table.confidence.is_some() {
        header.push("Confidence");
    }
    wtr.write_record(&header)?;
    let width = table.frame_digits;
    for (i, row) in table.rows.iter().enumerate() {
        let frame = format!("{:0width$}", row.frame_index);
        let mut record = match &row.label {
            Some(l) => vec![
                frame,
                "1".to_string(),
                format_decimal(l.center.x, decimals),
                format_decimal(l.center.y, decimals),
                format_decimal(l.theta.to_degrees(), decimals),
                format_decimal(l.half_length, decimals),
            ],
            None => vec![
                frame,
                "0".into(),
                "0".into(),
                "0".into(),
                "0".into(),
                "0".into(),
            ],
        };
        if let Some(conf) = &table.confidence {
            let c = conf.get(i).copied().unwrap_or(0.0);
            record.push(format_decimal(c, decimals.max(4)));
        }
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn labels_to_string(table: &LabelTable, decimals: usize) -> Result<String, IoError> {
    let mut buf = Vec::new();
    write_labels(&mut buf, table, decimals)?;
    String::from_utf8(buf).map_err(|e| IoError::Format(e.to_string()))
}

pub fn read_labels_csv(path: &Path) -> Result<LabelTable, IoError> {
    let file = std::fs::File::open(path).map_err(|e| IoError::file(path, e))?;
    read_labels(file)
}

pub fn write_labels_csv(path: &Path, table: &LabelTable, decimals: usize) -> Result<(), IoError> {
    write_atomic(path, labels_to_string(table, decimals)?.as_bytes())
}

/// Decimals used when rewriting positions between conventions, fine enough
/// that converting back restores 2-decimal input text.
pub const RELABEL_DECIMALS: usize = 6;

/// Moves every label's `X`/`Y` to the target convention, assuming the table
/// currently holds the other one.
pub fn relabel(table: &LabelTable, to: LabelConvention) -> LabelTable {
    let rows = table
        .rows
        .iter()
        .map(|row| FrameAnnotation {
            frame_index: row.frame_index,
            label: row.label.map(|l| match to {
                LabelConvention::Front => {
                    BlurLabel::new(to_front_label(&l), l.theta, l.half_length)
                }
                LabelConvention::Midpoint => from_front_label(l.center, l.theta, l.half_length),
            }),
        })
        .collect();
    LabelTable {
        rows,
        ..table.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_dataset_row() {
        let text =
            "Frame,Visibility,X,Y,Theta,L\n000049,1,581.62,295.26,-152.5,2.8\n000050,0,0,0,0,0\n";
        let table = read_labels(text.as_bytes()).unwrap();
        assert_eq!(table.frame_digits, 6);
        let l = table.rows[0].label.unwrap();
        assert_eq!(table.rows[0].frame_index, 49);
        assert_eq!(l.center, Point2::new(581.62, 295.26));
        assert!((l.theta.to_degrees() + 152.5).abs() < 1e-12);
        assert_eq!(l.half_length, 2.8);
        assert_eq!(table.rows[1].label, None);
        assert_eq!(labels_to_string(&table, 2).unwrap(), text);
    }

    #[test]
    fn header_aliases_and_extra_columns() {
        let text = "frame,visibility,x,y,θ,l,Note,Confidence\n3,1,1.5,2.5,10,4,hello,0.87\n";
        let table = read_labels(text.as_bytes()).unwrap();
        assert_eq!(table.frame_digits, 0);
        assert_eq!(table.confidence, Some(vec![0.87]));
        assert_eq!(table.rows[0].label.unwrap().half_length, 4.0);
    }

    #[test]
    fn malformed_rows_report_line() {
        let text = "Frame,Visibility,X,Y,Theta,L\n1,1,2,3,4,5\n2,1,abc,3,4,5\n";
        match read_labels(text.as_bytes()) {
            Err(IoError::Malformed { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.starts_with("X"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_labels("Frame,X,Y\n".as_bytes()),
            Err(IoError::MissingColumn("Visibility"))
        ));
    }

    #[test]
    fn relabel_moves_to_front_and_back() {
        let table = LabelTable::new(vec![FrameAnnotation::visible(
            0,
            BlurLabel::new(Point2::new(0.0, 0.0), 0.0, 5.0),
        )]);
        let front = relabel(&table, LabelConvention::Front);
        assert_eq!(front.rows[0].label.unwrap().center, Point2::new(5.0, 0.0));
        let back = relabel(&front, LabelConvention::Midpoint);
        assert_eq!(back, table);
    }

    fn annotation() -> impl Strategy<Value = FrameAnnotation> {
        (
            any::<bool>(),
            0..100_000i64,
            0..100_000i64,
            -17_999..=18_000i64,
            0..4_000i64,
        )
            .prop_map(|(visible, x, y, t, l)| FrameAnnotation {
                frame_index: 0,
                label: visible.then(|| {
                    BlurLabel::new(
                        Point2::new(x as f64 / 100.0, y as f64 / 100.0),
                        (t as f64 / 100.0).to_radians(),
                        l as f64 / 100.0,
                    )
                }),
            })
    }

    fn numbered(rows: Vec<FrameAnnotation>) -> LabelTable {
        LabelTable::new(
            rows.into_iter()
                .enumerate()
                .map(|(i, r)| FrameAnnotation {
                    frame_index: i as u64,
                    ..r
                })
                .collect(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn round_trip_is_text_stable(rows in prop::collection::vec(annotation(), 1000)) {
            let table = numbered(rows);
            let text = labels_to_string(&table, 2).unwrap();
            let back = read_labels(text.as_bytes()).unwrap();
            prop_assert_eq!(labels_to_string(&back, 2).unwrap(), text);
            for (a, b) in table.rows.iter().zip(&back.rows) {
                match (a.label, b.label) {
                    (Some(a), Some(b)) => {
                        prop_assert!(a.center.distance(b.center) < 1e-9);
                        prop_assert!((a.half_length - b.half_length).abs() < 1e-12);
                        prop_assert!((a.theta - b.theta).abs() < 1e-12);
                    }
                    (None, None) => {}
                    _ => prop_assert!(false, "visibility changed"),
                }
            }
        }

        #[test]
        fn relabel_text_inverse(rows in prop::collection::vec(annotation(), 1000)) {
            let text = labels_to_string(&numbered(rows), 2).unwrap();
            let table = read_labels(text.as_bytes()).unwrap();
            let front = labels_to_string(&relabel(&table, LabelConvention::Front), RELABEL_DECIMALS).unwrap();
            let front = read_labels(front.as_bytes()).unwrap();
            let mid = labels_to_string(&relabel(&front, LabelConvention::Midpoint), RELABEL_DECIMALS).unwrap();
            prop_assert_eq!(mid, text);
        }
    }
}
