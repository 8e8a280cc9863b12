use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// One proximity observation between two devices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PingRecord {
    /// Seconds since the start of the study.
    pub timestamp: i64,
    pub user_a: i64,
    pub user_b: i64,
    /// Received signal strength in dBm.
    pub rssi: i64,
}

/// Retained records plus counts of what was dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PingLoad {
    pub records: Vec<PingRecord>,
    /// Lines that did not parse as four integers.
    pub malformed: usize,
    /// Records below the RSSI threshold.
    pub weak: usize,
    /// Empty scans, non-participant devices (negative ids) and self-pings.
    pub non_contact: usize,
}

const HEADER: [&str; 4] = ["timestamp", "user_a", "user_b", "rssi"];

/// Reads `timestamp,user_a,user_b,rssi` CSV and keeps contacts with
/// `rssi >= rssi_threshold`. A leading `#` on the header line is accepted.
pub fn load_pings(path: impl AsRef<Path>, rssi_threshold: i64) -> Result<PingLoad> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_pings(file, &path.display().to_string(), rssi_threshold)
}

pub fn read_pings<R: Read>(reader: R, source: &str, rssi_threshold: i64) -> Result<PingLoad> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |msg: String| Error::Parse {
        path: source.to_string(),
        msg,
    };
    let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let names: Vec<&str> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| if i == 0 { h.trim_start_matches('#').trim() } else { h })
        .collect();
    if names != HEADER {
        return Err(parse_err(format!(
            "missing header `timestamp,user_a,user_b,rssi` (found `{}`)",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = PingLoad::default();
    for row in rdr.records() {
        let Ok(row) = row else {
            out.malformed += 1;
            continue;
        };
        let fields: Option<Vec<i64>> = if row.len() == 4 {
            row.iter().map(|f| f.parse().ok()).collect()
        } else {
            None
        };
        let Some(f) = fields else {
            out.malformed += 1;
            continue;
        };
        let rec = PingRecord {
            timestamp: f[0],
            user_a: f[1],
            user_b: f[2],
            rssi: f[3],
        };
        if rec.user_a < 0 || rec.user_b < 0 || rec.user_a == rec.user_b {
            out.non_contact += 1;
        } else if rec.rssi < rssi_threshold {
            out.weak += 1;
        } else {
            out.records.push(rec);
        }
    }
    Ok(out)
}
