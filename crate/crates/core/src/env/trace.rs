//! Line-delimited JSON log of episode steps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::geometry::Point;
use crate::env::reward::DoneReason;
use crate::env::vehicle::{Action, Medium};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u32,
    pub position: Point,
    pub yaw: f64,
    pub action: Action,
    pub reward: f64,
    pub medium: Medium,
    pub done_reason: DoneReason,
}

pub struct TraceWriter<W: Write> {
    out: W,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(TraceWriter {
            out: BufWriter::new(f),
        })
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        TraceWriter { out }
    }

    pub fn write(&mut self, rec: &TraceRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, rec)?;
        self.out
            .write_all(b"\n")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io("<trace>", e))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
