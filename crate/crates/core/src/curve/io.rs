use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CurveOptions, KnotCurve};
use crate::{KnotError, Result};

/// On-disk curve: `{"points": [[x, y, z], ...], "closed": true}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub points: Vec<[f64; 3]>,
    pub closed: bool,
}

impl CurveFile {
    pub fn from_curve(curve: &KnotCurve) -> Self {
        Self {
            points: curve.points().iter().map(|p| [p.x, p.y, p.z]).collect(),
            closed: true,
        }
    }

    pub fn into_curve(self, opts: CurveOptions) -> Result<KnotCurve> {
        if !self.closed {
            return Err(KnotError::InvalidCurve("only closed curves are supported".into()));
        }
        KnotCurve::with_options(self.points.into_iter().map(Into::into).collect(), opts)
    }
}

impl KnotCurve {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CurveFile::from_curve(self)).expect("finite coordinates")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CurveFile = serde_json::from_str(text)?;
        file.into_curve(CurveOptions::default())
    }

    pub fn read_from(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        writer.write_all(self.to_json().as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}
