//! Binary dataset format.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! header   magic "AHPD" | version u32 | n_antennas u32 | sample_count u64
//! sample   user_id u64 | n_paths u32
//!          n_paths × (gain_re f64, gain_im f64, azimuth f64, elevation f64)
//!          n_antennas × (re f64, im f64)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{ChannelSample, PathComponent};
use crate::{Error, Result};

pub const DATASET_MAGIC: [u8; 4] = *b"AHPD";
pub const DATASET_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

pub fn write_dataset<W: Write>(mut out: W, samples: &[ChannelSample]) -> Result<()> {
    let n_antennas = samples.first().map_or(0, |s| s.n_antennas());
    if let Some(bad) = samples.iter().find(|s| s.n_antennas() != n_antennas) {
        return Err(Error::DimensionMismatch {
            context: "dataset antenna count",
            expected: n_antennas,
            actual: bad.n_antennas(),
        });
    }
    out.write_all(&DATASET_MAGIC)?;
    out.write_all(&DATASET_VERSION.to_le_bytes())?;
    out.write_all(&(n_antennas as u32).to_le_bytes())?;
    out.write_all(&(samples.len() as u64).to_le_bytes())?;
    for sample in samples {
        out.write_all(&sample.user_id.to_le_bytes())?;
        out.write_all(&(sample.paths.len() as u32).to_le_bytes())?;
        for path in &sample.paths {
            for value in [path.gain.re, path.gain.im, path.azimuth_rad, path.elevation_rad] {
                out.write_all(&value.to_le_bytes())?;
            }
        }
        for entry in sample.vector.iter() {
            out.write_all(&entry.re.to_le_bytes())?;
            out.write_all(&entry.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(mut input: R) -> Result<Vec<ChannelSample>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::MalformedHeader(format!(
            "expected at least {HEADER_LEN} header bytes, found {}",
            bytes.len()
        )));
    }
    if bytes[..4] != DATASET_MAGIC {
        return Err(Error::VersionMismatch(format!(
            "unrecognised magic {:?}",
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let mut cursor = Cursor::new(&bytes[4..]);
    let version = cursor.u32()?;
    if version != DATASET_VERSION {
        return Err(Error::VersionMismatch(format!(
            "file version {version}, reader supports {DATASET_VERSION}"
        )));
    }
    let n_antennas = cursor.u32()? as usize;
    let count = cursor.u64()?;
    let mut samples = Vec::new();
    for _ in 0..count {
        let user_id = cursor.u64()?;
        let n_paths = cursor.u32()? as usize;
        let mut paths = Vec::with_capacity(n_paths.min(1 << 16));
        for _ in 0..n_paths {
            let gain = Complex64::new(cursor.f64()?, cursor.f64()?);
            paths.push(PathComponent::new(gain, cursor.f64()?, cursor.f64()?));
        }
        let mut vector = DVector::<Complex64>::zeros(n_antennas);
        for entry in vector.iter_mut() {
            *entry = Complex64::new(cursor.f64()?, cursor.f64()?);
        }
        samples.push(ChannelSample { vector, paths, user_id });
    }
    if cursor.remaining() != 0 {
        return Err(Error::MalformedHeader(format!(
            "{} unexpected trailing bytes after {count} samples",
            cursor.remaining()
        )));
    }
    Ok(samples)
}

pub fn save_dataset(samples: &[ChannelSample], path: impl AsRef<Path>) -> Result<()> {
    write_dataset(BufWriter::new(File::create(path)?), samples)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<ChannelSample>> {
    read_dataset(BufReader::new(File::open(path)?))
}

/// Little-endian reader over a byte slice that reports short reads as truncation.
pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| {
            Error::Truncated(format!(
                "needed {N} bytes at offset {}, have {}",
                self.pos,
                self.remaining()
            ))
        })?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length checked"))
    }

    pub(crate) fn bytes(&mut self, len: usize) -> Result<&'a [u8]> {
        let slice = self
            .pos
            .checked_add(len)
            .and_then(|end| self.bytes.get(self.pos..end))
            .ok_or_else(|| {
                Error::Truncated(format!(
                    "needed {len} bytes at offset {}, have {}",
                    self.pos,
                    self.remaining()
                ))
            })?;
        self.pos += len;
        Ok(slice)
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}
