use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DVector;

use super::network::{AutoHpNetwork, RunningStats, HIDDEN_LAYERS};
use super::train::TrainConfig;
use crate::beamforming::PhaseQuantizer;
use crate::channel::Cursor;
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"AHPM";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Little-endian layout:
///
/// ```text
/// magic "AHPM" | version u32 | n_antennas u32 | n_beams u32 | bits u32
/// | bn_momentum f64 | stats flag u8 | parameters f64*
/// | running (mean, var) f64* per hidden layer, if flagged
/// | config length u64 | TOML text of the training config (may be empty)
/// ```
pub fn write_checkpoint<W: Write>(mut out: W, net: &AutoHpNetwork, config: Option<&TrainConfig>) -> Result<()> {
    out.write_all(&CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    for dim in [net.n_antennas(), net.n_beams()] {
        out.write_all(&(dim as u32).to_le_bytes())?;
    }
    out.write_all(&net.quantizer().bits().to_le_bytes())?;
    out.write_all(&net.bn_momentum().to_le_bytes())?;
    let stats = net.running_stats();
    out.write_all(&[u8::from(stats.is_some())])?;
    for tensor in net.params().tensors() {
        for v in tensor {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    for layer in stats.unwrap_or_default() {
        for v in layer.mean.iter().chain(layer.var.iter()) {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    let echo = match config {
        Some(cfg) => {
            toml::to_string(cfg).map_err(|e| Error::invalid(format!("cannot serialize training config: {e}")))?
        }
        None => String::new(),
    };
    out.write_all(&(echo.len() as u64).to_le_bytes())?;
    out.write_all(echo.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<(AutoHpNetwork, Option<TrainConfig>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 8 {
        return Err(Error::MalformedHeader(format!(
            "checkpoint header needs 8 bytes, got {}",
            bytes.len()
        )));
    }
    let mut cur = Cursor::new(&bytes);
    let magic: [u8; 4] = cur.take()?;
    let version = cur.u32()?;
    if magic != CHECKPOINT_MAGIC || version != CHECKPOINT_VERSION {
        return Err(Error::VersionMismatch(format!(
            "expected {:?} v{CHECKPOINT_VERSION}, found {:?} v{version}",
            String::from_utf8_lossy(&CHECKPOINT_MAGIC),
            String::from_utf8_lossy(&magic)
        )));
    }
    let n_antennas = cur.u32()? as usize;
    let n_beams = cur.u32()? as usize;
    let quantizer = PhaseQuantizer::new(cur.u32()?)?;
    let momentum = cur.f64()?;
    let [flag] = cur.take::<1>()?;
    if flag > 1 {
        return Err(Error::MalformedHeader(format!("invalid statistics flag {flag}")));
    }

    let mut rng = crate::rng_from_seed(0);
    let mut net = AutoHpNetwork::new(n_antennas, n_beams, quantizer, &mut rng)?;
    net.set_bn_momentum(momentum)?;
    for tensor in net.params_mut().tensors_mut() {
        for v in tensor.iter_mut() {
            *v = cur.f64()?;
        }
    }
    if flag == 1 {
        let mut stats = Vec::with_capacity(HIDDEN_LAYERS);
        for _ in 0..HIDDEN_LAYERS {
            let mut read = || -> Result<DVector<f64>> {
                let values = (0..n_antennas).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
                Ok(DVector::from_vec(values))
            };
            let mean = read()?;
            let var = read()?;
            stats.push(RunningStats { mean, var });
        }
        net.restore_running_stats(stats);
        net.set_mode(super::Mode::Eval);
    }

    let len = usize::try_from(cur.u64()?).map_err(|_| Error::MalformedHeader("config length overflows".into()))?;
    let text = std::str::from_utf8(cur.bytes(len)?)
        .map_err(|e| Error::MalformedHeader(format!("config echo is not UTF-8: {e}")))?;
    let config = if text.is_empty() {
        None
    } else {
        Some(toml::from_str(text).map_err(|e| Error::MalformedHeader(format!("config echo does not parse: {e}")))?)
    };
    if cur.remaining() != 0 {
        return Err(Error::MalformedHeader(format!(
            "{} unexpected trailing bytes",
            cur.remaining()
        )));
    }
    Ok((net, config))
}

pub fn save_checkpoint(net: &AutoHpNetwork, config: Option<&TrainConfig>, path: impl AsRef<Path>) -> Result<()> {
    write_checkpoint(BufWriter::new(File::create(path)?), net, config)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(AutoHpNetwork, Option<TrainConfig>)> {
    read_checkpoint(File::open(path)?)
}
