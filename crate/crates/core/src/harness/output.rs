use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::deploy::{GainRow, SumRateRow, UserRateRow};
use super::overhead::OverheadReport;
use super::patterns::PatternRow;
use crate::dimsearch::ProbeResult;
use crate::neuralnet::EpochMetrics;
use crate::Result;

/// Row type with a fixed CSV header. The header is written even when there
/// are no rows.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

impl CsvRow for SumRateRow {
    const HEADER: &'static [&'static str] = &["method", "snr_db", "sum_rate", "groups", "fallback_groups"];
}

impl CsvRow for UserRateRow {
    const HEADER: &'static [&'static str] = &["method", "snr_db", "group", "user_id", "sinr", "rate"];
}

impl CsvRow for GainRow {
    const HEADER: &'static [&'static str] = &["method", "mean_gain"];
}

impl CsvRow for PatternRow {
    const HEADER: &'static [&'static str] = &["beam", "angle_rad", "gain"];
}

impl CsvRow for OverheadReport {
    const HEADER: &'static [&'static str] = &["m_learned", "n_dft", "n_odft", "reduction_vs_dft", "reduction_vs_odft"];
}

impl CsvRow for ProbeResult {
    const HEADER: &'static [&'static str] = &[
        "m_candidate",
        "condition_held",
        "epochs_used",
        "entropy_y",
        "mi_reference",
    ];
}

impl CsvRow for EpochMetrics {
    const HEADER: &'static [&'static str] = &[
        "epoch",
        "train_loss",
        "val_loss",
        "val_gain",
        "val_genie_gain",
        "entropy_y",
        "mi_reference",
    ];
}

pub fn write_rows<W: Write, T: CsvRow>(out: W, rows: &[T]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(T::HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv<T: CsvRow>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    write_rows(File::create(path)?, rows)
}
