use nalgebra::DMatrix;
use serde::Serialize;

use super::{gram_matrix_auto, mutual_information, renyi_entropy, GramState};
use crate::neuralnet::ActivationTrace;
use crate::{Error, Result};

/// Layer-wise information estimates for one batch.
///
/// Encoder-side quantities are measured against the channel input, decoder
/// side quantities against the quantized output phases `θ_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationPlane {
    pub input_received: f64,
    pub input_rssi: f64,
    pub phases_hidden1: f64,
    pub phases_hidden2: f64,
    pub phases_hidden3: f64,
    pub phases_rssi: f64,
    pub phases_reference: f64,
    pub rssi_entropy: f64,
}

pub fn information_plane(
    trace: &ActivationTrace,
    reference_phases: &DMatrix<f64>,
    alpha: f64,
) -> Result<InformationPlane> {
    let n = trace.input.nrows();
    let layers = [
        &trace.received,
        &trace.rssi,
        &trace.hidden[0],
        &trace.hidden[1],
        &trace.hidden[2],
        &trace.phases,
        reference_phases,
    ];
    if let Some(bad) = layers.iter().find(|m| m.nrows() != n) {
        return Err(Error::DimensionMismatch {
            context: "information plane batch size",
            expected: n,
            actual: bad.nrows(),
        });
    }
    let gram = |m: &DMatrix<f64>| -> Result<GramState> { gram_matrix_auto(m) };
    let input = gram(&trace.input)?;
    let received = gram(&trace.received)?;
    let rssi = gram(&trace.rssi)?;
    let phases = gram(&trace.phases)?;
    let mi = |a: &GramState, b: &GramState| mutual_information(a, b, alpha).map(|e| e.mi);
    Ok(InformationPlane {
        input_received: mi(&input, &received)?,
        input_rssi: mi(&input, &rssi)?,
        phases_hidden1: mi(&phases, &gram(&trace.hidden[0])?)?,
        phases_hidden2: mi(&phases, &gram(&trace.hidden[1])?)?,
        phases_hidden3: mi(&phases, &gram(&trace.hidden[2])?)?,
        phases_rssi: mi(&phases, &rssi)?,
        phases_reference: mi(&phases, &gram(reference_phases)?)?,
        rssi_entropy: renyi_entropy(&rssi, alpha)?,
    })
}
