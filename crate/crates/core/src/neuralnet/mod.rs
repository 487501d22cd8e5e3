//! The probing autoencoder: a complex probing layer with received-power
//! bottleneck feeding an MLP that predicts quantized analog phases.
//! Gradients are derived by hand for this fixed graph.

mod adam;
mod batch;
mod checkpoint;
mod network;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use batch::ChannelBatch;
pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use network::{
    ActivationTrace, AutoHpNetwork, DecoderOutput, DropoutMasks, EncoderOutput, ForwardPass, HiddenLayer, LossOptions,
    LossValue, Mode, Parameters, RunningStats, BN_EPSILON, DEFAULT_BN_MOMENTUM, HIDDEN_LAYERS,
};
pub use train::{fit, fit_with, reference_phases, EpochMetrics, TrainConfig};
