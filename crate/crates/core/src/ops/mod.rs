//! Layer kernels with exact backward passes.
//!
//! Every op is a pure function of its inputs and parameters. Forward and
//! backward are separate functions; backward takes whatever the forward
//! needs to be recomputed or cached (input tensor, argmax indices, batchnorm
//! cache).

mod activation;
mod batchnorm;
mod concat;
mod conv;
mod loss;
mod pool;

pub use activation::{relu, relu_backward};
pub use batchnorm::{
    batchnorm_backward, batchnorm_infer, batchnorm_train, BatchNormCache, BatchNormGrads,
    BatchNormParams, RunningStats, BN_EPSILON, BN_MOMENTUM,
};
pub use concat::{concat_channels, split_channels};
pub use conv::{
    conv1d, conv1d_backward, conv_transpose1d, conv_transpose1d_backward, ConvGrads,
    ConvParams, ConvSpec,
};
pub use loss::{mse_loss, mse_loss_batch, mse_loss_batch_backward, mse_loss_backward};
pub use pool::{maxpool1d, maxpool1d_backward, Pooled};

/// Which pass of a layer to run; used by the dispatching entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}
