//! Concrete objectives and the data plumbing the benchmarks need.

mod batches;
mod finite_diff;
mod idx;
mod mlp;
mod quadratic;

pub use batches::minibatches;
pub use finite_diff::{finite_diff_grad, finite_diff_grad_relative, finite_diff_partial, relative_error};
pub use idx::{parse_idx_images, write_idx_images, ImageDataset, IDX_IMAGE_MAGIC};
pub use mlp::{BatchObjective, LayerParams, MlpAutoencoder, BCE_EPSILON};
pub use quadratic::{make_random_spd, quad_eval_grad, MatrixQuadratic, ScalarQuadratic};
