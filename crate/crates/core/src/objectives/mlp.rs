//! Fully connected autoencoder: tanh hidden layers, logistic output,
//! binary cross-entropy against the input, gradients by backpropagation.
//!
//! Parameters live in one flat vector so the optimizers can treat the
//! network like any other objective. Layout, layer by layer: the weight
//! matrix row-major (`out x in`), then the bias.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::objective::Objective;
use crate::scalar::Scalar;

/// Reconstructions are clamped to `[eps, 1 - eps]` before taking logs.
pub const BCE_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams<T> {
    /// `out x in`
    pub weights: Array2<T>,
    pub bias: Array1<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpAutoencoder {
    layer_sizes: Vec<usize>,
}

impl MlpAutoencoder {
    /// `layer_sizes` runs from the input width to the output width, which
    /// must match.
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self, ModelError> {
        if layer_sizes.len() < 2 {
            return Err(ModelError::Architecture(
                "need at least an input and an output layer".into(),
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(ModelError::Architecture("layer widths must be positive".into()));
        }
        if layer_sizes.first() != layer_sizes.last() {
            return Err(ModelError::Architecture(format!(
                "output width {} differs from input width {}",
                layer_sizes.last().unwrap(),
                layer_sizes[0]
            )));
        }
        Ok(MlpAutoencoder { layer_sizes })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    fn shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_sizes.windows(2).map(|w| (w[1], w[0]))
    }

    pub fn num_params(&self) -> usize {
        self.shapes().map(|(out, inp)| out * inp + out).sum()
    }

    /// Uniform `[-s, s]` weights with `s = sqrt(6 / (fan_in + fan_out))`,
    /// zero biases.
    pub fn init_params<T: Scalar>(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut theta = Vec::with_capacity(self.num_params());
        for (out, inp) in self.shapes() {
            let s = (6.0 / (out + inp) as f64).sqrt();
            theta.extend((0..out * inp).map(|_| T::lit(rng.random_range(-s..=s))));
            theta.extend(std::iter::repeat_n(T::zero(), out));
        }
        theta
    }

    pub fn unflatten<T: Scalar>(&self, theta: &[T]) -> Result<Vec<LayerParams<T>>, ModelError> {
        self.check_params(theta)?;
        let mut offset = 0;
        Ok(self
            .shapes()
            .map(|(out, inp)| {
                let w = &theta[offset..offset + out * inp];
                offset += out * inp;
                let b = &theta[offset..offset + out];
                offset += out;
                LayerParams {
                    weights: Array2::from_shape_vec((out, inp), w.to_vec()).expect("layer shape"),
                    bias: Array1::from(b.to_vec()),
                }
            })
            .collect())
    }

    pub fn flatten<T: Scalar>(&self, layers: &[LayerParams<T>]) -> Result<Vec<T>, ModelError> {
        let shapes: Vec<_> = self.shapes().collect();
        if layers.len() != shapes.len() {
            return Err(ModelError::DimensionMismatch {
                expected: shapes.len(),
                got: layers.len(),
            });
        }
        let mut theta = Vec::with_capacity(self.num_params());
        for (p, &(out, inp)) in layers.iter().zip(&shapes) {
            if p.weights.dim() != (out, inp) || p.bias.len() != out {
                return Err(ModelError::Architecture(format!(
                    "layer expected {out}x{inp}, got {:?} with bias {}",
                    p.weights.dim(),
                    p.bias.len()
                )));
            }
            theta.extend(p.weights.iter().copied());
            theta.extend(p.bias.iter().copied());
        }
        Ok(theta)
    }

    fn check_params<T>(&self, theta: &[T]) -> Result<(), ModelError> {
        if theta.len() != self.num_params() {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_params(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    fn check_batch<T: Scalar>(&self, batch: &ArrayView2<T>) -> Result<(), ModelError> {
        if batch.nrows() == 0 {
            return Err(ModelError::InvalidArgument("empty batch".into()));
        }
        if batch.ncols() != self.input_dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.input_dim(),
                got: batch.ncols(),
            });
        }
        Ok(())
    }

    /// Activations of every layer after the input.
    fn forward<T: Scalar>(&self, layers: &[LayerParams<T>], x: &ArrayView2<T>) -> Vec<Array2<T>> {
        let last = layers.len() - 1;
        let mut acts: Vec<Array2<T>> = Vec::with_capacity(layers.len());
        for (l, p) in layers.iter().enumerate() {
            let mut z = match l {
                0 => x.dot(&p.weights.t()),
                _ => acts[l - 1].dot(&p.weights.t()),
            };
            z += &p.bias;
            if l == last {
                z.mapv_inplace(|v| T::one() / (T::one() + (-v).exp()));
            } else {
                z.mapv_inplace(|v| v.tanh());
            }
            acts.push(z);
        }
        acts
    }

    fn bce<T: Scalar>(x: &ArrayView2<T>, recon: &Array2<T>) -> T {
        let eps = T::lit(BCE_EPSILON);
        let one = T::one();
        let total: T = x
            .iter()
            .zip(recon.iter())
            .map(|(&xi, &pi)| {
                let p = pi.max(eps).min(one - eps);
                -(xi * p.ln() + (one - xi) * (one - p).ln())
            })
            .sum();
        total / T::from_usize(x.len()).expect("batch size representable")
    }

    /// Reconstruction of `batch` (`n x input_dim`), components in `(0, 1)`.
    pub fn reconstruct<T: Scalar>(&self, theta: &[T], batch: ArrayView2<T>) -> Result<Array2<T>, ModelError> {
        self.check_batch(&batch)?;
        let layers = self.unflatten(theta)?;
        Ok(self.forward(&layers, &batch).pop().expect("at least one layer"))
    }

    /// Mean binary cross-entropy over batch and pixels.
    pub fn loss<T: Scalar>(&self, theta: &[T], batch: ArrayView2<T>) -> Result<T, ModelError> {
        let recon = self.reconstruct(theta, batch)?;
        let loss = Self::bce(&batch, &recon);
        if !loss.is_finite() {
            return Err(ModelError::NonFiniteLoss);
        }
        Ok(loss)
    }

    /// Loss and its gradient with respect to the flat parameter vector.
    pub fn loss_and_grad<T: Scalar>(
        &self,
        theta: &[T],
        batch: ArrayView2<T>,
    ) -> Result<(T, Vec<T>), ModelError> {
        self.check_batch(&batch)?;
        let layers = self.unflatten(theta)?;
        let acts = self.forward(&layers, &batch);
        let recon = acts.last().expect("at least one layer");
        let loss = Self::bce(&batch, recon);
        if !loss.is_finite() {
            return Err(ModelError::NonFiniteLoss);
        }

        let eps = T::lit(BCE_EPSILON);
        let scale = T::one() / T::from_usize(batch.len()).expect("batch size representable");
        // d loss / d pre-activation of the logistic output; zero where clamped
        let mut delta = Array2::from_shape_fn(recon.dim(), |(i, j)| {
            let p = recon[[i, j]];
            if p < eps || p > T::one() - eps {
                T::zero()
            } else {
                (p - batch[[i, j]]) * scale
            }
        });

        let mut grads: Vec<(Array2<T>, Array1<T>)> = Vec::with_capacity(layers.len());
        for l in (0..layers.len()).rev() {
            let gw = match l {
                0 => delta.t().dot(&batch),
                _ => delta.t().dot(&acts[l - 1]),
            };
            let gb = delta.sum_axis(Axis(0));
            grads.push((gw, gb));
            if l > 0 {
                let mut back = delta.dot(&layers[l].weights);
                back.zip_mut_with(&acts[l - 1], |d, &a| *d *= T::one() - a * a);
                delta = back;
            }
        }

        let mut flat = Vec::with_capacity(theta.len());
        for (gw, gb) in grads.iter().rev() {
            flat.extend(gw.iter().copied());
            flat.extend(gb.iter().copied());
        }
        Ok((loss, flat))
    }

    /// The network's loss on a fixed batch as an [`Objective`].
    pub fn objective<'a, T: Scalar>(&'a self, batch: ArrayView2<'a, T>) -> Result<BatchObjective<'a, T>, ModelError> {
        self.check_batch(&batch)?;
        Ok(BatchObjective { model: self, batch })
    }
}

impl fmt::Display for MlpAutoencoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.layer_sizes.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

impl FromStr for MlpAutoencoder {
    type Err = ModelError;

    /// Parses dash-separated widths such as `784-64-16-64-784`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sizes = s
            .split('-')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| ModelError::Architecture(format!("bad layer width `{p}` in `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MlpAutoencoder::new(sizes)
    }
}

/// An autoencoder's loss on one fixed batch.
///
/// Shape errors are ruled out at construction; a non-finite loss surfaces as
/// a NaN value or gradient for the run loop to report.
pub struct BatchObjective<'a, T> {
    model: &'a MlpAutoencoder,
    batch: ArrayView2<'a, T>,
}

impl<T: Scalar> Objective<T> for BatchObjective<'_, T> {
    fn dim(&self) -> usize {
        self.model.num_params()
    }

    fn value(&self, theta: &[T]) -> T {
        self.model.loss(theta, self.batch.view()).unwrap_or_else(|_| T::nan())
    }

    fn gradient(&self, theta: &[T]) -> Vec<T> {
        self.value_and_gradient(theta).1
    }

    fn value_and_gradient(&self, theta: &[T]) -> (T, Vec<T>) {
        self.model
            .loss_and_grad(theta, self.batch.view())
            .unwrap_or_else(|_| (T::nan(), vec![T::nan(); theta.len()]))
    }
}
