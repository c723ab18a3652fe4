use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::ModelError;
use crate::objective::Objective;
use crate::scalar::Scalar;

/// `J(theta) = theta^2 / 2` on a single coordinate; the gradient is `theta`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScalarQuadratic;

impl<T: Scalar> Objective<T> for ScalarQuadratic {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[T]) -> T {
        T::lit(0.5) * theta[0] * theta[0]
    }

    fn gradient(&self, theta: &[T]) -> Vec<T> {
        vec![theta[0]]
    }
}

/// `J(theta) = theta^T A theta / 2 - theta^T b` with `A` symmetric positive
/// definite.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixQuadratic<T> {
    a: Array2<T>,
    b: Array1<T>,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl<T: Scalar> MatrixQuadratic<T> {
    /// Checks shapes and symmetry. Positive definiteness is checked lazily by
    /// [`MatrixQuadratic::minimizer`].
    pub fn new(a: Array2<T>, b: Array1<T>) -> Result<Self, ModelError> {
        let n = b.len();
        if n == 0 {
            return Err(ModelError::InvalidArgument("empty quadratic".into()));
        }
        if a.dim() != (n, n) {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                got: a.nrows().max(a.ncols()),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if (a[[i, j]] - a[[j, i]]).abs() > T::lit(SYMMETRY_TOL) {
                    return Err(ModelError::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(MatrixQuadratic { a, b })
    }

    pub fn matrix(&self) -> &Array2<T> {
        &self.a
    }

    pub fn rhs(&self) -> &Array1<T> {
        &self.b
    }

    /// Solves `A theta* = b` by Cholesky factorisation (in `f64`).
    pub fn minimizer(&self) -> Result<Vec<T>, ModelError> {
        let n = self.b.len();
        let a = DMatrix::from_row_iterator(n, n, self.a.iter().map(|x| x.to_f64_lossy()));
        let b = DVector::from_iterator(n, self.b.iter().map(|x| x.to_f64_lossy()));
        let chol = a.cholesky().ok_or(ModelError::NotPositiveDefinite)?;
        Ok(chol.solve(&b).iter().map(|&x| T::lit(x)).collect())
    }

    /// `J(theta*)`.
    pub fn min_value(&self) -> Result<T, ModelError> {
        let x = self.minimizer()?;
        Ok(self.value(&x))
    }

    fn eval(&self, theta: &[T]) -> (T, Vec<T>) {
        let th = ArrayView1::from(theta);
        let at = self.a.dot(&th);
        let value = T::lit(0.5) * th.dot(&at) - th.dot(&self.b);
        let grad = (at - &self.b).to_vec();
        (value, grad)
    }
}

/// Value and gradient with an explicit dimension check.
pub fn quad_eval_grad<T: Scalar>(
    q: &MatrixQuadratic<T>,
    theta: &[T],
) -> Result<(T, Vec<T>), ModelError> {
    if theta.len() != q.b.len() {
        return Err(ModelError::DimensionMismatch {
            expected: q.b.len(),
            got: theta.len(),
        });
    }
    Ok(q.eval(theta))
}

impl<T: Scalar> Objective<T> for MatrixQuadratic<T> {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, theta: &[T]) -> T {
        let th = ArrayView1::from(theta);
        T::lit(0.5) * th.dot(&self.a.dot(&th)) - th.dot(&self.b)
    }

    fn gradient(&self, theta: &[T]) -> Vec<T> {
        self.eval(theta).1
    }

    fn value_and_gradient(&self, theta: &[T]) -> (T, Vec<T>) {
        self.eval(theta)
    }
}

/// Random instance `A = Q^T D Q`, `Q` the orthogonal factor of a seeded
/// standard-normal matrix (columns sign-fixed so `R` has a positive
/// diagonal), `D` log-uniform on `[eig_low, eig_high]`, and `b`
/// standard-normal scaled by `1 / sqrt(dim)`.
///
/// Draw order from the seeded stream: the `dim x dim` matrix row by row,
/// then the eigenvalues, then `b`.
pub fn make_random_spd<T: Scalar>(
    dim: usize,
    seed: u64,
    eig_low: f64,
    eig_high: f64,
) -> Result<MatrixQuadratic<T>, ModelError> {
    if dim == 0 {
        return Err(ModelError::InvalidArgument("dim must be at least 1".into()));
    }
    if !(eig_low > 0.0 && eig_low <= eig_high && eig_high.is_finite()) {
        return Err(ModelError::InvalidArgument(format!(
            "eigenvalue range must satisfy 0 < low <= high, got [{eig_low}, {eig_high}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss: Vec<f64> = (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect();
    let (log_lo, log_hi) = (eig_low.ln(), eig_high.ln());
    let eigs: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            if eig_low == eig_high {
                eig_low
            } else {
                (log_lo + u * (log_hi - log_lo)).exp().clamp(eig_low, eig_high)
            }
        })
        .collect();
    let scale = 1.0 / (dim as f64).sqrt();
    let b: Vec<f64> = (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let qr = DMatrix::from_row_slice(dim, dim, &gauss).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mut dq = q.clone();
    for (i, mut row) in dq.row_iter_mut().enumerate() {
        row *= eigs[i];
    }
    let a = q.transpose() * dq;
    let a = Array2::from_shape_fn((dim, dim), |(i, j)| T::lit(0.5 * (a[(i, j)] + a[(j, i)])));
    let b = Array1::from_iter(b.into_iter().map(T::lit));
    MatrixQuadratic::new(a, b)
}
