use crate::scalar::Scalar;

/// A differentiable scalar function of a parameter vector.
///
/// Implementations must be pure: the same `theta` always gives the same
/// value and gradient.
pub trait Objective<T: Scalar> {
    fn dim(&self) -> usize;

    fn value(&self, theta: &[T]) -> T;

    fn gradient(&self, theta: &[T]) -> Vec<T>;

    fn value_and_gradient(&self, theta: &[T]) -> (T, Vec<T>) {
        (self.value(theta), self.gradient(theta))
    }
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, theta: &[T]) -> T {
        (**self).value(theta)
    }
    fn gradient(&self, theta: &[T]) -> Vec<T> {
        (**self).gradient(theta)
    }
    fn value_and_gradient(&self, theta: &[T]) -> (T, Vec<T>) {
        (**self).value_and_gradient(theta)
    }
}

/// Adapts a pair of closures into an [`Objective`].
pub struct FnObjective<V, G> {
    dim: usize,
    value: V,
    gradient: G,
}

impl<V, G> FnObjective<V, G> {
    pub fn new(dim: usize, value: V, gradient: G) -> Self {
        FnObjective {
            dim,
            value,
            gradient,
        }
    }
}

impl<T, V, G> Objective<T> for FnObjective<V, G>
where
    T: Scalar,
    V: Fn(&[T]) -> T,
    G: Fn(&[T]) -> Vec<T>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, theta: &[T]) -> T {
        (self.value)(theta)
    }
    fn gradient(&self, theta: &[T]) -> Vec<T> {
        (self.gradient)(theta)
    }
}
