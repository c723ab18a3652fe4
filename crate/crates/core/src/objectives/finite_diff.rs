//! Central finite differences, used as an independent gradient oracle.

use crate::objective::Objective;
use crate::scalar::Scalar;

/// `(f(theta + h e_i) - f(theta - h e_i)) / 2h`
pub fn finite_diff_partial<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    theta: &[T],
    i: usize,
    h: T,
) -> T {
    let mut probe = theta.to_vec();
    probe[i] = theta[i] + h;
    let plus = f.value(&probe);
    probe[i] = theta[i] - h;
    let minus = f.value(&probe);
    (plus - minus) / (h + h)
}

/// Central-difference gradient with a fixed step `h` on every coordinate.
pub fn finite_diff_grad<T: Scalar, F: Objective<T> + ?Sized>(f: &F, theta: &[T], h: T) -> Vec<T> {
    assert!(h > T::zero(), "finite-difference step must be positive");
    (0..theta.len())
        .map(|i| finite_diff_partial(f, theta, i, h))
        .collect()
}

/// Central-difference gradient with step `h * max(1, |theta_i|)`.
pub fn finite_diff_grad_relative<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    theta: &[T],
    h: T,
) -> Vec<T> {
    assert!(h > T::zero(), "finite-difference step must be positive");
    (0..theta.len())
        .map(|i| finite_diff_partial(f, theta, i, h * theta[i].abs().max(T::one())))
        .collect()
}

/// `|a - b| / max(|a|, |b|, floor)`
pub fn relative_error<T: Scalar>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
