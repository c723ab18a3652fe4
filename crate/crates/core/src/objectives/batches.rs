use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;

/// Seeded shuffle of `0..count` cut into consecutive batches of
/// `batch_size`; a final short batch is dropped.
pub fn minibatches(count: usize, batch_size: usize, seed: u64) -> Result<Vec<Vec<usize>>, ModelError> {
    if batch_size == 0 || batch_size > count {
        return Err(ModelError::InvalidArgument(format!(
            "batch size must be in 1..={count}, got {batch_size}"
        )));
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(order
        .chunks_exact(batch_size)
        .map(<[usize]>::to_vec)
        .collect())
}
