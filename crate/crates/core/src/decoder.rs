/// Deterministic map from a key vector to the cost of the solution it encodes.
///
/// Costs include any penalty terms and must be finite; a non-finite cost
/// aborts an ensemble run. Problem types expose their full decoded solution
/// through their own `decode` methods.
pub trait Decoder: Sync {
    /// Number of keys this decoder consumes.
    fn dimension(&self) -> usize;

    fn cost(&self, keys: &[f64]) -> f64;
}

impl<D: Decoder + ?Sized> Decoder for &D {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        (**self).cost(keys)
    }
}

/// Adapts a closure into a [`Decoder`].
pub struct FnDecoder<F> {
    dimension: usize,
    f: F,
}

impl<F> FnDecoder<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F> Decoder for FnDecoder<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        (self.f)(keys)
    }
}
