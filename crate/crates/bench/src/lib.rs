//! Fixtures shared by the benchmarks.

use tripartite_core::{BlochAngles, ComplexMatrix, C64};

/// Deterministic dense Hermitian matrix with a spread-out spectrum.
pub fn hermitian_fixture(dim: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, |r, c| {
        let x = (r * dim + c) as f64;
        C64::new((1.3 * x).sin(), (0.7 * x + 0.2).cos())
    });
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn generic_input() -> BlochAngles {
    BlochAngles::new(1.1, 2.3).expect("angles inside their ranges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_hermitian() {
        assert!(hermitian_fixture(16).is_hermitian(1e-15));
    }
}
