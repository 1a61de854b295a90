//! Self-contained dense complex linear algebra.
//!
//! Row-major storage throughout, sized for the operators of a small spin
//! chain: 8x8 Hamiltonians, 64x64 superoperators, Kronecker products up to
//! the 2^20-entry cap (1024x1024). No sparsity, no external solver.

mod eigen;
mod expm;
mod matrix;

pub use eigen::{eigh, EigenDecomposition};
pub use expm::{expm_general, expm_hermitian, GeneratorSign};
pub use matrix::{kron, ComplexMatrix, KRON_ENTRY_CAP};

pub use num_complex::Complex64;

/// Inner product `<a|b>` with the conjugate on the left argument.
pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch in inner product");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
