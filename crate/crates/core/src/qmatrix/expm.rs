//! Matrix exponentials.
//!
//! Two routes: Hermitian generators go through the spectral decomposition
//! (exact up to the eigensolver), general matrices through Pade(13) with
//! scaling and squaring. The general route handles the stiff Liouvillians
//! of the dephasing solver, whose scaled norms reach ~1e5.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

use super::eigen::eigh;
use super::matrix::ComplexMatrix;

/// Sign of the imaginary unit in `exp(sign * i * h * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSign {
    PlusI,
    MinusI,
}

/// `exp(sign * i * h * t)` for Hermitian `h`, via the spectral decomposition.
///
/// With `GeneratorSign::MinusI` this is the unitary propagator of `h`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64, sign: GeneratorSign) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    let s = match sign {
        GeneratorSign::PlusI => 1.0,
        GeneratorSign::MinusI => -1.0,
    };
    Ok(eig.map_spectrum(|lambda| Complex64::from_polar(1.0, s * lambda * t)))
}

/// Scaling threshold for the Pade(13) approximant: `|m / 2^s|_1 <= 5.4`.
const PADE13_THETA: f64 = 5.4;

/// Pade(13) numerator coefficients (denominator shares them with alternating
/// signs). Exact rationals rounded to f64.
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential of a general square complex matrix.
///
/// Scaling and squaring with the Pade(13) approximant; the scaling exponent
/// is the smallest `s >= 0` with `|m / 2^s|_1 <= 5.4`. NaN or infinite
/// entries are rejected.
pub fn expm_general(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(m.is_square(), "expm requires a square matrix");
    if m.has_non_finite() {
        return Err(Error::NonFinite);
    }

    let norm = m.one_norm();
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };

    let scaled = m.scale_re(0.5f64.powi(s as i32));
    let mut result = pade13(&scaled)?;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Pade(13) approximant: solves `(-U + V) X = (U + V)` with
/// `U = A (b13 A^6 + b11 A^4 + b9 A^2 + ...)` and the even counterpart `V`.
fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let eye = ComplexMatrix::identity(n);
    let b = |k: usize| Complex64::new(PADE13_B[k], 0.0);

    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let w1 = &(&a6.scale(b(13)) + &a4.scale(b(11))) + &a2.scale(b(9));
    let w2 = &(&(&a6.scale(b(7)) + &a4.scale(b(5))) + &a2.scale(b(3))) + &eye.scale(b(1));
    let u = a.matmul(&(&w1.matmul(&a6) + &w2));

    let z1 = &(&a6.scale(b(12)) + &a4.scale(b(10))) + &a2.scale(b(8));
    let z2 = &(&(&a6.scale(b(6)) + &a4.scale(b(4))) + &a2.scale(b(2))) + &eye.scale(b(0));
    let v = &z1.matmul(&a6) + &z2;

    let numerator = &v + &u;
    let denominator = &v - &u;
    solve(denominator, numerator)
}

/// Solve `a X = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: ComplexMatrix, mut b: ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    assert_eq!(n, b.rows());
    let m = b.cols();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a.get(col, col).norm();
        for r in col + 1..n {
            let mag = a.get(r, col).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < f64::MIN_POSITIVE {
            return Err(Error::SingularSystem { pivot: pivot_mag });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
            for j in 0..m {
                let tmp = b.get(col, j);
                b.set(col, j, b.get(pivot_row, j));
                b.set(pivot_row, j, tmp);
            }
        }
        let pivot = a.get(col, col);
        for r in col + 1..n {
            let factor = a.get(r, col) / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
            for j in 0..m {
                let v = b.get(r, j) - factor * b.get(col, j);
                b.set(r, j, v);
            }
        }
    }

    let mut x = ComplexMatrix::zeros(n, m);
    for col in (0..n).rev() {
        let pivot = a.get(col, col);
        for j in 0..m {
            let mut s = b.get(col, j);
            for k in col + 1..n {
                s -= a.get(col, k) * x.get(k, j);
            }
            x.set(col, j, s / pivot);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::eigen::eigh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c(rng.gen_range(-1.0..1.0), 0.0));
            for j in 0..i {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    #[test]
    fn zero_generator_gives_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        let u = expm_hermitian(&z, 123.4, GeneratorSign::MinusI).unwrap();
        assert!(u.max_diff(&ComplexMatrix::identity(4)) < 1e-14);
        let e = expm_general(&z).unwrap();
        assert!(e.max_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn diagonal_generator_exponentiates_the_diagonal() {
        // exp(-i * diag(1,-1) * pi/2) = diag(-i, +i)
        let d = ComplexMatrix::from_diag(&[c(1., 0.), c(-1., 0.)]);
        let u = expm_hermitian(&d, std::f64::consts::FRAC_PI_2, GeneratorSign::MinusI).unwrap();
        assert!((u.get(0, 0) - c(0., -1.)).norm() < 1e-14);
        assert!((u.get(1, 1) - c(0., 1.)).norm() < 1e-14);
        assert!(u.get(0, 1).norm() < 1e-15);
        assert!(u.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn general_diagonal_case() {
        let d = ComplexMatrix::from_diag(&[c(1.5, 0.), c(-0.25, 2.0)]);
        let e = expm_general(&d).unwrap();
        assert!((e.get(0, 0) - c(1.5, 0.).exp()).norm() < 1e-12);
        assert!((e.get(1, 1) - c(-0.25, 2.0).exp()).norm() < 1e-12);
        assert!(e.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn unitarity_of_hermitian_propagators() {
        for seed in 0..5u64 {
            let h = random_hermitian(8, seed);
            let t = 0.3 + seed as f64;
            let u = expm_hermitian(&h, t, GeneratorSign::MinusI).unwrap();
            let gram = u.adjoint().matmul(&u);
            assert!(gram.max_diff(&ComplexMatrix::identity(8)) < 1e-10);
        }
    }

    #[test]
    fn inverse_property_of_general_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 6, 10] {
            // |m|_1 <= 10 by construction: entries bounded by 10/n.
            let bound = 10.0 / n as f64;
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen_range(-bound..bound), rng.gen_range(-bound..bound))
            });
            let e = expm_general(&m).unwrap();
            let e_inv = expm_general(&m.scale_re(-1.0)).unwrap();
            let prod = e.matmul(&e_inv);
            assert!(prod.max_diff(&ComplexMatrix::identity(n)) < 1e-8, "n={n}");
        }
    }

    #[test]
    fn general_route_matches_hermitian_route() {
        // For Hermitian m, exp(-i m t) from Pade must agree with the
        // spectral route entrywise to 1e-9.
        for seed in 20..26u64 {
            let h = random_hermitian(8, seed);
            let t = 0.7 + 0.3 * seed as f64;
            let spectral = expm_hermitian(&h, t, GeneratorSign::MinusI).unwrap();
            let generator = h.scale(c(0., -t));
            let pade = expm_general(&generator).unwrap();
            assert!(
                pade.max_diff(&spectral) < 1e-9,
                "seed {seed}: {:.3e}",
                pade.max_diff(&spectral)
            );
        }
    }

    #[test]
    fn large_norm_requires_scaling_and_stays_accurate() {
        // Diagonal with large spread exercises the squaring chain.
        let d = ComplexMatrix::from_diag(&[c(40.0, 0.), c(-40.0, 0.), c(0.0, 35.0)]);
        let e = expm_general(&d).unwrap();
        assert!((e.get(0, 0).re - 40f64.exp()).abs() / 40f64.exp() < 1e-10);
        assert!((e.get(1, 1).re - (-40f64).exp()).abs() < 1e-15);
        assert!((e.get(2, 2) - c(0., 35.).exp()).norm() < 1e-9);
    }

    #[test]
    fn rejects_non_finite_entries() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, c(f64::NAN, 0.));
        assert!(matches!(expm_general(&m), Err(Error::NonFinite)));
        let mut m2 = ComplexMatrix::zeros(2, 2);
        m2.set(1, 0, c(0., f64::INFINITY));
        assert!(matches!(expm_general(&m2), Err(Error::NonFinite)));
    }

    #[test]
    fn sixty_four_dimensional_exponential_is_consistent() {
        // Superoperator-sized sanity check against the spectral route.
        let h = random_hermitian(64, 42);
        let gen = h.scale(c(0., -1.0));
        let pade = expm_general(&gen).unwrap();
        let spectral = expm_hermitian(&h, 1.0, GeneratorSign::MinusI).unwrap();
        assert!(pade.max_diff(&spectral) < 1e-9);
        let _ = eigh(&h).unwrap();
    }
}
