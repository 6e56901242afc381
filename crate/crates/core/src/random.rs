//! Seeded random unitaries for generating attacks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexOperator, C64};

fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let qr = gaussian_matrix(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    ComplexOperator::from_matrix(q).expect("square by construction")
}

/// GUE-style random Hermitian matrix scaled to unit spectral radius scale
/// (entries of order `1/sqrt(dim)`).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let g = gaussian_matrix(dim, rng);
    let h = (&g + g.adjoint()) * C64::new(0.5 / (2.0 * dim as f64).sqrt(), 0.0);
    ComplexOperator::from_matrix(h).expect("square by construction")
}

/// `exp(-i t H)` for a random Hermitian `H`; `t` controls the distance from identity.
pub fn near_identity_unitary<R: Rng + ?Sized>(dim: usize, t: f64, rng: &mut R) -> ComplexOperator {
    let h = random_hermitian(dim, rng);
    let eig = h.into_matrix().symmetric_eigen();
    let phases = DVector::from_iterator(
        dim,
        eig.eigenvalues
            .iter()
            .map(|&lambda| C64::from_polar(1.0, -t * lambda)),
    );
    let v = eig.eigenvectors;
    let u = &v * DMatrix::from_diagonal(&phases) * v.adjoint();
    ComplexOperator::from_matrix(u).expect("square by construction")
}
