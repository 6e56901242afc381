//! The small dense linear-algebra and entropy kernel on its own: a Bell state,
//! its reduced state, and the entropy of a random block-diagonal operator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqkd::entropy::{binary_entropy, block_diag_entropy, von_neumann_entropy};
use sqkd::linalg::{
    hermitian_eigenvalues, partial_trace, ComplexOperator, ComplexVector, Subsystem,
};
use sqkd::random::haar_unitary;

fn main() -> sqkd::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = ComplexOperator::projector(&ComplexVector::from_real(&[s, 0.0, 0.0, s]));
    let reduced = partial_trace(&bell, (2, 2), Subsystem::First)?;
    println!("S(Bell) = {:.3}", von_neumann_entropy(&bell)?);
    println!("S(tr_B Bell) = {:.3}", von_neumann_entropy(&reduced)?);
    println!("h(1/4) = {:.12}", binary_entropy(0.25)?);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let u = haar_unitary(3, &mut rng);
    let rho = &(&u * &ComplexOperator::from_diagonal(&[0.6, 0.3, 0.1])) * &u.adjoint();
    println!(
        "spectrum of a rotated diag(0.6, 0.3, 0.1): {:.6?}",
        hermitian_eigenvalues(&rho)?
    );

    let qubit = ComplexOperator::from_diagonal(&[0.5, 0.5]);
    let weights = [0.25, 0.75];
    let direct = von_neumann_entropy(&ComplexOperator::block_diagonal(&[
        rho.scale(weights[0]),
        qubit.scale(weights[1]),
    ]))?;
    let split = block_diag_entropy(&weights, &[rho, qubit])?;
    println!("block-diagonal entropy: direct {direct:.12}, split {split:.12}");
    Ok(())
}
