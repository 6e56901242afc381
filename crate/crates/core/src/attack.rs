//! Collective attacks `(U_E, U_F)` on the two-way channel and everything that
//! follows from a fixed attack: Eve's conditional ancilla vectors, the channel
//! statistics it induces, the exact post-protocol states and the exact
//! collective-attack key rate.
//!
//! The joint space is `transit ⊗ ancilla` with the transit qubit as the most
//! significant index. Eve's ancilla always starts in `|0⟩_E`.

use rand::Rng;

use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::keyrate::h_b_given_a;
use crate::linalg::{partial_trace, ComplexOperator, ComplexVector, Subsystem, C64, ONE, ZERO};
use crate::random::{haar_unitary, near_identity_unitary};
use crate::stats::ChannelStatistics;

pub const MAX_ANCILLA_DIM: usize = 32;
/// Maximum entrywise `|U^†U - I|` for an accepted attack unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// A validated pair of attack unitaries on `C^2 ⊗ C^{d_E}`.
#[derive(Clone, Debug)]
pub struct CollectiveAttack {
    ancilla_dim: usize,
    forward: ComplexOperator,
    reverse: ComplexOperator,
}

impl CollectiveAttack {
    /// `forward` attacks the qubit on its way to Bob, `reverse` on its way back.
    pub fn new(
        forward: ComplexOperator,
        reverse: ComplexOperator,
        ancilla_dim: usize,
    ) -> Result<Self> {
        if ancilla_dim == 0 || ancilla_dim > MAX_ANCILLA_DIM {
            return Err(Error::InvalidParameter(format!(
                "ancilla dimension {ancilla_dim} outside 1..={MAX_ANCILLA_DIM}"
            )));
        }
        for (name, u) in [("forward", &forward), ("reverse", &reverse)] {
            if u.dim() != 2 * ancilla_dim {
                return Err(Error::DimensionMismatch(format!(
                    "{name} unitary has dimension {}, expected {}",
                    u.dim(),
                    2 * ancilla_dim
                )));
            }
            let residual = u.unitarity_defect();
            if residual > UNITARY_TOL {
                return Err(Error::NonUnitary { residual });
            }
        }
        Ok(Self {
            ancilla_dim,
            forward,
            reverse,
        })
    }

    /// Skips the unitarity check. Only for exercising the invariant checkers.
    #[doc(hidden)]
    pub fn new_unchecked(
        forward: ComplexOperator,
        reverse: ComplexOperator,
        ancilla_dim: usize,
    ) -> Self {
        assert_eq!(forward.dim(), 2 * ancilla_dim);
        assert_eq!(reverse.dim(), 2 * ancilla_dim);
        Self {
            ancilla_dim,
            forward,
            reverse,
        }
    }

    /// Eve does nothing.
    pub fn identity(ancilla_dim: usize) -> Self {
        let u = ComplexOperator::identity(2 * ancilla_dim);
        Self::new(u.clone(), u, ancilla_dim).expect("identity is unitary")
    }

    /// Eve copies the forward transit bit into a qubit ancilla (a CNOT) and
    /// leaves the return trip alone.
    pub fn z_measure() -> Self {
        let mut entries = vec![ZERO; 16];
        // |t, e⟩ -> |t, e xor t⟩
        for t in 0..2 {
            for e in 0..2 {
                let col = t * 2 + e;
                let row = t * 2 + (e ^ t);
                entries[row * 4 + col] = ONE;
            }
        }
        let cnot = ComplexOperator::from_row_slice(4, &entries).expect("4x4");
        Self::new(cnot, ComplexOperator::identity(4), 2).expect("CNOT is unitary")
    }

    /// Independent bit flips with probability `qf` forward and `qr` on return,
    /// each recorded in its own ancilla qubit (`d_E = 4`, forward qubit
    /// most significant).
    pub fn symmetric(qf: f64, qr: f64) -> Result<Self> {
        for (name, q) in [("forward flip", qf), ("reverse flip", qr)] {
            if !(0.0..=0.5).contains(&q) {
                return Err(Error::InvalidParameter(format!(
                    "{name} probability {q} outside [0, 1/2]"
                )));
            }
        }
        let forward = recording_flip(qf, 0);
        let reverse = recording_flip(qr, 1);
        Self::new(forward, reverse, 4)
    }

    /// Both unitaries drawn from the Haar measure.
    pub fn haar_random<R: Rng + ?Sized>(ancilla_dim: usize, rng: &mut R) -> Result<Self> {
        let forward = haar_unitary(2 * ancilla_dim, rng);
        let reverse = haar_unitary(2 * ancilla_dim, rng);
        Self::new(forward, reverse, ancilla_dim)
    }

    /// Both unitaries of the form `exp(-i t H)` with random Hermitian `H`.
    /// Small `strength` gives low-noise attacks where the key-rate bound is positive.
    pub fn weak_random<R: Rng + ?Sized>(
        ancilla_dim: usize,
        strength: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let forward = near_identity_unitary(2 * ancilla_dim, strength, rng);
        let reverse = near_identity_unitary(2 * ancilla_dim, strength, rng);
        Self::new(forward, reverse, ancilla_dim)
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn forward(&self) -> &ComplexOperator {
        &self.forward
    }

    pub fn reverse(&self) -> &ComplexOperator {
        &self.reverse
    }

    /// `V = U_F U_E`, the net action when Bob reflects.
    pub fn round_trip(&self) -> ComplexOperator {
        &self.reverse * &self.forward
    }

    /// `(⟨t| ⊗ I) ψ` for a joint transit/ancilla vector.
    pub(crate) fn ancilla_component(&self, psi: &ComplexVector, t: usize) -> ComplexVector {
        psi.segment(t * self.ancilla_dim, self.ancilla_dim)
    }

    /// `|t⟩ ⊗ |e⟩`.
    fn with_transit(t: usize, e: &ComplexVector) -> ComplexVector {
        ComplexVector::basis(2, t).tensor(e)
    }

    pub fn vectors(&self) -> AttackVectors {
        let d = self.ancilla_dim;
        let ancilla_zero = ComplexVector::basis(d, 0);

        let after_forward: [ComplexVector; 2] =
            std::array::from_fn(|a| self.forward.apply(&Self::with_transit(a, &ancilla_zero)));
        let e: [ComplexVector; 4] =
            std::array::from_fn(|j| self.ancilla_component(&after_forward[j / 2], j % 2));

        let e_return: [[[ComplexVector; 2]; 4]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let out = self.reverse.apply(&Self::with_transit(i, &e[j]));
                std::array::from_fn(|k| self.ancilla_component(&out, k))
            })
        });

        let er = |i: usize, j: usize, k: usize| &e_return[i][j][k];
        let f = [
            er(0, 0, 0) + er(1, 1, 0),
            er(0, 0, 1) + er(1, 1, 1),
            er(0, 2, 0) + er(1, 3, 0),
            er(0, 2, 1) + er(1, 3, 1),
        ];
        let half = C64::new(0.5, 0.0);
        let g = [
            (&(&f[0] + &f[1]) + &(&f[2] + &f[3])).scale(half),
            (&(&f[0] - &f[1]) + &(&f[2] - &f[3])).scale(half),
            (&(&f[0] + &f[1]) - &(&f[2] + &f[3])).scale(half),
            (&(&f[0] - &f[1]) - &(&f[2] - &f[3])).scale(half),
        ];

        AttackVectors { e, e_return, f, g }
    }

    /// The ten observables this attack induces.
    pub fn statistics(&self) -> ChannelStatistics {
        let v = self.vectors();
        // p[i][j][k]: Alice sent i, so Eve's forward vector is e_{2i+j}, and
        // Bob resends j.
        let z = std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| v.e_return(j, 2 * i + j, k).norm_sqr()))
        });
        ChannelStatistics::from_raw(z, v.g[1].norm_sqr(), v.g[2].norm_sqr())
    }

    /// `⟨e_{0,0}^0 | e_{1,3}^1⟩`.
    pub fn overlap_e000_e131(&self) -> C64 {
        let v = self.vectors();
        v.e_return(0, 0, 0).inner(v.e_return(1, 3, 1))
    }

    /// `ρ_BE` on `C^2 (Bob) ⊗ C^{d_E}` after Alice's register is traced out.
    pub fn rho_be(&self) -> ComplexOperator {
        let v = self.vectors();
        let mut rho = ComplexOperator::zeros(2 * self.ancilla_dim);
        for b in 0..2 {
            for j in [b, b + 2] {
                for k in 0..2 {
                    let ket = Self::with_transit(b, v.e_return(b, j, k));
                    rho = &rho + &ComplexOperator::projector(&ket).scale(0.5);
                }
            }
        }
        rho
    }

    /// `ρ_BEC` on `C^2 (Bob) ⊗ C^4 (conditioning) ⊗ C^{d_E}`; see [`Conditioning`].
    pub fn rho_bec(&self) -> ComplexOperator {
        let v = self.vectors();
        let d = self.ancilla_dim;
        let mut rho = ComplexOperator::zeros(8 * d);
        for (b, j, k, label) in Conditioning::TERMS {
            let ket = ComplexVector::basis(2, b)
                .tensor(&ComplexVector::basis(4, label.index()))
                .tensor(v.e_return(b, j, k));
            rho = &rho + &ComplexOperator::projector(&ket).scale(0.5);
        }
        rho
    }

    /// `S(B|E) - H(B|A)` evaluated at this attack (no infimum).
    pub fn exact_collective_rate(&self) -> Result<f64> {
        let rho = self.rho_be();
        let rho_e = partial_trace(&rho, (2, self.ancilla_dim), Subsystem::Second)?;
        let s_b_given_e = von_neumann_entropy(&rho)? - von_neumann_entropy(&rho_e)?;
        Ok(s_b_given_e - h_b_given_a(&self.statistics()))
    }

    /// Worst residual of each family of identities the ancilla vectors obey.
    pub fn identity_residuals(&self) -> IdentityResiduals {
        let v = self.vectors();
        let dev = |z: C64, target: f64| (z - C64::new(target, 0.0)).norm();

        let e = &v.e;
        let forward = dev(e[0].inner(&e[0]) + e[1].inner(&e[1]), 1.0)
            .max(dev(e[2].inner(&e[2]) + e[3].inner(&e[3]), 1.0))
            .max(dev(e[0].inner(&e[2]) + e[1].inner(&e[3]), 0.0));

        let mut reverse = 0.0f64;
        for returned in &v.e_return {
            for (forward_vec, parts) in e.iter().zip(returned) {
                let split = parts[0].norm_sqr() + parts[1].norm_sqr();
                reverse = reverse.max((forward_vec.norm_sqr() - split).abs());
            }
        }

        let f = &v.f;
        let round_trip = dev(f[0].inner(&f[0]) + f[1].inner(&f[1]), 1.0)
            .max(dev(f[2].inner(&f[2]) + f[3].inner(&f[3]), 1.0))
            .max(dev(f[0].inner(&f[2]) + f[1].inner(&f[3]), 0.0));

        // g from projecting V|±,0⟩ onto ⟨±| directly, compared to the
        // f-combinations in `vectors`.
        let vround = self.round_trip();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = ComplexVector::basis(self.ancilla_dim, 0);
        let plus = ComplexVector::from_real(&[s, s]);
        let minus = ComplexVector::from_real(&[s, -s]);
        let mut hadamard = 0.0f64;
        for (input, gs) in [(&plus, [0, 1]), (&minus, [2, 3])] {
            let out = vround.apply(&input.tensor(&zero));
            let c0 = self.ancilla_component(&out, 0);
            let c1 = self.ancilla_component(&out, 1);
            for (bra, g_index) in [(&plus, gs[0]), (&minus, gs[1])] {
                let direct = &c0.scale(bra.as_slice()[0]) + &c1.scale(bra.as_slice()[1]);
                let diff = &direct - &v.g[g_index];
                hadamard = hadamard.max(diff.norm_sqr().sqrt());
            }
        }

        IdentityResiduals {
            forward_unitarity: forward,
            reverse_norm_split: reverse,
            round_trip_unitarity: round_trip,
            hadamard_linearity: hadamard,
        }
    }

    /// Smallest eigenvalue and trace deviation of `ρ_BE` and `ρ_BEC`.
    pub fn state_hygiene(&self) -> Result<StateHygiene> {
        let check = |rho: ComplexOperator| -> Result<(f64, f64)> {
            let min = crate::linalg::hermitian_eigenvalues(&rho)?
                .last()
                .copied()
                .unwrap_or(0.0);
            Ok((min, (rho.trace().re - 1.0).abs()))
        };
        let (be_min, be_trace) = check(self.rho_be())?;
        let (bec_min, bec_trace) = check(self.rho_bec())?;
        Ok(StateHygiene {
            min_eigenvalue: be_min.min(bec_min),
            trace_deviation: be_trace.max(bec_trace),
        })
    }
}

/// Flips the transit qubit with probability `q` and writes a 1 into ancilla
/// qubit `slot` (0 = most significant) when it does. Acts on `T ⊗ A_0 ⊗ A_1`.
///
/// On each pair `{|t, 0⟩, |1-t, 1⟩}` (recording qubit shown) it is the
/// rotation `|t,0⟩ -> c|t,0⟩ + s|1-t,1⟩`, `|1-t,1⟩ -> -s|t,0⟩ + c|1-t,1⟩`.
fn recording_flip(q: f64, slot: usize) -> ComplexOperator {
    let c = (1.0 - q).sqrt();
    let s = q.sqrt();
    let mask = 1 << (1 - slot);
    let mut entries = vec![ZERO; 64];
    for t in 0..2 {
        for anc in 0..4 {
            let col = t * 4 + anc;
            let partner = (1 - t) * 4 + (anc ^ mask);
            let sign = if anc & mask == 0 { 1.0 } else { -1.0 };
            entries[col * 8 + col] = C64::new(c, 0.0);
            entries[partner * 8 + col] = C64::new(sign * s, 0.0);
        }
    }
    ComplexOperator::from_row_slice(8, &entries).expect("8x8")
}

/// Eve's ancilla vectors for one attack, never normalized.
#[derive(Clone, Debug)]
pub struct AttackVectors {
    /// `U_E|0,0⟩ = |0,e0⟩ + |1,e1⟩`, `U_E|1,0⟩ = |0,e2⟩ + |1,e3⟩`.
    pub e: [ComplexVector; 4],
    /// `e_return[i][j][k] = (⟨k| ⊗ I) U_F (|i⟩ ⊗ |e_j⟩)`.
    pub e_return: [[[ComplexVector; 2]; 4]; 2],
    /// `V|0,0⟩ = |0,f0⟩ + |1,f1⟩`, `V|1,0⟩ = |0,f2⟩ + |1,f3⟩`.
    pub f: [ComplexVector; 4],
    /// `V|+,0⟩ = |+,g0⟩ + |−,g1⟩`, `V|−,0⟩ = |+,g2⟩ + |−,g3⟩`.
    pub g: [ComplexVector; 4],
}

impl AttackVectors {
    /// `|e_{i,j}^k⟩`.
    pub fn e_return(&self, i: usize, j: usize, k: usize) -> &ComplexVector {
        &self.e_return[i][j][k]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals {
    pub forward_unitarity: f64,
    pub reverse_norm_split: f64,
    pub round_trip_unitarity: f64,
    pub hadamard_linearity: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.forward_unitarity
            .max(self.reverse_norm_split)
            .max(self.round_trip_unitarity)
            .max(self.hadamard_linearity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateHygiene {
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
}

/// Label of the auxiliary register `C`: whether Alice's and Bob's key bits
/// agree (`Correct`) or not (`Wrong`), and how many times the qubit flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    Correct0,
    Correct1,
    Wrong1,
    Wrong2,
}

impl Conditioning {
    /// Basis index inside `C^4`: `(C,0), (C,1), (W,1), (W,2)`.
    pub fn index(self) -> usize {
        match self {
            Self::Correct0 => 0,
            Self::Correct1 => 1,
            Self::Wrong1 => 2,
            Self::Wrong2 => 3,
        }
    }

    /// `(b, j, k, label)` for every `½ |b⟩⟨b| ⊗ |label⟩⟨label| ⊗ |e_{b,j}^k⟩⟨e_{b,j}^k|` term.
    pub const TERMS: [(usize, usize, usize, Conditioning); 8] = [
        (0, 0, 0, Self::Correct0),
        (0, 0, 1, Self::Wrong1),
        (0, 2, 0, Self::Correct1),
        (0, 2, 1, Self::Wrong2),
        (1, 1, 0, Self::Wrong2),
        (1, 1, 1, Self::Correct1),
        (1, 3, 0, Self::Wrong1),
        (1, 3, 1, Self::Correct0),
    ];
}
