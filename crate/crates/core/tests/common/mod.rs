//! Reference implementations used only to check the library: slow, direct,
//! and sharing no code with it.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqkd::linalg::{ComplexOperator, C64};
use sqkd::{ChannelStatistics, CollectiveAttack};

pub const SUITE_DIMS: [usize; 3] = [1, 2, 4];

/// Attack number `n` of the seeded suite: ancilla dimensions cycle through
/// [`SUITE_DIMS`], even entries are near-identity (mostly positive bound),
/// odd entries are Haar-random.
pub fn suite_attack(n: u64) -> CollectiveAttack {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n);
    let d = SUITE_DIMS[(n as usize / 2) % SUITE_DIMS.len()];
    if n.is_multiple_of(2) {
        let strength = rng.random_range(0.02..0.6);
        CollectiveAttack::weak_random(d, strength, &mut rng).unwrap()
    } else {
        CollectiveAttack::haar_random(d, &mut rng).unwrap()
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Cyclic Jacobi on a real symmetric matrix, eigenvalues sorted descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Eigenvalues of a Hermitian matrix through its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is the original one doubled.
pub fn hermitian_eigenvalues_oracle(m: &ComplexOperator) -> Vec<f64> {
    let n = m.dim();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            big[i][j] = z.re;
            big[i + n][j + n] = z.re;
            big[i][j + n] = -z.im;
            big[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(big).into_iter().step_by(2).collect()
}

/// Partial trace by explicit index sums over `(a, b)` with `a` the first factor.
pub fn partial_trace_oracle(
    m: &ComplexOperator,
    da: usize,
    db: usize,
    keep_first: bool,
) -> Vec<Vec<C64>> {
    let at = |a: usize, b: usize, a2: usize, b2: usize| m.get(a * db + b, a2 * db + b2);
    if keep_first {
        (0..da)
            .map(|a| {
                (0..da)
                    .map(|a2| (0..db).map(|b| at(a, b, a2, b)).sum())
                    .collect()
            })
            .collect()
    } else {
        (0..db)
            .map(|b| {
                (0..db)
                    .map(|b2| (0..da).map(|a| at(a, b, a, b2)).sum())
                    .collect()
            })
            .collect()
    }
}

fn xlog(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln() / std::f64::consts::LN_2
    }
}

fn entropy(ps: &[f64]) -> f64 {
    ps.iter().map(|&p| xlog(p)).sum()
}

/// `p(b, a)` by enumerating every Z-basis, measure-resend event.
pub fn joint_oracle(s: &ChannelStatistics) -> [[f64; 2]; 2] {
    let mut joint = [[0.0; 2]; 2];
    for sent in 0..2 {
        for bob in 0..2 {
            for alice in 0..2 {
                joint[bob][alice] += 0.5 * s.p(sent, bob, alice);
            }
        }
    }
    joint
}

/// The key-rate bound written out from scratch: four conditioning classes,
/// one of them bounded through its largest eigenvalue, the rest by one bit.
pub fn rate_oracle(s: &ChannelStatistics) -> Option<f64> {
    let p = |i, j, k| s.p(i, j, k);
    let pairs = [
        (0, 0, 0, 1, 0, 1),
        (0, 1, 0, 1, 0, 1),
        (0, 1, 0, 1, 1, 1),
        (0, 0, 1, 1, 0, 0),
        (0, 0, 1, 1, 1, 0),
        (0, 1, 1, 1, 0, 0),
        (0, 1, 1, 1, 1, 0),
    ];
    let mut b = 1.0 - s.p_plus_minus() - s.p_minus_plus();
    for (a1, a2, a3, b1, b2, b3) in pairs {
        b -= (p(a1, a2, a3) * p(b1, b2, b3)).sqrt();
    }
    let overlap_sq = if b > 0.0 { b * b } else { 0.0 };
    let (x, y) = (p(0, 0, 0), p(1, 1, 1));
    if x <= 0.0 {
        return None;
    }
    let lambda = (0.5 + ((x - y).powi(2) + 4.0 * overlap_sq).sqrt() / (2.0 * (x + y))).min(1.0);

    let mut cells = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                cells.push(p(i, j, k) / 2.0);
            }
        }
    }
    let s_bec = entropy(&cells);

    let t = [
        (x + y) / 2.0,
        (p(1, 0, 0) + p(0, 1, 1)) / 2.0,
        (p(0, 0, 1) + p(1, 1, 0)) / 2.0,
        (p(1, 0, 1) + p(0, 1, 0)) / 2.0,
    ];
    let s_ec = entropy(&t) + t[1] + t[2] + t[3] + t[0] * (xlog(lambda) + xlog(1.0 - lambda));

    let joint = joint_oracle(s);
    let flat = [joint[0][0], joint[0][1], joint[1][0], joint[1][1]];
    let alice = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let h_b_given_a = entropy(&flat) - entropy(&alice);
    Some(s_bec - s_ec - h_b_given_a)
}
