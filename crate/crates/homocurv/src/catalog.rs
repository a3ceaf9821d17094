//! Built-in example spaces with their reference metric sequences.

use nalgebra::DMatrix;

use crate::asymptotics::SequenceSpec;
use crate::isotypic::Decomposition;
use crate::lie::{BracketEntry, LieAlgebra, Subspace};
use crate::space::{space, HomogeneousSpace};

/// `su(2)` with `Q = -½Tr` and the orthonormal basis `(X1, X2, X3)`:
/// `[X1,X2] = -2X3`, `[X2,X3] = -2X1`, `[X3,X1] = -2X2`.
pub fn su2_algebra() -> LieAlgebra {
    LieAlgebra::new(
        "su2",
        3,
        &[
            BracketEntry { i: 0, j: 1, k: 2, c: -2.0 },
            BracketEntry { i: 1, j: 2, k: 0, c: -2.0 },
            BracketEntry { i: 0, j: 2, k: 1, c: 2.0 },
        ],
    )
    .expect("static spec")
}

/// `so(5)` with `Q = -½Tr`, derived by expanding commutators of the skew
/// matrix basis `(E, X1, ..., X9)` built from elementary antisymmetric
/// matrices. Indices follow the standard 3-frame ordering: `E` spans the
/// isotropy `so(2)` in the (4,5)-plane.
pub fn so5_algebra() -> LieAlgebra {
    let mats: Vec<DMatrix<f64>> = so5_index_pairs()
        .iter()
        .map(|&(a, b)| skew_unit(5, a, b))
        .collect();
    LieAlgebra::from_matrix_basis("so5", &mats).expect("static matrix basis")
}

/// 1-based plane indices of the basis elements `E, X1..X9` of `so(5)`:
/// each generates the rotation of one coordinate plane.
fn so5_index_pairs() -> [(usize, usize); 10] {
    [
        (5, 4), // E
        (3, 2), // X1
        (4, 3), // X2
        (5, 3), // X3
        (4, 2), // X4
        (5, 2), // X5
        (4, 1), // X6
        (5, 1), // X7
        (3, 1), // X8
        (2, 1), // X9
    ]
}

/// Skew matrix with `+1` at (a, b) and `-1` at (b, a), 1-based indices.
fn skew_unit(n: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(a - 1, b - 1)] = 1.0;
    m[(b - 1, a - 1)] = -1.0;
    m
}

/// `u(1) ⊕ su(2)` with orthonormal basis `(E, X1, X2, X3)`: `E` central and
/// the `su(2)` relations as above.
pub fn s1xs2_algebra() -> LieAlgebra {
    LieAlgebra::new(
        "u1+su2",
        4,
        &[
            BracketEntry { i: 1, j: 2, k: 3, c: -2.0 },
            BracketEntry { i: 2, j: 3, k: 1, c: -2.0 },
            BracketEntry { i: 1, j: 3, k: 2, c: 2.0 },
        ],
    )
    .expect("static spec")
}

/// The 3-sphere `SU(2)` with trivial isotropy and the two-block split
/// `(span X1, span{X2, X3})` that carries the canonical variation of the
/// round metric along the Hopf fibration.
pub fn su2_berger() -> HomogeneousSpace {
    let alg = su2_algebra();
    let dec = Decomposition::new(DMatrix::identity(3, 3), vec![1, 2]).expect("static basis");
    space("su2_berger", alg, Subspace::zero(3), Some(dec), true).expect("static space")
}

/// The Stiefel manifold of orthonormal 3-frames in R⁵, `SO(5)/SO(2)`, with
/// the six-block decomposition of the complement.
pub fn so5_stiefel() -> HomogeneousSpace {
    let alg = so5_algebra();
    let h = Subspace::from_axes(10, &[0], "so(2)");
    let mut basis = DMatrix::zeros(10, 9);
    for (col, axis) in (1..10).enumerate() {
        basis[(axis, col)] = 1.0;
    }
    let dec = Decomposition::new(basis, vec![1, 2, 2, 2, 1, 1]).expect("static basis");
    space("so5_stiefel", alg, h, Some(dec), true).expect("static space")
}

/// `S¹ × S²` as `(U(1) × SU(2)) / U(1)` with the circle factor in the
/// complement; the only catalog space with infinite fundamental group.
pub fn s1xs2() -> HomogeneousSpace {
    let alg = s1xs2_algebra();
    let h = Subspace::from_axes(4, &[1], "u(1)");
    let mut basis = DMatrix::zeros(4, 3);
    basis[(0, 0)] = 1.0;
    basis[(2, 1)] = 1.0;
    basis[(3, 2)] = 1.0;
    let dec = Decomposition::new(basis, vec![1, 2]).expect("static basis");
    space("s1xs2", alg, h, Some(dec), false).expect("static space")
}

/// All built-in spaces.
pub fn catalog() -> Vec<HomogeneousSpace> {
    vec![su2_berger(), so5_stiefel(), s1xs2()]
}

/// Look up a built-in space by name.
pub fn by_name(name: &str) -> Option<HomogeneousSpace> {
    match name {
        "su2_berger" => Some(su2_berger()),
        "so5_stiefel" => Some(so5_stiefel()),
        "s1xs2" => Some(s1xs2()),
        _ => None,
    }
}

/// The reference diverging sequence of a built-in space, if it has one:
///
/// - `so5_stiefel`: `λ = (1/(4n⁴), 1, 1, n, 2n, 2n)` — diverges with bounded
///   curvature and scalar curvature converging to 7;
/// - `s1xs2`: `λ = (1/n², n)` — diverges with bounded curvature, not
///   algebraically collapsed;
/// - `su2_berger`: `λ = (1/n², n)` — the Berger collapse re-parameterized as
///   a power law.
pub fn reference_sequence(name: &str) -> Option<SequenceSpec> {
    match name {
        "so5_stiefel" => Some(SequenceSpec::power_law(
            vec![0.25, 1.0, 1.0, 1.0, 2.0, 2.0],
            vec![-4.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            true,
        )),
        "s1xs2" | "su2_berger" => {
            Some(SequenceSpec::power_law(vec![1.0, 1.0], vec![-2.0, 1.0], true))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_spaces_build_and_have_expected_blocks() {
        let berger = su2_berger();
        assert_eq!(berger.block_dims(), &[1, 2]);
        let stiefel = so5_stiefel();
        assert_eq!(stiefel.block_dims(), &[1, 2, 2, 2, 1, 1]);
        assert_eq!(stiefel.dim_m(), 9);
        let s1s2 = s1xs2();
        assert_eq!(s1s2.block_dims(), &[1, 2]);
        assert!(!s1s2.pi1_finite());
        assert!(stiefel.pi1_finite());
    }

    #[test]
    fn so5_brackets_match_hand_expansion() {
        // independent check of a few commutators against the matrix algebra
        let alg = so5_algebra();
        let e = |i: usize| {
            let mut v = nalgebra::DVector::zeros(10);
            v[i] = 1.0;
            v
        };
        // [X1, X2] = -X4
        let b = alg.bracket(&e(1), &e(2)).unwrap();
        assert!((b + e(4)).norm() < 1e-12);
        // [X2, X3] = E
        let b = alg.bracket(&e(2), &e(3)).unwrap();
        assert!((b - e(0)).norm() < 1e-12);
        // [X1, X8] = -X9
        let b = alg.bracket(&e(1), &e(8)).unwrap();
        assert!((b + e(9)).norm() < 1e-12);
        // [E, X8] = 0
        let b = alg.bracket(&e(0), &e(8)).unwrap();
        assert!(b.norm() < 1e-12);
    }

    #[test]
    fn stiefel_killing_is_six_q_on_blocks() {
        let alg = so5_algebra();
        let b = alg.killing_form();
        let expected = DMatrix::<f64>::identity(10, 10) * -6.0;
        assert!((b - expected).norm() < 1e-12);
    }

    #[test]
    fn reference_sequences_have_unit_volume() {
        for name in ["so5_stiefel", "s1xs2", "su2_berger"] {
            let space = by_name(name).unwrap();
            let seq = reference_sequence(name).unwrap();
            let dims = space.block_dims();
            for n in [1.0, 2.0, 5.0] {
                let lambdas = seq.lambdas_at(n);
                let vol: f64 = lambdas
                    .iter()
                    .zip(dims)
                    .map(|(&l, &d)| l.powi(d as i32))
                    .product();
                assert!((vol - 1.0).abs() < 1e-12);
            }
        }
    }
}
