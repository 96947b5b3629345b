//! Estimator update operators: the symmetric rank-k correction, block
//! BFGS/DFP in explicit and inverse form, the inverse-factor update, the
//! correction scaling, and direction-selection strategies. All operators are
//! pure transforms; the solver loop composes them.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, gaussian_block, loewner_bounds, pinv_small, top_k_indices, DirectionBlock,
    SymMatrix, PINV_TOL,
};

/// Condition-number ceiling for the small projected matrices; beyond this the
/// direction block is treated as degenerate and `SingularBlock` is raised so
/// the caller can resample.
const COND_LIMIT: f64 = 1e12;

/// Inputs shared by the dense update operators: current estimator `g`
/// (possibly already correction-scaled), target `a`, and directions `u`.
/// The intended contract `a <= g` (Loewner) is checked in tests, not at
/// runtime.
#[derive(Clone, Copy)]
pub struct UpdateInputs<'a> {
    pub g: &'a SymMatrix,
    pub a: &'a SymMatrix,
    pub u: &'a DirectionBlock,
}

impl<'a> UpdateInputs<'a> {
    pub fn new(g: &'a SymMatrix, a: &'a SymMatrix, u: &'a DirectionBlock) -> Result<Self> {
        if g.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                actual: a.dim(),
            });
        }
        if u.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                actual: u.dim(),
            });
        }
        Ok(UpdateInputs { g, a, u })
    }
}

/// Direction-selection strategy for the rank-k update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Randomized,
    Greedy,
}

#[derive(Clone, Copy, Debug)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub k: usize,
}

/// Inverse of a small symmetric positive definite matrix with an explicit
/// conditioning guard; raises `SingularBlock` for degenerate direction blocks.
fn spd_small_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &l| a.max(l));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &l| a.min(l));
    if !(min > 0.0) || max / min > COND_LIMIT {
        return Err(Error::SingularBlock {
            cond: if min > 0.0 { max / min } else { f64::INFINITY },
        });
    }
    let inv = eig.eigenvalues.map(|l| 1.0 / l);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&inv) * v.transpose())
}

/// Inverse square root of a small SPD matrix, same conditioning guard.
fn spd_small_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &l| a.max(l));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &l| a.min(l));
    if !(min > 0.0) || max / min > COND_LIMIT {
        return Err(Error::SingularBlock {
            cond: if min > 0.0 { max / min } else { f64::INFINITY },
        });
    }
    let inv_sqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&inv_sqrt) * v.transpose())
}

/// Symmetric rank-k update from precomputed residual action
/// `w = (G - A) U`: returns G - W (U^T W)^+ W^T, symmetrized. This is the
/// form the solvers use, since it touches A only through A U.
pub fn sr_k_with_action(g: &SymMatrix, u: &DirectionBlock, w: &DMatrix<f64>) -> SymMatrix {
    let s = u.matrix().transpose() * w;
    let s_pinv = pinv_small(&s, PINV_TOL);
    SymMatrix::from_matrix(g.matrix() - w * s_pinv * w.transpose())
}

/// Symmetric rank-k update: G_+ = G - (G-A)U (U^T(G-A)U)^+ U^T(G-A).
/// The pseudoinverse handles singular projected residuals; when the residual
/// trace is already at rounding level the estimator is returned unchanged.
pub fn sr_k(inputs: &UpdateInputs) -> Result<SymMatrix> {
    let UpdateInputs { g, a, u } = *inputs;
    let residual_trace = g.trace() - a.trace();
    if residual_trace.abs() <= 1e-12 * a.trace().abs().max(f64::MIN_POSITIVE) {
        return Ok(g.clone());
    }
    let w = (g.matrix() - a.matrix()) * u.matrix();
    Ok(sr_k_with_action(g, u, &w))
}

/// Block BFGS from precomputed target action `au = A U`:
/// G_+ = G - GU (U^T G U)^{-1} U^T G + AU (U^T A U)^{-1} (AU)^T.
pub fn block_bfgs_with_action(
    g: &SymMatrix,
    u: &DirectionBlock,
    au: &DMatrix<f64>,
) -> Result<SymMatrix> {
    let gu = g.matrix() * u.matrix();
    let ugu_inv = spd_small_inverse(&(u.matrix().transpose() * &gu))?;
    let uau_inv = spd_small_inverse(&(u.matrix().transpose() * au))?;
    let out = g.matrix() - &gu * ugu_inv * gu.transpose() + au * uau_inv * au.transpose();
    Ok(SymMatrix::from_matrix(out))
}

/// Block BFGS update (explicit form).
pub fn block_bfgs(inputs: &UpdateInputs) -> Result<SymMatrix> {
    let UpdateInputs { g, a, u } = *inputs;
    let au = a.matrix() * u.matrix();
    block_bfgs_with_action(g, u, &au)
}

/// Inverse-form block BFGS from `au = A U`: maintains H = G^{-1} directly,
/// H_+ = U (U^T A U)^{-1} U^T + (I - U (U^T A U)^{-1} (AU)^T) H (...)^T,
/// touching the target only through AU.
pub fn block_bfgs_inverse_with_action(
    h: &SymMatrix,
    u: &DirectionBlock,
    au: &DMatrix<f64>,
) -> Result<SymMatrix> {
    let d = h.dim();
    let uau_inv = spd_small_inverse(&(u.matrix().transpose() * au))?;
    let k_mat = u.matrix() * &uau_inv; // U (U^T A U)^{-1}, d x k
    let j = DMatrix::<f64>::identity(d, d) - &k_mat * au.transpose();
    let out = &k_mat * u.matrix().transpose() + &j * h.matrix() * j.transpose();
    Ok(SymMatrix::from_matrix(out))
}

/// Inverse-form block BFGS on explicit matrices.
pub fn block_bfgs_inverse(h: &SymMatrix, a: &SymMatrix, u: &DirectionBlock) -> Result<SymMatrix> {
    let au = a.matrix() * u.matrix();
    block_bfgs_inverse_with_action(h, u, &au)
}

/// Block DFP from precomputed `au = A U`:
/// G_+ = AU (U^T A U)^{-1} (AU)^T + (I - P) G (I - P)^T with
/// P = AU (U^T A U)^{-1} U^T.
pub fn block_dfp_with_action(
    g: &SymMatrix,
    u: &DirectionBlock,
    au: &DMatrix<f64>,
) -> Result<SymMatrix> {
    let uau_inv = spd_small_inverse(&(u.matrix().transpose() * au))?;
    let k_mat = au * &uau_inv; // AU (U^T A U)^{-1}, d x k
    let gu = g.matrix() * u.matrix();
    let ugu = u.matrix().transpose() * &gu;
    // (I - K U^T) G (I - U K^T) expanded to avoid forming d x d projectors.
    let cross = &k_mat * gu.transpose();
    let mid = g.matrix() - &cross - cross.transpose() + &k_mat * ugu * k_mat.transpose();
    let out = &k_mat * au.transpose() + mid;
    Ok(SymMatrix::from_matrix(out))
}

/// Block DFP update.
pub fn block_dfp(inputs: &UpdateInputs) -> Result<SymMatrix> {
    let UpdateInputs { g, a, u } = *inputs;
    let au = a.matrix() * u.matrix();
    block_dfp_with_action(g, u, &au)
}

/// Inverse-factor update from precomputed `av = A (L^T U)`: given L with
/// L^T L = G^{-1}, returns L_+ with L_+^T L_+ = G_+^{-1} where
/// G_+ = block_bfgs(G, A, L^T U). Closed form:
/// L_+ = L + (U (U^T U)^{-1/2} - L A L^T U S) S (L^T U)^T with
/// S = (U^T L A L^T U)^{-1/2}.
pub fn update_l_with_action(
    l: &DMatrix<f64>,
    u: &DirectionBlock,
    av: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let v = l.transpose() * u.matrix(); // L^T U, d x k
    let s = spd_small_inv_sqrt(&(v.transpose() * av))?; // (V^T A V)^{-1/2}
    let e_inv_sqrt = spd_small_inv_sqrt(&(u.matrix().transpose() * u.matrix()))?;
    let p = u.matrix() * e_inv_sqrt; // U (U^T U)^{-1/2}
    let lav = l * av; // L A L^T U, d x k
    Ok(l + (p - lav * &s) * s * v.transpose())
}

/// Inverse-factor update on an explicit target matrix.
pub fn update_l(l: &DMatrix<f64>, a: &SymMatrix, u: &DirectionBlock) -> Result<DMatrix<f64>> {
    if l.nrows() != a.dim() || u.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: l.nrows(),
        });
    }
    let v = l.transpose() * u.matrix();
    let av = a.matrix() * v;
    update_l_with_action(l, u, &av)
}

/// Correction scaling G~ = (1 + m r) G.
pub fn correct(g: &SymMatrix, m_const: f64, r: f64) -> SymMatrix {
    assert!(m_const >= 0.0 && r >= 0.0);
    SymMatrix::from_matrix(g.matrix() * (1.0 + m_const * r))
}

/// Factor counterpart L~ = L / sqrt(1 + m r), so L~^T L~ = ((1 + m r) G)^{-1}.
pub fn correct_factor(l: &DMatrix<f64>, m_const: f64, r: f64) -> DMatrix<f64> {
    assert!(m_const >= 0.0 && r >= 0.0);
    l / (1.0 + m_const * r).sqrt()
}

/// Selects a direction block: Gaussian sketch for the randomized strategy,
/// basis columns of the k largest residual-diagonal entries for the greedy
/// strategy. If every residual diagonal entry is non-positive (possible only
/// through rounding once the estimator dominates the target), the k lowest
/// indices are chosen as a documented fallback.
pub fn pick_directions<R: Rng + ?Sized>(
    strategy: Strategy,
    residual_diag: Option<&[f64]>,
    d: usize,
    rng: &mut R,
) -> Result<DirectionBlock> {
    if strategy.k < 1 || strategy.k > d {
        return Err(Error::InvalidConfig(format!(
            "block width must satisfy 1 <= k <= d, got k = {}, d = {}",
            strategy.k, d
        )));
    }
    match strategy.kind {
        StrategyKind::Randomized => Ok(gaussian_block(d, strategy.k, rng)),
        StrategyKind::Greedy => {
            let diag = residual_diag.ok_or(Error::MissingResidualDiag)?;
            if diag.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: diag.len(),
                });
            }
            let degenerate = diag.iter().all(|&x| x <= 0.0);
            let idx = if degenerate {
                (0..strategy.k).collect::<Vec<_>>()
            } else {
                top_k_indices(diag, strategy.k)
            };
            DirectionBlock::basis(d, &idx)
        }
    }
}

/// Trace residual tau_A(G) = tr(G - A).
pub fn tau(g: &SymMatrix, a: &SymMatrix) -> Result<f64> {
    if g.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: g.dim(),
        });
    }
    Ok(g.trace() - a.trace())
}

/// Relative trace residual sigma_A(G) = tr(A^{-1}(G - A)).
pub fn sigma(g: &SymMatrix, a: &SymMatrix) -> Result<f64> {
    if g.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: g.dim(),
        });
    }
    let f = cholesky(a)?;
    let x = f.solve_block(&(g.matrix() - a.matrix()))?;
    Ok(x.trace())
}

/// Seeded test-instance distribution shared by the Monte-Carlo sweeps and the
/// property suites: A = Q diag(spectrum) Q^T with Q a random orthogonal
/// matrix and a log-uniform spectrum covering [1, kappa] (both endpoints
/// exact); G = A + c B B^T with c chosen so the tightest upper sandwich
/// constant is exactly eta, i.e. A <= G <= eta A.
pub fn random_instance<R: Rng + ?Sized>(
    d: usize,
    kappa: f64,
    eta: f64,
    rng: &mut R,
) -> (SymMatrix, SymMatrix) {
    assert!(d >= 2 && kappa >= 1.0 && eta > 1.0);
    // Random orthogonal Q: QR of a Gaussian matrix with R's diagonal signs
    // folded into Q to make the distribution Haar.
    let raw = gaussian_block(d, d, rng).matrix().clone();
    let qr = raw.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    let mut spectrum = DVector::<f64>::zeros(d);
    spectrum[0] = 1.0;
    spectrum[d - 1] = kappa;
    for i in 1..d - 1 {
        let t: f64 = rng.random();
        spectrum[i] = kappa.powf(t);
    }
    let a = SymMatrix::from_matrix(&q * DMatrix::from_diagonal(&spectrum) * q.transpose());

    let b = gaussian_block(d, d, rng);
    let bbt = SymMatrix::from_matrix(b.matrix() * b.matrix().transpose());
    let (_, top) = loewner_bounds(&bbt, &a).expect("A is SPD by construction");
    let c = (eta - 1.0) / top;
    let g = SymMatrix::from_matrix(a.matrix() + bbt.matrix() * c);
    (a, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag2(a: f64, b: f64) -> SymMatrix {
        SymMatrix::from_diagonal(&DVector::from_vec(vec![a, b]))
    }

    fn e1(d: usize) -> DirectionBlock {
        DirectionBlock::basis(d, &[0]).unwrap()
    }

    #[test]
    fn sr_k_fixed_point() {
        let a = diag2(2.0, 3.0);
        let inputs = UpdateInputs::new(&a, &a, &e1(2)).unwrap();
        let out = sr_k(&inputs).unwrap();
        assert_abs_diff_eq!(out.matrix(), a.matrix(), epsilon = 1e-14);
    }

    #[test]
    fn sr_k_hand_example() {
        let a = SymMatrix::identity(2);
        let g = diag2(2.0, 3.0);
        let inputs = UpdateInputs::new(&g, &a, &e1(2)).unwrap();
        let out = sr_k(&inputs).unwrap();
        assert_abs_diff_eq!(out.matrix(), diag2(1.0, 3.0).matrix(), epsilon = 1e-14);
    }

    #[test]
    fn sr_k_full_block_recovers_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, g) = random_instance(6, 10.0, 2.0, &mut rng);
        let u = DirectionBlock::from_matrix(DMatrix::identity(6, 6)).unwrap();
        let inputs = UpdateInputs::new(&g, &a, &u).unwrap();
        let out = sr_k(&inputs).unwrap();
        assert!((out.matrix() - a.matrix()).norm() < 1e-8 * a.matrix().norm());
    }

    #[test]
    fn sr_k_interpolates_on_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, g) = random_instance(8, 10.0, 2.0, &mut rng);
        let u = gaussian_block(8, 3, &mut rng);
        let inputs = UpdateInputs::new(&g, &a, &u).unwrap();
        let out = sr_k(&inputs).unwrap();
        let lhs = u.matrix().transpose() * out.matrix() * u.matrix();
        let rhs = u.matrix().transpose() * a.matrix() * u.matrix();
        assert!((lhs - &rhs).norm() < 1e-8 * rhs.norm());
    }

    #[test]
    fn bfgs_fixed_point_and_hand_example() {
        let a = SymMatrix::identity(2);
        let fixed = block_bfgs(&UpdateInputs::new(&a, &a, &e1(2)).unwrap()).unwrap();
        assert_abs_diff_eq!(fixed.matrix(), a.matrix(), epsilon = 1e-14);

        let g = SymMatrix::scaled_identity(2, 2.0);
        let out = block_bfgs(&UpdateInputs::new(&g, &a, &e1(2)).unwrap()).unwrap();
        assert_abs_diff_eq!(out.matrix(), diag2(1.0, 2.0).matrix(), epsilon = 1e-14);
    }

    #[test]
    fn bfgs_full_block_recovers_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, g) = random_instance(5, 10.0, 2.0, &mut rng);
        let u = DirectionBlock::from_matrix(DMatrix::identity(5, 5)).unwrap();
        let out = block_bfgs(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap();
        assert!((out.matrix() - a.matrix()).norm() < 1e-9 * a.matrix().norm());
    }

    #[test]
    fn bfgs_inverse_hand_example() {
        let a = SymMatrix::identity(2);
        let h = SymMatrix::scaled_identity(2, 0.5); // G = 2I
        let out = block_bfgs_inverse(&h, &a, &e1(2)).unwrap();
        assert_abs_diff_eq!(out.matrix(), diag2(1.0, 0.5).matrix(), epsilon = 1e-14);
    }

    #[test]
    fn bfgs_inverse_matches_explicit_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, g) = random_instance(8, 10.0, 2.0, &mut rng);
        let u = gaussian_block(8, 3, &mut rng);
        let h = cholesky(&g).unwrap().inverse();
        let hplus = block_bfgs_inverse(&h, &a, &u).unwrap();
        let gplus = block_bfgs(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap();
        let prod = hplus.matrix() * gplus.matrix();
        assert!((prod - DMatrix::<f64>::identity(8, 8)).norm() < 1e-6);
    }

    #[test]
    fn dfp_fixed_point_and_hand_example() {
        let a = SymMatrix::identity(2);
        let fixed = block_dfp(&UpdateInputs::new(&a, &a, &e1(2)).unwrap()).unwrap();
        assert_abs_diff_eq!(fixed.matrix(), a.matrix(), epsilon = 1e-14);

        let g = SymMatrix::scaled_identity(2, 2.0);
        let out = block_dfp(&UpdateInputs::new(&g, &a, &e1(2)).unwrap()).unwrap();
        assert_abs_diff_eq!(out.matrix(), diag2(1.0, 2.0).matrix(), epsilon = 1e-14);
    }

    #[test]
    fn dfp_full_block_recovers_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, g) = random_instance(5, 10.0, 2.0, &mut rng);
        let u = DirectionBlock::from_matrix(DMatrix::identity(5, 5)).unwrap();
        let out = block_dfp(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap();
        assert!((out.matrix() - a.matrix()).norm() < 1e-9 * a.matrix().norm());
    }

    #[test]
    fn bfgs_dfp_satisfy_block_secant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (a, g) = random_instance(7, 10.0, 2.0, &mut rng);
        let u = gaussian_block(7, 2, &mut rng);
        for out in [
            block_bfgs(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap(),
            block_dfp(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap(),
        ] {
            let lhs = out.matrix() * u.matrix();
            let rhs = a.matrix() * u.matrix();
            assert!((lhs - &rhs).norm() < 1e-8 * rhs.norm());
        }
    }

    #[test]
    fn update_l_hand_example() {
        // d = 2, A = I, G = 2I, l = I/sqrt(2), u = e1:
        // directions l^T u, block_bfgs gives diag(1,2); the factor product
        // must equal diag(1, 1/2).
        let a = SymMatrix::identity(2);
        let l = DMatrix::<f64>::identity(2, 2) / 2.0_f64.sqrt();
        let lplus = update_l(&l, &a, &e1(2)).unwrap();
        let prod = lplus.transpose() * &lplus;
        assert_abs_diff_eq!(prod, diag2(1.0, 0.5).matrix().clone(), epsilon = 1e-12);
    }

    #[test]
    fn update_l_factor_consistency_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, g) = random_instance(10, 10.0, 2.0, &mut rng);
        let u = gaussian_block(10, 3, &mut rng);
        let l = cholesky(&g).unwrap().inverse_lower();
        let lplus = update_l(&l, &a, &u).unwrap();

        let v = DirectionBlock::from_matrix(l.transpose() * u.matrix()).unwrap();
        let gplus = block_bfgs(&UpdateInputs::new(&g, &a, &v).unwrap()).unwrap();
        let ginv = cholesky(&gplus).unwrap().inverse();
        let err = (lplus.transpose() * &lplus - ginv.matrix()).norm() / ginv.matrix().norm();
        assert!(err < 1e-6, "factor consistency error {err}");
    }

    #[test]
    fn correct_and_correct_factor() {
        let g = SymMatrix::identity(2);
        assert_abs_diff_eq!(
            correct(&g, 1.0, 0.5).matrix(),
            SymMatrix::scaled_identity(2, 1.5).matrix(),
            epsilon = 0.0
        );
        assert_abs_diff_eq!(correct(&g, 0.0, 3.0).matrix(), g.matrix(), epsilon = 0.0);
        assert_abs_diff_eq!(correct(&g, 5.0, 0.0).matrix(), g.matrix(), epsilon = 0.0);

        let l = DMatrix::<f64>::identity(3, 3);
        assert_abs_diff_eq!(
            correct_factor(&l, 3.0, 1.0),
            DMatrix::identity(3, 3) / 2.0,
            epsilon = 1e-15
        );

        // Product check on a random instance.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (_, g) = random_instance(6, 10.0, 2.0, &mut rng);
        let l = cholesky(&g).unwrap().inverse_lower();
        let lt = correct_factor(&l, 2.0, 0.7);
        let gt = correct(&g, 2.0, 0.7);
        let prod = lt.transpose() * &lt * gt.matrix();
        assert!((prod - DMatrix::<f64>::identity(6, 6)).norm() < 1e-10);
    }

    #[test]
    fn pick_directions_greedy_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let greedy = Strategy {
            kind: StrategyKind::Greedy,
            k: 2,
        };
        let u = pick_directions(greedy, Some(&[3.0, 1.0, 2.0]), 3, &mut rng).unwrap();
        assert_eq!(u.matrix().column(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(u.matrix().column(1).as_slice(), &[0.0, 0.0, 1.0]);

        assert!(matches!(
            pick_directions(greedy, None, 3, &mut rng),
            Err(Error::MissingResidualDiag)
        ));

        // Degenerate residual falls back to the lowest indices.
        let u = pick_directions(greedy, Some(&[-1e-18, -2e-18, -1e-18]), 3, &mut rng).unwrap();
        assert_eq!(u.matrix().column(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(u.matrix().column(1).as_slice(), &[0.0, 1.0, 0.0]);

        let rand_strat = Strategy {
            kind: StrategyKind::Randomized,
            k: 1,
        };
        let mut r1 = ChaCha8Rng::seed_from_u64(12);
        let mut r2 = ChaCha8Rng::seed_from_u64(12);
        let u1 = pick_directions(rand_strat, None, 4, &mut r1).unwrap();
        let u2 = pick_directions(rand_strat, None, 4, &mut r2).unwrap();
        assert_eq!(u1.matrix(), u2.matrix());
    }

    #[test]
    fn tau_and_sigma_values() {
        let a = SymMatrix::identity(2);
        assert_eq!(tau(&a, &a).unwrap(), 0.0);
        assert_eq!(tau(&diag2(2.0, 3.0), &a).unwrap(), 3.0);

        let a2 = SymMatrix::scaled_identity(2, 2.0);
        let g2 = SymMatrix::scaled_identity(2, 4.0);
        assert_abs_diff_eq!(sigma(&g2, &a2).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sigma(&a2, &a2).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn tau_drop_after_greedy_step() {
        let a = SymMatrix::identity(2);
        let g = diag2(2.0, 3.0);
        let resid: Vec<f64> = (g.diagonal() - a.diagonal()).iter().copied().collect();
        let idx = top_k_indices(&resid, 1);
        let u = DirectionBlock::basis(2, &idx).unwrap();
        let out = sr_k(&UpdateInputs::new(&g, &a, &u).unwrap()).unwrap();
        assert_abs_diff_eq!(tau(&out, &a).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn instance_distribution_respects_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for eta in [1.5, 4.0] {
            let (a, g) = random_instance(10, 50.0, eta, &mut rng);
            let (lo, hi) = loewner_bounds(&g, &a).unwrap();
            assert!(lo >= 1.0 - 1e-9, "lower bound {lo}");
            assert!(hi <= eta + 1e-8, "upper bound {hi} vs eta {eta}");
            assert!(hi >= eta - 1e-6, "upper bound should be tight, got {hi}");
        }
    }

    #[test]
    fn sigma_bounded_by_dimension_times_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (a, g) = random_instance(8, 20.0, 4.0, &mut rng);
        let s = sigma(&g, &a).unwrap();
        assert!(s <= 8.0 * 3.0 + 1e-9, "sigma {s}");
        assert!(s > 0.0);
    }
}
