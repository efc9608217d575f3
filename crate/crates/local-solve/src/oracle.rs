//! Dense ground-truth computations used by tests and the `oracle` CLI
//! subcommand: dense solves, spectral quantities, Neumann partial sums,
//! brute-force walk enumeration, and the expected single-update operator.
//!
//! These deliberately share no kernels with [`crate::sparse`]; everything
//! here goes through dense `nalgebra` arithmetic so agreement tests against
//! the sparse implementation are meaningful.

use nalgebra::{DMatrix, DVector};

use crate::sparse::{SparseMatrix, SparseVector};
use crate::system::{FixedPointSystem, LinearSystem};
use crate::{Error, Result};

/// Dense solution with a verified residual.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub method: &'static str,
}

/// Dense spectral quantities of a matrix.
#[derive(Debug, Clone, Copy)]
pub struct Spectral {
    pub spectral_radius: f64,
    pub operator_norm_2: f64,
    /// `λ_max/λ_min` when the input is symmetric positive definite.
    pub condition_number: Option<f64>,
}

fn to_dmatrix(m: &SparseMatrix) -> DMatrix<f64> {
    let n = m.n();
    let mut out = DMatrix::zeros(n, n);
    for u in 0..n {
        for &(c, v) in m.row(u) {
            out[(u, c)] = v;
        }
    }
    out
}

const DESK_SCALE_SOLVE: usize = 5000;
const DESK_SCALE_SPECTRAL: usize = 500;

/// Solve `(I - G)x = z` densely via LU with partial pivoting.
pub fn dense_solve_fixed_point(system: &FixedPointSystem) -> Result<DenseSolution> {
    let n = system.n();
    assert!(n <= DESK_SCALE_SOLVE, "oracle solve limited to n <= {DESK_SCALE_SOLVE}");
    let a = DMatrix::identity(n, n) - to_dmatrix(&system.g);
    let b = DVector::from_column_slice(&system.z);
    dense_solve_inner(a, b, "lu_fixed_point")
}

/// Solve `Ax = b` densely via LU with partial pivoting.
pub fn dense_solve_linear(system: &LinearSystem) -> Result<DenseSolution> {
    let n = system.a.n();
    assert!(n <= DESK_SCALE_SOLVE, "oracle solve limited to n <= {DESK_SCALE_SOLVE}");
    let a = to_dmatrix(&system.a);
    let b = DVector::from_column_slice(&system.b);
    dense_solve_inner(a, b, "lu_linear")
}

fn dense_solve_inner(a: DMatrix<f64>, b: DVector<f64>, method: &'static str) -> Result<DenseSolution> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lu = a.clone().lu();
    let x = lu
        .solve(&b)
        .ok_or(Error::Singular { pivot: 0.0, col: 0 })?;
    // reject near-singular systems that LU formally "solved"
    let min_pivot = (0..a.nrows())
        .map(|i| lu.u()[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if min_pivot < 1e-14 * scale.max(1.0) {
        return Err(Error::Singular { pivot: min_pivot, col: 0 });
    }
    let residual_norm = (&a * &x - &b).norm();
    Ok(DenseSolution { x: x.as_slice().to_vec(), residual_norm, method })
}

/// Spectral radius, operator 2-norm, and (for symmetric PD input) the
/// condition number, all from dense eigendecompositions.
pub fn dense_spectral(m: &SparseMatrix) -> Spectral {
    let n = m.n();
    assert!(n <= DESK_SCALE_SPECTRAL, "oracle spectral limited to n <= {DESK_SCALE_SPECTRAL}");
    let a = to_dmatrix(m);
    let spectral_radius = spectral_radius_dense(&a);
    let operator_norm_2 = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let symmetric = (0..n).all(|i| (0..n).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= 1e-12));
    let condition_number = if symmetric {
        let eig = a.symmetric_eigen().eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min > 0.0 {
            Some(max / min)
        } else {
            None
        }
    } else {
        None
    };
    Spectral { spectral_radius, operator_norm_2, condition_number }
}

/// Largest eigenvalue modulus. Uses a Schur decomposition with a bounded
/// iteration count: `complex_eigenvalues` runs Schur with no iteration cap
/// and can cycle forever on rare inputs. When Schur does not converge, fall
/// back to Gelfand's formula `ρ(A) = lim ‖A^k‖^(1/k)` evaluated by repeated
/// squaring, which is slightly less accurate but never diverges.
fn spectral_radius_dense(a: &DMatrix<f64>) -> f64 {
    if let Some(schur) = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 100_000) {
        return schur
            .complex_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, ev| acc.max(ev.norm()));
    }
    gelfand_spectral_radius(a)
}

/// `‖A^k‖_F^(1/k)` for `k = 2^13`, with rescaling after each squaring so the
/// powers neither overflow nor underflow. The relative error of Gelfand's
/// formula at this `k` is on the order of `ln(n)/k`.
fn gelfand_spectral_radius(a: &DMatrix<f64>) -> f64 {
    let mut p = a.clone();
    // invariant: A^k = p * exp(log_scale)
    let mut log_scale = 0.0f64;
    let mut k = 1.0f64;
    for _ in 0..13 {
        let norm = p.norm();
        if norm == 0.0 {
            return 0.0;
        }
        log_scale += norm.ln();
        p /= norm;
        p = &p * &p;
        log_scale *= 2.0;
        k *= 2.0;
    }
    let norm = p.norm();
    if norm == 0.0 {
        return 0.0;
    }
    ((log_scale + norm.ln()) / k).exp()
}

/// `zᵀ Σ_{k=0}^{K} (Gᵀ)^k e_i` by repeated dense multiplication.
pub fn neumann_partial_sum(system: &FixedPointSystem, i: usize, terms: usize) -> f64 {
    let n = system.n();
    assert!(n <= DESK_SCALE_SPECTRAL);
    let gt = to_dmatrix(&system.g).transpose();
    let z = DVector::from_column_slice(&system.z);
    let mut r = DVector::zeros(n);
    r[i] = 1.0;
    let mut sum = 0.0;
    for _ in 0..=terms {
        sum += z.dot(&r);
        r = &gt * r;
    }
    sum
}

/// Dense `(Gᵀ)^t e_i`.
pub fn dense_residual_power(system: &FixedPointSystem, i: usize, t: usize) -> Vec<f64> {
    let gt = to_dmatrix(&system.g).transpose();
    let mut r = DVector::zeros(system.n());
    r[i] = 1.0;
    for _ in 0..t {
        r = &gt * r;
    }
    r.as_slice().to_vec()
}

/// Sum over all walks of length at most `max_len` starting at node `i` of
/// `Π_edges G_e · z_endpoint`, by explicit depth-first enumeration with a
/// hard expansion budget.
pub fn walk_sum_bruteforce(
    system: &FixedPointSystem,
    i: usize,
    max_len: usize,
    budget: usize,
) -> Result<f64> {
    let g = &system.g;
    let z = &system.z;
    let mut expansions: usize = 0;
    let mut sum = 0.0;
    // stack of (node, walk weight so far, remaining length)
    let mut stack = vec![(i, 1.0f64, max_len)];
    while let Some((node, weight, remaining)) = stack.pop() {
        sum += weight * z[node];
        if remaining == 0 {
            continue;
        }
        for &(next, gval) in g.row(node) {
            expansions += 1;
            if expansions > budget {
                return Err(Error::EnumerationBudget { budget });
            }
            stack.push((next, weight * gval, remaining - 1));
        }
    }
    Ok(sum)
}

/// One-step expected residual `(I − (I − Gᵀ)/denom) r`, computed densely.
/// With `denom = ‖r‖₀` this is the uniform-censored expectation; with
/// `denom = min(td, n)` the padded-sampler expectation.
pub fn expected_update(r: &SparseVector, g: &SparseMatrix, denom: usize) -> Result<Vec<f64>> {
    if denom < r.nnz() {
        return Err(Error::InvalidParam(format!(
            "denom {} smaller than residual support {}",
            denom,
            r.nnz()
        )));
    }
    let n = g.n();
    if r.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: r.dim() });
    }
    let gt = to_dmatrix(g).transpose();
    let rd = DVector::from_column_slice(&r.to_dense());
    let m = DMatrix::identity(n, n) - (DMatrix::identity(n, n) - gt) / denom as f64;
    Ok((m * rd).as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::FixedPointSystem;

    fn two_cycle_bonacich() -> FixedPointSystem {
        // G = 0.5 * two-cycle adjacency, z = 1; x = [2, 2]
        let g = SparseMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        FixedPointSystem::new(g, vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn dense_solve_zero_matrix_gives_z() {
        let sys = FixedPointSystem::new(SparseMatrix::zeros(3), vec![1.0, -2.0, 0.5]).unwrap();
        let sol = dense_solve_fixed_point(&sys).unwrap();
        assert_eq!(sol.x, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn dense_solve_two_cycle() {
        let sol = dense_solve_fixed_point(&two_cycle_bonacich()).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_solve_rejects_singular() {
        let g = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        // I - G = 0 is singular
        let sys = FixedPointSystem::new(g, vec![1.0, 1.0]).unwrap();
        assert!(dense_solve_fixed_point(&sys).is_err());
    }

    #[test]
    fn spectral_two_cycle() {
        let m = SparseMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let s = dense_spectral(&m);
        assert!((s.spectral_radius - 0.5).abs() < 1e-10);
        assert!((s.operator_norm_2 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn spectral_star_graph() {
        // K_{1,4}: rho = sqrt(4) = 2
        let mut t = Vec::new();
        for leaf in 1..5 {
            t.push((0usize, leaf, 1.0));
            t.push((leaf, 0usize, 1.0));
        }
        let m = SparseMatrix::from_triplets(5, &t).unwrap();
        let s = dense_spectral(&m);
        assert!((s.spectral_radius - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gelfand_fallback_matches_known_radii() {
        // two-cycle: rho = 0.5; nilpotent shift: rho = 0; star K_{1,4}: rho = 2
        let cycle = to_dmatrix(
            &SparseMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap(),
        );
        assert!((gelfand_spectral_radius(&cycle) - 0.5).abs() < 1e-2);
        let shift = to_dmatrix(&SparseMatrix::from_triplets(3, &[(0, 1, 3.0), (1, 2, 3.0)]).unwrap());
        assert_eq!(gelfand_spectral_radius(&shift), 0.0);
        let mut t = Vec::new();
        for leaf in 1..5 {
            t.push((0usize, leaf, 1.0));
            t.push((leaf, 0usize, 1.0));
        }
        let star = to_dmatrix(&SparseMatrix::from_triplets(5, &t).unwrap());
        assert!((gelfand_spectral_radius(&star) - 2.0).abs() < 1e-2);
    }

    #[test]
    fn spectral_condition_number() {
        let m = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, 3.0)]).unwrap();
        let s = dense_spectral(&m);
        assert!((s.condition_number.unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn neumann_partial_sums() {
        let sys = two_cycle_bonacich();
        assert!((neumann_partial_sum(&sys, 0, 0) - 1.0).abs() < 1e-15);
        assert!((neumann_partial_sum(&sys, 0, 3) - 1.875).abs() < 1e-12);
        let x = dense_solve_fixed_point(&sys).unwrap().x;
        assert!((neumann_partial_sum(&sys, 0, 200) - x[0]).abs() < 1e-10);
    }

    #[test]
    fn walk_sum_examples() {
        let sys = two_cycle_bonacich();
        assert_eq!(walk_sum_bruteforce(&sys, 0, 0, 100).unwrap(), 1.0);
        // walks: (0) -> 1, (0,1) -> 0.5, (0,1,0) -> 0.25
        assert!((walk_sum_bruteforce(&sys, 0, 2, 100).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn walk_sum_budget_error() {
        let sys = two_cycle_bonacich();
        assert!(matches!(
            walk_sum_bruteforce(&sys, 0, 30, 5),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn expected_update_single_support() {
        let g = SparseMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let r = SparseVector::basis(2, 0).unwrap();
        let e = expected_update(&r, &g, 1).unwrap();
        // denom 1: exactly G^T e_0
        assert_eq!(e, vec![0.0, 0.5]);
    }

    #[test]
    fn expected_update_zero_matrix() {
        let g = SparseMatrix::zeros(3);
        let r = SparseVector::from_pairs(3, &[(0, 1.0), (2, -2.0)]).unwrap();
        let e = expected_update(&r, &g, 4).unwrap();
        for (i, &v) in e.iter().enumerate() {
            assert!((v - r.get(i) * (1.0 - 0.25)).abs() < 1e-15);
        }
    }

    #[test]
    fn expected_update_rejects_small_denom() {
        let g = SparseMatrix::zeros(3);
        let r = SparseVector::from_pairs(3, &[(0, 1.0), (2, -2.0)]).unwrap();
        assert!(expected_update(&r, &g, 1).is_err());
    }
}
