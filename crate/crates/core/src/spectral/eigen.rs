//! Dense eigensolver. Exactly symmetric matrices use the symmetric QR
//! algorithm; everything else gets eigenvalues from a real Schur form and
//! eigenvectors by shifted inverse iteration, with vectors belonging to a
//! cluster of (near-)equal eigenvalues orthogonalized against each other.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{to_complex, EigenPair, C64, TOL_EIG};
use crate::error::{KuramotoError, Result};
use crate::graphs::AdjacencyMatrix;

const MAX_QR_ITERS: usize = 10_000;
const MAX_INVERSE_ITERS: usize = 12;

fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
}

/// All `n` eigenpairs sorted ascending by `(Re, Im)`, each satisfying
/// `|A v - lambda v| <= TOL_EIG * |A|_F`.
pub fn eig(a: &AdjacencyMatrix) -> Result<Vec<EigenPair>> {
    eig_with_tol(a, TOL_EIG)
}

pub fn eig_with_tol(a: &AdjacencyMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let pairs = if a.is_symmetric() {
        symmetric_pairs(a)?
    } else {
        general_pairs(a, tol)?
    };
    let bound = tol * a.frobenius_norm();
    if let Some(bad) = pairs.iter().find(|p| p.residual > bound) {
        return Err(KuramotoError::NoConvergence {
            value_re: bad.value.re,
            value_im: bad.value.im,
            residual: bad.residual,
        });
    }
    Ok(pairs)
}

/// Real orthonormal eigendecomposition, eigenvalues ascending.
/// Columns of the returned matrix are the eigenvectors.
pub fn symmetric_eig(a: &AdjacencyMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::try_new(a.entries().clone(), f64::EPSILON, MAX_QR_ITERS).ok_or(
        KuramotoError::NoConvergence {
            value_re: f64::NAN,
            value_im: 0.0,
            residual: f64::NAN,
        },
    )?;
    let mut order: Vec<usize> = (0..a.n()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.n(), a.n(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

fn symmetric_pairs(a: &AdjacencyMatrix) -> Result<Vec<EigenPair>> {
    let (values, vectors) = symmetric_eig(a)?;
    let ac = to_complex(a.entries());
    let mut pairs: Vec<EigenPair> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let vec = vectors.column(k).map(|x| C64::new(x, 0.0));
            EigenPair::new(&ac, C64::new(v, 0.0), vec)
        })
        .collect();
    sort_pairs(&mut pairs);
    Ok(pairs)
}

fn general_pairs(a: &AdjacencyMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let n = a.n();
    let schur = nalgebra::Schur::try_new(a.entries().clone(), f64::EPSILON, MAX_QR_ITERS).ok_or(
        KuramotoError::NoConvergence {
            value_re: f64::NAN,
            value_im: f64::NAN,
            residual: f64::NAN,
        },
    )?;
    let mut values: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let ac = to_complex(a.entries());
    let scale = a.frobenius_norm().max(1.0);
    let cluster_gap = 1e-6 * scale;
    let bound = tol * a.frobenius_norm();

    let mut pairs = Vec::with_capacity(n);
    let mut cluster: Vec<DVector<C64>> = Vec::new();
    let mut cluster_anchor: Option<C64> = None;

    for (idx, &value) in values.iter().enumerate() {
        match cluster_anchor {
            Some(anchor) if (value - anchor).norm() <= cluster_gap => {}
            _ => {
                cluster.clear();
                cluster_anchor = Some(value);
            }
        }
        let (value, vector) = inverse_iteration(&ac, value, &cluster, idx, scale, bound)?;
        cluster.push(vector.clone());
        pairs.push(EigenPair::new(&ac, value, vector));
    }
    sort_pairs(&mut pairs);
    Ok(pairs)
}

fn start_vector(n: usize, seed: usize) -> DVector<C64> {
    // Deterministic, generic (no special alignment with Fourier modes).
    DVector::from_fn(n, |i, _| {
        let t = (i as f64 + 1.0) * 0.618_033_988_75 + seed as f64 * 0.414_213_562_37;
        C64::new(1.0 + (t * 7.3).sin(), (t * 3.1).cos())
    })
}

fn project_out(v: &mut DVector<C64>, basis: &[DVector<C64>]) {
    for b in basis {
        let coef = b.dotc(v);
        *v -= b * coef;
    }
}

fn inverse_iteration(
    a: &DMatrix<C64>,
    value: C64,
    peers: &[DVector<C64>],
    seed: usize,
    scale: f64,
    bound: f64,
) -> Result<(C64, DVector<C64>)> {
    let n = a.nrows();
    let mut shift_size = 1e-13 * scale;
    let mut best: Option<(f64, C64, DVector<C64>)> = None;

    for _attempt in 0..4 {
        let shift = value + C64::new(shift_size, 0.7 * shift_size);
        let shifted = a - DMatrix::<C64>::identity(n, n) * shift;
        let lu = shifted.lu();
        let mut x = start_vector(n, seed);
        project_out(&mut x, peers);
        x /= C64::new(x.norm(), 0.0);

        for _ in 0..MAX_INVERSE_ITERS {
            let Some(mut y) = lu.solve(&x) else { break };
            project_out(&mut y, peers);
            project_out(&mut y, peers);
            let norm = y.norm();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            x = y / C64::new(norm, 0.0);

            let ax = a * &x;
            let rayleigh = x.dotc(&ax);
            for candidate in [value, rayleigh] {
                let res = (&ax - &x * candidate).norm();
                if best.as_ref().is_none_or(|(r, _, _)| res < *r) {
                    best = Some((res, candidate, x.clone()));
                }
            }
            if best.as_ref().is_some_and(|(r, _, _)| *r <= 1e-3 * bound) {
                break;
            }
        }
        if best.as_ref().is_some_and(|(r, _, _)| *r <= bound) {
            break;
        }
        shift_size *= 1e3;
    }

    match best {
        Some((res, v, x)) if res <= bound => Ok((v, x)),
        Some((res, v, _)) => Err(KuramotoError::NoConvergence {
            value_re: v.re,
            value_im: v.im,
            residual: res,
        }),
        None => Err(KuramotoError::NoConvergence {
            value_re: value.re,
            value_im: value.im,
            residual: f64::INFINITY,
        }),
    }
}
