//! Eigen-analysis of coupling matrices and the matrix-exponential action
//! that solves the complex-valued model `dx/dt = K x`.
//!
//! Circulant matrices get their spectrum in closed form from the discrete
//! Fourier basis; every other matrix goes through [`eig`].

mod eigen;
mod expm;

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{KuramotoError, Result};
use crate::graphs::AdjacencyMatrix;

pub use eigen::{eig, eig_with_tol, symmetric_eig};
pub use expm::{expm, expm_action};

pub type C64 = Complex<f64>;

/// Default relative residual tolerance for emitted eigenpairs.
pub const TOL_EIG: f64 = 1e-9;

/// `|Im(value)| <= TOL_EIG * (1 + |value|)`.
pub fn is_real(value: C64) -> bool {
    value.im.abs() <= TOL_EIG * (1.0 + value.norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    /// Unit 2-norm; first non-negligible component is real and positive.
    pub vector: DVector<C64>,
    pub is_real_value: bool,
    /// `|A v - value v|_2`.
    pub residual: f64,
}

impl EigenPair {
    pub(crate) fn new(a: &DMatrix<C64>, value: C64, vector: DVector<C64>) -> Self {
        let vector = normalize_phase(vector);
        let residual = (a * &vector - &vector * value).norm();
        Self {
            value,
            is_real_value: is_real(value),
            vector,
            residual,
        }
    }
}

/// Scales to unit norm and rotates the first non-negligible component onto
/// the positive real axis.
pub(crate) fn normalize_phase(v: DVector<C64>) -> DVector<C64> {
    let norm = v.norm();
    if norm == 0.0 {
        return v;
    }
    let v = v / C64::new(norm, 0.0);
    let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() > 1e-8 * biggest)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let rot = pivot.conj() / pivot.norm();
    v * rot
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// `e^{2 pi i r / n}` with the exponent reduced to an integer residue first.
pub(crate) fn root_of_unity(r: i64, n: usize) -> C64 {
    let n_i = n as i64;
    let mut r = r.rem_euclid(n_i);
    if 2 * r >= n_i {
        r -= n_i;
    }
    let angle = 2.0 * PI * r as f64 / n as f64;
    C64::new(angle.cos(), angle.sin())
}

/// Closed-form spectrum of the circulant matrix with first column
/// `(c_0, ..., c_{n-1})`.
///
/// Pair `j` has vector `(1, w^j, ..., w^{(n-1)j}) / sqrt(n)` with
/// `w = e^{2 pi i / n}` and value `c_0 + c_{n-1} w^j + ... + c_1 w^{(n-1)j}`.
pub fn circulant_spectrum(first_column: &[f64]) -> Vec<EigenPair> {
    let n = first_column.len();
    if n == 0 {
        return Vec::new();
    }
    let a = DMatrix::from_fn(n, n, |i, j| C64::new(first_column[(i + n - j) % n], 0.0));
    let inv_sqrt = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            let value: C64 = (0..n)
                .map(|k| root_of_unity((j * k) as i64, n) * first_column[(n - k) % n])
                .sum();
            let vector = DVector::from_fn(n, |m, _| root_of_unity((j * m) as i64, n) * inv_sqrt);
            let residual = (&a * &vector - &vector * value).norm();
            EigenPair {
                value,
                vector,
                is_real_value: is_real(value),
                residual,
            }
        })
        .collect()
}

/// [`circulant_spectrum`] for a matrix carrying the circulant flag.
pub fn circulant_spectrum_of(a: &AdjacencyMatrix) -> Result<Vec<EigenPair>> {
    if !a.is_circulant() {
        return Err(KuramotoError::NotCirculant { which: "A" });
    }
    Ok(circulant_spectrum(&a.first_column()))
}

/// Complex amplitudes `x = e^{i theta}` of the analytical model.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState(pub DVector<C64>);

impl ComplexState {
    pub fn from_phases(phases: &[f64]) -> Self {
        Self(DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&t| C64::new(t.cos(), t.sin())),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    /// `arg(x)` in `(-pi, pi]` (the real part of the complex phase).
    pub fn arguments(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.arg()).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    /// `theta_im = -ln|x|`.
    pub fn imaginary_phases(&self) -> Vec<f64> {
        self.0.iter().map(|z| -z.norm().ln()).collect()
    }
}

enum Route {
    /// `K = mu A` with `A = V diag(d) V^T` real symmetric.
    Symmetric {
        mu: C64,
        values: DVector<f64>,
        vectors: DMatrix<f64>,
    },
    General {
        k: DMatrix<C64>,
        cache: HashMap<u64, DMatrix<C64>>,
    },
}

/// Repeated application of `exp(h K)` for `K = mu A`.
///
/// Symmetric `A` is propagated through its orthonormal eigendecomposition;
/// anything else through cached Padé exponentials of `h K`.
pub struct Propagator {
    route: Route,
}

impl Propagator {
    pub fn new(a: &AdjacencyMatrix, mu: C64) -> Self {
        let route = if a.is_symmetric() {
            let eig = SymmetricEigen::new(a.entries().clone());
            Route::Symmetric {
                mu,
                values: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        } else {
            Route::General {
                k: to_complex(a.entries()) * mu,
                cache: HashMap::new(),
            }
        };
        Self { route }
    }

    pub fn apply(&mut self, h: f64, x: &DVector<C64>) -> Result<DVector<C64>> {
        if h == 0.0 {
            return Ok(x.clone());
        }
        match &mut self.route {
            Route::Symmetric { mu, values, vectors } => {
                let n = x.len();
                let mut coeffs = DVector::<C64>::zeros(n);
                for (k, col) in vectors.column_iter().enumerate() {
                    let proj: C64 = col.iter().zip(x.iter()).map(|(v, z)| z * *v).sum();
                    let growth = (*mu * values[k] * h).exp();
                    if !(growth.re.is_finite() && growth.im.is_finite()) {
                        return Err(KuramotoError::ExpmOverflow {
                            scaled_norm: (*mu * values[k] * h).norm(),
                        });
                    }
                    coeffs[k] = proj * growth;
                }
                let mut out = DVector::<C64>::zeros(n);
                for (k, col) in vectors.column_iter().enumerate() {
                    for i in 0..n {
                        out[i] += coeffs[k] * col[i];
                    }
                }
                Ok(out)
            }
            Route::General { k, cache } => {
                let step = match cache.entry(h.to_bits()) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(expm(&(&*k * C64::new(h, 0.0)))?)
                    }
                };
                Ok(&*step * x)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_circulant, build_complete, build_ring};

    #[test]
    fn complete_graph_spectrum() {
        for n in [3usize, 10, 50] {
            let spec = circulant_spectrum_of(&build_complete(n).unwrap()).unwrap();
            assert!((spec[0].value - C64::new((n - 1) as f64, 0.0)).norm() < 1e-12);
            for p in &spec[1..] {
                assert!((p.value + C64::new(1.0, 0.0)).norm() < 1e-12);
                assert!(p.is_real_value);
            }
        }
    }

    #[test]
    fn example_matrix_has_complex_eigenvalue() {
        let spec = circulant_spectrum(&[0.0, 1.0, 1.0, 0.0]);
        let p = &spec[1];
        assert!((p.value - C64::new(-1.0, -1.0)).norm() < 1e-15);
        assert!(!p.is_real_value);
        let expected = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        for (got, want) in p.vector.iter().zip(expected) {
            assert!((got * 2.0 - want).norm() < 1e-15);
        }
        let a = build_circulant(4, &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(a.first_column(), vec![0.0, 1.0, 1.0, 0.0]);
        assert!(p.residual < 1e-14);
    }

    #[test]
    fn single_node_spectrum() {
        let spec = circulant_spectrum(&[0.0]);
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].value, C64::new(0.0, 0.0));
        assert_eq!(spec[0].vector[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn circulant_and_dense_solver_agree() {
        let cases = vec![
            build_ring(9, 2).unwrap(),
            build_circulant(4, &[0.0, 0.0, 1.0, 1.0]).unwrap(),
            build_circulant(7, &[0.0, 0.5, -1.0, 2.0, 0.0, 0.25, 3.0]).unwrap(),
        ];
        for a in cases {
            let closed: Vec<C64> = circulant_spectrum_of(&a).unwrap().iter().map(|p| p.value).collect();
            let mut dense: Vec<C64> = eig(&a).unwrap().iter().map(|p| p.value).collect();
            for x in closed {
                let (k, d) = dense
                    .iter()
                    .enumerate()
                    .map(|(k, y)| (k, (x - y).norm()))
                    .min_by(|p, q| p.1.total_cmp(&q.1))
                    .unwrap();
                assert!(d < 1e-8, "{x} unmatched");
                dense.swap_remove(k);
            }
        }
    }

    #[test]
    fn non_circulant_rejected_by_closed_form() {
        let a = AdjacencyMatrix::from_dense(nalgebra::dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 1.0; 0.0, 1.0, 0.0])
            .unwrap();
        assert!(circulant_spectrum_of(&a).is_err());
    }

    #[test]
    fn propagator_routes_agree() {
        let a = build_ring(8, 2).unwrap().scaled(0.3);
        let x = ComplexState::from_phases(&[0.1, 0.4, -1.0, 2.0, 0.0, 0.7, -2.5, 1.1]).0;
        let mu = C64::from_polar(1.0, -0.4);
        let mut sym = Propagator::new(&a, mu);
        let mut general = Propagator {
            route: Route::General {
                k: to_complex(a.entries()) * mu,
                cache: HashMap::new(),
            },
        };
        let y1 = sym.apply(0.7, &x).unwrap();
        let y2 = general.apply(0.7, &x).unwrap();
        assert!((&y1 - &y2).norm() < 1e-12 * y1.norm());
    }

    #[test]
    fn root_of_unity_reduction() {
        assert!((root_of_unity(5, 4) - C64::new(0.0, 1.0)).norm() < 1e-16);
        assert!((root_of_unity(-1, 4) - C64::new(0.0, -1.0)).norm() < 1e-16);
        assert_eq!(root_of_unity(0, 7), C64::new(1.0, 0.0));
    }
}
