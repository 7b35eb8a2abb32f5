//! Network topologies: circulant rings, complete graphs, G-circulant
//! matrices over finite abelian groups, two-block joins and seeded
//! Erdős–Rényi graphs.
//!
//! Every builder returns an [`AdjacencyMatrix`], a dense real matrix tagged
//! with structural flags. The flags are set by construction (or by an exact
//! entry-wise check in [`AdjacencyMatrix::from_dense`]), never by a
//! floating-point tolerance.
//!
//! Circulant convention: row `i` is the first row cyclically shifted right by
//! `i`, so `a[i][j] = first_row[(j - i) mod n]`. For a G-circulant matrix the
//! entry at `(tau, sigma)` is `c[tau^-1 sigma]`; with `G = Z/n` written
//! additively this is `c[(j - i) mod n]`, i.e. the coefficient map *is* the
//! first row.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KuramotoError, Result};

/// Structural metadata carried alongside the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MatrixFlags {
    pub symmetric: bool,
    pub circulant: bool,
    pub zero_diagonal: bool,
}

/// Dense real `n x n` coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: DMatrix<f64>,
    flags: MatrixFlags,
}

impl AdjacencyMatrix {
    /// Wraps an arbitrary square matrix, detecting every flag exactly.
    pub fn from_dense(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(KuramotoError::LengthMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(KuramotoError::InvalidParameter {
                name: "n",
                reason: "matrix must have at least one node".into(),
            });
        }
        check_finite(&entries)?;
        let flags = MatrixFlags {
            symmetric: is_exactly_symmetric(&entries),
            circulant: is_exactly_circulant(&entries),
            zero_diagonal: entries.diagonal().iter().all(|&d| d == 0.0),
        };
        Ok(Self { entries, flags })
    }

    fn with_flags(entries: DMatrix<f64>, flags: MatrixFlags) -> Self {
        debug_assert!(!flags.symmetric || is_exactly_symmetric(&entries));
        debug_assert!(!flags.circulant || is_exactly_circulant(&entries));
        Self { entries, flags }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn flags(&self) -> MatrixFlags {
        self.flags
    }

    pub fn is_symmetric(&self) -> bool {
        self.flags.symmetric
    }

    pub fn is_circulant(&self) -> bool {
        self.flags.circulant
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// First column `(c_0, ..., c_{n-1})`, the input of the circulant
    /// eigenvalue formula.
    pub fn first_column(&self) -> Vec<f64> {
        self.entries.column(0).iter().copied().collect()
    }

    pub fn first_row(&self) -> Vec<f64> {
        self.entries.row(0).iter().copied().collect()
    }

    /// Largest absolute row sum (the infinity norm).
    pub fn max_abs_row_sum(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Multiplies every entry by `s`. Flags are preserved.
    pub fn scaled(&self, s: f64) -> Self {
        let mut flags = self.flags;
        if s == 0.0 {
            flags.zero_diagonal = true;
        }
        Self::with_flags(&self.entries * s, flags)
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m[(i, j)].is_finite() {
                return Err(KuramotoError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn is_exactly_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| m[(i, j)] == m[(j, i)]))
}

fn is_exactly_circulant(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| m[(i, j)] == m[(0, (j + n - i) % n)]))
}

/// Circulant matrix whose row `i` is `first_row` shifted right by `i`.
///
/// `first_row[0]` must be zero unless `allow_self_loops` is set.
pub fn build_circulant_with(
    n: usize,
    first_row: &[f64],
    allow_self_loops: bool,
) -> Result<AdjacencyMatrix> {
    if n == 0 {
        return Err(KuramotoError::InvalidParameter {
            name: "n",
            reason: "must be at least 1".into(),
        });
    }
    if first_row.len() != n {
        return Err(KuramotoError::LengthMismatch {
            expected: n,
            actual: first_row.len(),
        });
    }
    if let Some(col) = first_row.iter().position(|v| !v.is_finite()) {
        return Err(KuramotoError::NonFinite { row: 0, col });
    }
    if first_row[0] != 0.0 && !allow_self_loops {
        return Err(KuramotoError::SelfLoop {
            node: 0,
            value: first_row[0],
        });
    }
    let entries = DMatrix::from_fn(n, n, |i, j| first_row[(j + n - i) % n]);
    let symmetric = (1..n).all(|k| first_row[k] == first_row[n - k]);
    Ok(AdjacencyMatrix::with_flags(
        entries,
        MatrixFlags {
            symmetric,
            circulant: true,
            zero_diagonal: first_row[0] == 0.0,
        },
    ))
}

/// [`build_circulant_with`] with self-loops disallowed.
pub fn build_circulant(n: usize, first_row: &[f64]) -> Result<AdjacencyMatrix> {
    build_circulant_with(n, first_row, false)
}

/// Symmetric ring lattice: node `i` couples to `i ± 1, ..., i ± k`.
pub fn build_ring(n: usize, k: usize) -> Result<AdjacencyMatrix> {
    if k < 1 || n < 3 || k > (n - 1) / 2 {
        return Err(KuramotoError::InvalidParameter {
            name: "k",
            reason: format!("need 1 <= k <= floor((n-1)/2) for n = {n}, got k = {k}"),
        });
    }
    let mut row = vec![0.0; n];
    for d in 1..=k {
        row[d] = 1.0;
        row[n - d] = 1.0;
    }
    build_circulant(n, &row)
}

/// Complete graph `K_n`.
pub fn build_complete(n: usize) -> Result<AdjacencyMatrix> {
    if n < 2 {
        return Err(KuramotoError::InvalidParameter {
            name: "n",
            reason: format!("complete graph needs n >= 2, got {n}"),
        });
    }
    let mut row = vec![1.0; n];
    row[0] = 0.0;
    build_circulant(n, &row)
}

/// Two circulant layers coupled by constant blocks:
///
/// ```text
/// [ C          alpha * 1 ]
/// [ beta * 1   D         ]
/// ```
pub fn build_join(
    c: &AdjacencyMatrix,
    d: &AdjacencyMatrix,
    alpha: f64,
    beta: f64,
) -> Result<AdjacencyMatrix> {
    if !c.is_circulant() {
        return Err(KuramotoError::NotCirculant { which: "C" });
    }
    if !d.is_circulant() {
        return Err(KuramotoError::NotCirculant { which: "D" });
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(KuramotoError::InvalidParameter {
            name: "alpha/beta",
            reason: "coupling constants must be finite".into(),
        });
    }
    let (k1, k2) = (c.n(), d.n());
    let n = k1 + k2;
    let entries = DMatrix::from_fn(n, n, |i, j| match (i < k1, j < k1) {
        (true, true) => c.get(i, j),
        (true, false) => alpha,
        (false, true) => beta,
        (false, false) => d.get(i - k1, j - k1),
    });
    let flags = MatrixFlags {
        symmetric: alpha == beta && c.is_symmetric() && d.is_symmetric(),
        circulant: is_exactly_circulant(&entries),
        zero_diagonal: c.flags().zero_diagonal && d.flags().zero_diagonal,
    };
    Ok(AdjacencyMatrix::with_flags(entries, flags))
}

/// Finite abelian group `Z/n_1 x ... x Z/n_k`.
///
/// Elements are residue tuples enumerated lexicographically (first factor
/// varies slowest), so element index `i` has mixed-radix digits given by the
/// factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    factors: Vec<usize>,
}

impl GroupSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(KuramotoError::InvalidParameter {
                name: "factors",
                reason: "every cyclic factor must have order >= 1".into(),
            });
        }
        Ok(Self { factors })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    /// `|G|`; the trivial group (no factors) has order 1.
    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn element(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, &f) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = index % f;
            index /= f;
        }
        digits
    }

    pub fn index_of(&self, element: &[usize]) -> Option<usize> {
        if element.len() != self.factors.len() {
            return None;
        }
        let mut idx = 0;
        for (&g, &f) in element.iter().zip(&self.factors) {
            if g >= f {
                return None;
            }
            idx = idx * f + g;
        }
        Some(idx)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    /// Index of `tau^-1 sigma`, i.e. `sigma - tau` componentwise.
    pub fn difference_index(&self, tau: usize, sigma: usize) -> usize {
        let t = self.element(tau);
        let s = self.element(sigma);
        let diff: Vec<usize> = s
            .iter()
            .zip(&t)
            .zip(&self.factors)
            .map(|((&s, &t), &f)| (s + f - t) % f)
            .collect();
        self.index_of(&diff).expect("residues are in range")
    }

    /// Index of the inverse `-g`.
    pub fn inverse_index(&self, g: usize) -> usize {
        self.difference_index(g, 0)
    }
}

/// Real coefficients `c_g`, stored in the enumeration order of a [`GroupSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCoeffs {
    values: Vec<f64>,
}

impl GroupCoeffs {
    pub fn from_vec(group: &GroupSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(KuramotoError::LengthMismatch {
                expected: group.order(),
                actual: values.len(),
            });
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(KuramotoError::NonFinite { row: 0, col });
        }
        Ok(Self { values })
    }

    /// Builds the coefficient table from an element-keyed map. Every group
    /// element must be present; keys outside the group are rejected.
    pub fn from_map<'a, I>(group: &GroupSpec, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], f64)>,
    {
        let mut values: Vec<Option<f64>> = vec![None; group.order()];
        for (element, value) in entries {
            let idx = group
                .index_of(element)
                .ok_or_else(|| KuramotoError::InvalidParameter {
                    name: "coeffs",
                    reason: format!("{element:?} is not an element of Z/{:?}", group.factors()),
                })?;
            values[idx] = Some(value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| KuramotoError::MissingCoefficient {
                    element: group.element(i),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_vec(group, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }
}

/// G-circulant matrix with entry `(tau, sigma) = c[tau^-1 sigma]`.
pub fn build_g_circulant_with(
    group: &GroupSpec,
    coeffs: &GroupCoeffs,
    allow_self_loops: bool,
) -> Result<AdjacencyMatrix> {
    let n = group.order();
    if coeffs.values().len() != n {
        return Err(KuramotoError::LengthMismatch {
            expected: n,
            actual: coeffs.values().len(),
        });
    }
    if coeffs.get(0) != 0.0 && !allow_self_loops {
        return Err(KuramotoError::SelfLoop {
            node: 0,
            value: coeffs.get(0),
        });
    }
    let entries = DMatrix::from_fn(n, n, |tau, sigma| {
        coeffs.get(group.difference_index(tau, sigma))
    });
    let symmetric = (0..n).all(|g| coeffs.get(g) == coeffs.get(group.inverse_index(g)));
    let flags = MatrixFlags {
        symmetric,
        circulant: is_exactly_circulant(&entries),
        zero_diagonal: coeffs.get(0) == 0.0,
    };
    Ok(AdjacencyMatrix::with_flags(entries, flags))
}

pub fn build_g_circulant(group: &GroupSpec, coeffs: &GroupCoeffs) -> Result<AdjacencyMatrix> {
    build_g_circulant_with(group, coeffs, false)
}

/// Seeded `G(n, p)` graph.
///
/// Stream order: one ChaCha8 generator seeded with `seed_from_u64(seed)`;
/// unordered pairs are visited row-major over the strict upper triangle
/// (`i < j`, `i` outer), each consuming exactly one `f64` draw in `[0, 1)`.
/// The pair is an edge iff the draw is `< p`.
pub fn build_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<AdjacencyMatrix> {
    if n == 0 {
        return Err(KuramotoError::InvalidParameter {
            name: "n",
            reason: "must be at least 1".into(),
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(KuramotoError::InvalidParameter {
            name: "p",
            reason: format!("probability must lie in [0, 1], got {p}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let draw: f64 = rng.gen();
            if draw < p {
                entries[(i, j)] = 1.0;
                entries[(j, i)] = 1.0;
            }
        }
    }
    let circulant = is_exactly_circulant(&entries);
    Ok(AdjacencyMatrix::with_flags(
        entries,
        MatrixFlags {
            symmetric: true,
            circulant,
            zero_diagonal: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn circulant_matches_example_matrix() {
        let a = build_circulant(4, &[0.0, 0.0, 1.0, 1.0]).unwrap();
        let expected = dmatrix![
            0.0, 0.0, 1.0, 1.0;
            1.0, 0.0, 0.0, 1.0;
            1.0, 1.0, 0.0, 0.0;
            0.0, 1.0, 1.0, 0.0
        ];
        assert_eq!(a.entries(), &expected);
        assert!(a.is_circulant());
        assert!(!a.is_symmetric());
        assert_eq!(a.first_column(), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn single_node_circulant() {
        let a = build_circulant(1, &[0.0]).unwrap();
        assert_eq!(a.entries(), &DMatrix::zeros(1, 1));
        assert!(a.flags().symmetric && a.flags().circulant && a.flags().zero_diagonal);
    }

    #[test]
    fn five_ring_against_hand_written_matrix() {
        let a = build_circulant(5, &[0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let expected = dmatrix![
            0.0, 1.0, 0.0, 0.0, 1.0;
            1.0, 0.0, 1.0, 0.0, 0.0;
            0.0, 1.0, 0.0, 1.0, 0.0;
            0.0, 0.0, 1.0, 0.0, 1.0;
            1.0, 0.0, 0.0, 1.0, 0.0
        ];
        assert_eq!(a.entries(), &expected);
        assert!(a.is_symmetric());
    }

    #[test]
    fn circulant_errors() {
        assert!(matches!(
            build_circulant(3, &[0.0, 1.0]),
            Err(KuramotoError::LengthMismatch { expected: 3, actual: 2 })
        ));
        assert!(matches!(
            build_circulant(2, &[0.0, f64::NAN]),
            Err(KuramotoError::NonFinite { .. })
        ));
        assert!(matches!(
            build_circulant(2, &[1.0, 1.0]),
            Err(KuramotoError::SelfLoop { .. })
        ));
        let looped = build_circulant_with(2, &[1.0, 1.0], true).unwrap();
        assert!(!looped.flags().zero_diagonal);
    }

    #[test]
    fn ring_fifty_ten_has_degree_twenty() {
        let a = build_ring(50, 10).unwrap();
        for row in a.entries().row_iter() {
            assert_eq!(row.sum(), 20.0);
        }
        assert!(a.is_symmetric() && a.is_circulant() && a.flags().zero_diagonal);
    }

    #[test]
    fn small_rings() {
        assert_eq!(build_ring(3, 1).unwrap(), build_complete(3).unwrap());
        let r = build_ring(6, 2).unwrap();
        assert_eq!(r.first_row(), vec![0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        assert!(build_ring(6, 3).is_err());
        assert!(build_ring(6, 0).is_err());
    }

    #[test]
    fn complete_graphs() {
        let k3 = build_complete(3).unwrap();
        assert_eq!(
            k3.entries(),
            &dmatrix![0.0, 1.0, 1.0; 1.0, 0.0, 1.0; 1.0, 1.0, 0.0]
        );
        let k4 = build_complete(4).unwrap();
        assert!(k4.entries().row_iter().all(|r| r.sum() == 3.0));
        assert!(build_complete(1).is_err());
    }

    #[test]
    fn join_blocks() {
        let c = build_ring(5, 1).unwrap();
        let a = build_join(&c, &c, 0.25, 0.75).unwrap();
        assert_eq!(a.n(), 10);
        assert_eq!(a.get(0, 7), 0.25);
        assert_eq!(a.get(7, 0), 0.75);
        assert_eq!(a.get(6, 7), 1.0);
        assert!(!a.is_symmetric());
        assert!(!a.is_circulant());

        let sym = build_join(&c, &c, 0.5, 0.5).unwrap();
        assert!(sym.is_symmetric());

        let split = build_join(&c, &c, 0.0, 0.0).unwrap();
        for i in 0..5 {
            for j in 5..10 {
                assert_eq!(split.get(i, j), 0.0);
                assert_eq!(split.get(j, i), 0.0);
            }
        }

        let path = AdjacencyMatrix::from_dense(dmatrix![
            0.0, 1.0, 0.0;
            1.0, 0.0, 1.0;
            0.0, 1.0, 0.0
        ])
        .unwrap();
        assert!(matches!(
            build_join(&path, &c, 1.0, 1.0),
            Err(KuramotoError::NotCirculant { which: "C" })
        ));
        assert!(matches!(
            build_join(&c, &path, 1.0, 1.0),
            Err(KuramotoError::NotCirculant { which: "D" })
        ));
    }

    #[test]
    fn group_enumeration_is_lexicographic() {
        let g = GroupSpec::new(vec![2, 3]).unwrap();
        let elems: Vec<_> = g.elements().collect();
        assert_eq!(
            elems,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        assert_eq!(g.index_of(&[1, 2]), Some(5));
        assert_eq!(g.index_of(&[2, 0]), None);
        assert_eq!(g.inverse_index(g.index_of(&[1, 1]).unwrap()), 5);
        assert_eq!(GroupSpec::new(vec![]).unwrap().order(), 1);
    }

    #[test]
    fn cyclic_g_circulant_is_the_example_matrix() {
        let g = GroupSpec::cyclic(4).unwrap();
        let coeffs = GroupCoeffs::from_vec(&g, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let a = build_g_circulant(&g, &coeffs).unwrap();
        assert_eq!(a, build_circulant(4, &[0.0, 0.0, 1.0, 1.0]).unwrap());
    }

    #[test]
    fn klein_four_gives_k4() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let one = 1.0;
        let map = [
            (&[0usize, 0][..], 0.0),
            (&[0, 1][..], one),
            (&[1, 0][..], one),
            (&[1, 1][..], one),
        ];
        let coeffs = GroupCoeffs::from_map(&g, map).unwrap();
        let a = build_g_circulant(&g, &coeffs).unwrap();
        assert_eq!(a.entries(), build_complete(4).unwrap().entries());
        assert!(a.is_symmetric());
    }

    #[test]
    fn g_circulant_missing_and_zero_coefficients() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let partial = [(&[0usize, 1][..], 1.0)];
        assert!(matches!(
            GroupCoeffs::from_map(&g, partial),
            Err(KuramotoError::MissingCoefficient { .. })
        ));
        let zero = GroupCoeffs::from_vec(&g, vec![0.0; 4]).unwrap();
        let a = build_g_circulant(&g, &zero).unwrap();
        assert_eq!(a.entries(), &DMatrix::zeros(4, 4));
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        assert_eq!(
            build_erdos_renyi(7, 0.0, 1).unwrap().entries(),
            &DMatrix::zeros(7, 7)
        );
        assert_eq!(
            build_erdos_renyi(7, 1.0, 1).unwrap().entries(),
            build_complete(7).unwrap().entries()
        );
        assert_eq!(
            build_erdos_renyi(30, 0.3, 42).unwrap(),
            build_erdos_renyi(30, 0.3, 42).unwrap()
        );
        assert_ne!(
            build_erdos_renyi(30, 0.3, 42).unwrap(),
            build_erdos_renyi(30, 0.3, 43).unwrap()
        );
        assert!(build_erdos_renyi(5, 1.5, 0).is_err());
    }

    #[test]
    fn erdos_renyi_edge_count_is_binomial() {
        let pairs = 100.0 * 99.0 / 2.0;
        let mean = 0.25 * pairs;
        let sd = (pairs * 0.25 * 0.75_f64).sqrt();
        for seed in 0..5 {
            let a = build_erdos_renyi(100, 0.25, seed).unwrap();
            let edges = a.entries().sum() / 2.0;
            assert!((edges - mean).abs() < 4.0 * sd, "seed {seed}: {edges}");
            assert!(a.is_symmetric() && a.flags().zero_diagonal);
        }
    }

    #[test]
    fn from_dense_detects_flags() {
        let a = AdjacencyMatrix::from_dense(build_ring(7, 2).unwrap().into_entries()).unwrap();
        assert!(a.is_circulant() && a.is_symmetric() && a.flags().zero_diagonal);
        let b = AdjacencyMatrix::from_dense(dmatrix![0.0, 2.0; 1.0, 0.5]).unwrap();
        assert_eq!(
            b.flags(),
            MatrixFlags {
                symmetric: false,
                circulant: false,
                zero_diagonal: false
            }
        );
        assert!(AdjacencyMatrix::from_dense(DMatrix::from_element(2, 3, 0.0)).is_err());
    }
}
