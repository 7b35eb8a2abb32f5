//! Equilibria from spectral data.
//!
//! If `x = e^{i theta}` is an eigenvector of a real coupling matrix `A` with
//! eigenvalue `lambda`, and `lambda e^{-i phi}` is real, then `theta` is an
//! equilibrium of both the phase-lag Kuramoto model and its complex-valued
//! linearisation. The constructors here produce candidate phase vectors from
//! that fact (twisted states, eigenvectors with unimodular entries, group
//! characters, multilayer joins, spectrally redesigned random graphs) and
//! every candidate is re-checked by evaluating the sine sums directly in
//! [`verify_equilibrium`].

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{wrap_phase, PhaseLag, PhaseVector};
use crate::error::{KuramotoError, Result};
use crate::graphs::{
    build_complete, build_g_circulant_with, build_join, AdjacencyMatrix, GroupCoeffs, GroupSpec,
};
use crate::spectral::{
    circulant_spectrum, eig, is_real, root_of_unity, symmetric_eig, to_complex, C64, TOL_EIG,
};

/// Acceptance threshold relative to the largest absolute row sum of `A`.
pub const TOL_EQ_REL: f64 = 1e-9;
/// Default relative tolerance on the spread of eigenvector moduli.
pub const TOL_MODULUS: f64 = 1e-8;

/// Which construction produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Twisted,
    CompleteZeroSum,
    CompletePiMultiples,
    Eigenvector,
    Character,
    Multilayer,
    Designed,
    User,
}

mod complex_opt {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|z| Repr { re: z.re, im: z.im }).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<Repr>::deserialize(d)?.map(|r| C64::new(r.re, r.im)))
    }
}

/// A phase vector together with the directly evaluated residual
/// `max_i |sum_j a_ij sin(theta_j - theta_i - phi_i)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub theta: PhaseVector,
    pub residual: f64,
    /// Threshold the residual was compared against.
    pub tolerance: f64,
    pub accepted: bool,
    #[serde(with = "complex_opt")]
    pub lambda: Option<C64>,
    pub phi: PhaseLag,
    /// The lag shifted by pi, which satisfies the same realness condition.
    pub alternate_phi: Option<f64>,
    /// `|A x - lambda x| / |x|` for `x = e^{i theta}`, when `lambda` is set.
    pub eigen_residual: Option<f64>,
    /// Set when the matched eigenvalue is zero and any lag would do.
    #[serde(default)]
    pub zero_eigenvalue: bool,
    pub source: Source,
    #[serde(default)]
    pub label: Option<String>,
}

impl EquilibriumCertificate {
    fn tagged(mut self, source: Source, label: Option<String>) -> Self {
        self.source = source;
        self.label = label;
        self
    }
}

/// Acceptance threshold for `A`.
pub fn tolerance_for(a: &AdjacencyMatrix) -> f64 {
    TOL_EQ_REL * a.max_abs_row_sum()
}

/// Max-norm of the coupling sums `sum_j a_ij sin(theta_j - theta_i - phi_i)`,
/// evaluated term by term.
pub fn coupling_residual(a: &AdjacencyMatrix, theta: &[f64], phi: &PhaseLag) -> f64 {
    let n = a.n();
    (0..n)
        .map(|i| {
            let lag = phi.at(i);
            (0..n)
                .map(|j| a.get(i, j) * (theta[j] - theta[i] - lag).sin())
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// `(lambda, |A x - lambda x| / |x|)` with `lambda` the Rayleigh quotient of
/// `x = e^{i theta}`.
pub fn unimodular_eigen_fit(a: &AdjacencyMatrix, theta: &[f64]) -> (C64, f64) {
    let n = a.n();
    let x = DVector::from_iterator(n, theta.iter().map(|t| C64::new(t.cos(), t.sin())));
    let ax = to_complex(a.entries()) * &x;
    let lambda = x.dotc(&ax) / C64::new(n as f64, 0.0);
    let res = (&ax - &x * lambda).norm() / (n as f64).sqrt();
    (lambda, res)
}

/// Checks `theta` against the phase-lag model on `A`.
///
/// The residual does not depend on the coupling strength (any nonzero
/// `epsilon` has the same equilibria); `epsilon` is carried for the record.
/// `lambda` is filled in when `e^{i theta}` is numerically an eigenvector.
pub fn verify_equilibrium(
    a: &AdjacencyMatrix,
    theta: &PhaseVector,
    _epsilon: f64,
    phi: &PhaseLag,
) -> Result<EquilibriumCertificate> {
    let n = a.n();
    if theta.len() != n {
        return Err(KuramotoError::LengthMismatch {
            expected: n,
            actual: theta.len(),
        });
    }
    phi.check_len(n)?;
    let residual = coupling_residual(a, theta.as_slice(), phi);
    let tolerance = tolerance_for(a);
    let (lambda, eig_res) = unimodular_eigen_fit(a, theta.as_slice());
    let is_eigen = eig_res <= TOL_EIG * a.frobenius_norm();
    Ok(EquilibriumCertificate {
        theta: theta.clone(),
        residual,
        tolerance,
        accepted: residual <= tolerance,
        lambda: is_eigen.then_some(lambda),
        phi: phi.clone(),
        alternate_phi: None,
        eigen_residual: is_eigen.then_some(eig_res),
        zero_eigenvalue: false,
        source: Source::User,
        label: None,
    })
}

/// Twisted state with winding number `j`: component `m` is
/// `wrap(2 pi j m / n)`.
pub fn twisted_state(n: usize, j: usize) -> Result<PhaseVector> {
    if n == 0 || j >= n {
        return Err(KuramotoError::InvalidParameter {
            name: "j",
            reason: format!("need 0 <= j <= n - 1, got j = {j} for n = {n}"),
        });
    }
    let n_i = n as i64;
    let phases = (0..n)
        .map(|m| {
            let mut r = ((j * m) as i64).rem_euclid(n_i);
            if 2 * r >= n_i {
                r -= n_i;
            }
            PI * (2.0 * r as f64 / n as f64)
        })
        .collect();
    Ok(PhaseVector::new(phases))
}

/// Outcome of the complete-graph classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompleteKind {
    PiMultiples,
    ZeroSum,
    NotEquilibrium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompleteClass {
    pub kind: CompleteKind,
    /// Both conditions hold (e.g. antipodal pairs); reported as `PiMultiples`.
    pub both: bool,
}

/// Equilibria on `K_n` are exactly the phase vectors whose pairwise
/// differences are multiples of pi, or whose unit phasors sum to zero.
pub fn classify_complete(theta: &[f64], tol: f64) -> Result<CompleteClass> {
    let n = theta.len();
    if n < 2 {
        return Err(KuramotoError::InvalidParameter {
            name: "theta",
            reason: "complete-graph classification needs n >= 2".into(),
        });
    }
    let pi_multiples = (0..n).all(|i| {
        (i + 1..n).all(|j| {
            let d = theta[j] - theta[i];
            (d - PI * (d / PI).round()).abs() <= tol
        })
    });
    let (s, c) = theta
        .iter()
        .fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
    let zero_sum = s.hypot(c) <= n as f64 * tol;
    let kind = if pi_multiples {
        CompleteKind::PiMultiples
    } else if zero_sum {
        CompleteKind::ZeroSum
    } else {
        CompleteKind::NotEquilibrium
    };
    Ok(CompleteClass {
        kind,
        both: pi_multiples && zero_sum,
    })
}

/// Classifies `theta` and, when it is an equilibrium, certifies it on `K_n`.
pub fn certify_complete(theta: &PhaseVector, tol: f64) -> Result<Option<EquilibriumCertificate>> {
    let class = classify_complete(theta.as_slice(), tol)?;
    let source = match class.kind {
        CompleteKind::PiMultiples => Source::CompletePiMultiples,
        CompleteKind::ZeroSum => Source::CompleteZeroSum,
        CompleteKind::NotEquilibrium => return Ok(None),
    };
    let a = build_complete(theta.len())?;
    let cert = verify_equilibrium(&a, theta, 1.0, &PhaseLag::Uniform(0.0))?.tagged(source, None);
    Ok(cert.accepted.then_some(cert))
}

/// Representative of `arg(lambda)` modulo pi in `(-pi/2, pi/2]`, plus the
/// pi-shifted alternate.
pub fn lag_for_eigenvalue(lambda: C64) -> (f64, f64) {
    if is_real(lambda) {
        return (0.0, PI);
    }
    let mut phi = lambda.arg();
    while phi > FRAC_PI_2 {
        phi -= PI;
    }
    while phi <= -FRAC_PI_2 {
        phi += PI;
    }
    let alternate = if phi > 0.0 { phi - PI } else { phi + PI };
    (phi, alternate)
}

/// Result of scanning a spectrum for unimodular eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorScan {
    pub certificates: Vec<EquilibriumCertificate>,
    /// Eigenvectors whose component moduli are not constant.
    pub skipped: usize,
    /// Unimodular candidates whose direct residual failed the threshold.
    pub rejected: Vec<EquilibriumCertificate>,
}

/// Every eigenvector with constant-modulus components yields
/// `theta = arg(v)` and a lag making `lambda e^{-i phi}` real.
///
/// Circulant matrices use the closed-form Fourier eigenbasis (so each
/// twisted state appears individually, even inside degenerate eigenspaces);
/// other matrices use [`eig`], whose basis for a repeated eigenvalue is
/// arbitrary, so unimodular directions inside such a space can be missed.
pub fn equilibria_from_eigenvectors(a: &AdjacencyMatrix, tol_modulus: f64) -> Result<EigenvectorScan> {
    let (pairs, source) = if a.is_circulant() {
        (circulant_spectrum(&a.first_column()), Source::Twisted)
    } else {
        (eig(a)?, Source::Eigenvector)
    };

    let mut scan = EigenvectorScan {
        certificates: Vec::new(),
        skipped: 0,
        rejected: Vec::new(),
    };
    for (index, pair) in pairs.iter().enumerate() {
        let moduli: Vec<f64> = pair.vector.iter().map(|z| z.norm()).collect();
        let biggest = moduli.iter().copied().fold(0.0, f64::max);
        let mean = moduli.iter().sum::<f64>() / moduli.len() as f64;
        let unimodular = moduli.iter().all(|&m| m > 1e-12 * biggest)
            && moduli.iter().all(|&m| (m - mean).abs() <= tol_modulus * mean);
        if !unimodular {
            scan.skipped += 1;
            continue;
        }
        let theta = PhaseVector::new(pair.vector.iter().map(|z| z.arg()).collect());
        let (phi, alternate) = lag_for_eigenvalue(pair.value);
        let mut cert = verify_equilibrium(a, &theta, 1.0, &PhaseLag::Uniform(phi))?;
        cert.lambda = Some(pair.value);
        cert.eigen_residual = Some(pair.residual / pair.vector.norm());
        cert.alternate_phi = Some(alternate);
        let label = match source {
            Source::Twisted => format!("j={index}"),
            _ => format!("eig={index}"),
        };
        let cert = cert.tagged(source, Some(label));
        if cert.accepted {
            scan.certificates.push(cert);
        } else {
            scan.rejected.push(cert);
        }
    }
    Ok(scan)
}

/// Exponent `r` with `chi_m(g) = e^{2 pi i r / |G|}`.
fn character_exponent(group: &GroupSpec, m: &[usize], g: &[usize]) -> i64 {
    let order = group.order();
    let r: usize = group
        .factors()
        .iter()
        .zip(m.iter().zip(g))
        .map(|(&f, (&mi, &gi))| (mi * gi % f) * (order / f))
        .sum();
    (r % order) as i64
}

/// Equilibria from the characters of a finite abelian group.
///
/// For each character `chi` the vector `(chi(sigma))_sigma` is an eigenvector
/// of every G-circulant matrix with eigenvalue `Y = sum_g c_g chi(g)`; its
/// argument is an equilibrium at lag `phi = arg(Y)`. When `Y` vanishes the
/// lag is reported as 0 with `zero_eigenvalue` set.
pub fn g_circulant_equilibria(
    group: &GroupSpec,
    coeffs: &GroupCoeffs,
) -> Result<Vec<EquilibriumCertificate>> {
    let a = build_g_circulant_with(group, coeffs, true)?;
    let order = group.order();
    let ac = to_complex(a.entries());
    let coeff_scale: f64 = 1.0 + coeffs.values().iter().map(|c| c.abs()).sum::<f64>();

    let mut out = Vec::with_capacity(order);
    for m in group.elements() {
        let exps: Vec<i64> = group
            .elements()
            .map(|g| character_exponent(group, &m, &g))
            .collect();
        let v = DVector::from_iterator(order, exps.iter().map(|&r| root_of_unity(r, order)));
        let y: C64 = exps
            .iter()
            .zip(coeffs.values())
            .map(|(&r, &c)| root_of_unity(r, order) * c)
            .sum();
        let zero = y.norm() <= 1e-12 * coeff_scale;
        let phi = if zero {
            0.0
        } else if is_real(y) {
            C64::new(y.re, 0.0).arg()
        } else {
            y.arg()
        };
        let theta = PhaseVector::new(
            exps.iter()
                .map(|&r| PI * (2.0 * r as f64 / order as f64))
                .collect(),
        );
        let mut cert = verify_equilibrium(&a, &theta, 1.0, &PhaseLag::Uniform(phi))?;
        cert.lambda = Some(y);
        cert.eigen_residual = Some((&ac * &v - &v * y).norm() / v.norm());
        cert.zero_eigenvalue = zero;
        cert.alternate_phi = Some(wrap_phase(phi + PI));
        out.push(cert.tagged(Source::Character, Some(format!("chi={m:?}"))));
    }
    Ok(out)
}

/// Twisted state of winding `j` on each of two `k`-node layers, the second
/// layer shifted by `phi_offset`.
pub fn multilayer_equilibrium(k: usize, j: usize, phi_offset: f64) -> Result<PhaseVector> {
    if j == 0 || j >= k {
        return Err(KuramotoError::InvalidParameter {
            name: "j",
            reason: format!("need 1 <= j <= k - 1 so the cross-layer sums vanish, got j = {j}, k = {k}"),
        });
    }
    if !(0.0..2.0 * PI).contains(&phi_offset) {
        return Err(KuramotoError::InvalidParameter {
            name: "phi_offset",
            reason: format!("must lie in [0, 2pi), got {phi_offset}"),
        });
    }
    let layer = twisted_state(k, j)?;
    let mut phases = layer.as_slice().to_vec();
    phases.extend(layer.as_slice().iter().map(|t| t + phi_offset));
    Ok(PhaseVector::new(phases))
}

/// Builds the two-layer join of `c` with itself and certifies the
/// multilayer twisted state on it. `c` must be a symmetric circulant.
pub fn multilayer_certificate(
    c: &AdjacencyMatrix,
    alpha: f64,
    beta: f64,
    j: usize,
    phi_offset: f64,
) -> Result<(AdjacencyMatrix, EquilibriumCertificate)> {
    if !(c.is_circulant() && c.is_symmetric()) {
        return Err(KuramotoError::InvalidParameter {
            name: "C",
            reason: "multilayer equilibria are certified for a symmetric circulant layer".into(),
        });
    }
    let a = build_join(c, c, alpha, beta)?;
    let theta = multilayer_equilibrium(c.n(), j, phi_offset)?;
    let cert = verify_equilibrium(&a, &theta, 1.0, &PhaseLag::Uniform(0.0))?
        .tagged(Source::Multilayer, Some(format!("j={j},offset={phi_offset}")));
    Ok((a, cert))
}

/// How the two implanted eigenvalues are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalePolicy {
    /// Both take the value found at the second-to-last position.
    Keep,
    /// That value times a factor.
    Multiply(f64),
}

/// Treatment of the retained eigenvectors once two columns are replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthogonalityRepair {
    /// Use the modified eigenvector matrix as is: `A' = V D V^T`.
    None,
    /// Project the retained spectral part onto the orthogonal complement of
    /// `span{cos theta, sin theta}` before adding the implanted pair.
    Project,
}

/// A graph with an implanted twisted-state equilibrium.
#[derive(Debug, Clone)]
pub struct Design {
    pub matrix: AdjacencyMatrix,
    pub theta0: PhaseVector,
    pub certificate: EquilibriumCertificate,
    pub lambda_star: f64,
    /// Positions (ascending order) of the replaced eigenvectors: sine, cosine.
    pub replaced: [usize; 2],
    pub eigenvalues: Vec<f64>,
    /// Largest `|<v_k, u>|` between a retained eigenvector and an implanted one.
    pub max_overlap: f64,
    /// `|A' x - lambda* x| / |x|` with `x = e^{i theta0}`.
    pub eigen_residual: f64,
}

/// Relative gate on `|A' x - lambda* x|`.
pub const DESIGN_EIGEN_GATE: f64 = 1e-6;

/// Implants `twisted_state(n, j)` as an equilibrium of a symmetric graph.
///
/// With `A = V D V^T` (eigenvalues ascending, ties kept in solver order), the
/// second- and third-to-last eigenvectors are replaced by the normalised
/// `sin(theta0)` and `cos(theta0)`, both given the eigenvalue chosen by
/// `policy`, and the matrix is rebuilt and symmetrised. The result is
/// emitted only if `e^{i theta0}` passes the eigenvector gate and the direct
/// residual check.
pub fn design_random_equilibrium(
    a: &AdjacencyMatrix,
    j: usize,
    policy: ScalePolicy,
    repair: OrthogonalityRepair,
) -> Result<Design> {
    let n = a.n();
    if !a.is_symmetric() {
        return Err(KuramotoError::InvalidParameter {
            name: "A",
            reason: "design needs a symmetric matrix".into(),
        });
    }
    if n < 4 {
        return Err(KuramotoError::InvalidParameter {
            name: "n",
            reason: format!("design needs n >= 4, got {n}"),
        });
    }
    if j == 0 {
        return Err(KuramotoError::InvalidParameter {
            name: "j",
            reason: "j = 0 gives sin(theta0) = 0; cos and sin are not independent".into(),
        });
    }
    let theta0 = twisted_state(n, j)?;
    let cos = DVector::from_iterator(n, theta0.as_slice().iter().map(|t| t.cos()));
    let sin = DVector::from_iterator(n, theta0.as_slice().iter().map(|t| t.sin()));
    let (cn, sn) = (cos.norm(), sin.norm());
    let floor = 1e-6 * (n as f64).sqrt();
    if cn < floor || sn < floor {
        return Err(KuramotoError::InvalidParameter {
            name: "j",
            reason: format!("cos/sin of twisted state j = {j} degenerate (norms {cn:e}, {sn:e})"),
        });
    }
    let cos = cos / cn;
    let sin = sin / sn;
    let cross = cos.dot(&sin).abs();
    if cross > 1e-8 {
        return Err(KuramotoError::DesignRejected {
            detail: format!("cos and sin of twisted state j = {j} overlap by {cross:e}"),
        });
    }

    let (values, vectors) = symmetric_eig(a)?;
    let (sin_pos, cos_pos) = (n - 2, n - 3);
    let lambda_star = match policy {
        ScalePolicy::Keep => values[sin_pos],
        ScalePolicy::Multiply(s) => s * values[sin_pos],
    };
    let max_overlap = (0..n)
        .filter(|&k| k != sin_pos && k != cos_pos)
        .map(|k| {
            let v = vectors.column(k);
            v.dot(&cos).abs().max(v.dot(&sin).abs())
        })
        .fold(0.0, f64::max);

    let implanted = (&cos * cos.transpose() + &sin * sin.transpose()) * lambda_star;
    let mut retained = DMatrix::<f64>::zeros(n, n);
    for k in (0..n).filter(|&k| k != sin_pos && k != cos_pos) {
        let v = vectors.column(k);
        retained += v * v.transpose() * values[k];
    }
    let rebuilt = match repair {
        OrthogonalityRepair::None => retained + implanted,
        OrthogonalityRepair::Project => {
            let p = DMatrix::<f64>::identity(n, n) - &cos * cos.transpose() - &sin * sin.transpose();
            &p * retained * &p + implanted
        }
    };
    let symmetrised = (&rebuilt + rebuilt.transpose()) * 0.5;
    let matrix = AdjacencyMatrix::from_dense(symmetrised)?;

    let (_, eigen_residual) = unimodular_eigen_fit(&matrix, theta0.as_slice());
    let lambda_scale = lambda_star.abs().max(1.0);
    let x_lambda = {
        let x = DVector::from_iterator(n, theta0.as_slice().iter().map(|t| C64::new(t.cos(), t.sin())));
        let ax = to_complex(matrix.entries()) * &x;
        (&ax - &x * C64::new(lambda_star, 0.0)).norm() / x.norm()
    };
    if x_lambda > DESIGN_EIGEN_GATE * lambda_scale {
        return Err(KuramotoError::DesignRejected {
            detail: format!(
                "|A'x - lambda* x|/|x| = {x_lambda:e} exceeds gate; largest overlap of a retained eigenvector with the implanted pair is {max_overlap:e}"
            ),
        });
    }
    let mut certificate = verify_equilibrium(&matrix, &theta0, 1.0, &PhaseLag::Uniform(0.0))?;
    if !certificate.accepted {
        return Err(KuramotoError::DesignRejected {
            detail: format!(
                "direct residual {:e} exceeds {:e} (overlap {max_overlap:e})",
                certificate.residual, certificate.tolerance
            ),
        });
    }
    certificate.lambda = Some(C64::new(lambda_star, 0.0));
    certificate.eigen_residual = Some(x_lambda);
    let certificate = certificate.tagged(Source::Designed, Some(format!("j={j}")));

    Ok(Design {
        matrix,
        theta0,
        certificate,
        lambda_star,
        replaced: [sin_pos, cos_pos],
        eigenvalues: values,
        max_overlap,
        eigen_residual: eigen_residual.min(x_lambda),
    })
}
