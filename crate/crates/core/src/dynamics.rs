//! Time evolution of the nonlinear Kuramoto model (optionally with phase
//! lag) and of its complex-valued linear counterpart, plus the order
//! parameter.
//!
//! Everything runs in the co-rotating frame, so the common natural frequency
//! is zero:
//!
//! ```text
//! d theta_i / dt = eps * sum_j a_ij sin(theta_j - theta_i - phi_i)
//! d x / dt       = eps * e^{-i phi} A x,     x = e^{i theta}
//! ```

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{KuramotoError, Result};
use crate::graphs::AdjacencyMatrix;
use crate::spectral::{ComplexState, Propagator, C64};

/// Default sampling stride of returned trajectories.
pub const DEFAULT_STRIDE: f64 = 1e-2;
/// Default window length for chained analytical propagation.
pub const DEFAULT_WINDOW: f64 = 0.1;
/// Amplitudes must stay inside `[MIN_MODULUS, MAX_MODULUS]`.
pub const MIN_MODULUS: f64 = 1e-12;
pub const MAX_MODULUS: f64 = 1e12;

/// Maps `theta` into `[-pi, pi)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Signed distance `a - b` reduced into `[-pi, pi)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_phase(a - b)
}

/// Phases in canonical range `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    /// Wraps every component.
    pub fn new(phases: Vec<f64>) -> Self {
        wrap_phases(&phases)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `wrap(theta + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        Self(self.0.iter().map(|t| wrap_phase(t + c)).collect())
    }

    /// Largest circular distance to `other`.
    pub fn max_distance(&self, other: &PhaseVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| angle_diff(*a, *b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for PhaseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn wrap_phases(theta: &[f64]) -> PhaseVector {
    PhaseVector(theta.iter().copied().map(wrap_phase).collect())
}

/// `R = |sum_j e^{i theta_j}| / n`.
pub fn order_parameter(theta: &[f64]) -> f64 {
    if theta.is_empty() {
        return 0.0;
    }
    let (s, c) = theta
        .iter()
        .fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
    (s.hypot(c) / theta.len() as f64).min(1.0)
}

/// Phase lag inside the coupling sine: one value for every coupling, or one
/// per receiving node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseLag {
    Uniform(f64),
    PerNode(Vec<f64>),
}

impl Default for PhaseLag {
    fn default() -> Self {
        PhaseLag::Uniform(0.0)
    }
}

impl PhaseLag {
    pub fn at(&self, i: usize) -> f64 {
        match self {
            PhaseLag::Uniform(p) => *p,
            PhaseLag::PerNode(v) => v[i],
        }
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        match self {
            PhaseLag::PerNode(v) if v.len() != n => Err(KuramotoError::LengthMismatch {
                expected: n,
                actual: v.len(),
            }),
            _ => Ok(()),
        }
    }
}

impl From<f64> for PhaseLag {
    fn from(p: f64) -> Self {
        PhaseLag::Uniform(p)
    }
}

/// Right-hand side `eps * sum_j a_ij sin(theta_j - theta_i - phi_i)` by
/// direct summation of sines.
pub fn km_rhs_direct(a: &AdjacencyMatrix, theta: &[f64], epsilon: f64, phi: &PhaseLag) -> Vec<f64> {
    let n = a.n();
    (0..n)
        .map(|i| {
            let lag = phi.at(i);
            epsilon
                * (0..n)
                    .map(|j| a.get(i, j) * (theta[j] - theta[i] - lag).sin())
                    .sum::<f64>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Original,
    Analytical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    pub epsilon: f64,
    pub phi: PhaseLag,
    pub dt: Option<f64>,
    pub window: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum States {
    Phases(Vec<PhaseVector>),
    Complex(Vec<ComplexState>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: States,
    pub model: ModelTag,
    pub params: TrajectoryParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Wrapped phases at sample `k`; for the analytical model these are the
    /// arguments of the amplitudes.
    pub fn phases_at(&self, k: usize) -> PhaseVector {
        match &self.states {
            States::Phases(p) => p[k].clone(),
            States::Complex(c) => wrap_phases(&c[k].arguments()),
        }
    }

    pub fn phase_series(&self) -> Vec<PhaseVector> {
        (0..self.len()).map(|k| self.phases_at(k)).collect()
    }

    /// `max_{t, i} |theta_i(t) - theta_i(0)|` on the circle.
    pub fn max_drift(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let start = self.phases_at(0);
        (0..self.len())
            .map(|k| self.phases_at(k).max_distance(&start))
            .fold(0.0, f64::max)
    }

    pub fn order_parameter_series(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| order_parameter(self.phases_at(k).as_slice()))
            .collect()
    }

    pub fn complex_states(&self) -> Option<&[ComplexState]> {
        match &self.states {
            States::Complex(c) => Some(c),
            States::Phases(_) => None,
        }
    }
}

/// Largest circular phase gap between two trajectories sampled at the same
/// times. A diagnostic only: the two models are only guaranteed to agree at
/// equilibria.
pub fn max_phase_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    (0..a.len().min(b.len()))
        .map(|k| a.phases_at(k).max_distance(&b.phases_at(k)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmConfig {
    pub epsilon: f64,
    pub phi: PhaseLag,
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    pub stride: f64,
}

impl Default for KmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            phi: PhaseLag::Uniform(0.0),
            dt: 1e-4,
            t_end: 1.0,
            method: Method::Euler,
            stride: DEFAULT_STRIDE,
        }
    }
}

struct KmField<'a> {
    a: &'a DMatrix<f64>,
    epsilon: f64,
    lag_cos: Vec<f64>,
    lag_sin: Vec<f64>,
    cos: DVector<f64>,
    sin: DVector<f64>,
}

impl<'a> KmField<'a> {
    fn new(a: &'a AdjacencyMatrix, epsilon: f64, phi: &PhaseLag) -> Self {
        let n = a.n();
        Self {
            a: a.entries(),
            epsilon,
            lag_cos: (0..n).map(|i| phi.at(i).cos()).collect(),
            lag_sin: (0..n).map(|i| phi.at(i).sin()).collect(),
            cos: DVector::zeros(n),
            sin: DVector::zeros(n),
        }
    }

    /// `sin(theta_j - theta_i - phi_i) = Im(e^{i theta_j} e^{-i(theta_i + phi_i)})`,
    /// so the row sums reduce to two matrix-vector products.
    fn eval(&mut self, theta: &[f64], out: &mut [f64]) {
        for (k, t) in theta.iter().enumerate() {
            let (s, c) = t.sin_cos();
            self.sin[k] = s;
            self.cos[k] = c;
        }
        let sum_sin = self.a * &self.sin;
        let sum_cos = self.a * &self.cos;
        for i in 0..theta.len() {
            // cos/sin of (theta_i + phi_i)
            let c = self.cos[i] * self.lag_cos[i] - self.sin[i] * self.lag_sin[i];
            let s = self.sin[i] * self.lag_cos[i] + self.cos[i] * self.lag_sin[i];
            out[i] = self.epsilon * (c * sum_sin[i] - s * sum_cos[i]);
        }
    }
}

fn sample_times(t_end: f64, stride: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut k = 1u64;
    loop {
        let t = k as f64 * stride;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        k += 1;
    }
    if t_end > 0.0 {
        times.push(t_end);
    }
    times
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(KuramotoError::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

/// Integrates the nonlinear model with a fixed step, sampling every
/// `stride` time units (and at `t_end`).
pub fn integrate_km(a: &AdjacencyMatrix, theta0: &PhaseVector, cfg: &KmConfig) -> Result<Trajectory> {
    let n = a.n();
    if theta0.len() != n {
        return Err(KuramotoError::LengthMismatch {
            expected: n,
            actual: theta0.len(),
        });
    }
    cfg.phi.check_len(n)?;
    check_positive("dt", cfg.dt)?;
    check_positive("stride", cfg.stride)?;
    if !(cfg.t_end.is_finite() && cfg.t_end >= 0.0) {
        return Err(KuramotoError::InvalidParameter {
            name: "T",
            reason: format!("must be finite and non-negative, got {}", cfg.t_end),
        });
    }
    if cfg.stride < cfg.dt {
        return Err(KuramotoError::InvalidParameter {
            name: "stride",
            reason: format!("sampling stride {} is shorter than dt {}", cfg.stride, cfg.dt),
        });
    }

    let mut field = KmField::new(a, cfg.epsilon, &cfg.phi);
    let times = sample_times(cfg.t_end, cfg.stride);
    let mut theta = theta0.as_slice().to_vec();
    let mut states = Vec::with_capacity(times.len());
    states.push(wrap_phases(&theta));

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    let mut t = 0.0;
    for &target in &times[1..] {
        let steps = ((target - t) / cfg.dt * (1.0 - 1e-12)).ceil().max(1.0) as u64;
        let h = (target - t) / steps as f64;
        for _ in 0..steps {
            match cfg.method {
                Method::Euler => {
                    field.eval(&theta, &mut k1);
                    for i in 0..n {
                        theta[i] += h * k1[i];
                    }
                }
                Method::Rk4 => {
                    field.eval(&theta, &mut k1);
                    for i in 0..n {
                        tmp[i] = theta[i] + 0.5 * h * k1[i];
                    }
                    field.eval(&tmp, &mut k2);
                    for i in 0..n {
                        tmp[i] = theta[i] + 0.5 * h * k2[i];
                    }
                    field.eval(&tmp, &mut k3);
                    for i in 0..n {
                        tmp[i] = theta[i] + h * k3[i];
                    }
                    field.eval(&tmp, &mut k4);
                    for i in 0..n {
                        theta[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    }
                }
            }
        }
        t = target;
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(KuramotoError::Diverged {
                time: t,
                detail: format!("phase of node {i} is {}", theta[i]),
            });
        }
        // Keep the working state bounded; the vector field is 2pi-periodic.
        for v in theta.iter_mut() {
            *v = wrap_phase(*v);
        }
        states.push(wrap_phases(&theta));
    }

    Ok(Trajectory {
        times,
        states: States::Phases(states),
        model: ModelTag::Original,
        params: TrajectoryParams {
            epsilon: cfg.epsilon,
            phi: cfg.phi.clone(),
            dt: Some(cfg.dt),
            window: None,
        },
    })
}

/// Solves `x(t) = exp(t K) x0` with `K = eps e^{-i phi} A` and
/// `x0 = e^{i theta0}` by chaining propagation windows of length at most
/// `window`: each window starts from the previous window's end state.
pub fn propagate_analytical(
    a: &AdjacencyMatrix,
    theta0: &PhaseVector,
    epsilon: f64,
    phi: f64,
    times: &[f64],
    window: f64,
) -> Result<Trajectory> {
    let n = a.n();
    if theta0.len() != n {
        return Err(KuramotoError::LengthMismatch {
            expected: n,
            actual: theta0.len(),
        });
    }
    check_positive("window", window)?;
    if times.first() != Some(&0.0) {
        return Err(KuramotoError::InvalidParameter {
            name: "times",
            reason: "sample times must start at 0".into(),
        });
    }
    if times.windows(2).any(|w| w[1] <= w[0] || !w[1].is_finite()) {
        return Err(KuramotoError::InvalidParameter {
            name: "times",
            reason: "sample times must be finite and strictly increasing".into(),
        });
    }

    let mu = C64::from_polar(epsilon, -phi);
    let mut prop = Propagator::new(a, mu);
    let mut x = ComplexState::from_phases(theta0.as_slice()).0;
    let mut states = Vec::with_capacity(times.len());
    states.push(ComplexState(x.clone()));

    for pair in times.windows(2) {
        let (start, end) = (pair[0], pair[1]);
        let span = end - start;
        let full = (span / window * (1.0 - 1e-12)).floor() as u64;
        let rest = span - full as f64 * window;
        let mut clock = start;
        for _ in 0..full {
            x = step(&mut prop, window, &x, clock + window)?;
            clock += window;
        }
        if rest > 0.0 {
            x = step(&mut prop, rest, &x, end)?;
        }
        states.push(ComplexState(x.clone()));
    }

    Ok(Trajectory {
        times: times.to_vec(),
        states: States::Complex(states),
        model: ModelTag::Analytical,
        params: TrajectoryParams {
            epsilon,
            phi: PhaseLag::Uniform(phi),
            dt: None,
            window: Some(window),
        },
    })
}

fn step(prop: &mut Propagator, h: f64, x: &DVector<C64>, t_after: f64) -> Result<DVector<C64>> {
    let y = prop.apply(h, x).map_err(|e| KuramotoError::Diverged {
        time: t_after,
        detail: e.to_string(),
    })?;
    for (i, z) in y.iter().enumerate() {
        let m = z.norm();
        if !(MIN_MODULUS..=MAX_MODULUS).contains(&m) {
            return Err(KuramotoError::Diverged {
                time: t_after,
                detail: format!("|x_{i}| = {m:e} left [{MIN_MODULUS:e}, {MAX_MODULUS:e}]"),
            });
        }
    }
    Ok(y)
}

/// Sample times `0, stride, 2 stride, ..., t_end`.
pub fn uniform_times(t_end: f64, stride: f64) -> Vec<f64> {
    sample_times(t_end, stride)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::twisted_state;
    use crate::graphs::{build_complete, build_ring};

    /// `x mod 2pi` with `2pi` carried as a double-double, reduced into
    /// `[-pi, pi)`.
    fn reduce_extended(x: f64) -> f64 {
        const TWO_PI_HI: f64 = std::f64::consts::TAU;
        const TWO_PI_LO: f64 = 2.4492935982947064e-16;
        let k = (x / TWO_PI_HI).round();
        // x - k * (hi + lo) with the hi product kept exact via fma.
        let prod_hi = k * TWO_PI_HI;
        let prod_err = k.mul_add(TWO_PI_HI, -prod_hi);
        let r = (x - prod_hi) - prod_err - k * TWO_PI_LO;
        if r >= PI {
            r - TWO_PI_HI
        } else {
            r
        }
    }

    #[test]
    fn wrap_examples() {
        assert!((wrap_phase(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
        assert_eq!(wrap_phase(-PI), -PI);
        assert_eq!(wrap_phase(PI), -PI);
        assert_eq!(wrap_phase(0.0), 0.0);
        let big = TAU * 1e6 + 0.5;
        let oracle = reduce_extended(big);
        assert!((oracle - 0.5).abs() < 1e-9);
        assert!((wrap_phase(big) - oracle).abs() < 1e-9);
    }

    #[test]
    fn order_parameter_examples() {
        assert!((order_parameter(&[0.3; 6]) - 1.0).abs() < 1e-15);
        assert!(order_parameter(&[0.0, PI]) < 1e-15);
        for n in 2..12 {
            for j in 1..n {
                let r = order_parameter(twisted_state(n, j).unwrap().as_slice());
                assert!(r < 1e-14, "n={n} j={j}: {r}");
            }
        }
    }

    #[test]
    fn single_node_is_constant() {
        let a = AdjacencyMatrix::from_dense(DMatrix::zeros(1, 1)).unwrap();
        let theta = PhaseVector::new(vec![1.234]);
        let traj = integrate_km(&a, &theta, &KmConfig { t_end: 0.5, dt: 1e-3, ..Default::default() }).unwrap();
        assert_eq!(traj.max_drift(), 0.0);
    }

    #[test]
    fn two_oscillator_first_step() {
        let a = build_complete(2).unwrap();
        let theta = PhaseVector::new(vec![0.0, 1.0]);
        let eps = 0.7;
        let rhs = km_rhs_direct(&a, theta.as_slice(), eps, &PhaseLag::Uniform(0.0));
        assert_eq!(rhs[0], eps * 1f64.sin());
        assert_eq!(rhs[1], -eps * 1f64.sin());

        let dt = 1e-3;
        let cfg = KmConfig {
            epsilon: eps,
            dt,
            t_end: dt,
            stride: dt,
            ..Default::default()
        };
        let traj = integrate_km(&a, &theta, &cfg).unwrap();
        let p = traj.phases_at(1);
        assert!((p[0] - dt * eps * 1f64.sin()).abs() < 1e-15);
        assert!((p[1] - (1.0 - dt * eps * 1f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn fast_rhs_matches_direct_sum() {
        let a = build_ring(9, 3).unwrap();
        let theta: Vec<f64> = (0..9).map(|i| (i as f64 * 1.37).sin() * 3.0).collect();
        let lag = PhaseLag::PerNode((0..9).map(|i| 0.1 * i as f64).collect());
        let mut field = KmField::new(&a, 1.3, &lag);
        let mut fast = vec![0.0; 9];
        field.eval(&theta, &mut fast);
        let direct = km_rhs_direct(&a, &theta, 1.3, &lag);
        for (f, d) in fast.iter().zip(&direct) {
            assert!((f - d).abs() < 1e-13);
        }
    }

    #[test]
    fn rotation_equivariance() {
        let a = build_ring(8, 2).unwrap();
        let theta: Vec<f64> = (0..8).map(|i| (i as f64 * 0.9).cos() * 2.0).collect();
        let base = PhaseVector::new(theta);
        let c = 1.1;
        let cfg = KmConfig { t_end: 0.5, dt: 1e-3, ..Default::default() };
        let t1 = integrate_km(&a, &base, &cfg).unwrap();
        let t2 = integrate_km(&a, &base.shifted(c), &cfg).unwrap();
        for k in 0..t1.len() {
            let shifted = t1.phases_at(k).shifted(c);
            assert!(shifted.max_distance(&t2.phases_at(k)) < 1e-10);
        }
    }

    #[test]
    fn euler_converges_to_rk4_at_first_order() {
        let a = build_ring(10, 3).unwrap();
        let theta = PhaseVector::new((0..10).map(|i| (i as f64 * 2.3).sin() * 2.5).collect());
        let run = |dt: f64, method: Method| {
            let cfg = KmConfig { dt, t_end: 1.0, method, stride: 0.1, ..Default::default() };
            integrate_km(&a, &theta, &cfg).unwrap()
        };
        let reference = run(1e-4, Method::Rk4);
        assert!(max_phase_gap(&run(1e-3, Method::Rk4), &reference) < 1e-9);
        let e1 = max_phase_gap(&run(1e-4, Method::Euler), &reference);
        let e2 = max_phase_gap(&run(1e-5, Method::Euler), &reference);
        let ratio = e1 / e2;
        assert!(e2 < 2e-4 && (8.0..12.0).contains(&ratio), "{e1:e} {e2:e}");
    }

    #[test]
    fn integrator_rejects_bad_parameters() {
        let a = build_complete(3).unwrap();
        let theta = PhaseVector::new(vec![0.0; 3]);
        assert!(integrate_km(&a, &theta, &KmConfig { dt: 0.0, ..Default::default() }).is_err());
        assert!(integrate_km(&a, &PhaseVector::new(vec![0.0; 2]), &KmConfig::default()).is_err());
        let bad_lag = KmConfig { phi: PhaseLag::PerNode(vec![0.0; 2]), ..Default::default() };
        assert!(integrate_km(&a, &theta, &bad_lag).is_err());
    }

    #[test]
    fn analytical_starts_exactly_at_initial_state() {
        let a = build_ring(8, 2).unwrap();
        let theta = PhaseVector::new((0..8).map(|i| i as f64 * 0.4).collect());
        let traj = propagate_analytical(&a, &theta, 1.0, 0.0, &[0.0, 0.5], 0.1).unwrap();
        let x0 = &traj.complex_states().unwrap()[0];
        assert_eq!(x0, &ComplexState::from_phases(theta.as_slice()));
    }

    #[test]
    fn windowed_matches_single_shot() {
        let a = build_ring(8, 2).unwrap();
        let theta = PhaseVector::new((0..8).map(|i| (i as f64 * 1.9).sin()).collect());
        let x0 = ComplexState::from_phases(theta.as_slice()).0;
        let k = crate::spectral::to_complex(a.entries());
        let single = crate::spectral::expm_action(&k, &x0, 2.0).unwrap();
        let traj = propagate_analytical(&a, &theta, 1.0, 0.0, &uniform_times(2.0, 0.25), 0.1).unwrap();
        let last = traj.complex_states().unwrap().last().unwrap();
        let rel = (&last.0 - &single).norm() / single.norm();
        assert!(rel <= 1e-8, "{rel:e}");
    }

    #[test]
    fn analytical_divergence_is_reported_with_time() {
        let a = build_complete(30).unwrap();
        let theta = PhaseVector::new(vec![0.0; 30]);
        let err = propagate_analytical(&a, &theta, 1.0, 0.0, &uniform_times(2.0, 0.1), 0.1).unwrap_err();
        match err {
            KuramotoError::Diverged { time, .. } => assert!((time - 1.0).abs() < 1e-9, "{time}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_grid() {
        assert_eq!(uniform_times(0.0, 0.1), vec![0.0]);
        let t = uniform_times(0.35, 0.1);
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 0.35);
        let t = uniform_times(1.0, 0.01);
        assert_eq!(t.len(), 101);
    }
}
