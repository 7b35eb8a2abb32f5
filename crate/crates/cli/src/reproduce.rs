//! Figure targets with the published parameters pinned: epsilon = 1,
//! Euler with dt = 1e-4, omega = 20 pi added to written phases only.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::Result;
use kuramoto_core::dynamics::{
    angle_diff, order_parameter, max_phase_gap, Method, PhaseLag, PhaseVector, Trajectory,
    DEFAULT_STRIDE, DEFAULT_WINDOW,
};
use kuramoto_core::equilibria::{
    equilibria_from_eigenvectors, multilayer_certificate, twisted_state, verify_equilibrium,
    EquilibriumCertificate, OrthogonalityRepair, ScalePolicy, TOL_MODULUS,
};
use kuramoto_core::graphs::{build_circulant, build_erdos_renyi, build_ring, AdjacencyMatrix};
use serde_json::{json, Value};

use crate::commands::{default_output, design_into, run_analytical, run_original, write_trajectory, RunSpec};
use crate::io::{fmt_f64, phases_csv, write_atomic, write_json, write_matrix, TrajectoryStyle};
use crate::manifest::RunRecord;
use crate::{ReproduceArgs, Target};

const DISPLAY_OMEGA: f64 = 20.0 * PI;
const DEFAULT_DT: f64 = 1e-4;
const DEFAULT_SEED: u64 = 1;

struct Ctx {
    dir: PathBuf,
    dt: f64,
    stride: f64,
    omega: f64,
    t_end: Option<f64>,
    outputs: Vec<PathBuf>,
    failures: Vec<String>,
}

impl Ctx {
    fn spec(&self, phi: f64, t_default: f64) -> RunSpec {
        RunSpec {
            epsilon: 1.0,
            phi: PhaseLag::Uniform(phi),
            dt: self.dt,
            t_end: self.t_end.unwrap_or(t_default),
            method: Method::Euler,
            stride: self.stride,
            window: DEFAULT_WINDOW,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn style(&self, order_parameter: bool) -> TrajectoryStyle {
        TrajectoryStyle {
            omega: self.omega,
            order_parameter,
        }
    }

    fn matrix(&mut self, name: &str, a: &AdjacencyMatrix, generator: &str, seed: Option<u64>, params: Value) -> Result<()> {
        let written = write_matrix(&self.path(name), a, generator, seed, params)?;
        self.outputs.extend(written);
        Ok(())
    }

    fn phases(&mut self, name: &str, theta: &PhaseVector) -> Result<()> {
        let p = self.path(name);
        write_atomic(&p, phases_csv(theta.as_slice()).as_bytes())?;
        self.outputs.push(p);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)?;
        self.outputs.push(p);
        Ok(())
    }

    fn trajectory(&mut self, tag: &str, traj: &Trajectory, order_parameter: bool) -> Result<()> {
        let wide = self.path(&format!("{tag}.csv"));
        let long = self.path(&format!("spacetime_{tag}.csv"));
        let written = write_trajectory(traj, &wide, Some(&long), self.style(order_parameter))?;
        self.outputs.extend(written);
        Ok(())
    }

    fn require_accepted(&mut self, what: &str, cert: &EquilibriumCertificate) {
        if !cert.accepted {
            self.failures.push(format!(
                "{what}: residual {:e} exceeds {:e}",
                cert.residual, cert.tolerance
            ));
        }
    }

    /// Both models from `theta`, written as `<tag>_original` and `<tag>_analytical`.
    fn both_models(&mut self, tag: &str, a: &AdjacencyMatrix, theta: &PhaseVector, spec: &RunSpec) -> Result<Value> {
        let original = run_original(a, theta, spec)?;
        let analytical = run_analytical(a, theta, spec)?;
        self.trajectory(&format!("{tag}_original"), &original, true)?;
        self.trajectory(&format!("{tag}_analytical"), &analytical, true)?;
        Ok(json!({
            "nonlinear_drift": original.max_drift(),
            "analytical_drift": analytical.max_drift(),
            "model_gap": max_phase_gap(&original, &analytical),
        }))
    }
}

/// Largest change in any phase difference `theta_i - theta_0` over the run:
/// zero for a rigidly rotating wave.
fn locking_error(traj: &Trajectory) -> f64 {
    let start = traj.phases_at(0);
    let s = start.as_slice();
    (0..traj.len())
        .map(|k| {
            let p = traj.phases_at(k);
            let p = p.as_slice();
            (1..p.len())
                .map(|i| angle_diff(p[i] - p[0], s[i] - s[0]).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Mean rotation rate of node 0, from the unwrapped increments.
fn rotation_rate(traj: &Trajectory) -> f64 {
    let mut total = 0.0;
    for k in 1..traj.len() {
        total += angle_diff(traj.phases_at(k)[0], traj.phases_at(k - 1)[0]);
    }
    let span = traj.times.last().copied().unwrap_or(0.0);
    if span > 0.0 {
        total / span
    } else {
        0.0
    }
}

fn fig1(ctx: &mut Ctx) -> Result<Value> {
    let a = build_ring(50, 10)?;
    ctx.matrix("matrix.csv", &a, "ring", None, json!({ "n": 50, "k": 10 }))?;
    let spec = ctx.spec(0.0, 1.0);
    let mut runs = BTreeMap::new();
    for j in [1usize, 3] {
        let theta = twisted_state(50, j)?;
        let cert = verify_equilibrium(&a, &theta, 1.0, &spec.phi)?;
        ctx.require_accepted(&format!("twisted state j={j}"), &cert);
        ctx.phases(&format!("theta0_j{j}.csv"), &theta)?;
        ctx.json(&format!("certificate_j{j}.json"), &cert)?;
        let mut summary = ctx.both_models(&format!("j{j}"), &a, &theta, &spec)?;
        summary["residual"] = json!(cert.residual);
        runs.insert(format!("j{j}"), summary);
    }
    Ok(json!(runs))
}

fn fig2(ctx: &mut Ctx) -> Result<Value> {
    let a = build_ring(50, 10)?;
    ctx.matrix("matrix.csv", &a, "ring", None, json!({ "n": 50, "k": 10 }))?;
    let theta = twisted_state(50, 1)?;
    ctx.phases("theta0.csv", &theta)?;
    let lambda = verify_equilibrium(&a, &theta, 1.0, &0.0.into())?
        .lambda
        .map_or(f64::NAN, |l| l.re);
    let mut runs = BTreeMap::new();
    for (tag, phi) in [("phi1", 1.0), ("phi_half_pi", PI / 2.0)] {
        let spec = ctx.spec(phi, 1.0);
        let original = run_original(&a, &theta, &spec)?;
        let analytical = run_analytical(&a, &theta, &spec)?;
        ctx.trajectory(&format!("{tag}_original"), &original, true)?;
        ctx.trajectory(&format!("{tag}_analytical"), &analytical, true)?;
        // With real lambda, every row sum equals -lambda sin(phi): the
        // twisted state turns into a rigidly rotating wave.
        let expected_rate = -spec.epsilon * lambda * phi.sin();
        let lock = locking_error(&original).max(locking_error(&analytical));
        if lock > 1e-5 {
            ctx.failures.push(format!("{tag}: phase differences drifted by {lock:e}"));
        }
        runs.insert(
            tag.to_string(),
            json!({
                "phi": phi,
                "expected_rotation_rate": expected_rate,
                "rotation_rate_original": rotation_rate(&original),
                "rotation_rate_analytical": rotation_rate(&analytical),
                "locking_error": lock,
                "model_gap": max_phase_gap(&original, &analytical),
            }),
        );
    }
    Ok(json!({ "lambda": lambda, "runs": runs }))
}

fn fig3(ctx: &mut Ctx) -> Result<Value> {
    let layer = build_ring(25, 5)?;
    let spec = ctx.spec(0.0, 1.0);
    let mut runs = BTreeMap::new();
    let mut matrix_written = false;
    for (k, offset) in [0.0, PI / 3.0, PI].into_iter().enumerate() {
        let (a, cert) = multilayer_certificate(&layer, 0.25, 0.75, 1, offset)?;
        if !matrix_written {
            ctx.matrix("matrix.csv", &a, "join", None, json!({ "layer": "ring(25,5)", "alpha": 0.25, "beta": 0.75 }))?;
            matrix_written = true;
        }
        ctx.require_accepted(&format!("multilayer offset {offset}"), &cert);
        ctx.phases(&format!("theta0_offset{k}.csv"), &cert.theta)?;
        ctx.json(&format!("certificate_offset{k}.json"), &cert)?;
        let mut summary = ctx.both_models(&format!("offset{k}"), &a, &cert.theta, &spec)?;
        summary["offset"] = json!(offset);
        summary["residual"] = json!(cert.residual);
        runs.insert(format!("offset{k}"), summary);
    }
    Ok(json!(runs))
}

fn fig4(ctx: &mut Ctx, seed: u64) -> Result<Value> {
    let a = build_erdos_renyi(100, 0.25, seed)?;
    let (design, written) = design_into(
        &ctx.dir,
        &a,
        ("er", Some(seed), json!({ "n": 100, "p": 0.25 })),
        1,
        ScalePolicy::Keep,
        OrthogonalityRepair::Project,
    )?;
    ctx.outputs.extend(written);
    let spec = ctx.spec(0.0, 5.0);
    let on_original = run_original(&a, &design.theta0, &spec)?;
    let on_designed = run_original(&design.matrix, &design.theta0, &spec)?;
    ctx.trajectory("original", &on_original, true)?;
    ctx.trajectory("designed", &on_designed, true)?;

    let r_original = on_original.order_parameter_series();
    let r_designed = on_designed.order_parameter_series();
    let mut text = String::from("t,R_original,R_designed\n");
    for k in 0..on_original.len() {
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(on_original.times[k]),
            fmt_f64(r_original[k]),
            fmt_f64(r_designed[k])
        ));
    }
    let p = ctx.path("order_parameter.csv");
    write_atomic(&p, text.as_bytes())?;
    ctx.outputs.push(p);
    Ok(json!({
        "seed": seed,
        "lambda_star": design.lambda_star,
        "eigen_residual": design.eigen_residual,
        "residual": design.certificate.residual,
        "initial_R": order_parameter(design.theta0.as_slice()),
        "final_R_original": r_original.last(),
        "max_R_designed": r_designed.iter().copied().fold(0.0, f64::max),
    }))
}

fn example1(ctx: &mut Ctx) -> Result<Value> {
    let a = build_circulant(4, &[0.0, 0.0, 1.0, 1.0])?;
    ctx.matrix("matrix.csv", &a, "circulant", None, json!({ "n": 4, "row": [0.0, 0.0, 1.0, 1.0] }))?;
    let theta = PhaseVector::new(vec![0.0, PI / 2.0, PI, -PI / 2.0]);
    let phi = PI / 4.0;
    let cert = verify_equilibrium(&a, &theta, 1.0, &PhaseLag::Uniform(phi))?;
    ctx.require_accepted("example equilibrium", &cert);
    let scan = equilibria_from_eigenvectors(&a, TOL_MODULUS)?;
    let recovered = scan
        .certificates
        .iter()
        .any(|c| c.theta.max_distance(&theta) < 1e-12 && c.phi == PhaseLag::Uniform(phi));
    if !recovered {
        ctx.failures.push("eigenvector scan did not recover the example equilibrium".into());
    }
    ctx.phases("theta0.csv", &theta)?;
    ctx.json("certificate.json", &cert)?;
    ctx.json("eigenvector_certificates.json", &scan.certificates)?;
    let spec = ctx.spec(phi, 1.0);
    let mut summary = ctx.both_models("lagged", &a, &theta, &spec)?;
    summary["residual"] = json!(cert.residual);
    summary["lambda"] = json!(cert.lambda.map(|l| [l.re, l.im]));
    summary["recovered_from_eigenvectors"] = json!(recovered);
    Ok(summary)
}

pub fn run(args: ReproduceArgs) -> Result<RunRecord> {
    let target = args.target.expect("clap enforces a target without --from-manifest");
    let name = format!("{target:?}").to_lowercase();
    let dir = default_output(args.output.clone(), &name);
    let mut ctx = Ctx {
        dir: dir.clone(),
        dt: args.dt.unwrap_or(DEFAULT_DT),
        stride: args.stride.unwrap_or(DEFAULT_STRIDE),
        omega: args.omega.unwrap_or(DISPLAY_OMEGA),
        t_end: args.t_end,
        outputs: Vec::new(),
        failures: Vec::new(),
    };
    let mut seeds = BTreeMap::new();
    let summary = match target {
        Target::Fig1 => fig1(&mut ctx)?,
        Target::Fig2 => fig2(&mut ctx)?,
        Target::Fig3 => fig3(&mut ctx)?,
        Target::Fig4 => {
            let seed = args.seed.unwrap_or(DEFAULT_SEED);
            seeds.insert("graph".to_string(), seed);
            fig4(&mut ctx, seed)?
        }
        Target::Example1 => example1(&mut ctx)?,
    };
    ctx.json("summary.json", &summary)?;
    println!("{name}: {} files in {}", ctx.outputs.len(), dir.display());
    for f in &ctx.failures {
        eprintln!("check failed: {f}");
    }
    Ok(RunRecord {
        command: format!("reproduce {name}"),
        params: json!({
            "epsilon": 1.0,
            "dt": ctx.dt,
            "stride": ctx.stride,
            "omega_display": ctx.omega,
            "t_end": args.t_end,
        }),
        seeds,
        inputs: Vec::new(),
        outputs: ctx.outputs,
        manifest_path: dir.join("manifest.json"),
        failure: (!ctx.failures.is_empty()).then(|| ctx.failures.join("; ")),
    })
}
