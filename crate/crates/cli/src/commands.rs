use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kuramoto_core::dynamics::{
    integrate_km, propagate_analytical, uniform_times, KmConfig, Method, PhaseLag, PhaseVector,
    Trajectory,
};
use kuramoto_core::equilibria::{
    design_random_equilibrium, equilibria_from_eigenvectors, multilayer_equilibrium,
    twisted_state, verify_equilibrium, EquilibriumCertificate, OrthogonalityRepair, ScalePolicy,
};
use kuramoto_core::graphs::{
    build_circulant_with, build_complete, build_erdos_renyi, build_g_circulant_with, build_join,
    build_ring, AdjacencyMatrix, GroupCoeffs, GroupSpec,
};
use kuramoto_core::spectral::{circulant_spectrum_of, eig, EigenPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::InputError;
use crate::io::{
    fmt_f64, long_form_csv, phases_csv, read_matrix_csv, read_phases, trajectory_csv, write_atomic,
    write_json, write_matrix, TrajectoryStyle,
};
use crate::manifest::{manifest_beside, RunRecord};
use crate::{
    BuildArgs, DesignArgs, EquilibriaArgs, Kind, MethodArg, ModelChoice, RepairArg, SimulateArgs,
    SpectrumArgs, VerifyArgs,
};

pub const OUT_DIR_ENV: &str = "KURAMOTO_EQ_OUT";

pub fn default_output(given: Option<PathBuf>, name: &str) -> PathBuf {
    given.unwrap_or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(name)
    })
}

pub fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .enumerate()
        .map(|(i, f)| {
            f.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                InputError::new(format!("--{flag}: item {} ({:?}) is not a finite number", i + 1, f.trim())).into()
            })
        })
        .collect()
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| InputError::new(format!("--kind {kind} needs --{flag}")).into())
}

/// `dir/name.ext` -> `dir/name_suffix.ext`.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn group_coeffs(args: &BuildArgs, group: &GroupSpec) -> Result<GroupCoeffs> {
    if let Some(list) = &args.coeffs {
        return Ok(GroupCoeffs::from_vec(group, parse_list("coeffs", list)?)?);
    }
    let path = require(args.coeff_map.as_ref(), "coeffs or --coeff-map", "gcirc")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, f64> = serde_json::from_str(&text)
        .map_err(|e| InputError::at(path, e.line() as u64, e.column(), e))?;
    let mut entries = Vec::with_capacity(map.len());
    for (key, value) in &map {
        let element = key
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| InputError::new(format!("{}: bad group element {key:?}", path.display())))?;
        entries.push((element, *value));
    }
    Ok(GroupCoeffs::from_map(group, entries.iter().map(|(e, v)| (e.as_slice(), *v)))?)
}

pub fn build(args: BuildArgs) -> Result<RunRecord> {
    let mut inputs = Vec::new();
    let mut seeds = BTreeMap::new();
    let name = format!("{:?}", args.kind).to_lowercase();
    let (a, params) = match args.kind {
        Kind::Ring => {
            let n = require(args.n, "n", "ring")?;
            let k = require(args.k, "k", "ring")?;
            (build_ring(n, k)?, json!({ "n": n, "k": k }))
        }
        Kind::Complete => {
            let n = require(args.n, "n", "complete")?;
            (build_complete(n)?, json!({ "n": n }))
        }
        Kind::Circulant => {
            let row = parse_list("row", require(args.row.as_deref(), "row", "circulant")?)?;
            let n = args.n.unwrap_or(row.len());
            let a = build_circulant_with(n, &row, args.allow_self_loops)?;
            (a, json!({ "n": n, "row": row, "allow_self_loops": args.allow_self_loops }))
        }
        Kind::Join => {
            let c_path = require(args.c.clone(), "c", "join")?;
            let d_path = require(args.d.clone(), "d", "join")?;
            let c = read_matrix_csv(&c_path)?;
            let d = read_matrix_csv(&d_path)?;
            inputs.extend([c_path.clone(), d_path.clone()]);
            let a = build_join(&c, &d, args.alpha, args.beta)?;
            (
                a,
                json!({
                    "c": c_path.display().to_string(),
                    "d": d_path.display().to_string(),
                    "alpha": args.alpha,
                    "beta": args.beta,
                }),
            )
        }
        Kind::Gcirc => {
            let factors = require(args.group.as_deref(), "group", "gcirc")?
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| InputError::new("--group: expected comma-separated positive integers"))?;
            let group = GroupSpec::new(factors.clone())?;
            if let Some(p) = &args.coeff_map {
                inputs.push(p.clone());
            }
            let coeffs = group_coeffs(&args, &group)?;
            let a = build_g_circulant_with(&group, &coeffs, args.allow_self_loops)?;
            (a, json!({ "group": factors, "coeffs": coeffs.values(), "allow_self_loops": args.allow_self_loops }))
        }
        Kind::Er => {
            let n = require(args.n, "n", "er")?;
            let p = require(args.p, "p", "er")?;
            let seed = require(args.seed, "seed", "er")?;
            seeds.insert("graph".into(), seed);
            (build_erdos_renyi(n, p, seed)?, json!({ "n": n, "p": p }))
        }
    };
    let out = default_output(args.output, "matrix.csv");
    let outputs = write_matrix(&out, &a, &name, seeds.get("graph").copied(), params.clone())?;
    println!("wrote {}x{} {name} matrix to {}", a.n(), a.n(), out.display());
    Ok(RunRecord {
        command: "build".into(),
        params: json!({ "kind": name, "generator": params }),
        seeds,
        inputs,
        manifest_path: manifest_beside(&out),
        outputs,
        failure: None,
    })
}

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    n: usize,
    method: &'static str,
    values: Vec<ComplexValue>,
    real: Vec<bool>,
    residuals: Vec<f64>,
}

pub fn spectrum_pairs(a: &AdjacencyMatrix) -> Result<(Vec<EigenPair>, &'static str)> {
    if a.is_circulant() {
        Ok((circulant_spectrum_of(a)?, "circulant"))
    } else {
        Ok((eig(a)?, "dense"))
    }
}

pub fn spectrum(args: SpectrumArgs) -> Result<RunRecord> {
    let a = read_matrix_csv(&args.matrix)?;
    let (pairs, method) = spectrum_pairs(&a)?;
    let report = SpectrumReport {
        n: a.n(),
        method,
        values: pairs.iter().map(|p| ComplexValue { re: p.value.re, im: p.value.im }).collect(),
        real: pairs.iter().map(|p| p.is_real_value).collect(),
        residuals: pairs.iter().map(|p| p.residual).collect(),
    };
    let out = default_output(args.output, "spectrum.json");
    write_json(&out, &report)?;
    let mut outputs = vec![out.clone()];
    if let Some(vpath) = &args.vectors {
        let mut text = (0..pairs.len())
            .map(|k| format!("v{k}_re,v{k}_im"))
            .collect::<Vec<_>>()
            .join(",");
        text.push('\n');
        for i in 0..a.n() {
            let row: Vec<String> = pairs
                .iter()
                .flat_map(|p| [fmt_f64(p.vector[i].re), fmt_f64(p.vector[i].im)])
                .collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        write_atomic(vpath, text.as_bytes())?;
        outputs.push(vpath.clone());
    }
    println!("{} eigenvalues ({method}) written to {}", pairs.len(), out.display());
    Ok(RunRecord {
        command: "spectrum".into(),
        params: json!({ "matrix": args.matrix.display().to_string() }),
        inputs: vec![args.matrix],
        manifest_path: manifest_beside(&out),
        outputs,
        ..Default::default()
    })
}

#[derive(Serialize)]
struct EquilibriaReport {
    n: usize,
    phase_lag: String,
    skipped_non_unimodular: usize,
    certificates: Vec<EquilibriumCertificate>,
    rejected: Vec<EquilibriumCertificate>,
}

pub fn equilibria(args: EquilibriaArgs) -> Result<RunRecord> {
    let a = read_matrix_csv(&args.matrix)?;
    let scan = equilibria_from_eigenvectors(&a, args.tol_modulus)?;
    let (certificates, rejected) = if args.phase_lag == "auto" {
        (scan.certificates, scan.rejected)
    } else {
        let phi: f64 = args
            .phase_lag
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| InputError::new("--phase-lag: expected \"auto\" or a number"))?;
        let mut keep = Vec::new();
        let mut drop = Vec::new();
        for c in scan.certificates.into_iter().chain(scan.rejected) {
            let mut again = verify_equilibrium(&a, &c.theta, 1.0, &PhaseLag::Uniform(phi))?;
            again.lambda = c.lambda;
            again.eigen_residual = c.eigen_residual;
            again.source = c.source;
            again.label = c.label;
            if again.accepted {
                keep.push(again);
            } else {
                drop.push(again);
            }
        }
        (keep, drop)
    };
    let out = default_output(args.output, "certs.json");
    let report = EquilibriaReport {
        n: a.n(),
        phase_lag: args.phase_lag.clone(),
        skipped_non_unimodular: scan.skipped,
        certificates,
        rejected,
    };
    write_json(&out, &report)?;
    println!(
        "{} equilibria certified, {} rejected, {} eigenvectors not unimodular -> {}",
        report.certificates.len(),
        report.rejected.len(),
        report.skipped_non_unimodular,
        out.display()
    );
    Ok(RunRecord {
        command: "equilibria".into(),
        params: json!({
            "matrix": args.matrix.display().to_string(),
            "phase_lag": args.phase_lag,
            "tol_modulus": args.tol_modulus,
        }),
        inputs: vec![args.matrix],
        manifest_path: manifest_beside(&out),
        outputs: vec![out],
        ..Default::default()
    })
}

pub fn verify(args: VerifyArgs) -> Result<RunRecord> {
    let a = read_matrix_csv(&args.matrix)?;
    let theta = PhaseVector::new(read_phases(&args.theta)?);
    let mut inputs = vec![args.matrix.clone(), args.theta.clone()];
    let phi = match &args.phi_file {
        Some(p) => {
            inputs.push(p.clone());
            PhaseLag::PerNode(read_phases(p)?)
        }
        None => PhaseLag::Uniform(args.phi),
    };
    let cert = verify_equilibrium(&a, &theta, args.epsilon, &phi)?;
    let out = default_output(args.output, "certificate.json");
    write_json(&out, &cert)?;
    println!(
        "residual {:e} (tolerance {:e}): {}",
        cert.residual,
        cert.tolerance,
        if cert.accepted { "equilibrium" } else { "not an equilibrium" }
    );
    if let Some(l) = cert.lambda {
        println!("e^(i theta) is an eigenvector, lambda = {}{:+}i", l.re, l.im);
    }
    let failure = (!cert.accepted).then(|| {
        format!("residual {:e} exceeds tolerance {:e}", cert.residual, cert.tolerance)
    });
    Ok(RunRecord {
        command: "verify".into(),
        params: json!({
            "matrix": args.matrix.display().to_string(),
            "theta": args.theta.display().to_string(),
            "phi": phi,
            "epsilon": args.epsilon,
        }),
        inputs,
        manifest_path: manifest_beside(&out),
        outputs: vec![out],
        failure,
        ..Default::default()
    })
}

/// Resolves `--theta0`: a file, or a builder spec.
pub fn resolve_theta0(spec: &str, n: usize, seeds: &mut BTreeMap<String, u64>) -> Result<(PhaseVector, Option<PathBuf>)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |why: &str| InputError::new(format!("--theta0 {spec:?}: {why}"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad("expected an integer"));
    let real = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("expected a number"));
    let theta = match parts.as_slice() {
        ["twisted", j] => twisted_state(n, int(j)?)?,
        ["multilayer", j, offset] => {
            if !n.is_multiple_of(2) {
                return Err(bad("multilayer states need an even node count").into());
            }
            multilayer_equilibrium(n / 2, int(j)?, real(offset)?)?
        }
        ["uniform", v] => PhaseVector::new(vec![real(v)?; n]),
        ["random", seed] => {
            let seed = seed.parse::<u64>().map_err(|_| bad("expected an integer seed"))?;
            seeds.insert("theta0".into(), seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            PhaseVector::new((0..n).map(|_| rng.gen_range(-PI..PI)).collect())
        }
        _ => {
            let path = PathBuf::from(spec);
            if !path.exists() {
                return Err(bad("not a file and not one of twisted:J, multilayer:J:OFFSET, uniform:V, random:SEED").into());
            }
            return Ok((PhaseVector::new(read_phases(&path)?), Some(path)));
        }
    };
    Ok((theta, None))
}

#[derive(Clone)]
pub struct RunSpec {
    pub epsilon: f64,
    pub phi: PhaseLag,
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    pub stride: f64,
    pub window: f64,
}

pub fn run_original(a: &AdjacencyMatrix, theta0: &PhaseVector, s: &RunSpec) -> Result<Trajectory> {
    let cfg = KmConfig {
        epsilon: s.epsilon,
        phi: s.phi.clone(),
        dt: s.dt,
        t_end: s.t_end,
        method: s.method,
        stride: s.stride,
    };
    Ok(integrate_km(a, theta0, &cfg)?)
}

pub fn run_analytical(a: &AdjacencyMatrix, theta0: &PhaseVector, s: &RunSpec) -> Result<Trajectory> {
    let phi = match &s.phi {
        PhaseLag::Uniform(p) => *p,
        PhaseLag::PerNode(_) => {
            return Err(InputError::new("the analytical model takes a single phase lag").into())
        }
    };
    if !(s.stride.is_finite() && s.stride > 0.0) {
        return Err(InputError::new("--stride must be positive").into());
    }
    let times = uniform_times(s.t_end, s.stride);
    Ok(propagate_analytical(a, theta0, s.epsilon, phi, &times, s.window)?)
}

/// Writes the trajectory CSV (and long form when asked); returns the paths.
pub fn write_trajectory(
    traj: &Trajectory,
    path: &Path,
    long_form: Option<&Path>,
    style: TrajectoryStyle,
) -> Result<Vec<PathBuf>> {
    write_atomic(path, trajectory_csv(traj, style).as_bytes())?;
    let mut out = vec![path.to_path_buf()];
    if let Some(lf) = long_form {
        write_atomic(lf, long_form_csv(traj, style.omega).as_bytes())?;
        out.push(lf.to_path_buf());
    }
    Ok(out)
}

fn parse_sweep(text: &str) -> Result<(String, Vec<f64>)> {
    let (name, values) = text
        .split_once('=')
        .ok_or_else(|| InputError::new("--sweep: expected PARAM=V1,V2,..."))?;
    let name = name.trim().to_string();
    if name != "epsilon" && name != "phi" {
        return Err(InputError::new(format!("--sweep: can sweep epsilon or phi, not {name:?}")).into());
    }
    Ok((name, parse_list("sweep", values)?))
}

pub fn simulate(args: SimulateArgs) -> Result<RunRecord> {
    let a = read_matrix_csv(&args.matrix)?;
    let mut seeds = BTreeMap::new();
    let mut inputs = vec![args.matrix.clone()];
    let (theta0, theta_file) = resolve_theta0(&args.theta0, a.n(), &mut seeds)?;
    inputs.extend(theta_file);
    let phi = match &args.phi_file {
        Some(p) => {
            inputs.push(p.clone());
            PhaseLag::PerNode(read_phases(p)?)
        }
        None => PhaseLag::Uniform(args.phi),
    };
    let method = match args.method {
        MethodArg::Euler => Method::Euler,
        MethodArg::Rk4 => Method::Rk4,
    };
    let base = RunSpec {
        epsilon: args.epsilon,
        phi,
        dt: args.dt,
        t_end: args.t_end,
        method,
        stride: args.stride,
        window: args.window,
    };

    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    let variants: Vec<(Option<String>, RunSpec)> = match &sweep {
        None => vec![(None, base)],
        Some((name, values)) => values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut s = base.clone();
                if name == "epsilon" {
                    s.epsilon = v;
                } else {
                    s.phi = PhaseLag::Uniform(v);
                }
                (Some(format!("sweep{k}")), s)
            })
            .collect(),
    };
    let models: Vec<(&str, bool)> = match args.model {
        ModelChoice::Original => vec![("original", false)],
        ModelChoice::Analytical => vec![("analytical", true)],
        ModelChoice::Both => vec![("original", false), ("analytical", true)],
    };

    let jobs: Vec<(usize, &str, bool)> = (0..variants.len())
        .flat_map(|v| models.iter().map(move |&(m, an)| (v, m, an)))
        .collect();
    // Each job is independent; collect keeps the (variant, model) order.
    let results: Vec<Result<Trajectory>> = jobs
        .par_iter()
        .map(|&(v, _, analytical)| {
            if analytical {
                run_analytical(&a, &theta0, &variants[v].1)
            } else {
                run_original(&a, &theta0, &variants[v].1)
            }
        })
        .collect();

    let out = default_output(args.output, "traj.csv");
    let style = TrajectoryStyle {
        omega: args.omega,
        order_parameter: args.emit_order_parameter,
    };
    let mut outputs = Vec::new();
    for (&(v, model, _), traj) in jobs.iter().zip(results) {
        let traj = traj?;
        let mut path = out.clone();
        let mut long = args.long_form.clone();
        if let Some(tag) = &variants[v].0 {
            path = with_suffix(&path, tag);
            long = long.map(|p| with_suffix(&p, tag));
        }
        if models.len() > 1 {
            path = with_suffix(&path, model);
            long = long.map(|p| with_suffix(&p, model));
        }
        outputs.extend(write_trajectory(&traj, &path, long.as_deref(), style)?);
        println!("{model}: {} samples, max drift {:e} -> {}", traj.len(), traj.max_drift(), path.display());
    }

    Ok(RunRecord {
        command: "simulate".into(),
        params: json!({
            "matrix": args.matrix.display().to_string(),
            "theta0": args.theta0,
            "model": format!("{:?}", args.model).to_lowercase(),
            "epsilon": args.epsilon,
            "phi": variants[0].1.phi,
            "dt": args.dt,
            "t_end": args.t_end,
            "method": format!("{:?}", args.method).to_lowercase(),
            "stride": args.stride,
            "window": args.window,
            "omega": args.omega,
            "sweep": sweep.map(|(n, v)| json!({ "param": n, "values": v })),
        }),
        seeds,
        inputs,
        manifest_path: manifest_beside(&out),
        outputs,
        failure: None,
    })
}

pub fn parse_scale(text: &str) -> Result<ScalePolicy> {
    if text == "keep" {
        return Ok(ScalePolicy::Keep);
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && *v != 0.0)
        .map(ScalePolicy::Multiply)
        .ok_or_else(|| InputError::new("--scale: expected \"keep\" or a nonzero factor").into())
}

pub fn repair_of(r: RepairArg) -> OrthogonalityRepair {
    match r {
        RepairArg::Project => OrthogonalityRepair::Project,
        RepairArg::None => OrthogonalityRepair::None,
    }
}

#[derive(Serialize)]
pub struct DesignReport {
    pub j: usize,
    pub lambda_star: f64,
    pub replaced_positions: [usize; 2],
    pub eigenvalues_before: Vec<f64>,
    pub max_overlap: f64,
    pub eigen_residual: f64,
    pub residual: f64,
}

/// Writes original.csv, designed.csv, theta0.csv, certificate.json and
/// design.json under `dir`.
pub fn design_into(
    dir: &Path,
    a: &AdjacencyMatrix,
    generator: (&str, Option<u64>, serde_json::Value),
    j: usize,
    scale: ScalePolicy,
    repair: OrthogonalityRepair,
) -> Result<(kuramoto_core::equilibria::Design, Vec<PathBuf>)> {
    let d = design_random_equilibrium(a, j, scale, repair)?;
    let mut outputs = write_matrix(&dir.join("original.csv"), a, generator.0, generator.1, generator.2.clone())?;
    outputs.extend(write_matrix(
        &dir.join("designed.csv"),
        &d.matrix,
        "designed",
        generator.1,
        json!({ "from": generator.0, "j": j, "scale": scale, "repair": repair }),
    )?);
    let theta_path = dir.join("theta0.csv");
    write_atomic(&theta_path, phases_csv(d.theta0.as_slice()).as_bytes())?;
    let cert_path = dir.join("certificate.json");
    write_json(&cert_path, &d.certificate)?;
    let report_path = dir.join("design.json");
    write_json(
        &report_path,
        &DesignReport {
            j,
            lambda_star: d.lambda_star,
            replaced_positions: d.replaced,
            eigenvalues_before: d.eigenvalues.clone(),
            max_overlap: d.max_overlap,
            eigen_residual: d.eigen_residual,
            residual: d.certificate.residual,
        },
    )?;
    outputs.extend([theta_path, cert_path, report_path]);
    Ok((d, outputs))
}

pub fn design(args: DesignArgs) -> Result<RunRecord> {
    let mut seeds = BTreeMap::new();
    let mut inputs = Vec::new();
    let (a, generator) = match &args.matrix {
        Some(p) => {
            inputs.push(p.clone());
            (read_matrix_csv(p)?, ("file", None, json!({ "path": p.display().to_string() })))
        }
        None => {
            seeds.insert("graph".into(), args.seed);
            (
                build_erdos_renyi(args.er_n, args.er_p, args.seed)?,
                ("er", Some(args.seed), json!({ "n": args.er_n, "p": args.er_p })),
            )
        }
    };
    let scale = parse_scale(&args.scale)?;
    let repair = repair_of(args.repair);
    let dir = default_output(args.output, "designed");
    let (d, outputs) = design_into(&dir, &a, generator, args.j, scale, repair)?;
    println!(
        "implanted twisted state j={} (lambda* = {}), eigen residual {:e}, residual {:e} -> {}",
        args.j,
        d.lambda_star,
        d.eigen_residual,
        d.certificate.residual,
        dir.display()
    );
    Ok(RunRecord {
        command: "design".into(),
        params: json!({
            "matrix": args.matrix.as_ref().map(|p| p.display().to_string()),
            "er_n": args.er_n,
            "er_p": args.er_p,
            "j": args.j,
            "scale": scale,
            "repair": repair,
        }),
        seeds,
        inputs,
        manifest_path: dir.join("manifest.json"),
        outputs,
        failure: None,
    })
}
