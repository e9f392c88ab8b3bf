//! Command-line front end. Every verb reads JSON fixtures, calls the library
//! and writes a JSON report to stdout or `--out`.
//!
//! Exit status: 0 success, 2 validation or parse error, 3 violated hypothesis
//! (not a frame, not a dual, no direct sum), 4 non-convergence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::approx::{approx_dual_residual, consistency_conversions, interiority_experiment, perturbation_certificate};
use crate::error::{Error, Result};
use crate::frames::{canonical_oblique_dual, frame_bounds, is_oblique_dual, oblique_dual_family, FiniteFrame};
use crate::io::{
    matrix_rows, parse_fixture, read_coupling, read_frame, read_measure, read_pair, read_subspace, to_canonical_json,
    to_vec, write_atomic, CouplingFile, FrameFile, MeasureFile, PairFile, VectorsFile,
};
use crate::linalg::{Subspace, Tolerance, Vector};
use crate::measure::{classify_probabilistic_frame, DiscreteMeasure};
use crate::optimize::{minimize_dual_potential, OptimizerOptions};
use crate::potentials::{
    constant_diagonal_bound, diagonal_potential, dual_p_potential, etf_lift, is_even_integer, mixed_coherence,
    mixed_gram,
};
use crate::prob_frames::{canonical_dual_measure, is_oblique_dual_measure, pf_dual_potential, PotentialMode};
use crate::transport::{exact_w2, glue};

#[derive(Debug, Parser)]
#[command(name = "oblique-duals", version, about = "Oblique dual frames, dual potentials and probabilistic duals")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Equality tolerance for dual, support and tightness checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write tabular output (trajectories, trial rows) as CSV here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Seed for randomized verbs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PotentialKind {
    Full,
    Diagonal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureMode {
    Pushforward,
    General,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Frame bounds and tightness of a finite frame.
    FrameInfo {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Canonical oblique dual on V, or the dual generated by --h.
    ObliqueDual {
        #[arg(long)]
        frame: PathBuf,
        /// Target subspace (defaults to the frame's subspace).
        #[arg(long)]
        v: Option<PathBuf>,
        /// Dual-family parameters, one vector of V per frame vector.
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Tests sum_i w_i v_i^T = pi_{W V^perp}.
    CheckDual {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Dual p-frame potential of a pair.
    Potential {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = PotentialKind::Full)]
        mode: PotentialKind,
    },
    /// Mixed coherence against the Welch-type bound, with the signature matrix.
    Coherence {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Lifts a frame to sqrt(N/d) (S^dagger)^{1/2} w_i and tests for an ETF.
    EtfLift {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Minimizes the dual p-potential over all oblique duals on V.
    Minimize {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        v: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Classifies a discrete measure as a probabilistic frame for W.
    PfClassify {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        w: Option<PathBuf>,
    },
    /// Canonical oblique dual measure and its graph coupling.
    PfDual {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long)]
        v: Option<PathBuf>,
    },
    /// Certifies nu as an oblique dual of mu through a coupling.
    PfCheck {
        #[command(flatten)]
        inputs: DualInputs,
    },
    /// Probabilistic dual potential trace(S_mu S_nu) and its lower bound.
    PfPotential {
        #[command(flatten)]
        inputs: DualInputs,
        #[arg(long, value_enum, default_value_t = MeasureMode::General)]
        mode: MeasureMode,
    },
    /// Exact 2-Wasserstein distance with an optimal coupling.
    W2 {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Glues two couplings along their shared marginal.
    Glue {
        #[arg(long)]
        coupling12: PathBuf,
        #[arg(long)]
        coupling23: PathBuf,
    },
    /// Approximate-dual residual, consistency bound and their conversions.
    ApproxCheck {
        #[command(flatten)]
        inputs: DualInputs,
    },
    /// Certificate that a W2 perturbation eta of a dual is an approximate dual.
    Perturb {
        #[command(flatten)]
        inputs: DualInputs,
        #[arg(long)]
        eta: PathBuf,
        /// Coupling of nu and eta (defaults to an optimal one).
        #[arg(long)]
        pert_coupling: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
    },
    /// Monte-Carlo check that W2 perturbations of the canonical dual stay approximate duals.
    Interiority {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long)]
        v: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DualInputs {
    #[arg(long)]
    pub mu: PathBuf,
    #[arg(long)]
    pub nu: PathBuf,
    #[arg(long)]
    pub coupling: PathBuf,
    /// Subspace of mu (defaults to the span of its support).
    #[arg(long)]
    pub w: Option<PathBuf>,
    /// Subspace of nu (defaults to W).
    #[arg(long)]
    pub v: Option<PathBuf>,
}

/// A finished command: the JSON report and optional CSV text.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: Value,
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()))
}

fn support_span(mu: &DiscreteMeasure, tol: &Tolerance) -> Result<Subspace> {
    let support: Vec<Vector> = mu.support().map(|(_, x, _)| x.clone()).collect();
    Subspace::span(&support, tol)
}

fn measure_subspaces(mu: &DiscreteMeasure, w: &Option<PathBuf>, v: &Option<PathBuf>, tol: &Tolerance) -> Result<(Subspace, Subspace)> {
    let w = match w {
        Some(p) => read_subspace(p, tol)?,
        None => support_span(mu, tol)?,
    };
    let v = match v {
        Some(p) => read_subspace(p, tol)?,
        None => w.clone(),
    };
    Ok((w, v))
}

fn target_subspace(frame: &FiniteFrame, v: &Option<PathBuf>, tol: &Tolerance) -> Result<Subspace> {
    match v {
        Some(p) => read_subspace(p, tol),
        None => Ok(frame.subspace().clone()),
    }
}

struct DualData {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    gamma: crate::transport::Coupling,
    w: Subspace,
    v: Subspace,
}

fn load_dual(inputs: &DualInputs, tol: &Tolerance) -> Result<DualData> {
    let mu = read_measure(&inputs.mu)?;
    let nu = read_measure(&inputs.nu)?;
    let gamma = read_coupling(&inputs.coupling)?;
    let (w, v) = measure_subspaces(&mu, &inputs.w, &inputs.v, tol)?;
    Ok(DualData { mu, nu, gamma, w, v })
}

fn csv_text<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Runs one verb and returns its report without touching stdout or files.
pub fn execute(verb: &Verb, common: &Common) -> Result<Output> {
    let tol = Tolerance::with_eq_tol(common.tol);
    let tol = &tol;
    let report = |v: Value| Ok(Output { report: v, csv: None });
    match verb {
        Verb::FrameInfo { frame } => {
            let f = read_frame(frame, tol)?;
            let (a, b) = frame_bounds(&f, tol)?;
            report(json!({
                "ambient_dim": f.ambient_dim(),
                "subspace_dim": f.subspace().dim(),
                "vectors": f.len(),
                "lower_bound": a,
                "upper_bound": b,
                "is_tight": (b - a) <= tol.eq_tol,
                "is_parseval": (b - a) <= tol.eq_tol && (a - 1.0).abs() <= tol.eq_tol,
            }))
        }
        Verb::ObliqueDual { frame, v, h } => {
            let f = read_frame(frame, tol)?;
            let v = target_subspace(&f, v, tol)?;
            let pair = match h {
                Some(path) => {
                    let file: VectorsFile = parse_fixture(path)?;
                    let h: Vec<Vector> = file.vectors.iter().map(|x| Vector::from_column_slice(x)).collect();
                    oblique_dual_family(&f, &v, &h, tol)?
                }
                None => canonical_oblique_dual(&f, &v, tol)?,
            };
            report(to_value(&PairFile::from_pair(&pair))?)
        }
        Verb::CheckDual { pair } => {
            let p: PairFile = parse_fixture(pair)?;
            let (is_dual, residual) = is_oblique_dual(&p.synthesis.to_frame(tol)?, &p.analysis.to_frame(tol)?, tol)?;
            report(json!({ "is_dual": is_dual, "residual": residual }))
        }
        Verb::Potential { pair, p, mode } => {
            let pair = read_pair(pair, tol)?;
            let r = match mode {
                PotentialKind::Full => dual_p_potential(&pair, *p, tol)?,
                PotentialKind::Diagonal => diagonal_potential(&pair, *p, tol)?,
            };
            let mut value = to_value(&r)?;
            if matches!(mode, PotentialKind::Full) && is_even_integer(*p) {
                let bound = constant_diagonal_bound(pair.len(), pair.synthesis.subspace().dim(), *p);
                value["constant_diagonal_bound"] = json!(bound);
            }
            report(value)
        }
        Verb::Coherence { pair } => {
            let pair = read_pair(pair, tol)?;
            let r = mixed_coherence(&pair, tol)?;
            let g = mixed_gram(&pair, tol)?;
            let mut value = to_value(&r)?;
            value["mixed_gram"] = json!(matrix_rows(&g.gram));
            value["signature"] = json!(g.signature.as_ref().map(matrix_rows));
            report(value)
        }
        Verb::EtfLift { frame } => {
            let lift = etf_lift(&read_frame(frame, tol)?, tol)?;
            report(json!({
                "is_equiangular_tight": lift.is_equiangular_tight,
                "lifted": FrameFile::from_frame(&lift.psi),
            }))
        }
        Verb::Minimize { frame, v, p } => {
            let f = read_frame(frame, tol)?;
            let v = target_subspace(&f, v, tol)?;
            let opts = OptimizerOptions { seed: common.seed, ..Default::default() };
            let m = minimize_dual_potential(&f, &v, *p, &opts, tol)?;
            #[derive(Serialize)]
            struct Step {
                iteration: usize,
                potential: f64,
            }
            let steps: Vec<Step> = m.trajectory.iter().enumerate().map(|(iteration, &potential)| Step { iteration, potential }).collect();
            Ok(Output {
                report: json!({
                    "p": p,
                    "value": m.trajectory.last(),
                    "iterations": m.iterations,
                    "grad_norm": m.grad_norm,
                    "pair": PairFile::from_pair(&m.pair),
                }),
                csv: Some(csv_text(&steps)?),
            })
        }
        Verb::PfClassify { mu, w } => {
            let mu = read_measure(mu)?;
            let (w, _) = measure_subspaces(&mu, w, &None, tol)?;
            let r = classify_probabilistic_frame(&mu, &w, tol)?;
            report(json!({
                "second_moment": r.second_moment,
                "frame_operator": matrix_rows(&r.frame_operator),
                "is_frame": r.is_frame,
                "bounds": r.bounds,
                "is_tight": r.is_tight,
                "is_parseval": r.is_parseval,
            }))
        }
        Verb::PfDual { mu, w, v } => {
            let mu = read_measure(mu)?;
            let (w, v) = measure_subspaces(&mu, w, v, tol)?;
            let (nu, gamma) = canonical_dual_measure(&mu, &w, &v, tol)?;
            report(json!({ "nu": MeasureFile::from_measure(&nu), "coupling": CouplingFile::from_coupling(&gamma) }))
        }
        Verb::PfCheck { inputs } => {
            let d = load_dual(inputs, tol)?;
            report(to_value(&is_oblique_dual_measure(&d.mu, &d.nu, &d.gamma, &d.w, &d.v, tol)?)?)
        }
        Verb::PfPotential { inputs, mode } => {
            let d = load_dual(inputs, tol)?;
            let mode = match mode {
                MeasureMode::Pushforward => PotentialMode::Pushforward,
                MeasureMode::General => PotentialMode::General,
            };
            report(to_value(&pf_dual_potential(&d.mu, &d.nu, &d.gamma, &d.w, &d.v, mode, tol)?)?)
        }
        Verb::W2 { mu, nu } => {
            let s = exact_w2(&read_measure(mu)?, &read_measure(nu)?)?;
            report(json!({
                "distance": s.distance,
                "certificate": { "cost": s.certificate.cost, "dual_gap": s.certificate.dual_gap, "iterations": s.certificate.iterations },
                "coupling": CouplingFile::from_coupling(&s.coupling),
            }))
        }
        Verb::Glue { coupling12, coupling23 } => {
            let tri = glue(&read_coupling(coupling12)?, &read_coupling(coupling23)?, tol.eq_tol)?;
            let triples: Vec<Value> =
                tri.triples().iter().map(|(x, y, z, w)| json!([to_vec(x), to_vec(y), to_vec(z), w])).collect();
            report(json!({ "triples": triples, "outer": CouplingFile::from_coupling(&tri.project_xz()) }))
        }
        Verb::ApproxCheck { inputs } => {
            let d = load_dual(inputs, tol)?;
            let r = approx_dual_residual(&d.mu, &d.nu, &d.gamma, &d.w, &d.v, tol)?;
            let b_nu = classify_probabilistic_frame(&d.nu, &d.v, tol)?
                .bounds
                .ok_or_else(|| Error::NotAFrame("nu does not span V".into()))?
                .1;
            let c = consistency_conversions(&r, b_nu, &d.nu, &d.w, &d.v, tol)?;
            report(json!({
                "epsilon_residual": r.epsilon_residual,
                "consistency_bound": r.consistency_bound,
                "upper_bound_nu": b_nu,
                "conversions": c,
            }))
        }
        Verb::Perturb { inputs, eta, pert_coupling, eps } => {
            let d = load_dual(inputs, tol)?;
            let eta = read_measure(eta)?;
            let gamma_pert = match pert_coupling {
                Some(p) => read_coupling(p)?,
                None => exact_w2(&d.nu, &eta)?.coupling,
            };
            let c = perturbation_certificate(&d.mu, &d.nu, &d.gamma, &eta, &gamma_pert, *eps, &d.w, &d.v, None, tol)?;
            report(json!({
                "lambda": c.lambda,
                "a_lower": c.a_lower,
                "a_optimal": c.a_optimal,
                "c_upper": c.c_upper,
                "epsilon": c.epsilon,
                "epsilon_claimed": c.epsilon_claimed,
                "epsilon_actual": c.epsilon_actual,
                "eta_lower_bound": c.eta_lower_bound,
                "eta_lower_bound_predicted": c.eta_lower_bound_predicted,
                "holds": c.holds,
                "glued_coupling": CouplingFile::from_coupling(&c.glued_coupling),
            }))
        }
        Verb::Interiority { mu, w, v, eps, trials } => {
            let mu = read_measure(mu)?;
            let (w, v) = measure_subspaces(&mu, w, v, tol)?;
            let r = interiority_experiment(&mu, &w, &v, *eps, *trials, common.seed, tol)?;
            Ok(Output { report: to_value(&r)?, csv: Some(csv_text(&r.rows)?) })
        }
    }
}

fn emit(output: &Output, common: &Common) -> Result<()> {
    let text = to_canonical_json(&output.report)?;
    match &common.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&common.csv, &output.csv) {
        write_atomic(path, csv)?;
    }
    Ok(())
}

/// Parses `args`, runs the verb and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.verb, &cli.common).and_then(|out| emit(&out, &cli.common)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
