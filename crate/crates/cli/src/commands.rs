use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use steering::config::{FrameSpec, NamedFrame, StateSpec};
use steering::experiment::{
    self, estimate_correlation, propagate_uncertainty, run_scenario, simulate_counts, CountsRecord,
    EstimatedCorrelation, Scenario, ScenarioRow, SourceModel, UncertainParameter,
};
use steering::lhs::{self, MembershipVerdict, SphereGrid};
use steering::quantum::{self, BlochMarginals};
use steering::report::{self, sig6, ReportOptions};
use steering::steering::{self as st, CorrelationMatrix, Inequality, SteeringAssessment};
use steering::{Error, Result};

use crate::{Format, LhsArgs, Output, PredictArgs, ReproduceArgs, SimulateArgs, SweepArgs};

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

fn emit(output: &Output, default: Format, render: impl FnOnce(Format) -> Result<String>) -> Result<()> {
    let text = render(output.format.unwrap_or(default))?;
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn matrix_text(m: &CorrelationMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| format!("  [{}]\n", r.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(", ")))
        .collect()
}

fn assessment_line(a: &SteeringAssessment) -> String {
    format!(
        "{:<4} parameter {}  bound {}  margin {}  {}\n",
        a.inequality.name(),
        sig6(a.parameter),
        sig6(a.bound),
        sig6(a.margin),
        if a.violated { "violated" } else { "not violated" }
    )
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictConfig {
    state: StateSpec,
    alice_frame: FrameSpec,
    bob_frame: FrameSpec,
}

#[derive(Debug, Serialize)]
struct PredictReport {
    correlation: CorrelationMatrix,
    assessments: Vec<SteeringAssessment>,
    marginals: BlochMarginals,
    singlet_fidelity: f64,
}

pub fn predict(args: PredictArgs) -> Result<()> {
    if args.example_config {
        let example = PredictConfig {
            state: StateSpec::Werner { w: 0.984 },
            alice_frame: FrameSpec::Named {
                name: NamedFrame::StandardTriad,
            },
            bob_frame: FrameSpec::Named {
                name: NamedFrame::StandardTriad,
            },
        };
        print!("{}", to_json(&example)?);
        return Ok(());
    }
    let cfg: PredictConfig = read_config(args.config.as_deref().expect("required by clap"))?;
    let rho = cfg.state.build().map_err(|e| Error::Config(format!("state: {e}")))?;
    let alice = cfg.alice_frame.build()?;
    let bob = cfg.bob_frame.build()?;
    let t = quantum::spin_correlation_matrix(&rho)?;
    let m = st::predicted_correlation(&t, &alice, &bob);
    let mut assessments = vec![st::assess_ris(&m)?];
    if m.rows() == 2 {
        assessments.push(st::assess_nss(&m)?);
    }
    let report = PredictReport {
        correlation: m,
        assessments,
        marginals: quantum::marginals(&rho),
        singlet_fidelity: quantum::fidelity_with_pure(&rho, &quantum::singlet_vector())?,
    };
    emit(&args.output, Format::Text, |format| match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("inequality,parameter,bound,margin,violated\n");
            for a in &report.assessments {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    a.inequality.name(),
                    a.parameter,
                    a.bound,
                    a.margin,
                    a.violated
                ));
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = format!("M =\n{}", matrix_text(&report.correlation));
            for a in &report.assessments {
                s.push_str(&assessment_line(a));
            }
            Ok(s)
        }
    })
}

fn sweep_text(rows: &[ScenarioRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), sig6);
    let flag = |v: Option<bool>| v.map_or("-", |b| if b { "yes" } else { "no" });
    let mut s = format!(
        "{:>9} {:>9} {:>20} {:>9} {:>20} {:>5} {:>5}\n",
        "alpha_deg", "ris_pred", "ris_sim", "nss_pred", "nss_sim", "ris_v", "nss_v"
    );
    for r in rows {
        let sim = |v: Option<f64>, e: Option<f64>| match (v, e) {
            (Some(v), Some(e)) => format!("{} ± {}", sig6(v), sig6(e)),
            _ => "-".into(),
        };
        s.push_str(&format!(
            "{:>9} {:>9} {:>20} {:>9} {:>20} {:>5} {:>5}\n",
            sig6(r.alpha_deg),
            opt(r.ris_pred),
            sim(r.ris_sim, r.ris_err),
            opt(r.nss_pred),
            sim(r.nss_sim, r.nss_err),
            flag(r.ris_violated),
            flag(r.nss_violated)
        ));
    }
    s
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    if args.example_config {
        print!("{}", to_json(&Scenario::example())?);
        return Ok(());
    }
    let mut scenario: Scenario = read_config(args.config.as_deref().expect("required by clap"))?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(pairs) = args.pairs {
        scenario.pairs_per_setting = pairs;
    }
    if let Some(angle) = args.sys_angle_deg {
        scenario.sys_angle_deg = angle;
    }
    let rows = run_scenario(&scenario)?;
    emit(&args.output, Format::Csv, |format| match format {
        Format::Csv => {
            let mut buf = Vec::new();
            experiment::write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
        }
        Format::Json => to_json(&rows),
        Format::Text => Ok(sweep_text(&rows)),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LhsConfig {
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bob_frame: Option<FrameSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

pub fn lhs(args: LhsArgs) -> Result<()> {
    if args.example_config {
        let example = LhsConfig {
            matrix: vec![vec![-0.8, 0.0], vec![0.0, -0.8]],
            bob_frame: None,
            tol: Some(lhs::DEFAULT_TOL),
        };
        print!("{}", to_json(&example)?);
        return Ok(());
    }
    let cfg = if let Some(path) = &args.config {
        read_config::<LhsConfig>(path)?
    } else if let Some(text) = &args.matrix {
        LhsConfig {
            matrix: serde_json::from_str(text).map_err(|e| Error::Config(format!("--matrix: {e}")))?,
            bob_frame: None,
            tol: None,
        }
    } else if let Some(w) = args.werner {
        if !(1..=3).contains(&args.dims) {
            return Err(Error::Config(format!("--dims must be 1, 2 or 3, got {}", args.dims)));
        }
        LhsConfig {
            matrix: (0..args.dims)
                .map(|j| (0..args.dims).map(|k| if j == k { -w } else { 0.0 }).collect())
                .collect(),
            bob_frame: None,
            tol: None,
        }
    } else {
        return Err(Error::Config("give one of --config, --matrix or --werner".into()));
    };
    let target = CorrelationMatrix::from_rows(&cfg.matrix).map_err(|e| Error::Config(e.to_string()))?;
    let tol = args.tol.or(cfg.tol).unwrap_or(lhs::DEFAULT_TOL);
    let grid = SphereGrid::with_options(target.cols(), args.grid_deg, args.sphere_points)
        .map_err(|e| Error::Config(e.to_string()))?;
    let verdict: MembershipVerdict = match &cfg.bob_frame {
        Some(spec) => lhs::lhs_membership_in_frame(&target, &spec.build()?, &grid, tol)?,
        None => lhs::lhs_membership(&target, &grid, tol)?,
    };
    emit(&args.output, Format::Json, |format| match format {
        Format::Json => to_json(&verdict),
        Format::Csv => Ok(format!(
            "status,gauge,gap\n{},{},{}\n",
            if verdict.is_feasible() { "feasible" } else { "infeasible" },
            verdict.gauge,
            verdict.gap
        )),
        Format::Text => Ok(format!(
            "status {}\ngauge {}\ngap {}\n",
            if verdict.is_feasible() { "feasible" } else { "infeasible" },
            sig6(verdict.gauge),
            sig6(verdict.gap)
        )),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    state: StateSpec,
    alice_frame: FrameSpec,
    bob_frame: FrameSpec,
    pairs_per_setting: u64,
    #[serde(default = "half_degree")]
    sys_angle_deg: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift_sigma: Option<f64>,
    #[serde(default = "two_hundred")]
    n_resamples: usize,
}

fn half_degree() -> f64 {
    0.5
}

fn two_hundred() -> usize {
    200
}

#[derive(Debug, Serialize)]
struct SimulatedAssessment {
    #[serde(flatten)]
    parameter: UncertainParameter,
    predicted: f64,
    bound: f64,
    violated: bool,
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    counts: CountsRecord,
    estimate: EstimatedCorrelation,
    predicted: CorrelationMatrix,
    assessments: Vec<SimulatedAssessment>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    if args.example_config {
        let example = SimulateConfig {
            state: StateSpec::Werner { w: 0.984 },
            alice_frame: FrameSpec::Named {
                name: NamedFrame::StandardTriad,
            },
            bob_frame: FrameSpec::Named {
                name: NamedFrame::StandardTriad,
            },
            pairs_per_setting: 100_000,
            sys_angle_deg: 0.5,
            seed: 1,
            drift_sigma: None,
            n_resamples: 200,
        };
        print!("{}", to_json(&example)?);
        return Ok(());
    }
    let mut cfg: SimulateConfig = read_config(args.config.as_deref().expect("required by clap"))?;
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.pairs_per_setting = args.pairs.unwrap_or(cfg.pairs_per_setting);
    cfg.sys_angle_deg = args.sys_angle_deg.unwrap_or(cfg.sys_angle_deg);
    if !(cfg.sys_angle_deg >= 0.0 && cfg.sys_angle_deg.is_finite()) {
        return Err(Error::Config("sys_angle_deg must be finite and ≥ 0".into()));
    }

    let rho = cfg.state.build().map_err(|e| Error::Config(format!("state: {e}")))?;
    let t = quantum::spin_correlation_matrix(&rho)?;
    let alice = cfg.alice_frame.build()?;
    let bob = cfg.bob_frame.build()?;
    let source = SourceModel::new(rho, cfg.pairs_per_setting, cfg.drift_sigma)
        .map_err(|e| Error::Config(e.to_string()))?;
    let counts = simulate_counts(&source, &alice, &bob, cfg.seed)?;
    let estimate = estimate_correlation(&counts, cfg.sys_angle_deg.to_radians(), Some(&t))?;
    let predicted = st::predicted_correlation(&t, &alice, &bob);

    let mut inequalities = vec![Inequality::Ris];
    if alice.len() == 2 {
        inequalities.push(Inequality::Nss);
    }
    let mut assessments = Vec::new();
    for (k, inequality) in inequalities.into_iter().enumerate() {
        let u = propagate_uncertainty(
            &estimate,
            inequality,
            cfg.n_resamples,
            cfg.seed.wrapping_add(k as u64 + 1),
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        let ideal = match inequality {
            Inequality::Ris => st::assess_ris(&predicted)?,
            Inequality::Nss => st::assess_nss(&predicted)?,
        };
        assessments.push(SimulatedAssessment {
            parameter: u,
            predicted: ideal.parameter,
            bound: ideal.bound,
            violated: u.value > ideal.bound,
        });
    }
    let report = SimulateReport {
        counts,
        estimate,
        predicted,
        assessments,
    };
    emit(&args.output, Format::Json, |format| match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("inequality,value,uncertainty,predicted,bound,violated\n");
            for a in &report.assessments {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    a.parameter.inequality.name(),
                    a.parameter.value,
                    a.parameter.uncertainty,
                    a.predicted,
                    a.bound,
                    a.violated
                ));
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = format!("M_hat =\n{}", matrix_text(&report.estimate.m_hat));
            for a in &report.assessments {
                s.push_str(&format!(
                    "{:<4} simulated {} ± {}  predicted {}  bound {}  {}\n",
                    a.parameter.inequality.name(),
                    sig6(a.parameter.value),
                    sig6(a.parameter.uncertainty),
                    sig6(a.predicted),
                    sig6(a.bound),
                    if a.violated { "violated" } else { "not violated" }
                ));
            }
            Ok(s)
        }
    })
}

pub fn reproduce(args: ReproduceArgs) -> Result<()> {
    let mut options = ReportOptions::default();
    options.seed = args.seed.unwrap_or(options.seed);
    options.pairs_per_setting = args.pairs.unwrap_or(options.pairs_per_setting);
    options.sys_angle_deg = args.sys_angle_deg.unwrap_or(options.sys_angle_deg);
    if options.pairs_per_setting == 0 || !(options.sys_angle_deg >= 0.0 && options.sys_angle_deg.is_finite()) {
        return Err(Error::Config("--pairs must be ≥ 1 and --sys-angle-deg finite and ≥ 0".into()));
    }
    let rows = report::reproduction_table(&options)?;
    emit(&args.output, Format::Text, |format| match format {
        Format::Text => Ok(report::render_table(&rows)),
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            report::write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
        }
    })
}
