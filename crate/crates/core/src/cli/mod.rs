//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 input or usage error.
//! Reports go to standard output, diagnostics to standard error.

pub mod report;
pub mod spec_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ensemble::{allowed_subspace, purify, rho_left, schmidt, Ensemble, SubspaceProjector};
use crate::error::Error;
use crate::locc::{apply_kraus, concentrate, monotonicity_check, KrausOperator};
use crate::matcore::{hermitian_eigen, partial_trace_right, ComplexMatrix};
use crate::maxconf::{
    binomial_band, complete_pom, confidence_of, confidence_report, max_confidence, max_confidence_eigen,
    simulate_measurement, MIN_OUTCOME_PROBABILITY,
};
use crate::nosignal::{bound_bipartite, confidence_bipartite, marginal_invariance, subspace_leakage};

use report::{BoundEntry, Check, PomEntry, Report, SimInconclusive, SimOutcome, TransformEntry};
use spec_file::{matrix_to_json, parse_kraus, parse_spec, ParsedSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "qconf", version, about = "Maximum-confidence state discrimination with no-signalling verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Debug, Args)]
struct Common {
    /// Ensemble specification file (JSON).
    spec: PathBuf,
    /// Tolerance for verification checks; overrides the spec file.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum confidence bound for each state.
    Bound(Common),
    /// Optimal effects completed into a measurement.
    Pom(Common),
    /// Cross-check every result in the bipartite picture.
    Verify(Common),
    /// Monte Carlo run of the completed measurement.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Concentrate the entanglement of the ensemble's purification.
    Concentrate(Common),
    /// Apply a Kraus operator and compare bounds before and after.
    Transform {
        #[command(flatten)]
        common: Common,
        /// Kraus matrix file (nested [re, im] list).
        #[arg(long)]
        kraus: PathBuf,
    },
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli.command, err) {
        Ok((report, format, passed)) => {
            let text = match format {
                OutputFormat::Text => report.to_text(),
                OutputFormat::Machine => report.to_machine(),
            };
            let _ = out.write_all(text.as_bytes());
            if passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn load(common: &Common, err: &mut dyn Write) -> Result<(ParsedSpec, f64), Failure> {
    let spec = parse_spec(&common.spec).map_err(|e| Failure::Input(e.to_string()))?;
    for w in &spec.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let tolerance = common.tolerance.or(spec.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {tolerance}")));
    }
    Ok((spec, tolerance))
}

fn dispatch(command: Command, err: &mut dyn Write) -> Result<(Report, OutputFormat, bool), Failure> {
    match command {
        Command::Bound(common) => {
            let (spec, _) = load(&common, err)?;
            Ok((bound_report(&spec.ensemble)?, common.output, true))
        }
        Command::Pom(common) => {
            let (spec, _) = load(&common, err)?;
            Ok((pom_report(&spec.ensemble)?, common.output, true))
        }
        Command::Verify(common) => {
            let (spec, tol) = load(&common, err)?;
            let report = verify_report(&spec.ensemble, tol)?;
            let passed = matches!(report, Report::Verify { passed: true, .. });
            Ok((report, common.output, passed))
        }
        Command::Simulate { common, trials, seed } => {
            let (spec, _) = load(&common, err)?;
            Ok((simulate_report(&spec.ensemble, trials, seed)?, common.output, true))
        }
        Command::Concentrate(common) => {
            let (spec, _) = load(&common, err)?;
            Ok((concentrate_report(&spec.ensemble)?, common.output, true))
        }
        Command::Transform { common, kraus } => {
            let (spec, _) = load(&common, err)?;
            let matrix = parse_kraus(&kraus).map_err(|e| Failure::Input(e.to_string()))?;
            let report = transform_report(&spec.ensemble, matrix)?;
            let passed = matches!(report, Report::Transform { passed: true, .. });
            Ok((report, common.output, passed))
        }
    }
}

fn bound_report(ens: &Ensemble) -> Result<Report, Error> {
    let states = (0..ens.len())
        .map(|label| Ok(BoundEntry { label, bound: max_confidence(ens, label)? }))
        .collect::<Result<_, Error>>()?;
    Ok(Report::Bound { states })
}

fn pom_report(ens: &Ensemble) -> Result<Report, Error> {
    let pom = complete_pom(ens);
    let conf = confidence_report(ens, &pom)?;
    let states = pom
        .effects
        .iter()
        .zip(&conf.records)
        .map(|(e, rec)| PomEntry {
            label: rec.label,
            bound: rec.bound,
            effect: matrix_to_json(&e.matrix),
            achieved_confidence: rec.achieved,
            outcome_probability: rec.outcome_probability,
        })
        .collect();
    Ok(Report::Pom {
        states,
        fail_effect: pom.fail.as_ref().map(matrix_to_json),
        inconclusive_probability: conf.inconclusive_probability,
    })
}

/// Runs every consistency check between the two pictures.
fn verify_report(ens: &Ensemble, tol: f64) -> Result<Report, Error> {
    let mut checks = Vec::new();
    let mut push = |name: String, value: f64| {
        let passed = value.is_finite() && value.abs() <= tol;
        checks.push(Check { name, value, passed });
    };

    let bs = purify(ens);
    let rho = rho_left(ens);
    let marginal = partial_trace_right(&bs.density(), bs.dim_left(), bs.dim_right())?;
    push("rho_left_vs_partial_trace".into(), (&marginal - &rho).frobenius_norm());

    let mut recon = 0.0f64;
    for (j, set) in bs.index_sets().iter().enumerate() {
        let mut acc = ComplexMatrix::zeros(ens.dim(), ens.dim());
        for &i in set {
            acc += &ComplexMatrix::projector(&bs.amplitudes().column(i));
        }
        let target = ens.states()[j].density().scale(ens.prior(j));
        recon = recon.max((&acc - &target).frobenius_norm());
    }
    push("purification_reconstruction".into(), recon);

    let sd = schmidt(&bs);
    let spectrum = hermitian_eigen(&rho)?;
    let spectrum_delta = if spectrum.rank(crate::matcore::RANK_TOL) == sd.rank() {
        sd.coefficients
            .iter()
            .zip(&spectrum.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    push("schmidt_vs_rho_left_spectrum".into(), spectrum_delta);

    let pd = allowed_subspace(&bs, &rho)?;
    let pd_schmidt = SubspaceProjector::from_schmidt(&sd);
    push("projector_partial_trace_vs_schmidt".into(), (pd.matrix() - pd_schmidt.matrix()).frobenius_norm());
    push("projector_idempotency".into(), pd.idempotency_defect());
    let right = bs.right_marginal();
    push(
        "projector_fixes_right_marginal".into(),
        (&pd.matrix().matmul(&right) - &right).frobenius_norm(),
    );

    for j in 0..ens.len() {
        let bound = max_confidence(ens, j)?;
        push(format!("bound_delta[{j}]"), bound_bipartite(&bs, &pd, j)? - bound);
        if ens.states()[j].is_pure() {
            push(format!("pure_vs_eigen_bound[{j}]"), max_confidence_eigen(ens, j)? - bound);
        }
    }

    let pom = complete_pom(ens);
    push("pom_completeness".into(), pom.completeness_deviation());
    push("pom_negativity".into(), (-pom.min_element_eigenvalue()).max(0.0));
    for e in &pom.effects {
        let j = e.label;
        let achieved = confidence_of(ens, &e.matrix, j)?;
        push(format!("achievability[{j}]"), achieved - max_confidence(ens, j)?);
        push(
            format!("confidence_delta[{j}]"),
            confidence_bipartite(&bs, &e.matrix, j)? - achieved,
        );
        push(format!("leakage[{j}]"), subspace_leakage(&bs, &pd, &e.matrix)?);
    }
    if let Some(fail) = &pom.fail {
        if rho.trace_product(fail).re > MIN_OUTCOME_PROBABILITY {
            push("leakage[fail]".into(), subspace_leakage(&bs, &pd, fail)?);
        }
    }
    push("marginal_invariance".into(), marginal_invariance(&bs, &pom)?);

    let passed = checks.iter().all(|c| c.passed);
    Ok(Report::Verify {
        tolerance: tol,
        checks,
        passed,
    })
}

fn simulate_report(ens: &Ensemble, trials: u64, seed: u64) -> Result<Report, Error> {
    let pom = complete_pom(ens);
    let conf = confidence_report(ens, &pom)?;
    let sim = simulate_measurement(ens, &pom, trials, seed)?;
    let outcomes = sim
        .outcomes
        .iter()
        .zip(&conf.records)
        .map(|(tally, rec)| {
            let band = rec.achieved.map_or(f64::INFINITY, |c| binomial_band(c, tally.count, 3.0));
            let within_band = match (tally.conditional_frequency, rec.achieved) {
                (Some(f), Some(c)) => (f - c).abs() <= band.max(1e-12),
                (None, _) => true,
                (Some(_), None) => false,
            };
            SimOutcome {
                label: tally.label,
                count: tally.count,
                correct: tally.correct,
                conditional_frequency: tally.conditional_frequency,
                analytic_confidence: rec.achieved,
                band_3sigma: band,
                within_band,
            }
        })
        .collect();
    let band = binomial_band(conf.inconclusive_probability, trials, 3.0);
    let inconclusive = SimInconclusive {
        count: sim.inconclusive_count,
        frequency: sim.inconclusive_frequency,
        analytic_probability: conf.inconclusive_probability,
        band_3sigma: band,
        within_band: (sim.inconclusive_frequency - conf.inconclusive_probability).abs() <= band.max(1e-12),
    };
    Ok(Report::Simulate {
        trials,
        seed,
        outcomes,
        inconclusive,
    })
}

fn concentrate_report(ens: &Ensemble) -> Result<Report, Error> {
    let bs = purify(ens);
    let res = concentrate(&bs)?;
    Ok(Report::Concentrate {
        schmidt_rank: res.schmidt_rank,
        schmidt_before: schmidt(&bs).coefficients,
        schmidt_after: schmidt(&res.post_state).coefficients,
        lambda_min: res.lambda_min,
        success_probability: res.success_probability,
        kraus: matrix_to_json(res.kraus.matrix()),
        fail_effect: matrix_to_json(&res.fail_effect),
    })
}

fn transform_report(ens: &Ensemble, matrix: ComplexMatrix) -> Result<Report, Error> {
    let kraus = KrausOperator::new(matrix)?;
    let outcome = apply_kraus(ens, &kraus)?;
    let states: Vec<TransformEntry> = (0..ens.len())
        .map(|label| {
            Ok(TransformEntry {
                label,
                prior_after: outcome.ensemble.prior(label),
                record: monotonicity_check(ens, &kraus, label)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    let passed = states.iter().all(|s| s.record.holds);
    Ok(Report::Transform {
        success_probability: outcome.success_probability,
        kraus_rank: kraus.rank(),
        states,
        passed,
    })
}
