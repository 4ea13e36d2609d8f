//! Report payloads for each subcommand.
//!
//! Every report is built once as a serializable value; the machine form is its
//! JSON encoding and the text form is rendered from the same fields.

use std::fmt::Write as _;

use serde::Serialize;

use crate::locc::MonotonicityRecord;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub label: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PomEntry {
    pub label: usize,
    pub bound: f64,
    pub effect: MatrixJson,
    pub achieved_confidence: Option<f64>,
    pub outcome_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimOutcome {
    pub label: usize,
    pub count: u64,
    pub correct: u64,
    pub conditional_frequency: Option<f64>,
    pub analytic_confidence: Option<f64>,
    pub band_3sigma: f64,
    pub within_band: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimInconclusive {
    pub count: u64,
    pub frequency: f64,
    pub analytic_probability: f64,
    pub band_3sigma: f64,
    pub within_band: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformEntry {
    pub label: usize,
    pub prior_after: f64,
    #[serde(flatten)]
    pub record: MonotonicityRecord,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Bound {
        states: Vec<BoundEntry>,
    },
    Pom {
        states: Vec<PomEntry>,
        fail_effect: Option<MatrixJson>,
        inconclusive_probability: f64,
    },
    Verify {
        tolerance: f64,
        checks: Vec<Check>,
        passed: bool,
    },
    Simulate {
        trials: u64,
        seed: u64,
        outcomes: Vec<SimOutcome>,
        inconclusive: SimInconclusive,
    },
    Concentrate {
        schmidt_rank: usize,
        schmidt_before: Vec<f64>,
        schmidt_after: Vec<f64>,
        lambda_min: f64,
        success_probability: f64,
        kraus: MatrixJson,
        fail_effect: MatrixJson,
    },
    Transform {
        success_probability: f64,
        kraus_rank: usize,
        states: Vec<TransformEntry>,
        passed: bool,
    },
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| v.to_string())
}

fn matrix_text(out: &mut String, indent: &str, m: &MatrixJson) {
    for row in m {
        let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re}{im:+}i")).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(", "));
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

impl Report {
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Bound { states } => {
                let _ = writeln!(out, "maximum confidence bounds");
                for s in states {
                    let _ = writeln!(out, "  state {}: {}", s.label, s.bound);
                }
            }
            Report::Pom {
                states,
                fail_effect,
                inconclusive_probability,
            } => {
                let _ = writeln!(out, "maximum confidence measurement");
                for s in states {
                    let _ = writeln!(out, "  state {}", s.label);
                    let _ = writeln!(out, "    bound: {}", s.bound);
                    let _ = writeln!(out, "    achieved confidence: {}", opt(s.achieved_confidence));
                    let _ = writeln!(out, "    outcome probability: {}", s.outcome_probability);
                    let _ = writeln!(out, "    effect:");
                    matrix_text(&mut out, "      ", &s.effect);
                }
                let _ = writeln!(out, "  inconclusive probability: {inconclusive_probability}");
                if let Some(f) = fail_effect {
                    let _ = writeln!(out, "  fail effect:");
                    matrix_text(&mut out, "    ", f);
                }
            }
            Report::Verify {
                tolerance,
                checks,
                passed,
            } => {
                let _ = writeln!(out, "verification (tolerance {tolerance:e})");
                for c in checks {
                    let _ = writeln!(out, "  [{}] {}: {:e}", verdict(c.passed), c.name, c.value);
                }
                let _ = writeln!(out, "result: {}", if *passed { "PASS" } else { "FAIL" });
            }
            Report::Simulate {
                trials,
                seed,
                outcomes,
                inconclusive,
            } => {
                let _ = writeln!(out, "simulation: {trials} trials, seed {seed}");
                for o in outcomes {
                    let _ = writeln!(
                        out,
                        "  [{}] outcome {}: count {}, correct {}, conditional frequency {}, analytic {}, 3-sigma band {}",
                        verdict(o.within_band),
                        o.label,
                        o.count,
                        o.correct,
                        opt(o.conditional_frequency),
                        opt(o.analytic_confidence),
                        o.band_3sigma
                    );
                }
                let _ = writeln!(
                    out,
                    "  [{}] inconclusive: count {}, frequency {}, analytic {}, 3-sigma band {}",
                    verdict(inconclusive.within_band),
                    inconclusive.count,
                    inconclusive.frequency,
                    inconclusive.analytic_probability,
                    inconclusive.band_3sigma
                );
            }
            Report::Concentrate {
                schmidt_rank,
                schmidt_before,
                schmidt_after,
                lambda_min,
                success_probability,
                kraus,
                fail_effect,
            } => {
                let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
                let _ = writeln!(out, "entanglement concentration");
                let _ = writeln!(out, "  schmidt rank: {schmidt_rank}");
                let _ = writeln!(out, "  schmidt coefficients before: [{}]", list(schmidt_before));
                let _ = writeln!(out, "  schmidt coefficients after: [{}]", list(schmidt_after));
                let _ = writeln!(out, "  smallest coefficient: {lambda_min}");
                let _ = writeln!(out, "  success probability: {success_probability}");
                let _ = writeln!(out, "  filter:");
                matrix_text(&mut out, "    ", kraus);
                let _ = writeln!(out, "  fail effect:");
                matrix_text(&mut out, "    ", fail_effect);
            }
            Report::Transform {
                success_probability,
                kraus_rank,
                states,
                passed,
            } => {
                let _ = writeln!(out, "transformation (rank {kraus_rank}, success probability {success_probability})");
                for s in states {
                    let r = &s.record;
                    let _ = writeln!(
                        out,
                        "  [{}] state {}: prior after {}, bound before {}, bound after {}, full rank on support {}",
                        verdict(r.holds),
                        s.label,
                        s.prior_after,
                        r.before,
                        r.after,
                        r.full_rank
                    );
                }
                let _ = writeln!(out, "result: {}", if *passed { "PASS" } else { "FAIL" });
            }
        }
        out
    }
}
