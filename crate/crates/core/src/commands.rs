//! Command implementations behind the CLI. Each command takes parsed inputs
//! and returns a report plus its exit code; reading and writing files is
//! left to the caller except for the loaders below.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_centered, Family, FamilyFile};
use crate::error::{Error, Result};
use crate::generators::sweep::{run_sweep, write_csv, RowStatus, SweepOptions, SweepSpec};
use crate::generators::{generate, InstanceSpec};
use crate::intersection::{
    intersection_number_bruteforce, intersection_number_exact, verify_certificate,
    DEFAULT_BRUTE_FORCE_BUDGET,
};
use crate::kelley::{
    cover_from_measure, mn_min_cover_with, synthesize_measure_from_cover, verify_classes,
    CoverCertificate, CoverClass, Measure, MnMode, DEFAULT_SEARCH_BUDGET,
};
use crate::rational::Rational;
use crate::report::{
    BudgetEvent, ClassCheck, CommandResult, CoverResult, GenResult, Instance, InumResult,
    KelleyVerifyResult, MnResult, OracleVerdict, Report, SweepResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

/// Exit code for an error: 2 for malformed or out-of-domain input, 3 for an
/// exhausted budget, 4 for a certificate that fails verification.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Certificate { .. } => EXIT_CERTIFICATE,
        Error::Structural(_)
        | Error::Domain(_)
        | Error::Schema(_)
        | Error::Io { .. }
        | Error::Json(_) => EXIT_INPUT,
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub jobs: usize,
    /// Overrides every default work budget when set.
    pub budget: Option<u64>,
    pub timings: bool,
    /// Overrides the seed of instance specs when set.
    pub seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            jobs: 1,
            budget: None,
            timings: false,
            seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
    /// Sweep series as CSV.
    pub csv: Option<String>,
    /// Materialized family file, pretty JSON.
    pub family_file: Option<String>,
}

impl Outcome {
    fn new(report: Report, exit_code: i32) -> Self {
        Outcome {
            report,
            exit_code,
            csv: None,
            family_file: None,
        }
    }
}

struct Timer {
    enabled: bool,
    phases: BTreeMap<String, u64>,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer {
            enabled,
            phases: BTreeMap::new(),
        }
    }

    fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.phases
                .insert(name.to_string(), start.elapsed().as_millis() as u64);
        }
        out
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a family file; diagnostics name the offending field.
pub fn parse_family(text: &str, origin: &str) -> Result<(FamilyFile, Family)> {
    let file: FamilyFile =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("{origin}: {e}")))?;
    let family = file.into_family()?;
    Ok((file, family))
}

pub fn load_family(path: &Path) -> Result<(FamilyFile, Family)> {
    parse_family(&read(path)?, &path.display().to_string())
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn json_arg<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), "inline spec".to_string())
    } else {
        (read(Path::new(arg))?, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{origin}: {e}")))
}

pub fn load_instance_spec(arg: &str) -> Result<InstanceSpec> {
    json_arg(arg)
}

pub fn load_sweep_spec(arg: &str) -> Result<SweepSpec> {
    json_arg(arg)
}

/// Comma-separated `p/q` values.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|e| Error::domain(format!("{t:?}: {e}")))
        })
        .collect()
}

/// A file holding a JSON array of `"p/q"` strings, or an inline
/// comma-separated list.
pub fn load_measure(arg: &str) -> Result<Measure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{arg}: {e}")))
    } else {
        Measure::new(parse_rational_list(arg)?)
    }
}

/// On-disk cover: classes with members, threshold and witness measure.
/// `covers_all` is optional and checked against the family when present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub classes: Vec<CoverClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers_all: Option<bool>,
}

impl CoverFile {
    pub fn into_certificate(self, f: &Family) -> Result<CoverCertificate> {
        let claimed = self.covers_all;
        let mut cert = CoverCertificate::new(f, self.classes);
        if let Some(c) = claimed {
            cert.covers_all = c;
        }
        cert.check_structure(f)?;
        Ok(cert)
    }
}

pub fn load_cover(path: &Path) -> Result<CoverFile> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct InumArgs {
    pub brute: Option<u64>,
    pub oracle_check: bool,
}

pub fn cmd_inum(file: &FamilyFile, f: &Family, args: InumArgs, s: &Settings) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let budget = s.budget.unwrap_or(DEFAULT_BRUTE_FORCE_BUDGET);
    let cert = timer.phase("exact", || intersection_number_exact(f))?;
    let certificate_verified = cert.lp_verified && verify_certificate(&cert, f);
    let witness_length = cert.witness_sequence.as_ref().map_or(0, |w| w.total());

    let max_len = match (args.brute, args.oracle_check) {
        (Some(l), _) => Some(l),
        (None, true) => Some(witness_length.max(1)),
        (None, false) => None,
    };
    let mut budget_events = Vec::new();
    let brute = match max_len {
        Some(l) if !f.is_empty() => {
            let r = timer.phase("brute_force", || {
                intersection_number_bruteforce(f, l, budget)
            })?;
            budget_events.push(BudgetEvent {
                stage: "brute_force".into(),
                limit: budget,
                used: r.enumerated,
                unit: "multisets".into(),
                exceeded: false,
            });
            Some(r)
        }
        _ => None,
    };
    let oracle = match (&brute, args.oracle_check) {
        (Some(b), true) => {
            let dominates = b.value >= cert.value;
            let equality_expected = b.max_len >= witness_length;
            Some(OracleVerdict {
                max_len: b.max_len,
                brute_value: b.value.clone(),
                exact_value: cert.value.clone(),
                witness_length,
                dominates,
                equality_expected,
                agrees: dominates && (!equality_expected || b.value == cert.value),
            })
        }
        _ => None,
    };
    let ok = certificate_verified && oracle.as_ref().is_none_or(|o| o.agrees);
    let mut report = Report::new(
        "inum",
        Instance::Family(file.clone()),
        CommandResult::Inum(InumResult {
            certificate: cert,
            certificate_verified,
            centered: is_centered(f),
            brute_force: brute,
            oracle,
        }),
    );
    report.timings = timer.phases;
    report.budget_events = budget_events;
    Ok(Outcome::new(
        report,
        if ok { EXIT_OK } else { EXIT_CERTIFICATE },
    ))
}

#[derive(Debug, Clone)]
pub struct MnArgs {
    pub epsilon: Rational,
    pub mode: MnMode,
    pub strict: bool,
}

pub fn cmd_mn(file: &FamilyFile, f: &Family, args: &MnArgs, s: &Settings) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let budget = s.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let rep = timer.phase("search", || {
        mn_min_cover_with(f, &args.epsilon, args.mode, budget, args.strict)
    })?;
    let delta = Rational::one() - &args.epsilon;
    let reverified = timer.phase("reverify", || -> Result<bool> {
        for c in &rep.certificate.classes {
            let value = intersection_number_exact(&f.subfamily(&c.members)?)?.value;
            let clears = if args.strict {
                value > delta
            } else {
                value >= delta
            };
            if !clears || value != c.threshold {
                return Ok(false);
            }
        }
        Ok(rep.certificate.covers_all)
    })?;
    let mut budget_events = Vec::new();
    if args.mode == MnMode::Exact {
        budget_events.push(BudgetEvent {
            stage: "exact_search".into(),
            limit: budget,
            used: rep.search_nodes,
            unit: "search nodes".into(),
            exceeded: false,
        });
    }
    let mut report = Report::new(
        "mn",
        Instance::Family(file.clone()),
        CommandResult::Mn(MnResult {
            report: rep,
            reverified,
        }),
    );
    report.timings = timer.phases;
    report.budget_events = budget_events;
    Ok(Outcome::new(
        report,
        if reverified {
            EXIT_OK
        } else {
            EXIT_CERTIFICATE
        },
    ))
}

#[derive(Debug, Clone, Default)]
pub struct CoverArgs {
    /// Defaults to the optimal measure of the family.
    pub measure: Option<Measure>,
    /// Defaults to the distinct positive values of the measure on the
    /// family, descending.
    pub grid: Option<Vec<Rational>>,
}

pub fn cmd_cover(file: &FamilyFile, f: &Family, args: &CoverArgs, s: &Settings) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let mu = match &args.measure {
        Some(m) => m.clone(),
        None => timer
            .phase("optimal_measure", || intersection_number_exact(f))?
            .witness_measure
            .ok_or_else(|| Error::domain("an empty family has no optimal measure"))?,
    };
    let grid = match &args.grid {
        Some(g) => g.clone(),
        None => {
            let mut g: Vec<Rational> = f
                .elements()
                .iter()
                .map(|a| mu.of(a))
                .filter(Rational::is_positive)
                .collect();
            g.sort_by(|a, b| b.cmp(a));
            g.dedup();
            g
        }
    };
    let certificate = cover_from_measure(&mu, f, &grid)?;
    let verdicts = verify_classes(f, &certificate)?;
    let class_checks = timer.phase("reverify", || {
        certificate
            .classes
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let value = intersection_number_exact(&f.subfamily(&c.members)?)?.value;
                Ok(ClassCheck {
                    class: j,
                    threshold: c.threshold.clone(),
                    ok: value >= c.threshold,
                    value,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let all_verified = verdicts.iter().all(|v| v.verified) && class_checks.iter().all(|c| c.ok);
    let mut report = Report::new(
        "cover",
        Instance::Family(file.clone()),
        CommandResult::Cover(CoverResult {
            grid,
            certificate,
            verdicts,
            class_checks,
            all_verified,
        }),
    );
    report.timings = timer.phases;
    Ok(Outcome::new(
        report,
        if all_verified {
            EXIT_OK
        } else {
            EXIT_CERTIFICATE
        },
    ))
}

pub fn cmd_kelley_verify(
    file: &FamilyFile,
    f: &Family,
    cover: CoverFile,
    s: &Settings,
) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let cert = cover.into_certificate(f)?;
    let verdicts = verify_classes(f, &cert)?;
    let synthesized = timer.phase("synthesize", || synthesize_measure_from_cover(f, &cert))?;
    let mut report = Report::new(
        "kelley-verify",
        Instance::Family(file.clone()),
        CommandResult::KelleyVerify(KelleyVerifyResult {
            covers_all: cert.covers_all,
            verdicts,
            synthesized,
        }),
    );
    report.timings = timer.phases;
    Ok(Outcome::new(report, EXIT_OK))
}

pub fn cmd_gen(spec: &InstanceSpec, s: &Settings) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let mut spec = spec.clone();
    if let Some(seed) = s.seed {
        spec.seed = seed;
    }
    let family = timer.phase("generate", || generate(&spec))?.to_file();
    let mut text = serde_json::to_string_pretty(&family)?;
    text.push('\n');
    let mut report = Report::new(
        "gen",
        Instance::Spec(spec),
        CommandResult::Gen(GenResult { family }),
    );
    report.timings = timer.phases;
    let mut out = Outcome::new(report, EXIT_OK);
    out.family_file = Some(text);
    Ok(out)
}

/// Exit 0 unless every row failed; then 3 if all failures were budget
/// failures, 2 otherwise.
pub fn cmd_sweep(spec: &SweepSpec, s: &Settings) -> Result<Outcome> {
    let mut timer = Timer::new(s.timings);
    let mut spec = spec.clone();
    if let Some(seed) = s.seed {
        spec.template.seed = seed;
    }
    let opts = SweepOptions {
        jobs: s.jobs,
        budget: s.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
        timings: s.timings,
    };
    let rows = timer.phase("sweep", || run_sweep(&spec, &opts))?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    let code = if rows.iter().any(|r| r.status == RowStatus::Ok) {
        EXIT_OK
    } else if rows.iter().all(|r| r.status == RowStatus::Budget) {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    };
    let budget_events = rows
        .iter()
        .filter(|r| r.status == RowStatus::Budget)
        .map(|r| BudgetEvent {
            stage: format!("sweep N={}", r.n),
            limit: opts.budget,
            used: opts.budget,
            unit: "search nodes".into(),
            exceeded: true,
        })
        .collect();
    let mut report = Report::new(
        "sweep",
        Instance::Sweep(spec),
        CommandResult::Sweep(SweepResult { rows }),
    );
    report.timings = timer.phases;
    report.budget_events = budget_events;
    let mut out = Outcome::new(report, code);
    out.csv = Some(String::from_utf8(csv).expect("csv output is utf-8"));
    Ok(out)
}
