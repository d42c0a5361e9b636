//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a computation fails or a checked
//! property is violated, 2 on usage errors. Failures print a one-line JSON
//! diagnostic to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fairness::{analyze, FairnessReport};
use crate::instance::{emit_instance, gen_family, gen_random, parse_instance, Family, FamilyParams, Instance, Kind};
use crate::oracle::{check_theorems_with, FrontierFn, OracleReport};
use crate::pof::{
    pof_from_report, resolve_workers, sweep_family, sweep_random, write_sweep_csv, Criterion,
    FamilySweep, PofRecord, RandomSweep, SweepRow,
};
use crate::rational::Rational;

#[derive(Parser, Debug)]
#[command(name = "fairsum", version, about = "Fair subset sum solver and Price of Fairness harness")]
struct Cli {
    /// Worker threads for sweep and check (default: FAIRSUM_WORKERS, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance: fairness report, frontier and PoF records.
    Solve(SolveArgs),
    /// Sweep a worst-case family or a random batch; writes PoF CSV.
    Sweep(SweepArgs),
    /// Generate a family instance document.
    Gen(GenArgs),
    /// Check DP and fairness results against the exhaustive oracle.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    /// mm, ks, pf or all.
    #[arg(long, default_value = "all")]
    criterion: String,
    /// Also write <label>.report.json, .frontier.csv and .pof.csv here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    family: Option<String>,
    /// Comma-separated alphas, e.g. 3/4,9/10.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    alpha_grid: Vec<Rational>,
    /// Comma-separated decreasing eps values.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    eps_schedule: Vec<Rational>,
    /// Family parameters; integer ones accept ranges like h=1..3.
    #[arg(long)]
    params: Vec<String>,

    #[arg(long)]
    random: bool,
    /// Comma-separated alpha caps for random batches.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational, requires = "random")]
    alpha_cap: Vec<Rational>,
    /// Instances per alpha cap.
    #[arg(long, default_value_t = 100, requires = "random")]
    count: usize,
    #[arg(long, default_value = "separate", value_parser = parse_kind)]
    kind: Kind,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 200)]
    c_max: u64,

    /// Seed for random batches; family sweeps are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    family: String,
    /// Comma-separated key=value pairs, e.g. D=400,alpha=3/4,eps=1/100.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(conflicts_with = "random", required_unless_present = "random")]
    file: Option<PathBuf>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Agents per random instance.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Restrict random instances to one kind (default: alternate).
    #[arg(long, value_parser = parse_kind)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 60)]
    c_max: u64,
    /// Where the first failing instance is written.
    #[arg(long, default_value = "counterexample.json")]
    cex: PathBuf,
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    s.parse::<Kind>().map_err(|e| e.to_string())
}

/// Pluggable pieces, so tests can run the CLI against a faulty solver.
#[derive(Clone, Copy)]
pub struct Context {
    pub dp: FrontierFn,
}

impl Default for Context {
    fn default() -> Self {
        Context { dp: crate::frontier::pareto }
    }
}

enum Outcome {
    Ok,
    /// Ran to completion but found a violation.
    Violation,
}

/// Runs the CLI with process stdout/stderr and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &Context::default(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli, ctx, out, err) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Violation) => 1,
        Err(e) => {
            let diag = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            let _ = writeln!(err, "{diag}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Sweep(a) => sweep(a, resolve_workers(cli.workers)?, out, err),
        Command::Gen(a) => gen(a, out),
        Command::Check(a) => check(a, ctx, resolve_workers(cli.workers)?, out),
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let inst = parse_instance(&text)?;
    if inst.label().is_empty() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(inst.with_label(stem));
    }
    Ok(inst)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    report: &'a FairnessReport,
    pof: &'a [PofRecord],
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<Outcome> {
    let criteria: Vec<Criterion> = match a.criterion.to_ascii_lowercase().as_str() {
        "all" => Criterion::ALL.to_vec(),
        other => vec![other.parse()?],
    };
    let inst = read_instance(&a.file)?;
    let frontier = crate::frontier::pareto(&inst)?;
    let report = analyze(&frontier)?;
    let mut records = Vec::new();
    for c in criteria {
        records.extend(pof_from_report(&inst, &report, c)?);
    }
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
        let stem = file_safe(inst.label());
        let mut json = Vec::new();
        write_json(&mut json, &SolveOutput { report: &report, pof: &records })?;
        fs::write(dir.join(format!("{stem}.report.json")), json)?;
        frontier.write_csv(fs::File::create(dir.join(format!("{stem}.frontier.csv")))?)?;
        let rows: Vec<SweepRow> = records
            .iter()
            .map(|r| SweepRow { record: r.clone(), scale: inst.capacity(), eps: None, limit: None })
            .collect();
        write_sweep_csv(&rows, fs::File::create(dir.join(format!("{stem}.pof.csv")))?)?;
    }
    write_json(out, &SolveOutput { report: &report, pof: &records })?;
    Ok(Outcome::Ok)
}

fn file_safe(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "instance".into()
    } else {
        s
    }
}

/// Splits `--params` values into scalar settings and integer lists.
/// Integer parameters swept over a list of values.
type IntLists = Vec<(String, Vec<i128>)>;

fn parse_sweep_params(raw: &[String]) -> Result<(FamilyParams, IntLists)> {
    let mut base = FamilyParams::default();
    let mut lists: Vec<(String, Vec<i128>)> = Vec::new();
    for part in raw.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some((lo, hi)) = value.split_once("..") {
            let bound = |v: &str| {
                v.trim().parse::<i128>().map_err(|_| Error::Parse(format!("bad range bound {v:?} for {key}")))
            };
            let (lo, hi) = (bound(lo)?, bound(hi)?);
            if lo > hi {
                return Err(Error::EmptyGrid);
            }
            lists.push((key.to_string(), (lo..=hi).collect()));
        } else {
            base.set(key, value)?;
        }
    }
    Ok((base, lists))
}

fn sweep(a: SweepArgs, workers: usize, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let rows = if a.random {
        if a.alpha_cap.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut spec = RandomSweep::new(a.alpha_cap.clone(), a.count, a.seed, a.kind);
        spec.n_range = (1, a.n_max.max(1));
        spec.c_range = (1, a.c_max.max(1));
        sweep_random(&spec, workers)?
    } else {
        let family: Family = a.family.as_deref().unwrap_or_default().parse()?;
        let (base, int_lists) = parse_sweep_params(&a.params)?;
        let spec = FamilySweep {
            family,
            base,
            alpha_grid: a.alpha_grid.clone(),
            eps_schedule: a.eps_schedule.clone(),
            int_lists,
        };
        let rows = sweep_family(&spec, workers)?;
        for row in &rows {
            if let Some(limit) = row.limit {
                writeln!(
                    err,
                    "{} {} pof={} limit={} gap={}",
                    row.record.label,
                    row.record.criterion,
                    row.record.pof,
                    limit,
                    limit - row.record.pof
                )?;
            }
        }
        rows
    };
    match &a.out {
        Some(path) => write_sweep_csv(&rows, fs::File::create(path)?)?,
        None => write_sweep_csv(&rows, &mut *out)?,
    }
    Ok(if rows.iter().all(|r| r.record.within_bounds) {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<Outcome> {
    let params = FamilyParams::parse(&a.params)?;
    let inst = gen_family(&a.family, &params)?;
    let doc = emit_instance(&inst);
    match &a.out {
        Some(path) => fs::write(path, doc)?,
        None => out.write_all(doc.as_bytes())?,
    }
    Ok(Outcome::Ok)
}

const CHECK_ALPHA_CAPS: [(i128, i128); 6] = [(1, 5), (1, 3), (1, 2), (2, 3), (9, 10), (1, 1)];

/// Random oracle-sized instances for `check --random`, drawn from `seed`.
pub fn random_check_instances(
    count: usize,
    seed: u64,
    k: usize,
    kind: Option<Kind>,
    n_max: usize,
    c_max: u64,
) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let kind = kind.unwrap_or(if i % 2 == 0 { Kind::Separate } else { Kind::Shared });
        let (num, den) = CHECK_ALPHA_CAPS[rng.gen_range(0..CHECK_ALPHA_CAPS.len())];
        let cap = Rational::new(num, den);
        let n = rng.gen_range(1..=n_max.max(1));
        let c = rng.gen_range(1..=c_max.max(1)).max(den as u64);
        let s: u64 = rng.gen();
        let inst = gen_random(n, c, cap, kind, k, s)?;
        out.push(inst.with_label(format!("check:{seed}:{i}:{kind}:k={k}:n={n}:c={c}:cap={cap}:seed={s}")));
    }
    Ok(out)
}

#[derive(Serialize)]
struct CheckSummary<'a> {
    checked: usize,
    all_hold: bool,
    failures: Vec<&'a OracleReport>,
}

fn check(a: CheckArgs, ctx: &Context, workers: usize, out: &mut dyn Write) -> Result<Outcome> {
    use rayon::prelude::*;
    let dp = ctx.dp;
    let reports: Vec<OracleReport> = if let Some(path) = &a.file {
        vec![check_theorems_with(&read_instance(path)?, dp)?]
    } else {
        let insts = random_check_instances(a.count, a.seed, a.k, a.kind, a.n_max, a.c_max)?;
        let results: Vec<Result<OracleReport>> =
            crate::pof::in_pool(workers, || insts.par_iter().map(|i| check_theorems_with(i, dp)).collect())?;
        results.into_iter().collect::<Result<_>>()?
    };
    let all_hold = reports.iter().all(OracleReport::all_hold);
    if a.file.is_some() {
        write_json(out, &reports[0])?;
    } else {
        let failures: Vec<&OracleReport> = reports.iter().filter(|r| !r.all_hold()).collect();
        write_json(out, &CheckSummary { checked: reports.len(), all_hold, failures })?;
    }
    if all_hold {
        return Ok(Outcome::Ok);
    }
    let first = reports.iter().find(|r| !r.all_hold()).expect("some report fails");
    let cex = first
        .failures()
        .find_map(|v| v.counterexample.as_ref())
        .expect("failed verdicts carry counterexamples");
    let mut doc = serde_json::to_string(&cex.instance).map_err(|e| Error::Io(e.to_string()))?;
    doc.push('\n');
    fs::write(&a.cex, doc)?;
    Ok(Outcome::Violation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["fairsum"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &Context::default(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&[]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["gen", "--family", "nope"]).0, 2);
        let (code, _, err) = run_capture(&["gen", "--family", "sep-large-alpha"]);
        assert_eq!(code, 2);
        let diag: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(diag["error"], "family_params");
    }

    #[test]
    fn gen_prints_canonical_document() {
        let (code, out, _) = run_capture(&["gen", "--family", "sep-two-solutions", "--params", "D=100,eps=1/100"]);
        assert_eq!(code, 0);
        let inst = parse_instance(&out).unwrap();
        assert_eq!(inst.items(), &[vec![100, 1], vec![1, 1]]);
        assert_eq!(emit_instance(&inst), out);
    }

    #[test]
    fn sweep_params_ranges() {
        let (base, lists) = parse_sweep_params(&["h=1..3,eps=1/100".to_string()]).unwrap();
        assert_eq!(lists, vec![("h".to_string(), vec![1, 2, 3])]);
        assert_eq!(base.eps, Some(Rational::new(1, 100)));
        assert!(parse_sweep_params(&["h=3..1".to_string()]).is_err());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }
}
