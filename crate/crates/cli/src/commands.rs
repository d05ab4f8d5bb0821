use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qrap_core::asymptotics::{select_primes, Sampling, Target, Verifier};
use qrap_core::counting::{
    count_ap_pattern, count_ap_support, count_constant_sign, count_eta, count_pattern, count_support,
    q0_search, statistics, Side, StatQuery,
};
use qrap_core::fixtures::{fixture, shipped, FixtureName, FixtureParams, Multipliers};
use qrap_core::format::canonical_json;
use qrap_core::structure::{analyze, generate_admissible};
use qrap_core::weil::{char_sum, CharSumResult};
use qrap_core::{
    CountMode, CountRecord, FamilySpec, NormalizedFamily, ResidueClassifier, Sign,
};

use crate::args::{Cli, Command, ModeArgs, RangeArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Assertion(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
        }
    }
}

impl From<qrap_core::Error> for CliError {
    fn from(e: qrap_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cli: Cli) -> CliResult<()> {
    let ctx = Context {
        workers: cli.workers as usize,
        cap: cli.prime_cap,
    };
    match cli.command {
        Command::Analyze { spec, out } => analyze_cmd(&spec, out.as_deref()),
        Command::Count { spec, range, mode, eta, out } => {
            count_cmd(&ctx, &spec, &range, &mode, eta.as_deref(), out.as_deref())
        }
        Command::Verify { spec, range, mode, out, summary, assert, assert_floor } => verify_cmd(
            &ctx,
            &spec,
            &range,
            &mode,
            out.as_deref(),
            summary.as_deref(),
            assert,
            assert_floor,
        ),
        Command::Weil {
            range,
            shifts,
            random_degree,
            sets,
            seed,
            range_end,
            random_range,
            out,
            assert,
            assert_floor,
        } => {
            let roots = match random_degree {
                Some(d) => Roots::Random { degree: d, sets, seed },
                None if shifts.is_empty() => return Err(usage("weil needs --shifts or --random-degree")),
                None => Roots::Fixed(shifts),
            };
            let end = match (range_end, random_range) {
                (Some(n), _) => End::Fixed(n),
                (None, true) => End::Random,
                (None, false) => End::Complete,
            };
            weil_cmd(&ctx, &range, &roots, end, out.as_deref(), assert, assert_floor)
        }
        Command::Generate { d, a1, b1, t, s, out } => {
            let spec = generate_admissible(&d, a1, b1, &t, s)?;
            write_out(out.as_deref(), &spec.to_json())
        }
        Command::Fixture { name, s, q, r, k, multipliers, spec_only, shipped: all, out } => {
            if all {
                return write_out(out.as_deref(), &canonical_json(&shipped()));
            }
            let name: FixtureName = name.expect("clap requires --name").parse()?;
            let multipliers: Multipliers = multipliers.parse()?;
            let fx = fixture(name, &FixtureParams { s, q, r, k, multipliers })?;
            let text = if spec_only { fx.spec.to_json() } else { fx.to_json() };
            write_out(out.as_deref(), &text)
        }
        Command::Stats { a, b, pmin, pmax, stride, pattern, q0, len, out } => {
            stats_cmd(&ctx, a, b, pmin, pmax, stride, &pattern, q0.as_deref(), len, out.as_deref())
        }
    }
}

struct Context {
    workers: usize,
    cap: u64,
}

impl Context {
    /// Maps `f` over `primes` on a pool of `workers` threads, keeping order.
    fn par_map<T: Send>(&self, primes: &[u64], f: impl Fn(u64) -> CliResult<T> + Sync) -> CliResult<Vec<T>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| usage(format!("cannot start worker pool: {e}")))?;
        pool.install(|| primes.par_iter().map(|&p| f(p)).collect())
    }

    fn primes(&self, range: &RangeArgs, default: Sampling) -> CliResult<Vec<u64>> {
        let sampling = if range.all {
            Sampling::All
        } else if let Some(n) = range.stride {
            Sampling::Stride(n as usize)
        } else {
            default
        };
        Ok(select_primes(range.pmin, range.pmax, sampling, self.cap)?)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a family spec, or the `spec` member of a fixture document.
fn load_spec(path: &Path) -> CliResult<FamilySpec> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let wrap = |e: qrap_core::Error| usage(format!("{}: {e}", path.display()));
    if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(&text) {
        if !map.contains_key("kind") {
            if let (Some(spec), true) = (map.get("spec"), map.contains_key("expected")) {
                return FamilySpec::from_json(&spec.to_string()).map_err(wrap);
            }
        }
    }
    FamilySpec::from_json(&text).map_err(wrap)
}

fn normalized(spec: &FamilySpec) -> CliResult<NormalizedFamily> {
    match spec {
        FamilySpec::Shift { .. } => {
            let z = spec.shift_set().expect("shift spec");
            Ok(NormalizedFamily::new(vec![1], vec![z])?)
        }
        other => Ok(other.to_normalized()?),
    }
}

fn parse_sign(s: &str) -> CliResult<Sign> {
    Sign::parse(s).ok_or_else(|| usage(format!("--eps: expected +1 or -1, got `{s}`")))
}

fn parse_signs(flag: &str, s: &str) -> CliResult<Vec<Sign>> {
    Sign::parse_vector(s).ok_or_else(|| usage(format!("{flag}: expected a sign word like +-+, got `{s}`")))
}

fn parse_side(s: &str) -> CliResult<Side> {
    Side::parse(s).ok_or_else(|| usage(format!("expected residue or nonresidue, got `{s}`")))
}

fn analyze_cmd(spec: &Path, out: Option<&Path>) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let report = analyze(&normalized(&spec)?)?;
    write_out(out, &report.to_json())
}

/// A single (a, b; s) progression, when the family is one.
fn single_progression(spec: &FamilySpec) -> Option<(u64, u64, u64)> {
    match spec {
        FamilySpec::Ap { a, b, s } if a.len() == 1 => Some((a[0], b[0], *s)),
        _ => None,
    }
}

type Counter = Box<dyn Fn(&ResidueClassifier) -> qrap_core::Result<CountRecord> + Sync>;

fn counter(spec: &FamilySpec, mode: &ModeArgs, eta: Option<&str>) -> CliResult<Counter> {
    if let Some(eta) = eta {
        let eta = parse_signs("--eta", eta)?;
        let f = normalized(spec)?;
        if eta.len() != f.k() {
            return Err(usage(format!("--eta has {} signs, family has {} rows", eta.len(), f.k())));
        }
        return Ok(Box::new(move |c| count_eta(c, &f, &eta)));
    }
    if let Some(eps) = &mode.eps {
        let eps = parse_sign(eps)?;
        if let Some(z) = spec.shift_set() {
            let signs = vec![eps; z.len()];
            return Ok(Box::new(move |c| {
                let r = count_pattern(c, &z, &signs)?;
                Ok(CountRecord { mode: CountMode::ConstantSign(eps), ..r })
            }));
        }
        let f = normalized(spec)?;
        return Ok(Box::new(move |c| Ok(count_constant_sign(c, &f, eps))));
    }
    if let Some(pattern) = &mode.pattern {
        let signs = parse_signs("--pattern", pattern)?;
        if let Some(z) = spec.shift_set() {
            if signs.len() != z.len() {
                return Err(usage(format!("--pattern has {} signs, Z has {} elements", signs.len(), z.len())));
            }
            return Ok(Box::new(move |c| count_pattern(c, &z, &signs)));
        }
        if let Some((a, b, s)) = single_progression(spec) {
            if signs.len() as u64 != s {
                return Err(usage(format!("--pattern has {} signs, s = {s}", signs.len())));
            }
            return Ok(Box::new(move |c| count_ap_pattern(c, a, b, &signs)));
        }
        return Err(usage("--pattern applies to shift specs and single-progression ap specs"));
    }
    if let Some(side) = &mode.support {
        let side = parse_side(side)?;
        if let Some(z) = spec.shift_set() {
            return Ok(Box::new(move |c| count_support(c, &z, side)));
        }
        if let Some((a, b, s)) = single_progression(spec) {
            return Ok(Box::new(move |c| count_ap_support(c, a, b, s, side)));
        }
        return Err(usage("--support applies to shift specs and single-progression ap specs"));
    }
    Err(usage("choose one of --eps, --pattern, --support or --eta"))
}

fn count_cmd(
    ctx: &Context,
    spec: &Path,
    range: &RangeArgs,
    mode: &ModeArgs,
    eta: Option<&str>,
    out: Option<&Path>,
) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let count = counter(&spec, mode, eta)?;
    let primes = ctx.primes(range, Sampling::All)?;
    let rows = ctx.par_map(&primes, |p| {
        let c = ResidueClassifier::new(p)?;
        Ok(count(&c)?.csv_row())
    })?;
    let mut text = String::from(CountRecord::CSV_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    write_out(out, &text)
}

fn verify_target(spec: &FamilySpec, mode: &ModeArgs) -> CliResult<Target> {
    if let Some(eps) = &mode.eps {
        let eps = parse_sign(eps)?;
        return Ok(match spec.shift_set() {
            Some(z) => Target::ShiftPattern { eps: vec![eps; z.len()], z },
            None => Target::ConstantSign { family: spec.clone(), eps },
        });
    }
    if let Some(pattern) = &mode.pattern {
        let eps = parse_signs("--pattern", pattern)?;
        if let Some(z) = spec.shift_set() {
            return Ok(Target::ShiftPattern { z, eps });
        }
        if let Some((a, b, s)) = single_progression(spec) {
            if eps.len() as u64 != s {
                return Err(usage(format!("--pattern has {} signs, s = {s}", eps.len())));
            }
            return Ok(Target::ApSinglePattern { a, b, eps });
        }
        return Err(usage("--pattern applies to shift specs and single-progression ap specs"));
    }
    if let Some(side) = &mode.support {
        let side = parse_side(side)?;
        if let Some(z) = spec.shift_set() {
            return Ok(Target::ShiftSupport { z, side });
        }
        if let Some((a, b, s)) = single_progression(spec) {
            return Ok(Target::ApSingleSupport { a, b, s, side });
        }
        return Err(usage("--support applies to shift specs and single-progression ap specs"));
    }
    Err(usage("choose one of --eps, --pattern or --support"))
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    ctx: &Context,
    spec: &Path,
    range: &RangeArgs,
    mode: &ModeArgs,
    out: Option<&Path>,
    summary: Option<&Path>,
    assert: bool,
    assert_floor: u64,
) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let verifier = Verifier::new(verify_target(&spec, mode)?)?.with_assert_floor(assert_floor);
    let primes = ctx.primes(range, Sampling::default())?;
    let rows = ctx.par_map(&primes, |p| Ok(verifier.row(p)?))?;
    let report = verifier.report(rows);
    write_out(out, &report.to_csv())?;
    if let Some(path) = summary {
        write_out(Some(path), &report.summary_json())?;
    }
    if assert && !report.passed() {
        return Err(CliError::Assertion(format!(
            "{} bound violations, {} nonzero counts where zero is predicted",
            report.violations, report.pi_minus_nonzero
        )));
    }
    Ok(())
}

enum Roots {
    Fixed(Vec<i64>),
    Random { degree: usize, sets: usize, seed: u64 },
}

#[derive(Clone, Copy)]
enum End {
    Complete,
    Fixed(u64),
    Random,
}

/// A generator that depends only on the seed and the prime, so output does
/// not depend on scheduling.
fn prime_rng(seed: u64, p: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn weil_cmd(
    ctx: &Context,
    range: &RangeArgs,
    roots: &Roots,
    end: End,
    out: Option<&Path>,
    assert: bool,
    assert_floor: u64,
) -> CliResult<()> {
    let primes = ctx.primes(range, Sampling::All)?;
    let results = ctx.par_map(&primes, |p| {
        let c = ResidueClassifier::new(p)?;
        let mut rng = prime_rng(match roots {
            Roots::Random { seed, .. } => *seed,
            Roots::Fixed(_) => 0,
        }, p);
        let sets: Vec<Vec<i64>> = match roots {
            Roots::Fixed(shifts) => vec![shifts.clone()],
            Roots::Random { degree, sets, .. } => {
                if *degree == 0 || *degree as u64 > p {
                    return Err(usage(format!("cannot draw {degree} distinct roots modulo {p}")));
                }
                (0..*sets)
                    .map(|_| sample(&mut rng, p as usize, *degree).into_iter().map(|x| x as i64).collect())
                    .collect()
            }
        };
        let mut out: Vec<CharSumResult> = Vec::with_capacity(sets.len());
        for shifts in sets {
            let n = match end {
                End::Complete => None,
                End::Fixed(n) => Some(n),
                End::Random => Some(rng.gen_range(0..p)),
            };
            out.push(char_sum(&c, &shifts, n)?);
        }
        Ok(out)
    })?;
    let mut text = String::from(CharSumResult::CSV_HEADER);
    text.push('\n');
    let mut violations = 0;
    for r in results.iter().flatten() {
        text.push_str(&r.csv_row());
        text.push('\n');
        if r.p >= assert_floor && !r.within_bound {
            violations += 1;
        }
    }
    write_out(out, &text)?;
    if assert && violations > 0 {
        return Err(CliError::Assertion(format!("{violations} character sums exceed their bound")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn stats_cmd(
    ctx: &Context,
    a: u64,
    b: u64,
    pmin: u64,
    pmax: u64,
    stride: Option<usize>,
    pattern: &str,
    q0: Option<&str>,
    len: Option<u64>,
    out: Option<&Path>,
) -> CliResult<()> {
    if b == 0 {
        return Err(usage("--b must be positive"));
    }
    if let Some(side) = q0 {
        let side = parse_side(side)?;
        let s = len.expect("clap requires --len");
        if pmax > ctx.cap {
            return Err(qrap_core::Error::RangeTooLarge { lo: 3, hi: pmax, cap: ctx.cap }.into());
        }
        let found = q0_search(a, b, side, s, pmax)?;
        let q = found.map_or("none".to_string(), |q| q.to_string());
        let label = match side {
            Side::Residue => "plus",
            Side::Nonresidue => "minus",
        };
        return write_out(out, &format!("side,s,q0\n{label},{s},{q}\n"));
    }
    let eps = parse_signs("--pattern", pattern)?;
    let sampling = stride.map_or(Sampling::All, Sampling::Stride);
    let primes = select_primes(pmin, pmax, sampling, ctx.cap)?;
    let queries = [
        StatQuery::FirstPattern(eps),
        StatQuery::LongestRun(Sign::Plus),
        StatQuery::LongestRun(Sign::Minus),
        StatQuery::LongestSupport(Side::Residue),
        StatQuery::LongestSupport(Side::Nonresidue),
    ];
    let rows = ctx.par_map(&primes, |p| {
        let c = ResidueClassifier::new(p)?;
        let mut row = p.to_string();
        for q in &queries {
            row.push(',');
            row.push_str(&statistics(&c, a, b, q)?.to_string());
        }
        Ok(row)
    })?;
    let mut text = String::from("p,n0,s0_plus,s0_minus,s1_plus,s1_minus\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    write_out(out, &text)
}
