//! Command-line surface: configuration parsing, CSV/JSON emission, and the
//! verification scoreboard.
//!
//! Commands: `split`, `coeffs`, `pnt-sum`, `factor-check`, `equiv`, `hyp-h`,
//! and `verify`. Exit codes: 0 success, 1 contract violation or runtime
//! failure, 2 parse/usage error, 3 capacity exceeded.

pub mod acceptance;
pub mod emit;
pub mod thresholds;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use rslab_core::arithmetic::PrimeTable;
use rslab_core::config::{BuildContext, FieldSpec, InstanceSpec, PairSpec};
use rslab_core::equivalence::{default_test_primes, pair_group_check, twisted_pairs, TwistMatch};
use rslab_core::pnt::{
    build_report, geometric_grid, partial_sum, split_restricted_sum, PartialSumReport,
    SplitRestriction,
};
use rslab_core::rankin::{factorization_residual, CoefficientStream};
use rslab_core::reps::BaseChangedRep;
use rslab_core::{Error, Result};

use emit::{fmt_f64, parse_complex, parse_grid, write_output};

/// Environment variable naming the eigenvalue-table cache directory.
pub const CACHE_DIR_ENV: &str = "RSLAB_CACHE_DIR";

use thresholds::DETECTOR_TOL;

#[derive(Parser)]
#[command(
    name = "rslab",
    version,
    about = "Rankin-Selberg laboratory over cyclic number fields"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (outputs are identical for any value).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the splitting table p,e,f,g of a cyclic extension.
    Split(SplitArgs),
    /// Materialize a coefficient stream as CSV n,re,im.
    Coeffs(CoeffsArgs),
    /// Partial sums against the detected main term over a grid.
    #[command(name = "pnt-sum")]
    PntSum(PntSumArgs),
    /// Base-change factorization residuals over a prime range.
    #[command(name = "factor-check")]
    FactorCheck(FactorCheckArgs),
    /// Twisted-equivalence scan and pair-structure report.
    Equiv(EquivArgs),
    /// Convergence diagnostic partial sums for a fixed power k >= 2.
    #[command(name = "hyp-h")]
    HypH(HypHArgs),
    /// Run the full verification suite and print a scoreboard.
    Verify,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    conductor: u64,
    #[arg(long)]
    order: u64,
    #[arg(long)]
    pmax: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Pair spec JSON (repA/repB with optional fieldE/fieldF).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    xmax: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Restriction {
    /// All prime powers.
    None,
    /// Primes splitting completely in E, k = 1 only.
    #[value(name = "split-E")]
    SplitE,
    /// Primes splitting completely in the compositum EF, k = 1 only.
    #[value(name = "split-EF")]
    SplitEf,
}

impl Restriction {
    fn label(self) -> &'static str {
        match self {
            Restriction::None => "none",
            Restriction::SplitE => "split-E",
            Restriction::SplitEf => "split-EF",
        }
    }
}

#[derive(Args)]
struct PntSumArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Grid as lo:hi:geometric (half-decades) or a comma list.
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value = "none")]
    restrict: Restriction,
    #[arg(long)]
    out: PathBuf,
    /// Summary JSON path (printed to stdout when omitted).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct FactorCheckArgs {
    /// Instance spec JSON ({"rep": ..., "field": ...}).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pmax: u64,
    /// Comma list of evaluation points, e.g. "1.5,2,2+1i".
    #[arg(long, default_value = "1.5,2,2+1i")]
    s: String,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long = "specA")]
    spec_a: PathBuf,
    #[arg(long = "specB")]
    spec_b: PathBuf,
    #[arg(long = "fieldE")]
    field_e: Option<PathBuf>,
    #[arg(long = "fieldF")]
    field_f: Option<PathBuf>,
    #[arg(long, default_value_t = DETECTOR_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HypHArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    pmax: u64,
    /// Cutoff grid; defaults to 1000:pmax:geometric.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse argv, execute, and map errors to exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Domain(format!("cannot build thread pool: {e}"))),
        },
        _ => dispatch(&cli.command),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::Capacity(_) => 3,
        _ => 1,
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Split(args) => cmd_split(args),
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::PntSum(args) => cmd_pnt_sum(args),
        Command::FactorCheck(args) => cmd_factor_check(args),
        Command::Equiv(args) => cmd_equiv(args),
        Command::HypH(args) => cmd_hyp_h(args),
        Command::Verify => cmd_verify(),
    }
}

fn build_context(spec_path: &std::path::Path) -> BuildContext {
    let base = spec_path
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let cache = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
    BuildContext::new(base).with_cache_dir(cache)
}

fn cmd_split(args: &SplitArgs) -> Result<()> {
    let field = FieldSpec {
        conductor: args.conductor,
        order: args.order,
    }
    .build()?;
    let primes = PrimeTable::sieve(args.pmax)?;
    let mut out = String::from("p,e,f,g\n");
    for &p in primes.primes() {
        let s = field.splitting_data(p)?;
        out.push_str(&format!("{p},{},{},{}\n", s.e, s.f, s.g));
    }
    write_output(args.out.as_deref(), &out)
}

/// Build the pair of base-changed representations named by a pair spec.
fn build_pair(ctx: &mut BuildContext, spec: &PairSpec) -> Result<(BaseChangedRep, BaseChangedRep)> {
    let rep_a = ctx.rep(&spec.rep_a)?;
    let rep_b = ctx.rep(&spec.rep_b)?;
    let field_e = ctx.field(spec.field_e.as_ref())?;
    let field_f = ctx.field(spec.field_f.as_ref())?;
    Ok((
        BaseChangedRep::new(rep_a, field_e),
        BaseChangedRep::new(rep_b, field_f),
    ))
}

fn stream_for_pair(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    limit: u64,
    primes: &PrimeTable,
) -> Result<CoefficientStream> {
    if a.field() == b.field() {
        CoefficientStream::single_field(a, b, limit, primes)
    } else {
        CoefficientStream::base_change(a, b, limit, primes)
    }
}

fn cmd_coeffs(args: &CoeffsArgs) -> Result<()> {
    let spec: PairSpec = rslab_core::config::load_spec(&args.spec)?;
    let mut ctx = build_context(&args.spec);
    let (a, b) = build_pair(&mut ctx, &spec)?;
    let primes = PrimeTable::sieve(args.xmax)?;
    let stream = stream_for_pair(&a, &b, args.xmax, &primes)?;
    write_output(Some(&args.out), &render_coeffs_csv(&stream))
}

pub fn render_coeffs_csv(stream: &CoefficientStream) -> String {
    let mut out = String::from("n,re,im\n");
    for e in stream.entries() {
        out.push_str(&format!(
            "{},{},{}\n",
            e.n,
            fmt_f64(e.value.re),
            fmt_f64(e.value.im)
        ));
    }
    out
}

/// Detect the main-term shift of a pair through the twisted-pair scan.
/// Returns the matches and the theorem-side shift (the convolution pole sits
/// at 1 - i*tau_match, so the main-term shift is its negative).
pub fn detect_pair_shift(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    tol: f64,
) -> Result<(Vec<TwistMatch>, Option<f64>)> {
    if a.rank() != b.rank() {
        return Ok((Vec::new(), None));
    }
    let eta = a.field().character();
    let psi = b.field().character();
    let test_primes = default_test_primes(&[a.descent(), b.descent()], &[eta, psi], 25)?;
    let matches = twisted_pairs(a.descent(), eta, b.descent(), psi, &test_primes, tol)?;
    let tau0 = matches.first().map(|m| -m.tau);
    Ok((matches, tau0))
}

/// Everything pnt-sum produces, kept as strings so determinism can be
/// checked byte-for-byte.
pub struct PntSumOutput {
    pub csv: String,
    pub summary: serde_json::Value,
}

pub fn pnt_sum_pipeline(
    ctx: &mut BuildContext,
    spec: &PairSpec,
    grid: &[u64],
    restrict_label: &str,
) -> Result<PntSumOutput> {
    let restriction = match restrict_label {
        "none" => Restriction::None,
        "split-E" => Restriction::SplitE,
        "split-EF" => Restriction::SplitEf,
        other => return Err(Error::Parse(format!("unknown restriction {other:?}"))),
    };
    let (a, b) = build_pair(ctx, spec)?;
    let (matches, tau0) = detect_pair_shift(&a, &b, DETECTOR_TOL)?;
    let x_max = *grid
        .last()
        .ok_or_else(|| Error::Domain("empty grid".into()))?;
    let primes = PrimeTable::sieve(x_max)?;

    let sums: Vec<(u64, Complex64)> = match restriction {
        Restriction::None => {
            let stream = stream_for_pair(&a, &b, x_max, &primes)?;
            grid.iter()
                .map(|&x| Ok((x, partial_sum(&stream, x)?)))
                .collect::<Result<_>>()?
        }
        Restriction::SplitE => grid
            .iter()
            .map(|&x| {
                Ok((
                    x,
                    split_restricted_sum(&a, &b, x, SplitRestriction::FieldE, &primes)?,
                ))
            })
            .collect::<Result<_>>()?,
        Restriction::SplitEf => grid
            .iter()
            .map(|&x| {
                Ok((
                    x,
                    split_restricted_sum(&a, &b, x, SplitRestriction::CompositumEF, &primes)?,
                ))
            })
            .collect::<Result<_>>()?,
    };

    let coprime = rslab_core::rankin::degrees_coprime(&a, &b);
    let mut metadata = vec![
        (
            "repA".to_string(),
            serde_json::to_string(&spec.rep_a).unwrap_or_default(),
        ),
        (
            "repB".to_string(),
            serde_json::to_string(&spec.rep_b).unwrap_or_default(),
        ),
        ("fieldE".to_string(), field_label(&a)),
        ("fieldF".to_string(), field_label(&b)),
        ("restriction".to_string(), restriction.label().to_string()),
        (
            "ramified_places".to_string(),
            "all Satake parameters are zeroed at ramified places".to_string(),
        ),
        ("degrees_coprime".to_string(), coprime.to_string()),
    ];
    if a.field() != b.field() {
        metadata.push((
            "compositum_hypothesis".to_string(),
            "residue degrees over the compositum assumed bounded by f_p; automatic for coprime prime degrees"
                .to_string(),
        ));
    }
    let report = build_report(&sums, tau0, metadata)?;
    Ok(PntSumOutput {
        csv: render_report_csv(&report),
        summary: render_summary(&report, &matches),
    })
}

fn field_label(bc: &BaseChangedRep) -> String {
    let f = bc.field();
    format!(
        "conductor={},degree={},character_index={}",
        f.conductor(),
        f.degree(),
        f.character().index()
    )
}

pub fn render_report_csv(report: &PartialSumReport) -> String {
    let mut out = String::from("x,S_re,S_im,M_re,M_im,abs_err\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.x,
            fmt_f64(r.sum_re),
            fmt_f64(r.sum_im),
            fmt_f64(r.main_re),
            fmt_f64(r.main_im),
            fmt_f64(r.abs_err)
        ));
    }
    out
}

fn render_summary(report: &PartialSumReport, matches: &[TwistMatch]) -> serde_json::Value {
    serde_json::json!({
        "tau0": report.tau0,
        "fitted_c": report.fitted_c,
        "fit_residual": report.fit_residual,
        "verdict": report.verdict(),
        "matches": matches,
        "metadata": report.metadata.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
    })
}

fn cmd_pnt_sum(args: &PntSumArgs) -> Result<()> {
    let spec: PairSpec = rslab_core::config::load_spec(&args.spec)?;
    let mut ctx = build_context(&args.spec);
    let grid = parse_grid(&args.grid)?;
    let output = pnt_sum_pipeline(&mut ctx, &spec, &grid, args.restrict.label())?;
    write_output(Some(&args.out), &output.csv)?;
    let summary_text = format!("{:#}\n", output.summary);
    match &args.summary {
        Some(path) => write_output(Some(path), &summary_text),
        None => {
            print!("{summary_text}");
            Ok(())
        }
    }
}

fn cmd_factor_check(args: &FactorCheckArgs) -> Result<()> {
    let spec: InstanceSpec = rslab_core::config::load_spec(&args.spec)?;
    let mut ctx = build_context(&args.spec);
    let rep = ctx.rep(&spec.rep)?;
    let field = ctx.field(spec.field.as_ref())?;
    let bc = BaseChangedRep::new(rep, field);
    let s_values: Vec<Complex64> = args
        .s
        .split(',')
        .map(parse_complex)
        .collect::<Result<_>>()?;
    for s in &s_values {
        if s.re <= 1.0 {
            return Err(Error::ConvergenceDomain(format!(
                "evaluation point {s} lies outside Re s > 1"
            )));
        }
    }
    let primes = PrimeTable::sieve(args.pmax)?;
    let mut max_residual = 0.0f64;
    let mut worst: Option<(u64, Complex64)> = None;
    for &p in primes.primes() {
        if bc.field().ramified_at(p) {
            continue;
        }
        for &s in &s_values {
            let r = factorization_residual(&bc, p, s)?;
            if r > max_residual {
                max_residual = r;
                worst = Some((p, s));
            }
        }
    }
    println!("checked {} primes up to {}", primes.count(), args.pmax);
    println!("max residual = {}", fmt_f64(max_residual));
    if let Some((p, s)) = worst {
        println!("worst at p = {p}, s = {s}");
    }
    if max_residual > args.tolerance {
        return Err(Error::Contract(format!(
            "factorization residual {max_residual:e} exceeds tolerance {:e}",
            args.tolerance
        )));
    }
    Ok(())
}

fn cmd_equiv(args: &EquivArgs) -> Result<()> {
    let spec_a: rslab_core::config::RepSpec = rslab_core::config::load_spec(&args.spec_a)?;
    let spec_b: rslab_core::config::RepSpec = rslab_core::config::load_spec(&args.spec_b)?;
    let mut ctx = build_context(&args.spec_a);
    let rep_a = ctx.rep(&spec_a)?;
    let rep_b = ctx.rep(&spec_b)?;
    let field_e = match &args.field_e {
        Some(path) => rslab_core::config::load_spec::<FieldSpec>(path)?.build()?,
        None => rslab_core::fields::CyclicExtension::rationals(),
    };
    let field_f = match &args.field_f {
        Some(path) => rslab_core::config::load_spec::<FieldSpec>(path)?.build()?,
        None => rslab_core::fields::CyclicExtension::rationals(),
    };
    let eta = field_e.character();
    let psi = field_f.character();
    let test_primes = default_test_primes(&[&rep_a, &rep_b], &[eta, psi], 25)?;
    let matches = twisted_pairs(&rep_a, eta, &rep_b, psi, &test_primes, args.tol)?;
    let check = pair_group_check(&matches, field_e.degree(), field_f.degree());
    let report = serde_json::json!({
        "matches": matches,
        "tau0": matches.first().map(|m| -m.tau),
        "group_check": check,
        "test_primes": test_primes,
        "tolerance": args.tol,
    });
    let text = format!("{report:#}\n");
    write_output(args.out.as_deref(), &text)?;
    if !check.pass {
        return Err(Error::Contract(format!(
            "pair group structure check failed: {:?}",
            check.witness
        )));
    }
    Ok(())
}

fn cmd_hyp_h(args: &HypHArgs) -> Result<()> {
    let spec: InstanceSpec = rslab_core::config::load_spec(&args.spec)?;
    let mut ctx = build_context(&args.spec);
    let rep = ctx.rep(&spec.rep)?;
    let field = ctx.field(spec.field.as_ref())?;
    let bc = BaseChangedRep::new(rep, field);
    let grid = match &args.grid {
        Some(g) => parse_grid(g)?,
        None => geometric_grid(1_000.min(args.pmax), args.pmax),
    };
    let primes = PrimeTable::sieve(args.pmax)?;
    let partials = rslab_core::pnt::hypothesis_h_partials(&bc, args.k, &grid, &primes)?;
    let mut out = String::from("P,partial\n");
    for (p, v) in grid.iter().zip(&partials) {
        out.push_str(&format!("{p},{}\n", fmt_f64(*v)));
    }
    write_output(args.out.as_deref(), &out)?;
    let last_increment = if partials.len() >= 2 {
        partials[partials.len() - 1] - partials[partials.len() - 2]
    } else {
        0.0
    };
    let violations = conjecture_premise_violations(&bc, &primes, 0.01)?;
    println!(
        "k = {}, final partial = {}",
        args.k,
        fmt_f64(*partials.last().unwrap_or(&0.0))
    );
    println!("last increment = {}", fmt_f64(last_increment));
    println!("local-bound premise violations (epsilon = 0.01): {violations}");
    Ok(())
}

/// Count unramified non-split primes where the parameter bound
/// |alpha| <= p^{f*(1/2 - 1/(2f) - epsilon)} fails for the base-changed
/// parameters. Purely a diagnostic display.
pub fn conjecture_premise_violations(
    bc: &BaseChangedRep,
    primes: &PrimeTable,
    epsilon: f64,
) -> Result<u64> {
    let mut violations = 0;
    for &p in primes.primes() {
        if bc.field().ramified_at(p) || bc.field().splits_completely(p) {
            continue;
        }
        let f = bc.field().splitting_data(p)?.f as f64;
        let theta = 0.5 - 1.0 / (2.0 * f) - epsilon;
        let bound = (p as f64).powf(f * theta);
        for place in bc.satake_at(p)? {
            for alpha in place {
                if alpha.norm() > bound + 1e-12 {
                    violations += 1;
                }
            }
        }
    }
    Ok(violations)
}

fn cmd_verify() -> Result<()> {
    let outcomes = acceptance::run_all();
    let mut failed = 0usize;
    for o in &outcomes {
        println!(
            "[{:>2}] {}  {:<32} {} ({:.1}s)",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.seconds
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} / {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        return Err(Error::Contract(format!(
            "{failed} acceptance criteria failed"
        )));
    }
    Ok(())
}
