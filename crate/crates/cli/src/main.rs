//! primesum: label graphs with distinct positive integers so every edge's
//! endpoint labels sum to a prime.
//!
//! Structured results go to stdout as JSON; human-readable progress and
//! summaries go to stderr. Exit codes are a stable contract:
//!
//! - 0: success (and, for verify/demo, the checks PASSed)
//! - 1: a verification FAILed
//! - 2: infeasible within the given budgets (AP search exhausted)
//! - 3: usage, parse, or argument errors

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use primesum_core::{
    check_paths_prime, complete_bipartite, construct_labeling, embed_hypercube, find_ap,
    find_ap_with_p_gt_d, hypercube, parse_edge_list, plan_construction, restrict_to_subgraph,
    serialize_edge_list, verify_labeling, ApCache, ApSearchOutcome, Error, Labeling, Mode,
    PrimeAP, SearchBudget, VerifyReport,
};

#[derive(Parser)]
#[command(
    name = "primesum",
    version,
    about = "Prime edge-sum labelings of bipartite graphs",
    after_help = "Exit codes: 0 success/PASS, 1 verification FAIL, \
                  2 infeasible within budget, 3 usage or parse error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in the edge-list format (header "V E", then edges).
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Construct a labeling of K_{m,n} with all edge sums prime.
    Label(LabelArgs),
    /// Check a labeling file against a graph file.
    Verify(VerifyArgs),
    /// Find the smallest arithmetic progression of primes of a given length.
    FindAp(FindApArgs),
    /// End-to-end hypercube run: label Q_n via the parity embedding into
    /// K_{2^(n-1),2^(n-1)} and check every Hamiltonian path's sums.
    Demo(DemoArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// Complete bipartite graph K_{m,n}.
    Kmn {
        m: usize,
        n: usize,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Hypercube graph Q_n on 2^n vertices.
    Hypercube {
        n: u32,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Paper indexing: the whole progression up to index 2mn-2m-n+3 must be
    /// prime. Needs much longer progressions.
    Strict,
    /// Reindexed so only the m(n-1)+1 sums actually used must be prime
    /// (requires p > d). The default.
    Windowed,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Windowed => Mode::Windowed,
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest common difference the AP search will try.
    #[arg(long, default_value_t = SearchBudget::default().max_d)]
    max_d: u64,
    /// Largest first term the AP search will try.
    #[arg(long, default_value_t = SearchBudget::default().max_p)]
    max_p: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_d: self.max_d,
            max_p: self.max_p,
            time_cap: None,
        }
    }
}

#[derive(Args)]
struct LabelArgs {
    /// Side sizes m and n of the complete bipartite graph.
    #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
    kmn: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Windowed)]
    mode: ModeArg,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Skip the on-disk AP cache entirely.
    #[arg(long)]
    no_cache: bool,
    /// Write the labeling JSON to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph in the edge-list format.
    graph: PathBuf,
    /// Labeling JSON.
    labeling: PathBuf,
}

#[derive(Args)]
struct FindApArgs {
    /// Number of terms.
    len: usize,
    /// Require the first term to exceed the difference (what the windowed
    /// construction needs).
    #[arg(long)]
    p_gt_d: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Skip the on-disk AP cache entirely.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct DemoArgs {
    /// Hypercube dimension.
    n: u32,
    /// Check at most this many Hamiltonian paths (default: all of them).
    #[arg(long)]
    paths_limit: Option<u64>,
    /// Lift the n <= 4 guard. The required AP length is quadratic in
    /// 2^n, so larger dimensions exhaust any realistic budget.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Skip the on-disk AP cache entirely.
    #[arg(long)]
    no_cache: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit(_) => 2,
                _ => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Label(args) => cmd_label(args),
        Command::Verify(args) => cmd_verify(args),
        Command::FindAp(args) => cmd_find_ap(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

fn cmd_gen(kind: GenKind) -> Result<u8, Error> {
    let (graph, name, output) = match kind {
        GenKind::Kmn { m, n, output } => {
            (complete_bipartite(m, n)?, format!("K_{{{m},{n}}}"), output)
        }
        GenKind::Hypercube { n, output } => (hypercube(n)?, format!("Q_{n}"), output),
    };
    emit_text(output.as_deref(), &serialize_edge_list(&graph))?;
    eprintln!("{name}: {}", size_summary(&graph));
    Ok(0)
}

fn size_summary(g: &primesum_core::Graph) -> String {
    let v = g.num_vertices();
    let e = g.num_edges();
    format!(
        "{v} {}, {e} {}",
        if v == 1 { "vertex" } else { "vertices" },
        if e == 1 { "edge" } else { "edges" }
    )
}

/// Where an AP came from, for the stderr summary.
enum ApSource {
    Cache,
    Search(std::time::Duration),
}

enum ApAcquisition {
    Hit(PrimeAP, ApSource),
    Exhausted {
        max_d: u64,
        max_p: u64,
        timed_out: bool,
    },
}

/// The JSON emitted on exit 2, echoing the bounds that were tried.
#[derive(Serialize)]
struct ExhaustedOutput {
    error: &'static str,
    len: usize,
    p_gt_d: bool,
    max_d: u64,
    max_p: u64,
    timed_out: bool,
}

fn load_cache(no_cache: bool) -> Option<ApCache> {
    if no_cache {
        return None;
    }
    let path = ApCache::default_path()?;
    let cache = ApCache::load(path);
    for w in cache.warnings() {
        eprintln!("cache: {w}");
    }
    Some(cache)
}

/// Cache-aware AP lookup. On a fresh search hit the result is written back
/// to the cache (best effort; failures only warn).
fn obtain_ap(
    len: usize,
    p_gt_d: bool,
    budget: &SearchBudget,
    cache: &mut Option<ApCache>,
) -> Result<ApAcquisition, Error> {
    if let Some(cache) = cache.as_ref() {
        if let Some(ap) = cache.lookup(len, p_gt_d, budget) {
            return Ok(ApAcquisition::Hit(ap, ApSource::Cache));
        }
    }
    let start = Instant::now();
    let outcome = if p_gt_d {
        find_ap_with_p_gt_d(len, budget)?
    } else {
        find_ap(len, budget)?
    };
    match outcome {
        ApSearchOutcome::Found(ap) => {
            if let Some(cache) = cache.as_mut() {
                cache.record(len, p_gt_d, ap);
                if let Err(e) = cache.save() {
                    eprintln!("cache: cannot save {}: {e}", cache.path().display());
                }
            }
            Ok(ApAcquisition::Hit(ap, ApSource::Search(start.elapsed())))
        }
        ApSearchOutcome::Exhausted {
            max_d,
            max_p,
            timed_out,
        } => Ok(ApAcquisition::Exhausted {
            max_d,
            max_p,
            timed_out,
        }),
    }
}

fn describe_ap(ap: &PrimeAP, source: &ApSource) -> String {
    match source {
        ApSource::Cache => format!(
            "AP p = {}, d = {}, len = {} (cached)",
            ap.p(),
            ap.d(),
            ap.len()
        ),
        ApSource::Search(took) => format!(
            "AP p = {}, d = {}, len = {} (searched in {took:.2?})",
            ap.p(),
            ap.d(),
            ap.len()
        ),
    }
}

fn report_exhausted(
    len: usize,
    p_gt_d: bool,
    max_d: u64,
    max_p: u64,
    timed_out: bool,
) -> Result<u8, Error> {
    print_json(&ExhaustedOutput {
        error: "budget-exhausted",
        len,
        p_gt_d,
        max_d,
        max_p,
        timed_out,
    })?;
    eprintln!(
        "no progression of length {len}{} with d <= {max_d} and p <= {max_p}{}",
        if p_gt_d { " (p > d)" } else { "" },
        if timed_out { "; timed out" } else { "" }
    );
    Ok(2)
}

fn cmd_label(args: LabelArgs) -> Result<u8, Error> {
    let [m, n] = args.kmn[..] else {
        return Err(Error::invalid("--kmn takes exactly two sizes"));
    };
    let mode: Mode = args.mode.into();
    let plan = plan_construction(m, n, mode)?;
    let mut cache = load_cache(args.no_cache);

    let labeling = if plan.is_trivial() {
        eprintln!("K_{{1,1}} is trivial; no progression needed");
        construct_labeling(&plan, None)?
    } else {
        let p_gt_d = mode == Mode::Windowed;
        match obtain_ap(plan.required_len(), p_gt_d, &args.budget.budget(), &mut cache)? {
            ApAcquisition::Hit(ap, source) => {
                eprintln!(
                    "K_{{{m},{n}}} {mode}: needs {} terms; {}",
                    plan.required_len(),
                    describe_ap(&ap, &source)
                );
                construct_labeling(&plan, Some(&ap))?
            }
            ApAcquisition::Exhausted {
                max_d,
                max_p,
                timed_out,
            } => return report_exhausted(plan.required_len(), p_gt_d, max_d, max_p, timed_out),
        }
    };

    // Never emit a labeling that has not passed the verifier in-process.
    let graph = complete_bipartite(m, n)?;
    let report = verify_labeling(&graph, &labeling)?;
    if !report.pass {
        eprintln!("internal error: constructed labeling failed verification");
        eprintln!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
        return Ok(1);
    }
    emit_json(args.output.as_deref(), &labeling)?;
    eprintln!(
        "verified: {} labels, {} edge sums all prime",
        graph.num_vertices(),
        graph.num_edges()
    );
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let graph_text = std::fs::read_to_string(&args.graph)?;
    let graph = parse_edge_list(&graph_text)?;
    let labeling_text = std::fs::read_to_string(&args.labeling)?;
    let labeling: Labeling = serde_json::from_str(&labeling_text)
        .map_err(|e| Error::invalid(format!("labeling JSON: {e}")))?;
    let report = verify_labeling(&graph, &labeling)?;
    print_json(&report)?;
    if report.pass {
        eprintln!("PASS: {} edge sums all prime", graph.num_edges());
        Ok(0)
    } else {
        eprintln!("FAIL: {} violation(s)", report.violations.len());
        Ok(1)
    }
}

fn cmd_find_ap(args: FindApArgs) -> Result<u8, Error> {
    let mut cache = load_cache(args.no_cache);
    match obtain_ap(args.len, args.p_gt_d, &args.budget.budget(), &mut cache)? {
        ApAcquisition::Hit(ap, source) => {
            print_json(&ap)?;
            eprintln!("{}", describe_ap(&ap, &source));
            Ok(0)
        }
        ApAcquisition::Exhausted {
            max_d,
            max_p,
            timed_out,
        } => report_exhausted(args.len, args.p_gt_d, max_d, max_p, timed_out),
    }
}

/// Everything the demo run produced, in one machine-readable blob.
#[derive(Serialize)]
struct DemoReport {
    n: u32,
    vertices: usize,
    edges: usize,
    /// Side size of the K_{m,m} the hypercube embeds into.
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ap: Option<PrimeAP>,
    labeling: Labeling,
    verify: VerifyReport,
    paths_checked: u64,
    paths_truncated: bool,
    path_violations: usize,
    pass: bool,
}

fn cmd_demo(args: DemoArgs) -> Result<u8, Error> {
    if args.n == 0 {
        return Err(Error::invalid("demo needs n >= 1 (Q_0 has no edges to label)"));
    }
    if args.n > 4 && !args.force {
        eprintln!(
            "demo is guarded to n <= 4: Q_{} embeds in K_{{{m},{m}}}, which needs a \
             progression of {len} primes; pass --force to try anyway",
            args.n,
            m = 1usize << (args.n - 1),
            len = {
                let m = 1usize << (args.n - 1);
                m * (m - 1) + 1
            }
        );
        return Ok(3);
    }

    let q = hypercube(args.n)?;
    let embedding = embed_hypercube(args.n)?;
    let m = embedding.side_size();
    eprintln!(
        "Q_{}: {}; parity embedding into K_{{{m},{m}}}",
        args.n,
        size_summary(&q)
    );

    let plan = plan_construction(m, m, Mode::Windowed)?;
    let mut cache = load_cache(args.no_cache);
    let (k_labeling, ap) = if plan.is_trivial() {
        (construct_labeling(&plan, None)?, None)
    } else {
        match obtain_ap(plan.required_len(), true, &args.budget.budget(), &mut cache)? {
            ApAcquisition::Hit(ap, source) => {
                eprintln!("{}", describe_ap(&ap, &source));
                (construct_labeling(&plan, Some(&ap))?, Some(ap))
            }
            ApAcquisition::Exhausted {
                max_d,
                max_p,
                timed_out,
            } => return report_exhausted(plan.required_len(), true, max_d, max_p, timed_out),
        }
    };

    let k_graph = complete_bipartite(m, m)?;
    let k_report = verify_labeling(&k_graph, &k_labeling)?;
    if !k_report.pass {
        eprintln!("internal error: K_{{{m},{m}}} labeling failed verification");
        return Ok(1);
    }

    let labeling = restrict_to_subgraph(&k_labeling, &embedding)?;
    let verify = verify_labeling(&q, &labeling)?;
    let paths = check_paths_prime(&q, &labeling, args.paths_limit)?;
    let pass = verify.pass && paths.pass();

    eprintln!(
        "Q_{} labeling: {}; Hamiltonian paths: {} checked{}, {}",
        args.n,
        if verify.pass { "verified" } else { "FAILED" },
        paths.paths_checked,
        if paths.truncated {
            " (truncated by --paths-limit)"
        } else {
            ""
        },
        if paths.violations.is_empty() {
            "consecutive sums all prime".to_string()
        } else {
            format!("{} violation(s)", paths.violations.len())
        }
    );
    eprintln!("{}", if pass { "PASS" } else { "FAIL" });

    let report = DemoReport {
        n: args.n,
        vertices: q.num_vertices(),
        edges: q.num_edges(),
        m,
        ap,
        labeling,
        verify,
        paths_checked: paths.paths_checked,
        paths_truncated: paths.truncated,
        path_violations: paths.violations.len(),
        pass,
    };
    print_json(&report)?;
    Ok(if pass { 0 } else { 1 })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<(), Error> {
    match output {
        None => print_json(value),
        Some(path) => {
            let mut text = serde_json::to_string_pretty(value)
                .map_err(|e| Error::invalid(format!("serialization: {e}")))?;
            text.push('\n');
            std::fs::write(path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn emit_text(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}
