mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Resolved};
use redundex::codes::{self, builtin_code, builtin_protocol, classify, Alphabet, Protocol, ProtocolKind, CODE_NAMES};
use redundex::decode::{DecodePolicy, LookupTable, Ranking, TieOutcome};
use redundex::designs::{self, search_2designs, BlockDesign, SearchOptions};
use redundex::failure::{
    self, both_sectors, compare, crossover, exact_failure_with_budget, expected_cost, monte_carlo, truncated_failure,
    FailureError, Grid, DEFAULT_EVENT_BUDGET,
};

#[derive(Parser, Debug)]
#[command(
    name = "redundex",
    version,
    about = "Failure rates of redundant syndrome extraction for small stabilizer codes"
)]
struct Cli {
    /// Config file with per-command sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration to stderr
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Worker threads
    #[arg(long, global = true, env = "REDUNDEX_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List built-in codes and protocols with their [[n,k,d,s]] tags
    Codes,
    /// Check a block design file: parameters, constraints, signature distance
    DesignCheck(DesignCheckArgs),
    /// Failure-rate polynomial of a protocol
    Failure(FailureArgs),
    /// CSV grid of failure rates and their differences
    Compare(CompareArgs),
    /// Monte Carlo estimate of the failure rate at one point
    Simulate(SimulateArgs),
    /// Write or check the archived polynomial files
    Golden(GoldenArgs),
    /// Decoder lookup table as CSV
    Table(TableArgs),
    /// Search for labeled 2-designs
    Search(SearchArgs),
}

#[derive(Args, Debug)]
struct Selection {
    /// Code name, or a design file when the protocol is `design`
    code: String,
    /// minimal, ft, mr, dbr or design
    protocol: String,
    /// Error alphabet: x or depolarizing
    #[arg(long)]
    alphabet: Option<String>,
    /// Decoder ranking: balanced or likelihood:PQ,PM
    #[arg(long)]
    policy: Option<String>,
    /// Inequivalent tied explanations: failure or first
    #[arg(long)]
    ties: Option<String>,
}

#[derive(Args, Debug)]
struct DesignCheckArgs {
    path: PathBuf,
    /// Also check the CSS doubling constraint
    #[arg(long)]
    css: Option<bool>,
}

#[derive(Args, Debug)]
struct FailureArgs {
    #[command(flatten)]
    sel: Selection,
    /// Full enumeration (default)
    #[arg(long, conflicts_with = "degree")]
    exact: bool,
    /// Keep terms up to this total degree
    #[arg(long)]
    degree: Option<u32>,
    /// Event budget for full enumeration
    #[arg(long)]
    budget: Option<u128>,
    /// Report both CSS sectors together
    #[arg(long)]
    both_sectors: bool,
    /// Print the expected-cost polynomial instead
    #[arg(long)]
    cost: bool,
    /// One-line human-readable form
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comma-separated code names
    #[arg(long)]
    codes: Option<String>,
    /// Comma-separated protocol kinds (default: all defined)
    #[arg(long)]
    protocols: Option<String>,
    /// pq0:pq1:steps,pm0:pm1:steps
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    ties: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sel: Selection,
    #[arg(long)]
    pq: Option<f64>,
    #[arg(long)]
    pm: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct GoldenArgs {
    /// Directory holding the archived files
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    degree: Option<u32>,
    /// Compare instead of writing; exit 3 on any difference
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    sel: Selection,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    n: usize,
    w: usize,
    m: usize,
    #[arg(long)]
    constraint1: bool,
    #[arg(long)]
    constraint2: bool,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Check(String),
    Budget(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Check(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Check(m) | CliError::Budget(m) | CliError::Io(m) => m,
        }
    }
}

impl From<FailureError> for CliError {
    fn from(e: FailureError) -> Self {
        match e {
            FailureError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

struct Ctx {
    file: FileConfig,
    resolved: Resolved,
    workers: usize,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_policy(ranking: Option<&str>, ties: Option<&str>) -> Result<DecodePolicy, CliError> {
    let ranking = match ranking.unwrap_or("balanced") {
        "balanced" => Ranking::Balanced,
        other => {
            let bad = || {
                CliError::Input(format!(
                    "unknown policy {other:?} (expected balanced or likelihood:PQ,PM)"
                ))
            };
            let args = other.strip_prefix("likelihood:").ok_or_else(bad)?;
            let (pq, pm) = args.split_once(',').ok_or_else(bad)?;
            let pq: f64 = pq.trim().parse().map_err(|_| bad())?;
            let pm: f64 = pm.trim().parse().map_err(|_| bad())?;
            if !(pq > 0.0 && pq < 1.0 && pm > 0.0 && pm < 1.0) {
                return Err(CliError::Input(
                    "likelihood probabilities must lie strictly between 0 and 1".into(),
                ));
            }
            Ranking::LikelihoodAt { p_q: pq, p_m: pm }
        }
    };
    let tie_outcome = match ties.unwrap_or("failure") {
        "failure" => TieOutcome::AmbiguousIsFailure,
        "first" => TieOutcome::FirstInOrder,
        other => {
            return Err(CliError::Input(format!(
                "unknown tie rule {other:?} (expected failure or first)"
            )))
        }
    };
    Ok(DecodePolicy { ranking, tie_outcome })
}

fn policy_label(p: &DecodePolicy) -> String {
    let r = match p.ranking {
        Ranking::Balanced => "balanced".to_string(),
        Ranking::LikelihoodAt { p_q, p_m } => format!("likelihood:{p_q},{p_m}"),
    };
    let t = match p.tie_outcome {
        TieOutcome::AmbiguousIsFailure => "failure",
        TieOutcome::FirstInOrder => "first",
    };
    format!("{r} ties={t}")
}

fn read_design(path: &Path) -> Result<BlockDesign, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<BlockDesign>()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl Ctx {
    fn str_opt(&self, section: &str, flag: Option<&String>, key: &str) -> Result<Option<String>, CliError> {
        Ok(match flag {
            Some(v) => Some(v.clone()),
            None => self.file.string(section, key)?,
        })
    }

    fn policy(
        &mut self,
        section: &str,
        policy: Option<&String>,
        ties: Option<&String>,
    ) -> Result<DecodePolicy, CliError> {
        let r = self.str_opt(section, policy, "policy")?;
        let t = self.str_opt(section, ties, "ties")?;
        let p = parse_policy(r.as_deref(), t.as_deref())?;
        self.resolved.set("policy", policy_label(&p));
        Ok(p)
    }

    fn protocol(&mut self, section: &str, sel: &Selection) -> Result<(Protocol, DecodePolicy), CliError> {
        let kind: ProtocolKind = sel.protocol.parse().map_err(input)?;
        let proto = if kind == ProtocolKind::Design {
            let path = Path::new(&sel.code);
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("design");
            Protocol::from_design(name, &read_design(path)?).map_err(input)?
        } else {
            builtin_protocol(&sel.code, kind).map_err(input)?
        };
        let proto = match self.str_opt(section, sel.alphabet.as_ref(), "alphabet")? {
            Some(a) => proto
                .with_alphabet(a.parse::<Alphabet>().map_err(input)?)
                .map_err(input)?,
            None => proto,
        };
        self.resolved.set("protocol", proto.label());
        self.resolved.set("alphabet", proto.alphabet());
        let policy = self.policy(section, sel.policy.as_ref(), sel.ties.as_ref())?;
        Ok((proto, policy))
    }
}

fn cmd_codes() -> Result<String, CliError> {
    let mut out = String::from("protocol,tag,measurements,alphabet,cost\n");
    for name in CODE_NAMES {
        let code = builtin_code(name).map_err(input)?;
        for kind in code.kinds() {
            let p = codes::build_protocol(&code, kind).map_err(input)?;
            let tag = classify(&p).map(|t| t.to_string()).unwrap_or_else(|_| "-".to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.label(),
                tag,
                p.m(),
                p.alphabet(),
                expected_cost(&p).pretty()
            );
        }
    }
    Ok(out)
}

fn cmd_design_check(ctx: &mut Ctx, args: &DesignCheckArgs) -> Result<String, CliError> {
    let d = read_design(&args.path)?;
    let css = match args.css {
        Some(v) => v,
        None => ctx.file.boolean("design-check", "css")?.unwrap_or(true),
    };
    ctx.resolved.set("path", args.path.display());
    ctx.resolved.set("css", css);
    let params = designs::derive_parameters(&d);
    let show = |x: Option<usize>| x.map_or("non-uniform".to_string(), |v| v.to_string());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "parameters: n={} m={} w={} rho={} lambda={}",
        params.n,
        params.m,
        show(params.w),
        show(params.rho),
        show(params.lambda)
    );
    let Some((n, m, w, rho, lambda)) = params.tuple().filter(|_| params.is_2design) else {
        let why = params.violation.map_or("unknown".to_string(), |v| v.to_string());
        let _ = writeln!(out, "2-design: no ({why})");
        print!("{out}");
        return Err(CliError::Check("not a 2-design".into()));
    };
    let _ = writeln!(
        out,
        "2-design: yes{}",
        if params.is_symmetric { " (symmetric)" } else { "" }
    );
    let _ = writeln!(out, "m*w = n*rho: {} = {}", m * w, n * rho);
    let _ = writeln!(
        out,
        "lambda*(n-1) = rho*(w-1): {} = {}",
        lambda * (n - 1),
        rho * (w - 1)
    );
    let verdict = designs::check_qec_constraints(&d, css).map_err(input)?;
    let pass = |ok: bool| if ok { "pass" } else { "fail" };
    let _ = writeln!(out, "constraint 1 (w even): {}", pass(verdict.constraint1_ok));
    if let Some(ok) = verdict.constraint2_ok {
        let _ = writeln!(out, "constraint 2 (even block intersections): {}", pass(ok));
    }
    let dists: Vec<usize> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .map(|(j, k)| designs::signature_distance(&d, j, k).expect("valid pair"))
        .collect();
    let (lo, hi) = (
        dists.iter().min().copied().unwrap_or(0),
        dists.iter().max().copied().unwrap_or(0),
    );
    if lo == hi {
        let _ = writeln!(
            out,
            "signature distance: {lo} (uniform, 2*(rho-lambda) = {})",
            2 * (rho - lambda)
        );
    } else {
        let _ = writeln!(out, "signature distance: {lo}..{hi}");
    }
    Ok(out)
}

fn cmd_failure(ctx: &mut Ctx, args: &FailureArgs) -> Result<String, CliError> {
    let (proto, policy) = ctx.protocol("failure", &args.sel)?;
    let degree = match (args.exact, args.degree) {
        (true, _) => None,
        (false, Some(k)) => Some(k),
        (false, None) => ctx.file.integer("failure", "degree")?.map(|k| k as u32),
    };
    let budget = match args.budget {
        Some(b) => b,
        None => ctx
            .file
            .integer("failure", "budget")?
            .map_or(DEFAULT_EVENT_BUDGET, u128::from),
    };
    ctx.resolved
        .set("degree", degree.map_or("exact".to_string(), |k| k.to_string()));
    ctx.resolved.set("budget", budget);
    ctx.resolved.set("both_sectors", args.both_sectors);
    let mut poly = if args.cost {
        expected_cost(&proto)
    } else {
        match degree {
            Some(k) => truncated_failure(&proto, policy, k)?,
            None => exact_failure_with_budget(&proto, policy, budget)?,
        }
    };
    if args.both_sectors {
        let cost = expected_cost(&proto);
        let (f, c) = both_sectors(&proto, &poly, &cost);
        poly = if args.cost { c } else { f };
        if let Some(k) = degree.filter(|_| !args.cost) {
            poly = poly.truncate(k);
        }
    }
    let text = if args.pretty {
        format!("{}\n", poly.pretty())
    } else {
        poly.to_string()
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(String::new())
}

fn cmd_compare(ctx: &mut Ctx, args: &CompareArgs) -> Result<String, CliError> {
    let codes = ctx
        .str_opt("compare", args.codes.as_ref(), "codes")?
        .unwrap_or_else(|| "bitflip".to_string());
    let kinds = ctx.str_opt("compare", args.protocols.as_ref(), "protocols")?;
    let grid_text = ctx
        .str_opt("compare", args.grid.as_ref(), "grid")?
        .unwrap_or_else(|| "0:0.1:11,0:0.1:11".to_string());
    let grid: Grid = grid_text.parse()?;
    let degree = match args.degree {
        Some(k) => Some(k),
        None => ctx.file.integer("compare", "degree")?.map(|k| k as u32),
    };
    let policy = ctx.policy("compare", args.policy.as_ref(), args.ties.as_ref())?;
    ctx.resolved.set("codes", &codes);
    ctx.resolved.set("protocols", kinds.as_deref().unwrap_or("all"));
    ctx.resolved.set("grid", &grid_text);
    ctx.resolved
        .set("degree", degree.map_or("exact".to_string(), |k| k.to_string()));
    let wanted: Option<Vec<ProtocolKind>> = kinds
        .map(|s| {
            s.split(',')
                .map(|k| k.trim().parse::<ProtocolKind>().map_err(input))
                .collect()
        })
        .transpose()?;
    let mut protocols = Vec::new();
    for name in codes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let code = builtin_code(name).map_err(input)?;
        for kind in code.kinds() {
            if wanted.as_ref().is_none_or(|w| w.contains(&kind)) {
                protocols.push(codes::build_protocol(&code, kind).map_err(input)?);
            }
        }
    }
    let report = compare(&protocols, policy, degree)?;
    let mut csv = report.to_csv(&grid);
    if protocols.iter().any(|p| p.kind() == ProtocolKind::FtRepeatQec) {
        csv.push_str(
            "# ft cost counts two rounds plus one tie-break per disagreeing stabilizer: 2m + 2m pm (1 - pm)\n",
        );
    }
    write_output(args.out.as_deref(), &csv)?;
    Ok(String::new())
}

fn cmd_simulate(ctx: &mut Ctx, args: &SimulateArgs) -> Result<String, CliError> {
    let (proto, policy) = ctx.protocol("simulate", &args.sel)?;
    let pick = |flag: Option<f64>, key: &str| -> Result<Option<f64>, CliError> {
        Ok(match flag {
            Some(v) => Some(v),
            None => ctx.file.float("simulate", key)?,
        })
    };
    let pq = pick(args.pq, "pq")?.unwrap_or(0.0);
    let pm = pick(args.pm, "pm")?.unwrap_or(0.0);
    let trials = match args.trials {
        Some(t) => t,
        None => ctx.file.integer("simulate", "trials")?.unwrap_or(100_000),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => ctx.file.integer("simulate", "seed")?.unwrap_or(0),
    };
    for (name, v) in [("pq", pq), ("pm", pm)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Input(format!("--{name} must lie in [0, 1], got {v}")));
        }
    }
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    ctx.resolved.set("pq", pq);
    ctx.resolved.set("pm", pm);
    ctx.resolved.set("trials", trials);
    ctx.resolved.set("seed", seed);
    let est = monte_carlo(&proto, policy, pq, pm, trials, seed, ctx.workers)?;
    let mut out = String::new();
    let _ = writeln!(out, "protocol: {}", proto.label());
    let _ = writeln!(out, "pq: {pq}\npm: {pm}");
    let _ = writeln!(out, "trials: {trials}\nseed: {seed}\nworkers: {}", ctx.workers);
    let _ = writeln!(out, "failures: {}", est.failures);
    let _ = writeln!(out, "estimate: {:.6e} +/- {:.6e}", est.estimate, est.std_error);
    match failure::exact_failure(&proto, policy) {
        Ok(f) => {
            let exact = f.evaluate(pq, pm);
            let _ = writeln!(out, "exact: {exact:.6e}");
            let _ = writeln!(out, "z: {:.3}", est.z_score(exact));
        }
        Err(e) => {
            let _ = writeln!(out, "exact: unavailable ({e})");
        }
    }
    Ok(out)
}

/// Protocol pairs whose leading-order crossover is archived.
const GOLDEN_CROSSOVERS: [(&str, ProtocolKind, ProtocolKind); 3] = [
    ("bitflip", ProtocolKind::FtRepeatQec, ProtocolKind::Dbr),
    ("steane", ProtocolKind::FtRepeatQec, ProtocolKind::Mr),
    ("perfect5", ProtocolKind::FtRepeatQec, ProtocolKind::Mr),
];

fn golden_files(degree: u32) -> Result<Vec<(String, String)>, CliError> {
    let mut files = Vec::new();
    for name in CODE_NAMES {
        let code = builtin_code(name).map_err(input)?;
        for kind in code.kinds() {
            let p = codes::build_protocol(&code, kind).map_err(input)?;
            let f = truncated_failure(&p, DecodePolicy::default(), degree)?;
            let body = format!(
                "# {} failure, terms of total degree <= {degree}, alphabet {}\n{f}",
                p.label(),
                p.alphabet()
            );
            files.push((format!("{}.poly", p.label()), body));
        }
    }
    let mut cross = String::from("# leading-order crossover slopes c on pm = c pq\n");
    for (name, a, b) in GOLDEN_CROSSOVERS {
        let fa = failure::exact_failure(&builtin_protocol(name, a).map_err(input)?, DecodePolicy::default())?;
        let fb = failure::exact_failure(&builtin_protocol(name, b).map_err(input)?, DecodePolicy::default())?;
        let _ = writeln!(cross, "{name}_{a} vs {name}_{b}: {}", crossover(&fa, &fb));
    }
    files.push(("crossovers.txt".to_string(), cross));
    Ok(files)
}

fn cmd_golden(ctx: &mut Ctx, args: &GoldenArgs) -> Result<String, CliError> {
    let dir = match &args.dir {
        Some(d) => d.clone(),
        None => PathBuf::from(
            ctx.file
                .string("golden", "dir")?
                .unwrap_or_else(|| "golden".to_string()),
        ),
    };
    let degree = match args.degree {
        Some(k) => k,
        None => ctx.file.integer("golden", "degree")?.map_or(8, |k| k as u32),
    };
    ctx.resolved.set("dir", dir.display());
    ctx.resolved.set("degree", degree);
    let files = golden_files(degree)?;
    let mut out = String::new();
    if args.check {
        let mut stale = Vec::new();
        for (name, body) in &files {
            let path = dir.join(name);
            match std::fs::read_to_string(&path) {
                Ok(existing) if existing == *body => {
                    let _ = writeln!(out, "ok {name}");
                }
                _ => stale.push(name.clone()),
            }
        }
        if !stale.is_empty() {
            print!("{out}");
            return Err(CliError::Check(format!("differs from archive: {}", stale.join(", "))));
        }
        return Ok(out);
    }
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &files {
        write_output(Some(&dir.join(name)), body)?;
        let _ = writeln!(out, "wrote {}", dir.join(name).display());
    }
    Ok(out)
}

fn cmd_table(ctx: &mut Ctx, args: &TableArgs) -> Result<String, CliError> {
    let (proto, policy) = ctx.protocol("table", &args.sel)?;
    let table = LookupTable::build(&proto, policy).map_err(input)?;
    write_output(args.out.as_deref(), &table.to_csv())?;
    Ok(String::new())
}

fn cmd_search(ctx: &mut Ctx, args: &SearchArgs) -> Result<String, CliError> {
    let defaults = SearchOptions::default();
    let opts = SearchOptions {
        constraint1: args.constraint1 || ctx.file.boolean("search", "constraint1")?.unwrap_or(false),
        constraint2: args.constraint2 || ctx.file.boolean("search", "constraint2")?.unwrap_or(false),
        limit: match args.limit {
            Some(l) => l,
            None => ctx
                .file
                .integer("search", "limit")?
                .map_or(defaults.limit, |l| l as usize),
        },
        budget: match args.budget {
            Some(b) => b,
            None => ctx.file.integer("search", "budget")?.unwrap_or(defaults.budget),
        },
        parallel: ctx.workers > 1,
    };
    ctx.resolved.set("n", args.n);
    ctx.resolved.set("w", args.w);
    ctx.resolved.set("m", args.m);
    ctx.resolved.set("constraint1", opts.constraint1);
    ctx.resolved.set("constraint2", opts.constraint2);
    ctx.resolved.set("budget", opts.budget);
    let outcome = search_2designs(args.n, args.w, args.m, opts);
    let mut out = String::new();
    for d in &outcome.designs {
        let _ = writeln!(out, "{d}");
    }
    let _ = writeln!(out, "# {} designs, {} nodes", outcome.designs.len(), outcome.nodes);
    if outcome.truncated {
        print!("{out}");
        return Err(CliError::Budget(format!(
            "search budget of {} nodes exhausted",
            opts.budget
        )));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(|e| {
            if p.exists() {
                CliError::Input(e.to_string())
            } else {
                CliError::Io(e.to_string())
            }
        })?,
        None => FileConfig::default(),
    };
    let workers = match cli.workers {
        Some(w) => w,
        None => file.integer("general", "workers")?.map_or_else(
            || std::thread::available_parallelism().map_or(1, |n| n.get()),
            |w| w as usize,
        ),
    }
    .max(1);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    let mut ctx = Ctx {
        file,
        resolved: Resolved::default(),
        workers,
    };
    ctx.resolved.set("workers", workers);
    let result = match &cli.command {
        Command::Codes => cmd_codes(),
        Command::DesignCheck(a) => cmd_design_check(&mut ctx, a),
        Command::Failure(a) => cmd_failure(&mut ctx, a),
        Command::Compare(a) => cmd_compare(&mut ctx, a),
        Command::Simulate(a) => cmd_simulate(&mut ctx, a),
        Command::Golden(a) => cmd_golden(&mut ctx, a),
        Command::Table(a) => cmd_table(&mut ctx, a),
        Command::Search(a) => cmd_search(&mut ctx, a),
    };
    if cli.verbose {
        eprint!("{}", ctx.resolved);
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
