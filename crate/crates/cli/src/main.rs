//! `coverlift`: cover listing, lifting, exact checks, branch-and-cut and
//! benchmark batches from the command line.
//!
//! Exit codes: 0 success, 1 error, 2 usage, 3 solve stopped before proving
//! optimality, 4 an exact oracle exceeded its enumeration budget.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use coverlift::bench::{performance_profile, profile_path, run_bench, write_csv, BenchSpec};
use coverlift::bnc::{root_lp_point, solve, BncConfig, LiftingChoice, NodeSelection};
use coverlift::cover_gen::{generate_covers, CoverRoutine, LpPoint};
use coverlift::instances::{read_instance, GeneratorSpec, IpInstance, NormalizedRow};
use coverlift::oracles::{cut_valid, facet_report, superadditivity_check, t_facet_check, CutCheck};
use coverlift::{
    classify_domination, g_k_piecewise, g_w_piecewise, lift_gns, lift_pc, lift_smart, lift_with, parse_rational,
    raw_w_cut, CoverError, CoverParams, KnapsackRow, LiftMethod, LiftParam, LiftedCut, Rational, TabulatedW,
};

/// Knots used to tabulate a logistic `w` for checks.
const LOGISTIC_INTERVALS: usize = 10_000;

#[derive(Parser)]
#[command(name = "coverlift", version, about = "Lifted minimal cover inequalities for 0-1 knapsack rows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the minimal covers the separation heuristics pick for an LP point.
    Covers(CoversArgs),
    /// Lift the cover inequality of a minimal cover.
    Lift(LiftArgs),
    /// Run an exact check on a cover and its lifted cuts.
    Check(CheckArgs),
    /// Solve the instance by branch-and-cut.
    Solve(SolveArgs),
    /// Solve every instance of a bench spec with every configuration.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file, or `gen:<generator>` such as `gen:mkp-weak:n=40,m=5,seed=1`.
    instance: String,
    /// Overrides the seed of a `gen:` instance.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RowArgs {
    #[command(flatten)]
    source: InstanceArgs,
    /// Constraint row to work on (1-based).
    #[arg(long, default_value_t = 1)]
    row: usize,
}

#[derive(Args)]
struct CoversArgs {
    #[command(flatten)]
    row: RowArgs,
    /// File with one value per variable, or `solve-root` for the root LP optimum.
    #[arg(long)]
    lp: String,
    /// contiguous, spread, heaviest, default, bang-for-buck, or all.
    #[arg(long, default_value = "all", value_parser = parse_routines)]
    method: Routines,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    row: RowArgs,
    /// Cover as 1-based variable indices, e.g. `1,2,3,4`.
    #[arg(long, value_delimiter = ',', required = true)]
    cover: Vec<usize>,
    /// pc, gns, smart, or k=<rational>.
    #[arg(long, default_value = "smart", value_parser = parse_lift_method)]
    method: LiftSelector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum CheckKind {
    Superadd,
    FacetPc,
    FacetGns,
    Domination,
    Validity,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    row: RowArgs,
    #[arg(long, value_delimiter = ',')]
    cover: Vec<usize>,
    #[arg(long, value_enum)]
    what: CheckKind,
    /// Lifting checked by superadd and validity: pc, gns, k=<rational> or
    /// logistic=<steepness>.
    #[arg(long, default_value = "pc", value_parser = parse_check_method)]
    method: CheckMethod,
    /// Validity of an arbitrary cut: comma-separated coefficients for every
    /// variable of the row, decimals read exactly.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    raw_cut: Option<Vec<String>>,
    /// Right-hand side of `--raw-cut`; defaults to `|C| - 1` for the given cover.
    #[arg(long, allow_hyphen_values = true)]
    rhs: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: InstanceArgs,
    /// none, pc, gns or smart.
    #[arg(long, default_value = "pc")]
    lift: LiftingChoice,
    #[arg(long, value_delimiter = ',', default_value = "contiguous")]
    covers: Vec<CoverRoutine>,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Cuts added per node.
    #[arg(long, default_value_t = 10)]
    cut_limit: usize,
    #[arg(long)]
    total_cut_limit: Option<usize>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Depth-first node selection instead of best bound.
    #[arg(long)]
    dfs: bool,
    /// Check every added cut with the exact validity oracle.
    #[arg(long)]
    validate_cuts: bool,
    /// Write result and statistics as JSON to this file (`-` for stdout).
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML spec listing instances and configurations.
    spec: PathBuf,
    /// Records CSV; the performance profile goes next to it as `<stem>.profile.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Debug)]
struct Routines(Vec<CoverRoutine>);

fn parse_routines(s: &str) -> Result<Routines, String> {
    if s == "all" {
        return Ok(Routines(CoverRoutine::ALL.to_vec()));
    }
    s.split(',').map(str::parse).collect::<Result<_, _>>().map(Routines)
}

#[derive(Clone, Copy, Debug)]
enum LiftSelector {
    Pc,
    Gns,
    Smart,
    Slope(Rational),
}

fn parse_slope(s: &str) -> Result<Option<Rational>, String> {
    match s.strip_prefix("k=") {
        Some(k) => parse_rational(k).map(Some).ok_or_else(|| format!("cannot read slope '{k}'")),
        None => Ok(None),
    }
}

fn parse_lift_method(s: &str) -> Result<LiftSelector, String> {
    if let Some(k) = parse_slope(s)? {
        return Ok(LiftSelector::Slope(k));
    }
    match s {
        "pc" => Ok(LiftSelector::Pc),
        "gns" => Ok(LiftSelector::Gns),
        "smart" => Ok(LiftSelector::Smart),
        _ => Err(format!("unknown lifting method '{s}' (pc, gns, smart, k=<rational>)")),
    }
}

#[derive(Clone, Copy, Debug)]
enum CheckMethod {
    Lift(LiftParam),
    Logistic(f64),
}

fn parse_check_method(s: &str) -> Result<CheckMethod, String> {
    if let Some(k) = parse_slope(s)? {
        return Ok(CheckMethod::Lift(LiftParam::Slope(k)));
    }
    if let Some(steep) = s.strip_prefix("logistic=") {
        return steep
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .map(CheckMethod::Logistic)
            .ok_or_else(|| format!("cannot read steepness '{steep}'"));
    }
    match s {
        "pc" => Ok(CheckMethod::Lift(LiftParam::Pc)),
        "gns" => Ok(CheckMethod::Lift(LiftParam::Gns)),
        _ => Err(format!("unknown method '{s}' (pc, gns, k=<rational>, logistic=<steepness>)")),
    }
}

enum Failure {
    Usage(String),
    Budget(String),
    NotProven,
    Other(String),
}

impl Failure {
    fn from_cover(err: CoverError, view: Option<&RowView>) -> Self {
        match (err, view) {
            (err @ CoverError::BudgetExceeded { .. }, _) => Failure::Budget(err.to_string()),
            (CoverError::NotMinimal { witness, remaining, capacity }, Some(view)) => Failure::Other(format!(
                "cover is not minimal: without {} it still weighs {remaining} > capacity {capacity}",
                view.name(witness)
            )),
            (err, _) => Failure::Other(err.to_string()),
        }
    }
}

fn other(err: impl std::fmt::Display) -> Failure {
    Failure::Other(err.to_string())
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Covers(args) => cmd_covers(args),
        Command::Lift(args) => cmd_lift(args),
        Command::Check(args) => cmd_check(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotProven) => ExitCode::from(3),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_instance(args: &InstanceArgs) -> CliResult<IpInstance> {
    match args.instance.strip_prefix("gen:") {
        Some(spec) => {
            let mut spec: GeneratorSpec = spec.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            if let Some(seed) = args.seed {
                spec = match spec {
                    GeneratorSpec::Mkp { kind, n, m, .. } => GeneratorSpec::Mkp { kind, n, m, seed },
                    GeneratorSpec::Chvatal { n, .. } => GeneratorSpec::Chvatal { n, seed },
                };
            }
            spec.generate().map_err(other)
        }
        None => read_instance(&args.instance).map_err(other),
    }
}

/// One constraint row seen as a knapsack over (possibly complemented) items.
struct RowView {
    n: usize,
    norm: NormalizedRow,
    row: KnapsackRow,
}

impl RowView {
    fn load(args: &RowArgs) -> CliResult<(IpInstance, Self)> {
        let inst = load_instance(&args.source)?;
        if args.row == 0 || args.row > inst.m() {
            return Err(Failure::Usage(format!("--row must be in 1..={}", inst.m())));
        }
        let norm = inst.normalized_rows().map_err(other)?.swap_remove(args.row - 1);
        let row = norm.row.clone().ok_or_else(|| other(format!("row {} has no free items", args.row)))?;
        let view = RowView { n: inst.n(), norm, row };
        Ok((inst, view))
    }

    fn name(&self, item: usize) -> String {
        let var = self.norm.vars[item] + 1;
        if self.norm.complemented[item] {
            format!("~x{var}")
        } else {
            format!("x{var}")
        }
    }

    fn set(&self, items: &[usize]) -> String {
        let names: Vec<String> = items
            .iter()
            .map(|&p| {
                let var = (self.norm.vars[p] + 1).to_string();
                if self.norm.complemented[p] {
                    format!("~{var}")
                } else {
                    var
                }
            })
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Maps 1-based variable indices to item positions.
    fn items(&self, vars: &[usize]) -> CliResult<Vec<usize>> {
        vars.iter()
            .map(|&v| {
                self.norm
                    .vars
                    .iter()
                    .position(|&j| j + 1 == v)
                    .ok_or_else(|| Failure::Usage(format!("x{v} is not a free item of this row")))
            })
            .collect()
    }

    fn params(&self, cover: &[usize]) -> CliResult<CoverParams> {
        let items = self.items(cover)?;
        CoverParams::new(&self.row, &items).map_err(|e| Failure::from_cover(e, Some(self)))
    }

    fn cut(&self, cut: &LiftedCut) -> String {
        cut.format_with(|p| self.name(p))
    }

    /// A point over the items, written over all original variables.
    fn global_point(&self, local: &[bool]) -> String {
        let mut x = vec![false; self.n];
        for (p, &v) in local.iter().enumerate() {
            x[self.norm.vars[p]] = v != self.norm.complemented[p];
        }
        for &(j, value) in &self.norm.fixings {
            x[j] = value;
        }
        let digits: Vec<&str> = x.iter().map(|&v| if v { "1" } else { "0" }).collect();
        format!("({})", digits.join(","))
    }

    fn is_identity(&self) -> bool {
        self.norm.vars.len() == self.n && self.norm.complemented.iter().all(|c| !c)
    }
}

fn summary(p: &CoverParams) -> String {
    let list = |v: Vec<i64>| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    format!(
        "mu=({}) lambda={} rho=({})",
        list((1..=p.t()).map(|h| p.mu(h)).collect()),
        p.lambda(),
        list((1..p.t()).map(|h| p.rho(h)).collect())
    )
}

fn read_point(path: &Path, n: usize) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| other(format!("{}: cannot read '{t}'", path.display()))))
        .collect::<CliResult<Vec<f64>>>()?;
    if values.len() != n {
        return Err(other(format!("{}: expected {n} values, found {}", path.display(), values.len())));
    }
    Ok(values)
}

fn cmd_covers(args: CoversArgs) -> CliResult {
    let (inst, view) = RowView::load(&args.row)?;
    let x = if args.lp == "solve-root" {
        root_lp_point(&inst).map_err(other)?.ok_or_else(|| other("the LP relaxation is infeasible"))?
    } else {
        read_point(Path::new(&args.lp), inst.n())?
    };
    let point = LpPoint::new(view.norm.to_local(&x));
    let objective: Vec<i64> = view
        .norm
        .vars
        .iter()
        .zip(&view.norm.complemented)
        .map(|(&j, &c)| if c { -inst.objective[j] } else { inst.objective[j] })
        .collect();
    for routine in args.method.0 {
        let covers = generate_covers(routine, &view.row, &point, &objective).map_err(other)?;
        for cover in covers {
            let params = CoverParams::new(&view.row, &cover).map_err(other)?;
            println!("{routine}: {} {}", view.set(&cover), summary(&params));
        }
    }
    Ok(())
}

fn cmd_lift(args: LiftArgs) -> CliResult {
    let (_, view) = RowView::load(&args.row)?;
    let params = view.params(&args.cover)?;
    let cuts = match args.method {
        LiftSelector::Pc => vec![lift_pc(&params)],
        LiftSelector::Gns => vec![lift_gns(&params)],
        LiftSelector::Smart => lift_smart(&params),
        LiftSelector::Slope(k) => {
            vec![lift_with(&params, LiftParam::Slope(k)).map_err(|e| Failure::from_cover(e, Some(&view)))?]
        }
    };
    if matches!(args.method, LiftSelector::Pc) && cuts[0].method == LiftMethod::Gns {
        eprintln!("note: mu_1 - lambda < rho_1, so PC lifting falls back to GNS");
    }
    for cut in &cuts {
        println!("{}", view.cut(cut));
    }
    Ok(())
}

fn require_cover(args: &CheckArgs) -> CliResult<&[usize]> {
    if args.cover.is_empty() {
        return Err(Failure::Usage("--cover is required for this check".into()));
    }
    Ok(&args.cover)
}

fn cmd_check(args: CheckArgs) -> CliResult {
    let (_, view) = RowView::load(&args.row)?;
    let cover_err = |e: CoverError| Failure::from_cover(e, Some(&view));
    match args.what {
        CheckKind::Superadd => {
            let params = view.params(require_cover(&args)?)?;
            let b = params.row().capacity();
            let verdict = match args.method {
                CheckMethod::Lift(param) => {
                    let g = g_k_piecewise(&params, param).map_err(cover_err)?;
                    superadditivity_check(&g, Rational::from(b as i128)).map_err(cover_err)?.map(|c| {
                        format!(
                            "NOT SUPERADDITIVE, violation {} at ({}, {}); largest {} near ({}, {})",
                            c.violation, c.z1, c.z2, c.max_violation, c.vertex.0, c.vertex.1
                        )
                    })
                }
                CheckMethod::Logistic(steep) => {
                    let g = g_w_piecewise(&params, &logistic(&params, steep)?).map_err(cover_err)?;
                    superadditivity_check(&g, b as f64).map_err(cover_err)?.map(|c| {
                        format!(
                            "NOT SUPERADDITIVE, violation {:.4} at ({:.4}, {:.4}); largest {:.4} near ({:.4}, {:.4})",
                            c.violation, c.z1, c.z2, c.max_violation, c.vertex.0, c.vertex.1
                        )
                    })
                }
            };
            println!("{}", verdict.unwrap_or_else(|| "SUPERADDITIVE".into()));
        }
        CheckKind::FacetPc | CheckKind::FacetGns => {
            let params = view.params(require_cover(&args)?)?;
            let cut = if args.what == CheckKind::FacetPc { lift_pc(&params) } else { lift_gns(&params) };
            let report = facet_report(params.row(), &cut).map_err(cover_err)?;
            if report.is_facet {
                println!("FACET (oracle-confirmed, rank {})", report.affine_rank);
            } else if report.is_valid {
                println!("NOT FACET (valid, rank {} < {})", report.affine_rank, params.row().len() - 1);
            } else {
                println!("INVALID");
            }
            println!("cut: {}", view.cut(&cut));
            if let Ok(vertex) = t_facet_check(&params, &cut) {
                println!("T polyhedron check: {}", if vertex { "FACET" } else { "NOT FACET" });
            }
        }
        CheckKind::Domination => {
            let params = view.params(require_cover(&args)?)?;
            println!("{}", classify_domination(&params).map_err(cover_err)?);
        }
        CheckKind::Validity => {
            let cut = match &args.raw_cut {
                Some(coeffs) => raw_cut(&args, &view, coeffs)?,
                None => {
                    let params = view.params(require_cover(&args)?)?;
                    match args.method {
                        CheckMethod::Lift(param) => lift_with(&params, param).map_err(cover_err)?,
                        CheckMethod::Logistic(steep) => {
                            raw_w_cut(&params, &logistic(&params, steep)?).map_err(cover_err)?
                        }
                    }
                }
            };
            match cut_valid(&view.row, &cut).map_err(cover_err)? {
                CutCheck::Valid => println!("VALID"),
                CutCheck::Violated(x) => println!("INVALID, witness {}", view.global_point(&x)),
            }
        }
    }
    Ok(())
}

fn logistic(params: &CoverParams, steepness: f64) -> CliResult<TabulatedW> {
    TabulatedW::logistic(params.rho1() as f64, steepness, LOGISTIC_INTERVALS).map_err(|e| Failure::from_cover(e, None))
}

fn raw_cut(args: &CheckArgs, view: &RowView, coeffs: &[String]) -> CliResult<LiftedCut> {
    if !view.is_identity() {
        return Err(other("--raw-cut needs a row whose coefficients are all positive"));
    }
    let parse = |s: &str| parse_rational(s).ok_or_else(|| Failure::Usage(format!("cannot read number '{s}'")));
    let coefficients = coeffs.iter().map(|c| parse(c)).collect::<CliResult<Vec<_>>>()?;
    if coefficients.len() != view.n {
        return Err(Failure::Usage(format!("--raw-cut has {} values, the row has {}", coefficients.len(), view.n)));
    }
    let rhs = match (&args.rhs, args.cover.is_empty()) {
        (Some(r), _) => parse(r)?,
        (None, false) => Rational::from(args.cover.len() as i128 - 1),
        (None, true) => return Err(Failure::Usage("--raw-cut needs --rhs or --cover".into())),
    };
    Ok(LiftedCut::raw(coefficients, rhs))
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let inst = load_instance(&args.source)?;
    if args.covers.is_empty() {
        return Err(Failure::Usage("--covers needs at least one routine".into()));
    }
    let config = BncConfig {
        per_node_cut_limit: args.cut_limit,
        total_cut_limit: args.total_cut_limit,
        lifting: args.lift,
        cover_routines: args.covers.clone(),
        node_selection: if args.dfs { NodeSelection::Dfs } else { NodeSelection::BestBound },
        time_limit: args.time_limit,
        node_limit: args.node_limit,
        validate_cuts: args.validate_cuts,
        ..BncConfig::default()
    };
    let res = solve(&inst, &config).map_err(other)?;
    let stats = &res.stats;
    let ones: Vec<usize> =
        res.point.iter().flat_map(|x| x.iter().enumerate().filter(|(_, &v)| v).map(|(j, _)| j + 1)).collect();
    let status = match (stats.proven_optimal, res.optimum) {
        (true, Some(_)) => "optimal",
        (true, None) => "infeasible",
        (false, _) => "not proven optimal",
    };
    println!("instance: {}", inst.name);
    println!("status: {status}");
    match res.optimum {
        Some(v) => println!("{}: {v}", if stats.proven_optimal { "objective" } else { "incumbent" }),
        None => println!("incumbent: none"),
    }
    if res.point.is_some() {
        let list: Vec<String> = ones.iter().map(usize::to_string).collect();
        println!("solution: {{{}}}", list.join(","));
    }
    println!("tree size: {}", stats.tree_size);
    println!("cuts added: {} of {} generated", stats.cuts_added, stats.cuts_generated);
    if config.validate_cuts {
        println!("cuts validated: {} ({} invalid)", stats.cuts_validated, stats.cut_validation_failures);
    }
    println!("wall time: {:.3}s", stats.wall_time);
    if let Some(target) = &args.json {
        let doc = json!({
            "instance": inst.name,
            "status": status,
            "optimum": res.optimum,
            "solution": ones,
            "stats": stats,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(other)?;
        if target == "-" {
            println!("{text}");
        } else {
            std::fs::write(target, text + "\n").map_err(|e| other(format!("{target}: {e}")))?;
        }
    }
    if stats.proven_optimal {
        Ok(())
    } else {
        Err(Failure::NotProven)
    }
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let spec = BenchSpec::load(&args.spec).map_err(other)?;
    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let records = run_bench(&spec, jobs).map_err(other)?;
    let profile = performance_profile(&records, &spec.configs, &spec.thresholds);
    let create = |path: &Path| std::fs::File::create(path).map_err(|e| other(format!("{}: {e}", path.display())));
    let profile_out = profile_path(&args.out);
    write_csv(&records, create(&args.out)?).map_err(other)?;
    write_csv(&profile, create(&profile_out)?).map_err(other)?;
    let proven = records.iter().filter(|r| r.proven_optimal).count();
    println!(
        "{} runs ({} proven optimal) -> {}; profile -> {}",
        records.len(),
        proven,
        args.out.display(),
        profile_out.display()
    );
    Ok(())
}
