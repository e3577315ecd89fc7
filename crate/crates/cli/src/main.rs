use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use codedtn::netfile::NetworkSpec;
use codedtn::simulator::{run_experiment, FailurePattern};
use codedtn::{
    plan_best, CodeScheme, ComplexField, Field, FieldKind, IndexLabel, PrimeField, RealField, SchemeKind, SlicingPlan,
    TensorNetwork,
};

mod formulas;
mod report;
mod sweep;

/// Runs `$body` with `$f` bound to the field backend selected by `$kind`.
macro_rules! with_field {
    ($kind:expr, |$f:ident| $body:expr) => {
        match $kind {
            FieldKind::Real64 => {
                let $f = RealField;
                $body
            }
            FieldKind::Complex128 => {
                let $f = ComplexField;
                $body
            }
            FieldKind::Prime(p) => {
                let $f = PrimeField::new(p)?;
                $body
            }
        }
    };
}
pub(crate) use with_field;

#[derive(Parser)]
#[command(name = "codedtn", version, about = "Coded computing for sliced tensor network contraction")]
struct Cli {
    /// Seed for random tensor data and random failure patterns.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network spec and its slicing plan.
    Validate { spec: PathBuf },
    /// Contract a network spec and print the result.
    Contract {
        spec: PathBuf,
        /// Comma-separated contraction order over the closed labels.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        /// Also sum every sliced partition and compare.
        #[arg(long)]
        check_slices: bool,
        #[arg(long)]
        field: Option<FieldKind>,
    },
    /// Run one coded experiment and emit a report.
    Simulate(SimulateArgs),
    /// Closed-form worker counts and gains for a plan.
    Formulas {
        /// Sliced indices as `m:L` pairs, e.g. `2:4,2:3`.
        #[arg(long, value_parser = parse_plan)]
        plan: SlicingPlan,
        /// Inclusive range `a..b`, or a single value.
        #[arg(long, value_parser = parse_range, default_value = "0..5")]
        f_range: (u64, u64),
        #[arg(long)]
        csv: bool,
    },
    /// Run a grid of simulations from a JSON config and write CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a code places the wanted slice products where decoding expects them.
    VerifyAlignment(AlignArgs),
}

#[derive(Args)]
struct SimulateArgs {
    spec: PathBuf,
    /// replicate, 2node, hyper, partial2node, partial1 or auto.
    #[arg(long, default_value = "auto", value_parser = parse_scheme_choice)]
    scheme: SchemeChoice,
    /// Failures to tolerate; sizes the worker pool.
    #[arg(short = 'f', default_value_t = 1)]
    f: u64,
    /// adversarial, random or explicit:<id,id,...>.
    #[arg(long, default_value = "adversarial")]
    failures: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    field: Option<FieldKind>,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long, value_parser = parse_plan, required_unless_present = "sweep")]
    plan: Option<SlicingPlan>,
    /// Defaults to 2node when every index has two nodes, else hyper.
    #[arg(long, value_parser = parse_scheme_choice)]
    scheme: Option<SchemeChoice>,
    /// Also check that every single-parameter mutation is caught.
    #[arg(long)]
    mutations: bool,
    /// Check every small 2-node and hyperedge plan instead.
    #[arg(long, conflicts_with = "plan")]
    sweep: bool,
}

fn parse_plan(s: &str) -> Result<SlicingPlan, String> {
    let params = s
        .split(',')
        .map(|pair| {
            let (m, l) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("`{pair}` is not an m:L pair"))?;
            let m = m.trim().parse::<usize>().map_err(|e| format!("`{pair}`: {e}"))?;
            let l = l.trim().parse::<usize>().map_err(|e| format!("`{pair}`: {e}"))?;
            Ok((m, l))
        })
        .collect::<Result<Vec<_>, String>>()?;
    SlicingPlan::from_params(&params).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let bad = |e: std::num::ParseIntError| format!("`{s}`: {e}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.parse().map_err(bad)?, b.trim_start_matches('=').parse().map_err(bad)?),
        None => {
            let v = s.parse().map_err(bad)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SchemeChoice {
    Auto,
    Fixed(SchemeKind),
}

pub(crate) fn parse_scheme_choice(s: &str) -> Result<SchemeChoice, String> {
    if s == "auto" {
        return Ok(SchemeChoice::Auto);
    }
    s.parse().map(SchemeChoice::Fixed).map_err(|e: codedtn::Error| e.to_string())
}

pub(crate) fn parse_failures(s: &str, f: u64, seed: u64) -> Result<FailurePattern> {
    match s {
        "adversarial" => Ok(FailurePattern::adversarial(f)),
        "random" => Ok(FailurePattern::random(f, seed)),
        other => {
            let ids = other
                .strip_prefix("explicit:")
                .ok_or_else(|| anyhow!("unknown failure pattern `{other}`"))?;
            let ids = ids
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>().with_context(|| format!("worker id `{t}`")))
                .collect::<Result<Vec<_>>>()?;
            Ok(FailurePattern::explicit(ids))
        }
    }
}

pub(crate) fn pick_scheme(choice: SchemeChoice, plan: &SlicingPlan, f: u64) -> codedtn::Result<CodeScheme> {
    match choice {
        SchemeChoice::Fixed(kind) => CodeScheme::new(kind, plan),
        SchemeChoice::Auto => plan_best(plan, f),
    }
}

fn load_spec(path: &Path) -> Result<NetworkSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    NetworkSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn build<F: Field>(spec: &NetworkSpec, field: F, seed: u64) -> Result<TensorNetwork<F>> {
    Ok(spec.build(field, seed)?)
}

fn validate(spec_path: &Path, seed: u64) -> Result<bool> {
    let spec = load_spec(spec_path)?;
    let report = with_field!(spec.field_kind()?, |f| build(&spec, f, seed)?.validate(&spec.slice_labels()));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if report.is_ok() {
        println!("ok: {} tensors, {} labels, slicing {:?}", spec.tensors.len(), spec.dims.len(), spec.slice);
    } else {
        for v in &report.violations {
            println!("violation: {v}");
        }
    }
    Ok(report.is_ok())
}

fn contract_in<F: Field>(spec: &NetworkSpec, field: F, seed: u64, order: Option<&[IndexLabel]>, check: bool) -> Result<bool> {
    let net = build(spec, field, seed)?;
    let result = net.full_contract(order)?;
    let axes: Vec<String> = result.axes().iter().map(|a| format!("{}:{}", a.label, a.dim)).collect();
    println!("open: [{}]", axes.join(","));
    println!("{}", result.to_json());
    if !check {
        return Ok(true);
    }
    let plan = SlicingPlan::new(&net, &spec.slice_labels())?;
    let mut total = None;
    for a in plan.assignments() {
        let part = net.slice(&plan, &a)?.full_contract(order_without(order, &plan).as_deref())?;
        total = Some(match total {
            None => part,
            Some(t) => part.add(&t)?,
        });
    }
    let total = total.expect("at least one assignment");
    let metric = codedtn::simulator::ErrorMetric::compare(&total, &result)?;
    let ok = metric.within(codedtn::simulator::FLOAT_TOLERANCE);
    match (metric.exact_match, ok) {
        (Some(true), _) => println!("slice-sum: exact match over {} partitions", plan.partitions()?),
        (None, true) => println!("slice-sum: match (max relative error {:.3e})", metric.max_rel),
        _ => println!("slice-sum: MISMATCH (max abs error {:.3e})", metric.max_abs),
    }
    Ok(ok)
}

fn order_without(order: Option<&[IndexLabel]>, plan: &SlicingPlan) -> Option<Vec<IndexLabel>> {
    order.map(|o| o.iter().filter(|l| !plan.labels().contains(l)).cloned().collect())
}

fn contract(spec_path: &Path, order: Option<Vec<String>>, check: bool, field: Option<FieldKind>, seed: u64) -> Result<bool> {
    let spec = load_spec(spec_path)?;
    let order: Option<Vec<IndexLabel>> = order.map(|o| o.iter().map(|l| IndexLabel::from(l.as_str())).collect());
    let kind = field.map_or_else(|| spec.field_kind(), Ok)?;
    with_field!(kind, |f| contract_in(&spec, f, seed, order.as_deref(), check))
}

fn simulate_in<F: Field>(spec: &NetworkSpec, field: F, args: &SimulateArgs, seed: u64) -> Result<bool> {
    let net = build(spec, field, seed)?;
    let plan = SlicingPlan::new(&net, &spec.slice_labels())?;
    let scheme = pick_scheme(args.scheme, &plan, args.f)?;
    let pattern = parse_failures(&args.failures, args.f, seed)?;
    let sim = run_experiment(&net, &scheme, args.f, &pattern)?;
    let ok = sim.verified;
    let file = report::ReportFile::new(sim, &args.spec, seed);
    match &args.out {
        Some(path) => {
            file.write(path)?;
            print!("{}", file.summary());
        }
        None => println!("{}", file.to_json()?),
    }
    Ok(ok)
}

fn simulate(args: &SimulateArgs, seed: u64) -> Result<bool> {
    let spec = load_spec(&args.spec)?;
    let kind = args.field.map_or_else(|| spec.field_kind(), Ok)?;
    with_field!(kind, |f| simulate_in(&spec, f, args, seed))
}

fn verify_alignment(args: &AlignArgs) -> Result<bool> {
    use codedtn::oracle::{alignment_sweep, check_alignment, check_layout, hyper_sweep, mutated_layout, mutations, two_node_sweep};
    if args.sweep {
        let mut ok = true;
        for (kind, plans) in [
            (SchemeKind::TwoNode, two_node_sweep(3, 32)),
            (SchemeKind::Hyperedge, hyper_sweep(2..=5, 1..=5, 3, 256)),
        ] {
            let rows = alignment_sweep(kind, &plans)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.result.passed()).collect();
            println!("{kind}: {} plans, {} failed", rows.len(), failed.len());
            for r in &failed {
                println!("  {} (degree {}): {}", r.plan, r.degree, r.result);
            }
            ok &= failed.is_empty();
        }
        return Ok(ok);
    }
    let plan = args.plan.as_ref().ok_or_else(|| anyhow!("--plan is required"))?;
    let kind = match args.scheme {
        Some(SchemeChoice::Fixed(kind)) => kind,
        _ if plan.indices().iter().all(|i| i.nodes == 2) => SchemeKind::TwoNode,
        _ => SchemeKind::Hyperedge,
    };
    let scheme = CodeScheme::new(kind, plan)?;
    println!("scheme {kind}, plan {}, degree {}", scheme.plan(), scheme.degree());
    match scheme.desired_positions()? {
        codedtn::DecodeGeometry::Aligned { exponent } => println!("target: x^{exponent}"),
        codedtn::DecodeGeometry::Separated { positions } => {
            for (a, e) in positions {
                println!("target: {a} -> x^{e}");
            }
        }
    }
    let result = check_alignment(&scheme)?;
    println!("alignment: {result}");
    let mut ok = result.passed();
    if args.mutations {
        let all = mutations(&scheme)?;
        let mut missed = 0;
        for m in &all {
            if check_layout(&mutated_layout(&scheme, m)?)?.passed() {
                println!("mutation not caught: {m:?}");
                missed += 1;
            }
        }
        println!("mutations: {} checked, {missed} not caught", all.len());
        ok &= missed == 0;
    }
    Ok(ok)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { spec } => validate(&spec, cli.seed),
        Command::Contract {
            spec,
            order,
            check_slices,
            field,
        } => contract(&spec, order, check_slices, field, cli.seed),
        Command::Simulate(args) => simulate(&args, cli.seed),
        Command::Formulas { plan, f_range, csv } => {
            formulas::print(&plan, f_range, csv)?;
            Ok(true)
        }
        Command::Sweep { config, out } => sweep::run(&config, out.as_deref()),
        Command::VerifyAlignment(args) => verify_alignment(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
