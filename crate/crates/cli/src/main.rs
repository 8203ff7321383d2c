use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use biplane::autgroup::{analyze, are_isomorphic};
use biplane::catalog::{config_digest, Catalog, Provenance, CATALOG_ENV};
use biplane::construct::{
    construct_in_space, search_space, Builtin, ConstructionResult, RowOrder, SearchConfig,
    StructuralInvariant,
};
use biplane::levelsets::{classify_sampled, classify_vectors, conjecture_check, exceptional_indices};
use biplane::stats::StatsDocument;
use biplane::twospace::q_census;
use biplane::{canonical_header, check_lemma_zero_pattern, BiplaneParams, Error, IncidenceMatrix, TwoSpace};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "biplane", version, about = "Construct, verify and classify biplanes")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Also write the stats document to this file.
    #[arg(long, global = true)]
    stats_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical first k rows.
    Header {
        #[arg(long)]
        order: usize,
    },
    /// Enumerate the 2-space subsets and report their sizes.
    Twospace {
        #[arg(long)]
        order: usize,
        /// Count without storing vectors.
        #[arg(long)]
        count_only: bool,
    },
    /// Seeded completion search and isomorphism census.
    Construct(ConstructArgs),
    /// Check the biplane axioms of a matrix file.
    Verify { path: PathBuf },
    /// Automorphism group order and canonical certificate of a matrix file.
    Aut { path: PathBuf },
    /// Isomorphism test between two matrix files.
    Iso {
        first: PathBuf,
        second: PathBuf,
        /// Accept the dual of the second matrix as well.
        #[arg(long)]
        allow_dual: bool,
    },
    /// Regular-vector census of the 2-space.
    Levelsets {
        #[arg(long)]
        order: usize,
        /// Minimum number of level sets sharing the modal value.
        #[arg(long)]
        threshold: Option<u32>,
        /// Profile only this many vectors per subset.
        #[arg(long)]
        sample: Option<usize>,
        /// Write per-vector modal statistics to this JSON file.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Compare completions over the full and the regular-restricted 2-space.
    Conjecture {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        threshold: Option<u32>,
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Catalog maintenance.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
        #[arg(long, env = CATALOG_ENV, global = true)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Re-verify every entry and the index.
    Check,
    /// List entries.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum RowOrderArg {
    Index,
    FailFirst,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    order: usize,
    /// Built-in invariant: A, B, C, FIG_B7 or FIG_B9C.
    #[arg(long, conflicts_with_all = ["invariant_file", "seedless"])]
    invariant: Option<String>,
    /// Invariant in the block text format.
    #[arg(long, conflicts_with = "seedless")]
    invariant_file: Option<PathBuf>,
    /// Complete the bare canonical header.
    #[arg(long)]
    seedless: bool,
    /// Search the unrestricted 2-space without forcing the diagonal.
    #[arg(long, conflicts_with = "trace_restriction")]
    no_trace_restriction: bool,
    /// Force the trace-v restriction even where the invariant defaults it off.
    #[arg(long)]
    trace_restriction: bool,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    max_solutions: Option<u64>,
    #[arg(long, value_enum, default_value_t = RowOrderArg::FailFirst)]
    row_order: RowOrderArg,
    /// Directory for one representative matrix per class.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = CATALOG_ENV)]
    catalog: Option<PathBuf>,
    /// Do not touch the catalog.
    #[arg(long)]
    no_catalog: bool,
}

fn params(order: usize) -> Result<BiplaneParams, Error> {
    BiplaneParams::from_order(order)
}

fn read_matrix(path: &PathBuf) -> Result<IncidenceMatrix, Error> {
    IncidenceMatrix::from_text(&fs::read_to_string(path)?)
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::ZeroOrder
            | Error::UnsupportedOrder { .. }
            | Error::InvalidDimensions(_)
            | Error::ParamMismatch(_)
            | Error::Parse { .. }
            | Error::InvariantOrder { .. }
            | Error::UnknownInvariant(_)
            | Error::Io(_)
    )
}

struct Outcome {
    doc: StatsDocument,
    exit: u8,
}

impl Outcome {
    fn ok(doc: StatsDocument) -> Self {
        Outcome { doc, exit: 0 }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Header { order } => {
            let h = canonical_header(params(*order)?);
            println!("order={order}");
            for row in h.rows() {
                println!("{row}");
            }
            return Ok(Outcome::ok(StatsDocument::new("header").param("order", order)));
        }
        Command::Twospace { order, count_only } => twospace(*order, *count_only)?,
        Command::Construct(args) => construct(args, cli.threads)?,
        Command::Verify { path } => verify(path)?,
        Command::Aut { path } => {
            let m = read_matrix(path)?;
            let a = analyze(&m);
            Outcome::ok(StatsDocument::new("aut").param("path", path).with_results(&json!({
                "order": m.params().order,
                "aut_order": a.aut.group_order,
                "generators": a.aut.generators.len(),
                "certificate": a.certificate.to_hex(),
                "digest": a.certificate.digest(),
            }))?)
            .with_nodes(a.stats.nodes)
        }
        Command::Iso {
            first,
            second,
            allow_dual,
        } => {
            let iso = are_isomorphic(&read_matrix(first)?, &read_matrix(second)?, *allow_dual)?;
            Outcome::ok(
                StatsDocument::new("iso")
                    .param("first", first)
                    .param("second", second)
                    .param("allow_dual", allow_dual)
                    .with_results(&json!({ "isomorphic": iso }))?,
            )
        }
        Command::Levelsets {
            order,
            threshold,
            sample,
            profiles,
        } => levelsets(*order, *threshold, *sample, profiles.as_ref())?,
        Command::Conjecture {
            order,
            threshold,
            node_budget,
        } => {
            let config = SearchConfig {
                node_budget: *node_budget,
                threads: cli.threads,
                ..SearchConfig::default()
            };
            let r = conjecture_check(*order, *threshold, &config)?;
            let exit = if r.exhaustive { 0 } else { EXIT_BUDGET };
            Outcome {
                doc: StatsDocument::new("conjecture")
                    .param("order", order)
                    .param("threshold", threshold)
                    .param("node_budget", node_budget)
                    .with_results(&r)?,
                exit,
            }
        }
        Command::Catalog { action, catalog } => {
            let cat = Catalog::open(catalog.clone().unwrap_or_else(Catalog::default_path))?;
            match action {
                CatalogAction::Check => {
                    let r = cat.check()?;
                    Outcome {
                        exit: if r.is_ok() { 0 } else { EXIT_VERIFY },
                        doc: StatsDocument::new("catalog-check")
                            .param("catalog", cat.root())
                            .with_results(&r)?,
                    }
                }
                CatalogAction::List => Outcome::ok(
                    StatsDocument::new("catalog-list")
                        .param("catalog", cat.root())
                        .with_results(&cat.index()?)?,
                ),
            }
        }
    };
    out.doc.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(out)
}

impl Outcome {
    fn with_nodes(mut self, nodes: u64) -> Self {
        self.doc.nodes = Some(nodes);
        self
    }
}

fn twospace(order: usize, count_only: bool) -> Result<Outcome, Error> {
    let p = params(order)?;
    let doc = StatsDocument::new("twospace")
        .param("order", order)
        .param("count_only", count_only);
    let results = if count_only {
        serde_json::to_value(q_census(order)?)?
    } else {
        let space = TwoSpace::build(p);
        let card = space.cardinalities();
        let mut values = card.values().copied();
        let first = values.next();
        let q = first.filter(|f| values.all(|x| x == *f));
        json!({ "order": order, "q": q, "per_subset": card })
    };
    Ok(Outcome::ok(doc.with_results(&results)?))
}

fn verify(path: &PathBuf) -> Result<Outcome, Error> {
    let m = read_matrix(path)?;
    let verdict = m.verify();
    let stats = m.stats();
    let lemma = (verdict.is_ok() && stats.canonical_header && stats.trace == m.params().v)
        .then(|| check_lemma_zero_pattern(&m).map_err(|e| format!("{e:?}")));
    let doc = StatsDocument::new("verify").param("path", path).with_results(&json!({
        "order": m.params().order,
        "ok": verdict.is_ok(),
        "violation": verdict.as_ref().err().map(|v| v.to_string()),
        "trace": stats.trace,
        "symmetric": stats.symmetric,
        "canonical_header": stats.canonical_header,
        "lemma_zero_pattern": lemma.map(|r| r.err().unwrap_or_else(|| "ok".into())),
    }))?;
    Ok(Outcome {
        doc,
        exit: if verdict.is_ok() { 0 } else { EXIT_VERIFY },
    })
}

fn resolve_invariant(args: &ConstructArgs, p: BiplaneParams) -> Result<(StructuralInvariant, bool), Error> {
    if let Some(name) = &args.invariant {
        let b: Builtin = name.parse()?;
        return Ok((biplane::construct::builtin_invariant(b, p)?, b.default_trace()));
    }
    if let Some(path) = &args.invariant_file {
        let inv = StructuralInvariant::from_text(&fs::read_to_string(path)?)?;
        inv.validate(p)?;
        return Ok((inv, true));
    }
    if args.seedless {
        return Ok((StructuralInvariant::empty(p), true));
    }
    Err(Error::UnknownInvariant(
        "give --invariant, --invariant-file or --seedless".into(),
    ))
}

fn construct(args: &ConstructArgs, threads: usize) -> Result<Outcome, Error> {
    let p = params(args.order)?;
    let (inv, default_trace) = resolve_invariant(args, p)?;
    let trace = if args.no_trace_restriction {
        false
    } else {
        args.trace_restriction || default_trace
    };
    let config = SearchConfig {
        node_budget: args.node_budget,
        max_solutions: args.max_solutions,
        threads,
        row_order: match args.row_order {
            RowOrderArg::Index => RowOrder::Index,
            RowOrderArg::FailFirst => RowOrder::FailFirst,
        },
    };
    let space = search_space(p, trace);
    let result = match construct_in_space(&inv, &space, trace, &config) {
        Ok(r) => r,
        Err(Error::Infeasible(msg)) => {
            let doc = StatsDocument::new("construct")
                .param("order", args.order)
                .param("invariant", &inv.name)
                .param("trace_restriction", trace)
                .with_results(&json!({ "infeasible": msg, "classes": [] }))?;
            return Ok(Outcome::ok(doc));
        }
        Err(e) => return Err(e),
    };
    let mut written = Vec::new();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        for c in &result.classes {
            let path = dir.join(format!("{}.txt", &c.certificate.digest()[..16]));
            fs::write(&path, c.representative.to_text())?;
            written.push(path);
        }
    }
    let mut inserted = 0;
    if !args.no_catalog {
        let cat = Catalog::open(args.catalog.clone().unwrap_or_else(Catalog::default_path))?;
        let digest = config_digest(&(&config, trace));
        for c in &result.classes {
            let (_, new) = cat.insert(&c.representative, Provenance::now(&inv.name, &digest))?;
            inserted += new as usize;
        }
    }
    let exit = if result.is_exhaustive() { 0 } else { EXIT_BUDGET };
    let doc = StatsDocument::new("construct")
        .param("order", args.order)
        .param("invariant", &inv.name)
        .param("trace_restriction", trace)
        .param("config", &config)
        .with_results(&construct_json(&result, &written, inserted))?;
    Ok(Outcome {
        doc: StatsDocument {
            nodes: Some(result.stats.nodes),
            ..doc
        },
        exit,
    })
}

fn construct_json(r: &ConstructionResult, written: &[PathBuf], inserted: usize) -> serde_json::Value {
    let classes: Vec<_> = r
        .classes
        .iter()
        .map(|c| {
            json!({
                "digest": c.certificate.digest(),
                "aut_order": c.aut_order,
                "completions": c.completions,
                "symmetric": c.symmetric,
                "full_trace": c.full_trace,
                "lemma_violations": c.lemma_violations,
            })
        })
        .collect();
    json!({
        "aut_orders": r.aut_orders(),
        "classes": classes,
        "exhaustive": r.is_exhaustive(),
        "search": r.stats,
        "written": written,
        "catalog_inserted": inserted,
    })
}

fn levelsets(
    order: usize,
    threshold: Option<u32>,
    sample: Option<usize>,
    profiles: Option<&PathBuf>,
) -> Result<Outcome, Error> {
    let p = params(order)?;
    let space = TwoSpace::build(p);
    let census = match sample {
        Some(n) => classify_sampled(&space, threshold, n),
        None => classify_vectors(&space, threshold),
    };
    if let Some(path) = profiles {
        fs::write(path, serde_json::to_string_pretty(&census.summaries)?)?;
    }
    let summary = json!({
        "exceptional_one_based": exceptional_indices(p).one_based(),
        "q_alpha": census.alpha().map(|b| b.q),
        "q_beta": census.beta().map(|b| b.q),
        "alpha_per_subset": census.alpha().and_then(|b| b.constant_count()),
        "beta_per_subset": census.beta().and_then(|b| b.constant_count()),
        "census": census,
    });
    Ok(Outcome::ok(
        StatsDocument::new("levelsets")
            .param("order", order)
            .param("threshold", threshold)
            .param("sample", sample)
            .with_results(&summary)?,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads != 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            if !matches!(cli.command, Command::Header { .. }) {
                println!("{}", out.doc.to_json());
            }
            if let Some(path) = &cli.stats_out {
                if let Err(e) = fs::write(path, out.doc.to_json()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage(&e) { EXIT_USAGE } else { EXIT_VERIFY })
        }
    }
}
