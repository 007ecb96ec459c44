//! Batch CLI for constructing commutative Moufang loops, computing their
//! automorphism groups, and classifying the quasigroups affine over them.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use moufang_core::classify::{
    self, classify_centrally_affine, classify_distributive, classify_trimedial,
    tag_steiner_mendelsohn, Budgets, ClassificationReport, ClassifyOptions, LoopPipeline,
    QuasigroupKind, ReportStatus,
};
use moufang_core::constructions::{nonassociative_cml_names, resolve_loop};
use moufang_core::quasigroup::{
    check_distributive, check_idempotent, check_trimedial, emit_triple_system, TripleKind,
    TrimedialMode,
};
use moufang_core::search::{central_data, hat, AutSearchConfig, SearchContext};
use moufang_core::{par, textio, LoopTable, Perm};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "moufang",
    about = "Finite commutative Moufang loops and the quasigroups affine over them",
    version
)]
struct Cli {
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// PRNG seed for sampled checks; echoed in output file headers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cap on candidate-image attempts in the backtracking searches.
    #[arg(long = "budget-leaves", global = true, default_value_t = 2_000_000_000)]
    budget_leaves: u64,

    /// Cap on points visited in a single orbit closure.
    #[arg(long = "budget-points", global = true, default_value_t = 100_000_000)]
    budget_points: u64,

    /// Wall-clock cap in seconds for the searches of one loop pipeline.
    #[arg(long = "budget-seconds", global = true)]
    budget_seconds: Option<u64>,

    /// Directory with imported Cayley tables (243_1.tbl, 243_2.tbl, ...).
    #[arg(long, global = true, default_value = "data/imports")]
    imports: PathBuf,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural facts about a loop: order, exponent, center, associator
    /// subloop, identities.
    LoopInfo {
        selector: String,
        /// Also run the automorphism searches (|Aut|, |Aut_C|, |J Aut_C|, |CO|).
        #[arg(long)]
        aut: bool,
    },
    /// Full automorphism group: prints the order, optionally dumps generators.
    Aut {
        selector: String,
        #[arg(long)]
        dump_generators: Option<PathBuf>,
    },
    /// Central automorphism group via the constrained search and the
    /// kernel of the action on Q/Z(Q).
    Autc {
        selector: String,
        #[arg(long)]
        dump_generators: Option<PathBuf>,
    },
    /// J-central orthoautomorphisms: prints |J Aut_C| and |CO|, optionally
    /// dumps the orthoautomorphism list.
    Ortho {
        selector: String,
        #[arg(long)]
        dump_members: Option<PathBuf>,
    },
    /// Classify centrally affine / trimedial / distributive quasigroups
    /// over the selected loops, up to isomorphism.
    Classify {
        /// Loop selector; repeatable.
        #[arg(long = "loop")]
        loops: Vec<String>,
        /// Classify every nonassociative commutative Moufang loop of this
        /// order and aggregate the totals.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value = "all")]
        kind: KindArg,
        /// Keep counts only; skip representative retention.
        #[arg(long)]
        counts_only: bool,
        /// Directory for structured representative dumps.
        #[arg(long)]
        dump_forms: Option<PathBuf>,
        /// Output directory for the TSV summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Imported automorphism generators, as SELECTOR=FILE; repeatable.
        #[arg(long = "aut-generators")]
        aut_generators: Vec<String>,
    },
    /// Write the triple system of a stored distributive representative.
    EmitMts {
        selector: String,
        /// Index into the distributive representatives (canonical order).
        #[arg(long)]
        index: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a dumped forms file: membership invariants and the
    /// defining identities of its kind.
    Verify {
        forms: PathBuf,
        /// Sample count for trimedial checking on orders > 27.
        #[arg(long, default_value_t = 300)]
        samples: usize,
    },
    /// Run the built-in invariant suite on small loops and the order-81
    /// constructions.
    Selftest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Affine,
    Trimedial,
    Distributive,
    All,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = par::set_threads(n) {
            eprintln!("warning: could not set thread count: {e}");
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn budgets(cli: &Cli) -> Budgets {
    Budgets {
        search_nodes: cli.budget_leaves,
        orbit_points: cli.budget_points,
        wall_clock: cli.budget_seconds.map(std::time::Duration::from_secs),
        ..Budgets::default()
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::LoopInfo { selector, aut } => cmd_loop_info(&cli, selector, *aut),
        Cmd::Aut {
            selector,
            dump_generators,
        } => cmd_aut(&cli, selector, dump_generators.as_deref()),
        Cmd::Autc {
            selector,
            dump_generators,
        } => cmd_autc(&cli, selector, dump_generators.as_deref()),
        Cmd::Ortho {
            selector,
            dump_members,
        } => cmd_ortho(&cli, selector, dump_members.as_deref()),
        Cmd::Classify {
            loops,
            order,
            kind,
            counts_only,
            dump_forms,
            out,
            aut_generators,
        } => cmd_classify(
            &cli,
            loops,
            *order,
            *kind,
            *counts_only,
            dump_forms.as_deref(),
            out.as_deref(),
            aut_generators,
        ),
        Cmd::EmitMts {
            selector,
            index,
            out,
        } => cmd_emit_mts(&cli, selector, *index, out),
        Cmd::Verify { forms, samples } => cmd_verify(&cli, forms, *samples),
        Cmd::Selftest => cmd_selftest(&cli),
    }
}

fn load(cli: &Cli, selector: &str) -> Result<(String, LoopTable)> {
    resolve_loop(selector, &cli.imports).map_err(|e| anyhow!("{e}"))
}

fn render_invariants(divs: &[u64]) -> String {
    if divs.is_empty() {
        return "trivial".into();
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &d in divs {
        *counts.entry(d).or_default() += 1;
    }
    counts
        .iter()
        .map(|(d, c)| {
            if *c == 1 {
                format!("C{d}")
            } else {
                format!("C{d}^{c}")
            }
        })
        .collect::<Vec<_>>()
        .join(" x ")
}

fn cmd_loop_info(cli: &Cli, selector: &str, with_aut: bool) -> Result<()> {
    let (id, l) = load(cli, selector)?;
    println!("loop\t{id}");
    println!("order\t{}", l.order());
    println!("loop?\t{}", l.is_loop());
    let commutative = l.is_commutative();
    let moufang = l.is_moufang();
    let associative = l.is_associative();
    println!("commutative\t{commutative}");
    println!("moufang\t{moufang}");
    println!("associative\t{associative}");
    if l.is_loop() {
        println!("exponent\t{}", l.exponent());
        let z = l.center();
        println!("center_order\t{}", z.order());
        match l.abelian_invariants(&z) {
            Some(divs) => println!("center_structure\t{}", render_invariants(&divs)),
            None => println!("center_structure\t(not an abelian group)"),
        }
        let a = l.associator_subloop();
        println!("associator_subloop_order\t{}", a.order());
    }
    if with_aut && l.is_loop() {
        let cfg = AutSearchConfig {
            node_budget: cli.budget_leaves,
            time_budget: cli.budget_seconds.map(std::time::Duration::from_secs),
            ..AutSearchConfig::default()
        };
        let ctx = SearchContext::new(&l, &cfg).map_err(|e| anyhow!("{e}"))?;
        let data = central_data(&ctx, cfg.node_budget).map_err(|e| anyhow!("{e}"))?;
        println!("autc_order\t{}", data.autc.known_order().unwrap());
        println!("jautc\t{}", data.jautc.len());
        println!("orthoautomorphisms\t{}", data.orthoautos.len());
        let aut =
            moufang_core::search::automorphism_group_in(&ctx, cfg.node_budget).map_err(|e| anyhow!("{e}"))?;
        match (aut.is_complete(), aut.known_order()) {
            (true, Some(o)) => println!("aut_order\t{o}"),
            _ => println!("aut_order\tincomplete (budget)"),
        }
    }
    Ok(())
}

fn cmd_aut(cli: &Cli, selector: &str, dump: Option<&Path>) -> Result<()> {
    let (id, l) = load(cli, selector)?;
    let cfg = AutSearchConfig {
        node_budget: cli.budget_leaves,
        time_budget: cli.budget_seconds.map(std::time::Duration::from_secs),
        ..AutSearchConfig::default()
    };
    let aut = moufang_core::automorphism_group(&l, &cfg).map_err(|e| anyhow!("{e}"))?;
    match (aut.is_complete(), aut.known_order()) {
        (true, Some(o)) => println!("{id}\taut_order\t{o}"),
        _ => println!("{id}\taut_order\tincomplete"),
    }
    println!("{id}\tgenerators\t{}", aut.generators().len());
    if let Some(path) = dump {
        let text = textio::format_generators(
            l.order(),
            aut.generators(),
            &[
                format!("automorphism group generators of {id}"),
                format!("order {:?}", aut.known_order()),
                format!("seed {}", cli.seed),
            ],
        );
        textio::write_atomic(path, &text).map_err(|e| anyhow!("{e}"))?;
        println!("{id}\twrote\t{}", path.display());
    }
    Ok(())
}

fn cmd_autc(cli: &Cli, selector: &str, dump: Option<&Path>) -> Result<()> {
    let (id, l) = load(cli, selector)?;
    let autc = moufang_core::central_automorphism_group(&l).map_err(|e| anyhow!("{e}"))?;
    println!("{id}\tautc_order\t{}", autc.known_order().unwrap());
    if let Some(path) = dump {
        let text = textio::format_generators(
            l.order(),
            autc.generators(),
            &[
                format!("central automorphism group generators of {id}"),
                format!("order {:?}", autc.known_order()),
                format!("seed {}", cli.seed),
            ],
        );
        textio::write_atomic(path, &text).map_err(|e| anyhow!("{e}"))?;
        println!("{id}\twrote\t{}", path.display());
    }
    Ok(())
}

fn cmd_ortho(cli: &Cli, selector: &str, dump: Option<&Path>) -> Result<()> {
    let (id, l) = load(cli, selector)?;
    let cfg = AutSearchConfig {
        node_budget: cli.budget_leaves,
        time_budget: cli.budget_seconds.map(std::time::Duration::from_secs),
        ..AutSearchConfig::default()
    };
    let ctx = SearchContext::new(&l, &cfg).map_err(|e| anyhow!("{e}"))?;
    let data = central_data(&ctx, cfg.node_budget).map_err(|e| anyhow!("{e}"))?;
    println!("{id}\tjautc\t{}", data.jautc.len());
    println!("{id}\torthoautomorphisms\t{}", data.orthoautos.len());
    if let Some(path) = dump {
        let text = textio::format_generators(
            l.order(),
            &data.orthoautos,
            &[
                format!("J-central orthoautomorphisms of {id} (full list)"),
                format!("seed {}", cli.seed),
            ],
        );
        textio::write_atomic(path, &text).map_err(|e| anyhow!("{e}"))?;
        println!("{id}\twrote\t{}", path.display());
    }
    Ok(())
}

/// One summary row: either a finished report or an honest failure note.
enum Row {
    Done(ClassificationReport),
    Failed {
        loop_id: String,
        kind: QuasigroupKind,
        status: ReportStatus,
    },
}

impl Row {
    fn tsv(&self) -> String {
        fn opt(v: Option<u64>) -> String {
            v.map_or_else(|| "-".into(), |x| x.to_string())
        }
        match self {
            Row::Done(r) => {
                let medial = if r.medial_regime {
                    "medial-regime"
                } else {
                    "non-medial"
                };
                format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.loop_id,
                    r.kind.as_str(),
                    r.count,
                    r.status.label(),
                    opt(r.phi_orbit_count),
                    opt(r.pair_orbit_count),
                    opt(r.mendelsohn_count()),
                    opt(r.steiner_count()),
                    medial,
                )
            }
            Row::Failed {
                loop_id,
                kind,
                status,
            } => {
                let reason = match status {
                    ReportStatus::Skipped(r) | ReportStatus::LowerBound(r) => r.clone(),
                    ReportStatus::Exact => String::new(),
                };
                format!(
                    "{}\t{}\t-\t{}\t-\t-\t-\t-\t{}",
                    loop_id,
                    kind.as_str(),
                    status.label(),
                    reason
                )
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_classify(
    cli: &Cli,
    loops: &[String],
    order: Option<usize>,
    kind: KindArg,
    counts_only: bool,
    dump_forms: Option<&Path>,
    out: Option<&Path>,
    aut_generators: &[String],
) -> Result<()> {
    let mut selectors: Vec<String> = loops.to_vec();
    if let Some(n) = order {
        let named = nonassociative_cml_names(n);
        if named.is_empty() {
            bail!("no nonassociative commutative Moufang loops of order {n} are registered");
        }
        selectors.extend(named.iter().map(|s| s.to_string()));
    }
    if selectors.is_empty() {
        bail!("select loops with --loop or --order");
    }
    selectors.dedup();

    let mut imported_gens: BTreeMap<String, PathBuf> = BTreeMap::new();
    for spec in aut_generators {
        let (sel, path) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("--aut-generators takes SELECTOR=FILE, got `{spec}`"))?;
        imported_gens.insert(sel.to_string(), PathBuf::from(path));
    }

    let kinds: Vec<QuasigroupKind> = match kind {
        KindArg::Affine => vec![QuasigroupKind::CentrallyAffine],
        KindArg::Trimedial => vec![QuasigroupKind::Trimedial],
        KindArg::Distributive => vec![QuasigroupKind::Distributive],
        KindArg::All => vec![
            QuasigroupKind::CentrallyAffine,
            QuasigroupKind::Trimedial,
            QuasigroupKind::Distributive,
        ],
    };
    // representative dumps and Steiner/Mendelsohn tagging need retained reps
    let opts = ClassifyOptions {
        counts_only: counts_only && dump_forms.is_none(),
        budgets: budgets(cli),
    };

    let mut rows: Vec<Row> = Vec::new();
    let mut reports: Vec<ClassificationReport> = Vec::new();
    for sel in &selectors {
        let loaded = load(cli, sel);
        let (id, table) = match loaded {
            Ok(x) => x,
            Err(e) => {
                for &k in &kinds {
                    rows.push(Row::Failed {
                        loop_id: sel.clone(),
                        kind: k,
                        status: ReportStatus::Skipped(format!("{e}")),
                    });
                }
                continue;
            }
        };
        let imported = match imported_gens.get(sel).or_else(|| imported_gens.get(&id)) {
            Some(path) => {
                let (degree, gens) = textio::read_generators(path).map_err(|e| anyhow!("{e}"))?;
                if degree != table.order() {
                    bail!("generator degree {degree} does not match loop order");
                }
                Some((gens, None))
            }
            None => None,
        };
        let pipeline = match LoopPipeline::new(&id, table, opts.budgets, imported) {
            Ok(p) => p,
            Err(e) => {
                for &k in &kinds {
                    rows.push(Row::Failed {
                        loop_id: id.clone(),
                        kind: k,
                        status: ReportStatus::Skipped(format!("{e}")),
                    });
                }
                continue;
            }
        };
        for &k in &kinds {
            let result = match k {
                QuasigroupKind::CentrallyAffine => classify_centrally_affine(&pipeline, &opts),
                QuasigroupKind::Trimedial => classify_trimedial(&pipeline, &opts),
                QuasigroupKind::Distributive => classify_distributive(&pipeline, &opts)
                    .and_then(|r| {
                        if r.representatives.is_some() {
                            tag_steiner_mendelsohn(r)
                        } else {
                            Ok(r)
                        }
                    }),
            };
            match result {
                Ok(report) => {
                    if let (Some(dir), Some(reps)) = (dump_forms, report.representatives.as_ref())
                    {
                        let dump = forms_dump_of(&report, reps);
                        let file = dir.join(format!(
                            "{}.{}.forms",
                            report.loop_id.replace('/', "_"),
                            report.kind.as_str()
                        ));
                        let text = textio::format_forms(
                            &dump,
                            &[format!("seed {}", cli.seed), format!("status {}", report.status.label())],
                        );
                        textio::write_atomic(&file, &text).map_err(|e| anyhow!("{e}"))?;
                        eprintln!("wrote {}", file.display());
                    }
                    reports.push(report.clone());
                    rows.push(Row::Done(report));
                }
                Err(e) => rows.push(Row::Failed {
                    loop_id: id.clone(),
                    kind: k,
                    status: ReportStatus::Skipped(format!("{e}")),
                }),
            }
        }
    }

    let header = "loop\tkind\tcount\tstatus\tphi_orbits\tpair_orbits\tmendelsohn\tsteiner\tregime";
    let mut tsv = String::new();
    tsv.push_str(&format!("# seed {}\n", cli.seed));
    tsv.push_str(header);
    tsv.push('\n');
    println!("{header}");
    for row in &rows {
        let line = row.tsv();
        println!("{line}");
        tsv.push_str(&line);
        tsv.push('\n');
    }

    if let Some(n) = order {
        let refs: Vec<&ClassificationReport> = reports.iter().collect();
        let agg = classify::aggregate_by_order(n, &refs);
        let show = |v: Option<u64>| v.map_or_else(|| "?".into(), |x| x.to_string());
        println!(
            "order {n} totals (non-medial): t={} d={} dM={} dS={} complete={}",
            show(agg.trimedial),
            show(agg.distributive),
            show(agg.mendelsohn),
            show(agg.steiner),
            agg.complete
        );
        if !agg.missing.is_empty() {
            println!("order {n} missing loops: {}", agg.missing.join(", "));
        }
        tsv.push_str(&format!(
            "# order {n} totals: t={} d={} dM={} dS={} complete={} missing={}\n",
            show(agg.trimedial),
            show(agg.distributive),
            show(agg.mendelsohn),
            show(agg.steiner),
            agg.complete,
            agg.missing.join(",")
        ));
    }

    if let Some(dir) = out {
        let path = dir.join("summary.tsv");
        textio::write_atomic(&path, &tsv).map_err(|e| anyhow!("{e}"))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn forms_dump_of(
    report: &ClassificationReport,
    reps: &[classify::FormRecord],
) -> textio::FormsDump {
    textio::FormsDump {
        loop_id: report.loop_id.clone(),
        kind: report.kind.as_str().to_string(),
        entries: reps
            .iter()
            .map(|r| textio::FormEntry {
                phi: r.form.phi.images().to_vec(),
                psi: r.form.psi.images().to_vec(),
                c: r.form.c,
                mendelsohn: r.mendelsohn,
                steiner: r.steiner,
            })
            .collect(),
    }
}

fn cmd_emit_mts(cli: &Cli, selector: &str, index: usize, out: &Path) -> Result<()> {
    let (id, table) = load(cli, selector)?;
    let pipeline = LoopPipeline::new(&id, table, budgets(cli), None).map_err(|e| anyhow!("{e}"))?;
    let opts = ClassifyOptions {
        counts_only: false,
        budgets: budgets(cli),
    };
    let report = classify_distributive(&pipeline, &opts)
        .and_then(tag_steiner_mendelsohn)
        .map_err(|e| anyhow!("{e}"))?;
    let reps = report.representatives.as_ref().unwrap();
    let rec = reps
        .get(index)
        .ok_or_else(|| anyhow!("unknown representative index {index} (have {})", reps.len()))?;
    let l = &*rec.form.loop_table;
    let psihat = hat(l, &rec.form.psi);
    let kind = if rec.steiner == Some(true) {
        TripleKind::Steiner
    } else if rec.mendelsohn == Some(true) {
        TripleKind::Mendelsohn
    } else {
        bail!("representative {index} is neither Steiner nor Mendelsohn");
    };
    let ts = emit_triple_system(l, &psihat, kind).map_err(|e| anyhow!("{e}"))?;
    let text = textio::format_triple_system(
        &ts,
        &[
            format!("loop {id}, distributive representative {index}"),
            format!("seed {}", cli.seed),
        ],
    );
    textio::write_atomic(out, &text).map_err(|e| anyhow!("{e}"))?;
    println!(
        "{id}\twrote {} with {} blocks\t{}",
        match kind {
            TripleKind::Steiner => "STS",
            TripleKind::Mendelsohn => "MTS",
        },
        ts.blocks().len(),
        out.display()
    );
    Ok(())
}

fn cmd_verify(cli: &Cli, forms_path: &Path, samples: usize) -> Result<()> {
    let dump = textio::read_forms(forms_path).map_err(|e| anyhow!("{e}"))?;
    let (_, table) = load(cli, &dump.loop_id)
        .with_context(|| format!("resolving loop `{}` from the dump", dump.loop_id))?;
    let table = std::sync::Arc::new(table);
    let kind = match dump.kind.as_str() {
        "affine" => QuasigroupKind::CentrallyAffine,
        "trimedial" => QuasigroupKind::Trimedial,
        "distributive" => QuasigroupKind::Distributive,
        other => bail!("unknown kind `{other}` in dump"),
    };
    let mut failures = 0usize;
    for (i, entry) in dump.entries.iter().enumerate() {
        let outcome = verify_entry(&table, kind, entry, samples, cli.seed);
        match outcome {
            Ok(()) => println!("form {i}: PASS"),
            Err(e) => {
                failures += 1;
                println!("form {i}: FAIL ({e})");
            }
        }
    }
    if failures > 0 {
        bail!("{failures} of {} forms failed verification", dump.entries.len());
    }
    println!("all {} forms verified", dump.entries.len());
    Ok(())
}

fn verify_entry(
    table: &std::sync::Arc<LoopTable>,
    kind: QuasigroupKind,
    entry: &textio::FormEntry,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let phi = Perm::from_images(entry.phi.clone()).map_err(|e| anyhow!("phi: {e}"))?;
    let psi = Perm::from_images(entry.psi.clone()).map_err(|e| anyhow!("psi: {e}"))?;
    let form = classify::ArithmeticForm::new_checked(table.clone(), phi, psi, entry.c, kind)
        .map_err(|e| anyhow!("{e}"))?;
    let q = form.build();
    match kind {
        QuasigroupKind::Distributive => {
            if !check_distributive(&q) || !check_idempotent(&q) {
                bail!("built table fails the distributive identities");
            }
            if let Some(expect_m) = entry.mendelsohn {
                let l = &**table;
                let psihat = hat(l, &form.psi);
                let is_m = (0..l.order() as u16).all(|x| {
                    let a = psihat.apply(psihat.apply(x));
                    let b = l.scalar_mul(3, psihat.apply(x));
                    let c = l.scalar_mul(3, x);
                    l.add(l.sub(a, b), c) == 0
                });
                if is_m != expect_m {
                    bail!("mendelsohn tag mismatch: recomputed {is_m}");
                }
            }
            if let Some(expect_s) = entry.steiner {
                let l = &**table;
                let is_s = l.exponent() == 3 && hat(l, &form.psi).is_zero();
                if is_s != expect_s {
                    bail!("steiner tag mismatch: recomputed {is_s}");
                }
            }
        }
        QuasigroupKind::Trimedial => {
            let mode = if q.order() <= 27 {
                TrimedialMode::Exhaustive
            } else {
                TrimedialMode::Sampled {
                    count: samples,
                    seed,
                }
            };
            if !check_trimedial(&q, mode) {
                bail!("built table fails trimediality");
            }
        }
        QuasigroupKind::CentrallyAffine => {
            // form invariants already verified; the table is a quasigroup
            // by construction
        }
    }
    Ok(())
}

fn cmd_selftest(cli: &Cli) -> Result<()> {
    use moufang_core::constructions::*;
    let mut pass = true;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "PASS" } else { "FAIL" });
        pass &= ok;
    };

    let z9 = abelian_group(&[9]);
    let p_z9 = classify::pipeline_for("Z(9)", z9.clone(), budgets(cli)).map_err(|e| anyhow!("{e}"))?;
    check("Z9 automorphism group order 6", p_z9.aut.known_order() == Some(6));
    let affine = classify_centrally_affine(&p_z9, &ClassifyOptions::default()).map_err(|e| anyhow!("{e}"))?;
    let oracle = classify::oracle_triple_class_count(&p_z9.table, &p_z9.central.jautc, &p_z9.aut, false, 10_000_000)
        .map_err(|e| anyhow!("{e}"))?;
    check("Z9 pipeline equals raw triple oracle", affine.count == oracle);

    for (name, l, exponent) in [
        ("81/1", construct_kn_81_1(), 3),
        ("81/2", construct_kn_81_2(), 9),
    ] {
        check(
            &format!("{name} commutative Moufang nonassociative"),
            l.is_commutative() && l.is_moufang() && !l.is_associative(),
        );
        check(&format!("{name} exponent {exponent}"), l.exponent() == exponent);
        check(
            &format!("{name} three-power central cubes"),
            (0..l.order() as u16).all(|x| l.center().contains(l.scalar_mul(3, x))),
        );
    }

    let p = classify::pipeline_for("81/1", construct_kn_81_1(), budgets(cli)).map_err(|e| anyhow!("{e}"))?;
    let opts = ClassifyOptions::default();
    let c = classify_centrally_affine(&p, &opts).map_err(|e| anyhow!("{e}"))?;
    let t = classify_trimedial(&p, &opts).map_err(|e| anyhow!("{e}"))?;
    let d = tag_steiner_mendelsohn(classify_distributive(&p, &opts).map_err(|e| anyhow!("{e}"))?)
        .map_err(|e| anyhow!("{e}"))?;
    check("81/1 counts c=8 t=8 d=2 dM=2 dS=1",
        c.count == 8 && t.count == 8 && d.count == 2
            && d.mendelsohn_count() == Some(2) && d.steiner_count() == Some(1));

    // Lemma-style spot checks on 81/1
    let l = &*p.table;
    let center = l.center();
    let jautc = &p.central.jautc;
    check(
        "hat criterion on J Aut_C",
        jautc.iter().all(|b| {
            let h = hat(l, b);
            (0..l.order() as u16).all(|x| center.contains(h.apply(x)))
        }),
    );
    check(
        "orthoautomorphism involution beta <-> id - beta",
        p.central.orthoautos.iter().all(|b| {
            let comp = Perm::from_images(
                (0..l.order() as u16).map(|x| l.sub(x, b.apply(x))).collect(),
            )
            .unwrap();
            p.central.orthoautos.binary_search(&comp).is_ok()
        }),
    );
    check(
        "all J-central automorphism pairs commute on 81/1",
        jautc
            .iter()
            .all(|a| jautc.iter().all(|b| a.commutes_with(b))),
    );

    if pass {
        println!("selftest: all checks passed");
        Ok(())
    } else {
        bail!("selftest failed")
    }
}
