mod config;
mod diagram;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{OutputFormat, RunConfig};
use report::{CheckRow, EnumItem, PsncItem, Report, ValueReport};
use trifree::{
    classify, enumerate_psnc, enumerate_snc, load_spec, product_cumulant_oracle,
    product_cumulant_stats, ratio_to_string, verify_appendix_bijections, BetaTables, Check,
    Distribution, EnumMode, GammaShape, Grouping, PartitionedPermutation, Ratio, SetPartition,
    SizesVector, StarPattern,
};

/// Exact third-order free cumulant combinatorics: annular enumeration,
/// partitioned permutations, cumulants of products and the worked
/// identities, all in exact rational arithmetic.
#[derive(Parser)]
#[command(name = "trifree", version, max_term_width = 100)]
struct Cli {
    /// Config file (JSON); defaults to $TRIFREE_CONFIG when set
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: json, csv or text
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Shorthand for --format json
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized verifications
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker pool size (0 = all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Cap for brute-force scans
    #[arg(long, global = true)]
    brute_cap: Option<u32>,
    /// Cap for structural enumeration
    #[arg(long, global = true)]
    structural_cap: Option<u32>,
    /// Cap for the moment-extraction oracle
    #[arg(long, global = true)]
    oracle_cap: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate S_NC(m1,...,mr); one circle gives NC(n)
    Enumerate {
        /// Circle sizes, e.g. 2,2,2
        #[arg(long)]
        shape: String,
        /// Only report the count
        #[arg(long)]
        count_only: bool,
    },
    /// Enumerate PS_NC(p,q,l) with classes
    Psnc {
        #[arg(long)]
        shape: String,
        /// brute (cap 7) or structural
        #[arg(long, default_value = "structural")]
        mode: String,
        /// Also report counts per class
        #[arg(long)]
        count_by_class: bool,
    },
    /// Moment functional phi of a grouped word
    Phi {
        /// Distribution spec file (JSON)
        #[arg(long)]
        dist: PathBuf,
        /// Grouped word, e.g. "c a c* ; c a c*"
        #[arg(long)]
        word: String,
    },
    /// Cumulants of products via the separation-filtered PS_NC sum
    Kprod {
        #[arg(long)]
        dist: PathBuf,
        /// Comma-separated letters, e.g. c,a,c*,c,a,c*
        #[arg(long)]
        letters: String,
        /// Sizes n1,n2,..., e.g. 3,3
        #[arg(long)]
        sizes: String,
        /// Grouping r,s,t (use 0 for absent groups), e.g. 2,0,0
        #[arg(long)]
        grouping: String,
        /// Also run the independent oracle and compare
        #[arg(long)]
        oracle: bool,
        /// Assert the result equals this rational; mismatches exit with 1
        #[arg(long)]
        expect: Option<String>,
    },
    /// Run a verification check
    Verify {
        #[command(subcommand)]
        check: VerifyCmd,
    },
    /// Half/double bijection diagnostics on an even shape
    Halfmap {
        #[arg(long)]
        shape: String,
        /// Count separated parity-reversing permutations against (sum r_i)!
        #[arg(long)]
        check_bijection: bool,
    },
    /// Render a partitioned permutation as SVG
    Diagram {
        #[arg(long)]
        shape: String,
        /// Permutation in cycle notation
        #[arg(long)]
        perm: String,
        /// Partition in block notation; defaults to the cycle partition
        #[arg(long)]
        part: Option<String>,
    },
}

#[derive(Args)]
struct Pqr {
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Run the whole acceptance sweep p+q+r <= 4 instead of one triple
    #[arg(long)]
    sweep: bool,
}

#[derive(Args)]
struct Rst {
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long, default_value_t = 1)]
    t: u32,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// kappa_{p,q,r}(s^2,...) = 0
    S2(Pqr),
    /// kappa_{p,q,r}(cc*,...) = 0
    Ccstar(Pqr),
    /// kappa_{r,s,t}(cac*,...) = phi_3(a^r; a^s; a^t) with seeded generic a
    Cac(Rst),
    /// R-diagonal closure: non-alternating patterns vanish
    Rdiag {
        /// Grouping r,s,t
        #[arg(long, default_value = "1,1,1")]
        grouping: String,
        /// Pattern of signs, e.g. +,-,+ ; omit to sweep all patterns
        #[arg(long)]
        pattern: Option<String>,
    },
    /// kappa_{r,s,t}(aa*,...) = sum over PS_NC(r,s,t) of beta_{(V,pi)}
    Aastar(Rst),
    /// kappa_{r,s,t}(a*c*,ca,...) = kappa_{r/2,s/2,t/2}(a*a,...)
    Cahalve {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        t: u32,
    },
    /// Product of k free circulars against the closed forms
    Ginibre {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// The seven index-set bijections of the inductive proof
    Appendix {
        #[arg(long, default_value = "1,1,1")]
        grouping: String,
        /// Sizes n1,...,n_{r+s+t}
        #[arg(long)]
        sizes: String,
    },
    /// Half/double bijection and cycle identities
    Halfmap {
        #[arg(long, default_value = "2,2,2")]
        shape: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    if let Some(format) = cli.format {
        config.format = format;
    }
    if cli.json {
        config.format = OutputFormat::Json;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if let Some(cap) = cli.brute_cap {
        config.brute_cap = cap;
    }
    if let Some(cap) = cli.structural_cap {
        config.structural_cap = cap;
    }
    if let Some(cap) = cli.oracle_cap {
        config.oracle_cap = cap;
    }
    config.validate()?;
    if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global()
            .map_err(|e| e.to_string())?;
    }

    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let out = sink.as_mut();

    match cli.cmd {
        Cmd::Enumerate { shape, count_only } => {
            let shape: GammaShape = shape.parse().map_err(err)?;
            let perms = enumerate_snc(&shape, config.structural_cap).map_err(err)?;
            let items: Vec<EnumItem> = perms
                .iter()
                .map(|p| EnumItem { perm: p.to_string(), cycles: p.cycle_count() })
                .collect();
            match config.format {
                OutputFormat::Json => {
                    #[derive(serde::Serialize)]
                    struct Body {
                        shape: String,
                        count: usize,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        items: Option<Vec<EnumItem>>,
                    }
                    let body = Body {
                        shape: shape.to_string(),
                        count: items.len(),
                        items: (!count_only).then_some(items),
                    };
                    report::emit_json(
                        out,
                        &Report { command: "enumerate".into(), config: config.clone(), body },
                    )
                    .map_err(err)?;
                }
                OutputFormat::Csv => {
                    if count_only {
                        writeln!(out, "{}", items.len()).map_err(err)?;
                    } else {
                        report::emit_csv(out, &items).map_err(err)?;
                    }
                }
                OutputFormat::Text => {
                    if !count_only {
                        for item in &items {
                            writeln!(out, "{}", item.perm).map_err(err)?;
                        }
                    }
                    writeln!(out, "{}", items.len()).map_err(err)?;
                }
            }
            Ok(true)
        }
        Cmd::Psnc { shape, mode, count_by_class } => {
            let shape: GammaShape = shape.parse().map_err(err)?;
            let mode = match mode.as_str() {
                "brute" => EnumMode::Brute,
                "structural" => EnumMode::Structural,
                other => return Err(format!("unknown mode {other:?}")),
            };
            let members = enumerate_psnc(&shape, mode, config.brute_cap, config.structural_cap)
                .map_err(err)?;
            let classify_name = |pp: &PartitionedPermutation| -> Result<String, String> {
                if shape.circles() == 3 {
                    Ok(classify(pp, &shape).map_err(err)?.name().to_string())
                } else if pp.marked_blocks().is_empty() {
                    Ok("Connected".to_string())
                } else {
                    Ok("OneMarked".to_string())
                }
            };
            let mut items = Vec::new();
            let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
            for member in &members {
                let class = classify_name(member)?;
                *counts.entry(class.clone()).or_default() += 1;
                items.push(PsncItem {
                    perm: member.perm().to_string(),
                    part: member.part().to_string(),
                    class,
                });
            }
            match config.format {
                OutputFormat::Json => {
                    #[derive(serde::Serialize)]
                    struct Body {
                        shape: String,
                        count: usize,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        class_counts: Option<std::collections::BTreeMap<String, usize>>,
                        items: Vec<PsncItem>,
                    }
                    report::emit_json(
                        out,
                        &Report {
                            command: "psnc".into(),
                            config: config.clone(),
                            body: Body {
                                shape: shape.to_string(),
                                count: items.len(),
                                class_counts: count_by_class.then_some(counts),
                                items,
                            },
                        },
                    )
                    .map_err(err)?;
                }
                OutputFormat::Csv => report::emit_csv(out, &items).map_err(err)?,
                OutputFormat::Text => {
                    for item in &items {
                        writeln!(out, "{}  {}  {}", item.perm, item.part, item.class)
                            .map_err(err)?;
                    }
                    if count_by_class {
                        for (class, count) in &counts {
                            writeln!(out, "{class}: {count}").map_err(err)?;
                        }
                    }
                    writeln!(out, "total: {}", items.len()).map_err(err)?;
                }
            }
            Ok(true)
        }
        Cmd::Phi { dist, word } => {
            let dist = load_dist(&dist)?;
            let word = dist.parse_word(&word).map_err(err)?;
            let started = Instant::now();
            let (value, terms) =
                trifree::phi_stats(&dist, &word, config.structural_cap).map_err(err)?;
            emit_value(out, &config, "phi", &value, terms, started)?;
            Ok(true)
        }
        Cmd::Kprod { dist, letters, sizes, grouping, oracle, expect } => {
            let dist = load_dist(&dist)?;
            let letters = dist.parse_letters(&letters).map_err(err)?;
            let sizes = parse_sizes(&sizes)?;
            let grouping = parse_grouping(&grouping)?;
            let started = Instant::now();
            let (value, terms) =
                product_cumulant_stats(&dist, &letters, &sizes, &grouping, config.structural_cap)
                    .map_err(err)?;
            if oracle {
                let check =
                    product_cumulant_oracle(&dist, &letters, &sizes, &grouping, config.oracle_cap)
                        .map_err(err)?;
                if check != value {
                    return Err(format!(
                        "oracle disagreement: direct {} vs oracle {}",
                        ratio_to_string(&value),
                        ratio_to_string(&check)
                    ));
                }
            }
            emit_value(out, &config, "kprod", &value, terms, started)?;
            if let Some(expected) = expect {
                let expected = trifree::ratio_from_str(&expected).map_err(err)?;
                return Ok(expected == value);
            }
            Ok(true)
        }
        Cmd::Verify { check } => {
            let checks = run_verify(check, &config)?;
            report::render_checks(out, config.format, "verify", &config, &checks).map_err(err)?;
            Ok(checks.iter().all(|c| c.pass))
        }
        Cmd::Halfmap { shape, check_bijection } => {
            let shape: GammaShape = shape.parse().map_err(err)?;
            let checks = halfmap_checks(&shape, check_bijection)?;
            report::render_checks(out, config.format, "halfmap", &config, &checks).map_err(err)?;
            Ok(checks.iter().all(|c| c.pass))
        }
        Cmd::Diagram { shape, perm, part } => {
            let shape: GammaShape = shape.parse().map_err(err)?;
            let perm: trifree::Permutation = perm.parse().map_err(err)?;
            let pp = match part {
                Some(text) => {
                    let part: SetPartition = text.parse().map_err(err)?;
                    PartitionedPermutation::new(part, perm).map_err(err)?
                }
                None => PartitionedPermutation::from_perm(perm),
            };
            if pp.size() != shape.total() as usize {
                return Err("permutation does not match the shape".into());
            }
            write!(out, "{}", diagram::render(&pp, &shape)).map_err(err)?;
            Ok(true)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_dist(path: &PathBuf) -> Result<Distribution, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    load_spec(&text).map_err(err)
}

fn parse_sizes(text: &str) -> Result<SizesVector, String> {
    let sizes: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad size {t:?}")))
        .collect::<Result<_, _>>()?;
    SizesVector::new(&sizes).map_err(err)
}

fn parse_grouping(text: &str) -> Result<Grouping, String> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad grouping {t:?}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [r] => Grouping::new(*r, 0, 0),
        [r, s] => Grouping::new(*r, *s, 0),
        [r, s, t] => Grouping::new(*r, *s, *t),
        _ => return Err("grouping takes 1-3 comma-separated entries".into()),
    }
    .map_err(err)
}

fn emit_value(
    out: &mut dyn Write,
    config: &RunConfig,
    command: &str,
    value: &Ratio,
    terms: u64,
    started: Instant,
) -> Result<(), String> {
    let body = ValueReport {
        value: ratio_to_string(value),
        terms,
        elapsed_ms: started.elapsed().as_millis(),
    };
    match config.format {
        OutputFormat::Json => report::emit_json(
            out,
            &Report { command: command.into(), config: config.clone(), body },
        )
        .map_err(err),
        OutputFormat::Csv => report::emit_csv(out, &[body]).map_err(err),
        OutputFormat::Text => {
            writeln!(out, "{} (terms: {}, {} ms)", body.value, body.terms, body.elapsed_ms)
                .map_err(err)
        }
    }
}

fn to_row(check: Check, seed: u64, elapsed_ms: u128) -> CheckRow {
    CheckRow {
        check: check.name,
        params: check.params,
        lhs: ratio_to_string(&check.lhs),
        rhs: ratio_to_string(&check.rhs),
        pass: check.pass,
        elapsed_ms,
        seed,
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T, String>) -> Result<(T, u128), String> {
    let started = Instant::now();
    let value = f()?;
    Ok((value, started.elapsed().as_millis()))
}

fn pqr_triples(cap_sum: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for p in 1..=cap_sum {
        for q in 1..=cap_sum {
            for r in 1..=cap_sum {
                if p + q + r <= cap_sum {
                    out.push((p, q, r));
                }
            }
        }
    }
    out
}

fn run_verify(check: VerifyCmd, config: &RunConfig) -> Result<Vec<CheckRow>, String> {
    // pairing-pruned checks scale far beyond full enumeration; everything
    // else stays near the structural cap unless the user raises it
    let paired_cap = config.structural_cap.max(trifree::caps::PAIRED);
    let cap = config.structural_cap.max(16);
    let seed = config.seed;
    match check {
        VerifyCmd::S2(args) => {
            let triples = if args.sweep { pqr_triples(4) } else { vec![(args.p, args.q, args.r)] };
            triples
                .par_iter()
                .map(|&(p, q, r)| {
                    let (check, ms) =
                        timed(|| trifree::models::verify_s2(p, q, r, paired_cap).map_err(err))?;
                    Ok(to_row(check, seed, ms))
                })
                .collect()
        }
        VerifyCmd::Ccstar(args) => {
            let triples = if args.sweep { pqr_triples(4) } else { vec![(args.p, args.q, args.r)] };
            triples
                .par_iter()
                .map(|&(p, q, r)| {
                    let (check, ms) = timed(|| {
                        trifree::models::verify_cc_star(p, q, r, paired_cap).map_err(err)
                    })?;
                    Ok(to_row(check, seed, ms))
                })
                .collect()
        }
        VerifyCmd::Cac(args) => {
            let a = trifree::seeded_generic("a", "a", true, 6, seed).map_err(err)?;
            let (check, ms) = timed(|| {
                trifree::models::verify_cac(args.r, args.s, args.t, &a, config.structural_cap)
                    .map_err(err)
            })?;
            Ok(vec![to_row(check, seed, ms)])
        }
        VerifyCmd::Rdiag { grouping, pattern } => {
            let grouping = parse_grouping(&grouping)?;
            let betas = BetaTables::seeded(3, seed.wrapping_add(1));
            let a = trifree::r_diagonal("a", "a", betas.to_data("a", "a")).map_err(err)?;
            let b =
                trifree::seeded_generic("b", "b", false, 6, seed.wrapping_add(2)).map_err(err)?;
            let patterns: Vec<StarPattern> = match pattern {
                Some(text) => vec![parse_pattern(&text)?],
                None => all_patterns(grouping.parts() as usize),
            };
            patterns
                .par_iter()
                .map(|pattern| {
                    let (check, ms) = timed(|| {
                        trifree::models::verify_rdiag_closure(&grouping, pattern, &a, &b, cap)
                            .map_err(err)
                    })?;
                    Ok(to_row(check, seed, ms))
                })
                .collect()
        }
        VerifyCmd::Aastar(args) => {
            let betas = BetaTables::seeded(4, seed.wrapping_add(3));
            let (check, ms) = timed(|| {
                trifree::models::verify_aa_star(args.r, args.s, args.t, &betas, cap).map_err(err)
            })?;
            Ok(vec![to_row(check, seed, ms)])
        }
        VerifyCmd::Cahalve { r, s, t } => {
            let a =
                trifree::seeded_generic("a", "a", false, 6, seed.wrapping_add(4)).map_err(err)?;
            let (check, ms) =
                timed(|| trifree::models::verify_ca_halving(r, s, t, &a, cap).map_err(err))?;
            Ok(vec![to_row(check, seed, ms)])
        }
        VerifyCmd::Ginibre { k, p, q, r } => {
            let (checks, ms) = timed(|| {
                trifree::models::verify_ginibre(k, p, q, r, paired_cap).map_err(err)
            })?;
            Ok(checks.into_iter().map(|c| to_row(c, seed, ms)).collect())
        }
        VerifyCmd::Appendix { grouping, sizes } => {
            let grouping = parse_grouping(&grouping)?;
            let sizes = parse_sizes(&sizes)?;
            let (rep, ms) = timed(|| {
                verify_appendix_bijections(&grouping, &sizes, config.structural_cap).map_err(err)
            })?;
            Ok(rep
                .lemmas
                .into_iter()
                .map(|lemma| CheckRow {
                    check: format!("appendix-{}", lemma.lemma),
                    params: format!(
                        "grouping=({},{},{}) sizes={:?}",
                        grouping.r,
                        grouping.s,
                        grouping.t,
                        sizes.sizes()
                    ),
                    lhs: lemma.left.to_string(),
                    rhs: lemma.right.to_string(),
                    pass: lemma.pass,
                    elapsed_ms: ms,
                    seed,
                })
                .collect())
        }
        VerifyCmd::Halfmap { shape } => {
            let shape: GammaShape = shape.parse().map_err(err)?;
            halfmap_checks(&shape, true)
        }
    }
}

fn parse_pattern(text: &str) -> Result<StarPattern, String> {
    let eps: Vec<i8> = text
        .split(',')
        .map(|t| match t.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(format!("bad sign {other:?}")),
        })
        .collect::<Result<_, _>>()?;
    StarPattern::new(&eps).map_err(err)
}

fn all_patterns(len: usize) -> Vec<StarPattern> {
    (0..1u32 << len)
        .map(|bits| {
            let eps: Vec<i8> = (0..len).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            StarPattern::new(&eps).expect("signs")
        })
        .collect()
}

fn halfmap_checks(shape: &GammaShape, check_bijection: bool) -> Result<Vec<CheckRow>, String> {
    let started = Instant::now();
    let mut rows = Vec::new();
    if check_bijection {
        let members = trifree::halfmap::separated_parity_reversing(shape).map_err(err)?;
        let m: u32 = shape.sizes().iter().map(|s| s / 2).sum();
        let expected: u64 = (1..=m as u64).product();
        let mut inverses = true;
        for pi in &members {
            let hv = trifree::half(pi, shape).map_err(err)?;
            if trifree::double(&hv, shape).map_err(err)? != *pi {
                inverses = false;
            }
        }
        rows.push(CheckRow {
            check: "halfmap-count".into(),
            params: format!("shape={shape}"),
            lhs: members.len().to_string(),
            rhs: expected.to_string(),
            pass: members.len() as u64 == expected,
            elapsed_ms: started.elapsed().as_millis(),
            seed: 0,
        });
        rows.push(CheckRow {
            check: "halfmap-inverse".into(),
            params: format!("shape={shape}"),
            lhs: inverses.to_string(),
            rhs: "true".into(),
            pass: inverses,
            elapsed_ms: started.elapsed().as_millis(),
            seed: 0,
        });
    }
    Ok(rows)
}
