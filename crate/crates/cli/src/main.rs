use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use smcnets::bigraph::{
    bigraph_to_dot, check_bigraph, compose_bigraphs, enumerate_bigraphs, parse_bigraph, parse_bigsig, print_bigraph,
    BigSignature, Interface,
};
use smcnets::calculi::{builtin_theory, count_closed_linear_terms, enumerate_closed_linear_terms, enumerate_nets, NetBudget};
use smcnets::equivalence::{collapse, collapsed_equal, rewiring_equivalent_in, theory_equivalent_bounded, Outcome};
use smcnets::net::dot::net_to_dot;
use smcnets::net::text::{parse_net, print_net};
use smcnets::signature::{parse_theory, Theory};
use smcnets::translate::{check_closed_term_iso, check_faithfulness, translate_bigraph, translate_interface, TranslationContext};
use smcnets::{parse_formula, Net};

/// Exit codes: 0 success / equal / verified, 1 check failed / distinct /
/// mismatch, 2 usage or input error, 3 equivalence unknown within budget.
#[derive(Parser)]
#[command(name = "smcnets", version, about = "Proof nets for free SMC categories, binding calculi and bigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Well-formedness and correctness of a net, validity of a bigraph,
    /// theory or bigraphical signature.
    Check { file: PathBuf },
    /// The composite that runs `f` then `g` (nets or bigraphs).
    Compose {
        f: PathBuf,
        g: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Decides equivalence of two nets.
    Eq {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value = "rewiring")]
        mode: EqMode,
        /// States expanded by the theory search.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// `A * B -> C` to `A -> (B -o C)`, or back with `--uncurry`.
    Curry {
        file: PathBuf,
        #[arg(long)]
        uncurry: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Splits a net as `f2 . f1` where `f1` holds the given cells.
    Decompose {
        file: PathBuf,
        /// Comma-separated cell ids.
        #[arg(long, value_delimiter = ',')]
        cells: Vec<u32>,
        /// Writes `<prefix>.1.snet` and `<prefix>.2.snet`.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Translates a bigraph to a net, or only its interfaces.
    Translate {
        bigraph: PathBuf,
        /// Print the translated interfaces instead of the net.
        #[arg(long)]
        interface: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Enumerates nets of a theory or bigraphs of a signature.
    Enum {
        #[arg(long, conflicts_with = "bigsig")]
        theory: Option<String>,
        #[arg(long, default_value = "I")]
        dom: String,
        #[arg(long, default_value = "t")]
        cod: String,
        /// Cells counted against the budget.
        #[arg(long)]
        cells: Option<usize>,
        /// Comma-separated operations that count (default: all).
        #[arg(long, value_delimiter = ',')]
        counted: Vec<String>,
        /// Bound on all cells, counted or not (default: `--cells`).
        #[arg(long)]
        max_total: Option<usize>,
        #[arg(long)]
        bigsig: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<usize>,
        /// Ground bigraphs `(0, {}) -> (1, {})`.
        #[arg(long)]
        ground: bool,
        /// Print every element, not just the count.
        #[arg(long)]
        list: bool,
    },
    /// Enumeration-based checks of the translation and the λ encodings.
    Oracle {
        #[arg(value_enum)]
        check: OracleCheck,
        #[arg(long)]
        bigsig: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        nodes: usize,
        /// Term size for `linear-lambda`.
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
    /// DOT export of a net or bigraph.
    Render {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EqMode {
    Rewiring,
    Theory,
    Collapsed,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleCheck {
    ClosedTermIso,
    Faithfulness,
    LinearLambda,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Input { path: String, source: smcnets::Error },
    #[error(transparent)]
    Core(#[from] smcnets::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn in_file<T>(path: &Path, r: smcnets::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

/// A theory named in a file: `builtin:<name>`, `bigsig:<path>` (the
/// translation of a `.sbs` or `.sbg` signature) or a `.sth` path, relative
/// paths taken from `base`.
fn load_theory(spec: &str, base: &Path) -> Result<(Theory, String)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok((builtin_theory(name)?, spec.to_string()));
    }
    if let Some(p) = spec.strip_prefix("bigsig:") {
        let path = base.join(p);
        let sig = load_bigsig(&path)?;
        let th = TranslationContext::new(&sig)?.theory;
        return Ok((th, format!("bigsig:{}", absolute(&path))));
    }
    let path = base.join(spec);
    let text = read(&path)?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let th = in_file(
        &path,
        parse_theory(&text, &mut |p, t| {
            let net_path = dir.join(p);
            let text = fs::read_to_string(&net_path).map_err(|e| smcnets::Error::Io {
                path: net_path.display().to_string(),
                msg: e.to_string(),
            })?;
            Ok(parse_net(&text, Some(t), &mut |_| Ok(t.clone()))?.net)
        }),
    )?;
    Ok((th, absolute(&path)))
}

fn absolute(p: &Path) -> String {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// A net, its theory (if it names one) and the theory reference to write
/// back out.
struct LoadedNet {
    net: Net,
    theory: Option<Theory>,
    theory_ref: Option<String>,
}

fn load_net(path: &Path) -> Result<LoadedNet> {
    let text = read(path)?;
    let mut loaded = None;
    let base = dir_of(path);
    let file = parse_net(&text, None, &mut |spec| {
        let (th, r) = load_theory(spec, &base).map_err(|e| smcnets::Error::Io {
            path: spec.to_string(),
            msg: e.to_string(),
        })?;
        loaded = Some((th.clone(), r));
        Ok(th)
    });
    let file = in_file(path, file)?;
    let (theory, theory_ref) = loaded.map_or((None, None), |(t, r)| (Some(t), Some(r)));
    Ok(LoadedNet {
        net: file.net,
        theory,
        theory_ref,
    })
}

fn load_bigsig(path: &Path) -> Result<BigSignature> {
    let text = read(path)?;
    if extension(path) == "sbg" {
        Ok(in_file(path, parse_bigraph(&text, None))?.signature)
    } else {
        in_file(path, parse_bigsig(&text))
    }
}

fn load_bigraph(path: &Path) -> Result<smcnets::bigraph::BigraphFile> {
    let file = in_file(path, parse_bigraph(&read(path)?, None))?;
    for w in &file.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(file)
}

fn mode_of(n: &LoadedNet) -> smcnets::WiringMode {
    n.theory.as_ref().map(Theory::wiring_mode).unwrap_or_default()
}

fn check(file: &Path) -> Result<u8> {
    match extension(file) {
        "sbg" => {
            let b = load_bigraph(file)?;
            Ok(match check_bigraph(&b.bigraph, &b.signature) {
                Ok(()) => {
                    println!("valid");
                    0
                }
                Err(e) => {
                    println!("invalid: {e}");
                    1
                }
            })
        }
        "sbs" => {
            load_bigsig(file)?;
            println!("valid");
            Ok(0)
        }
        "sth" => {
            let (th, _) = load_theory(&file.display().to_string(), Path::new(""))?;
            th.validate()?;
            println!("valid");
            Ok(0)
        }
        _ => {
            let n = load_net(file)?;
            let mode = mode_of(&n);
            if let Err(e) = n.net.check_wellformed(&mode) {
                println!("ill-formed: {e}");
                return Ok(1);
            }
            Ok(match n.net.correctness(&mode) {
                Ok(()) => {
                    println!("correct");
                    0
                }
                Err(e) => {
                    println!("well-formed, not correct: {e}");
                    1
                }
            })
        }
    }
}

fn compose(f: &Path, g: &Path, out: Option<&Path>) -> Result<u8> {
    if extension(f) == "sbg" {
        let (bf, bg) = (load_bigraph(f)?, load_bigraph(g)?);
        let mut sig = bf.signature.clone();
        sig.controls.extend(bg.signature.controls.clone());
        let c = compose_bigraphs(&bg.bigraph, &bf.bigraph, &sig)?;
        emit(out, &print_bigraph(&c, Some(&sig)))?;
    } else {
        let (nf, ng) = (load_net(f)?, load_net(g)?);
        let c = smcnets::smc::compose(&ng.net, &nf.net)?;
        emit(out, &print_net(&c, nf.theory_ref.or(ng.theory_ref).as_deref()))?;
    }
    Ok(0)
}

fn eq(f: &Path, g: &Path, mode: EqMode, budget: usize) -> Result<u8> {
    let (nf, ng) = (load_net(f)?, load_net(g)?);
    let theory = nf.theory.clone().or(ng.theory.clone()).unwrap_or_default();
    let outcome = match mode {
        EqMode::Rewiring => {
            if rewiring_equivalent_in(&nf.net, &ng.net, &theory.wiring_mode())? {
                Outcome::Equal
            } else {
                Outcome::Distinct
            }
        }
        EqMode::Collapsed => {
            if collapsed_equal(&collapse(&nf.net, &theory)?, &collapse(&ng.net, &theory)?) {
                Outcome::Equal
            } else {
                Outcome::Distinct
            }
        }
        EqMode::Theory => theory_equivalent_bounded(&nf.net, &ng.net, &theory, budget)?,
    };
    println!("{outcome}");
    Ok(match outcome {
        Outcome::Equal => 0,
        Outcome::Distinct => 1,
        Outcome::Unknown => 3,
    })
}

fn translate(path: &Path, interface: bool, out: Option<&Path>) -> Result<u8> {
    let b = load_bigraph(path)?;
    if interface {
        let text = format!(
            "dom {}\ncod {}\n",
            translate_interface(&b.bigraph.dom),
            translate_interface(&b.bigraph.cod)
        );
        emit(out, &text)?;
        return Ok(0);
    }
    let ctx = TranslationContext::new(&b.signature)?;
    let net = translate_bigraph(&b.bigraph, &ctx)?;
    emit(out, &print_net(&net.net, Some(&format!("bigsig:{}", absolute(path)))))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    theory: Option<String>,
    dom: &str,
    cod: &str,
    cells: Option<usize>,
    counted: Vec<String>,
    max_total: Option<usize>,
    bigsig: Option<PathBuf>,
    nodes: Option<usize>,
    ground: bool,
    list: bool,
) -> Result<u8> {
    if let Some(spec) = theory {
        let k = cells.ok_or_else(|| CliError::Usage("`enum --theory` needs `--cells`".into()))?;
        let (th, r) = load_theory(&spec, Path::new(""))?;
        let dom = parse_formula(dom, Some(&th.signature.sorts))?;
        let cod = parse_formula(cod, Some(&th.signature.sorts))?;
        let budget = NetBudget {
            max_counted: k,
            counted_ops: (!counted.is_empty()).then(|| counted.into_iter().collect::<BTreeSet<_>>()),
            max_total: max_total.unwrap_or(k),
        };
        let nets = enumerate_nets(&th, &dom, &cod, &budget)?;
        if list {
            for n in &nets {
                println!("{}", print_net(n, Some(&r)));
            }
        }
        println!("{} nets", nets.len());
        return Ok(0);
    }
    let path = bigsig.ok_or_else(|| CliError::Usage("`enum` needs `--theory` or `--bigsig`".into()))?;
    let k = nodes.ok_or_else(|| CliError::Usage("`enum --bigsig` needs `--nodes`".into()))?;
    if !ground {
        return Err(CliError::Usage("only `--ground` bigraph enumeration is available from the command line".into()));
    }
    let sig = load_bigsig(&path)?;
    let all = enumerate_bigraphs(&sig, &Interface::new(0), &Interface::new(1), k)?;
    if list {
        for b in &all {
            println!("{}", print_bigraph(b, None));
        }
    }
    println!("{} bigraphs", all.len());
    Ok(0)
}

fn oracle(check: OracleCheck, bigsig: Option<PathBuf>, nodes: usize, size: usize) -> Result<u8> {
    let sig = || -> Result<BigSignature> {
        load_bigsig(&bigsig.clone().ok_or_else(|| CliError::Usage("this check needs `--bigsig`".into()))?)
    };
    let ok = match check {
        OracleCheck::ClosedTermIso => {
            let r = check_closed_term_iso(&sig()?, nodes)?;
            println!("bigraphs {}, nets {}, injective {}", r.bigraphs, r.nets, r.injective);
            if let Some(n) = &r.unmatched_net {
                println!("unmatched net:\n{}", print_net(n, None));
            }
            if let Some(b) = &r.unmatched_bigraph {
                println!("unmatched bigraph:\n{}", print_bigraph(b, None));
            }
            r.ok()
        }
        OracleCheck::Faithfulness => {
            let r = check_faithfulness(&sig()?, nodes)?;
            println!(
                "interface pairs {}, bigraphs {}, pairs compared {}, collisions {}, witness correct {}, witness unmatched {}",
                r.interface_pairs,
                r.bigraphs,
                r.pairs_checked,
                r.collisions.len(),
                r.witness_correct,
                r.witness_unmatched
            );
            r.ok()
        }
        OracleCheck::LinearLambda => {
            let th = builtin_theory("linear_lambda")?;
            let t = parse_formula("t", None)?;
            let mut ok = true;
            let mut terms = 0;
            for k in 0..=size {
                terms += enumerate_closed_linear_terms(k).len();
                let nets = enumerate_nets(&th, &smcnets::Formula::Unit, &t, &NetBudget::cells(2 * k + 1))?.len();
                println!("size {k}: terms {} (formula {}), nets {nets} (cumulative)", terms, count_closed_linear_terms(k));
                ok &= nets == terms;
            }
            ok
        }
    };
    println!("{}", if ok { "verified" } else { "mismatch" });
    Ok(u8::from(!ok))
}

fn render(file: &Path, out: Option<&Path>) -> Result<u8> {
    let dot = if extension(file) == "sbg" {
        bigraph_to_dot(&load_bigraph(file)?.bigraph)
    } else {
        net_to_dot(&load_net(file)?.net)
    };
    emit(out, &dot)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { file } => check(&file),
        Command::Compose { f, g, o } => compose(&f, &g, o.as_deref()),
        Command::Eq { f, g, mode, budget } => eq(&f, &g, mode, budget),
        Command::Curry { file, uncurry, o } => {
            let n = load_net(&file)?;
            let m = if uncurry {
                smcnets::smc::uncurry(&n.net)?
            } else {
                smcnets::smc::curry(&n.net)?
            };
            emit(o.as_deref(), &print_net(&m, n.theory_ref.as_deref()))?;
            Ok(0)
        }
        Command::Decompose { file, cells, o } => {
            let n = load_net(&file)?;
            let (f1, f2) = smcnets::smc::decompose(&n.net, &cells.into_iter().collect())?;
            let (t1, t2) = (print_net(&f1, n.theory_ref.as_deref()), print_net(&f2, n.theory_ref.as_deref()));
            match o {
                Some(prefix) => {
                    let p = prefix.display().to_string();
                    emit(Some(Path::new(&format!("{p}.1.snet"))), &t1)?;
                    emit(Some(Path::new(&format!("{p}.2.snet"))), &t2)?;
                }
                None => print!("{t1}---\n{t2}"),
            }
            Ok(0)
        }
        Command::Translate { bigraph, interface, o } => translate(&bigraph, interface, o.as_deref()),
        Command::Enum {
            theory,
            dom,
            cod,
            cells,
            counted,
            max_total,
            bigsig,
            nodes,
            ground,
            list,
        } => enumerate(theory, &dom, &cod, cells, counted, max_total, bigsig, nodes, ground, list),
        Command::Oracle {
            check,
            bigsig,
            nodes,
            size,
        } => oracle(check, bigsig, nodes, size),
        Command::Render { file, o } => render(&file, o.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
