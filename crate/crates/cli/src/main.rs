use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qboson_core::cache::GramCache;
use qboson_core::nichols::Nichols;
use qboson_core::pairing::GramRecord;
use qboson_core::qboson::{build_projector, certify_element, certify_projector, BosonElement, BosonTerm, TruncationIndex};
use qboson_core::repmod::{
    check_integrable, compose, decompose, flk_certificate, is_identity, matrix_strings, parse_matrix, render_vector, ModuleDocument,
    ModulePresentation,
};
use qboson_core::{CartanDatum, DatumDocument, Error, FreeElement, Multidegree, Side, Word};

const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "qboson", version, about = "Exact computations in generalized q-boson algebras")]
struct Cli {
    /// Replay a saved report and compare its verdicts.
    #[arg(long, value_name = "REPORT")]
    verify: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the Nichols algebra per multidegree.
    Dims {
        datum: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Gram block of the pairing at one multidegree.
    Gram {
        datum: PathBuf,
        /// Multidegree, comma separated (e.g. 2,1).
        #[arg(long)]
        alpha: String,
    },
    /// Truncated extremal projector with certificates.
    Projector {
        datum: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        support: SupportArg,
        /// Degree cap for the underlying algebra (default 2n+2).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Decomposition of a module as R ⊗ M0.
    Decompose {
        datum: PathBuf,
        module: PathBuf,
        /// Truncation level n (default: smallest integrable level).
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        support: SupportArg,
    },
    /// Matrix-algebra certificate at a root of unity.
    Flk {
        datum: PathBuf,
        #[arg(long)]
        max_degree: Option<usize>,
    },
}

#[derive(Args)]
struct SupportArg {
    /// Labels of the support F, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    support: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RunReport {
    engine_version: String,
    command: String,
    datum_digest: String,
    datum: DatumDocument,
    parameters: Value,
    results: Value,
    /// Wall-clock timings; not covered by the determinism contract.
    timings_ms: BTreeMap<String, u128>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
struct WordTerm {
    word: Vec<String>,
    coeff: String,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
struct PairRecord {
    r: Vec<String>,
    s: Vec<WordTerm>,
}

enum Failure {
    Engine(Error),
    Usage(String),
    /// Report was produced but a verdict failed.
    Verdict(Box<RunReport>),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegreeCapExceeded { .. } => 2,
        Error::ReconstructionFailure { .. } | Error::SingularPivot(_) => 3,
        _ => 1,
    }
}

fn names(d: &CartanDatum, w: &Word) -> Vec<String> {
    w.letters().iter().map(|&g| d.generator_name(g)).collect()
}

fn parse_word(d: &CartanDatum, v: &[String]) -> Outcome<Word> {
    let mut out = Vec::with_capacity(v.len());
    for n in v {
        let g = (0..d.generator_count() as u16)
            .find(|&g| d.generator_name(g) == *n)
            .ok_or_else(|| Error::Parse(format!("unknown generator `{n}`")))?;
        out.push(g);
    }
    Ok(Word(out))
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Engine(Error::Io(e)))
}

fn load_datum(path: &Path) -> Outcome<CartanDatum> {
    Ok(CartanDatum::load(&read(path)?)?)
}

fn nichols(d: &CartanDatum, cap: usize) -> Outcome<Nichols> {
    Ok(Nichols::new(d.clone(), cap).with_cache(GramCache::from_env()?))
}

fn support_indices(d: &CartanDatum, labels: &Option<Vec<String>>) -> Outcome<Vec<usize>> {
    match labels {
        None => Ok((0..d.rank()).collect()),
        Some(ls) => ls
            .iter()
            .filter(|l| !l.is_empty())
            .map(|l| {
                d.label_position(l)
                    .ok_or_else(|| Failure::Usage(format!("unknown label `{l}` in --support")))
            })
            .collect(),
    }
}

fn support_labels(d: &CartanDatum, support: &[usize]) -> Vec<String> {
    support.iter().map(|&i| d.labels()[i].clone()).collect()
}

fn report(d: &CartanDatum, command: &str, parameters: Value, results: Value, start: Instant) -> RunReport {
    RunReport {
        engine_version: ENGINE_VERSION.to_string(),
        command: command.to_string(),
        datum_digest: d.digest(),
        datum: d.document().clone(),
        parameters,
        results,
        timings_ms: BTreeMap::from([("total".to_string(), start.elapsed().as_millis())]),
    }
}

fn dims_results(d: &CartanDatum, max_degree: usize) -> Outcome<Value> {
    let n = nichols(d, max_degree)?;
    let table = n.hilbert_data(max_degree)?;
    let mut by_total = vec![0usize; max_degree + 1];
    let rows: Vec<Value> = table
        .iter()
        .map(|(alpha, dim)| {
            by_total[alpha.total()] += dim;
            json!({ "multidegree": alpha.0, "dim": dim })
        })
        .collect();
    Ok(json!({ "dims": rows, "total_by_degree": by_total }))
}

fn parse_alpha(d: &CartanDatum, text: &str) -> Outcome<Multidegree> {
    let parts: Vec<u32> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("bad multidegree `{text}`: {e}")))?;
    if parts.len() != d.rank() {
        return Err(Failure::Usage(format!("multidegree `{text}` has {} entries, rank is {}", parts.len(), d.rank())));
    }
    Ok(Multidegree(parts))
}

fn element_terms(d: &CartanDatum, x: &FreeElement) -> Vec<WordTerm> {
    x.terms()
        .iter()
        .map(|(w, c)| WordTerm {
            word: names(d, w),
            coeff: c.canonical(),
        })
        .collect()
}

fn gram_results(d: &CartanDatum, alpha: &Multidegree) -> Outcome<Value> {
    let n = nichols(d, alpha.total())?;
    let block = n.block(alpha)?;
    let dual = n.dual(alpha)?;
    let record = GramRecord::from_block(&block);
    Ok(json!({
        "multidegree": alpha.0,
        "row_words": block.words.iter().map(|w| names(d, w)).collect::<Vec<_>>(),
        "col_words": block.words.iter().map(|w| names(d, w)).collect::<Vec<_>>(),
        "entries": record.entries,
        "rank": block.rank,
        "pivot_rows": block.pivot_rows,
        "pivot_cols": block.pivot_cols,
        "kernel": block.left_kernel.iter().map(|k| element_terms(d, k)).collect::<Vec<_>>(),
        "dual_basis": {
            "r": dual.r_basis.iter().map(|r| element_terms(d, r)).collect::<Vec<_>>(),
            "s": dual.s_basis.iter().map(|s| element_terms(d, s)).collect::<Vec<_>>(),
            "certified": dual.certified,
        },
    }))
}

fn projector_results(d: &CartanDatum, t: &TruncationIndex, cap: usize) -> Outcome<(Value, bool)> {
    let n = nichols(d, cap)?;
    let p = build_projector(&n, t)?;
    let certs = certify_projector(&n, &p)?;
    let pairs: Vec<PairRecord> = p
        .pairs
        .iter()
        .map(|(r, s)| PairRecord {
            r: names(d, r),
            s: element_terms(d, s),
        })
        .collect();
    let ok = certs.all_hold();
    Ok((
        json!({
            "element": p.element.to_serial(d),
            "rendered": p.element.render(d),
            "pairs": pairs,
            "certificates": certs,
            "all_hold": ok,
        }),
        ok,
    ))
}

/// Smallest level at which the module is integrable, searched up to its dimension.
fn default_truncation(m: &ModulePresentation, support: &[usize]) -> usize {
    (0..=m.dim())
        .find(|&k| check_integrable(m, &TruncationIndex::new(k, support.to_vec())).integrable)
        .unwrap_or(m.dim())
}

fn decompose_results(d: &CartanDatum, doc: &ModuleDocument, level: Option<usize>, support: &[usize]) -> Outcome<(Value, bool)> {
    let probe = ModulePresentation::from_document(d, doc)?;
    let level = level.unwrap_or_else(|| default_truncation(&probe, support));
    let n = nichols(d, (2 * level + 4).max(8))?;
    let m = ModulePresentation::load(&n, &serde_json::to_string(doc).map_err(Error::Json)?)?;
    let t = TruncationIndex::new(level, support.to_vec());
    let dec = decompose(&n, &m, &t)?;
    let field = d.field();
    let m0: Vec<Vec<String>> = dec.m0.basis.iter().map(|v| render_vector(v, m.dim(), &field)).collect();
    let components: Vec<Value> = dec
        .components
        .iter()
        .map(|(r, k)| json!({ "r": names(d, r), "m0_index": k }))
        .collect();
    let ok = dec.bijective && dec.reconstruction_exact;
    Ok((
        json!({
            "truncation": dec.truncation,
            "retried": dec.retried,
            "dimension": m.dim(),
            "m0_dimension": dec.m0.dim(),
            "m0_basis": m0,
            "components": components,
            "forward": matrix_strings(&dec.forward, dec.components.len(), &field),
            "backward": matrix_strings(&dec.backward, m.dim(), &field),
            "reconstruction_exact": dec.reconstruction_exact,
            "bijective": dec.bijective,
        }),
        ok,
    ))
}

fn flk_cap(d: &CartanDatum, explicit: Option<usize>) -> usize {
    explicit.unwrap_or_else(|| match d.field() {
        qboson_core::FieldSpec::Cyclotomic { order } => 2 * order as usize * d.generator_count().max(1) + 2,
        qboson_core::FieldSpec::Transcendental => 8,
    })
}

fn flk_results(d: &CartanDatum, cap: usize) -> Outcome<(Value, bool)> {
    let n = nichols(d, cap)?;
    let c = flk_certificate(&n)?;
    let ok = c.bijective && c.scalar_identity;
    Ok((serde_json::to_value(&c).map_err(Error::Json)?, ok))
}

fn finish(r: RunReport, ok: bool) -> Outcome<RunReport> {
    if ok {
        Ok(r)
    } else {
        Err(Failure::Verdict(Box::new(r)))
    }
}

fn run(cmd: Command) -> Outcome<RunReport> {
    let start = Instant::now();
    match cmd {
        Command::Dims { datum, max_degree } => {
            let d = load_datum(&datum)?;
            let results = dims_results(&d, max_degree)?;
            Ok(report(&d, "dims", json!({ "max_degree": max_degree }), results, start))
        }
        Command::Gram { datum, alpha } => {
            let d = load_datum(&datum)?;
            let a = parse_alpha(&d, &alpha)?;
            let results = gram_results(&d, &a)?;
            Ok(report(&d, "gram", json!({ "alpha": a.0 }), results, start))
        }
        Command::Projector {
            datum,
            degree,
            support,
            max_degree,
        } => {
            let d = load_datum(&datum)?;
            let f = support_indices(&d, &support.support)?;
            let cap = max_degree.unwrap_or(2 * degree + 2);
            let t = TruncationIndex::new(degree, f);
            let (results, ok) = projector_results(&d, &t, cap)?;
            let params = json!({ "degree": degree, "support": support_labels(&d, &t.support), "max_degree": cap });
            finish(report(&d, "projector", params, results, start), ok)
        }
        Command::Decompose {
            datum,
            module,
            truncation,
            support,
        } => {
            let d = load_datum(&datum)?;
            let f = support_indices(&d, &support.support)?;
            let doc: ModuleDocument = serde_json::from_str(&read(&module)?).map_err(|e| Error::Parse(e.to_string()))?;
            let (results, ok) = decompose_results(&d, &doc, truncation, &f)?;
            let params = json!({ "truncation": truncation, "support": support_labels(&d, &f), "module": doc });
            finish(report(&d, "decompose", params, results, start), ok)
        }
        Command::Flk { datum, max_degree } => {
            let d = load_datum(&datum)?;
            let cap = flk_cap(&d, max_degree);
            let (results, ok) = flk_results(&d, cap)?;
            finish(report(&d, "flk", json!({ "max_degree": cap }), results, start), ok)
        }
    }
}

fn param<T: serde::de::DeserializeOwned>(p: &Value, key: &str) -> Outcome<T> {
    serde_json::from_value(p.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|e| Failure::Usage(format!("report parameter `{key}`: {e}")))
}

fn field<T: serde::de::DeserializeOwned>(r: &Value, key: &str) -> Outcome<T> {
    serde_json::from_value(r.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|e| Failure::Usage(format!("report result `{key}`: {e}")))
}

/// One replayed check: its name and whether the saved and replayed values agree.
fn check(checks: &mut Vec<Value>, name: &str, saved: &Value, replayed: &Value) -> bool {
    let same = saved == replayed;
    checks.push(json!({ "check": name, "saved": saved, "replayed": replayed, "match": same }));
    same
}

fn verify(path: &Path) -> Outcome<Value> {
    let saved: RunReport = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    let d = CartanDatum::from_document(saved.datum.clone())?;
    let p = &saved.parameters;
    let r = &saved.results;
    let mut checks = Vec::new();
    let mut ok = check(&mut checks, "datum_digest", &json!(saved.datum_digest), &json!(d.digest()));
    match saved.command.as_str() {
        "dims" => {
            let replay = dims_results(&d, param(p, "max_degree")?)?;
            ok &= check(&mut checks, "dims", r, &replay);
        }
        "gram" => {
            let alpha = Multidegree(param(p, "alpha")?);
            let replay = gram_results(&d, &alpha)?;
            ok &= check(&mut checks, "gram", r, &replay);
        }
        "projector" => {
            let degree: usize = param(p, "degree")?;
            let labels: Vec<String> = param(p, "support")?;
            let cap: usize = param(p, "max_degree")?;
            let t = TruncationIndex::new(degree, support_indices(&d, &Some(labels))?);
            // certificates replayed from the serialized element and pairs alone
            let terms: Vec<BosonTerm> = field(r, "element")?;
            let gamma = BosonElement::from_serial(&d, &terms)?;
            let pairs: Vec<PairRecord> = field(r, "pairs")?;
            let field_spec = d.field();
            let mut parsed = Vec::with_capacity(pairs.len());
            for pr in &pairs {
                let mut s = FreeElement::zero(Side::E);
                for wt in &pr.s {
                    s.add_term(parse_word(&d, &wt.word)?, field_spec.parse(&wt.coeff)?);
                }
                parsed.push((parse_word(&d, &pr.r)?, s));
            }
            let n = nichols(&d, cap)?;
            let certs = certify_element(&n, &t, &gamma, &parsed)?;
            let saved_certs = r.get("certificates").cloned().unwrap_or(Value::Null);
            ok &= check(&mut checks, "certificates", &saved_certs, &serde_json::to_value(&certs).map_err(Error::Json)?);
            let (replay, _) = projector_results(&d, &t, cap)?;
            ok &= check(&mut checks, "element", &r["element"], &replay["element"]);
        }
        "decompose" => {
            let doc: ModuleDocument = param(p, "module")?;
            let labels: Vec<String> = param(p, "support")?;
            let level: Option<usize> = param(p, "truncation")?;
            let f = support_indices(&d, &Some(labels))?;
            let field_spec = d.field();
            let dim: usize = field(r, "dimension")?;
            let comps: Vec<Value> = field(r, "components")?;
            let fwd = parse_matrix(&field::<Vec<Vec<String>>>(r, "forward")?, dim, &field_spec)?;
            let bwd = parse_matrix(&field::<Vec<Vec<String>>>(r, "backward")?, comps.len(), &field_spec)?;
            let iso = is_identity(&compose(&bwd, &fwd), dim, &field_spec)
                && is_identity(&compose(&fwd, &bwd), comps.len(), &field_spec);
            ok &= check(&mut checks, "bijective", &r["bijective"], &json!(iso));
            let (replay, _) = decompose_results(&d, &doc, level, &f)?;
            ok &= check(&mut checks, "decomposition", r, &replay);
        }
        "flk" => {
            let (replay, _) = flk_results(&d, param(p, "max_degree")?)?;
            ok &= check(&mut checks, "flk", r, &replay);
        }
        other => return Err(Failure::Usage(format!("unknown command `{other}` in report"))),
    }
    let out = json!({ "verified": path.display().to_string(), "command": saved.command, "checks": checks, "match": ok });
    if ok {
        Ok(out)
    } else {
        Err(Failure::Mismatch(serde_json::to_string_pretty(&out).unwrap_or_default()))
    }
}

fn emit(value: &impl Serialize, output: &Option<PathBuf>) -> std::result::Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match (&cli.verify, cli.command) {
        (Some(path), None) => verify(path).map(|v| emit(&v, &cli.output)),
        (None, Some(cmd)) => run(cmd).map(|r| emit(&r, &cli.output)),
        (Some(_), Some(_)) => Err(Failure::Usage("--verify takes no subcommand".into())),
        (None, None) => Err(Failure::Usage("a subcommand or --verify is required".into())),
    };
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verdict(r)) => {
            if let Err(msg) = emit(&*r, &cli.output) {
                eprintln!("error: {msg}");
            }
            eprintln!("error: certificate failed");
            ExitCode::from(3)
        }
        Err(Failure::Mismatch(text)) => {
            println!("{text}");
            eprintln!("error: replay does not reproduce the saved verdicts");
            ExitCode::from(3)
        }
    }
}
