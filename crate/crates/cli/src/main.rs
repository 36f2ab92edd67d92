use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use supercluster::characters::{build_table, CharacterTable};
use supercluster::clusters::{adjoint_cluster_size, bell_poly_all, cluster_size, enumerate_templates, invariants_of, pow_q, Template};
use supercluster::config::Caps;
use supercluster::discrete::{delta_decompose, DeltaDecomposition};
use supercluster::oracle;
use supercluster::tensor::{tensor_by_counting, CharSum, Factor, TensorEngine};
use supercluster::verify::{verify, VerifyOptions, VerifyReport};
use supercluster::{Error, Field};

#[derive(Parser)]
#[command(name = "supercluster", version, about = "Exact supercharacter computations for U(n, F_q)")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest cluster-pair count when counting tensor decompositions.
    #[arg(long, global = true)]
    cap_orbit: Option<u128>,
    /// Largest enumerated space q^(n(n-1)/2).
    #[arg(long, global = true)]
    cap_group: Option<u128>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Size {
    #[arg(long)]
    n: usize,
    /// Field order, accepted only when it is prime.
    #[arg(long, conflicts_with_all = ["p", "k"])]
    q: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    k: u32,
}

#[derive(Subcommand)]
enum Command {
    /// The supercharacter table.
    Table(Size),
    /// Templates with their invariants and cluster sizes.
    Clusters(Size),
    /// Decompose a product of primary characters chi(i,j,a).
    Tensor {
        #[command(flatten)]
        size: Size,
        /// A primary factor `i,j,a`; repeat for each factor.
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
        /// Also decompose by counting and require agreement.
        #[arg(long)]
        check: bool,
    },
    /// Decomposition of the discrete-series character.
    Discrete(Size),
    /// B(m, q) for m = 0..n.
    Count(Size),
    /// Certify every formula against the brute-force oracle.
    Verify {
        #[command(flatten)]
        size: Size,
        /// Seed for sampled tensor pairs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write oracle-derived reference data to PATH instead of verifying.
        #[arg(long, value_name = "PATH")]
        emit_golden: Option<PathBuf>,
    },
}

type CliResult<T> = Result<T, Error>;

impl Size {
    fn field(&self, caps: &Caps) -> CliResult<Field> {
        let (p, k) = match (self.q, self.p) {
            (Some(q), _) => {
                if !supercluster::gf::is_prime(q) {
                    return Err(Error::Argument(format!("--q {q} is not prime; give --p and --k for prime powers")));
                }
                (q, 1)
            }
            (None, Some(p)) => (p, self.k),
            (None, None) => return Err(Error::Argument("give --q, or --p with optional --k".into())),
        };
        if self.n == 0 {
            return Err(Error::Argument("--n must be at least 1".into()));
        }
        Field::with_cap(p, k, caps.field)
    }
}

fn caps(cli: &Cli) -> CliResult<Caps> {
    let mut caps = Caps::from_env()?;
    if let Some(c) = cli.cap_orbit {
        caps.orbit = c;
    }
    if let Some(c) = cli.cap_group {
        caps.group = c;
    }
    if caps.orbit == 0 || caps.group == 0 {
        return Err(Error::Argument("caps must be positive".into()));
    }
    Ok(caps)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn csv_string(records: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

fn aligned(records: Vec<Vec<String>>) -> String {
    let cols = records.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| records.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in records {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn records(format: Format, header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let all: Vec<Vec<String>> = std::iter::once(header).chain(rows).collect();
    match format {
        Format::Csv => csv_string(all),
        _ => aligned(all),
    }
}

fn table_output(t: &CharacterTable, format: Format) -> String {
    if format == Format::Json {
        return pretty(&t.to_json());
    }
    let header = std::iter::once("template".to_string()).chain(t.cols.iter().map(|c| c.text(&t.field))).collect();
    let rows = t
        .rows
        .iter()
        .zip(&t.values)
        .map(|(r, vals)| std::iter::once(r.text(&t.field)).chain(vals.iter().map(|v| v.to_poly_string())).collect())
        .collect();
    records(format, header, rows)
}

fn clusters_output(field: &Field, n: usize, format: Format) -> String {
    let templates = enumerate_templates(field, n);
    let info: Vec<[String; 7]> = templates
        .iter()
        .map(|t| {
            let inv = invariants_of(t);
            [
                t.text(field),
                inv.d.to_string(),
                inv.i.to_string(),
                cluster_size(field, t).to_string(),
                adjoint_cluster_size(field, &t.to_matrix()).to_string(),
                pow_q(field, inv.d).to_string(),
                pow_q(field, inv.i).to_string(),
            ]
        })
        .collect();
    let keys = ["template", "d", "i", "cluster_size", "conjugacy_cluster_size", "degree", "self_intertwining"];
    match format {
        Format::Json => {
            let items: Vec<Value> = info
                .iter()
                .map(|row| {
                    let mut m = serde_json::Map::new();
                    for (k, v) in keys.iter().zip(row) {
                        let val = match *k {
                            "template" => json!(v),
                            "d" | "i" => json!(v.parse::<u64>().expect("small")),
                            _ => json!(v),
                        };
                        m.insert(k.to_string(), val);
                    }
                    Value::Object(m)
                })
                .collect();
            pretty(&json!({"n": n, "p": field.p(), "k": field.k(), "templates": items}))
        }
        _ => records(format, keys.iter().map(|s| s.to_string()).collect(), info.into_iter().map(Vec::from).collect()),
    }
}

fn charsum_output(field: &Field, s: &CharSum, format: Format) -> String {
    match format {
        Format::Json => pretty(&s.to_json(field)),
        _ => {
            let rows = s.terms().iter().map(|(t, m)| vec![t.text(field), m.to_string()]).collect();
            let mut out = records(format, vec!["template".into(), "mult".into()], rows);
            if format == Format::Text {
                out.push_str(&format!("total degree {}\n", s.total_degree(field)));
            }
            out
        }
    }
}

fn discrete_output(d: &DeltaDecomposition, format: Format) -> String {
    match format {
        Format::Json => pretty(&d.to_json()),
        _ => {
            let rows = d.terms.iter().map(|(t, m)| vec![t.text(&d.field), m.to_string()]).collect();
            let mut out = records(format, vec!["template".into(), "mult".into()], rows);
            if format == Format::Text {
                out.push_str(&format!("identity value {}\n", d.identity_value));
            }
            out
        }
    }
}

fn parse_factor(field: &Field, n: usize, s: &str) -> CliResult<Factor> {
    let mut parts = s.splitn(3, ',');
    let mut index = |what: &str| -> CliResult<usize> {
        parts
            .next()
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("factor {s:?}: bad {what}")))
    };
    let (i, j) = (index("row")?, index("column")?);
    let a = parts.next().ok_or_else(|| Error::Parse(format!("factor {s:?} is not i,j,a")))?;
    let a = field.parse(a.trim())?;
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::Argument(format!("factor ({i},{j}) is not above the diagonal for n = {n}")));
    }
    Ok((i, j, a))
}

/// The same product by repeated counting, one primary factor at a time.
fn tensor_counted(field: &Field, n: usize, factors: &[Factor], caps: &Caps) -> CliResult<CharSum> {
    let mut acc = CharSum::single(Template::empty(n));
    for &(i, j, a) in factors {
        let primary = Template::primary(n, i, j, a)?;
        let mut next = CharSum::new(n);
        for (t, m) in acc.terms() {
            let part = tensor_by_counting(field, t, &primary, caps)?;
            for (u, k) in part.terms() {
                next.add_term(u.clone(), m * k);
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn report_output(r: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&r.to_json()),
        Format::Csv => csv_string(
            std::iter::once(vec!["key".into(), "passed".into(), "detail".into()])
                .chain(r.entries.iter().map(|e| vec![e.key.to_string(), e.passed.to_string(), e.detail.clone()]))
                .collect(),
        ),
        Format::Text => r.text(),
    }
}

/// Runs the command, returning its output and whether every check passed.
fn run(cli: &Cli) -> CliResult<(String, bool)> {
    let caps = caps(cli)?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::Argument("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Table(size) => {
            let field = size.field(&caps)?;
            Ok((table_output(&build_table(&field, size.n, &caps)?, fmt(Format::Json)), true))
        }
        Command::Clusters(size) => {
            let field = size.field(&caps)?;
            Ok((clusters_output(&field, size.n, fmt(Format::Text)), true))
        }
        Command::Tensor { size, factors, check } => {
            let field = size.field(&caps)?;
            let factors: Vec<Factor> = factors.iter().map(|s| parse_factor(&field, size.n, s)).collect::<CliResult<_>>()?;
            let rewritten = TensorEngine::new(&field, size.n).product(&factors)?;
            if *check {
                let counted = tensor_counted(&field, size.n, &factors, &caps)?;
                if counted != rewritten {
                    return Err(Error::InvariantViolation(format!(
                        "rewrite gives {} but counting gives {}",
                        rewritten.text(&field),
                        counted.text(&field)
                    )));
                }
            }
            Ok((charsum_output(&field, &rewritten, fmt(Format::Json)), true))
        }
        Command::Discrete(size) => {
            let field = size.field(&caps)?;
            Ok((discrete_output(&delta_decompose(&field, size.n, &caps)?, fmt(Format::Json)), true))
        }
        Command::Count(size) => {
            let field = size.field(&caps)?;
            let counts: Vec<BigUint> = bell_poly_all(size.n, field.q());
            let out = match fmt(Format::Text) {
                Format::Json => pretty(&json!(counts.iter().map(|c| c.to_string()).collect::<Vec<_>>())),
                Format::Csv => csv_string(vec![
                    (0..=size.n).map(|m| m.to_string()).collect(),
                    counts.iter().map(|c| c.to_string()).collect(),
                ]),
                Format::Text => counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ") + "\n",
            };
            Ok((out, true))
        }
        Command::Verify { size, seed, emit_golden } => {
            let field = size.field(&caps)?;
            if let Some(path) = emit_golden {
                let data = oracle::golden(&field, size.n, &caps)?;
                std::fs::write(path, pretty(&data)).map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
                return Ok((format!("wrote {}\n", path.display()), true));
            }
            let opts = VerifyOptions { caps, seed: *seed, ..VerifyOptions::default() };
            let report = verify(&field, size.n, &opts)?;
            Ok((report_output(&report, fmt(Format::Text)), report.all_passed()))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Parse(_) | Error::Domain(_) => 2,
        Error::ResourceLimit { .. } => 3,
        Error::InvariantViolation(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, passed)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
