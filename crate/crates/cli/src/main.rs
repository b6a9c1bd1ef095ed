use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stringtop::checks::{verify_model, VerifyOptions};
use stringtop::loops::{
    based_loop_ring, brane_homology, chas_sullivan_ring, hochschild, intersection_map, loop_homology, prepare_connection,
    ring_to_json, standard_classes, LoopReport,
};
use stringtop::model_io::{load_model, parse_morphism, parse_reps};
use stringtop::scalar;
use stringtop::twisted::{ring_structure, CohomologyTable, Coefficients, ComplexSpec, RingPresentation};
use stringtop::{Carrier, DGAlgebra, Error, SparseVec, TwistedElement};

#[derive(Parser, Debug)]
#[command(name = "stringtop", version, about = "Exact loop homology and Hochschild cohomology of finite dg models")]
struct Cli {
    /// Size of the worker pool (1 forces single-threaded runs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// H_*(LM) from (A⊗k<X>, d_ω).
    Loops {
        #[command(flatten)]
        common: Common,
        /// Dimension n of M; the shift in H_k(LM) = ℍ_(k-n).
        #[arg(long, allow_hyphen_values = true)]
        top_degree: i32,
        /// Multiplication table of the named classes.
        #[arg(long)]
        ring: bool,
        /// Reps file naming the classes; defaults to the standard ones.
        #[arg(long)]
        reps: Option<PathBuf>,
    },
    /// Hoch(A, A), or Hoch(A, A*) with `--module dual`.
    Hochschild {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Module::Algebra)]
        module: Module,
        /// Multiplication table of the named classes.
        #[arg(long)]
        ring: bool,
        /// Reps file naming the classes; defaults to the standard ones.
        #[arg(long)]
        reps: Option<PathBuf>,
    },
    /// H_*(ΩM) from (k<X>, ð).
    Based {
        #[command(flatten)]
        common: Common,
    },
    /// Brane homology of f: A_M → A_Z, with the intersection map.
    Brane {
        #[command(flatten)]
        common: Common,
        /// Model of the submanifold Z.
        #[arg(long)]
        sub: String,
        /// Morphism file `morphism name { x -> ... }`.
        #[arg(long)]
        map: PathBuf,
        /// Dimension of Z.
        #[arg(long, allow_hyphen_values = true)]
        top_degree: i32,
        /// Push the named classes of M forward.
        #[arg(long)]
        intersection: bool,
        /// Named classes of M to push forward.
        #[arg(long)]
        reps: Option<PathBuf>,
    },
    /// The connection (ω, ð) up to a word length.
    Connection {
        #[arg(long)]
        model: String,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Invariant suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Compare with the brute-force bar complex.
        #[arg(long)]
        oracle: bool,
        /// Poincaré map check; needs `--top-degree`.
        #[arg(long)]
        poincare: bool,
        /// Dimension of M, for the Poincaré checks.
        #[arg(long, allow_hyphen_values = true)]
        top_degree: Option<i32>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Preset (`sphere:3`, `cpn:2`, `product(a,b)`, `point`) or a .dgm/.json file.
    #[arg(long)]
    model: String,
    /// Degree window `a..b`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: (i32, i32),
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Word length of the connection; raised automatically when too short.
    #[arg(long)]
    max_len: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Module {
    Algebra,
    Dual,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if a > b {
        return Err(format!("empty window {a}..{b}"));
    }
    Ok((a, b))
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotClosed { .. } | Error::TruncationOverflow { .. } | Error::DegeneratePairing(_) => 1,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("stringtop: cannot configure threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("stringtop: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn named_classes(
    reps: &Option<PathBuf>,
    alg: &DGAlgebra,
    spec: &ComplexSpec,
) -> Result<Vec<(String, TwistedElement)>, Failure> {
    if let Some(path) = reps {
        let basis = spec.carrier_basis().ok_or_else(|| input_error("representatives need a carrier"))?;
        return Ok(parse_reps(&read(path)?, basis, alg.unit(), spec.space(), spec.generators())?);
    }
    let (hd, _) = prepare_connection(alg, Some(1), 1)?;
    let named = standard_classes(spec, &hd)?;
    if named.is_empty() {
        return Err(input_error(format!("no built-in named classes for {}; pass --reps", alg.name())));
    }
    Ok(named)
}

fn run(cmd: Command) -> Result<(String, bool), Failure> {
    match cmd {
        Command::Loops { common, top_degree, ring, reps } => {
            let alg = load_model(&common.model)?;
            let mut report = loop_homology(&alg, top_degree, common.window, common.max_len)?;
            if ring {
                let named = named_classes(&reps, &alg, &report.spec)?;
                chas_sullivan_ring(&mut report, &named)?;
            }
            Ok((render_report(&report, common.format, "k"), true))
        }
        Command::Hochschild { common, module, ring, reps } => {
            let alg = load_model(&common.model)?;
            let dual = module == Module::Dual;
            let (spec, table) = hochschild(&alg, common.window, dual, common.max_len)?;
            let pres = if ring {
                if dual {
                    return Err(input_error("--ring needs algebra coefficients"));
                }
                let named = named_classes(&reps, &alg, &spec)?;
                Some(ring_structure(&spec, &table, &named)?)
            } else {
                None
            };
            let coeffs = if dual { "A*" } else { "A" };
            Ok((render_hochschild(&alg, coeffs, &spec, &table, pres.as_ref(), common.format), true))
        }
        Command::Based { common } => {
            let alg = load_model(&common.model)?;
            let report = based_loop_ring(&alg, common.window, common.max_len)?;
            Ok((render_report(&report, common.format, "k"), true))
        }
        Command::Brane { common, sub, map, top_degree, intersection, reps } => {
            let m = load_model(&common.model)?;
            let z = load_model(&sub)?;
            let f = parse_morphism(&read(&map)?, &m, &z)?;
            let report = brane_homology(&f, top_degree, common.window, common.max_len)?;
            let mut out = render_report(&report, common.format, "k");
            if intersection {
                let (_, conn) = prepare_connection(&m, common.max_len, (m.basis().max_degree() - common.window.0 + 1) as usize)?;
                let src = ComplexSpec::new(m.clone(), Coefficients::Algebra, conn, common.window)?;
                let named = named_classes(&reps, &m, &src)?;
                let mut rows = Vec::new();
                for (name, rep) in &named {
                    let (deg, coords) = intersection_map(&f, &src, &report, rep)?;
                    let image = f.apply_twisted(rep);
                    rows.push((name.clone(), deg, coords, report.spec.format(&image)));
                }
                out = append_intersection(out, &rows, common.format);
            }
            Ok((out, true))
        }
        Command::Connection { model, max_len, format } => {
            let alg = load_model(&model)?;
            let need = max_len.unwrap_or(0);
            let (_, conn) = prepare_connection(&alg, max_len, need)?;
            let out = match format {
                Format::Json => pretty(&conn.to_json(alg.basis())),
                Format::Tsv => {
                    let gens = conn.generators();
                    let mut s = format!("# connection {} max_len={}\n", alg.name(), conn.max_len());
                    for i in 0..gens.len() {
                        let _ = writeln!(s, "generator\t{}\t{}", gens.name(i), gens.degree(i));
                    }
                    for k in 1..=conn.max_len() {
                        let c = conn.omega_component(k);
                        if !c.is_zero() {
                            let _ = writeln!(s, "omega_{k}\t{}", c.format(Some(alg.basis()), gens));
                        }
                    }
                    for i in 0..gens.len() {
                        let _ = writeln!(s, "eth\t{}\t{}", gens.name(i), conn.eth().image(i).format(None, gens));
                    }
                    s
                }
            };
            Ok((out, true))
        }
        Command::Verify { common, oracle, poincare, top_degree } => {
            let alg = load_model(&common.model)?;
            let poincare = match (poincare, top_degree) {
                (true, Some(n)) => Some(n),
                (true, None) => return Err(input_error("--poincare needs --top-degree")),
                (false, _) => None,
            };
            let opts = VerifyOptions { oracle, poincare, max_len: common.max_len };
            let results = verify_model(&alg, common.window, &opts)?;
            let ok = results.iter().all(|r| r.passed);
            let out = match common.format {
                Format::Json => pretty(&json!({
                    "model": alg.name(),
                    "passed": ok,
                    "checks": results.iter().map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail})).collect::<Vec<_>>(),
                })),
                Format::Tsv => {
                    let mut s = format!("# verify {} window={}..{}\n", alg.name(), common.window.0, common.window.1);
                    for r in &results {
                        let _ = writeln!(s, "{}\t{}\t{}", r.name, if r.passed { "pass" } else { "FAIL" }, r.detail);
                    }
                    s
                }
            };
            Ok((out, ok))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn coords_text(c: &SparseVec) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = c.iter().map(|(i, x)| format!("{}:{}", i, scalar::format(x))).collect();
    format!("[{}]", parts.join(", "))
}

fn ring_rows(ring: &RingPresentation) -> String {
    let mut s = String::from("# ring\na\tb\tdegree\tproduct\n");
    for p in &ring.products {
        let product = match (&p.coords, &p.in_names) {
            (None, _) => "not computed".to_string(),
            (Some(c), _) if c.is_zero() => "0".to_string(),
            (Some(_), Some(names)) => stringtop::algebra::format_combination(names.iter().cloned()),
            (Some(c), None) => coords_text(c),
        };
        let _ = writeln!(s, "{}\t{}\t{}\t{}", p.left, p.right, p.degree, product);
    }
    s
}

fn render_report(report: &LoopReport, format: Format, label: &str) -> String {
    match format {
        Format::Json => pretty(&report.to_json()),
        Format::Tsv => {
            let mut s = format!("# {} {}\n{label}\tdim\n", report.model, report.convention);
            for (k, d) in &report.betti {
                let _ = writeln!(s, "{k}\t{d}");
            }
            if let Some(ring) = &report.ring {
                s.push_str(&ring_rows(ring));
            }
            s
        }
    }
}

fn render_hochschild(
    alg: &DGAlgebra,
    coeffs: &str,
    spec: &ComplexSpec,
    table: &CohomologyTable,
    ring: Option<&RingPresentation>,
    format: Format,
) -> String {
    let (lo, hi) = table.window();
    match format {
        Format::Json => {
            let reps: Vec<Value> = table
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "degree": e.degree,
                        "reps": e.reps.iter().map(|r| r.to_json(spec.carrier_basis(), spec.generators())).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let mut v = json!({
                "model": alg.name(),
                "coefficients": coeffs,
                "window": [lo, hi],
                "dims": table.dims().iter().map(|(d, n)| json!([d, n])).collect::<Vec<_>>(),
                "reps": reps,
            });
            if let Some(r) = ring {
                v["ring"] = ring_to_json(r);
            }
            pretty(&v)
        }
        Format::Tsv => {
            let mut s = format!("# hochschild {} coefficients={coeffs} window={lo}..{hi}\ndegree\tdim\n", alg.name());
            for (d, n) in table.dims() {
                let _ = writeln!(s, "{d}\t{n}");
            }
            if let Some(r) = ring {
                s.push_str(&ring_rows(r));
            }
            s
        }
    }
}

fn append_intersection(out: String, rows: &[(String, i32, SparseVec, String)], format: Format) -> String {
    match format {
        Format::Json => {
            let mut v: Value = serde_json::from_str(&out).expect("own output");
            v["intersection"] = Value::Array(
                rows.iter()
                    .map(|(n, d, c, img)| {
                        json!({
                            "class": n,
                            "degree": d,
                            "coords": c.iter().map(|(i, x)| json!([i, scalar::format(x)])).collect::<Vec<_>>(),
                            "image": img,
                        })
                    })
                    .collect(),
            );
            pretty(&v)
        }
        Format::Tsv => {
            let mut s = out;
            s.push_str("# intersection\nclass\tdegree\tcoords\timage\n");
            for (n, d, c, img) in rows {
                let _ = writeln!(s, "{n}\t{d}\t{}\t{img}", coords_text(c));
            }
            s
        }
    }
}
