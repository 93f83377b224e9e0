use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use grstar::expr;
use grstar::jsonio::{csv_field, CheckJson, FieldScalarJson, GrElementJson, TangleJobJson};
use grstar::verify;
use grstar_core::cupalg::{relative_commutant_check, tower_trace, wedge_k, TowerElement};
use grstar_core::ncpoly::Context;
use grstar_core::pairings::catalan;
use grstar_core::scalars::{DeltaContext, Rational};
use grstar_core::spectral::{default_zgrid, no_outlier_check, spectral_measure, JacobiMatrix};
use grstar_core::tangle::evaluate;

#[derive(Parser)]
#[command(
    name = "grstar",
    version,
    about = "Graded star-algebra engine: exact products, planar tangles, the cup subalgebra, and Jacobi spectra",
    after_help = "Every flag can also be set through an environment variable with the GRSTAR_ prefix \
                  (GRSTAR_LETTERS, GRSTAR_DELTA, GRSTAR_MAX_DEGREE, GRSTAR_TRUNCATION, GRSTAR_T, \
                  GRSTAR_SEED, GRSTAR_FORMAT, GRSTAR_SUITE)."
)]
struct Cli {
    /// Number of letters l; the loop value δ defaults to l.
    #[arg(long, global = true, env = "GRSTAR_LETTERS", default_value_t = 2)]
    letters: u8,

    /// Loop value δ as a rational "p/q". Only `tangle eval` and `spectral`
    /// accept an override; the polynomial algebra forces δ = l.
    #[arg(long, global = true, env = "GRSTAR_DELTA")]
    delta: Option<String>,

    /// Degree cap for degree-limited operations.
    #[arg(long, global = true, env = "GRSTAR_MAX_DEGREE", default_value_t = 12)]
    max_degree: usize,

    /// Truncation size(s) N for spectral runs (comma separated).
    #[arg(long, visible_alias = "n", global = true, env = "GRSTAR_TRUNCATION", value_delimiter = ',')]
    truncation: Vec<usize>,

    /// t value(s), rational, for spectral runs (comma separated).
    #[arg(long, global = true, env = "GRSTAR_T", value_delimiter = ',')]
    t: Vec<String>,

    /// Seed for randomized verification cases.
    #[arg(long, global = true, env = "GRSTAR_SEED", default_value_t = 1)]
    seed: u64,

    #[arg(long, global = true, env = "GRSTAR_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an expression to a graded element.
    Eval { expr: String },
    /// Exact trace (zero-graded piece) of an expression.
    Trace { expr: String },
    /// Exact inner product of two expressions.
    Inner { a: String, b: String },
    /// ⋆-moment table of a letter against the Catalan oracle.
    Moments {
        #[arg(long, default_value_t = 1)]
        letter: u8,
        #[arg(long, default_value_t = 8)]
        upto: usize,
    },
    /// Exact Gram matrix of a basis family with an identity check.
    Gram {
        #[arg(long, default_value = "eb")]
        basis: String,
        #[arg(long, default_value_t = 10)]
        degree_cap: usize,
    },
    /// Spectral diagnostics for c_t truncations, one row per (t, δ, N).
    Spectral,
    /// Exact coefficient dump of the recursion polynomials.
    Poly {
        #[arg(long, value_parser = ["chebyshev", "s"])]
        family: String,
        #[arg(long)]
        degree: usize,
    },
    /// Tangle operations on JSON files.
    Tangle {
        #[command(subcommand)]
        cmd: TangleCmd,
    },
    /// Tower products ∧_k and tower checks.
    Tower {
        #[arg(long)]
        k: usize,
        #[command(subcommand)]
        cmd: TowerCmd,
    },
    /// Run the verification suites (exit code 1 on any failure).
    Verify {
        #[arg(long, env = "GRSTAR_SUITE", default_value = "all",
              value_parser = ["all", "ncpoly", "cupalg", "spectral", "tangle"])]
        suite: String,
    },
}

#[derive(Subcommand)]
enum TangleCmd {
    /// Evaluate a tangle on inputs, both read from a JSON job file.
    Eval { file: PathBuf },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// ∧_k product of two expressions (words segmented positionally).
    Wedge { a: String, b: String },
    /// Tower checks at level k: the ×-table and commutation with the
    /// embedded level-0 algebra.
    Check {
        #[arg(long, default_value_t = 4)]
        degree_cap: usize,
    },
}

/// Failure that should surface as a usage error (exit code 2).
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (e.g. `grstar spectral | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational, UsageError> {
    Rational::from_str(s).map_err(|e| UsageError(format!("bad rational '{s}': {e}")))
}

fn degree_guard(v: &grstar_core::ncpoly::GrElement, cap: usize) -> Result<(), UsageError> {
    match v.degree() {
        Some(d) if d > cap => Err(UsageError(format!(
            "result degree {d} exceeds --max-degree {cap}"
        ))),
        _ => Ok(()),
    }
}

fn polynomial_context(cli: &Cli) -> Result<Context, UsageError> {
    if cli.delta.is_some() {
        return Err(UsageError(
            "the polynomial algebra fixes δ = l; --delta applies only to `tangle eval` and `spectral`"
                .into(),
        ));
    }
    if cli.letters == 0 {
        return Err(UsageError("at least one letter is required".into()));
    }
    Ok(Context::new(cli.letters))
}

fn scalar_out(x: &grstar_core::scalars::FieldScalar, format: Format) -> String {
    match format {
        Format::Json => {
            let j = FieldScalarJson::from_scalar(x);
            serde_json::to_string(&json!({
                "value": j,
                "display": x.to_string(),
                "float": x.to_f64(),
            }))
            .expect("serializable")
        }
        Format::Csv => {
            let c = x.coeffs();
            format!("q,sqrt_delta,sqrt_d2m1,sqrt_prod\n{},{},{},{}", c[0], c[1], c[2], c[3])
        }
    }
}

fn element_out(e: &grstar_core::ncpoly::GrElement, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(&GrElementJson::from_element(e)).expect("serializable"),
        Format::Csv => {
            let mut out = String::from("word,q,sqrt_delta,sqrt_d2m1,sqrt_prod");
            for (w, c) in e.terms() {
                let word = w
                    .letters()
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                let cs = c.coeffs();
                out.push_str(&format!(
                    "\n{},{},{},{},{}",
                    csv_field(&word),
                    cs[0],
                    cs[1],
                    cs[2],
                    cs[3]
                ));
            }
            out
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    match &cli.cmd {
        Cmd::Eval { expr: src } => {
            let ctx = polynomial_context(&cli)?;
            let ast = expr::parse(src, cli.letters)?;
            let v = expr::eval(&ast, &ctx)?;
            degree_guard(&v, cli.max_degree)?;
            println!("{}", element_out(&v, cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Trace { expr: src } => {
            let ctx = polynomial_context(&cli)?;
            let ast = expr::parse(src, cli.letters)?;
            let v = expr::eval(&ast, &ctx)?;
            println!("{}", scalar_out(&v.trace(), cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Inner { a, b } => {
            let ctx = polynomial_context(&cli)?;
            let va = expr::eval(&expr::parse(a, cli.letters)?, &ctx)?;
            let vb = expr::eval(&expr::parse(b, cli.letters)?, &ctx)?;
            degree_guard(&va, cli.max_degree)?;
            degree_guard(&vb, cli.max_degree)?;
            println!("{}", scalar_out(&va.inner(&vb), cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Moments { letter, upto } => {
            let ctx = polynomial_context(&cli)?;
            let x = grstar_core::ncpoly::GrElement::letter(&ctx, *letter)
                .map_err(|e| UsageError(e.to_string()))?;
            let mut rows = Vec::new();
            let mut power = grstar_core::ncpoly::GrElement::one(&ctx);
            let mut all_match = true;
            for n in 0..=*upto {
                let tr = power.trace();
                let expect = if n % 2 == 0 {
                    Rational::from_integer(catalan(n / 2))
                } else {
                    Rational::from_integer(0.into())
                };
                let matches = tr.as_rational() == Some(&expect);
                all_match &= matches;
                rows.push((n, tr.to_string(), expect.to_string(), matches));
                power = power.star(&x);
            }
            match cli.format {
                Format::Json => {
                    let body: Vec<_> = rows
                        .iter()
                        .map(|(n, tr, cat, m)| json!({"n": n, "trace": tr, "catalan": cat, "matches": m}))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string(&json!({"letter": letter, "rows": body, "all_match": all_match}))
                            .expect("serializable")
                    );
                }
                Format::Csv => {
                    println!("n,trace,catalan,matches");
                    for (n, tr, cat, m) in &rows {
                        println!("{n},{},{},{m}", csv_field(tr), csv_field(cat));
                    }
                }
            }
            Ok(if all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Gram { basis, degree_cap } => {
            if basis != "eb" {
                return Err(UsageError(format!("unknown basis '{basis}' (only 'eb')")));
            }
            if cli.letters < 2 {
                return Err(UsageError("cup-subalgebra commands need l >= 2".into()));
            }
            let ctx = polynomial_context(&cli)?;
            let b = grstar_core::ncpoly::GrElement::letter(&ctx, 1)
                .map_err(|e| UsageError(e.to_string()))?;
            let fam = grstar_core::cupalg::EbFamily::new(&b)?;
            let normalized: Vec<_> = fam
                .basis(*degree_cap)
                .iter()
                .map(|v| fam.normalized(v.kind))
                .collect();
            let g = grstar_core::cupalg::gram(&normalized);
            let identity = g.is_identity();
            match cli.format {
                Format::Json => {
                    let entries: Vec<Vec<String>> = (0..g.rows())
                        .map(|i| (0..g.cols()).map(|j| g.at(i, j).to_string()).collect())
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string(&json!({
                            "basis": "eb",
                            "degree_cap": degree_cap,
                            "size": g.rows(),
                            "is_identity": identity,
                            "entries": entries,
                        }))
                        .expect("serializable")
                    );
                }
                Format::Csv => {
                    println!("i,j,entry");
                    for i in 0..g.rows() {
                        for j in 0..g.cols() {
                            println!("{i},{j},{}", csv_field(&g.at(i, j).to_string()));
                        }
                    }
                }
            }
            Ok(if identity {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Spectral => {
            let delta = match &cli.delta {
                Some(s) => parse_rational(s)?,
                None => Rational::from_integer(cli.letters.into()),
            };
            let ts: Vec<Rational> = if cli.t.is_empty() {
                ["-2", "-1", "0", "1", "2"]
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_, _>>()?
            } else {
                cli.t.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?
            };
            let ns = if cli.truncation.is_empty() {
                vec![250, 500, 1000, 2000]
            } else {
                cli.truncation.clone()
            };
            let zgrid = default_zgrid(6.0, 100);
            let mut rows = Vec::new();
            for t in &ts {
                let margin = no_outlier_check(t, &delta, &zgrid)?.min_margin;
                for &n in &ns {
                    let j = JacobiMatrix::ct(t, &delta, n)?;
                    let m = spectral_measure(&j)?;
                    rows.push(json!({
                        "t": t.to_string(),
                        "delta": delta.to_string(),
                        "n": n,
                        "min_eig": m.min_eig(),
                        "max_eig": m.max_eig(),
                        "max_atom_weight": m.max_weight(),
                        "moment_err": m.moment_error(&j, 12),
                        "h_margin": margin,
                    }));
                }
            }
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&rows).expect("serializable")),
                Format::Csv => {
                    println!("t,delta,n,min_eig,max_eig,max_atom_weight,moment_err,h_margin");
                    for r in rows {
                        println!(
                            "{},{},{},{},{},{},{},{}",
                            csv_field(r["t"].as_str().expect("string")),
                            csv_field(r["delta"].as_str().expect("string")),
                            r["n"],
                            r["min_eig"],
                            r["max_eig"],
                            r["max_atom_weight"],
                            r["moment_err"],
                            r["h_margin"]
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Poly { family, degree } => {
            match family.as_str() {
                "chebyshev" => {
                    let p = grstar_core::spectral::chebyshev_p(*degree);
                    let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                    println!(
                        "{}",
                        serde_json::to_string(&json!({"family": "chebyshev", "degree": degree, "coeffs": coeffs}))
                            .expect("serializable")
                    );
                }
                "s" => {
                    let delta = match &cli.delta {
                        Some(s) => parse_rational(s)?,
                        None => Rational::from_integer(cli.letters.into()),
                    };
                    let t = match cli.t.as_slice() {
                        [] => Rational::from_integer(0.into()),
                        [one] => parse_rational(one)?,
                        _ => return Err(UsageError("poly --family s takes a single --t".into())),
                    };
                    let sc = DeltaContext::new(delta.clone())?;
                    let p = grstar_core::spectral::s_poly(&sc, &t, *degree);
                    let coeffs: Vec<FieldScalarJson> =
                        p.coeffs().iter().map(FieldScalarJson::from_scalar).collect();
                    println!(
                        "{}",
                        serde_json::to_string(&json!({
                            "family": "s",
                            "degree": degree,
                            "t": t.to_string(),
                            "delta": delta.to_string(),
                            "coeffs": coeffs,
                        }))
                        .expect("serializable")
                    );
                }
                other => return Err(UsageError(format!("unknown polynomial family '{other}'"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Tangle { cmd: TangleCmd::Eval { file } } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", file.display())))?;
            let job: TangleJobJson =
                serde_json::from_str(&text).map_err(|e| UsageError(format!("bad job file: {e}")))?;
            let t = job.tangle.to_tangle();
            // Context comes from the inputs when present, else from the CLI
            // flags (δ may be overridden here).
            let ctx = if let Some(first) = job.inputs.first() {
                let ctx = first.context()?;
                for other in &job.inputs[1..] {
                    if other.l != first.l || other.delta != first.delta {
                        return Err(UsageError("tangle inputs disagree on (l, delta)".into()));
                    }
                }
                ctx
            } else {
                let delta = match &cli.delta {
                    Some(s) => parse_rational(s)?,
                    None => Rational::from_integer(cli.letters.into()),
                };
                Context::with_delta(cli.letters, DeltaContext::new(delta)?)
            };
            let inputs: Vec<_> = job
                .inputs
                .iter()
                .map(|j| j.to_element())
                .collect::<Result<_, _>>()?;
            let v = evaluate(&t, &inputs, &ctx)?;
            println!("{}", element_out(&v, cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Tower { k, cmd } => {
            if cli.letters < 2 {
                return Err(UsageError("tower commands need l >= 2".into()));
            }
            let ctx = polynomial_context(&cli)?;
            match cmd {
                TowerCmd::Wedge { a, b } => {
                    let va = expr::eval(&expr::parse(a, cli.letters)?, &ctx)?;
                    let vb = expr::eval(&expr::parse(b, cli.letters)?, &ctx)?;
                    degree_guard(&va, cli.max_degree)?;
                    degree_guard(&vb, cli.max_degree)?;
                    let ta = TowerElement::new(*k, va)?;
                    let tb = TowerElement::new(*k, vb)?;
                    let prod = wedge_k(&ta, &tb)?;
                    let tr = tower_trace(&prod);
                    match cli.format {
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string(&json!({
                                "k": k,
                                "product": GrElementJson::from_element(prod.element()),
                                "trace": FieldScalarJson::from_scalar(&tr),
                            }))
                            .expect("serializable")
                        ),
                        Format::Csv => println!("{}", element_out(prod.element(), Format::Csv)),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                TowerCmd::Check { degree_cap } => {
                    let r = relative_commutant_check(&ctx, *k, *degree_cap)?;
                    let row = CheckJson::new(
                        "relative-commutant-table",
                        json!({"k": k, "degree_cap": degree_cap}),
                        r.pass,
                        r.witness,
                    );
                    let pass = row.pass;
                    emit_checks(&[row], cli.format);
                    Ok(if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
            }
        }
        Cmd::Verify { suite } => {
            let started = std::time::Instant::now();
            let checks = verify::run_suites(suite, cli.seed)?;
            emit_checks(&checks, cli.format);
            let failed = checks.iter().filter(|c| !c.pass).count();
            eprintln!(
                "{}: {} checks, {} failed ({:.1}s)",
                if failed == 0 { "PASS" } else { "FAIL" },
                checks.len(),
                failed,
                started.elapsed().as_secs_f64()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn emit_checks(checks: &[CheckJson], format: Format) {
    match format {
        Format::Json => {
            for c in checks {
                println!("{}", serde_json::to_string(c).expect("serializable"));
            }
        }
        Format::Csv => {
            println!("check,parameters,pass,witness");
            for c in checks {
                println!(
                    "{},{},{},{}",
                    csv_field(&c.check),
                    csv_field(&c.parameters.to_string()),
                    c.pass,
                    csv_field(c.witness.as_deref().unwrap_or(""))
                );
            }
        }
    }
}
