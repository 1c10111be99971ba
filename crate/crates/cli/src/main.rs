use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use kzassoc::cbh::cbh_map;
use kzassoc::holonomy::{
    kz_associator_extrapolated, log_holonomy_cbh, ode_transport, ConnectionPath, KzSchedule,
    SimplexIntegrator,
};
use kzassoc::lemurakami::{log_phi_symbolic, phi_symbolic, AdmissibleSeq, MzvSymbol};
use kzassoc::mzv::{mzv_quadrature, mzv_series, omega, word_to_composition};
use kzassoc::serial::{LieDoc, NumericDoc, NumericLieDoc, SymbolicDoc, SymbolicLieDoc};
use kzassoc::verify::{
    phi_from_symbols, piecewise_oracle, run_suite, CheckRecord, Status, VerificationReport,
    VerifyConfig,
};
use kzassoc::{Coefficient, Error, LieElement, Series, Word, Q};

const MAX_DEGREE: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "kzassoc",
    version,
    about = "Free Lie algebras, the CBH map and the KZ associator"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Truncation degree N (at most 8).
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Alphabet size for word inputs and randomized suites.
    #[arg(long, global = true)]
    alphabet: Option<usize>,
    /// Tolerance for numeric MZV evaluation.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// First regularization point; the second is half of it.
    #[arg(long, global = true, default_value_t = 1e-3)]
    eps: f64,
    /// Fixed RK4 step count.
    #[arg(long, global = true, default_value_t = 20_000)]
    steps: usize,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Exact symbols or evaluated floats.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Symbolic)]
    mode: Mode,
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Render a table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Symbolic,
    Numeric,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The associator and its logarithm.
    #[command(subcommand)]
    Phi(PhiCommand),
    /// cbh of a single word, in Lyndon coordinates.
    Cbh {
        /// Letters, e.g. `0,1,0` or `010`.
        #[arg(long)]
        word: String,
    },
    /// An iterated integral by quadrature and by its MZV series.
    Mzv {
        /// Bits, e.g. `1,0,0`.
        #[arg(long)]
        word: String,
    },
    /// Holonomy of a path connection.
    #[command(subcommand)]
    Holonomy(HolonomyCommand),
    /// Run a verification suite.
    Verify {
        /// prop1, pn-cbh, grouplike, mzv-cross, lm-vs-ode, corollary,
        /// lemma-holonomy, witt or all.
        suite: String,
    },
}

#[derive(Subcommand, Debug)]
enum PhiCommand {
    /// Φ up to the truncation degree.
    Expand,
    /// log Φ in Lyndon coordinates.
    Log,
}

#[derive(Subcommand, Debug)]
enum HolonomyCommand {
    /// Compare the CBH integral for log H with other constructions.
    Compare {
        #[arg(long, value_enum)]
        case: Case,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    Constant,
    Piecewise,
    Polynomial,
    Kz,
}

impl Case {
    fn name(self) -> &'static str {
        match self {
            Case::Constant => "constant",
            Case::Piecewise => "piecewise",
            Case::Polynomial => "polynomial",
            Case::Kz => "kz",
        }
    }
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Structural(_) | Error::Format(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// A rendered document and whether all of its checks passed.
struct Output {
    json: Value,
    table: String,
    status: Status,
}

impl Output {
    fn plain(json: Value, table: String) -> Self {
        Output {
            json,
            table,
            status: Status::Pass,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.common.pretty {
                out.table
            } else {
                let mut s = serde_json::to_string(&out.json).expect("serializable document");
                s.push('\n');
                s
            };
            if let Err(e) = emit(&cli.common, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match out.status {
                Status::Pass => ExitCode::SUCCESS,
                Status::Fail => ExitCode::from(1),
                Status::Error => ExitCode::from(3),
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn emit(common: &Common, text: &str) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(common: &Common) -> Result<(), Failure> {
    if let Some(n) = common.degree {
        if n > MAX_DEGREE {
            return Err(Failure::Usage(format!(
                "--degree {n} exceeds the maximum {MAX_DEGREE}"
            )));
        }
    }
    if let Some(a) = common.alphabet {
        if !(1..=16).contains(&a) {
            return Err(Failure::Usage(format!("--alphabet {a} must lie in 1..=16")));
        }
    }
    if !(common.tol > 0.0) {
        return Err(Failure::Usage(format!(
            "--tol must be positive, got {}",
            common.tol
        )));
    }
    if !(common.eps > 0.0 && common.eps < 0.5) {
        return Err(Failure::Usage(format!(
            "--eps must lie in (0, 1/2), got {}",
            common.eps
        )));
    }
    if common.steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    Ok(())
}

fn config_echo(command: &str, common: &Common, degree: Option<usize>) -> Value {
    json!({
        "command": command,
        "degree": degree,
        "alphabet": common.alphabet,
        "tolerance": common.tol,
        "eps": [common.eps, common.eps / 2.0],
        "steps": common.steps,
        "seed": common.seed,
        "mode": common.mode,
        "out": common.out.as_ref().map(|p| p.display().to_string()),
    })
}

fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({ "command": command, "config": config, "result": result })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let common = &cli.common;
    validate(common)?;
    match &cli.command {
        Command::Phi(PhiCommand::Expand) => phi_expand(common),
        Command::Phi(PhiCommand::Log) => phi_log(common),
        Command::Cbh { word } => cbh(common, word),
        Command::Mzv { word } => mzv(common, word),
        Command::Holonomy(HolonomyCommand::Compare { case }) => compare(common, *case),
        Command::Verify { suite } => verify(common, suite),
    }
}

fn mzv_eval(tol: f64) -> impl Fn(&MzvSymbol) -> kzassoc::Result<f64> {
    move |s| omega(s, tol)
}

fn series_table<C: Coefficient + std::fmt::Display>(
    rows: impl Iterator<Item = (Word, C)>,
) -> String {
    let mut t = String::new();
    for (w, c) in rows {
        let _ = writeln!(t, "{:<24} {}", w.to_string(), c);
    }
    if t.is_empty() {
        t.push_str("0\n");
    }
    t
}

fn phi_expand(common: &Common) -> Result<Output, Failure> {
    let degree = common.degree.unwrap_or(4);
    let config = config_echo("phi expand", common, Some(degree));
    let phi = phi_symbolic(degree);
    match common.mode {
        Mode::Symbolic => {
            let mut table = String::new();
            let _ = writeln!(table, "{:<24} 1", "1");
            for (w, m) in phi.terms() {
                let parts: Vec<String> = m.iter().map(|(s, c)| format!("{c}·{s}")).collect();
                let _ = writeln!(table, "{:<24} {}", w.to_string(), parts.join(" + "));
            }
            let doc = serde_json::to_value(SymbolicDoc::from_symbolic(&phi)).expect("document");
            Ok(Output::plain(envelope("phi expand", config, doc), table))
        }
        Mode::Numeric => {
            let x = phi.evaluate(mzv_eval(common.tol))?;
            let table = series_table(x.terms().map(|(w, c)| (w.clone(), *c)));
            let doc =
                serde_json::to_value(NumericDoc::from_series(&x, common.tol)).expect("document");
            Ok(Output::plain(envelope("phi expand", config, doc), table))
        }
    }
}

fn lie_table<C: Coefficient + std::fmt::Display>(x: &LieElement<C>) -> String {
    let mut rows: Vec<_> = x.coords().collect();
    rows.sort_by(|a, b| a.0.word().cmp(b.0.word()));
    let mut t = String::new();
    for (l, c) in rows {
        let _ = writeln!(t, "{:<24} {}", l.to_string(), c);
    }
    if t.is_empty() {
        t.push_str("0\n");
    }
    t
}

fn phi_log(common: &Common) -> Result<Output, Failure> {
    let degree = common.degree.unwrap_or(4);
    let config = config_echo("phi log", common, Some(degree));
    let log = log_phi_symbolic(degree);
    match common.mode {
        Mode::Symbolic => {
            let mut rows: Vec<_> = log.terms().collect();
            rows.sort_by(|a, b| a.0.word().cmp(b.0.word()));
            let mut table = String::new();
            for (l, m) in rows {
                let parts: Vec<String> = m.iter().map(|(s, c)| format!("{c}·{s}")).collect();
                let _ = writeln!(table, "{:<24} {}", l.to_string(), parts.join(" + "));
            }
            if table.is_empty() {
                table.push_str("0\n");
            }
            let doc = serde_json::to_value(SymbolicLieDoc::from_symbolic(&log)).expect("document");
            Ok(Output::plain(envelope("phi log", config, doc), table))
        }
        Mode::Numeric => {
            let x = log.evaluate(mzv_eval(common.tol))?;
            let doc =
                serde_json::to_value(NumericLieDoc::from_lie(&x, common.tol)).expect("document");
            Ok(Output::plain(
                envelope("phi log", config, doc),
                lie_table(&x),
            ))
        }
    }
}

fn parse_letters(text: &str) -> Result<Vec<u8>, Failure> {
    let parts: Vec<&str> = if text.contains(',') {
        text.split(',').map(str::trim).collect()
    } else {
        text.trim().split("").filter(|s| !s.is_empty()).collect()
    };
    parts
        .iter()
        .map(|p| {
            p.parse::<u8>()
                .map_err(|_| Failure::Usage(format!("cannot read letter {p:?} in {text:?}")))
        })
        .collect()
}

fn cbh(common: &Common, word: &str) -> Result<Output, Failure> {
    let letters = parse_letters(word)?;
    if letters.is_empty() {
        return Err(Failure::Usage("--word needs at least one letter".into()));
    }
    let w = Word::new(letters);
    let alphabet = common.alphabet.unwrap_or(2).max(w.min_alphabet());
    if alphabet > 16 || w.len() > 16 {
        return Err(Failure::Usage(
            "words are limited to 16 letters from an alphabet of 16".into(),
        ));
    }
    let degree = common.degree.unwrap_or(w.len()).max(w.len());
    let x = Series::monomial(alphabet, degree, w.clone(), Q::from_integer(1.into()));
    let lie = cbh_map(&x);
    let mut config = config_echo("cbh", common, Some(degree));
    config["alphabet"] = json!(alphabet);
    config["word"] = json!(w.letters());
    let doc = serde_json::to_value(LieDoc::from_lie(&lie)).expect("document");
    Ok(Output::plain(envelope("cbh", config, doc), lie_table(&lie)))
}

fn mzv(common: &Common, word: &str) -> Result<Output, Failure> {
    let a = AdmissibleSeq::parse(word).map_err(|e| Failure::Usage(e.to_string()))?;
    let (composition, sign) = word_to_composition(&a);
    let quad = mzv_quadrature(&a, common.tol)?;
    let series = mzv_series(&composition, common.tol)?;
    let signed = sign as f64 * series.value;
    let difference = (quad.value - signed).abs();
    let config = config_echo("mzv", common, None);
    let result = json!({
        "word": a.to_string(),
        "composition": composition.parts(),
        "sign": sign,
        "quadrature": quad,
        "series": series,
        "signed_series": signed,
        "difference": difference,
    });
    let mut table = String::new();
    let _ = writeln!(
        table,
        "ω({a}) = {}{composition}",
        if sign < 0 { "-" } else { "" }
    );
    let _ = writeln!(
        table,
        "quadrature  {:+.15}  ± {:.1e}",
        quad.value, quad.error_bound
    );
    let _ = writeln!(
        table,
        "series      {signed:+.15}  ± {:.1e}",
        series.error_bound
    );
    let _ = writeln!(table, "difference  {difference:.1e}");
    Ok(Output::plain(envelope("mzv", config, result), table))
}

fn checks_table(checks: &[CheckRecord]) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<36} {:<6} {:>10} {:>10}  detail",
        "check", "status", "residual", "threshold"
    );
    for c in checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = writeln!(
            t,
            "{:<36} {:<6} {:>10.2e} {:>10.2e}  {}",
            c.name, status, c.residual, c.threshold, c.detail
        );
    }
    t
}

fn report_output(report: VerificationReport, extra: Option<(&str, Value)>) -> Output {
    let mut table = checks_table(&report.checks);
    let _ = writeln!(
        table,
        "{} passed, {} failed, {} errors",
        report.totals.passed, report.totals.failed, report.totals.errors
    );
    let status = report.status;
    let mut json = serde_json::to_value(&report).expect("serializable report");
    if let Some((key, value)) = extra {
        json[key] = value;
    }
    Output {
        json,
        table,
        status,
    }
}

fn compare(common: &Common, case: Case) -> Result<Output, Failure> {
    let integrator = SimplexIntegrator::default();
    let command = format!("holonomy compare --case {}", case.name());
    let mut checks = Vec::new();
    let result = match case {
        Case::Kz => {
            let degree = common.degree.unwrap_or(3);
            let schedule = KzSchedule {
                eps: common.eps,
                steps: common.steps,
                ..KzSchedule::default()
            };
            let ode = kz_associator_extrapolated(degree, &schedule)?;
            let lm = phi_from_symbols(degree, common.tol)?;
            checks.push(CheckRecord::measured(
                "kz/associator",
                ode.value.max_abs_diff(&lm),
                1e-4,
                format!("extrapolation bound {:.1e}", ode.error_bound),
            ));
            json!({
                "ode": NumericDoc::from_series(&ode.value, ode.error_bound),
                "expansion": NumericDoc::from_series(&lm, common.tol),
            })
        }
        _ => {
            let degree = common.degree.unwrap_or(4);
            let path = match case {
                Case::Constant => ConnectionPath::constant(vec![0.6, -0.4]),
                Case::Piecewise => ConnectionPath::piecewise_constant(
                    vec![0.5],
                    vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                )?,
                _ => ConnectionPath::random_polynomial(2, 3, common.seed),
            };
            let via_cbh = log_holonomy_cbh(&path, 0.0, 1.0, &integrator, degree)?;
            let transport = ode_transport(&path, 0.0, 1.0, common.steps, degree)?;
            let log_ode = LieElement::decompose(&transport.log()?).0;
            let name = case.name();
            checks.push(CheckRecord::measured(
                format!("{name}/cbh-vs-ode"),
                via_cbh.value.max_abs_diff(&log_ode),
                1e-6,
                format!(
                    "{} RK4 steps, quadrature bound {:.1e}",
                    common.steps, via_cbh.error_bound
                ),
            ));
            match case {
                Case::Constant => checks.push(CheckRecord::measured(
                    "constant/generator",
                    via_cbh
                        .value
                        .expand()
                        .max_abs_diff(&path.value(0.0, degree)),
                    1e-10,
                    "log H equals the constant value".into(),
                )),
                Case::Piecewise => {
                    let exact = piecewise_oracle(degree).map_coeffs(f64::from_q);
                    checks.push(CheckRecord::measured(
                        "piecewise/exact",
                        via_cbh.value.max_abs_diff(&exact),
                        1e-8,
                        "log(exp(x_1/2) exp(x_0/2)) in exact arithmetic".into(),
                    ));
                }
                _ => {}
            }
            json!({
                "cbh": NumericLieDoc::from_lie(&via_cbh.value, via_cbh.error_bound),
                "ode": NumericLieDoc::from_lie(&log_ode, 0.0),
            })
        }
    };
    let degree = common.degree.or(Some(if case == Case::Kz { 3 } else { 4 }));
    let report = VerificationReport::new(
        command.clone(),
        config_echo(&command, common, degree),
        checks,
    );
    Ok(report_output(report, Some(("values", result))))
}

fn verify(common: &Common, suite: &str) -> Result<Output, Failure> {
    let cfg = VerifyConfig {
        degree: common.degree,
        alphabet: common.alphabet,
        tol: common.tol,
        eps: common.eps,
        steps: common.steps,
        seed: common.seed,
        ..VerifyConfig::default()
    };
    let checks = run_suite(suite, &cfg)?;
    let command = format!("verify {suite}");
    let mut config = config_echo(&command, common, common.degree);
    config["trials"] = json!(cfg.trials);
    let report = VerificationReport::new(command, config, checks);
    Ok(report_output(report, None))
}
