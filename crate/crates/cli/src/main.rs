mod input;

use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use csm_core::charcls::{self, CharClassError, InputSystem};
use csm_core::chow::ChowClass;
use csm_core::segre::{SegreError, SegreOptions, SegreResult};
use csm_core::zeta::{self, ZetaError};
use serde_json::{json, Value};
use thiserror::Error;

use input::{read_input, InputError};

/// Smallest prime accepted by `--prime`.
const MIN_PRIME: u32 = 10007;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// CSM class of the scheme
    Csm,
    /// Milnor, CSM and virtual classes of a complete intersection
    Milnor,
    /// Segre class of the auxiliary scheme in P^n x P^r
    Segre,
    /// Zeta numerator, gamma and CSM classes in larger ambients
    Zeta,
    /// Euler characteristic
    Euler,
    /// Runs every CSM method and compares the results
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Main,
    InclExcl,
    Calx,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Main => "main",
            MethodArg::InclExcl => "incl-excl",
            MethodArg::Calx => "calx",
        }
    }
}

/// Characteristic classes of projective schemes from their generators.
///
/// The input file starts with a header `n: <int>` naming the ambient P^n,
/// followed by one homogeneous generator per line in x0..xn.
#[derive(Debug, Parser)]
#[command(name = "csm", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    input: String,
    /// Working prime (an odd prime >= 10007)
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs that must agree (at least 2)
    #[arg(long, default_value_t = 2)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Main)]
    method: MethodArg,
    /// Target ambient dimensions for `zeta` (repeatable)
    #[arg(long = "N")]
    targets: Vec<usize>,
    #[arg(long)]
    json: bool,
    /// Replace the generators by this many random combinations (experimental)
    #[arg(long)]
    combos: Option<usize>,
    /// Pad the generators with zeros up to this count
    #[arg(long)]
    target_count: Option<usize>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    CharClass(#[from] CharClassError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("methods disagree: {0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let segre = match self {
            CliError::CharClass(CharClassError::Segre(e)) => Some(e),
            CliError::Zeta(ZetaError::Segre(e)) => Some(e),
            CliError::Zeta(ZetaError::CharClass(CharClassError::Segre(e))) => Some(e),
            CliError::Mismatch(_) => return 2,
            _ => None,
        };
        match segre {
            Some(SegreError::Unstable { .. } | SegreError::DegenerateRandomness { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Default)]
struct Report {
    n: usize,
    r: Option<usize>,
    segre: Option<ChowClass>,
    csm: Option<ChowClass>,
    milnor: Option<ChowClass>,
    cvir: Option<ChowClass>,
    zeta: Option<Value>,
    zeta_text: Vec<String>,
    checks: Vec<(&'static str, ChowClass)>,
    prime: u32,
    method: &'static str,
}

fn coeff_strings(c: &ChowClass) -> Vec<String> {
    c.h_coeffs().iter().map(ToString::to_string).collect()
}

fn term_triples(c: &ChowClass) -> Vec<Value> {
    c.terms().into_iter().map(|(i, j, v)| json!([i, j, v.to_string()])).collect()
}

fn euler(c: &ChowClass) -> String {
    c.coeff(c.ambient().n, 0).to_string()
}

impl Report {
    fn absorb_segre(&mut self, s: &SegreResult) {
        self.segre = Some(s.cls.clone());
        self.prime = s.degrees.prime;
    }

    fn to_json(&self, cli: &Cli) -> Value {
        let mut v = json!({
            "ambient": {"n": self.n, "r": self.r},
            "meta": {"prime": self.prime, "seed": cli.seed, "trials": cli.trials, "method": self.method},
        });
        let obj = v.as_object_mut().expect("object literal");
        if let Some(s) = &self.segre {
            obj.insert("segre".into(), json!(term_triples(s)));
        }
        if let Some(c) = &self.csm {
            obj.insert("csm".into(), json!(coeff_strings(c)));
            obj.insert("euler".into(), json!(euler(c)));
        }
        if let Some(m) = &self.milnor {
            obj.insert("milnor".into(), json!(coeff_strings(m)));
        }
        if let Some(c) = &self.cvir {
            obj.insert("cvir".into(), json!(coeff_strings(c)));
        }
        if let Some(z) = &self.zeta {
            obj.insert("zeta".into(), z.clone());
        }
        if !self.checks.is_empty() {
            let checks: serde_json::Map<String, Value> =
                self.checks.iter().map(|(m, c)| (m.to_string(), json!(coeff_strings(c)))).collect();
            obj.insert("check".into(), Value::Object(checks));
        }
        v
    }

    fn to_text(&self, command: Command) -> String {
        let mut out = Vec::new();
        match self.r {
            Some(r) => out.push(format!("ambient: P^{} x P^{r}", self.n)),
            None => out.push(format!("ambient: P^{}", self.n)),
        }
        if let Some(s) = &self.segre {
            out.push(format!("segre: {s}"));
        }
        if command == Command::Euler {
            if let Some(c) = &self.csm {
                out.push(format!("euler: {}", euler(c)));
            }
            return out.join("\n");
        }
        if let Some(m) = &self.milnor {
            out.push(format!("milnor: {m}"));
        }
        if let Some(c) = &self.cvir {
            out.push(format!("cvir: {c}"));
        }
        for (m, c) in &self.checks {
            out.push(format!("csm[{m}]: {c}"));
        }
        if let Some(c) = &self.csm {
            out.push(format!("csm: {c}"));
            out.push(format!("euler: {}", euler(c)));
        }
        out.extend(self.zeta_text.iter().cloned());
        out.join("\n")
    }
}

fn validate(cli: &Cli) -> Result<SegreOptions, CliError> {
    let mut opts = SegreOptions { seed: cli.seed, trials: cli.trials, ..SegreOptions::default() };
    if cli.trials < 2 {
        return Err(CliError::Usage("--trials must be at least 2".into()));
    }
    if let Some(p) = cli.prime {
        if p < MIN_PRIME || p % 2 == 0 || !is_prime(p) {
            return Err(CliError::Usage(format!("--prime must be an odd prime >= {MIN_PRIME}, got {p}")));
        }
        opts.prime = p;
    }
    Ok(opts)
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p as u64).all(|d| p as u64 % d != 0)
}

fn system(cli: &Cli, n: usize, gens: &[csm_core::poly::MultiPoly], target: Option<usize>) -> Result<InputSystem, CliError> {
    let sys = charcls::normalize_input(n, gens, target)?;
    match cli.combos {
        Some(k) => Ok(charcls::recombine(&sys, k.max(sys.n + 1), cli.seed ^ 0xc0b0)?),
        None => Ok(sys),
    }
}

fn csm_by(method: MethodArg, sys: &InputSystem, raw: &[csm_core::poly::MultiPoly], opts: &SegreOptions, report: &mut Report) -> Result<ChowClass, CliError> {
    Ok(match method {
        MethodArg::Main => {
            let rep = charcls::csm_main(sys, opts)?;
            report.r = Some(rep.r);
            if let Some(s) = &rep.segre {
                report.absorb_segre(s);
            }
            rep.csm
        }
        MethodArg::InclExcl => charcls::csm_inclusion_exclusion(raw, sys.n, opts)?,
        MethodArg::Calx => {
            report.r = Some(sys.r());
            charcls::csm_via_calx(sys, opts)?
        }
    })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = validate(cli)?;
    let file = read_input(&cli.input)?;
    let n = file.n;
    let mut report = Report { n, prime: opts.prime, method: cli.method.name(), ..Report::default() };
    match cli.command {
        Command::Csm | Command::Euler => {
            let sys = system(cli, n, &file.gens, cli.target_count)?;
            report.csm = Some(csm_by(cli.method, &sys, &file.gens, &opts, &mut report)?);
        }
        Command::Milnor => {
            let sys = system(cli, n, &file.gens, Some(cli.target_count.unwrap_or(file.gens.len())))?;
            let rep = charcls::milnor_ci(&sys, &opts)?;
            report.r = Some(rep.r);
            if let Some(s) = &rep.segre {
                report.absorb_segre(s);
            }
            report.csm = Some(rep.csm);
            report.milnor = rep.milnor;
            report.cvir = rep.cvir;
        }
        Command::Segre => {
            let sys = system(cli, n, &file.gens, cli.target_count)?;
            let ys = charcls::build_y_ideal(&sys)?;
            let ambient = csm_core::chow::Ambient::product(n, sys.r());
            let s = csm_core::segre::segre_class(&ys, ambient, &opts).map_err(CharClassError::from)?;
            report.r = Some(sys.r());
            report.absorb_segre(&s);
        }
        Command::Zeta => {
            let sys = system(cli, n, &file.gens, Some(cli.target_count.unwrap_or(file.gens.len())))?;
            let z = zeta::zeta_numerator(&sys, &opts)?;
            if let Some(s) = &z.segre {
                report.prime = s.degrees.prime;
            }
            report.r = Some(sys.r());
            report.method = "zeta";
            let p = z.standard();
            let q = zeta::involution_q(&z);
            let gamma = zeta::gamma_from_numerator(&z);
            let targets = if cli.targets.is_empty() { vec![n] } else { cli.targets.clone() };
            let mut per_n = Vec::new();
            report.zeta_text.push(format!("P: {}", p.render("t", "u")));
            report.zeta_text.push(format!("Q: {}", q.render("t", "u")));
            report.zeta_text.push(format!("gamma: {gamma}"));
            for &t in &targets {
                let c = zeta::csm_all_n(&gamma, t)?;
                report.zeta_text.push(format!("csm[N={t}]: {c}"));
                report.zeta_text.push(format!("euler[N={t}]: {}", euler(&c)));
                per_n.push(json!({"N": t, "csm": coeff_strings(&c), "euler": euler(&c)}));
            }
            report.zeta = Some(json!({
                "P": term_triples(&p),
                "Q": term_triples(&q),
                "gamma": gamma.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "targets": per_n,
            }));
        }
        Command::Check => {
            let sys = system(cli, n, &file.gens, cli.target_count)?;
            report.method = "check";
            for m in [MethodArg::Main, MethodArg::InclExcl, MethodArg::Calx] {
                let c = csm_by(m, &sys, &file.gens, &opts, &mut report)?;
                report.checks.push((m.name(), c));
            }
            let (first, rest) = report.checks.split_first().expect("three methods");
            let bad: Vec<&str> = rest.iter().filter(|(_, c)| *c != first.1).map(|(m, _)| *m).collect();
            if !bad.is_empty() {
                eprintln!("{}", report.to_text(cli.command));
                return Err(CliError::Mismatch(format!("{} differs from {}", bad.join(", "), first.0)));
            }
            report.csm = Some(first.1.clone());
        }
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json(&cli)).expect("serializable"));
            } else {
                println!("{}", report.to_text(cli.command));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
