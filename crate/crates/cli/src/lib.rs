//! Command line front end for `pisigma-core`.
//!
//! Every verb prints a human-readable result and emits a JSON certificate
//! whose identities all passed the evaluation oracle. Exit codes:
//! 0 success, 1 usage, 2 parse error, 3 outside the supported class,
//! 4 oracle failure, 5 nothing found (no telescoper or recurrence).

pub mod cert;
pub mod parse;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pisigma_core::expr::SumExpr;
use pisigma_core::frontend::{creative_telescoping, find_relations, simplify, telescope, Frontend, FrontendError, Mode};
use pisigma_core::oracle::{parse_assignment, verify_identity, ParamAssignment, Side};
use pisigma_core::reduction::Options;
use pisigma_core::Rat;

use cert::{oracle_record, tower_record, Certificate, DepthRecord, Flags, IdentityRecord, RecurrenceRecord, TelescoperRecord};
use parse::{parse_equation, parse_expr, ParseError};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SCOPE: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;
pub const EXIT_NOT_FOUND: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "pisigma", version, about = "Depth-optimal symbolic summation with oracle-checked certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find g with g(k+1) - g(k) = f(k) for sum(k, a, b, f) and print the sum as g(b+1) - g(a).
    Telescope {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Creative telescoping: a recurrence in a parameter for a definite sum.
    Csum {
        expr: String,
        /// The recurrence variable; it must occur in the upper bound.
        #[arg(long)]
        param: Option<String>,
        /// Largest recurrence order tried.
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Rewrite an expression with minimal nesting depth.
    Simplify {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Algebraic relations among sums, registered left to right.
    Relations {
        /// Sums, as separate arguments or separated by ';'.
        #[arg(required = true)]
        exprs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Check `lhs = rhs` with the evaluation oracle only.
    Verify {
        equation: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    Refined,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = ModeArg::Refined)]
    pub mode: ModeArg,
    /// Outer variable; guessed from the upper bounds when omitted.
    #[arg(long)]
    pub var: Option<String>,
    /// Verification range `a..b`, both ends included.
    #[arg(long, default_value = "1..30")]
    pub range: String,
    /// Parameter assignment `m=2,x=1/2`; repeat or separate with ';' for several.
    #[arg(long = "params", short = 'p')]
    pub params: Vec<String>,
    /// Exponent limit in the product criterion.
    #[arg(long, env = "PISIGMA_M_MAX", default_value_t = 12)]
    pub m_max: u32,
    /// Write the certificate here instead of printing it as the last line.
    #[arg(long, short = 'o')]
    pub output: Option<std::path::PathBuf>,
    /// Print only the certificate, pretty-printed.
    #[arg(long)]
    pub json: bool,
    /// Disable the closed-form shortcuts in the coefficient solver.
    #[arg(long)]
    pub no_shortcuts: bool,
    /// Search two degrees past every degree bound.
    #[arg(long)]
    pub safe_bounds: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Scope(String),
    Oracle(String),
    NotFound(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Scope(_) => EXIT_SCOPE,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Scope(m) | CliError::Oracle(m) | CliError::NotFound(m) => m,
        }
    }
}

impl From<FrontendError> for CliError {
    fn from(e: FrontendError) -> Self {
        CliError::Scope(e.to_string())
    }
}

/// What a successful verb produced.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub cert: Certificate,
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand if e.use_stderr() => RunOutput { code: EXIT_USAGE, stdout: String::new(), stderr: e.to_string() },
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput { code: 0, stdout: e.to_string(), stderr: String::new() },
                _ => RunOutput { code: EXIT_USAGE, stdout: String::new(), stderr: e.to_string() },
            };
        }
    };
    let common = common_of(&cli.command).clone();
    match execute(&cli.command) {
        Ok(out) => emit(out, &common),
        Err(e) => RunOutput { code: e.code(), stdout: String::new(), stderr: format!("error: {}\n", e.message()) },
    }
}

fn common_of(c: &Command) -> &Common {
    match c {
        Command::Telescope { common, .. } | Command::Csum { common, .. } | Command::Simplify { common, .. } | Command::Relations { common, .. } | Command::Verify { common, .. } => common,
    }
}

fn emit(out: Outcome, common: &Common) -> RunOutput {
    let pretty = serde_json::to_string_pretty(&out.cert).expect("certificate serializes");
    let mut stdout = String::new();
    if common.json {
        stdout.push_str(&pretty);
        stdout.push('\n');
    } else {
        stdout.push_str(&out.text);
    }
    if let Some(path) = &common.output {
        if let Err(e) = std::fs::write(path, format!("{}\n", pretty)) {
            return RunOutput { code: EXIT_USAGE, stdout, stderr: format!("error: cannot write {}: {}\n", path.display(), e) };
        }
    } else if !common.json {
        stdout.push_str(&serde_json::to_string(&out.cert).expect("certificate serializes"));
        stdout.push('\n');
    }
    RunOutput { code: 0, stdout, stderr: String::new() }
}

/// Settings shared by the verbs.
pub struct Settings {
    pub mode: Mode,
    pub var: Option<String>,
    pub range: (i64, i64),
    pub assignments: Vec<ParamAssignment>,
    pub opts: Options,
}

impl Settings {
    pub fn from_common(c: &Common) -> Result<Settings, CliError> {
        let range = parse_range(&c.range)?;
        let mut assignments = Vec::new();
        for p in &c.params {
            for part in p.split(';').filter(|s| !s.trim().is_empty()) {
                let a = parse_assignment(part.trim()).ok_or_else(|| CliError::Usage(format!("bad parameter assignment '{}', expected e.g. m=2,x=1/2", part)))?;
                assignments.push(a);
            }
        }
        let opts = Options { slack: if c.safe_bounds { 2 } else { 0 }, shortcuts: !c.no_shortcuts, m_max: c.m_max };
        let mode = match c.mode {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Refined => Mode::Refined,
        };
        Ok(Settings { mode, var: c.var.clone(), range, assignments, opts })
    }

    fn flags(&self, max_order: Option<usize>) -> Flags {
        Flags { m_max: self.opts.m_max, shortcuts: self.opts.shortcuts, degree_slack: self.opts.slack as u32, max_order }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Naive => "naive",
            Mode::Refined => "refined",
        }
    }

    /// The given assignments restricted to `params`, or defaults: one with
    /// small integers and one with non-integer rationals.
    fn assignments_for(&self, params: &BTreeSet<String>) -> Vec<ParamAssignment> {
        if !self.assignments.is_empty() {
            return self.assignments.iter().map(|a| a.iter().filter(|(k, _)| params.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()).collect();
        }
        if params.is_empty() {
            return vec![ParamAssignment::new()];
        }
        const INTS: [i64; 6] = [2, 3, 5, 7, 11, 13];
        const FRACS: [(i64, i64); 6] = [(1, 2), (5, 7), (3, 11), (7, 13), (2, 17), (11, 19)];
        let ints = params.iter().enumerate().map(|(i, p)| (p.clone(), Rat::from_integer(INTS[i % 6].into()))).collect();
        let fracs = params.iter().enumerate().map(|(i, p)| (p.clone(), Rat::new(FRACS[i % 6].0.into(), FRACS[i % 6].1.into()))).collect();
        vec![ints, fracs]
    }

    fn check(&self, kind: &str, lhs: Side<'_>, rhs: Side<'_>, var: &str, range: (i64, i64), params: &BTreeSet<String>) -> Result<IdentityRecord, CliError> {
        let asg = self.assignments_for(params);
        let report = verify_identity(lhs.clone(), rhs.clone(), range, &asg);
        let rec = IdentityRecord { kind: kind.into(), lhs: cert::side_text(&lhs), rhs: cert::side_text(&rhs), variable: var.into(), oracle: oracle_record(&report) };
        if let Some(f) = report.first_failure() {
            let asg = &report.assignments[f.assignment];
            let at: Vec<String> = asg.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            let at = if at.is_empty() { String::new() } else { format!(" ({})", at.join(", ")) };
            let detail = match (&f.lhs, &f.rhs, &f.error) {
                (_, _, Some(e)) => e.clone(),
                (Some(l), Some(r), _) => format!("lhs = {}, rhs = {}", l, r),
                _ => "evaluation failed".into(),
            };
            return Err(CliError::Oracle(format!("{} does not hold: counterexample at {} = {}{}: {}\n  {} = {}", kind, var, f.n, at, detail, rec.lhs, rec.rhs)));
        }
        Ok(rec)
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("bad range '{}', expected e.g. 1..30", s));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parsed(input: &str) -> Result<SumExpr, CliError> {
    parse_expr(input).map_err(|e| parse_failure(&e, input))
}

fn parse_failure(e: &ParseError, input: &str) -> CliError {
    CliError::Parse(e.render(input))
}

/// Free symbols of the upper bounds of outermost quantifiers and harmonic
/// arguments.
fn bound_symbols(e: &SumExpr, out: &mut BTreeSet<String>) {
    match e {
        SumExpr::Sum { upper, .. } | SumExpr::Prod { upper, .. } => out.extend(upper.free_symbols()),
        SumExpr::Harmonic { arg, .. } => out.extend(arg.free_symbols()),
        SumExpr::Add(xs) | SumExpr::Mul(xs) => xs.iter().for_each(|x| bound_symbols(x, out)),
        SumExpr::Neg(x) => bound_symbols(x, out),
        SumExpr::Div(a, b) | SumExpr::Pow(a, b) | SumExpr::Binom(a, b) => {
            bound_symbols(a, out);
            bound_symbols(b, out);
        }
        SumExpr::Num(_) | SumExpr::Sym(_) => {}
    }
}

fn outer_var(s: &Settings, es: &[&SumExpr]) -> Result<String, CliError> {
    if let Some(v) = &s.var {
        return Ok(v.clone());
    }
    let mut syms = BTreeSet::new();
    for e in es {
        bound_symbols(e, &mut syms);
    }
    if syms.len() == 1 {
        return Ok(syms.into_iter().next().unwrap());
    }
    let free = parse::symbols(es);
    if free.contains("n") {
        return Ok("n".into());
    }
    if free.len() == 1 {
        return Ok(free.into_iter().next().unwrap());
    }
    Err(CliError::Usage("cannot tell the outer variable; pass --var".into()))
}

fn params_without(es: &[&SumExpr], var: &str) -> BTreeSet<String> {
    let mut p = parse::symbols(es);
    p.remove(var);
    p
}

fn plus(e: &SumExpr, c: i64) -> SumExpr {
    SumExpr::add(vec![e.clone(), SumExpr::num(c)])
}

fn integer_value(fe: &Frontend, e: &SumExpr) -> Result<i64, CliError> {
    let v = fe.constant(e)?;
    v.const_value().filter(|r| r.is_integer()).and_then(|r| i64::try_from(r.to_integer()).ok()).ok_or_else(|| CliError::Scope(format!("{} must be an integer", e)))
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    let s = Settings::from_common(common_of(cmd))?;
    match cmd {
        Command::Telescope { expr, .. } => telescope_cmd(expr, &s),
        Command::Csum { expr, param, max_order, .. } => csum_cmd(expr, param.as_deref(), *max_order, &s),
        Command::Simplify { expr, .. } => simplify_cmd(expr, &s),
        Command::Relations { exprs, .. } => relations_cmd(exprs, &s),
        Command::Verify { equation, .. } => verify_cmd(equation, &s),
    }
}

pub fn telescope_cmd(input: &str, s: &Settings) -> Result<Outcome, CliError> {
    let e = parsed(input)?;
    let SumExpr::Sum { index, lower, upper, body } = &e else {
        return Err(CliError::Scope(format!("telescope expects sum(k, a, b, f), got {}", e)));
    };
    let mut fe = Frontend::for_exprs(index, &[(**body).clone()], s.mode, s.opts.clone());
    let body_params: BTreeSet<String> = fe.tower.params.iter().cloned().collect();
    let lo = integer_value(&fe, lower)?;
    let Some(t) = telescope(&mut fe, body)? else {
        return Err(CliError::NotFound(format!("no telescoper for {} in the tower it lives in (naive mode)", body)));
    };
    let symbolic = fe.tower.sigma(&t.g).sub(&t.g) == t.f;
    let g_expr = fe.to_expr(&t.g);
    // the summand's element is valid from 1 on; earlier terms are added explicitly
    let start = lo.max(1);
    let g_start = fe.elem_value_at(&t.g, start).map_err(|err| CliError::Scope(format!("the telescoper is undefined at {} = {}: {}", index, start, err)))?;
    let mut rhs = vec![g_expr.subst(index, &plus(upper, 1)), SumExpr::neg(fe.ratfunc_expr(&g_start))];
    for j in lo..start {
        rhs.push(body.subst(index, &SumExpr::num(j)));
    }
    let rhs = fe.tidy(&SumExpr::add(rhs));

    let mut syms: BTreeSet<String> = upper.free_symbols();
    syms.retain(|x| !body_params.contains(x));
    let var = match (&s.var, syms.len()) {
        (Some(v), _) => v.clone(),
        (None, 1) => syms.into_iter().next().unwrap(),
        (None, 0) => upper.free_symbols().into_iter().next().unwrap_or_else(|| "n".into()),
        _ => return Err(CliError::Usage("cannot tell the variable of the upper bound; pass --var".into())),
    };
    let params = params_without(&[&e, &rhs], &var);
    let id = s.check("telescoping", Side::Expr(&e, &var), Side::Expr(&rhs, &var), &var, s.range, &params)?;
    let new_generators = fe.completion.new_gens.iter().map(|v| fe.tower.gen(*v).name.clone()).collect();
    let mut cert = Certificate::new("telescope", vec![input.into()], s.mode_name(), s.flags(None));
    cert.telescoper = Some(TelescoperRecord { f: fe.tower.fmt_elem(&t.f), g: fe.tower.fmt_elem(&t.g), g_expr: g_expr.to_string(), depth_f: t.depth_f, depth_g: t.depth_g, symbolic_check: symbolic, new_generators });
    cert.depth = Some(DepthRecord { result: Some(t.depth_g), naive_result: None, profile: fe.depth_profile(), naive_profile: None });
    cert.tower = Some(tower_record(&mut fe));
    cert.identities.push(id);
    let mut text = String::new();
    writeln!(text, "g = {}", g_expr).unwrap();
    writeln!(text, "{} = {}", e, rhs).unwrap();
    writeln!(text, "depth: f {}, g {}", t.depth_f, t.depth_g).unwrap();
    Ok(Outcome { text, cert })
}

pub fn simplify_cmd(input: &str, s: &Settings) -> Result<Outcome, CliError> {
    let e = parsed(input)?;
    let var = outer_var(s, &[&e])?;
    let mut refined = Frontend::for_exprs(&var, &[e.clone()], Mode::Refined, s.opts.clone());
    let mut naive = Frontend::for_exprs(&var, &[e.clone()], Mode::Naive, s.opts.clone());
    let out = simplify(&mut refined, &mut naive, &e)?;
    let params = params_without(&[&e], &var);
    let id = s.check("simplification", Side::Expr(&e, &var), Side::Expr(&out.expr, &var), &var, s.range, &params)?;
    let rep = s.check("representation", Side::Expr(&e, &var), Side::Elem(&out.rep, &refined.tower), &var, s.range, &params)?;
    let mut cert = Certificate::new("simplify", vec![input.into()], "refined", s.flags(None));
    if matches!(e, SumExpr::Sum { .. }) {
        if let Some(reg) = refined.registrations.last().cloned() {
            let g_expr = refined.to_expr(&reg.g);
            cert.telescoper = Some(TelescoperRecord {
                f: refined.tower.fmt_elem(&reg.f),
                g: refined.tower.fmt_elem(&reg.g),
                g_expr: g_expr.to_string(),
                depth_f: refined.tower.depth(&reg.f),
                depth_g: refined.tower.depth(&reg.g),
                symbolic_check: refined.tower.sigma(&reg.g).sub(&reg.g) == reg.f,
                new_generators: reg.new_gens.iter().map(|v| refined.tower.gen(*v).name.clone()).collect(),
            });
        }
    }
    cert.depth = Some(DepthRecord { result: Some(out.depth), naive_result: Some(out.naive_depth), profile: refined.depth_profile(), naive_profile: Some(naive.depth_profile()) });
    cert.tower = Some(tower_record(&mut refined));
    cert.identities.push(id);
    cert.identities.push(rep);
    let mut text = String::new();
    writeln!(text, "{} = {}", e, out.expr).unwrap();
    writeln!(text, "depth: {} (naive {})", out.depth, out.naive_depth).unwrap();
    Ok(Outcome { text, cert })
}

pub fn relations_cmd(inputs: &[String], s: &Settings) -> Result<Outcome, CliError> {
    let mut sums = Vec::new();
    let mut texts = Vec::new();
    for arg in inputs {
        for part in arg.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            sums.push(parsed(part)?);
            texts.push(part.to_string());
        }
    }
    let refs: Vec<&SumExpr> = sums.iter().collect();
    let var = outer_var(s, &refs)?;
    let mut fe = Frontend::for_exprs(&var, &sums, s.mode, s.opts.clone());
    let out = find_relations(&mut fe, &sums)?;
    let params = params_without(&refs, &var);
    let mut cert = Certificate::new("relations", texts, s.mode_name(), s.flags(None));
    let mut text = String::new();
    for (lhs, rhs) in &out.representations {
        cert.identities.push(s.check("representation", Side::Expr(lhs, &var), Side::Expr(rhs, &var), &var, s.range, &params)?);
        writeln!(text, "representation: {} = {}", lhs, rhs).unwrap();
    }
    for r in &out.relations {
        cert.identities.push(s.check("relation", Side::Expr(&r.lhs, &var), Side::Expr(&r.rhs, &var), &var, s.range, &params)?);
        writeln!(text, "relation: {} = {}", r.lhs, r.rhs).unwrap();
    }
    if out.relations.is_empty() {
        writeln!(text, "no relations").unwrap();
    }
    let profile: Vec<String> = out.depth_profile.iter().map(|d| d.to_string()).collect();
    writeln!(text, "depths: {}", profile.join(",")).unwrap();
    cert.depth = Some(DepthRecord { result: None, naive_result: None, profile: out.depth_profile.clone(), naive_profile: None });
    cert.tower = Some(tower_record(&mut fe));
    Ok(Outcome { text, cert })
}

pub fn csum_cmd(input: &str, param: Option<&str>, max_order: usize, s: &Settings) -> Result<Outcome, CliError> {
    let e = parsed(input)?;
    let SumExpr::Sum { index, upper, .. } = &e else {
        return Err(CliError::Scope(format!("csum expects sum(k, a, m + c, f), got {}", e)));
    };
    let param = match param {
        Some(p) => p.to_string(),
        None => {
            let syms = upper.free_symbols();
            if syms.len() != 1 {
                return Err(CliError::Usage("cannot tell the recurrence parameter; pass --param".into()));
            }
            syms.into_iter().next().unwrap()
        }
    };
    let mut params = e.free_symbols();
    params.remove(index);
    if !params.contains(&param) {
        return Err(CliError::Scope(format!("{} does not occur in {}", param, e)));
    }
    let mut fe = Frontend::new(index, params.iter().cloned().collect(), s.mode, s.opts.clone());
    // products in the summand carry the parameter; they sit in the ground field
    fe.ground_products = true;
    fe.tower.k_depth = 0;
    let Some(rec) = creative_telescoping(&mut fe, &e, &param, max_order)? else {
        return Err(CliError::NotFound(format!("no recurrence of order at most {} in {} mode", max_order, s.mode_name())));
    };
    let m = SumExpr::sym(&param);
    let mut lhs = Vec::new();
    let mut shown = Vec::new();
    for (i, c) in rec.coeff_exprs.iter().enumerate().rev() {
        if rec.coeffs[i].is_zero() {
            continue;
        }
        lhs.push(SumExpr::mul(vec![c.clone(), e.subst(&param, &plus(&m, i as i64))]));
        let at = if i == 0 { format!("S({})", param) } else { format!("S({}+{})", param, i) };
        shown.push(SumExpr::mul(vec![c.clone(), SumExpr::sym(&at)]));
    }
    let lhs = SumExpr::add(lhs);
    let shown = SumExpr::add(shown);
    let others: BTreeSet<String> = params.iter().filter(|p| **p != param).cloned().collect();
    let mut cert = Certificate::new("csum", vec![input.into()], s.mode_name(), s.flags(Some(max_order)));
    cert.identities.push(s.check("recurrence", Side::Expr(&lhs, &param), Side::Expr(&rec.rhs, &param), &param, s.range, &others)?);
    let mut text = String::new();
    writeln!(text, "recurrence of order {}: {} = {}", rec.order, shown, rec.rhs).unwrap();
    if let Some(cf) = &rec.closed_form {
        let range = (s.range.0.max(0), s.range.1);
        cert.identities.push(s.check("closed_form", Side::Expr(&e, &param), Side::Expr(cf, &param), &param, range, &others)?);
        writeln!(text, "S({}) = {}", param, cf).unwrap();
    }
    let combo = rec.f.iter().zip(&rec.coeffs).fold(pisigma_core::Elem::zero(), |acc, (f, c)| acc.add(&f.scale(c)));
    let g_expr = fe.to_expr(&rec.g);
    cert.telescoper = Some(TelescoperRecord {
        f: fe.tower.fmt_elem(&combo),
        g: fe.tower.fmt_elem(&rec.g),
        g_expr: g_expr.to_string(),
        depth_f: fe.tower.depth(&combo),
        depth_g: fe.tower.depth(&rec.g),
        symbolic_check: fe.tower.sigma(&rec.g).sub(&rec.g) == combo,
        new_generators: fe.completion.new_gens.iter().map(|v| fe.tower.gen(*v).name.clone()).collect(),
    });
    cert.recurrence = Some(RecurrenceRecord { param: param.clone(), order: rec.order, coefficients: rec.coeff_exprs.iter().map(|c| c.to_string()).collect(), rhs: rec.rhs.to_string(), closed_form: rec.closed_form.as_ref().map(|c| c.to_string()) });
    cert.tower = Some(tower_record(&mut fe));
    Ok(Outcome { text, cert })
}

pub fn verify_cmd(input: &str, s: &Settings) -> Result<Outcome, CliError> {
    let (lhs, rhs) = parse_equation(input).map_err(|e| parse_failure(&e, input))?;
    let var = outer_var(s, &[&lhs, &rhs])?;
    let params = params_without(&[&lhs, &rhs], &var);
    let id = s.check("identity", Side::Expr(&lhs, &var), Side::Expr(&rhs, &var), &var, s.range, &params)?;
    let mut cert = Certificate::new("verify", vec![input.into()], s.mode_name(), s.flags(None));
    let text = format!("{} = {} holds for {} = {}..{} ({} checks)\n", lhs, rhs, var, s.range.0, s.range.1, id.oracle.checked);
    cert.identities.push(id);
    Ok(Outcome { text, cert })
}
