//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

#[path = "../../core/tests/common/properties.rs"]
mod properties;

use std::time::Instant;

use pisigma::cert::Certificate;
use pisigma::parse::parse_expr;
use pisigma::{run, RunOutput, EXIT_NOT_FOUND, EXIT_ORACLE};
use pisigma_core::depth_optimal::{adjoin_pi, adjoin_sigma_delta, AdjoinError};
use pisigma_core::expr::SymPoly;
use pisigma_core::reduction::Options;
use pisigma_core::{Elem, RatFunc, Tower};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const DOUBLE_SUM: &str = "sum(k,1,K, sum(i,1,k, x^(i-1)*binom(m+i-1,m))/(k+m))";

const SEVEN: &str = "S[4,2](N); S[2,4](N); S[2,1,1,1,1](N); S[1,2,1,1,1](N); S[1,1,2,1,1](N); S[1,1,1,2,1](N); S[1,1,1,1,2](N)";

const SEVEN_RELATION: &str = "(2*S[1](N)^6 + 7*S[2](N)*S[1](N)^4 + 4*S[2](N)^2*S[1](N)^2 \
    + 8*S[1,1,1,2](N)*S[1](N) + 8*S[1,1,2,1](N)*S[1](N) + 8*S[1,2,1,1](N)*S[1](N) \
    + 8*S[2,1,1,1](N)*S[1](N) + S[2](N)^3 + 24*S[1,1,1](N)^2 + 8*S[2,4](N) + 8*S[4,2](N) \
    + (-4*S[1](N)^2 - 2*S[2](N))*S[4](N) + (-16*S[1](N)^3 - 24*S[2](N)*S[1](N))*S[1,1,1](N) \
    - 8*S[1,1,1,2,1](N) - 8*S[1,1,2,1,1](N) - 8*S[1,2,1,1,1](N) - 8*S[2,1,1,1,1](N))/8";

type Check = Result<String, String>;

fn pisigma(args: &[&str]) -> RunOutput {
    let mut v = vec!["pisigma"];
    v.extend_from_slice(args);
    run(v)
}

fn certificate(args: &[&str]) -> Result<Certificate, String> {
    let mut v = args.to_vec();
    v.push("--json");
    let out = pisigma(&v);
    if out.code != 0 {
        return Err(format!("exit {}: {}", out.code, out.stderr.trim()));
    }
    serde_json::from_str(&out.stdout).map_err(|e| format!("bad certificate: {}", e))
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn poly(text: &str) -> Result<SymPoly, String> {
    let e = parse_expr(text).map_err(|e| e.to_string())?;
    e.to_sympoly().ok_or_else(|| format!("{} is not polynomial in its sums", text))
}

fn all_oracles_pass(c: &Certificate, range: [i64; 2]) -> Result<(), String> {
    for id in &c.identities {
        ensure(id.oracle.pass, format!("oracle failed for {} = {}", id.lhs, id.rhs))?;
        ensure(id.oracle.range == range, format!("oracle range {:?}", id.oracle.range))?;
    }
    ensure(!c.identities.is_empty(), "no identities certified")
}

fn binomial_double_sum() -> Check {
    let start = Instant::now();
    let c = certificate(&["simplify", DOUBLE_SUM, "-p", "m=2,x=1/2;m=3,x=5/7", "--range", "1..30"])?;
    let secs = start.elapsed().as_secs_f64();
    all_oracles_pass(&c, [1, 30])?;
    for id in &c.identities {
        ensure(id.oracle.assignments.len() == 2, "two parameter assignments")?;
    }
    let t = c.telescoper.as_ref().ok_or("no telescoper")?;
    ensure(t.symbolic_check, "sigma(g) - g = f does not hold symbolically")?;
    let tower = c.tower.as_ref().ok_or("no tower")?;
    // the old generators form the binomial tower: x^k, the binomial, the inner sum
    let old: Vec<_> = tower.generators.iter().filter(|g| !t.new_generators.contains(&g.name)).collect();
    let kinds: Vec<&str> = old.iter().map(|g| g.kind.as_str()).collect();
    ensure(kinds == ["pi", "pi", "sigma"], format!("base tower kinds {:?}", kinds))?;
    let s = &old[2].name;
    let new: Vec<_> = tower.generators.iter().filter(|g| t.new_generators.contains(&g.name)).collect();
    ensure(new.len() == 2 && new.iter().all(|g| g.kind == "sigma"), "two new sum generators")?;
    let h = new.iter().find(|g| g.depth == 2).ok_or("no depth-2 generator h")?;
    let big_h = new.iter().find(|g| g.depth == 3).ok_or("no depth-3 generator H")?;
    let g = poly(&t.g)?;
    let plus = poly(&format!("{}*{} + {}", s, h.name, big_h.name))?;
    let minus = poly(&format!("{}*{} - {}", s, h.name, big_h.name))?;
    ensure(g == plus || g == minus, format!("g = {} is not s*h + H", t.g))?;
    let d = c.depth.as_ref().ok_or("no depth record")?;
    ensure(d.result == Some(3) && d.naive_result == Some(4), format!("depth {:?} (naive {:?})", d.result, d.naive_result))?;
    ensure(secs < 10.0, format!("took {:.2} s", secs))?;
    Ok(format!("g = {}*{} + {}, depth 3 (naive 4), oracle K=1..30 at 2 points, {:.2} s", s, h.name, big_h.name, secs))
}

fn harmonic_pair() -> Check {
    let c = certificate(&["relations", "S[4,2](n)", "S[2,4](n)", "--range", "1..50"])?;
    all_oracles_pass(&c, [1, 50])?;
    let want = "S[6](n) + S[2](n)*S[4](n) - S[4,2](n)";
    let id = c.identities.iter().find(|i| i.lhs == "S[2,4](n)").ok_or("no identity for S[2,4]")?;
    ensure(id.rhs == want, format!("S[2,4](n) = {}", id.rhs))?;
    Ok(format!("S[2,4](n) = {}, oracle n=1..50", id.rhs))
}

fn first_order_recurrence() -> Check {
    let input = "sum(k,0,m, S[1](k)*binom(m,k))";
    let c = certificate(&["csum", input, "--range", "0..25"])?;
    all_oracles_pass(&c, [0, 25])?;
    let r = c.recurrence.as_ref().ok_or("no recurrence")?;
    ensure(r.order == 1, format!("order {}", r.order))?;
    let coeffs: Vec<SymPoly> = r.coefficients.iter().map(|x| poly(x)).collect::<Result<_, _>>()?;
    let konst = |p: &SymPoly| if p.is_empty() { Some(pisigma_core::arith::int(0)) } else { p.get(&Vec::new()).filter(|_| p.len() == 1).cloned() };
    let (c0, c1) = (konst(&coeffs[0]).ok_or("c0 not constant")?, konst(&coeffs[1]).ok_or("c1 not constant")?);
    ensure(c0 == -c1.clone() * pisigma_core::arith::int(2), format!("coefficients ({}, {})", c0, c1))?;
    ensure(c.identities.iter().any(|i| i.kind == "closed_form" && i.oracle.pass), "no closed form certified")?;
    let naive = pisigma(&["csum", input, "--mode", "naive", "--max-order", "1"]);
    ensure(naive.code == EXIT_NOT_FOUND, format!("naive order-1 run exited {}", naive.code))?;
    Ok(format!("order 1 with ({}, {}), closed form m=0..25; naive order 1 not found", c0, c1))
}

fn seven(mode: &str) -> Result<Certificate, String> {
    certificate(&["relations", SEVEN, "--mode", mode, "--range", "1..30"])
}

fn single_relation(refined: &Certificate) -> Check {
    all_oracles_pass(refined, [1, 30])?;
    let rels: Vec<_> = refined.identities.iter().filter(|i| i.kind == "relation").collect();
    ensure(rels.len() == 1, format!("{} relations", rels.len()))?;
    ensure(rels[0].lhs == "S[1,1,1,1,2](N)", format!("relation for {}", rels[0].lhs))?;
    ensure(poly(&rels[0].rhs)? == poly(SEVEN_RELATION)?, "relation differs from the expected one")?;
    Ok("exactly one relation, equal to the printed one after ordering, oracle N=1..30".into())
}

fn depth_profile(refined: &Certificate, naive: &Certificate) -> Check {
    let r = &refined.depth.as_ref().ok_or("no depth record")?.profile;
    let n = &naive.depth.as_ref().ok_or("no depth record")?.profile;
    all_oracles_pass(naive, [1, 30])?;
    let (rmax, nmax) = (r.iter().max().copied(), n.iter().max().copied());
    ensure(rmax == Some(3), format!("refined max {:?}", rmax))?;
    ensure(nmax == Some(6), format!("naive max {:?}", nmax))?;
    ensure(r.len() <= n.len(), format!("refined {} generators, naive {}", r.len(), n.len()))?;
    let show = |p: &[u32]| p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
    Ok(format!("refined [{}], naive [{}]", show(r), show(n)))
}

fn property(name: &str, cases: u32, f: impl Fn() -> Result<(), String>) -> Result<String, String> {
    f().map(|_| format!("{} ({} cases)", name, cases)).map_err(|e| format!("{}: {}", name, e))
}

fn property_suites() -> Check {
    use properties::*;
    const CASES: u32 = 100;
    let runner = || TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let pair = (seed(), seed());
    let two = |f: fn(&Seed, &Seed) -> Result<(), TestCaseError>| move || runner().run(&(seed(), seed()), |(a, b)| f(&a, &b)).map_err(|e| e.to_string());
    let results = [
        property("sigma laws", CASES, two(sigma_laws)),
        property("shift semantics", CASES, || runner().run(&(seed(), 1i64..=20), |(a, n)| shift_semantics(&a, n)).map_err(|e| e.to_string())),
        property("depth stability", CASES, || runner().run(&seed(), |a| depth_stability(&a)).map_err(|e| e.to_string())),
        property("basis rows (naive)", CASES, || runner().run(&pair, |(a, b)| basis_rows(&a, &b, false)).map_err(|e| e.to_string())),
        property("basis rows (refined)", CASES, || runner().run(&pair, |(a, b)| basis_rows(&a, &b, true)).map_err(|e| e.to_string())),
        property("degree slack", CASES, two(slack_adds_nothing)),
        property("rational/polynomial split", CASES, two(split_recombination)),
    ];
    let failed: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
    if failed.is_empty() {
        Ok(results.into_iter().map(|r| r.unwrap()).collect::<Vec<_>>().join(", "))
    } else {
        Err(failed.join("; "))
    }
}

fn counterexample_at(args: &[&str]) -> Result<i64, String> {
    let out = pisigma(args);
    ensure(out.code == EXIT_ORACLE, format!("{:?} exited {}", args, out.code))?;
    let at = out.stderr.split("counterexample at ").nth(1).ok_or("no counterexample reported")?;
    let n: String = at.split(" = ").nth(1).unwrap_or("").chars().take_while(|c| c.is_ascii_digit() || *c == '-').collect();
    n.parse().map_err(|_| format!("cannot read n from {}", out.stderr))
}

fn negative_controls() -> Check {
    let perturbed = [
        vec!["verify", "S[2,4](n) = S[6](n) + S[2](n)*S[4](n) + S[4,2](n)"],
        vec!["verify", "sum(k,1,n,k*2^k) = 2^(n+1)*(n-1) + 3"],
        vec!["verify", "sum(k,0,m, S[1](k)*binom(m,k)) = 2^m*S[1](m)", "--range", "0..25"],
    ];
    let mut at = Vec::new();
    for p in &perturbed {
        let n = counterexample_at(p)?;
        ensure(n <= 5, format!("{:?}: first counterexample at n = {}", p, n))?;
        at.push(n);
    }
    let c = certificate(&["relations", "S[4,2](n)", "S[2,4](n)"])?;
    let id = c.identities.iter().find(|i| i.lhs == "S[2,4](n)").ok_or("no identity")?;
    let out = pisigma(&["verify", &format!("{} = {} + 1/n^6", id.lhs, id.rhs)]);
    ensure(out.code == EXIT_ORACLE, "perturbed harmonic identity passed")?;

    let mut tw = Tower::new(Vec::new());
    match adjoin_sigma_delta(&mut tw, "s", &Elem::one(), &Options::default()) {
        Err(AdjoinError::Telescopes(g)) => ensure(g == Elem::Base(RatFunc::k()), format!("witness {}", tw.fmt_elem(&g)))?,
        r => return Err(format!("adjoin_sigma_delta(1) gave {:?}", r.map(|_| ()))),
    }
    let alpha = RatFunc::k().add(&RatFunc::from_int(1)).div(&RatFunc::k()).unwrap();
    match adjoin_pi(&mut tw, "p", &alpha, 12) {
        Err(AdjoinError::NotProduct { m, g }) => ensure(m == 1 && g == RatFunc::k(), format!("witness m = {}, g = {:?}", m, g))?,
        r => return Err(format!("adjoin_pi((k+1)/k) gave {:?}", r.map(|_| ()))),
    }
    Ok(format!("perturbed identities fail at n = {:?}; f = 1 telescopes with g = k; (k+1)/k = sigma(k)/k", at))
}

fn main() {
    let started = Instant::now();
    let mut failed = 0;
    let mut report = |n: u32, r: Check| {
        match r {
            Ok(msg) => println!("criterion {}: PASS  {}", n, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {}", n, msg);
            }
        }
    };
    report(1, binomial_double_sum());
    report(2, harmonic_pair());
    report(3, first_order_recurrence());
    let (refined, naive) = (seven("refined"), seven("naive"));
    report(4, refined.as_ref().map_err(|e| e.clone()).and_then(single_relation));
    report(5, match (&refined, &naive) {
        (Ok(r), Ok(n)) => depth_profile(r, n),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    });
    report(6, property_suites());
    report(7, negative_controls());
    println!("acceptance: {} of 7 criteria pass ({:.1} s)", 7 - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
