//! Randomized properties shared by the core property suite and the
//! acceptance run. Elements are built deterministically from a vector of
//! small integers so proptest can shrink them.

#![allow(dead_code)]

use pisigma_core::depth_optimal::{find_depth_complete_ext, telescope_depth_optimal, Ctx};
use pisigma_core::oracle::{eval_elem, parse_assignment};
use pisigma_core::reduction::{solve_pt, split_rational, Options, Policy};
use pisigma_core::{Elem, Kind, RatFunc, Tower, Var};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Seed = Vec<i64>;

pub fn seed() -> impl Strategy<Value = Seed> {
    prop::collection::vec(-3i64..=3, 16)
}

fn k() -> RatFunc {
    RatFunc::k()
}

fn c(v: i64) -> RatFunc {
    RatFunc::from_int(v)
}

/// `Q(k)(s1)(s2)(s21)`: `S[1]`, `S[2]` and `S[2,1]`.
pub fn harmonic_tower() -> (Tower, Vec<Var>) {
    let mut t = Tower::new(Vec::new());
    let k1 = k().add(&c(1));
    let s1 = t.push("s1", Kind::Sigma, Elem::Base(k1.inv().unwrap())).unwrap();
    let s2 = t.push("s2", Kind::Sigma, Elem::Base(k1.pow(-2).unwrap())).unwrap();
    let step = t.sigma(&Elem::gen(s1)).scale(&k1.pow(-2).unwrap());
    let s21 = t.push("s21", Kind::Sigma, step).unwrap();
    (t, vec![s1, s2, s21])
}

/// `Q(m,x)(k)(q)(b)(s)` with `q = x^k`, `b = binom(m+k, k)`, `s = sum q b`.
pub fn binomial_tower() -> (Tower, Vec<Var>) {
    let mut t = Tower::new(vec!["m".into(), "x".into()]);
    let m = RatFunc::var(1);
    let q = t.push("q", Kind::Pi, Elem::Base(RatFunc::var(2))).unwrap();
    let alpha = c(1).add(&m).add(&k()).div(&k().add(&c(1))).unwrap();
    let b = t.push("b", Kind::Pi, Elem::Base(alpha)).unwrap();
    let s = t.push("s", Kind::Sigma, Elem::gen(q).mul(&Elem::gen(b))).unwrap();
    (t, vec![q, b, s])
}

/// `(a + b k) / (k + d)` with `d` in `1..=4`, or a polynomial when `d` is 0.
fn coeff(a: i64, b: i64, d: i64) -> RatFunc {
    let num = c(a).add(&k().scale(&pisigma_core::arith::int(b)));
    match d.rem_euclid(5) {
        0 => num,
        d => num.div(&k().add(&c(d))).unwrap(),
    }
}

/// A polynomial in `gens` with at most three terms of degree at most two.
pub fn poly_elem(gens: &[Var], s: &[i64]) -> Elem {
    let mut acc = Elem::zero();
    for t in 0..3 {
        let w = &s[5 * t..5 * t + 5];
        let mut term = Elem::Base(coeff(w[0], w[1], w[2]));
        let g = gens[w[3].rem_euclid(gens.len() as i64) as usize];
        for _ in 0..w[4].rem_euclid(3) {
            term = term.mul(&Elem::gen(g));
        }
        acc = acc.add(&term);
    }
    acc
}

/// A polynomial plus a proper fraction `1/(t + a)` in a Sigma-generator `t`.
pub fn rational_elem(gens: &[Var], s: &[i64]) -> Elem {
    let p = poly_elem(gens, s);
    let t = gens[s[15].rem_euclid(gens.len() as i64) as usize];
    let den = Elem::gen(t).add(&Elem::int(s[0].rem_euclid(3) + 1));
    p.add(&Elem::one().div(&den).unwrap())
}

fn ensure(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn sigma_laws(a: &Seed, b: &Seed) -> Result<(), TestCaseError> {
    for (t, gens) in [harmonic_tower(), binomial_tower()] {
        let x = rational_elem(&gens, a);
        let y = poly_elem(&gens, b);
        ensure(t.sigma(&x.add(&y)) == t.sigma(&x).add(&t.sigma(&y)), "sigma(x + y)")?;
        ensure(t.sigma(&x.mul(&y)) == t.sigma(&x).mul(&t.sigma(&y)), "sigma(x y)")?;
        if !y.is_zero() {
            ensure(t.sigma(&x.div(&y).unwrap()) == t.sigma(&x).div(&t.sigma(&y)).unwrap(), "sigma(x / y)")?;
        }
        ensure(t.sigma_inv(&t.sigma(&x)) == x, "sigma_inv(sigma(x))")?;
        ensure(t.sigma(&t.sigma_inv(&x)) == x, "sigma(sigma_inv(x))")?;
        ensure(t.sigma_pow(&x, 2) == t.sigma(&t.sigma(&x)), "sigma^2")?;
        ensure(t.sigma_pow(&x, -1) == t.sigma_inv(&x), "sigma^-1")?;
    }
    Ok(())
}

pub fn shift_semantics(a: &Seed, n: i64) -> Result<(), TestCaseError> {
    let asg = parse_assignment("m=2,x=1/2").unwrap();
    for (t, gens) in [harmonic_tower(), binomial_tower()] {
        let e = rational_elem(&gens, a);
        let se = t.sigma(&e);
        // points where the element has a pole are not part of the claim
        if let (Ok(l), Ok(r)) = (eval_elem(&se, &t, n, &asg), eval_elem(&e, &t, n + 1, &asg)) {
            ensure(l == r, "eval(sigma e, n) = eval(e, n + 1)")?;
        }
    }
    Ok(())
}

/// A vector `[sigma(g0) - g0, f1, f2]` with a known telescoper in front.
fn pt_input(gens: &[Var], t: &Tower, a: &Seed, b: &Seed) -> Vec<Elem> {
    let g0 = poly_elem(gens, a);
    let f0 = t.sigma(&g0).sub(&g0);
    let f1 = poly_elem(gens, b);
    let mut rev = b.clone();
    rev.reverse();
    vec![f0, f1, poly_elem(gens, &rev)]
}

pub fn depth_stability(a: &Seed) -> Result<(), TestCaseError> {
    let (mut t, gens) = harmonic_tower();
    let f = poly_elem(&gens[..2], a);
    if f.is_zero() {
        return Ok(());
    }
    let r = telescope_depth_optimal(&mut t, &f, &Options::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(t.sigma(&r.g).sub(&r.g) == f, "sigma(g) - g = f")?;
    let (df, dg) = (t.depth(&f), t.depth(&r.g));
    ensure(df <= dg && dg <= df + 1, "depth(f) <= depth(g) <= depth(f) + 1")
}

pub fn basis_rows(a: &Seed, b: &Seed, refined: bool) -> Result<(), TestCaseError> {
    let (mut t, gens) = harmonic_tower();
    let gens = &gens[..2];
    let f = pt_input(gens, &t, a, b);
    let policy = if refined { Policy::Refined } else { Policy::Naive };
    let basis = solve_pt(&mut t, &f, policy, &Options::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(basis.verify(&t, &f), "every row solves its equation")?;
    ensure(basis.rows.len() <= f.len() + 1, "dimension at most n + 1")?;
    // the planted telescoper is in the span
    let found = basis.nontrivial().any(|(c, _)| !c[0].is_zero());
    ensure(found, "planted solution found")
}

pub fn slack_adds_nothing(a: &Seed, b: &Seed) -> Result<(), TestCaseError> {
    let (t, gens) = harmonic_tower();
    let gens = &gens[..2];
    let f = pt_input(gens, &t, a, b);
    let plain = Options::default();
    let wide = Options { slack: 2, ..Options::default() };
    for policy in [Policy::Naive, Policy::Refined] {
        let b0 = solve_pt(&mut t.clone(), &f, policy, &plain).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b2 = solve_pt(&mut t.clone(), &f, policy, &wide).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(b0.rows.len() == b2.rows.len(), "same dimension with two extra degrees")?;
        ensure(b0.nontrivial().count() == b2.nontrivial().count(), "same c-space with two extra degrees")?;
    }
    Ok(())
}

/// `Q(k)(p)` with `p = 2^k`.
pub fn power_tower() -> (Tower, Var) {
    let mut t = Tower::new(Vec::new());
    let p = t.push("p", Kind::Pi, Elem::int(2)).unwrap();
    (t, p)
}

/// A polynomial in `p` plus `c / p^j`: the in-scope shape with a proper
/// part, since denominators in Sigma-generators are outside the solver's class.
pub fn laurent_elem(p: Var, s: &[i64]) -> Elem {
    let poly = poly_elem(&[p], s);
    let j = s[15].rem_euclid(2) + 1;
    let tail = Elem::Base(coeff(s[1], s[0], s[4])).div(&Elem::gen(p).pow(j).unwrap()).unwrap();
    poly.add(&tail)
}

/// Every solution splits into a proper part solving the proper half of the
/// problem and a polynomial part solving the polynomial half.
pub fn split_recombination(a: &Seed, b: &Seed) -> Result<(), TestCaseError> {
    let (mut t, top) = power_tower();
    let g0 = laurent_elem(top, a);
    let f = vec![t.sigma(&g0).sub(&g0), laurent_elem(top, b)];
    let basis = solve_pt(&mut t, &f, Policy::Naive, &Options::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(basis.verify(&t, &f), "rows verify")?;
    let found = basis.nontrivial().any(|(c, _)| !c[0].is_zero());
    ensure(found, "planted solution found")?;
    for (c, g) in &basis.rows {
        let cf = f.iter().zip(c).fold(Elem::zero(), |acc, (fi, ci)| acc.add(&fi.scale(ci)));
        let (h, p) = split_rational(&cf, top);
        let (rho, gp) = split_rational(g, top);
        ensure(t.sigma(&rho).sub(&rho) == h, "proper part solves the h-problem")?;
        ensure(t.sigma(&gp).sub(&gp) == p, "polynomial part solves the p-problem")?;
        ensure(rho.add(&gp) == *g, "parts recombine")?;
    }
    Ok(())
}

/// The literal completion loop and the row-operation variant adjoin the
/// same kinds of generators and find solution spaces of equal size.
pub fn literal_matches_row_ops(a: &Seed) -> Result<(), TestCaseError> {
    let (t, gens) = harmonic_tower();
    let f = vec![poly_elem(&gens[..2], a)];
    let d = f.iter().map(|x| t.depth(x)).max().unwrap() + 1;
    let opts = Options::default();
    let mut out = Vec::new();
    for literal in [false, true] {
        let mut tw = t.clone();
        let mut ctx = Ctx::new(&opts);
        ctx.literal = literal;
        let rows = find_depth_complete_ext(&mut ctx, &mut tw, &f, d, None, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut kinds: Vec<(u32, bool)> = ctx.report.new_gens.iter().map(|v| (tw.gen(*v).depth, tw.gen(*v).kind == Kind::Sigma)).collect();
        kinds.sort();
        let nontrivial = rows.iter().filter(|(c, _)| c.iter().any(|x| !x.is_zero())).count();
        out.push((kinds, rows.len(), nontrivial));
    }
    ensure(out[0] == out[1], "literal and row-operation completion agree")
}
