//! Reduction of parameterized first-order difference equations
//! `a1 sigma(g) + a2 g = c . f` down the tower.
//!
//! The coefficients `a1, a2` always live in `K(k)`. Over a generator `t`
//! the right-hand sides are split into a proper rational part and a
//! polynomial part in `t`; the polynomial part is solved coefficient by
//! coefficient from the top degree down, each coefficient problem being an
//! equation over the field below `t`. Who solves those lower problems is up
//! to the caller, so the same loop serves the plain recursion and the
//! depth-optimal one.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::Rat;
use crate::base_solver::solve_with_slack;
use crate::linalg::nullspace;
use crate::ratfunc::RatFunc;
use crate::tower::{Elem, Kind, SolutionBasis, Tower, Var};

/// Solution rows `(c, g)`.
pub type Rows = Vec<(Vec<RatFunc>, Elem)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionError {
    /// The input leaves the class the solver handles.
    Scope { generator: String, reason: String },
    /// Adjoining a generator failed.
    Tower(String),
}

impl fmt::Display for ReductionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionError::Scope { generator, reason } => write!(f, "out of scope at {}: {}", generator, reason),
            ReductionError::Tower(m) => write!(f, "tower error: {}", m),
        }
    }
}

/// How the lower-level problems are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Solve in the given tower.
    Naive,
    /// Extend the tower so that the result is depth-optimal.
    Refined,
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Extra degrees searched past every degree bound.
    pub slack: i64,
    /// Use the closed-form shortcuts for trivial coefficient problems.
    pub shortcuts: bool,
    /// Exponent search limit for product generators.
    pub m_max: u32,
}

impl Default for Options {
    fn default() -> Self {
        Options { slack: 0, shortcuts: true, m_max: 12 }
    }
}

/// A coefficient problem over the field strictly below `t`, coming from the
/// coefficient of `t^r`.
pub struct CoeffProblem<'a> {
    pub t: Var,
    pub r: i64,
    pub a1: RatFunc,
    pub a2: RatFunc,
    pub f: &'a [Elem],
}

pub type Lower<'a> = dyn FnMut(&mut Tower, &CoeffProblem) -> Result<Rows, ReductionError> + 'a;

fn scope(tower: &Tower, t: Var, reason: &str) -> ReductionError {
    ReductionError::Scope { generator: tower.gen(t).name.clone(), reason: reason.to_string() }
}

pub fn unit(n: usize, i: usize) -> Vec<RatFunc> {
    let mut c = vec![RatFunc::zero(); n];
    c[i] = RatFunc::one();
    c
}

fn identity_rows(n: usize) -> Rows {
    (0..n).map(|i| (unit(n, i), Elem::zero())).collect()
}

fn is_plain(a1: &RatFunc, a2: &RatFunc) -> bool {
    a1.add(a2).is_zero()
}

/// Splits `f` into a proper rational part and a polynomial part in `t`.
pub fn split_rational(f: &Elem, t: Var) -> (Elem, Elem) {
    let (num, den) = f.parts(t);
    if den.len() <= 1 {
        return (Elem::zero(), f.clone());
    }
    let mut rem = num;
    let mut quo = vec![Elem::zero(); rem.len().saturating_sub(den.len()) + 1];
    // den is monic
    while rem.len() >= den.len() {
        let shift = rem.len() - den.len();
        let lc = rem.last().unwrap().clone();
        quo[shift] = lc.clone();
        for (i, d) in den.iter().enumerate() {
            rem[i + shift] = rem[i + shift].sub(&lc.mul(d));
        }
        while rem.last().map_or(false, |x| x.is_zero()) {
            rem.pop();
        }
    }
    let h = Elem::from_parts(t, rem, den).unwrap();
    (h, Elem::from_poly(t, quo))
}

/// Degree bound for polynomial solutions of `sigma(g) - g = c . p` in `t`.
/// For a product generator this is the top of the exponent range.
pub fn degree_bound(tower: &Tower, t: Var, p: &[Elem]) -> i64 {
    let deg = p.iter().filter_map(|x| x.laurent_in(t)).filter(|(_, c)| !c.is_empty()).map(|(lo, c)| lo + c.len() as i64 - 1).max().unwrap_or(0);
    match tower.gen(t).kind {
        Kind::Sigma => deg.max(1) + 1,
        Kind::Pi => deg.max(1),
    }
}

/// Nonzero `w` below `bound` with `a1 sigma(w) + a2 w = 0`.
///
/// Searched as a rational function in `k` times a power of at most one
/// product generator.
pub fn homogeneous(tower: &Tower, a1: &RatFunc, a2: &RatFunc, bound: Option<Var>, m_max: u32) -> Option<Elem> {
    if is_plain(a1, a2) {
        return Some(Elem::one());
    }
    if a1.is_zero() || a2.is_zero() {
        return None;
    }
    let ratio = a2.neg().div(a1).unwrap();
    if let Some(w) = base_homogeneous(a1, a2, &ratio) {
        return Some(Elem::Base(w));
    }
    for g in tower.gens_between(None, bound) {
        if g.kind != Kind::Pi {
            continue;
        }
        let Some(alpha) = g.defining.base() else { continue };
        for m in 1..=m_max as i64 {
            for e in [m, -m] {
                let ae = alpha.pow(e).unwrap();
                let r = ratio.div(&ae).unwrap();
                if let Some(w) = base_homogeneous(&a1.mul(&ae), a2, &r) {
                    let pw = Elem::gen(g.var).pow(e).unwrap();
                    return Some(pw.scale(&w));
                }
            }
        }
    }
    None
}

/// `sigma(w)/w` tends to one as `k` grows, which rules out most ratios
/// before any linear algebra.
fn ratio_plausible(r: &RatFunc) -> bool {
    let (n, d) = (r.num(), r.den());
    let dn = n.degree_in(0);
    if dn != d.degree_in(0) {
        return false;
    }
    let ln = n.coeffs_in(0).pop();
    let ld = d.coeffs_in(0).pop();
    ln == ld
}

fn base_homogeneous(a1: &RatFunc, a2: &RatFunc, ratio: &RatFunc) -> Option<RatFunc> {
    if !ratio_plausible(ratio) {
        return None;
    }
    let b = solve_with_slack(a1, a2, &[], 0);
    b.rows.into_iter().next().map(|(_, g)| g.base().unwrap().clone())
}

/// Closed-form answers for coefficient problems that need no solving.
fn shortcut(tower: &Tower, p: &CoeffProblem, m_max: u32) -> Option<Rows> {
    let n = p.f.len();
    let plain = is_plain(&p.a1, &p.a2);
    if p.f.iter().all(|x| x.is_zero()) {
        let mut rows = identity_rows(n);
        if let Some(w) = homogeneous(tower, &p.a1, &p.a2, Some(p.t), m_max) {
            rows.push((vec![RatFunc::zero(); n], w));
        }
        return Some(rows);
    }
    if !plain {
        return None;
    }
    // multiples of some sigma(u) - u
    let i0 = p.f.iter().position(|x| !x.is_zero())?;
    let top = p.f[i0].top();
    for g in tower.gens_between(None, None) {
        if g.var > p.t || g.kind != Kind::Sigma || g.defining.top() != top {
            continue;
        }
        let Some(lambda) = multiples(p.f, &g.defining) else { continue };
        let one = (vec![RatFunc::zero(); n], Elem::one());
        let mut rows: Rows = if g.var == p.t {
            // sigma(t) - t does not telescope below t
            let m = vec![lambda];
            nullspace(&m, n).into_iter().map(|c| (c, Elem::zero())).collect()
        } else {
            let u = Elem::gen(g.var);
            lambda.iter().enumerate().map(|(i, l)| (unit(n, i), u.scale(l))).collect()
        };
        rows.push(one);
        return Some(rows);
    }
    None
}

/// Constants `l` with `f = l beta`, if they exist.
fn multiples(f: &[Elem], beta: &Elem) -> Option<Vec<RatFunc>> {
    let mut out = Vec::with_capacity(f.len());
    for x in f {
        if x.is_zero() {
            out.push(RatFunc::zero());
            continue;
        }
        let q = x.div(beta).ok()?;
        out.push(q.as_constant()?.clone());
    }
    Some(out)
}

fn call(tower: &mut Tower, p: &CoeffProblem, opts: &Options, lower: &mut Lower) -> Result<Rows, ReductionError> {
    if opts.shortcuts {
        if let Some(rows) = shortcut(tower, p, opts.m_max) {
            return Ok(rows);
        }
    }
    lower(tower, p)
}

/// `(kappa, g) -> (kappa . D, g + (kappa . W) t^r)` for a stage `(D, W)`.
fn recombine(sols: Rows, stage: &Rows, n: usize, t: Var, r: i64) -> Rows {
    sols.into_iter()
        .map(|(kappa, g)| {
            let mut c = vec![RatFunc::zero(); n];
            let mut w = Elem::zero();
            for (kj, (dj, wj)) in kappa.iter().zip(stage) {
                if kj.is_zero() {
                    continue;
                }
                for (x, y) in c.iter_mut().zip(dj) {
                    if !y.is_zero() {
                        *x = x.add(&kj.mul(y));
                    }
                }
                w = w.add(&wj.scale(kj));
            }
            let lifted = if w.is_zero() { w } else { Elem::from_laurent(t, r, vec![w]) };
            (c, g.add(&lifted))
        })
        .collect()
}

fn binomial(n: i64, k: i64) -> Rat {
    let mut acc = Rat::from_integer(1.into());
    for i in 0..k {
        acc = acc * Rat::new((n - i).into(), (i + 1).into());
    }
    acc
}

/// One reduction step over the generator `t`, the top of the current field.
/// Coefficient problems are passed to `lower` unless a shortcut applies.
pub fn reduce_top(tower: &mut Tower, t: Var, a1: &RatFunc, a2: &RatFunc, f: &[Elem], opts: &Options, lower: &mut Lower) -> Result<Rows, ReductionError> {
    let g = tower.gen(t).clone();
    let n = f.len();
    let plain = is_plain(a1, a2);
    if opts.shortcuts && plain && f.iter().all(|x| x.top().map_or(true, |v| v < t)) {
        return match g.kind {
            Kind::Sigma => {
                // g = w - c' t with sigma(w) - w = c . f + c' beta
                let mut ext = f.to_vec();
                ext.push(g.defining.clone());
                let p = CoeffProblem { t, r: 0, a1: a1.clone(), a2: a2.clone(), f: &ext };
                let rows = call(tower, &p, opts, lower)?;
                Ok(rows
                    .into_iter()
                    .map(|(mut c, w)| {
                        let cb = c.pop().unwrap();
                        let w = if cb.is_zero() { w } else { w.sub(&Elem::gen(t).scale(&cb)) };
                        (c, w)
                    })
                    .collect())
            }
            Kind::Pi => {
                let p = CoeffProblem { t, r: 0, a1: a1.clone(), a2: a2.clone(), f };
                call(tower, &p, opts, lower)
            }
        };
    }
    // an empty stage leaves only the homogeneous problem for lower stages
    let mut stages: Vec<(i64, usize, Rows)> = Vec::new();
    match g.kind {
        Kind::Sigma => {
            let mut cur: Vec<Vec<Elem>> = Vec::with_capacity(n);
            for x in f {
                let (h, p) = split_rational(x, t);
                if !h.is_zero() {
                    return Err(scope(tower, t, "summand has a denominator in a sum generator"));
                }
                cur.push(p.poly_in(t).unwrap());
            }
            let b = degree_bound(tower, t, f) + opts.slack;
            let beta = g.defining.clone();
            for r in (0..=b).rev() {
                let ft: Vec<Elem> = cur.iter().map(|c| c.get(r as usize).cloned().unwrap_or_default()).collect();
                let p = CoeffProblem { t, r, a1: a1.clone(), a2: a2.clone(), f: &ft };
                let rows = call(tower, &p, opts, lower)?;
                let width = cur.len();
                if r > 0 {
                    let ru = r as usize;
                    // powers of beta and the binomial row for (t + beta)^r
                    let mut bp = vec![Elem::one()];
                    for _ in 0..r {
                        bp.push(bp.last().unwrap().mul(&beta));
                    }
                    let binom: Vec<Rat> = (0..=r).map(|i| binomial(r, i)).collect();
                    let a1e = Elem::Base(a1.clone());
                    let a2e = Elem::Base(a2.clone());
                    let next: Vec<Vec<Elem>> = rows
                        .iter()
                        .map(|(d, w)| {
                            let mut out = vec![Elem::zero(); ru];
                            for (di, ci) in d.iter().zip(&cur) {
                                if di.is_zero() {
                                    continue;
                                }
                                for (o, x) in out.iter_mut().zip(ci) {
                                    *o = o.add(&x.scale(di));
                                }
                            }
                            if !w.is_zero() {
                                let sw = a1e.mul(&tower.sigma(w));
                                for (i, o) in out.iter_mut().enumerate() {
                                    let term = sw.mul(&bp[ru - i]).scale(&RatFunc::constant(binom[i].clone()));
                                    *o = o.sub(&term);
                                }
                                debug_assert!({
                                    let lead = ci_at(&cur, d, ru).sub(&sw.add(&a2e.mul(w)));
                                    lead.is_zero()
                                });
                            }
                            while out.last().map_or(false, |x| x.is_zero()) {
                                out.pop();
                            }
                            out
                        })
                        .collect();
                    cur = next;
                }
                stages.push((r, width, rows));
            }
        }
        Kind::Pi => {
            let Some(alpha) = g.defining.base().cloned() else {
                return Err(scope(tower, t, "product factor outside the rational functions"));
            };
            let mut cur: Vec<alloc::collections::BTreeMap<i64, Elem>> = Vec::with_capacity(n);
            let mut lo = 0i64;
            for x in f {
                let Some((low, cs)) = x.laurent_in(t) else {
                    return Err(scope(tower, t, "summand has a non-monomial denominator in a product generator"));
                };
                let mut m = alloc::collections::BTreeMap::new();
                for (i, c) in cs.into_iter().enumerate() {
                    if !c.is_zero() {
                        lo = lo.min(low + i as i64);
                        m.insert(low + i as i64, c);
                    }
                }
                cur.push(m);
            }
            let hi = degree_bound(tower, t, f) + opts.slack;
            let lo = lo - opts.slack;
            let order: Vec<i64> = (1..=hi).rev().chain(lo..0).chain(core::iter::once(0)).collect();
            for r in order {
                let ft: Vec<Elem> = cur.iter().map(|m| m.get(&r).cloned().unwrap_or_default()).collect();
                let a1r = a1.mul(&alpha.pow(r).unwrap());
                let p = CoeffProblem { t, r, a1: a1r, a2: a2.clone(), f: &ft };
                let rows = call(tower, &p, opts, lower)?;
                let width = cur.len();
                // sigma(w t^r) only touches the t^r coefficient
                cur = rows
                    .iter()
                    .map(|(d, _)| {
                        let mut out = alloc::collections::BTreeMap::new();
                        for (di, m) in d.iter().zip(&cur) {
                            if di.is_zero() {
                                continue;
                            }
                            for (e, x) in m {
                                if *e == r {
                                    continue;
                                }
                                let v = out.remove(e).unwrap_or_else(Elem::zero).add(&x.scale(di));
                                if !v.is_zero() {
                                    out.insert(*e, v);
                                }
                            }
                        }
                        out
                    })
                    .collect();
                stages.push((r, width, rows));
            }
        }
    }
    let (_, _, mut sols) = stages.pop().unwrap();
    while let Some((r, width, stage)) = stages.pop() {
        sols = recombine(sols, &stage, width, t, r);
    }
    Ok(sols)
}

fn ci_at(cur: &[Vec<Elem>], d: &[RatFunc], r: usize) -> Elem {
    d.iter().zip(cur).fold(Elem::zero(), |acc, (di, c)| match c.get(r) {
        Some(x) if !di.is_zero() => acc.add(&x.scale(di)),
        _ => acc,
    })
}

/// Solves over the field of generators strictly below `bound` without
/// touching the tower.
pub fn solve_naive(tower: &mut Tower, a1: &RatFunc, a2: &RatFunc, f: &[Elem], bound: Option<Var>, opts: &Options) -> Result<Rows, ReductionError> {
    if f.is_empty() {
        return Ok(homogeneous(tower, a1, a2, bound, opts.m_max).map(|w| vec![(Vec::new(), w)]).unwrap_or_default());
    }
    let Some(t) = tower.top_below(bound).map(|g| g.var) else {
        let fs: Vec<RatFunc> = f.iter().map(|x| x.base().cloned().expect("right-hand side above the field")).collect();
        return Ok(solve_with_slack(a1, a2, &fs, opts.slack).rows);
    };
    reduce_top(tower, t, a1, a2, f, opts, &mut |tw: &mut Tower, p: &CoeffProblem| solve_naive(tw, &p.a1, &p.a2, p.f, Some(p.t), opts))
}

/// Solves `a1 sigma(g) + a2 g = c . f` over the whole tower.
pub fn solve_pfde(tower: &mut Tower, a1: &RatFunc, a2: &RatFunc, f: &[Elem], opts: &Options) -> Result<SolutionBasis, ReductionError> {
    let rows = solve_naive(tower, a1, a2, f, None, opts)?;
    Ok(SolutionBasis::new(f.len(), rows, (Elem::Base(a1.clone()), Elem::Base(a2.clone()))))
}

/// Basis of all `(c, g)` with `sigma(g) - g = c . f`. The refined policy
/// may extend the tower first.
pub fn solve_pt(tower: &mut Tower, f: &[Elem], policy: Policy, opts: &Options) -> Result<SolutionBasis, ReductionError> {
    let rows = match policy {
        Policy::Naive => solve_naive(tower, &RatFunc::one(), &RatFunc::from_int(-1), f, None, opts)?,
        Policy::Refined => crate::depth_optimal::parameterized_telescope_rows(tower, f, opts)?,
    };
    Ok(SolutionBasis::new(f.len(), rows, (Elem::one(), Elem::int(-1))))
}

/// The polynomial part of a solve over `t`: equivalent to [`solve_naive`]
/// restricted to right-hand sides that are polynomial in `t`.
pub fn solve_pp(tower: &mut Tower, t: Var, p: &[Elem], opts: &Options) -> Result<Rows, ReductionError> {
    let one = RatFunc::one();
    let m1 = RatFunc::from_int(-1);
    reduce_top(tower, t, &one, &m1, p, opts, &mut |tw: &mut Tower, q: &CoeffProblem| solve_naive(tw, &q.a1, &q.a2, q.f, Some(q.t), opts))
}

/// The rational part of a solve over `t`. Only product generators admit a
/// nonzero proper part; its solutions are Laurent polynomials with negative
/// exponents.
pub fn solve_rp(tower: &mut Tower, t: Var, h: &[Elem], opts: &Options) -> Result<Rows, ReductionError> {
    if h.iter().all(|x| x.is_zero()) {
        return Ok(identity_rows(h.len()));
    }
    if tower.gen(t).kind == Kind::Sigma {
        return Err(scope(tower, t, "summand has a denominator in a sum generator"));
    }
    solve_pp(tower, t, h, opts)
}
