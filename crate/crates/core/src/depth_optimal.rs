//! Depth-optimal Sigma*-extensions built on demand.
//!
//! `find_depth_complete_ext` takes right-hand sides `f` over the field `F`
//! of generators below a split rank and extends `F` (by Sigma*-generators
//! slotted in below the split) until every solution of
//! `sigma(g) - g = c . f` that exists in some extension of depth at most `d`
//! already exists in `F`. Generators between the split and a second rank
//! `top` are the ones kept above `F`; their shifts are accounted for when the
//! completion phase decides what to adjoin.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::base_solver::solve_homogeneous_mult;
use crate::linalg::{rref_with_order, Matrix};
use crate::ratfunc::RatFunc;
use crate::reduction::{homogeneous, reduce_top, solve_naive, unit, CoeffProblem, Options, ReductionError, Rows};
use crate::tower::{Elem, Kind, SolutionBasis, Tower, TowerError, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shortcut {
    /// The solution space already had full dimension.
    FullDimension,
    /// Depth zero, or depth one over the constants.
    BaseDepth,
}

/// What a run of the completion algorithm did to the tower.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub new_gens: Vec<Var>,
    pub shortcuts: BTreeSet<Shortcut>,
}

/// Solver state shared along one recursion.
pub struct Ctx<'a> {
    pub opts: &'a Options,
    /// Run the completion loop literally (re-solving for every entry)
    /// instead of reading the adjunctions off one row reduction.
    pub literal: bool,
    pub report: Report,
    counter: usize,
}

impl<'a> Ctx<'a> {
    pub fn new(opts: &'a Options) -> Ctx<'a> {
        Ctx { opts, literal: false, report: Report::default(), counter: 0 }
    }

    fn fresh_name(&mut self, tower: &Tower, depth: u32) -> String {
        loop {
            self.counter += 1;
            let name = format!("w{}_{}", depth, self.counter);
            if tower.gen_by_name(&name).is_none() {
                return name;
            }
        }
    }
}

fn one() -> RatFunc {
    RatFunc::one()
}

fn minus_one() -> RatFunc {
    RatFunc::from_int(-1)
}

fn tower_err(e: TowerError) -> ReductionError {
    ReductionError::Tower(format!("{}", e))
}

/// Extends the field below `split` so that it is `(f, d)`-complete and
/// returns a basis of the solutions over the extended field. Generators in
/// `[split, top)` are the ones sitting above the field.
pub fn find_depth_complete_ext(ctx: &mut Ctx, tower: &mut Tower, f: &[Elem], d: u32, split: Option<Var>, top: Option<Var>) -> Result<Rows, ReductionError> {
    if f.is_empty() {
        return Ok(vec![(Vec::new(), Elem::one())]);
    }
    if d == 0 || (d == 1 && tower.k_depth == 1) {
        // nothing of depth <= 1 can be adjoined over K(k)
        ctx.report.shortcuts.insert(Shortcut::BaseDepth);
        return solve_naive(tower, &one(), &minus_one(), f, split, ctx.opts);
    }
    // generators kept above the field, cut to depth <= d
    let mut top = top;
    if split.is_some() {
        if let Some(cut) = tower.gens_between(split, top).find(|g| g.depth > d) {
            top = Some(cut.var);
        }
    }
    let fd = tower.field_depth(split);
    if fd < d {
        return complete(ctx, tower, f, fd + 1, split, top);
    }
    let t = tower.top_below(split).expect("field of positive depth has a generator").var;
    let opts = ctx.opts;
    reduce_top(tower, t, &one(), &minus_one(), f, opts, &mut |tw: &mut Tower, p: &CoeffProblem| {
        if !p.a1.add(&p.a2).is_zero() {
            solve_naive(tw, &p.a1, &p.a2, p.f, Some(p.t), opts)
        } else if p.r > 0 {
            find_depth_complete_ext(ctx, tw, p.f, d - 1, Some(p.t), Some(p.t))
        } else {
            find_depth_complete_ext(ctx, tw, p.f, d, Some(p.t), top)
        }
    })
}

/// Completion phase: the field has depth `d - 1`.
fn complete(ctx: &mut Ctx, tower: &mut Tower, f: &[Elem], d: u32, split: Option<Var>, top: Option<Var>) -> Result<Rows, ReductionError> {
    let n = f.len();
    // shifts of the Sigma*-generators above the field that live in the field
    let aug: Vec<Elem> = match split {
        None => Vec::new(),
        Some(_) => tower
            .gens_between(split, top)
            .filter(|g| g.kind == Kind::Sigma && g.defining.top().map_or(true, |v| split.map_or(true, |s| v < s)))
            .map(|g| g.defining.clone())
            .collect(),
    };
    let mut fx = f.to_vec();
    fx.extend(aug.iter().cloned());
    let m = fx.len();
    let rows = find_depth_complete_ext(ctx, tower, &fx, d - 1, split, split)?;
    if rows.iter().filter(|(c, _)| c.iter().any(|x| !x.is_zero())).count() == m {
        ctx.report.shortcuts.insert(Shortcut::FullDimension);
    }
    if ctx.literal {
        return complete_literal(ctx, tower, f, d, split, top);
    }

    // entries of f that stay non-telescoping modulo the earlier ones
    let mut proj: Matrix = rows.iter().map(|(c, _)| c[..n].to_vec()).collect();
    let order: Vec<usize> = (0..n).rev().collect();
    let pivots = rref_with_order(&mut proj, &order);
    let missing: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();

    // solutions that do not use the generators above the field
    let mut kept = keep_without(&rows, n, m);
    for j in missing {
        let (v, lambda) = adjoin_scaled(ctx, tower, &f[j], split)?;
        kept.push((unit(n, j), Elem::gen(v).scale(&lambda)));
    }
    Ok(kept)
}

/// Adjoins `t` with `sigma(t) = t + f / lambda` for the positive constant
/// `lambda` that makes the leading coefficient of `f` plus or minus one.
fn adjoin_scaled(ctx: &mut Ctx, tower: &mut Tower, f: &Elem, split: Option<Var>) -> Result<(Var, RatFunc), ReductionError> {
    let lambda = leading_constant(f);
    let beta = f.scale(&lambda.inv().unwrap());
    let name = ctx.fresh_name(tower, tower.depth(f) + 1);
    let v = tower.insert_sigma_below(split, &name, beta, true).map_err(tower_err)?;
    ctx.report.new_gens.push(v);
    Ok((v, lambda))
}

/// Size of the rational leading coefficient of the numerator, following the top
/// coefficient down through the generators.
pub fn leading_constant(e: &Elem) -> RatFunc {
    match e {
        Elem::Base(r) => {
            let c = r.num().lc() / r.den().lc();
            RatFunc::constant(num_traits::Signed::abs(&c))
        }
        Elem::Ext(x) => leading_constant(x.num.last().unwrap()),
    }
}

/// Rows of the span whose entries in columns `n..m` vanish, cut to the first
/// `n` columns.
fn keep_without(rows: &Rows, n: usize, m: usize) -> Rows {
    if n == m {
        return rows.clone();
    }
    // track row combinations through the elimination
    let r = rows.len();
    let mut mat: Matrix = rows
        .iter()
        .enumerate()
        .map(|(i, (c, _))| {
            let mut v = c.clone();
            v.extend((0..r).map(|j| if i == j { one() } else { RatFunc::zero() }));
            v
        })
        .collect();
    // rows with a zero constant part keep a pivot among the tracking columns
    let order: Vec<usize> = (n..m).chain(0..n).chain(m..m + r).collect();
    let pivots = rref_with_order(&mut mat, &order);
    mat.iter()
        .zip(&pivots)
        .filter(|(_, p)| **p < n || **p >= m)
        .map(|(v, _)| {
            let g = v[m..].iter().zip(rows).fold(Elem::zero(), |acc, (x, (_, g))| if x.is_zero() { acc } else { acc.add(&g.scale(x)) });
            (v[..n].to_vec(), g)
        })
        .collect()
}

/// The completion loop entry by entry, followed by a fresh solve.
fn complete_literal(ctx: &mut Ctx, tower: &mut Tower, f: &[Elem], d: u32, split: Option<Var>, top: Option<Var>) -> Result<Rows, ReductionError> {
    for fj in f {
        if tower.depth(fj) + 1 != d {
            continue;
        }
        let sols = solve_naive(tower, &one(), &minus_one(), core::slice::from_ref(fj), top, ctx.opts)?;
        if sols.iter().any(|(c, _)| !c[0].is_zero()) {
            continue;
        }
        adjoin_scaled(ctx, tower, fj, split)?;
    }
    solve_naive(tower, &one(), &minus_one(), f, split, ctx.opts)
}

fn max_depth(tower: &Tower, f: &[Elem]) -> u32 {
    f.iter().map(|x| tower.depth(x)).max().unwrap_or(0)
}

/// Basis of the parameterized telescoping solutions after extending the tower
/// by generators of depth at most `max depth(f)`.
pub fn parameterized_telescope_rows(tower: &mut Tower, f: &[Elem], opts: &Options) -> Result<Rows, ReductionError> {
    let mut ctx = Ctx::new(opts);
    let d = max_depth(tower, f);
    find_depth_complete_ext(&mut ctx, tower, f, d, None, None)
}

pub fn parameterized_telescope(tower: &mut Tower, f: &[Elem], opts: &Options) -> Result<(SolutionBasis, Report), ReductionError> {
    let mut ctx = Ctx::new(opts);
    let d = max_depth(tower, f);
    let rows = find_depth_complete_ext(&mut ctx, tower, f, d, None, None)?;
    Ok((SolutionBasis::new(f.len(), rows, (Elem::one(), Elem::int(-1))), ctx.report))
}

#[derive(Clone, Debug)]
pub struct TelescoperResult {
    pub g: Elem,
    pub new_gens: Vec<Var>,
    pub depth_g: u32,
    /// The deepest new generator occurs in `g`, so no extension of smaller
    /// depth could hold a telescoper.
    pub extension_minimal: bool,
}

/// A telescoper for `f` in a depth-optimal Sigma*-extension of the tower.
pub fn telescope_depth_optimal(tower: &mut Tower, f: &Elem, opts: &Options) -> Result<TelescoperResult, ReductionError> {
    let mut ctx = Ctx::new(opts);
    let d = tower.depth(f) + 1;
    let rows = find_depth_complete_ext(&mut ctx, tower, core::slice::from_ref(f), d, None, None)?;
    let (c, g) = rows
        .into_iter()
        .find(|(c, _)| !c[0].is_zero())
        .expect("a complete field of depth d(f)+1 holds a telescoper");
    let g = g.scale(&c[0].inv().unwrap());
    let used = g.vars();
    let deepest = ctx.report.new_gens.iter().map(|v| tower.gen(*v).depth).max();
    let extension_minimal = match deepest {
        None => true,
        Some(dd) => ctx.report.new_gens.iter().any(|v| tower.gen(*v).depth == dd && used.contains(v)),
    };
    Ok(TelescoperResult { depth_g: tower.depth(&g), g, new_gens: ctx.report.new_gens, extension_minimal })
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdjoinError {
    /// `sigma(g) - g = f` already has a solution.
    Telescopes(Elem),
    /// `sigma(g) = alpha^m g` has a solution.
    NotProduct { m: u32, g: RatFunc },
    Scope(ReductionError),
    Tower(TowerError),
}

impl From<ReductionError> for AdjoinError {
    fn from(e: ReductionError) -> Self {
        AdjoinError::Scope(e)
    }
}

/// Adjoins `t` with `sigma(t) = t + f` after completing the tower to depth
/// `depth(f)`, so the new generator is depth-optimal.
pub fn adjoin_sigma_delta(tower: &mut Tower, name: &str, f: &Elem, opts: &Options) -> Result<Var, AdjoinError> {
    let mut ctx = Ctx::new(opts);
    let d = tower.depth(f);
    let rows = find_depth_complete_ext(&mut ctx, tower, core::slice::from_ref(f), d, None, None)?;
    if let Some((c, g)) = rows.into_iter().find(|(c, _)| !c[0].is_zero()) {
        return Err(AdjoinError::Telescopes(g.scale(&c[0].inv().unwrap())));
    }
    tower.insert_sigma_below(None, name, f.clone(), true).map_err(AdjoinError::Tower)
}

/// Adjoins `t` with `sigma(t) = alpha t` for a rational `alpha`, after a
/// bounded search for `sigma(g) = alpha^m g`.
pub fn adjoin_pi(tower: &mut Tower, name: &str, alpha: &RatFunc, m_max: u32) -> Result<Var, AdjoinError> {
    adjoin_pi_in(tower, name, alpha, m_max, false)
}

/// `adjoin_pi`, optionally placing the generator in the ground field.
pub fn adjoin_pi_in(tower: &mut Tower, name: &str, alpha: &RatFunc, m_max: u32, ground: bool) -> Result<Var, AdjoinError> {
    if let Some((m, g)) = solve_homogeneous_mult(alpha, m_max) {
        return Err(AdjoinError::NotProduct { m, g });
    }
    // an existing product generator times a rational function
    for m in 1..=m_max {
        let am = alpha.pow(m as i64).unwrap();
        if let Some(w) = homogeneous(tower, &one(), &am.neg(), None, m_max) {
            if let Some(g) = w.base() {
                return Err(AdjoinError::NotProduct { m, g: g.clone() });
            }
            return Err(AdjoinError::Telescopes(w));
        }
    }
    tower.insert_product(name, Elem::Base(alpha.clone()), ground).map_err(AdjoinError::Tower)
}
