//! Translation between sum expressions and tower elements.
//!
//! A sum `S(n) = sum(i, 1, n, F(i))` becomes an element `t` with
//! `sigma(t) = t + sigma(F)`: the shift of `S` adds the next summand. Every
//! translation in this module uses that one convention. Products and
//! hypergeometric atoms (`c^(a n + b)`, binomials with integer slopes)
//! become Pi-generators, reused whenever an existing one already models them
//! up to a rational factor.
//!
//! In naive mode a sum is telescoped in the current tower and adjoined when
//! that fails. In refined mode it goes through the depth-optimal telescoper,
//! which may adjoin shallower sums instead.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::arith::{int, rat, Rat};
use crate::depth_optimal::{adjoin_pi_in, parameterized_telescope, telescope_depth_optimal, AdjoinError, Report as CompletionReport};
use crate::expr::{fresh_index, SumExpr, SymPoly};
use crate::linalg::nullspace;
use crate::mpoly::MPoly;
use crate::oracle::{EvalError, ExprEval, TowerEval};
use crate::ratfunc::RatFunc;
use crate::reduction::{homogeneous, solve_pt, Options, Policy, ReductionError};
use crate::shift::integer_roots;
use crate::tower::{Elem, Kind, SolutionBasis, Tower, TowerError, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Naive,
    Refined,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FrontendError {
    /// Input outside what the construction handles.
    Scope(String),
    Reduction(ReductionError),
    Tower(TowerError),
    Eval(EvalError),
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontendError::Scope(s) => f.write_str(s),
            FrontendError::Reduction(e) => write!(f, "{}", e),
            FrontendError::Tower(e) => write!(f, "{}", e),
            FrontendError::Eval(e) => write!(f, "{}", e),
        }
    }
}

impl From<ReductionError> for FrontendError {
    fn from(e: ReductionError) -> Self {
        FrontendError::Reduction(e)
    }
}

impl From<TowerError> for FrontendError {
    fn from(e: TowerError) -> Self {
        FrontendError::Tower(e)
    }
}

impl From<EvalError> for FrontendError {
    fn from(e: EvalError) -> Self {
        FrontendError::Eval(e)
    }
}

type Res<T> = Result<T, FrontendError>;

fn scope<T>(msg: String) -> Res<T> {
    Err(FrontendError::Scope(msg))
}

/// One registered sum `S(n) = sum(i, 1, n, F(i))`.
#[derive(Clone, Debug)]
pub struct Registration {
    /// `S` as an expression in the outer variable, in the user's notation.
    pub expr: SumExpr,
    /// `sigma(F)`.
    pub f: Elem,
    /// The telescoper found for `f`, before the constant is fixed.
    pub g: Elem,
    /// Element equal to `S(n)` for all `n >= 1`.
    pub rep: Elem,
    pub new_gens: Vec<Var>,
    /// Weight of a harmonic sum.
    pub weight: Option<u32>,
}

pub struct Frontend {
    pub tower: Tower,
    pub mode: Mode,
    pub opts: Options,
    /// Name of the outer variable, read as `k` in the tower.
    pub var: String,
    /// Put new Pi-generators in the ground field (depth 0).
    pub ground_products: bool,
    pub registrations: Vec<Registration>,
    cache: BTreeMap<String, usize>,
    display: BTreeMap<Var, SumExpr>,
    /// Generators the depth-optimal steps adjoined, over all calls.
    pub completion: CompletionReport,
}

impl Frontend {
    pub fn new(var: &str, params: Vec<String>, mode: Mode, opts: Options) -> Frontend {
        let mut tower = Tower::new(params);
        tower.kname = var.to_string();
        Frontend { tower, mode, opts, var: var.to_string(), ground_products: false, registrations: Vec::new(), cache: BTreeMap::new(), display: BTreeMap::new(), completion: CompletionReport::default() }
    }

    /// A frontend whose parameters are the free symbols of `exprs` other
    /// than `var`, in sorted order.
    pub fn for_exprs(var: &str, exprs: &[SumExpr], mode: Mode, opts: Options) -> Frontend {
        let mut params = BTreeSet::new();
        for e in exprs {
            params.extend(e.free_symbols());
        }
        params.remove(var);
        Frontend::new(var, params.into_iter().collect(), mode, opts)
    }

    fn param_index(&self, s: &str) -> Option<usize> {
        self.tower.params.iter().position(|p| p == s)
    }

    fn symbolic_params(&self) -> BTreeMap<String, RatFunc> {
        self.tower.params.iter().enumerate().map(|(i, p)| (p.clone(), RatFunc::var(i + 1))).collect()
    }

    /// Value of an expression free of the outer variable, as a rational
    /// function of the parameters.
    pub fn constant(&self, e: &SumExpr) -> Res<RatFunc> {
        let mut ev = ExprEval::<RatFunc>::new(self.symbolic_params());
        ev.eval(e).map_err(|err| FrontendError::Scope(format!("cannot evaluate {}: {}", e, err)))
    }

    /// Value of `e` at `var = n`, parameters symbolic.
    fn value_at(&self, e: &SumExpr, n: i64) -> Result<RatFunc, EvalError> {
        ExprEval::<RatFunc>::new(self.symbolic_params()).eval_at(e, &self.var, n)
    }

    pub fn elem_value_at(&self, e: &Elem, n: i64) -> Result<RatFunc, EvalError> {
        TowerEval::<RatFunc>::new(&self.tower, Vec::new()).value(e, n)
    }

    fn integer(&self, e: &SumExpr) -> Res<i64> {
        let v = self.constant(e)?;
        v.const_value().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64()).ok_or_else(|| FrontendError::Scope(format!("{} must be an integer", e)))
    }

    /// Element for `e`, read as a sequence in the outer variable. The element
    /// agrees with `e` at every `n >= 1` where both are defined.
    pub fn register(&mut self, e: &SumExpr) -> Res<Elem> {
        if !e.free_symbols().contains(&self.var) {
            return Ok(Elem::Base(self.constant(e)?));
        }
        use SumExpr::*;
        match e {
            Num(r) => Ok(Elem::rat(r.clone())),
            Sym(s) => {
                if *s == self.var {
                    Ok(Elem::k())
                } else {
                    match self.param_index(s) {
                        Some(i) => Ok(Elem::Base(RatFunc::var(i + 1))),
                        None => scope(format!("unknown symbol {}", s)),
                    }
                }
            }
            Add(xs) => {
                let mut acc = Elem::zero();
                for x in xs {
                    acc = acc.add(&self.register(x)?);
                }
                Ok(acc)
            }
            Mul(xs) => {
                let mut acc = Elem::one();
                for x in xs {
                    acc = acc.mul(&self.register(x)?);
                }
                Ok(acc)
            }
            Neg(x) => Ok(self.register(x)?.neg()),
            Div(a, b) => {
                let a = self.register(a)?;
                let b = self.register(b)?;
                a.div(&b).or_else(|_| scope(format!("division by zero in {}", e)))
            }
            Pow(b, x) => {
                if !x.free_symbols().contains(&self.var) {
                    let n = self.integer(x)?;
                    let b = self.register(b)?;
                    return b.pow(n).or_else(|_| scope(format!("division by zero in {}", e)));
                }
                if b.free_symbols().contains(&self.var) {
                    return scope(format!("{}: a power needs a base free of {}", e, self.var));
                }
                let c = self.constant(b)?;
                if c.is_zero() {
                    return scope(format!("{}: zero base", e));
                }
                let (a, _) = self.linear(x)?;
                let ratio = c.pow(a).unwrap();
                self.atom(e, ratio, "q")
            }
            Binom(a, b) => {
                let (a1, a0) = self.linear(a)?;
                let (b1, b0) = self.linear(b)?;
                let k = RatFunc::k();
                let big_a = k.scale(&int(a1)).add(&a0);
                let big_b = k.scale(&int(b1)).add(&b0);
                let one = RatFunc::one();
                // Gamma(A+1) / (Gamma(B+1) Gamma(A-B+1)) stepped by one
                let num = rising(&big_a.add(&one), a1);
                let d1 = rising(&big_b.add(&one), b1);
                let d2 = rising(&big_a.sub(&big_b).add(&one), a1 - b1);
                let ratio = num.div(&d1.mul(&d2)).unwrap();
                self.atom(e, ratio, "b")
            }
            Harmonic { indices, arg } => self.harmonic(indices, arg),
            Sum { .. } => self.sum(e, None),
            Prod { .. } => self.product(e),
        }
    }

    /// `(a, c)` with `e = a n + c`, `a` an integer.
    fn linear(&mut self, e: &SumExpr) -> Res<(i64, RatFunc)> {
        let r = match self.register(e)? {
            Elem::Base(r) => r,
            _ => return scope(format!("{} must be linear in {}", e, self.var)),
        };
        let c = r.eval_k(&Rat::zero()).ok_or_else(|| FrontendError::Scope(format!("{} must be linear in {}", e, self.var)))?;
        let slope = r.sub(&c).div(&RatFunc::k()).unwrap();
        match slope.const_value().filter(|s| s.is_integer()).and_then(|s| s.to_integer().to_i64()) {
            Some(a) => Ok((a, c)),
            None => scope(format!("{} must be linear in {} with an integer slope", e, self.var)),
        }
    }

    /// A hypergeometric term `e` with `e(n+1)/e(n) = ratio(n)`.
    fn atom(&mut self, e: &SumExpr, ratio: RatFunc, stem: &str) -> Res<Elem> {
        if ratio.is_zero() {
            return scope(format!("{} vanishes identically", e));
        }
        // start past every integer zero and pole of the ratio
        let mut j = 0i64;
        for p in [ratio.num(), ratio.den()] {
            for r in integer_roots_in_k(p) {
                j = j.max(r + 1);
            }
        }
        let alpha = ratio.shift(j);
        let (w, fresh) = self.product_generator(&alpha, stem, e)?;
        // e(n) = c sigma^-j(w)(n) with c fixed at the first usable point
        let mut c = None;
        for n0 in 0..8 {
            let (Ok(h), Ok(wv)) = (self.value_at(e, n0 + j), self.elem_value_at(&w, n0)) else { continue };
            if !h.is_zero() && !wv.is_zero() {
                c = Some(h.div(&wv).unwrap());
                break;
            }
        }
        let Some(c) = c else {
            return scope(format!("cannot fix the initial value of {}", e));
        };
        if let Some(v) = fresh {
            let shifted = e.subst(&self.var, &SumExpr::add(vec![SumExpr::sym(&self.var), SumExpr::num(j)]));
            let d = match e {
                SumExpr::Pow(b, x) if j == 0 => {
                    let (a, _) = self.linear(x)?;
                    SumExpr::pow((**b).clone(), SumExpr::mul(vec![SumExpr::num(a), SumExpr::sym(&self.var)]))
                }
                _ => {
                    let h0 = self.value_at(e, j)?;
                    SumExpr::div(shifted, self.ratfunc_expr(&h0))
                }
            };
            self.display.insert(v, d);
        }
        Ok(self.tower.sigma_pow(&w, -j).scale(&c))
    }

    /// An element `w` with `sigma(w) = alpha w`: an existing Pi-generator
    /// times a rational function, a rational function, or a new generator.
    fn product_generator(&mut self, alpha: &RatFunc, stem: &str, e: &SumExpr) -> Res<(Elem, Option<Var>)> {
        let one = RatFunc::one();
        if let Some(w) = homogeneous(&self.tower, &one, &alpha.neg(), None, self.opts.m_max) {
            return Ok((w, None));
        }
        let name = self.unique_name(stem);
        match adjoin_pi_in(&mut self.tower, &name, alpha, self.opts.m_max, self.ground_products) {
            Ok(v) => Ok((Elem::gen(v), Some(v))),
            Err(AdjoinError::NotProduct { m: 1, g }) => Ok((Elem::Base(g), None)),
            Err(AdjoinError::NotProduct { m, .. }) => scope(format!("{} needs a root of unity of order {}", e, m)),
            Err(AdjoinError::Telescopes(w)) => Ok((w, None)),
            Err(AdjoinError::Scope(r)) => Err(r.into()),
            Err(AdjoinError::Tower(t)) => Err(t.into()),
        }
    }

    fn unique_name(&self, stem: &str) -> String {
        if self.tower.gen_by_name(stem).is_none() {
            return stem.to_string();
        }
        (2..).map(|i| format!("{}_{}", stem, i)).find(|n| self.tower.gen_by_name(n).is_none()).unwrap()
    }

    fn harmonic(&mut self, indices: &[i64], arg: &SumExpr) -> Res<Elem> {
        if indices.is_empty() {
            return Ok(Elem::one());
        }
        if indices.iter().any(|m| *m <= 0) {
            return scope(format!("harmonic sums with nonpositive indices are not supported: {:?}", indices));
        }
        let mut used = BTreeSet::new();
        arg.all_names(&mut used);
        used.insert(self.var.clone());
        used.extend(self.tower.params.iter().cloned());
        let i = fresh_index(&used, "i");
        let inner = SumExpr::harmonic(indices[1..].to_vec(), SumExpr::sym(&i));
        let body = SumExpr::div(inner, SumExpr::pow(SumExpr::sym(&i), SumExpr::num(indices[0])));
        let sum = SumExpr::sum(&i, SumExpr::num(1), arg.clone(), body);
        let hint = SumExpr::harmonic(indices.to_vec(), SumExpr::sym(&self.var));
        let weight = indices.iter().map(|m| m.unsigned_abs() as u32).sum();
        self.sum(&sum, Some((hint, weight)))
    }

    fn product(&mut self, e: &SumExpr) -> Res<Elem> {
        let SumExpr::Prod { index, lower, upper, body } = e else { unreachable!() };
        if body.free_symbols().contains(&self.var) {
            return scope(format!("{}: the factor depends on the outer variable {}", e, self.var));
        }
        let (a, c) = self.linear(upper)?;
        let c = c.const_value().filter(|c| c.is_integer()).and_then(|c| c.to_integer().to_i64());
        let (1, Some(c)) = (a, c) else {
            return scope(format!("{}: upper bound must be {} plus an integer", e, self.var));
        };
        let _ = self.integer(lower)?;
        let factor = match self.register(&body.subst(index, &SumExpr::sym(&self.var)))? {
            Elem::Base(r) => r,
            _ => return scope(format!("{}: only rational factors are supported", e)),
        };
        self.atom(e, factor.shift(c + 1), "p")
    }

    /// `sum(i, L, n + c, body)`; `hint` names the canonical sum.
    fn sum(&mut self, e: &SumExpr, hint: Option<(SumExpr, u32)>) -> Res<Elem> {
        let SumExpr::Sum { index, lower, upper, body } = e else { unreachable!() };
        if body.free_symbols().contains(&self.var) {
            return scope(format!("{}: the summand depends on the outer variable {}", e, self.var));
        }
        let (a, c) = self.linear(upper)?;
        let c = c.const_value().filter(|c| c.is_integer()).and_then(|c| c.to_integer().to_i64());
        let (1, Some(c)) = (a, c) else {
            return scope(format!("{}: upper bound must be {} plus an integer", e, self.var));
        };
        let lo = self.integer(lower)?;
        let f_expr = body.subst(index, &SumExpr::sym(&self.var));
        let key = f_expr.to_string();
        let rep = match self.cache.get(&key) {
            Some(&i) => self.registrations[i].rep.clone(),
            None => {
                let canon = SumExpr::sum(index, SumExpr::num(1), SumExpr::sym(&self.var), (**body).clone());
                let (display, weight) = match hint {
                    Some((h, w)) => (h, Some(w)),
                    None => (canon.clone(), None),
                };
                let i = self.new_sum(&canon, &f_expr, display, weight)?;
                self.cache.insert(key, i);
                self.registrations[i].rep.clone()
            }
        };
        let mut out = self.tower.sigma_pow(&rep, c);
        // sum from L instead of 1
        if lo >= 2 {
            let head = SumExpr::sum(index, SumExpr::num(1), SumExpr::num(lo - 1), (**body).clone());
            out = out.sub(&Elem::Base(self.constant(&head)?));
        } else if lo <= 0 {
            let head = SumExpr::sum(index, SumExpr::num(lo), SumExpr::num(0), (**body).clone());
            out = out.add(&Elem::Base(self.constant(&head)?));
        }
        Ok(out)
    }

    fn new_sum(&mut self, canon: &SumExpr, f_expr: &SumExpr, display: SumExpr, weight: Option<u32>) -> Res<usize> {
        let summand = self.register(f_expr)?;
        let f = self.tower.sigma(&summand);
        let before: BTreeSet<Var> = self.tower.gens().iter().map(|g| g.var).collect();
        let g = match self.mode {
            Mode::Naive => {
                let basis = solve_pt(&mut self.tower, core::slice::from_ref(&f), Policy::Naive, &self.opts)?;
                let found = basis.nontrivial().find(|(c, _)| !c[0].is_zero()).map(|(c, w)| w.scale(&c[0].inv().unwrap()));
                match found {
                    Some(w) => w,
                    None => {
                        // named below, once the constant is fixed
                        let name = self.unique_name("t");
                        let t = self.tower.push(&name, Kind::Sigma, f.clone())?;
                        Elem::gen(t)
                    }
                }
            }
            Mode::Refined => {
                let r = telescope_depth_optimal(&mut self.tower, &f, &self.opts)?;
                r.g
            }
        };
        let new_gens: Vec<Var> = self.tower.gens().iter().map(|g| g.var).filter(|v| !before.contains(v)).collect();
        self.completion.new_gens.extend(new_gens.iter().copied());
        let rep = self.fix_constant(&g, canon)?;
        // a new generator that is the sum itself up to scaling takes its name
        if let Some((v, lambda, d)) = affine_in_new(&rep, &new_gens) {
            let shifted = SumExpr::sub(display.clone(), self.ratfunc_expr(&d));
            let lam = self.ratfunc_expr(&lambda);
            self.display.insert(v, SumExpr::div(shifted, lam));
            let name = self.sum_name(&display);
            self.tower.rename(v, &name);
        }
        self.registrations.push(Registration { expr: display, f, g, rep, new_gens, weight });
        Ok(self.registrations.len() - 1)
    }

    fn sum_name(&self, display: &SumExpr) -> String {
        let stem = match display {
            SumExpr::Harmonic { indices, .. } => {
                let parts: Vec<String> = indices.iter().map(|m| m.to_string()).collect();
                if indices.iter().all(|m| (1..10).contains(m)) {
                    format!("s{}", parts.concat())
                } else {
                    format!("s{}", parts.join("_"))
                }
            }
            _ => "s".to_string(),
        };
        self.unique_name(&stem)
    }

    /// `g + (S(n0) - g(n0))` at the first `n0 >= 1` where both are defined.
    fn fix_constant(&self, g: &Elem, canon: &SumExpr) -> Res<Elem> {
        let mut last = None;
        for n0 in 1..8 {
            match (self.value_at(canon, n0), self.elem_value_at(g, n0)) {
                (Ok(s), Ok(v)) => return Ok(g.add(&Elem::Base(s.sub(&v)))),
                (Err(e), _) | (_, Err(e)) => last = Some(e),
            }
        }
        Err(last.unwrap().into())
    }

    // ---- back to expressions ----

    /// Expression for a base element, `k` read as the outer variable.
    pub fn ratfunc_expr(&self, r: &RatFunc) -> SumExpr {
        let num = self.mpoly_expr(r.num());
        if r.den().is_one() {
            return num;
        }
        if let Some(c) = r.den().const_value() {
            return SumExpr::div(num, SumExpr::rat(c));
        }
        SumExpr::div(num, self.mpoly_expr(r.den()))
    }

    fn mpoly_expr(&self, p: &MPoly) -> SumExpr {
        let names = self.tower.var_names();
        let terms = p
            .terms()
            .rev()
            .map(|(m, c)| {
                let mut fs = vec![SumExpr::rat(c.clone())];
                for (i, e) in m.exps().iter().enumerate() {
                    if *e > 0 {
                        fs.push(SumExpr::pow(SumExpr::sym(&names[i]), SumExpr::num(*e as i64)));
                    }
                }
                SumExpr::mul(fs)
            })
            .collect();
        SumExpr::add(terms)
    }

    /// Expression for generator `v` as a sequence in the outer variable.
    pub fn gen_expr(&mut self, v: Var) -> SumExpr {
        if let Some(d) = self.display.get(&v) {
            return d.clone();
        }
        let g = self.tower.gen(v).clone();
        let step = match g.kind {
            Kind::Sigma => self.tower.sigma_inv(&g.defining),
            Kind::Pi => self.tower.sigma_inv(&g.defining),
        };
        let d = match g.kind {
            Kind::Sigma => self.harmonic_form(&step).unwrap_or_else(|| self.quantified(&step, true)),
            Kind::Pi => self.quantified(&step, false),
        };
        self.display.insert(v, d.clone());
        d
    }

    /// `sum(i, 1, n, step(i))` or the product analogue.
    fn quantified(&mut self, step: &Elem, is_sum: bool) -> SumExpr {
        let body = self.to_expr(step);
        let mut used = BTreeSet::new();
        body.all_names(&mut used);
        used.extend(self.tower.params.iter().cloned());
        used.insert(self.var.clone());
        let i = if used.contains("i") { fresh_index(&used, "i") } else { "i".to_string() };
        let body = body.subst(&self.var, &SumExpr::sym(&i));
        let n = SumExpr::sym(&self.var);
        if is_sum {
            SumExpr::sum(&i, SumExpr::num(1), n, body)
        } else {
            SumExpr::prod(&i, SumExpr::num(1), n, body)
        }
    }

    /// `c/k^a` or `c u/k^a` with `u` displayed as `S[X](n)` gives `c S[a,X](n)`.
    fn harmonic_form(&mut self, step: &Elem) -> Option<SumExpr> {
        let (c, inner) = match step {
            Elem::Base(r) => (r.clone(), Vec::new()),
            Elem::Ext(x) => {
                if x.den.len() != 1 || x.num.len() != 2 || !x.num[0].is_zero() {
                    return None;
                }
                let r = x.num[1].base()?.clone();
                match self.gen_expr(x.var) {
                    SumExpr::Harmonic { indices, arg } if *arg == SumExpr::sym(&self.var) => (r, indices),
                    _ => return None,
                }
            }
        };
        // c = lambda / k^a
        let den = c.den();
        let a = den.degree_in(0);
        if a < 1 || !c.num().is_constant() || den.nterms() != 1 {
            return None;
        }
        let lambda = c.num().const_value()? / den.lc();
        let mut indices = vec![a];
        indices.extend(inner);
        let h = SumExpr::harmonic(indices, SumExpr::sym(&self.var));
        Some(SumExpr::mul(vec![SumExpr::rat(lambda), h]))
    }

    /// Expression for a tower element. Polynomials in the generators are
    /// written term by term.
    pub fn to_expr(&mut self, e: &Elem) -> SumExpr {
        if let Some(terms) = self.tower.as_polynomial(e) {
            let mut out = Vec::new();
            for (mono, c) in terms {
                let mut fs = Vec::new();
                for (v, p) in mono {
                    let g = self.gen_expr(v);
                    fs.push(SumExpr::pow(g, SumExpr::num(p as i64)));
                }
                // factors in a fixed order, independent of insertion history
                fs.sort_by_cached_key(|f| f.to_string());
                fs.insert(0, self.ratfunc_expr(&c));
                out.push(SumExpr::mul(fs));
            }
            return SumExpr::add(out);
        }
        match e {
            Elem::Base(r) => self.ratfunc_expr(r),
            Elem::Ext(x) => {
                let t = self.gen_expr(x.var);
                let num = self.upoly_expr(&x.num, &t);
                let den = self.upoly_expr(&x.den, &t);
                SumExpr::div(num, den)
            }
        }
    }

    /// Folds subterms that are rational functions of the parameters into
    /// canonical form and writes `prod(l, 1, u, c)` with `c` free of `l` as
    /// `c^u`.
    pub fn tidy(&self, e: &SumExpr) -> SumExpr {
        use SumExpr::*;
        if !matches!(e, Num(_) | Sym(_)) && is_plain(e) && !e.free_symbols().contains(&self.var) {
            if let Ok(r) = self.constant(e) {
                return self.ratfunc_expr(&r);
            }
        }
        match e {
            Num(_) | Sym(_) => e.clone(),
            Add(xs) => self.collect_terms(xs.iter().map(|x| self.tidy(x)).collect()),
            Mul(xs) => SumExpr::mul(xs.iter().map(|x| self.tidy(x)).collect()),
            Neg(x) => SumExpr::neg(self.tidy(x)),
            Div(a, b) => SumExpr::div(self.tidy(a), self.tidy(b)),
            Pow(a, b) => SumExpr::pow(self.tidy(a), self.tidy(b)),
            Binom(a, b) => SumExpr::binom(self.tidy(a), self.tidy(b)),
            Harmonic { indices, arg } => SumExpr::harmonic(indices.clone(), self.tidy(arg)),
            Sum { index, lower, upper, body } => SumExpr::sum(index, self.tidy(lower), self.tidy(upper), self.tidy(body)),
            Prod { index, lower, upper, body } => {
                let body = self.tidy(body);
                if lower.is_num(1) && !body.free_symbols().contains(index) {
                    return SumExpr::pow(body, self.tidy(upper));
                }
                SumExpr::prod(index, self.tidy(lower), self.tidy(upper), body)
            }
        }
    }

    /// `c(params) * rest` for a term, when the plain factors evaluate.
    fn split_term(&self, t: &SumExpr) -> (RatFunc, Vec<SumExpr>) {
        let foldable = |x: &SumExpr| is_plain(x) && !x.free_symbols().contains(&self.var);
        match t {
            SumExpr::Neg(x) => {
                let (c, rest) = self.split_term(x);
                (c.neg(), rest)
            }
            SumExpr::Mul(fs) => {
                let mut c = RatFunc::one();
                let mut rest = Vec::new();
                for f in fs {
                    match self.constant(f) {
                        Ok(v) if foldable(f) => c = c.mul(&v),
                        _ => rest.push(f.clone()),
                    }
                }
                rest.sort_by_cached_key(|f| f.to_string());
                (c, rest)
            }
            _ => match self.constant(t) {
                Ok(v) if foldable(t) => (v, Vec::new()),
                _ => (RatFunc::one(), vec![t.clone()]),
            },
        }
    }

    /// Adds terms with the same non-rational part.
    fn collect_terms(&self, terms: Vec<SumExpr>) -> SumExpr {
        let mut order: Vec<String> = Vec::new();
        let mut groups: BTreeMap<String, (RatFunc, Vec<SumExpr>)> = BTreeMap::new();
        for t in &terms {
            let (c, rest) = self.split_term(t);
            let key = SumExpr::mul(rest.clone()).to_string();
            match groups.get_mut(&key) {
                Some(g) => g.0 = g.0.add(&c),
                None => {
                    order.push(key.clone());
                    groups.insert(key, (c, rest));
                }
            }
        }
        let mut out = Vec::new();
        for key in order {
            let (c, mut rest) = groups.remove(&key).unwrap();
            if c.is_zero() {
                continue;
            }
            rest.insert(0, self.ratfunc_expr(&c));
            out.push(SumExpr::mul(rest));
        }
        SumExpr::add(out)
    }

    fn upoly_expr(&mut self, p: &[Elem], t: &SumExpr) -> SumExpr {
        let mut terms = Vec::new();
        for (i, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(SumExpr::mul(vec![self.to_expr(c), SumExpr::pow(t.clone(), SumExpr::num(i as i64))]));
        }
        SumExpr::add(terms)
    }

    /// The tower element as a polynomial in the displayed generator
    /// expressions, when it is one with constant coefficients.
    pub fn sympoly(&mut self, e: &Elem) -> Option<SymPoly> {
        let terms = self.tower.as_polynomial(e)?;
        let mut out = SymPoly::new();
        for (mono, c) in terms {
            let c = c.as_constant_rat()?;
            let mut m = Vec::new();
            for (v, p) in mono {
                m.push((self.gen_expr(v).to_string(), p));
            }
            m.sort();
            out.insert(m, c);
        }
        Some(out)
    }

    /// Depths of `k` and every generator, in tower order.
    pub fn depth_profile(&self) -> Vec<u32> {
        let mut out = Vec::new();
        if self.tower.k_depth > 0 {
            out.push(self.tower.k_depth);
        }
        out.extend(self.tower.gens().iter().filter(|g| !g.ground).map(|g| g.depth));
        out
    }
}

trait ConstRat {
    fn as_constant_rat(&self) -> Option<Rat>;
}

impl ConstRat for RatFunc {
    fn as_constant_rat(&self) -> Option<Rat> {
        self.const_value()
    }
}

/// No quantifiers and only integer exponents.
fn is_plain(e: &SumExpr) -> bool {
    use SumExpr::*;
    match e {
        Num(_) | Sym(_) => true,
        Add(xs) | Mul(xs) => xs.iter().all(is_plain),
        Neg(x) => is_plain(x),
        Div(a, b) | Binom(a, b) => is_plain(a) && is_plain(b),
        Pow(a, b) => is_plain(a) && b.as_num().is_some(),
        Sum { .. } | Prod { .. } | Harmonic { .. } => false,
    }
}

/// `(1 + x)(2 + x)...` stepping: `Gamma(x + s)/Gamma(x)` for integer `s`.
fn rising(x: &RatFunc, s: i64) -> RatFunc {
    let mut acc = RatFunc::one();
    if s >= 0 {
        for j in 0..s {
            acc = acc.mul(&x.add(&RatFunc::from_int(j)));
        }
    } else {
        for j in 1..=-s {
            acc = acc.div(&x.sub(&RatFunc::from_int(j))).unwrap();
        }
    }
    acc
}

/// Integer roots in `k` that hold for all parameter values.
fn integer_roots_in_k(p: &MPoly) -> Vec<i64> {
    if !p.uses_var(0) {
        return Vec::new();
    }
    let mut q = p.clone();
    let nv = p.max_var().unwrap_or(0);
    for i in 1..=nv {
        q = q.eval_var(i, &rat(7919 + 104 * i as i64, 97));
    }
    let Some(u) = q.as_univariate(0) else { return Vec::new() };
    integer_roots(&u)
        .into_iter()
        .filter_map(|r| r.to_i64())
        .filter(|r| p.eval_var(0, &int(*r)).is_zero())
        .collect()
}

/// `rep = lambda v + d` for some new generator `v` and constants.
fn affine_in_new(rep: &Elem, new_gens: &[Var]) -> Option<(Var, RatFunc, RatFunc)> {
    let Elem::Ext(x) = rep else { return None };
    if !new_gens.contains(&x.var) || x.den.len() != 1 || x.num.len() != 2 {
        return None;
    }
    let lambda = x.num[1].as_constant()?.clone();
    let d = x.num[0].as_constant()?.clone();
    Some((x.var, lambda, d))
}

// ---- relations ----

/// An input sum written as a polynomial in earlier symbols.
#[derive(Clone, Debug)]
pub struct Relation {
    /// Position of the sum in the input list.
    pub input: usize,
    pub lhs: SumExpr,
    pub rhs: SumExpr,
    pub poly: SymPoly,
}

#[derive(Clone, Debug)]
pub struct RelationsOutcome {
    /// `(input sum, representation)` for every input.
    pub representations: Vec<(SumExpr, SumExpr)>,
    pub relations: Vec<Relation>,
    /// Registered sums kept as independent symbols, in registration order.
    pub symbols: Vec<SumExpr>,
    pub depth_profile: Vec<u32>,
}

/// Registers `sums` one after another in one shared tower and reports which
/// are polynomials in the sums registered before them.
///
/// A registered sum is a symbol unless its representation lies in the field
/// built before it and a weight-homogeneous polynomial in earlier symbols
/// matches it (harmonic sums); other sums are tested for a linear relation.
pub fn find_relations(fe: &mut Frontend, sums: &[SumExpr]) -> Res<RelationsOutcome> {
    let mut input_regs = Vec::new();
    let mut representations = Vec::new();
    for s in sums {
        let rep = fe.register(s)?;
        let lhs = s.clone();
        representations.push((lhs, fe.to_expr(&rep)));
        input_regs.push(registration_of(fe, s));
    }
    let mut symbols: Vec<usize> = Vec::new();
    let mut relations = Vec::new();
    for i in 0..fe.registrations.len() {
        let reg = fe.registrations[i].clone();
        let uses_new = reg.rep.vars().iter().any(|v| reg.new_gens.contains(v));
        let found = if uses_new { None } else { express(fe, &reg, &symbols) };
        match found {
            None => symbols.push(i),
            Some(poly) => {
                for (input, r) in input_regs.iter().enumerate() {
                    if *r == Some(i) {
                        let names: BTreeMap<String, SumExpr> = symbols.iter().map(|&s| (fe.registrations[s].expr.to_string(), fe.registrations[s].expr.clone())).collect();
                        let rhs = SumExpr::from_sympoly(&poly, &|s| names.get(s).cloned().unwrap_or_else(|| SumExpr::sym(s)));
                        relations.push(Relation { input, lhs: fe.registrations[i].expr.clone(), rhs, poly: poly.clone() });
                    }
                }
            }
        }
    }
    let symbols = symbols.iter().map(|&s| fe.registrations[s].expr.clone()).collect();
    Ok(RelationsOutcome { representations, relations, symbols, depth_profile: fe.depth_profile() })
}

fn registration_of(fe: &Frontend, s: &SumExpr) -> Option<usize> {
    let key = match s {
        SumExpr::Harmonic { indices, arg } if **arg == SumExpr::sym(&fe.var) => SumExpr::harmonic(indices.clone(), arg.as_ref().clone()),
        SumExpr::Sum { index, lower, upper, body } if lower.is_num(1) && **upper == SumExpr::sym(&fe.var) => SumExpr::sum(index, SumExpr::num(1), SumExpr::sym(&fe.var), (**body).clone()),
        _ => return None,
    };
    fe.registrations.iter().position(|r| r.expr == key)
}

/// Monomials of total weight `w` over `(symbol, weight)` pairs, as index
/// multisets.
fn monomials_of_weight(weights: &[u32], w: u32, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if w == 0 {
        out.push(cur.clone());
        return;
    }
    for i in from..weights.len() {
        if weights[i] > 0 && weights[i] <= w {
            cur.push(i);
            monomials_of_weight(weights, w - weights[i], i, cur, out);
            cur.pop();
        }
    }
}

/// Rational coefficients writing `reg.rep` in the symbols, if they exist.
fn express(fe: &mut Frontend, reg: &Registration, symbols: &[usize]) -> Option<SymPoly> {
    let syms: Vec<Registration> = symbols.iter().map(|&s| fe.registrations[s].clone()).collect();
    let monos: Vec<Vec<usize>> = match reg.weight {
        Some(w) => {
            let weights: Vec<u32> = syms.iter().map(|s| s.weight.unwrap_or(0)).collect();
            let mut out = Vec::new();
            monomials_of_weight(&weights, w, 0, &mut Vec::new(), &mut out);
            out
        }
        None => {
            let mut out: Vec<Vec<usize>> = (0..syms.len()).map(|i| vec![i]).collect();
            out.push(Vec::new());
            out
        }
    };
    if monos.is_empty() {
        return None;
    }
    let mut columns = Vec::with_capacity(monos.len() + 1);
    for m in &monos {
        let mut p = Elem::one();
        for &i in m {
            p = p.mul(&syms[i].rep);
        }
        columns.push(fe.tower.as_polynomial(&p)?);
    }
    columns.push(fe.tower.as_polynomial(&reg.rep)?);
    let mut rows: BTreeMap<Vec<(Var, u32)>, Vec<RatFunc>> = BTreeMap::new();
    let ncols = columns.len();
    for (j, col) in columns.into_iter().enumerate() {
        for (mono, c) in col {
            rows.entry(mono).or_insert_with(|| vec![RatFunc::zero(); ncols])[j] = c;
        }
    }
    let matrix: Vec<Vec<RatFunc>> = rows.into_values().collect();
    let ns = nullspace(&matrix, ncols);
    let v = ns.into_iter().find(|v| !v[ncols - 1].is_zero())?;
    let scale = v[ncols - 1].neg().inv().unwrap();
    let mut poly = SymPoly::new();
    for (j, m) in monos.iter().enumerate() {
        let c = v[j].mul(&scale);
        if c.is_zero() {
            continue;
        }
        let c = c.const_value()?;
        let mut key: BTreeMap<String, u32> = BTreeMap::new();
        for &i in m {
            *key.entry(syms[i].expr.to_string()).or_insert(0) += 1;
        }
        poly.insert(key.into_iter().collect(), c);
    }
    Some(poly)
}

// ---- telescoping ----

#[derive(Clone, Debug)]
pub struct Telescoped {
    /// The summand as a tower element.
    pub f: Elem,
    /// `sigma(g) - g = f`.
    pub g: Elem,
    pub depth_f: u32,
    pub depth_g: u32,
}

/// A telescoper for `summand`, read in the frontend variable. `None` when
/// naive mode finds none in the tower the summand lives in.
pub fn telescope(fe: &mut Frontend, summand: &SumExpr) -> Res<Option<Telescoped>> {
    let f = fe.register(summand)?;
    let before: BTreeSet<Var> = fe.tower.gens().iter().map(|g| g.var).collect();
    let g = match fe.mode {
        Mode::Naive => {
            let basis = solve_pt(&mut fe.tower, core::slice::from_ref(&f), Policy::Naive, &fe.opts)?;
            let found = basis.nontrivial().find(|(c, _)| !c[0].is_zero()).map(|(c, w)| w.scale(&c[0].inv().unwrap()));
            match found {
                Some(g) => g,
                None => return Ok(None),
            }
        }
        Mode::Refined => telescope_depth_optimal(&mut fe.tower, &f, &fe.opts)?.g,
    };
    let new: Vec<Var> = fe.tower.gens().iter().map(|g| g.var).filter(|v| !before.contains(v)).collect();
    fe.completion.new_gens.extend(new);
    let depth_f = fe.tower.depth(&f);
    let depth_g = fe.tower.depth(&g);
    Ok(Some(Telescoped { f, g, depth_f, depth_g }))
}

// ---- simplification ----

#[derive(Clone, Debug)]
pub struct Simplified {
    pub expr: SumExpr,
    pub rep: Elem,
    pub depth: u32,
    pub naive_depth: u32,
}

/// Depth-minimal form of `e`, with the depth the naive construction reaches.
pub fn simplify(refined: &mut Frontend, naive: &mut Frontend, e: &SumExpr) -> Res<Simplified> {
    let nrep = naive.register(e)?;
    let naive_depth = naive.tower.depth(&nrep);
    let rep = refined.register(e)?;
    let depth = refined.tower.depth(&rep);
    let expr = refined.to_expr(&rep);
    Ok(Simplified { expr, rep, depth, naive_depth })
}

// ---- creative telescoping ----

#[derive(Clone, Debug)]
pub struct Recurrence {
    pub order: usize,
    /// `c_i` in `sum_i c_i S(m + i) = rhs(m)`, as rational functions of the
    /// parameters (the recurrence variable is one of them).
    pub coeffs: Vec<RatFunc>,
    pub coeff_exprs: Vec<SumExpr>,
    pub rhs: SumExpr,
    /// The telescoper: `sigma(g) - g = sum_i c_i F(m + i, k)`.
    pub g: Elem,
    pub f: Vec<Elem>,
    /// Closed form of `S(m)` for a first-order recurrence.
    pub closed_form: Option<SumExpr>,
    pub basis: SolutionBasis,
}

/// Searches a recurrence in `param` for `sum(k, L, param + u, F(param, k))`
/// of order `1..=max_order`, the summand shifts registered in `fe` whose
/// outer variable is the summation index.
pub fn creative_telescoping(fe: &mut Frontend, e: &SumExpr, param: &str, max_order: usize) -> Res<Option<Recurrence>> {
    let SumExpr::Sum { index, lower, upper, body } = e else {
        return scope(format!("{} is not a sum", e));
    };
    if *index != fe.var {
        return scope(format!("summation index {} must be the frontend variable {}", index, fe.var));
    }
    if fe.param_index(param).is_none() {
        return scope(format!("{} is not a parameter", param));
    }
    let lo = fe.integer(lower)?;
    let m = SumExpr::sym(param);
    let u = {
        let d = SumExpr::sub((**upper).clone(), m.clone());
        if d.free_symbols().contains(index) {
            return scope(format!("upper bound {} must be {} plus an integer", upper, param));
        }
        fe.integer(&d).or_else(|_| scope(format!("upper bound {} must be {} plus an integer", upper, param)))?
    };
    let shifted = |i: i64| body.subst(param, &SumExpr::add(vec![m.clone(), SumExpr::num(i)]));
    let mut f = Vec::new();
    for order in 1..=max_order {
        while f.len() <= order {
            let i = f.len() as i64;
            f.push(fe.register(&shifted(i))?);
        }
        let basis = match fe.mode {
            Mode::Refined => {
                let (b, rep) = parameterized_telescope(&mut fe.tower, &f, &fe.opts)?;
                fe.completion.new_gens.extend(rep.new_gens);
                b
            }
            Mode::Naive => solve_pt(&mut fe.tower, &f, Policy::Naive, &fe.opts)?,
        };
        let Some((c, g)) = basis.nontrivial().next().cloned() else { continue };
        // normalize the leading coefficient
        let lead = c.iter().rposition(|x| !x.is_zero()).unwrap();
        let inv = c[lead].inv().unwrap();
        let c: Vec<RatFunc> = c.iter().map(|x| x.mul(&inv)).collect();
        let g = g.scale(&inv);
        // sum k = L..m-1 of the telescoping equation, then add the tail of
        // each S(m + i) from k = m to m + u + i
        let gexpr = fe.to_expr(&g);
        let g_top = gexpr.subst(index, &m);
        let g_low = fe.elem_value_at(&g, lo).map(|v| fe.ratfunc_expr(&v)).unwrap_or_else(|_| gexpr.subst(index, &SumExpr::num(lo)));
        let mut rhs = vec![g_top, SumExpr::neg(g_low)];
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let mut tail = Vec::new();
            for j in 0..=(u + i as i64) {
                tail.push(shifted(i as i64).subst(index, &SumExpr::add(vec![m.clone(), SumExpr::num(j)])));
            }
            rhs.push(SumExpr::mul(vec![fe.ratfunc_expr(ci), SumExpr::add(tail)]));
        }
        let rhs = fe.tidy(&SumExpr::add(rhs));
        let coeff_exprs: Vec<SumExpr> = c.iter().map(|x| fe.ratfunc_expr(x)).collect();
        let closed_form = if order == 1 { Some(fe.tidy(&first_order_solution(fe, e, param, &coeff_exprs, &rhs)?)) } else { None };
        return Ok(Some(Recurrence { order, coeffs: c, coeff_exprs, rhs, g, f, closed_form, basis }));
    }
    Ok(None)
}

/// `c0(m) S(m) + c1(m) S(m+1) = r(m)` solved from `S(0)`:
/// `S(m) = P(m) (S(0) + sum(j, 0, m-1, r(j) / (c1(j) P(j+1))))` with
/// `P(m) = prod(l, 1, m, -c0(l-1)/c1(l-1))`.
fn first_order_solution(fe: &Frontend, e: &SumExpr, param: &str, c: &[SumExpr], rhs: &SumExpr) -> Res<SumExpr> {
    let mut used = BTreeSet::new();
    e.all_names(&mut used);
    rhs.all_names(&mut used);
    used.insert(param.to_string());
    let j = fresh_index(&used, "j");
    used.insert(j.clone());
    let l = fresh_index(&used, "l");
    let at = |x: &SumExpr, v: SumExpr| x.subst(param, &v);
    let lm1 = SumExpr::sub(SumExpr::sym(&l), SumExpr::num(1));
    let ratio = SumExpr::neg(SumExpr::div(at(&c[0], lm1.clone()), at(&c[1], lm1)));
    let p = |upper: SumExpr| SumExpr::prod(&l, SumExpr::num(1), upper, ratio.clone());
    let s0 = fe.value_at_param(e, param, 0)?;
    let jv = SumExpr::sym(&j);
    let term = SumExpr::div(at(rhs, jv.clone()), SumExpr::mul(vec![at(&c[1], jv.clone()), p(SumExpr::add(vec![jv, SumExpr::num(1)]))]));
    let tail = SumExpr::sum(&j, SumExpr::num(0), SumExpr::sub(SumExpr::sym(param), SumExpr::num(1)), term);
    Ok(SumExpr::mul(vec![p(SumExpr::sym(param)), SumExpr::add(vec![fe.ratfunc_expr(&s0), tail])]))
}

impl Frontend {
    fn value_at_param(&self, e: &SumExpr, param: &str, n: i64) -> Res<RatFunc> {
        let mut ev = ExprEval::<RatFunc>::new(self.symbolic_params());
        Ok(ev.eval_at(e, param, n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{parse_assignment, verify_identity, Side};

    fn s(x: &str) -> SumExpr {
        SumExpr::sym(x)
    }

    fn h(ix: &[i64]) -> SumExpr {
        SumExpr::harmonic(ix.to_vec(), s("n"))
    }

    #[test]
    fn constants_leave_the_tower_alone() {
        let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
        assert_eq!(fe.register(&SumExpr::num(5)).unwrap(), Elem::int(5));
        assert!(fe.tower.is_empty());
    }

    #[test]
    fn s42_naive_tower() {
        let mut fe = Frontend::new("n", Vec::new(), Mode::Naive, Options::default());
        let rep = fe.register(&h(&[4, 2])).unwrap();
        let names: Vec<&str> = fe.tower.gens().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["s2", "s42"]);
        let s2 = fe.tower.gen_by_name("s2").unwrap().var;
        let s42 = fe.tower.gen_by_name("s42").unwrap().var;
        let k1 = RatFunc::k().add(&RatFunc::one()).pow(-4).unwrap();
        assert_eq!(fe.tower.gen(s42).defining, fe.tower.sigma(&Elem::gen(s2)).scale(&k1));
        assert_eq!(rep, Elem::gen(s42));
    }

    #[test]
    fn harmonic_pair_by_refined_registration() {
        let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
        fe.register(&h(&[4, 2])).unwrap();
        let rep = fe.register(&h(&[2, 4])).unwrap();
        let got = fe.sympoly(&rep).unwrap();
        let want = SumExpr::sub(SumExpr::add(vec![h(&[6]), SumExpr::mul(vec![h(&[2]), h(&[4])])]), h(&[4, 2]));
        assert_eq!(got, want.to_sympoly().unwrap());
        assert!(fe.tower.gens().iter().all(|g| g.depth <= 3));
    }

    #[test]
    fn round_trip_through_expressions() {
        let inner = SumExpr::sum("i", SumExpr::num(1), s("k"), SumExpr::mul(vec![SumExpr::pow(s("x"), SumExpr::sub(s("i"), SumExpr::num(1))), SumExpr::binom(SumExpr::add(vec![s("m"), s("i"), SumExpr::num(-1)]), s("m"))]));
        let lhs = SumExpr::sum("k", SumExpr::num(1), s("K"), SumExpr::div(inner, SumExpr::add(vec![s("k"), s("m")])));
        let mut fe = Frontend::for_exprs("K", &[lhs.clone()], Mode::Refined, Options::default());
        let rep = fe.register(&lhs).unwrap();
        assert_eq!(fe.tower.depth(&rep), 3);
        let back = fe.to_expr(&rep);
        let asg = [parse_assignment("m=2,x=1/2").unwrap(), parse_assignment("m=3,x=5/7").unwrap()];
        let r = verify_identity(Side::Expr(&lhs, "K"), Side::Expr(&back, "K"), (1, 12), &asg);
        assert!(r.pass(), "{} vs {}: {:?}", lhs, back, r.first_failure());
        let r = verify_identity(Side::Expr(&lhs, "K"), Side::Elem(&rep, &fe.tower), (1, 12), &asg);
        assert!(r.pass(), "{:?}", r.first_failure());
    }

    #[test]
    fn lower_bounds_and_shifted_upper_bounds() {
        let body = SumExpr::div(SumExpr::num(1), SumExpr::pow(s("i"), SumExpr::num(2)));
        let e = SumExpr::sum("i", SumExpr::num(3), SumExpr::add(vec![s("n"), SumExpr::num(2)]), body);
        let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
        let rep = fe.register(&e).unwrap();
        let r = verify_identity(Side::Expr(&e, "n"), Side::Elem(&rep, &fe.tower), (1, 15), &[Default::default()]);
        assert!(r.pass(), "{:?}", r.first_failure());
    }

    #[test]
    fn products_become_pi_generators() {
        let e = SumExpr::prod("i", SumExpr::num(1), s("n"), SumExpr::div(SumExpr::add(vec![s("i"), SumExpr::num(1)]), SumExpr::mul(vec![SumExpr::num(2), s("i")])));
        let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
        let rep = fe.register(&e).unwrap();
        // (n+1)/2^n: the rational part is split off, 2^-n is a Pi-generator
        assert_eq!(fe.tower.len(), 1);
        let r = verify_identity(Side::Expr(&e, "n"), Side::Elem(&rep, &fe.tower), (0, 15), &[Default::default()]);
        assert!(r.pass(), "{:?}", r.first_failure());
    }

    #[test]
    fn outer_variable_in_a_summand_is_out_of_scope() {
        let e = SumExpr::sum("i", SumExpr::num(1), s("n"), SumExpr::div(s("n"), s("i")));
        let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
        assert!(matches!(fe.register(&e), Err(FrontendError::Scope(_))));
    }
}
