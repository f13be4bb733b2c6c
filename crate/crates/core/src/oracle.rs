//! Brute-force evaluation of sum expressions and tower elements.
//!
//! Expressions are summed directly; tower elements are evaluated by
//! unrolling each generator's first-order recurrence from its start value
//! (0 for sums, 1 for products, both at `n = 0`). Nothing here consults
//! the algebra, so agreement between the two is real evidence.
//!
//! Values are generic so the same code runs over numbers and over rational
//! functions in symbolic parameters; the frontend uses the latter to fix
//! additive constants without choosing parameter values.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{int, to_i64, Rat};
use crate::expr::SumExpr;
use crate::ratfunc::RatFunc;
use crate::tower::{Elem, Kind, Tower, Var};

pub type ParamAssignment = BTreeMap<String, Rat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    DivByZero { at: String },
    NotInteger { what: String },
    UnknownSymbol(String),
    Unsupported(String),
    Singular { generator: String, n: i64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DivByZero { at } => write!(f, "division by zero at {}", at),
            EvalError::NotInteger { what } => write!(f, "{} is not an integer", what),
            EvalError::UnknownSymbol(s) => write!(f, "no value for symbol {}", s),
            EvalError::Unsupported(s) => write!(f, "cannot evaluate {}", s),
            EvalError::Singular { generator, n } => write!(f, "recurrence of {} is singular at n = {}", generator, n),
        }
    }
}

/// A field the oracle can compute in.
pub trait Value: Clone + PartialEq {
    fn from_rat(r: Rat) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn as_rat(&self) -> Option<Rat>;
    /// Canonical text, used as a cache key and in diagnostics.
    fn key(&self) -> String;
    /// Evaluates a base element at `k = n`. `params` follows the tower's
    /// parameter order.
    fn eval_base(r: &RatFunc, n: i64, params: &[Self]) -> Option<Self>;

    fn as_int(&self) -> Option<i64> {
        self.as_rat().filter(|r| r.is_integer()).and_then(|r| to_i64(&r))
    }
}

impl Value for Rat {
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn key(&self) -> String {
        self.to_string()
    }
    fn eval_base(r: &RatFunc, n: i64, params: &[Self]) -> Option<Self> {
        let mut vals = vec![int(n)];
        vals.extend(params.iter().cloned());
        r.eval(&vals)
    }
}

/// Symbolic values: every parameter stays its own variable, so `params`
/// is ignored and only `k` is substituted.
impl Value for RatFunc {
    fn from_rat(r: Rat) -> Self {
        RatFunc::constant(r)
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        RatFunc::div(self, o).ok()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn as_rat(&self) -> Option<Rat> {
        self.const_value()
    }
    fn key(&self) -> String {
        format!("{:?}", self)
    }
    fn eval_base(r: &RatFunc, n: i64, _params: &[Self]) -> Option<Self> {
        r.eval_k(&int(n))
    }
}

fn int_of<V: Value>(v: &V, what: &SumExpr) -> Result<i64, EvalError> {
    v.as_int().ok_or_else(|| EvalError::NotInteger { what: what.to_string() })
}

fn pow_int<V: Value>(b: &V, e: i64, at: &SumExpr) -> Result<V, EvalError> {
    let mut acc = V::from_rat(Rat::one());
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(b);
    }
    if e < 0 {
        acc = V::from_rat(Rat::one()).div(&acc).ok_or_else(|| EvalError::DivByZero { at: at.to_string() })?;
    }
    Ok(acc)
}

/// `a (a-1) ... (a-j+1) / j!` for `j >= 0`.
fn falling_binom<V: Value>(a: &V, j: i64) -> V {
    let mut acc = V::from_rat(Rat::one());
    for i in 0..j {
        acc = acc.mul(&a.sub(&V::from_rat(int(i))));
        acc = acc.div(&V::from_rat(int(i + 1))).unwrap();
    }
    acc
}

/// Evaluates expressions for one parameter assignment, caching prefix sums
/// and harmonic sums across calls.
pub struct ExprEval<'e, V: Value> {
    symbols: BTreeMap<String, V>,
    env: Vec<(String, V)>,
    /// Keyed by node address, lower bound and the values of the body's
    /// free symbols; holds running partial sums or products.
    prefix: BTreeMap<(usize, String), Vec<V>>,
    free: BTreeMap<usize, Vec<String>>,
    harmonic: BTreeMap<Vec<i64>, Vec<Rat>>,
    _expr: core::marker::PhantomData<&'e SumExpr>,
}

impl<'e, V: Value> ExprEval<'e, V> {
    pub fn new(symbols: BTreeMap<String, V>) -> Self {
        ExprEval { symbols, env: Vec::new(), prefix: BTreeMap::new(), free: BTreeMap::new(), harmonic: BTreeMap::new(), _expr: core::marker::PhantomData }
    }

    /// Value of `e` with `var = n`.
    pub fn eval_at(&mut self, e: &'e SumExpr, var: &str, n: i64) -> Result<V, EvalError> {
        self.env.clear();
        self.env.push((var.to_string(), V::from_rat(int(n))));
        let r = self.eval(e);
        self.env.clear();
        r
    }

    fn lookup(&self, s: &str) -> Result<V, EvalError> {
        if let Some((_, v)) = self.env.iter().rev().find(|(x, _)| x == s) {
            return Ok(v.clone());
        }
        self.symbols.get(s).cloned().ok_or_else(|| EvalError::UnknownSymbol(s.to_string()))
    }

    pub fn eval(&mut self, e: &'e SumExpr) -> Result<V, EvalError> {
        use SumExpr::*;
        Ok(match e {
            Num(r) => V::from_rat(r.clone()),
            Sym(s) => self.lookup(s)?,
            Add(xs) => {
                let mut acc = V::from_rat(Rat::zero());
                for x in xs {
                    acc = acc.add(&self.eval(x)?);
                }
                acc
            }
            Mul(xs) => {
                let mut acc = V::from_rat(Rat::one());
                for x in xs {
                    acc = acc.mul(&self.eval(x)?);
                }
                acc
            }
            Neg(x) => V::from_rat(Rat::zero()).sub(&self.eval(x)?),
            Div(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                a.div(&b).ok_or_else(|| self.pole(e))?
            }
            Pow(b, x) => {
                let bv = self.eval(b)?;
                let xv = self.eval(x)?;
                let k = int_of(&xv, x)?;
                if k < 0 && bv.is_zero() {
                    return Err(self.pole(e));
                }
                pow_int(&bv, k, e)?
            }
            Binom(a, b) => {
                let av = self.eval(a)?;
                let bv = self.eval(b)?;
                if let Some(j) = bv.as_int() {
                    if j < 0 {
                        V::from_rat(Rat::zero())
                    } else {
                        falling_binom(&av, j)
                    }
                } else if let Some(j) = av.sub(&bv).as_int() {
                    if j < 0 {
                        V::from_rat(Rat::zero())
                    } else {
                        falling_binom(&av, j)
                    }
                } else {
                    return Err(EvalError::Unsupported(e.to_string()));
                }
            }
            Sum { index, lower, upper, body } | Prod { index, lower, upper, body } => {
                let is_sum = matches!(e, Sum { .. });
                let lo = self.eval(lower)?;
                let lo = int_of(&lo, lower)?;
                let hi = self.eval(upper)?;
                let hi = int_of(&hi, upper)?;
                self.quantifier(e, is_sum, index, lo, hi, body)?
            }
            Harmonic { indices, arg } => {
                let a = self.eval(arg)?;
                let n = int_of(&a, arg)?;
                if n < 0 {
                    return Err(EvalError::NotInteger { what: format!("{} (negative argument)", e) });
                }
                V::from_rat(self.harmonic_value(indices, n as usize)?)
            }
        })
    }

    fn pole(&self, e: &SumExpr) -> EvalError {
        let point: Vec<String> = self.env.iter().map(|(s, v)| format!("{} = {}", s, v.key())).collect();
        EvalError::DivByZero { at: format!("{} with {}", e, point.join(", ")) }
    }

    fn quantifier(&mut self, node: &'e SumExpr, is_sum: bool, index: &str, lo: i64, hi: i64, body: &'e SumExpr) -> Result<V, EvalError> {
        let neutral = V::from_rat(if is_sum { Rat::zero() } else { Rat::one() });
        if hi < lo {
            return Ok(neutral);
        }
        let addr = node as *const SumExpr as usize;
        let free = match self.free.get(&addr) {
            Some(f) => f.clone(),
            None => {
                let f: Vec<String> = body.free_symbols().into_iter().filter(|s| s != index).collect();
                self.free.insert(addr, f.clone());
                f
            }
        };
        let mut key = format!("{}", lo);
        for s in &free {
            key.push('|');
            key.push_str(&self.lookup(s)?.key());
        }
        let slot = (addr, key);
        let mut table = self.prefix.remove(&slot).unwrap_or_else(|| vec![neutral]);
        let need = (hi - lo + 1) as usize;
        let mut res = Ok(());
        while table.len() <= need {
            let i = lo + table.len() as i64 - 1;
            self.env.push((index.to_string(), V::from_rat(int(i))));
            let v = self.eval(body);
            self.env.pop();
            match v {
                Ok(v) => {
                    let last = table.last().unwrap();
                    table.push(if is_sum { last.add(&v) } else { last.mul(&v) });
                }
                Err(err) => {
                    res = Err(err);
                    break;
                }
            }
        }
        let out = table.get(need).cloned();
        self.prefix.insert(slot, table);
        res?;
        Ok(out.unwrap())
    }

    fn harmonic_value(&mut self, indices: &[i64], n: usize) -> Result<Rat, EvalError> {
        if indices.iter().any(|m| *m == 0) {
            return Err(EvalError::Unsupported(format!("harmonic sum with index 0 in {:?}", indices)));
        }
        if indices.is_empty() {
            return Ok(Rat::one());
        }
        let have = self.harmonic.get(indices).map_or(0, |t| t.len());
        if have <= n {
            let inner = if indices.len() > 1 {
                self.harmonic_value(&indices[1..], n)?;
                self.harmonic[&indices[1..]].clone()
            } else {
                vec![Rat::one(); n + 1]
            };
            let m = indices[0];
            let mut t = vec![Rat::zero()];
            for i in 1..=n {
                let mut term = pow_rat(i as i64, -m.abs()) * &inner[i];
                if m < 0 && i % 2 == 1 {
                    term = -term;
                }
                let next = t.last().unwrap() + term;
                t.push(next);
            }
            self.harmonic.insert(indices.to_vec(), t);
        }
        Ok(self.harmonic[indices][n].clone())
    }
}

fn pow_rat(b: i64, e: i64) -> Rat {
    crate::arith::pow(&int(b), e)
}

/// Direct value of `expr` at `var = n`.
pub fn eval_expr(expr: &SumExpr, var: &str, n: i64, params: &ParamAssignment) -> Result<Rat, EvalError> {
    ExprEval::new(params.clone()).eval_at(expr, var, n)
}

/// Evaluates tower elements for one parameter assignment, keeping the
/// unrolled generator sequences.
pub struct TowerEval<'t, V: Value> {
    tower: &'t Tower,
    params: Vec<V>,
    tables: BTreeMap<Var, Vec<V>>,
}

impl<'t, V: Value> TowerEval<'t, V> {
    /// `params` in the tower's parameter order.
    pub fn new(tower: &'t Tower, params: Vec<V>) -> Self {
        TowerEval { tower, params, tables: BTreeMap::new() }
    }

    pub fn base(&self, r: &RatFunc, n: i64) -> Result<V, EvalError> {
        V::eval_base(r, n, &self.params).ok_or_else(|| EvalError::DivByZero { at: format!("k = {} in {}", n, r.to_string_with(&self.tower.var_names())) })
    }

    /// Value of generator `v` at `n >= 0`.
    pub fn gen_value(&mut self, v: Var, n: i64) -> Result<V, EvalError> {
        if n < 0 {
            return Err(EvalError::Unsupported(format!("{} at negative n = {}", self.tower.gen(v).name, n)));
        }
        let n = n as usize;
        let g = self.tower.gen(v).clone();
        let mut table = self.tables.remove(&v).unwrap_or_else(|| {
            vec![V::from_rat(match g.kind {
                Kind::Sigma => Rat::zero(),
                Kind::Pi => Rat::one(),
            })]
        });
        let mut res = Ok(());
        while table.len() <= n {
            let j = table.len() as i64 - 1;
            let step = self.value(&g.defining, j).map_err(|e| match e {
                EvalError::DivByZero { .. } => EvalError::Singular { generator: g.name.clone(), n: j },
                e => e,
            });
            match step {
                Ok(s) => {
                    let last = table.last().unwrap();
                    table.push(match g.kind {
                        Kind::Sigma => last.add(&s),
                        Kind::Pi => last.mul(&s),
                    });
                }
                Err(e) => {
                    res = Err(e);
                    break;
                }
            }
        }
        let out = table.get(n).cloned();
        self.tables.insert(v, table);
        res?;
        Ok(out.unwrap())
    }

    /// Value of `e` at `n`, with `k` read as `n`.
    pub fn value(&mut self, e: &Elem, n: i64) -> Result<V, EvalError> {
        match e {
            Elem::Base(r) => self.base(r, n),
            Elem::Ext(x) => {
                let t = self.gen_value(x.var, n)?;
                let num = self.horner(&x.num, &t, n)?;
                let den = self.horner(&x.den, &t, n)?;
                num.div(&den).ok_or_else(|| EvalError::DivByZero { at: format!("n = {} in {}", n, self.tower.fmt_elem(e)) })
            }
        }
    }

    fn horner(&mut self, p: &[Elem], t: &V, n: i64) -> Result<V, EvalError> {
        let mut acc = V::from_rat(Rat::zero());
        for c in p.iter().rev() {
            acc = acc.mul(t).add(&self.value(c, n)?);
        }
        Ok(acc)
    }
}

/// Tower parameter values from an assignment.
pub fn tower_params(tower: &Tower, params: &ParamAssignment) -> Result<Vec<Rat>, EvalError> {
    tower.params.iter().map(|p| params.get(p).cloned().ok_or_else(|| EvalError::UnknownSymbol(p.clone()))).collect()
}

/// Value of `e` at `n` by recurrence unrolling.
pub fn eval_elem(e: &Elem, tower: &Tower, n: i64, params: &ParamAssignment) -> Result<Rat, EvalError> {
    TowerEval::new(tower, tower_params(tower, params)?).value(e, n)
}

/// One side of an identity.
#[derive(Clone, Copy)]
pub enum Side<'a> {
    /// An expression in the named variable.
    Expr(&'a SumExpr, &'a str),
    Elem(&'a Elem, &'a Tower),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub n: i64,
    pub assignment: usize,
    pub lhs: Option<Rat>,
    pub rhs: Option<Rat>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub range: (i64, i64),
    pub assignments: Vec<ParamAssignment>,
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    pub fn first_failure(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

enum SideEval<'a> {
    Expr(ExprEval<'a, Rat>, &'a SumExpr, &'a str),
    Elem(Result<TowerEval<'a, Rat>, EvalError>, &'a Elem),
}

impl<'a> SideEval<'a> {
    fn new(s: Side<'a>, params: &ParamAssignment) -> Self {
        match s {
            Side::Expr(e, var) => SideEval::Expr(ExprEval::new(params.clone()), e, var),
            Side::Elem(e, t) => SideEval::Elem(tower_params(t, params).map(|p| TowerEval::new(t, p)), e),
        }
    }

    fn at(&mut self, n: i64) -> Result<Rat, EvalError> {
        match self {
            SideEval::Expr(ev, e, var) => ev.eval_at(e, var, n),
            SideEval::Elem(Ok(ev), e) => ev.value(e, n),
            SideEval::Elem(Err(err), _) => Err(err.clone()),
        }
    }
}

/// Compares both sides at every `n` in `range` (inclusive) under every
/// assignment. Evaluation errors are reported as failures.
pub fn verify_identity(lhs: Side<'_>, rhs: Side<'_>, range: (i64, i64), assignments: &[ParamAssignment]) -> Report {
    let mut report = Report { range, assignments: assignments.to_vec(), checked: 0, failures: Vec::new() };
    for (ai, a) in assignments.iter().enumerate() {
        let mut l = SideEval::new(lhs, a);
        let mut r = SideEval::new(rhs, a);
        for n in range.0..=range.1 {
            report.checked += 1;
            let (lv, rv) = (l.at(n), r.at(n));
            let failure = match (&lv, &rv) {
                (Ok(x), Ok(y)) if x == y => None,
                (Ok(_), Ok(_)) => Some(None),
                (Err(e), _) | (_, Err(e)) => Some(Some(e.to_string())),
            };
            if let Some(error) = failure {
                report.failures.push(Failure { n, assignment: ai, lhs: lv.ok(), rhs: rv.ok(), error });
            }
        }
    }
    report
}

/// Parses `name=value` pairs such as `m=2,x=1/2`.
pub fn parse_assignment(s: &str) -> Option<ParamAssignment> {
    let mut out = ParamAssignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=')?;
        out.insert(k.trim().to_string(), crate::arith::parse_rat(v.trim())?);
    }
    Some(out)
}

/// Rational value as a machine float; only for display of magnitudes.
pub fn approx(r: &Rat) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if r.is_negative() && n > 0.0 {
        -n / d
    } else {
        n / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::tower::tests::binomial_tower;

    fn s(x: &str) -> SumExpr {
        SumExpr::sym(x)
    }

    #[test]
    fn harmonic_values() {
        let p = ParamAssignment::new();
        let s2 = SumExpr::harmonic(vec![2], s("n"));
        let want = rat(1, 1) + rat(1, 4) + rat(1, 9) + rat(1, 16);
        assert_eq!(eval_expr(&s2, "n", 4, &p).unwrap(), want);
        assert_eq!(eval_expr(&SumExpr::harmonic(vec![1], s("n")), "n", 0, &p).unwrap(), rat(0, 1));
        // the explicit double sum agrees with the cumulative tables
        let inner = SumExpr::sum("j", SumExpr::num(1), s("i"), SumExpr::div(SumExpr::num(1), SumExpr::pow(s("j"), SumExpr::num(2))));
        let outer = SumExpr::sum("i", SumExpr::num(1), s("n"), SumExpr::div(inner, SumExpr::pow(s("i"), SumExpr::num(4))));
        let s42 = SumExpr::harmonic(vec![4, 2], s("n"));
        let r = verify_identity(Side::Expr(&outer, "n"), Side::Expr(&s42, "n"), (0, 12), &[p]);
        assert!(r.pass(), "{:?}", r);
    }

    #[test]
    fn harmonic_pair_holds_and_its_perturbation_fails() {
        let n = s("n");
        let h = |ix: &[i64]| SumExpr::harmonic(ix.to_vec(), n.clone());
        let lhs = h(&[2, 4]);
        let rhs = SumExpr::sub(SumExpr::add(vec![h(&[6]), SumExpr::mul(vec![h(&[2]), h(&[4])])]), h(&[4, 2]));
        let p = [ParamAssignment::new()];
        assert!(verify_identity(Side::Expr(&lhs, "n"), Side::Expr(&rhs, "n"), (1, 50), &p).pass());
        let bad = SumExpr::sub(SumExpr::mul(vec![h(&[2]), h(&[4])]), h(&[4, 2]));
        let r = verify_identity(Side::Expr(&lhs, "n"), Side::Expr(&bad, "n"), (1, 50), &p);
        assert_eq!(r.first_failure().unwrap().n, 1);
    }

    #[test]
    fn tower_generators_follow_their_sums() {
        let (tw, [_q, _b, s_var, _]) = binomial_tower();
        let im1 = SumExpr::sub(s("i"), SumExpr::num(1));
        let summand = SumExpr::mul(vec![SumExpr::pow(s("x"), im1.clone()), SumExpr::binom(SumExpr::add(vec![s("m"), im1]), s("m"))]);
        let sum = SumExpr::sum("i", SumExpr::num(1), s("n"), summand);
        let a = parse_assignment("m=2, x=1/2").unwrap();
        let r = verify_identity(Side::Elem(&Elem::gen(s_var), &tw), Side::Expr(&sum, "n"), (0, 20), &[a]);
        assert!(r.pass(), "{:?}", r);
    }

    #[test]
    fn symbolic_values_match_numeric() {
        let (tw, [_, _, s_var, _]) = binomial_tower();
        let mut sym = TowerEval::<RatFunc>::new(&tw, vec![RatFunc::var(1), RatFunc::var(2)]);
        let v = sym.value(&Elem::gen(s_var), 3).unwrap();
        let a = parse_assignment("m=3,x=5/7").unwrap();
        let num = eval_elem(&Elem::gen(s_var), &tw, 3, &a).unwrap();
        assert_eq!(v.eval(&[int(0), int(3), rat(5, 7)]).unwrap(), num);
    }

    #[test]
    fn poles_are_reported() {
        let e = SumExpr::sum("i", SumExpr::num(0), s("n"), SumExpr::div(SumExpr::num(1), s("i")));
        match eval_expr(&e, "n", 3, &ParamAssignment::new()) {
            Err(EvalError::DivByZero { at }) => assert!(at.contains("i = 0"), "{}", at),
            other => panic!("{:?}", other),
        }
    }
}
