use pisigma_core::expr::SumExpr;
use pisigma_core::frontend::{creative_telescoping, find_relations, simplify, Frontend, Mode};
use pisigma_core::oracle::{parse_assignment, verify_identity, ParamAssignment, Side};
use pisigma_core::reduction::Options;
use pisigma_core::tower::Kind;

fn s(x: &str) -> SumExpr {
    SumExpr::sym(x)
}

fn n(v: i64) -> SumExpr {
    SumExpr::num(v)
}

fn h(ix: &[i64], arg: &str) -> SumExpr {
    SumExpr::harmonic(ix.to_vec(), s(arg))
}

fn assignments() -> Vec<ParamAssignment> {
    vec![parse_assignment("m=2,x=1/2").unwrap(), parse_assignment("m=3,x=5/7").unwrap()]
}

/// x^(i-1) binom(m+i-1, m)
fn double_sum_inner_body(i: &str) -> SumExpr {
    let im1 = SumExpr::sub(s(i), n(1));
    SumExpr::mul(vec![SumExpr::pow(s("x"), im1.clone()), SumExpr::binom(SumExpr::add(vec![s("m"), im1]), s("m"))])
}

fn double_sum_lhs() -> SumExpr {
    let inner = SumExpr::sum("i", n(1), s("k"), double_sum_inner_body("i"));
    SumExpr::sum("k", n(1), s("K"), SumExpr::div(inner, SumExpr::add(vec![s("k"), s("m")])))
}

fn double_sum_rhs() -> SumExpr {
    let hsum = SumExpr::sum("k", n(1), s("K"), SumExpr::div(n(1), SumExpr::add(vec![s("k"), s("m")])));
    let ssum = SumExpr::sum("k", n(1), s("K"), double_sum_inner_body("k"));
    let inner = SumExpr::sum("i", n(1), SumExpr::sub(s("k"), n(1)), SumExpr::div(n(1), SumExpr::add(vec![s("m"), s("i")])));
    let last = SumExpr::sum("k", n(1), s("K"), SumExpr::mul(vec![double_sum_inner_body("k"), inner]));
    SumExpr::sub(SumExpr::mul(vec![hsum, ssum]), last)
}

#[test]
fn double_sum_rhs_matches_lhs_by_direct_summation() {
    let r = verify_identity(Side::Expr(&double_sum_lhs(), "K"), Side::Expr(&double_sum_rhs(), "K"), (1, 30), &assignments());
    assert!(r.pass(), "{:?}", r.first_failure());
}

#[test]
fn double_sum_depth_drops_from_four_to_three() {
    let lhs = double_sum_lhs();
    let mut refined = Frontend::for_exprs("K", &[lhs.clone()], Mode::Refined, Options::default());
    let mut naive = Frontend::for_exprs("K", &[lhs.clone()], Mode::Naive, Options::default());
    refined.tower.k_depth = 1;
    naive.tower.k_depth = 1;
    let out = simplify(&mut refined, &mut naive, &lhs).unwrap();
    assert_eq!(out.naive_depth, 4);
    assert_eq!(out.depth, 3);

    // the naive tower is q, b, s, S
    let kinds: Vec<(String, Kind, u32)> = naive.tower.gens().iter().map(|g| (g.name.clone(), g.kind, g.depth)).collect();
    assert_eq!(kinds.iter().map(|g| g.1).collect::<Vec<_>>(), [Kind::Pi, Kind::Pi, Kind::Sigma, Kind::Sigma]);
    assert_eq!(kinds.iter().map(|g| g.2).collect::<Vec<_>>(), [1, 2, 3, 4]);

    // the refined telescoper satisfies its equation exactly
    let reg = refined.registrations.last().unwrap();
    assert_eq!(refined.tower.sigma(&reg.g).sub(&reg.g), reg.f);
    assert!(refined.tower.gens().iter().all(|g| g.depth <= 3));

    let r = verify_identity(Side::Expr(&lhs, "K"), Side::Expr(&out.expr, "K"), (1, 30), &assignments());
    assert!(r.pass(), "{} : {:?}", out.expr, r.first_failure());
    let r = verify_identity(Side::Expr(&lhs, "K"), Side::Elem(&out.rep, &refined.tower), (1, 30), &assignments());
    assert!(r.pass(), "{:?}", r.first_failure());
}

#[test]
fn harmonic_pair_relation() {
    let sums = [h(&[4, 2], "n"), h(&[2, 4], "n")];
    let mut fe = Frontend::new("n", Vec::new(), Mode::Refined, Options::default());
    let out = find_relations(&mut fe, &sums).unwrap();
    assert!(out.relations.is_empty());
    let (lhs, rep) = &out.representations[1];
    assert_eq!(*lhs, sums[1]);
    let want = SumExpr::sub(SumExpr::add(vec![h(&[6], "n"), SumExpr::mul(vec![h(&[2], "n"), h(&[4], "n")])]), h(&[4, 2], "n"));
    assert_eq!(rep.to_sympoly(), want.to_sympoly());
    let r = verify_identity(Side::Expr(lhs, "n"), Side::Expr(rep, "n"), (1, 50), &[ParamAssignment::new()]);
    assert!(r.pass());
}

fn seven() -> Vec<SumExpr> {
    [&[4, 2][..], &[2, 4], &[2, 1, 1, 1, 1], &[1, 2, 1, 1, 1], &[1, 1, 2, 1, 1], &[1, 1, 1, 2, 1], &[1, 1, 1, 1, 2]].iter().map(|ix| h(ix, "N")).collect()
}

fn seven_sums_rhs() -> SumExpr {
    let t = |c: i64, fs: Vec<SumExpr>| {
        let mut v = vec![n(c)];
        v.extend(fs);
        SumExpr::mul(v)
    };
    let p = |e: SumExpr, k: i64| SumExpr::pow(e, n(k));
    let s1 = h(&[1], "N");
    let s2 = h(&[2], "N");
    let s4 = h(&[4], "N");
    let s111 = h(&[1, 1, 1], "N");
    let body = SumExpr::add(vec![
        t(2, vec![p(s1.clone(), 6)]),
        t(7, vec![s2.clone(), p(s1.clone(), 4)]),
        t(4, vec![p(s2.clone(), 2), p(s1.clone(), 2)]),
        t(8, vec![h(&[1, 1, 1, 2], "N"), s1.clone()]),
        t(8, vec![h(&[1, 1, 2, 1], "N"), s1.clone()]),
        t(8, vec![h(&[1, 2, 1, 1], "N"), s1.clone()]),
        t(8, vec![h(&[2, 1, 1, 1], "N"), s1.clone()]),
        p(s2.clone(), 3),
        t(24, vec![p(s111.clone(), 2)]),
        t(8, vec![h(&[2, 4], "N")]),
        t(8, vec![h(&[4, 2], "N")]),
        t(-4, vec![p(s1.clone(), 2), s4.clone()]),
        t(-2, vec![s2.clone(), s4]),
        t(-16, vec![p(s1.clone(), 3), s111.clone()]),
        t(-24, vec![s2, s1, s111]),
        t(-8, vec![h(&[1, 1, 1, 2, 1], "N")]),
        t(-8, vec![h(&[1, 1, 2, 1, 1], "N")]),
        t(-8, vec![h(&[1, 2, 1, 1, 1], "N")]),
        t(-8, vec![h(&[2, 1, 1, 1, 1], "N")]),
    ]);
    SumExpr::div(body, n(8))
}

#[test]
fn seven_sums_holds_by_direct_summation() {
    let r = verify_identity(Side::Expr(&h(&[1, 1, 1, 1, 2], "N"), "N"), Side::Expr(&seven_sums_rhs(), "N"), (1, 30), &[ParamAssignment::new()]);
    assert!(r.pass(), "{:?}", r.first_failure());
}

#[test]
fn seven_sums_is_the_only_relation_and_depths_stay_at_three() {
    let sums = seven();
    let mut fe = Frontend::new("N", Vec::new(), Mode::Refined, Options::default());
    let out = find_relations(&mut fe, &sums).unwrap();
    assert_eq!(out.relations.len(), 1, "{:?}", out.relations.iter().map(|r| r.rhs.to_string()).collect::<Vec<_>>());
    let rel = &out.relations[0];
    assert_eq!(rel.input, 6);
    assert_eq!(Some(rel.poly.clone()), seven_sums_rhs().to_sympoly());
    let r = verify_identity(Side::Expr(&rel.lhs, "N"), Side::Expr(&rel.rhs, "N"), (1, 30), &[ParamAssignment::new()]);
    assert!(r.pass());
    let refined = out.depth_profile;
    assert_eq!(refined.iter().max(), Some(&3), "{:?}", refined);

    let mut naive = Frontend::new("N", Vec::new(), Mode::Naive, Options::default());
    let nout = find_relations(&mut naive, &sums).unwrap();
    assert_eq!(nout.depth_profile.iter().max(), Some(&6), "{:?}", nout.depth_profile);
    assert!(refined.len() <= nout.depth_profile.len());
}

fn binomial_harmonic_sum() -> SumExpr {
    SumExpr::sum("k", n(0), s("m"), SumExpr::mul(vec![h(&[1], "k"), SumExpr::binom(s("m"), s("k"))]))
}

fn csum_frontend(mode: Mode) -> Frontend {
    let mut fe = Frontend::new("k", vec!["m".into()], mode, Options::default());
    fe.ground_products = true;
    fe.tower.k_depth = 0;
    fe
}

#[test]
fn binomial_harmonic_sum_first_order_recurrence() {
    let e = binomial_harmonic_sum();
    let mut fe = csum_frontend(Mode::Refined);
    let rec = creative_telescoping(&mut fe, &e, "m", 2).unwrap().expect("a recurrence");
    assert_eq!(rec.order, 1);
    // c0 S(m) + c1 S(m+1) with c0/c1 = -2
    let ratio = rec.coeffs[0].div(&rec.coeffs[1]).unwrap();
    assert_eq!(ratio.const_value(), Some(pisigma_core::arith::int(-2)));
    let lhs = SumExpr::add(vec![
        SumExpr::mul(vec![rec.coeff_exprs[0].clone(), e.clone()]),
        SumExpr::mul(vec![rec.coeff_exprs[1].clone(), e.subst("m", &SumExpr::add(vec![s("m"), n(1)]))]),
    ]);
    let none = [ParamAssignment::new()];
    let r = verify_identity(Side::Expr(&lhs, "m"), Side::Expr(&rec.rhs, "m"), (0, 25), &none);
    assert!(r.pass(), "{} = {}: {:?}", lhs, rec.rhs, r.first_failure());
    let closed = rec.closed_form.unwrap();
    let r = verify_identity(Side::Expr(&e, "m"), Side::Expr(&closed, "m"), (0, 25), &none);
    assert!(r.pass(), "{}: {:?}", closed, r.first_failure());
}

#[test]
fn binomial_harmonic_sum_naive_needs_more_than_order_one() {
    let mut fe = csum_frontend(Mode::Naive);
    assert!(creative_telescoping(&mut fe, &binomial_harmonic_sum(), "m", 1).unwrap().is_none());
}
