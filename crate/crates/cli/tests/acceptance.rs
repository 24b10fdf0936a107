//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero when a criterion outside `KNOWN_FAILURES` fails.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use mahler_core::exactalg::expr::{parse_field_elem, parse_poly};
use mahler_core::exactalg::{left_kernel, rank, ComplexBox, FieldElem, Matrix, NumberField, Poly, RatFunc, SubspaceBasis};
use mahler_core::fixtures::{four_state, golden_field, thue3};
use mahler_core::relations::{
    certify, decide_independence_with, zero_bound, zero_bound_exact, Independence, SColumns,
};
use mahler_core::values::{evaluate_at, numeric_check, verdict, weighted_verdict, PointOptions, Verdict};
use mahler_core::{find_relations, inner_valuation, CoefficientStream, MahlerSystem, SearchOptions, Valuation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria whose four-state part cannot hold: the four indicator series
/// satisfy z(g1 + g4) = g2 + g3.
const KNOWN_FAILURES: [u32; 2] = [3, 4];

const TERMS: usize = 2000;
const BITS: u32 = 256;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: mahler_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ints(k: &Arc<NumberField>, v: &[i64]) -> Vec<FieldElem> {
    v.iter().map(|&x| FieldElem::from_int(k, x)).collect()
}

fn poly_matrix(k: &Arc<NumberField>, rows: &[&[&str]]) -> Matrix<RatFunc> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| RatFunc::from_poly(parse_poly(s, k).expect("valid polynomial"))).collect())
        .collect();
    Matrix::from_rows(rows).expect("rectangular")
}

fn span(k: &Arc<NumberField>, n: usize, vs: &[&[i64]]) -> SubspaceBasis {
    SubspaceBasis::span(k, n, vs.iter().map(|v| ints(k, v)).collect()).expect("consistent lengths")
}

fn golden() -> Result<(Arc<NumberField>, FieldElem), String> {
    let k = golden_field();
    let t = lib(parse_field_elem("t", &k))?;
    Ok((k, t))
}

fn automaton_compilation() -> Check {
    let (k, _) = golden()?;
    let (s, _) = lib(thue3(&k))?;
    ensure!(s.q() == 3, "q = {}", s.q());
    let expected = poly_matrix(&k, &[&["1 + z", "z^2"], &["z^2", "1 + z"]]);
    ensure!(s.matrix() == &expected, "thue3 matrix differs");
    let (g, _) = lib(four_state(&k))?;
    let expected = poly_matrix(
        &k,
        &[&["1", "z", "0", "z^2"], &["z", "1", "z^2", "0"], &["0", "z^2", "1", "z"], &["z^2", "0", "z", "1"]],
    );
    ensure!(g.matrix() == &expected, "four-state matrix differs");
    Ok("A = [[1+z, z^2], [z^2, 1+z]], q = 3; four-state matrix also exact".into())
}

fn zero_bounds() -> Check {
    let mut out = Vec::new();
    for (n, e) in [(2u64, 14u32), (4, 28)] {
        let num = BigInt::from(3).pow(e) * 8 - 3;
        let expected = BigRational::new(num, BigInt::from(4));
        let exact = zero_bound_exact(n, 2, 3, 0, 1).ok_or("no exact value")?;
        ensure!(exact == expected, "n = {n}: exact {exact}, expected {expected}");
        let c = zero_bound(n, 2, 3, 0, 1);
        ensure!(BigRational::from_integer(c.clone()) == expected.ceil(), "n = {n}: ceiling {c}");
        out.push(format!("c({n}) = {c}"));
    }
    ensure!(out[0] == "c(2) = 9565938", "{}", out[0]);
    Ok(out.join(", "))
}

fn columns(f: &CoefficientStream, count: usize) -> Vec<Vec<FieldElem>> {
    let cols = SColumns::new(f, 1);
    (0..count).map(|i| cols.column(i)).collect()
}

fn s_matrix_columns() -> Check {
    let k = NumberField::rationals();
    let (_, f) = lib(thue3(&k))?;
    let expected: Vec<Vec<FieldElem>> =
        [[0, 1, 0, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]].iter().map(|c| ints(&k, c)).collect();
    ensure!(columns(&f, 4) == expected, "thue3 columns differ");

    let (_, g) = lib(four_state(&k))?;
    let printed: Vec<Vec<FieldElem>> = [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 1, 0, 0],
        [1, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 1],
        [0, 0, 0, 1, 0, 0, 1, 0],
        [1, 0, 0, 0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|c| ints(&k, c))
    .collect();
    let actual = columns(&g, 8);
    let mismatched: Vec<usize> = (0..8).filter(|&i| actual[i] != printed[i]).collect();
    let rank_printed = rank(&Matrix::from_rows(printed).expect("8x8"));
    let rank_actual = rank(&Matrix::from_rows(actual).expect("8x8"));
    ensure!(
        mismatched.is_empty() && rank_actual == 8,
        "thue3 columns 0..3 exact; four-state columns {mismatched:?} differ from the printed ones \
         (printed rank {rank_printed}, actual rank {rank_actual})"
    );
    Ok("thue3 columns 0..3 and four-state columns 0..7 exact and independent".into())
}

fn independence() -> Check {
    let k = NumberField::rationals();
    let opts = SearchOptions { max_columns: 64, ..SearchOptions::default() };
    let mut parts = Vec::new();
    for (name, (s, f)) in [("thue3", lib(thue3(&k))?), ("four-state", lib(four_state(&k))?)] {
        match lib(decide_independence_with(&s, &f, &opts))? {
            Independence::Independent { columns_used } => parts.push(format!("{name} independent at {columns_used}")),
            Independence::Dependent { relation, columns_used, .. } => {
                let w: Vec<String> = relation.iter().map(Poly::to_string).collect();
                return Err(format!(
                    "{}; {name} dependent at {columns_used} columns, certified relation ({})",
                    parts.join(", "),
                    w.join(", ")
                ));
            }
            Independence::Inconclusive { columns_used } => {
                return Err(format!("{name} inconclusive after {columns_used} columns"));
            }
        }
    }
    Ok(parts.join(", "))
}

fn functional_relation() -> Check {
    let (k, _) = golden()?;
    let (s, f) = lib(thue3(&k))?;
    let (s, f) = (s.augment_constant(), f.augment_constant());
    let basis = lib(find_relations(&s, &f, &SearchOptions::default()))?;
    ensure!(basis.height == 128, "height {}", basis.height);
    ensure!(basis.rank == 1 && basis.is_certified(), "rank {}, status {:?}", basis.rank, basis.status);
    let w = &basis.generators[0].w;
    let target = [lib(parse_poly("1 - z", &k))?, lib(parse_poly("1 - z", &k))?, lib(parse_poly("-1", &k))?];
    // proportional: w_i target_j = w_j target_i
    let proportional = (0..3).all(|i| (0..3).all(|j| &w[i] * &target[j] == &w[j] * &target[i]));
    ensure!(proportional, "generator not proportional to (1-z, 1-z, -1)");
    ensure!(
        inner_valuation(w, &f, 10_000) == Valuation::AtLeast(10_000),
        "generator does not vanish to order 10^4"
    );
    Ok(format!("rank 1, certified, generator ({}, {}, {})", w[0], w[1], w[2]))
}

fn kernels_at_phi() -> Check {
    let (k, t) = golden()?;
    let (s, _) = lib(thue3(&k))?;
    let ker = left_kernel(&lib(s.iterate_at(1, &t))?, &k);
    ensure!(ker == span(&k, 2, &[&[1, -1]]), "thue3 kernel {ker:?}");
    let (g, _) = lib(four_state(&k))?;
    let ker = left_kernel(&lib(g.iterate_at(1, &t))?, &k);
    ensure!(ker == span(&k, 4, &[&[1, 1, -1, -1]]), "four-state kernel {ker:?}");
    Ok("span{(1,-1)} and span{(1,1,-1,-1)}".into())
}

fn weighted_ball(balls: &[ComplexBox], omega: &[FieldElem], value: &FieldElem) -> Result<ComplexBox, String> {
    let bits = BITS + 16;
    let mut acc = lib(value.embed_ball(bits))?.neg();
    for (w, b) in omega.iter().zip(balls) {
        acc = acc.add(&lib(w.embed_ball(bits))?.mul(b)).round(bits);
    }
    Ok(acc)
}

fn checked_verdicts(s: &MahlerSystem, f: &CoefficientStream, alpha: &FieldElem) -> Result<Vec<Verdict>, String> {
    let report = lib(verdict(s, f, alpha, &PointOptions::default()))?;
    let check = lib(numeric_check(&report.report, &f.augment_constant(), &report.verdicts, TERMS, BITS, Some(&BigRational::one())))?;
    ensure!(check.tail_certified, "tail bound not certified");
    ensure!(check.all_contain_zero(), "a residual ball excludes 0 at {alpha}");
    Ok(report.verdicts)
}

fn verdicts() -> Check {
    let (k, t) = golden()?;
    let half = FieldElem::from_rational(&k, rat(1, 2));
    let (s, f) = lib(thue3(&k))?;
    let at_t = checked_verdicts(&s, &f, &t)?;
    let minus_half_t = t.scale(&rat(-1, 2));
    ensure!(at_t[0] == Verdict::Algebraic(minus_half_t), "thue3 at t: {}", at_t[0]);
    let at_half = checked_verdicts(&s, &f, &half)?;
    ensure!(at_half[0] == Verdict::Transcendental, "thue3 at 1/2: {}", at_half[0]);

    let (g, gf) = lib(four_state(&k))?;
    let at_t = checked_verdicts(&g, &gf, &t)?;
    ensure!(at_t.iter().all(|v| *v == Verdict::Transcendental), "four-state at t: {at_t:?}");
    let omega = ints(&k, &[1, 1, 1, 1]);
    let w = lib(weighted_verdict(&g, &gf, &t, &omega, &PointOptions::default()))?;
    let minus_t = -&t;
    ensure!(w.verdict == Verdict::Algebraic(minus_t.clone()), "weighted: {}", w.verdict);
    let (balls, _, certified) = lib(evaluate_at(&gf, &t, TERMS, BITS, Some(&BigRational::one())))?;
    ensure!(certified && weighted_ball(&balls, &omega, &minus_t)?.contains_zero(), "weighted residual excludes 0");
    Ok("f1(t) = -t/2, f1(1/2) transcendental, four-state transcendental at t, weighted sum -t; residuals contain 0".into())
}

fn doubling() -> Check {
    let (k, t) = golden()?;
    let (s, _) = lib(thue3(&k))?;
    let d = s.dedouble();
    let expected = poly_matrix(
        &k,
        &[
            &["z", "z^2", "1 + z^3", "z^6"],
            &["z^2", "z", "z^6", "1 + z^3"],
            &["1", "0", "0", "0"],
            &["0", "1", "0", "0"],
        ],
    );
    ensure!(d.matrix() == &expected, "doubled matrix differs");
    let det = lib(d.matrix().det())?;
    ensure!(det == s.det().compose_power(3), "det {} vs {}", det.render(), s.det().compose_power(3).render());
    ensure!(!lib(s.classify_point(&t))?.is_regular(), "t should be singular for the original system");
    ensure!(lib(d.classify_point(&t))?.is_regular(), "t is not regular for the doubled system");
    Ok(format!("doubled matrix exact, det = {}, t regular", det.render()))
}

fn planted(
    rng: &mut StdRng,
    k: &Arc<NumberField>,
) -> Option<(MahlerSystem, CoefficientStream, Vec<Poly>)> {
    let q = rng.gen_range(2..4);
    let mut small = |len: usize| -> Vec<i64> { (0..len).map(|_| rng.gen_range(-2..3)).collect() };
    let entries: Vec<Vec<i64>> = (0..4).map(|_| small(3)).collect();
    let (p, r, seed) = (small(3), small(3), small(2));
    let mut a = Matrix::from_fn(2, 2, |i, j| {
        let mut c = entries[2 * i + j].clone();
        c[0] = i64::from(i == j);
        Poly::from_ints(k, &c)
    });
    if a.det_fraction_free().is_zero() {
        a.set(0, 0, a.get(0, 0) + &Poly::z(k));
    }
    let (p, r) = (Poly::from_ints(k, &p), Poly::from_ints(k, &r));
    if p.is_zero() && r.is_zero() {
        return None;
    }
    let row0 = &(&p * a.get(0, 0)) + &(&r * a.get(1, 0));
    let row1 = &(&p * a.get(0, 1)) + &(&r * a.get(1, 1));
    let zero = Poly::zero(k);
    let big = Matrix::from_rows(vec![
        vec![a.get(0, 0).clone(), a.get(0, 1).clone(), zero.clone()],
        vec![a.get(1, 0).clone(), a.get(1, 1).clone(), zero],
        vec![&row0 - &p.compose_power(q), &row1 - &r.compose_power(q), Poly::one(k)],
    ])
    .ok()?;
    let s = MahlerSystem::from_polys(q, big).ok()?;
    let (f1, f2) = (FieldElem::from_int(k, seed[0]), FieldElem::from_int(k, seed[1]));
    let g0 = &(&p.coeff(0) * &f1) + &(&r.coeff(0) * &f2);
    let f = CoefficientStream::from_recursion(&s, vec![vec![f1, f2, g0]]).ok()?;
    Some((s, f, vec![p, r, Poly::from_ints(k, &[-1])]))
}

fn oracle_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        r += 1;
    }
    r
}

fn properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x6d61686c6572);
    let q = NumberField::rationals();

    // (a), (b)
    let mut planted_count = 0;
    while planted_count < 100 {
        let Some((s, f, w)) = planted(&mut rng, &q) else { continue };
        planted_count += 1;
        let cert = lib(certify(&w, &s, &f, None))?;
        ensure!(cert.is_certified(), "(b) planted relation {planted_count} not certified");
        ensure!(cert.certificate().is_some_and(|c| c.verify(&s, &f)), "(b) certificate {planted_count} fails verification");
        ensure!(inner_valuation(&w, &f, 10_000) == Valuation::AtLeast(10_000), "(a) relation {planted_count} does not vanish");
    }

    // (c)
    for case in 0..200 {
        let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-2..3)).collect()).collect();
        let m = Matrix::from_rows(rows.iter().map(|row| ints(&q, row)).collect()).expect("rectangular");
        let ker = left_kernel(&m, &q);
        ensure!(ker.dim() == r - oracle_rank(&rows), "(c) kernel dimension, case {case}");
        ensure!(ker.rows().iter().all(|v| m.left_apply(v).iter().all(FieldElem::is_zero)), "(c) kernel vector, case {case}");
    }

    // (d)
    for (s, f) in [lib(thue3(&q))?, lib(four_state(&q))?] {
        let rec = lib(CoefficientStream::from_recursion(&s, vec![f.coefficient(0)]))?;
        ensure!(f.prefix(2001) == rec.prefix(2001), "(d) automaton and recursion streams disagree");
    }

    // (e)
    let (k, t) = golden()?;
    let one = FieldElem::one(&k);
    let mut elem = || {
        let d = rng.gen_range(1..6);
        FieldElem::from_coeffs(&k, vec![rat(rng.gen_range(-9..10), d), rat(rng.gen_range(-9..10), d)])
    };
    for _ in 0..200 {
        let (a, b, c) = (elem(), elem(), elem());
        ensure!(&(&a + &b) + &c == &a + &(&b + &c), "(e) additive associativity");
        ensure!(&(&a * &b) * &c == &a * &(&b * &c), "(e) multiplicative associativity");
        ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "(e) distributivity");
        ensure!(a.is_zero() || (&a * &a.inv()).is_one(), "(e) inverse");
    }
    ensure!(&t * &t == &t + &one, "(e) t^2 = t + 1");
    ensure!(t.inv() == &t - &one, "(e) 1/t = t - 1");
    ensure!(t.pow(9) == FieldElem::from_coeffs(&k, vec![rat(21, 1), rat(34, 1)]), "(e) t^9 = 34t + 21");
    Ok("(a) soundness, (b) 100 planted, (c) 200 kernels, (d) streams to 2000, (e) field laws".into())
}

fn full_bound() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_mahler"))
        .args(["independence", "--demo", "thue3", "--full-bound", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit status {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let fb = &v["full_bound"];
    ensure!(fb["columns"] == "9565938", "columns {}", fb["columns"]);
    ensure!(fb["kernel_dim"] == 0, "kernel dimension {}", fb["kernel_dim"]);
    Ok("9565938 streamed columns, kernel {0}".into())
}

fn main() {
    let criteria: [(u32, fn() -> Check); 10] = [
        (1, automaton_compilation),
        (2, zero_bounds),
        (3, s_matrix_columns),
        (4, independence),
        (5, functional_relation),
        (6, kernels_at_phi),
        (7, verdicts),
        (8, doubling),
        (9, properties),
        (10, full_bound),
    ];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                let known = KNOWN_FAILURES.contains(&n);
                let tag = if known { " [known]" } else { "" };
                println!("criterion {n}: FAIL{tag} ({detail}) [{secs:.1}s]");
                if !known {
                    unexpected.push(n);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
