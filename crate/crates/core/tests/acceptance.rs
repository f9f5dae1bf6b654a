//! Acceptance criteria. Every comparison is exact (tolerance zero); each criterion
//! also has a wall-clock budget. One PASS/FAIL line is printed per criterion.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tautseries::algebraic::{quartic_relation, solve_algebraic};
use tautseries::extract::{build_panel, compare_with_catalog, extract_universal, extract_verlinde, predict_unknown};
use tautseries::oracle::{
    chern_integral, segre_integral, verlinde_chi, EqKClass, LineTerm, ToricSurface, DEFAULT_SEED,
};
use tautseries::rational::{binomial_int, q, qf};
use tautseries::verify::{
    check_binomial_evaluations, check_blowup_excess, check_enriques, check_fgh_derivation, check_lagrange_burmann,
    check_theta_constant, CheckReport, LAGRANGE_SEED,
};
use tautseries::{Series, Var, Q};

/// Exact comparisons only.
const TOLERANCE: i64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(rep: CheckReport) -> Outcome {
    Outcome {
        passed: rep.passed(),
        detail: match rep.counterexample {
            Some(c) => format!("{} equalities, first failure: {c}", rep.checked),
            None => format!("{} equalities", rep.checked),
        },
    }
}

fn all_of(parts: Vec<(bool, String)>) -> Outcome {
    let failed: Vec<String> = parts.iter().filter(|p| !p.0).map(|p| p.1.clone()).collect();
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} sub-checks", parts.len())
        } else {
            format!("failed: {}", failed.join("; "))
        },
    }
}

fn y_expansion() -> Outcome {
    let y = solve_algebraic(&quartic_relation(3), 5).unwrap();
    let want = [1, -6, 41, -314, 2630];
    let got: Vec<Q> = (1..=5).map(|k| y.coeff(k).clone()).collect();
    let ok = got.iter().zip(want).all(|(g, w)| *g == q(w));
    Outcome { passed: ok, detail: format!("t^1..t^5 = {}", got.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")) }
}

fn oracle_anchors() -> Outcome {
    let mut parts = Vec::new();
    // n = 1 reduces to surface Chern numbers on every surface.
    for (surface, spec) in [
        (ToricSurface::p2(), "O(2)+O(-1)"),
        (ToricSurface::p1xp1(), "O(1,2)-O(0,1)"),
        (ToricSurface::f1(), "O(2,1)+O(1,0)"),
    ] {
        let class = EqKClass::parse(&surface, spec).unwrap();
        let m = class.numerics(&surface);
        let s1 = segre_integral(&surface, &class, 1, DEFAULT_SEED).unwrap();
        let c1 = chern_integral(&surface, &class, 1, DEFAULT_SEED).unwrap();
        let line = LineTerm { coeff: 1, class: class.c1(&surface), shift: (0, 0) };
        let v1 = verlinde_chi(&surface, &line, 2, 1, DEFAULT_SEED).unwrap();
        parts.push((
            s1 == q(m.c1sq - m.c2) && c1 == q(m.c2) && v1 == m.chi_det.into(),
            format!("n=1 {} {spec}", surface.kind),
        ));
    }
    // Rank-2 Chern binomial on P2.
    let p2 = ToricSurface::p2();
    let class = EqKClass::parse(&p2, "O(2)+O(3)").unwrap();
    let c2 = class.numerics(&p2).c2;
    for n in 0..=4 {
        let got = chern_integral(&p2, &class, n, DEFAULT_SEED).unwrap();
        parts.push((got == Q::from_integer(binomial_int(c2, n as i64)), format!("C({c2},{n}) on P2")));
    }
    // Independent specializations and lift shifts on 20 random cases.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let surfaces = ToricSurface::all();
    for case in 0..20 {
        let surface = &surfaces[case % 3];
        let terms: Vec<(i64, Vec<i64>)> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let coeff = [1, -1, 2][rng.gen_range(0..3)];
                (coeff, (0..surface.rank()).map(|_| rng.gen_range(-2..=2)).collect())
            })
            .collect();
        let class = EqKClass::from_terms(terms);
        let shifts: Vec<(i64, i64)> = (0..3).map(|_| (rng.gen_range(-6..=6), rng.gen_range(-6..=6))).collect();
        let n = 1 + case % 3;
        let base = segre_integral(surface, &class, n, DEFAULT_SEED).unwrap();
        let other = segre_integral(surface, &class.with_shifts(&shifts), n, rng.gen()).unwrap();
        let cbase = chern_integral(surface, &class, n, DEFAULT_SEED).unwrap();
        let cother = chern_integral(surface, &class.with_shifts(&shifts), n, rng.gen()).unwrap();
        parts.push((base == other && cbase == cother, format!("case {case} {} {class} n={n}", surface.kind)));
    }
    all_of(parts)
}

fn segre_extraction(s: i64, order: usize) -> Outcome {
    let panel = build_panel(s, 7).unwrap();
    let ex = extract_universal(s, order, &panel).unwrap();
    let cmp = compare_with_catalog(&ex);
    all_of(cmp.iter().map(|c| (c.matches, format!("{} agrees to order {:?}", c.name, c.agreement_order))).collect())
}

fn verlinde_oracle() -> Outcome {
    let mut parts = Vec::new();
    for r in [0, 1, 2] {
        let ex = extract_verlinde(r, 4).unwrap();
        for c in compare_with_catalog(&ex).iter().take(2) {
            parts.push((c.matches, format!("r={r} {} agrees to order {:?}", c.name, c.agreement_order)));
        }
    }
    // Full generating series at r = 0, ±1 against (1-w)^{-χ} and (1+w)^χ.
    let lines: [(ToricSurface, Vec<i64>); 4] = [
        (ToricSurface::p2(), vec![2]),
        (ToricSurface::p2(), vec![-1]),
        (ToricSurface::p1xp1(), vec![1, 2]),
        (ToricSurface::f1(), vec![2, -1]),
    ];
    for (surface, class) in &lines {
        let chi = surface.chi_line(class);
        let line = LineTerm { coeff: 1, class: class.clone(), shift: (0, 0) };
        for r in [0, 1, -1] {
            let ok = (0..=4).all(|n| {
                let got = verlinde_chi(surface, &line, r, n, DEFAULT_SEED).unwrap();
                let ni = n as i64;
                got == if r == 0 { binomial_int(chi + ni - 1, ni) } else { binomial_int(chi, ni) }
            });
            parts.push((ok, format!("r={r} {} {class:?}", surface.kind)));
        }
    }
    all_of(parts)
}

fn conjecture_reports() -> Outcome {
    let order = 7;
    let mut notes = Vec::new();
    let rank0 = predict_unknown(0, order).unwrap();
    for c in &rank0.comparisons[3..] {
        notes.push(format!("rank 0 {} to order {:?}", c.name, c.agreement_order));
    }
    for r in [2, 3] {
        let ex = extract_verlinde(r, order).unwrap();
        for c in &compare_with_catalog(&ex)[2..] {
            notes.push(format!("r={r} {} to order {:?}", c.name, c.agreement_order));
        }
    }
    // Report-only: passes once every agreement order has been produced.
    Outcome { passed: true, detail: format!("report: {}", notes.join(", ")) }
}

fn property_suites() -> Outcome {
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rq = |rng: &mut ChaCha8Rng| qf(rng.gen_range(-5..=5), rng.gen_range(1..=3));
    for case in 0..50 {
        let order = 8;
        let mut a = vec![q(0), q(1)];
        a.extend((2..=order).map(|_| rq(&mut rng)));
        let a = Series::from_coeffs(Var::T, a);
        let round = a.compose(&a.revert().unwrap()).unwrap().is_identity();
        let mut u = vec![q(1)];
        u.extend((1..=order).map(|_| rq(&mut rng)));
        let u = Series::from_coeffs(Var::T, u);
        let (e1, e2) = (rq(&mut rng), rq(&mut rng));
        let p1 = u.pow_rational(&e1).unwrap();
        let laws = p1.mul(&u.pow_rational(&e2).unwrap()).unwrap() == u.pow_rational(&(&e1 + &e2)).unwrap()
            && p1.pow_rational(&e2).unwrap() == u.pow_rational(&(&e1 * &e2)).unwrap();
        let exp_log = u.log().unwrap().exp().unwrap() == u;
        parts.push((round && laws && exp_log, format!("series case {case}")));
    }
    let lb = check_lagrange_burmann(50, 15, LAGRANGE_SEED);
    parts.push((lb.passed(), format!("inversion identity: {:?}", lb.counterexample)));
    all_of(parts)
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        (1, "quartic branch y(t) through t^5", Duration::from_secs(1), y_expansion),
        (2, "binomial evaluations and vanishing windows", Duration::from_secs(5), || {
            from_report(check_binomial_evaluations(2..=6, 8))
        }),
        (3, "blowup excess coefficients (-1)^n (2n+1)", Duration::from_secs(5), || {
            from_report(check_blowup_excess(20, 10))
        }),
        (4, "rank-2 derivation of A3, A4 to order 20", Duration::from_secs(10), || {
            from_report(check_fgh_derivation(20))
        }),
        (5, "Enriques Chern/Verlinde identity and residue forms", Duration::from_secs(10), || {
            from_report(check_enriques(2..=5, 6, -3..=12, 20))
        }),
        (6, "theta constant term mod-3 dichotomy", Duration::from_secs(1), || {
            from_report(check_theta_constant(12, 2))
        }),
        (7, "localization convention anchors", Duration::from_secs(30), oracle_anchors),
        (8, "rank-1 universality extraction, order 4", Duration::from_secs(300), || segre_extraction(1, 4)),
        (9, "rank-2 universality extraction, order 5", Duration::from_secs(900), || segre_extraction(2, 5)),
        (10, "Verlinde oracle against B1, B2 and trivial twists", Duration::from_secs(300), verlinde_oracle),
        (11, "conjecture-grade agreement orders", Duration::from_secs(900), conjecture_reports),
        (12, "series property suites and generic inversion", Duration::from_secs(10), property_suites),
    ];
    let mut failures = Vec::new();
    println!("acceptance: tolerance {TOLERANCE} (exact rational equality)");
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = outcome.passed && in_time;
        println!(
            "{} {id:>2} {name}: {} [{:.2}s, budget {}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !passed {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
