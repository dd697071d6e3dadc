use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bograph::corpus::{builtin, NAMES};
use bograph::derive::summation_core;
use bograph::stability::{
    analyze, char_poly, classify, factored_cubic_criterion, literal_flags, match_cubic_factorization, routh_hurwitz,
    triangular_shortcut, CubicMode, DEFAULT_TOL,
};
use bograph::*;
use bograph_oracle::{oracle_poly_roots, oracle_state_space, random_chain_model, random_model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Check {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}"))
}

fn unit_bindings(m: &BondGraphModel) -> BTreeMap<String, Rational> {
    m.parameters.keys().map(|k| (k.clone(), Rational::from_integer(1.into()))).collect()
}

fn bin(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_bograph")).args(args).output().map_err(|e| e.to_string())
}

fn rlc_derivation() -> Check {
    let start = Instant::now();
    let out = bin(&["derive", "--example", "rlc"])?;
    ensure(out.status.success(), || "derive failed".into())?;
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let eqs: Vec<&str> = text.lines().filter(|l| !l.starts_with("state(")).collect();
    ensure(eqs.len() == 6, || format!("{} equations", eqs.len()))?;
    ensure(eqs.contains(&"sum(j=11): +e(111) -e(112) -e(113) -e(114) = 0"), || "summation missing".into())?;
    ensure(eqs.contains(&"eq(j=11): f(112) = f(111) = f(113) = f(114)"), || "equality chain missing".into())?;
    within(Duration::from_secs(1), start)
}

fn rlc_state_space() -> Check {
    let start = Instant::now();
    let ss = state_space(&builtin("rlc")).map_err(|e| e.to_string())?;
    let a: Vec<Vec<String>> = ss.a.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    let b: Vec<Vec<String>> = ss.b.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    ensure(a == [["-R/L", "-1/C"], ["1/L", "0"]], || format!("A = {a:?}"))?;
    ensure(b == [["1"], ["0"]], || format!("B = {b:?}"))?;
    within(Duration::from_secs(1), start)
}

fn hand_index_matrix() -> Check {
    let start = Instant::now();
    let ss = state_space(&builtin("hand-index")).map_err(|e| e.to_string())?;
    let printed = [
        ["-Dm_4/Jm_4 - Geer_4^2*D_4/Jm_4 - Motor_4^2/(Jm_4*Ra_4)", "Geer_4*D_4/J_4", "-Geer_4/K_2"],
        ["Geer_4*D_4/Jm_4", "-D_4/J_4", "1/K_2"],
        ["Geer_4/Jm_4", "-1/J_4", "0"],
    ];
    for (i, row) in printed.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            let want = RatFunc::from_expr(&ParamExpr::parse(text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(ss.a[i][j] == want, || format!("a{}{} = {} but expected {want}", i + 1, j + 1, ss.a[i][j]))?;
        }
    }
    within(Duration::from_secs(1), start)
}

fn hand_index_stability() -> Check {
    let start = Instant::now();
    let m = builtin("hand-index");
    let ss = state_space(&m).map_err(|e| e.to_string())?;
    let (a, _) = ss.instantiate(&unit_bindings(&m)).map_err(|e| e.to_string())?;
    let cp = char_poly(&a).map_err(|e| e.to_string())?;
    for (c, w) in cp.coefficients.iter().zip([1.0, 4.0, 4.0, 2.0]) {
        ensure((c - w).abs() < 1e-9, || format!("char poly {:?}", cp.coefficients))?;
    }
    let v = analyze(&a, Semantics::Standard, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(v.classification == Classification::Stable, || format!("{}", v.classification))?;
    let f = match_cubic_factorization(&a, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(factored_cubic_criterion(f.b1, f.c1, f.r, CubicMode::Corrected), || format!("{f:?}"))?;
    ensure(routh_hurwitz(&cp), || "Routh-Hurwitz disagrees".into())?;
    let roots = oracle_poly_roots(&cp.coefficients, 1e-12).map_err(|e| format!("{e:?}"))?;
    ensure(roots.iter().all(|z| z.re < 0.0), || "oracle roots not all in the left half plane".into())?;
    within(Duration::from_secs(1), start)
}

fn rlc_numeric() -> Check {
    let m = builtin("rlc");
    let ss = state_space(&m).map_err(|e| e.to_string())?;
    let (a, _) = ss.instantiate(&unit_bindings(&m)).map_err(|e| e.to_string())?;
    let v = analyze(&a, Semantics::Standard, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(v.classification == Classification::Stable, || format!("{}", v.classification))?;
    let im = 0.75f64.sqrt();
    ensure(v.eigenvalues.len() == 2, || "two eigenvalues".into())?;
    for (z, want_im) in v.eigenvalues.iter().zip([-im, im]) {
        ensure((z.re + 0.5).abs() < 1e-7 && (z.im - want_im).abs() < 1e-7, || format!("eigenvalue {z}"))?;
    }
    Ok(())
}

fn random_junction(rng: &mut impl Rng) -> Junction {
    let n = rng.gen_range(3..=8);
    let bonds = (0..n)
        .map(|k| {
            let el = ElementType::ALL[rng.gen_range(0..7)];
            Bond::new(
                110 + k + 1,
                el,
                Causality { stroke_toward_junction: rng.gen_bool(0.5) },
                PowerDirection { toward_junction: rng.gen_bool(0.5) },
            )
        })
        .collect();
    Junction { number: 1, kind: JunctionKind::from_bool(rng.gen_bool(0.5)), bonds }
}

fn skip_last_two(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..500 {
        let j = random_junction(rng);
        let n = j.bonds.len();
        let form = summation_core(&j).map_err(|e| e.to_string())?;
        let support: BTreeSet<u32> = form.vars().map(|v| v.bond).collect();
        let want: BTreeSet<u32> = j.bonds[..n - 2].iter().map(|b| b.label).collect();
        ensure(support == want, || format!("junction {case}: support {support:?}"))?;
        for b in &j.bonds[..n - 2] {
            let c = form.coeff(&b.signal(j.kind.summed()));
            ensure(c == RatFunc::from_int(b.direction.sign()), || format!("junction {case}: sign of {}", b.label))?;
        }
    }
    Ok(())
}

fn oracle_chains(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..200 {
        let g = random_chain_model(rng, 4);
        let ss = state_space(&g.model).map_err(|e| format!("chain {case}: {e}"))?;
        let (a, b) = ss.instantiate_exact(&g.bindings).map_err(|e| e.to_string())?;
        let o = oracle_state_space(&g.model, &g.bindings).map_err(|e| format!("{e:?}"))?;
        ensure(ss.states == o.states && a == o.a && b == o.b, || format!("chain {case}:\n{}", print_dsl(&g.model)))?;
    }
    Ok(())
}

fn cubic_agreement(rng: &mut ChaCha8Rng) -> Check {
    let tol = 1e-7;
    let mut compared = 0;
    for case in 0..1000 {
        let rows: Vec<Vec<f64>> =
            (0..3).map(|i| (0..3).map(|j| rng.gen_range(-3.0..3.0) - if i == j { 2.0 } else { 0.0 }).collect()).collect();
        let a = NumericMatrix::from_rows(&rows);
        let cp = char_poly(&a).map_err(|e| e.to_string())?;
        let roots = oracle_poly_roots(&cp.coefficients, 1e-9).map_err(|e| format!("{e:?}"))?;
        let abscissa = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if abscissa.abs() <= 10.0 * tol {
            continue;
        }
        compared += 1;
        let f = match_cubic_factorization(&a, 1e-9).map_err(|e| format!("case {case}: {e}"))?;
        let cubic = factored_cubic_criterion(f.b1, f.c1, f.r, CubicMode::Corrected);
        let routh = routh_hurwitz(&cp);
        let eig = classify(&a, Semantics::Standard, tol).map_err(|e| e.to_string())?.classification == Classification::Stable;
        ensure(cubic == routh && routh == eig, || format!("case {case}: cubic {cubic} routh {routh} eigen {eig}"))?;
    }
    ensure(compared >= 990, || format!("only {compared} cases away from the axis"))
}

fn triangular_agreement(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..500 {
        let n = rng.gen_range(1..=5);
        let upper = rng.gen_bool(0.5);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (upper, j.cmp(&i)) {
                        (_, std::cmp::Ordering::Equal) if rng.gen_bool(0.3) => f64::from(rng.gen_range(-3..=3)),
                        (true, std::cmp::Ordering::Less) | (false, std::cmp::Ordering::Greater) => 0.0,
                        _ => rng.gen_range(-4.0..4.0),
                    })
                    .collect()
            })
            .collect();
        let a = NumericMatrix::from_rows(&rows);
        let short = triangular_shortcut(&a, 1e-12).ok_or_else(|| format!("case {case}: not triangular"))?;
        let general = classify(&a, Semantics::Standard, DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(short.classification == general.classification, || format!("case {case}: {rows:?}"))?;
    }
    Ok(())
}

fn literal_saddle() -> Check {
    let a = NumericMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
    let v = analyze(&a, Semantics::PaperLiteral, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let flags = v.literal.ok_or("no literal flags")?;
    ensure(flags.stable_sys && flags.unstable_sys, || format!("{flags:?}"))?;
    ensure(literal_flags(&v.eigenvalues, DEFAULT_TOL) == flags, || "flags differ".into())
}

fn property_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let parts: [(&str, Check); 5] = [
        ("a", skip_last_two(&mut rng)),
        ("b", oracle_chains(&mut rng)),
        ("c", cubic_agreement(&mut rng)),
        ("d", triangular_agreement(&mut rng)),
        ("e", literal_saddle()),
    ];
    let failed: Vec<String> = parts.into_iter().filter_map(|(k, r)| r.err().map(|e| format!("6{k}: {e}"))).collect();
    ensure(failed.is_empty(), || failed.join("; "))
}

fn parser_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut models: Vec<BondGraphModel> = NAMES.iter().map(|n| builtin(n)).collect();
    models.extend((0..100).map(|_| random_model(&mut rng)));
    for (i, m) in models.iter().enumerate() {
        let text = print_dsl(m);
        let back = parse(&text).model;
        ensure(back.as_ref() == Some(m), || format!("model {i}: DSL round trip differs"))?;
        let via_json = from_json(&to_json(m)).model;
        ensure(via_json.as_ref() == Some(m), || format!("model {i}: JSON round trip differs"))?;
        let again = parse(&print_dsl(via_json.as_ref().unwrap())).model;
        ensure(again.as_ref() == Some(m), || format!("model {i}: JSON then DSL differs"))?;
    }
    Ok(())
}

fn eigenplot() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for k in 0..2 {
        let base = dir.path().join(format!("plot{k}"));
        let out = bin(&["eigenplot", "--example", "hand-index", "--params", "all=1", "--out", base.to_str().unwrap()])?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).to_string())?;
        let csv = std::fs::read(base.with_extension("csv")).map_err(|e| e.to_string())?;
        let svg = std::fs::read(base.with_extension("svg")).map_err(|e| e.to_string())?;
        runs.push((csv, svg));
    }
    ensure(runs[0] == runs[1], || "outputs differ between runs".into())?;
    let csv = String::from_utf8(runs[0].0.clone()).map_err(|e| e.to_string())?;
    let mut lines = csv.lines();
    ensure(lines.next() == Some("re,im"), || "missing CSV header".into())?;
    let rows: Vec<&str> = lines.collect();
    ensure(rows.len() == 3, || format!("{} CSV rows", rows.len()))?;
    for r in &rows {
        let re: f64 = r.split(',').next().unwrap_or("").parse().map_err(|_| format!("bad row {r}"))?;
        ensure(re < 0.0, || format!("row {r} not in the left half plane"))?;
    }
    let svg = String::from_utf8(runs[0].1.clone()).map_err(|e| e.to_string())?;
    let t = svg.trim();
    ensure(t.starts_with("<svg") || t.starts_with("<?xml"), || "SVG does not start with a root element".into())?;
    ensure(t.ends_with("</svg>"), || "SVG root not closed".into())?;
    ensure(svg.contains("xmlns=\"http://www.w3.org/2000/svg\""), || "SVG lacks namespace".into())?;
    ensure(!svg.contains("href"), || "SVG references external assets".into())?;
    ensure(svg.matches("<circle").count() == 3, || "expected three markers".into())?;
    Ok(())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Check); 8] = [
        ("RLC derivation", rlc_derivation),
        ("RLC state space", rlc_state_space),
        ("index-finger system matrix", hand_index_matrix),
        ("index-finger stability", hand_index_stability),
        ("RLC numeric eigenvalues", rlc_numeric),
        ("property suite", property_suite),
        ("parser round trip", parser_round_trip),
        ("eigenplot", eigenplot),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {} {name}", i + 1),
            Err(e) => {
                failures += 1;
                println!("FAIL {} {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance finished in {:.2?}", start.elapsed());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
