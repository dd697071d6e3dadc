use std::collections::BTreeMap;

use bograph::corpus::builtin;
use bograph::stability::{
    analyze, char_poly, char_poly_exact, eigenvalues, factored_cubic_criterion, match_cubic_factorization,
    routh_hurwitz, CubicMode, DEFAULT_TOL,
};
use bograph::*;
use num::complex::Complex64;

fn all(model: &BondGraphModel, v: i64) -> BTreeMap<String, Rational> {
    model.parameters.keys().map(|k| (k.clone(), Rational::from_integer(v.into()))).collect()
}

fn strings(m: &[Vec<RatFunc>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

#[test]
fn rlc_equations() {
    let sys = derive_system(&builtin("rlc")).unwrap();
    let dump = sys.dump();
    let lines: Vec<&str> = dump.lines().filter(|l| !l.starts_with("state(")).collect();
    assert_eq!(lines.len(), 6, "{dump}");
    assert!(lines.contains(&"sum(j=11): +e(111) -e(112) -e(113) -e(114) = 0"));
    assert!(lines.contains(&"eq(j=11): f(112) = f(111) = f(113) = f(114)"));
    assert!(lines.contains(&"law(114): e(114) = R*f(114)"));
}

#[test]
fn rlc_state_space() {
    let ss = state_space(&builtin("rlc")).unwrap();
    assert_eq!(ss.states, vec![SignalVar::momentum(112), SignalVar::displacement(113)]);
    assert_eq!(ss.inputs, vec![SignalVar::input(111)]);
    assert_eq!(strings(&ss.a), vec![vec!["-R/L", "-1/C"], vec!["1/L", "0"]]);
    assert_eq!(strings(&ss.b), vec![vec!["1"], vec!["0"]]);
}

#[test]
fn rlc_numeric() {
    let m = builtin("rlc");
    let ss = state_space(&m).unwrap();
    let (a, _) = ss.instantiate(&all(&m, 1)).unwrap();
    assert_eq!(a.to_rows(), vec![vec![-1.0, -1.0], vec![1.0, 0.0]]);
    let v = analyze(&a, Semantics::Standard, DEFAULT_TOL).unwrap();
    assert_eq!(v.classification, Classification::Stable);
    let want = [Complex64::new(-0.5, -0.75f64.sqrt()), Complex64::new(-0.5, 0.75f64.sqrt())];
    for (z, w) in v.eigenvalues.iter().zip(want) {
        assert!((z - w).norm() < 1e-7, "{z}");
    }
}

#[test]
fn rlc_zero_inductance_is_an_error() {
    let m = builtin("rlc");
    let ss = state_space(&m).unwrap();
    let mut b = all(&m, 1);
    b.insert("L".into(), Rational::from_integer(0.into()));
    assert!(matches!(ss.instantiate(&b), Err(ExprError::DivisionByZero)));
}

#[test]
fn fig6_couplings_and_transformer_sum() {
    let dump = derive_system(&builtin("fig6")).unwrap().dump();
    assert!(dump.contains("couple(131): e(131) = e(212)"), "{dump}");
    assert!(dump.contains("sum(j=13): +n*f(121) -f(131) -f(141) = 0"), "{dump}");
}

#[test]
fn hand_index_matrix() {
    let ss = state_space(&builtin("hand-index")).unwrap();
    assert_eq!(ss.states, vec![SignalVar::momentum(421), SignalVar::momentum(431), SignalVar::displacement(441)]);
    assert_eq!(
        strings(&ss.a),
        vec![
            vec!["(-D_4*Geer_4^2*Ra_4-Dm_4*Ra_4-Motor_4^2)/(Jm_4*Ra_4)", "D_4*Geer_4/J_4", "-Geer_4/K_2"],
            vec!["D_4*Geer_4/Jm_4", "-D_4/J_4", "1/K_2"],
            vec!["Geer_4/Jm_4", "-1/J_4", "0"],
        ]
    );
    let a11 = ParamExpr::parse("-Dm_4/Jm_4 - Geer_4^2*D_4/Jm_4 - Motor_4^2/(Jm_4*Ra_4)").unwrap();
    assert_eq!(ss.a[0][0], RatFunc::from_expr(&a11).unwrap());
}

#[test]
fn hand_index_derivative_laws() {
    let dump = derive_system(&builtin("hand-index")).unwrap().dump();
    let states: Vec<&str> = dump.lines().filter(|l| l.starts_with("state(")).collect();
    assert_eq!(states.len(), 3, "{dump}");
}

#[test]
fn hand_index_stability_at_unit_parameters() {
    let m = builtin("hand-index");
    let ss = state_space(&m).unwrap();
    let (a, _) = ss.instantiate(&all(&m, 1)).unwrap();
    assert_eq!(a.to_rows(), vec![vec![-3.0, 1.0, -1.0], vec![1.0, -1.0, 1.0], vec![1.0, -1.0, 0.0]]);
    let cp = char_poly(&a).unwrap();
    for (c, w) in cp.coefficients.iter().zip([1.0, 4.0, 4.0, 2.0]) {
        assert!((c - w).abs() < 1e-9);
    }
    let (ae, _) = ss.instantiate_exact(&all(&m, 1)).unwrap();
    let exact: Vec<Rational> = [1, 4, 4, 2].iter().map(|k| Rational::from_integer((*k).into())).collect();
    assert_eq!(char_poly_exact(&ae), exact);
    assert_eq!(analyze(&a, Semantics::Standard, DEFAULT_TOL).unwrap().classification, Classification::Stable);
    let f = match_cubic_factorization(&a, DEFAULT_TOL).unwrap();
    assert!((f.r - 2.839286755).abs() < 1e-6);
    assert!(factored_cubic_criterion(f.b1, f.c1, f.r, CubicMode::Corrected));
    assert!(routh_hurwitz(&cp));
}

#[test]
fn eigen_residuals_on_corpus() {
    for name in corpus::NAMES {
        let m = builtin(name);
        let ss = state_space(&m).unwrap();
        for v in [1, 2, 3] {
            let (a, _) = ss.instantiate(&all(&m, v)).unwrap();
            let cp = char_poly(&a).unwrap();
            for z in eigenvalues(&a).unwrap() {
                assert!(cp.eval(z).norm() <= 1e-9 * cp.norm().max(1.0), "{name} {z}");
            }
        }
    }
}

#[test]
fn derivation_is_repeatable() {
    for name in corpus::NAMES {
        let m = builtin(name);
        assert_eq!(state_space(&m).unwrap(), state_space(&m).unwrap());
        assert_eq!(derive_system(&m).unwrap().dump(), derive_system(&m).unwrap().dump());
    }
}

#[test]
fn causality_reports() {
    let m = builtin("rlc");
    let r = check_causal_completeness(&m);
    assert!(r.complete);
    assert_eq!(r.strong_bonds.get(&(1, 1)), Some(&Some(112)));
    assert!(r.differential_storage_bonds.is_empty());

    let mut flipped = m.clone();
    flipped.branches[0].junctions[0].bonds[1].causality = Causality::TOWARD;
    let r = check_causal_completeness(&flipped);
    assert!(!r.complete);
    assert!(!r.violations.is_empty());

    let mut diff = m.clone();
    diff.branches[0].junctions[0].bonds[2].causality = Causality::AWAY;
    let r = check_causal_completeness(&diff);
    assert!(r.differential_storage_bonds.contains(&113));
}
