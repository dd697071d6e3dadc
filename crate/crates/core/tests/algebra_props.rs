use std::collections::BTreeMap;

use bograph::constitutive::{constitutive_equation, derivative_law};
use bograph::*;
use proptest::prelude::*;

const PARAMS: [&str; 3] = ["a", "b", "c"];

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn coeff_strategy() -> impl Strategy<Value = RatFunc> {
    prop_oneof![
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| RatFunc::from_rational(rat(n, d))),
        prop::sample::select(PARAMS.to_vec()).prop_map(RatFunc::param),
        (prop::sample::select(PARAMS.to_vec()), -3i64..=3).prop_map(|(p, k)| RatFunc::param(p).mul(&RatFunc::from_int(k))),
    ]
}

fn form_strategy() -> impl Strategy<Value = LinearForm> {
    prop::collection::vec((coeff_strategy(), 1u32..=4, any::<bool>()), 0..5).prop_map(|terms| {
        let mut f = LinearForm::zero();
        for (c, bond, effort) in terms {
            let v = if effort { SignalVar::effort(bond) } else { SignalVar::flow(bond) };
            f.add_term(&c, v);
        }
        f
    })
}

fn expr_strategy() -> impl Strategy<Value = ParamExpr> {
    let leaf = prop_oneof![
        (1i64..=5).prop_map(ParamExpr::int),
        prop::sample::select(PARAMS.to_vec()).prop_map(ParamExpr::param),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ParamExpr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ParamExpr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ParamExpr::mul(a, b)),
            (inner.clone(), 1i64..=3).prop_map(|(a, k)| ParamExpr::div(a, ParamExpr::add(ParamExpr::param("a"), ParamExpr::int(k)))),
            inner.clone().prop_map(ParamExpr::neg),
            (inner, 0i32..=2).prop_map(|(a, k)| ParamExpr::pow(a, k)),
        ]
    })
}

fn points() -> Vec<BTreeMap<String, Rational>> {
    [(2, 3, 5), (7, 1, 4), (1, 9, 2)]
        .iter()
        .map(|&(a, b, c)| {
            [("a", rat(a, 3)), ("b", rat(b, 2)), ("c", rat(c, 7))].into_iter().map(|(k, v)| (k.to_string(), v)).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn linear_forms_form_a_module(x in form_strategy(), y in form_strategy(), z in form_strategy(),
                                  k in coeff_strategy(), l in coeff_strategy()) {
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.add(&y).scale(&k), x.scale(&k).add(&y.scale(&k)));
        prop_assert_eq!(x.scale(&k.add(&l)), x.scale(&k).add(&x.scale(&l)));
        prop_assert_eq!(x.scale(&k).scale(&l), x.scale(&k.mul(&l)));
        prop_assert_eq!(x.sub(&x), LinearForm::zero());
        prop_assert_eq!(x.scale(&RatFunc::one()), x.clone());
        prop_assert!(x.scale(&RatFunc::zero()).is_zero());
    }

    #[test]
    fn canonical_form_is_unique(e in expr_strategy(), f in expr_strategy()) {
        let Ok(r) = RatFunc::from_expr(&e) else { return Ok(()); };
        for p in points() {
            let lookup = |name: &str| p.get(name).cloned();
            if let (Ok(direct), Ok(canon)) = (e.evaluate(&lookup), r.evaluate(&lookup)) {
                prop_assert_eq!(direct, canon);
            }
        }
        let detour = ParamExpr::sub(ParamExpr::add(e.clone(), f.clone()), f.clone());
        prop_assert_eq!(RatFunc::from_expr(&detour).unwrap(), r.clone());
        let scaled = ParamExpr::div(ParamExpr::mul(e.clone(), ParamExpr::param("b")), ParamExpr::param("b"));
        prop_assert_eq!(RatFunc::from_expr(&scaled).unwrap(), r.clone());
        let reparsed = RatFunc::from_expr(&ParamExpr::parse(&r.to_string()).unwrap()).unwrap();
        prop_assert_eq!(reparsed, r);
    }
}

#[test]
fn constitutive_table() {
    for el in ElementType::ALL {
        for toward in [true, false] {
            let b = Bond::new(111, el, Causality { stroke_toward_junction: toward }, PowerDirection::OUT).with_param("k");
            let got = constitutive_equation(&b);
            let defined = matches!(
                el,
                ElementType::Source | ElementType::Inertance | ElementType::Compliance | ElementType::Resistor
            );
            assert_eq!(got.is_ok(), defined, "{el} toward={toward}");
            let integral = matches!((el, toward), (ElementType::Inertance, false) | (ElementType::Compliance, true));
            assert_eq!(derivative_law(&b).is_some(), integral);
            if let Ok(eq) = got {
                let differential =
                    matches!((el, toward), (ElementType::Inertance, true) | (ElementType::Compliance, false));
                assert_eq!(eq.is_differential(), differential, "{el} toward={toward}");
            }
        }
    }
}

#[test]
fn constitutive_examples() {
    let r = Bond::new(114, ElementType::Resistor, Causality::TOWARD, PowerDirection::OUT).with_param("R");
    assert_eq!(constitutive_equation(&r).unwrap().to_string(), "e(114) = R*f(114)");
    let i = Bond::new(112, ElementType::Inertance, Causality::AWAY, PowerDirection::OUT).with_param("L");
    assert_eq!(constitutive_equation(&i).unwrap().to_string(), "f(112) = (1/L)*p(112)");
    let c = Bond::new(113, ElementType::Compliance, Causality::TOWARD, PowerDirection::OUT);
    assert!(matches!(constitutive_equation(&c), Err(ConstitutiveError::MissingParameter(113))));
}
