use std::collections::BTreeMap;

use bograph::corpus::builtin;
use bograph::{print_dsl, state_space, Rational};
use bograph_oracle::{has_algebraic_loop, oracle_junction_equations, oracle_state_space, random_chain_model, RowTag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bindings(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
    pairs.iter().map(|(k, v)| (k.to_string(), Rational::from_integer((*v).into()))).collect()
}

#[test]
fn rlc_oracle_row_counts() {
    let m = builtin("rlc");
    let sys = oracle_junction_equations(&m, &bindings(&[("R", 2), ("L", 3), ("C", 5)])).unwrap();
    assert_eq!(sys.count(RowTag::Summation), 1);
    assert_eq!(sys.count(RowTag::Equality), 3);
    assert_eq!(sys.count(RowTag::Constitutive), 4);
    assert_eq!(sys.count(RowTag::Derivative), 2);
}

#[test]
fn corpus_matches_oracle() {
    let cases: [(&str, Vec<(&str, i64)>); 3] = [
        ("rlc", vec![("R", 2), ("L", 3), ("C", 5)]),
        ("fig6", vec![("L1", 2), ("L2", 3), ("L3", 5), ("R1", 7), ("R2", 11), ("C2", 13), ("n", 4)]),
        (
            "hand-index",
            vec![("Ra_4", 2), ("Jm_4", 3), ("Dm_4", 5), ("Motor_4", 7), ("J_4", 11), ("K_2", 13), ("D_4", 17), ("Geer_4", 19)],
        ),
    ];
    for (name, b) in cases {
        let m = builtin(name);
        let b = bindings(&b);
        let ss = state_space(&m).unwrap();
        let (a, bm) = ss.instantiate_exact(&b).unwrap();
        let o = oracle_state_space(&m, &b).unwrap();
        assert_eq!(ss.states, o.states, "{name}");
        assert_eq!(a, o.a, "{name}");
        assert_eq!(bm, o.b, "{name}");
    }
}

#[test]
fn random_chains_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..200 {
        let g = random_chain_model(&mut rng, 4);
        assert!(!has_algebraic_loop(&g.model));
        let ss = state_space(&g.model).unwrap_or_else(|e| panic!("case {case}: {e}\n{}", print_dsl(&g.model)));
        let (a, b) = ss.instantiate_exact(&g.bindings).unwrap();
        let o = oracle_state_space(&g.model, &g.bindings).unwrap();
        assert_eq!(ss.states, o.states, "case {case}");
        assert_eq!(ss.inputs, o.inputs, "case {case}");
        assert_eq!(a, o.a, "case {case}\n{}", print_dsl(&g.model));
        assert_eq!(b, o.b, "case {case}\n{}", print_dsl(&g.model));
    }
}
