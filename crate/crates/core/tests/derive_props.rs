use std::collections::BTreeSet;

use bograph::corpus::builtin;
use bograph::derive::{summation_core, PathEngine};
use bograph::*;
use bograph_oracle::{random_chain_model, random_model};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn element_strategy() -> impl Strategy<Value = ElementType> {
    prop::sample::select(ElementType::ALL.to_vec())
}

fn junction_strategy() -> impl Strategy<Value = Junction> {
    (any::<bool>(), prop::collection::vec((element_strategy(), any::<bool>(), any::<bool>()), 3..=8)).prop_map(
        |(one, specs)| {
            let bonds = specs
                .into_iter()
                .enumerate()
                .map(|(k, (el, toward, inward))| {
                    Bond::new(
                        110 + k as u32 + 1,
                        el,
                        Causality { stroke_toward_junction: toward },
                        PowerDirection { toward_junction: inward },
                    )
                })
                .collect();
            Junction { number: 1, kind: JunctionKind::from_bool(one), bonds }
        },
    )
}

fn corpus_and_chains(count: usize, seed: u64) -> Vec<BondGraphModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BondGraphModel> = corpus::NAMES.iter().map(|n| builtin(n)).collect();
    out.extend((0..count).map(|_| random_chain_model(&mut rng, 4).model));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn summation_skips_the_final_two(j in junction_strategy()) {
        let form = summation_core(&j).unwrap();
        let n = j.bonds.len();
        let kind = j.kind.summed();
        let mut direct = LinearForm::zero();
        for b in &j.bonds[..n - 2] {
            direct.add_term(&RatFunc::from_int(b.direction.sign()), b.signal(kind));
        }
        prop_assert_eq!(&form, &direct);
        let support: BTreeSet<u32> = form.vars().map(|v| v.bond).collect();
        let want: BTreeSet<u32> = j.bonds[..n - 2].iter().map(|b| b.label).collect();
        prop_assert_eq!(support, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_junction_sum_covers_every_bond(j in junction_strategy()) {
        let model = BondGraphModel {
            name: "single".into(),
            parameters: Default::default(),
            branches: vec![Branch { id: 1, junctions: vec![j.clone()] }],
        };
        let engine = PathEngine::new(&model, 0);
        let form = engine.jun_sum(0).unwrap();
        let kind = j.kind.summed();
        prop_assert_eq!(form.len(), j.bonds.len());
        for b in &j.bonds {
            prop_assert_eq!(form.coeff(&b.signal(kind)), RatFunc::from_int(b.direction.sign()));
        }
    }
}

#[test]
fn path_depth_is_bounded_by_junction_count() {
    for model in corpus_and_chains(200, 7) {
        for (bi, branch) in model.branches.iter().enumerate() {
            let engine = PathEngine::new(&model, bi);
            for (i, j) in branch.junctions.iter().enumerate() {
                for r in [engine.jun_sum(i), engine.path_select(i, j.kind.common())] {
                    assert!(!matches!(r, Err(DeriveError::RecursionLimit(_))), "{}", print_dsl(&model));
                }
            }
            assert!(engine.max_depth() <= branch.junctions.len());
        }
        derive_system(&model).unwrap();
    }
}

#[test]
fn complete_models_have_strong_bonds_either_way() {
    for model in corpus_and_chains(100, 11) {
        for j in model.branches.iter().flat_map(|b| &b.junctions) {
            assert!(strong_bond(j, true).is_some() || strong_bond(j, false).is_some());
        }
    }
}

#[test]
fn single_stroke_flips_break_completeness() {
    for model in corpus_and_chains(100, 13) {
        assert!(check_causal_completeness(&model).complete);
        for loc in model.locations().collect::<Vec<_>>() {
            let mut m = model.clone();
            let b = &mut m.branches[loc.branch].junctions[loc.junction].bonds[loc.bond];
            b.causality.stroke_toward_junction = !b.causality.stroke_toward_junction;
            let r = check_causal_completeness(&m);
            assert!(!r.complete && !r.violations.is_empty(), "flip {:?}\n{}", loc, print_dsl(&model));
        }
    }
}

#[test]
fn gyrator_links_swap_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut seen = 0;
    while seen < 20 {
        let g = random_chain_model(&mut rng, 3);
        if !g.model.bonds().any(|b| b.element == ElementType::Gyrator) {
            continue;
        }
        seen += 1;
        let engine = PathEngine::new(&g.model, 0);
        for i in 0..g.model.branches[0].junctions.len() {
            for side in [bograph::derive::Side::Prev, bograph::derive::Side::Next] {
                for kind in [SignalKind::Effort, SignalKind::Flow] {
                    if let Ok(v) = engine.across(i, side, kind) {
                        assert_eq!(v.kind, kind);
                    }
                }
            }
        }
    }
}

#[test]
fn random_models_validate() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        assert!(validate_labels(&random_model(&mut rng)).is_empty());
    }
}
