mod common;

use std::time::{Duration, Instant};

use common::oracle::{
    brute_force_consistent, brute_force_entails, random_formula, random_instance,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sedac_core::entailment::{check_consistency, entails, entails_with_fresh, Entailment};
use sedac_core::fol::{Formula, FormulaSet};

fn set(fs: &[Formula]) -> FormulaSet {
    fs.iter().cloned().collect()
}

#[test]
fn agrees_with_model_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eda_c001);
    let mut times = Vec::new();
    let mut entailed = 0;
    for n in 0..600 {
        let inst = random_instance(&mut rng);
        let axioms = set(&inst.axioms);
        let t = Instant::now();
        let got = entails(&axioms, &inst.goal).unwrap();
        times.push(t.elapsed());
        let want = brute_force_entails(axioms.as_slice(), &inst.goal);
        assert_eq!(
            got.is_entailed(),
            want,
            "instance {n}: {:?} |= {}",
            inst.axioms,
            inst.goal
        );
        if let Entailment::NotEntailed(m) = got {
            assert!(
                axioms.iter().all(|a| m.satisfies(a)),
                "instance {n}: bad countermodel"
            );
            assert!(
                !m.satisfies(&inst.goal),
                "instance {n}: countermodel satisfies goal"
            );
        } else {
            entailed += 1;
        }
    }
    // both outcomes should be well represented
    assert!(entailed > 60 && entailed < 540, "entailed {entailed}/600");
    times.sort();
    assert!(times[times.len() / 2] < Duration::from_millis(10));
    assert!(*times.last().unwrap() < Duration::from_secs(1));
}

#[test]
fn consistency_agrees_with_model_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        let axioms = set(&inst.axioms);
        let got = check_consistency(&axioms).unwrap().is_consistent();
        assert_eq!(
            got,
            brute_force_consistent(axioms.as_slice()),
            "{:?}",
            inst.axioms
        );
    }
}

fn arb_instance() -> impl Strategy<Value = (Vec<Formula>, Formula, Vec<Formula>)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng);
        let extra = (0..3)
            .map(|_| random_formula(&mut rng, &["p", "q", "r", "s"], &["a", "b", "c"]))
            .collect();
        (inst.axioms, inst.goal, extra)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn second_fresh_constant_changes_nothing((axioms, goal, _) in arb_instance()) {
        let ax = set(&axioms);
        let one = entails_with_fresh(&ax, &goal, 1).unwrap().is_entailed();
        let two = entails_with_fresh(&ax, &goal, 2).unwrap().is_entailed();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn monotone_under_consistent_extension((axioms, goal, extra) in arb_instance()) {
        let ax = set(&axioms);
        prop_assume!(entails(&ax, &goal).unwrap().is_entailed());
        let mut bigger = ax.clone();
        bigger.extend(extra);
        prop_assume!(check_consistency(&bigger).unwrap().is_consistent());
        prop_assert!(entails(&bigger, &goal).unwrap().is_entailed());
    }

    #[test]
    fn axioms_entail_themselves((axioms, _, _) in arb_instance()) {
        let ax = set(&axioms);
        for a in ax.iter() {
            prop_assert!(entails(&ax, a).unwrap().is_entailed());
        }
    }
}
