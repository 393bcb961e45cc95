mod common;

use cffa_core::colorcoding::{
    colorful_table, dp_colorful_solve, solve_colorcoding_deterministic, solve_colorcoding_randomized, BundleOracle,
    RandomizedOptions,
};
use cffa_core::instance::is_valid;
use cffa_core::oracle::solve_oracle;
use cffa_core::{Budget, Completeness, Instance};
use proptest::prelude::*;

fn partial(inst: Instance) -> Instance {
    inst.with_completeness(Completeness::Partial).unwrap()
}

/// Colors in `colors` can be handed out to agents `0..=agent`, each getting
/// a non-empty set of its own, so that every agent has a feasible bundle
/// among the jobs of its colors.
fn brute_entry(inst: &Instance, coloring: &[u8], agent: usize, colors: u32) -> bool {
    let jobs_of = |cs: u32| (0..inst.m()).filter(|&x| cs >> coloring[x] & 1 == 1).fold(0u64, |m, x| m | 1 << x);
    fn go(inst: &Instance, jobs_of: &dyn Fn(u32) -> u64, i: usize, last: usize, free: u32) -> bool {
        if i > last {
            return true;
        }
        let mut sub = free;
        while sub != 0 {
            if common::agent_feasible_within(inst, i, jobs_of(sub)) && go(inst, jobs_of, i + 1, last, free & !sub) {
                return true;
            }
            sub = (sub - 1) & free;
        }
        false
    }
    go(inst, &jobs_of, 0, agent, colors)
}

fn arb_colored() -> impl Strategy<Value = (Instance, Vec<u8>, usize)> {
    (common::arb_instance(7, 3, 5), 1usize..=4).prop_flat_map(|(inst, q)| {
        let m = inst.m();
        (Just(partial(inst)), proptest::collection::vec(0..q as u8, m), Just(q))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn table_entries_match_color_assignments((inst, coloring, q) in arb_colored()) {
        let t = colorful_table(&inst, &coloring, q, BundleOracle::BruteForce, &Budget::default()).unwrap();
        for agent in 0..inst.n() {
            for s in 1..1u32 << q {
                prop_assert_eq!(t.entry(agent, s), brute_entry(&inst, &coloring, agent, s), "agent {} colors {:b}", agent, s);
                if let Some(bundles) = t.witness(agent, s) {
                    for (i, &b) in bundles.iter().enumerate() {
                        prop_assert!(common::agent_feasible_within(&inst, i, b));
                        prop_assert!(bundles[..i].iter().all(|&c| c & b == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn branching_oracle_fills_the_same_table((inst, coloring, q) in arb_colored()) {
        let b = Budget::default();
        let brute = colorful_table(&inst, &coloring, q, BundleOracle::BruteForce, &b).unwrap();
        let branch = colorful_table(&inst, &coloring, q, BundleOracle::Branching, &b).unwrap();
        for agent in 0..inst.n() {
            for s in 1..1u32 << q {
                prop_assert_eq!(brute.entry(agent, s), branch.entry(agent, s));
            }
        }
    }

    #[test]
    fn planted_colorful_solutions_are_found(inst in common::arb_instance(8, 3, 5), seed in any::<u64>()) {
        let inst = partial(inst);
        let inst = match inst.size_bound() { Some(_) => inst, None => inst.with_size_bound(Some(2.min(inst.m())))? };
        let b = Budget::default();
        if let Some(w) = solve_oracle(&inst, &b).unwrap().witness {
            let q = (inst.n() * inst.size_bound().unwrap()).min(inst.m());
            let mut coloring: Vec<u8> = (0..inst.m()).map(|x| ((seed >> (x % 32)) as usize % q) as u8).collect();
            for (k, (job, _)) in w.iter().enumerate() {
                coloring[job] = k as u8;
            }
            let r = dp_colorful_solve(&inst, &coloring, q, BundleOracle::BruteForce, &b).unwrap();
            prop_assert!(r.is_yes());
            prop_assert!(is_valid(&inst, r.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn randomized_yes_is_never_wrong(inst in common::arb_instance(7, 3, 5), seed in any::<u64>()) {
        let inst = partial(inst);
        let b = Budget::default();
        let opts = RandomizedOptions { seed, repetitions: Some(3), oracle: BundleOracle::BruteForce };
        let r = solve_colorcoding_randomized(&inst, &opts, &b).unwrap().result;
        if r.is_yes() {
            prop_assert!(solve_oracle(&inst, &b).unwrap().is_yes());
            prop_assert!(is_valid(&inst, r.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn deterministic_driver_is_exact(inst in common::arb_instance(7, 2, 5)) {
        let inst = partial(inst);
        let b = Budget::default();
        let want = solve_oracle(&inst, &b).unwrap().is_yes();
        prop_assert_eq!(solve_colorcoding_deterministic(&inst, BundleOracle::BruteForce, &b).unwrap().is_yes(), want);
        prop_assert_eq!(solve_colorcoding_deterministic(&inst, BundleOracle::Branching, &b).unwrap().is_yes(), want);
    }
}

#[test]
fn complete_variants_are_refused() {
    let inst = Instance::new(Completeness::Complete, Some(1), 2, vec![vec![1, 1]], vec![], 1).unwrap();
    assert!(solve_colorcoding_deterministic(&inst, BundleOracle::BruteForce, &Budget::default()).is_err());
}
