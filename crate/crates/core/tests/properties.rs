mod common;

use cubefactor::perfection::{is_bipartite, perfection_graph};
use cubefactor::search::factorization::random_factorization;
use cubefactor::sign::{apply_switch, find_switchable_squares};
use cubefactor::{factorization_sign, Dimension, Factorization};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn sample(d: u32, seed: u64) -> Factorization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_factorization(Dimension::new(d).unwrap(), &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_factorizations_are_valid(d in 1u32..=7, seed in any::<u64>()) {
        prop_assert!(is_factorization(d, &tables(&sample(d, seed))));
    }

    #[test]
    fn json_round_trips(d in 1u32..=6, seed in any::<u64>()) {
        let f = sample(d, seed);
        prop_assert_eq!(Factorization::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn switching_twice_restores(d in 2u32..=6, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let f = sample(d, seed);
        let moves = find_switchable_squares(&f);
        prop_assume!(!moves.is_empty());
        let mv = &moves[pick.index(moves.len())];
        let g = apply_switch(&f, mv).unwrap();
        prop_assert_ne!(&g, &f);
        prop_assert!(is_factorization(d, &tables(&g)));
        prop_assert_eq!(apply_switch(&g, mv).unwrap(), f);
    }

    #[test]
    fn switches_keep_the_sign(d in 2u32..=6, seed in any::<u64>()) {
        let f = sample(d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mv = find_switchable_squares(&f).choose(&mut rng).cloned();
        if let Some(mv) = mv {
            let g = apply_switch(&f, &mv).unwrap();
            prop_assert_eq!(factorization_sign(&g), factorization_sign(&f));
        }
    }

    #[test]
    fn sign_agrees_with_definition(d in 2u32..=5, seed in any::<u64>()) {
        let f = sample(d, seed);
        prop_assert_eq!(factorization_sign(&f).value(), definition_sign(&tables(&f)));
    }

    #[test]
    fn perfection_graphs_agree_and_are_bipartite(d in 2u32..=6, seed in any::<u64>()) {
        let f = sample(d, seed);
        let t = tables(&f);
        let g = perfection_graph(&f);
        let e = perfection_edges(&t);
        prop_assert_eq!(g.edges(), e.clone());
        let verdict = is_bipartite(&g);
        prop_assert!(verdict.certifies(&g));
        prop_assert_eq!(verdict.is_bipartite(), is_bipartite_brute(d as usize, &e));
        prop_assert!(verdict.is_bipartite());
    }

    #[test]
    fn pair_unions_are_even_cycles_covering_the_cube(d in 2u32..=6, seed in any::<u64>()) {
        let t = tables(&sample(d, seed));
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let lens = cycle_lengths(&t[i], &t[j]);
                prop_assert!(lens.iter().all(|&c| c % 2 == 0 && c >= 4));
                prop_assert_eq!(lens.iter().sum::<usize>(), 1 << d);
            }
        }
    }

    #[test]
    fn coordinate_permutations_preserve_validity_and_perfection(d in 2u32..=6, seed in any::<u64>()) {
        let f = sample(d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<u32> = (1..=d).collect();
        perm.shuffle(&mut rng);
        let g = f.permute_coordinates(&perm);
        prop_assert!(is_factorization(d, &tables(&g)));
        prop_assert_eq!(perfection_edges(&tables(&g)), perfection_edges(&tables(&f)));
        prop_assert_eq!(factorization_sign(&g), factorization_sign(&f));
    }
}
