use std::collections::HashSet;

use neutralscape::evaluation::{makespan, scan_insertions, Permutation};
use neutralscape::instance::{parse_instance, write_instance, Instance};
use neutralscape::landscape::{
    check_portal_witness, classify_typology, neutral_walk, portal_distance_series, steps_to_first_portal,
    summarize_neighborhood, Typology,
};
use neutralscape::neighborhood::{apply_move, enumerate_insertion_moves, random_move, MoveKind};
use neutralscape::rng::search_rng;
use neutralscape::search::{first_improvement_descent, steepest_descent};
use neutralscape::stats::{autocorrelation, shuffle_null_model};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..8, 1usize..5).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(0u32..20, m), n)
            .prop_map(|rows| Instance::from_rows("p", rows).unwrap())
    })
}

fn instance_and_perm() -> impl Strategy<Value = (Instance, Permutation)> {
    instance().prop_flat_map(|inst| {
        let n = inst.n_jobs();
        (Just(inst), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(inst, v)| (inst, Permutation::new(v).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scan_equals_naive_reinsertion((inst, perm) in instance_and_perm(), pos in 0usize..8) {
        let a = pos % perm.len();
        let got = scan_insertions(&inst, &perm, a).unwrap();
        prop_assert_eq!(got.len(), perm.len());
        for (b, v) in got.into_iter().enumerate() {
            let mut naive = perm.as_slice().to_vec();
            let job = naive.remove(a);
            naive.insert(b, job);
            prop_assert_eq!(v, makespan(&inst, &Permutation::new(naive).unwrap()).unwrap());
        }
    }

    #[test]
    fn makespan_bounded_by_lower_bound_and_total((inst, perm) in instance_and_perm()) {
        let c = makespan(&inst, &perm).unwrap();
        prop_assert!(c >= inst.lower_bound());
        prop_assert!(c <= inst.total_processing_time());
    }

    #[test]
    fn insertion_neighborhood_is_distinct_and_symmetric((_, perm) in instance_and_perm()) {
        let n = perm.len();
        let moves = enumerate_insertion_moves(n);
        prop_assert_eq!(moves.len(), (n - 1) * (n - 1));
        let neighbors: HashSet<Permutation> = moves.iter().map(|&m| apply_move(&perm, m).unwrap()).collect();
        prop_assert_eq!(neighbors.len(), moves.len());
        prop_assert!(!neighbors.contains(&perm));
        for nb in &neighbors {
            let back: HashSet<Permutation> =
                enumerate_insertion_moves(n).into_iter().map(|m| apply_move(nb, m).unwrap()).collect();
            prop_assert!(back.contains(&perm));
        }
    }

    #[test]
    fn moves_invert(n in 2usize..12, seed in any::<u64>(), kind in 0usize..3) {
        let kind = [MoveKind::Insertion, MoveKind::Transpose, MoveKind::Exchange][kind];
        let mut rng = search_rng(seed);
        let perm = Permutation::random(n, &mut rng);
        let mv = random_move(kind, n, &mut rng);
        let there = apply_move(&perm, mv).unwrap();
        prop_assert_ne!(&there, &perm);
        prop_assert_eq!(apply_move(&there, mv.inverse()).unwrap(), perm);
    }

    #[test]
    fn summary_partitions_neighborhood((inst, perm) in instance_and_perm()) {
        let s = summarize_neighborhood(&inst, &perm).unwrap();
        let n = perm.len();
        prop_assert_eq!(s.neighbor_count, (n - 1) * (n - 1));
        prop_assert_eq!(s.neutral_moves.len(), s.neutral_degree);
        prop_assert!(s.neutral_degree + s.improving_degree <= s.neighbor_count);
        prop_assert_eq!(s.is_portal(), s.improving_degree > 0);
        if let Some((mv, v)) = s.improving_move {
            prop_assert!(check_portal_witness(&inst, &perm, mv).unwrap());
            prop_assert_eq!(v, makespan(&inst, &apply_move(&perm, mv).unwrap()).unwrap());
        }
    }

    #[test]
    fn descents_end_at_local_optima((inst, perm) in instance_and_perm(), seed in any::<u64>()) {
        let mut rng = search_rng(seed);
        for res in [
            steepest_descent(&inst, &perm, &mut rng).unwrap(),
            first_improvement_descent(&inst, &perm, &mut rng).unwrap(),
        ] {
            prop_assert!(res.local_optimum);
            prop_assert!(res.best_fitness <= makespan(&inst, &perm).unwrap());
            prop_assert_eq!(summarize_neighborhood(&inst, &res.best_perm).unwrap().improving_degree, 0);
        }
    }

    #[test]
    fn walks_are_neutral_and_typed((inst, perm) in instance_and_perm(), seed in any::<u64>(), max_steps in 1usize..30) {
        let mut rng = search_rng(seed);
        let opt = steepest_descent(&inst, &perm, &mut rng).unwrap().best_perm;
        let rec = neutral_walk(&inst, &opt, max_steps, &mut rng).unwrap();
        let f0 = rec.steps[0].fitness;
        prop_assert!(rec.steps.iter().all(|s| s.fitness == f0));
        prop_assert!(rec.len() <= max_steps + 1);
        prop_assert!(!rec.steps[0].is_portal && !rec.steps[0].revisited);
        prop_assert_eq!(rec.typology, classify_typology(&rec));
        prop_assert_eq!(rec.first_portal_step, steps_to_first_portal(&rec));
        match rec.typology {
            Typology::T1 => prop_assert!(rec.len() == 1 && rec.steps[0].neutral_degree == 0),
            Typology::T3 => prop_assert!(rec.first_portal_step.is_some()),
            Typology::T2 => prop_assert!(rec.first_portal_step.is_none()),
        }
        let pairs = portal_distance_series(&rec);
        if let Some(p) = rec.steps.iter().rposition(|s| s.is_portal) {
            prop_assert_eq!(pairs.len(), p + 1);
            prop_assert_eq!(pairs[p].1, 0);
        } else {
            prop_assert!(pairs.is_empty());
        }
    }

    #[test]
    fn instance_text_round_trips(inst in instance()) {
        let back = parse_instance(&write_instance(&inst)).unwrap();
        prop_assert_eq!(back.rows().collect::<Vec<_>>(), inst.rows().collect::<Vec<_>>());
    }

    #[test]
    fn permutation_json_round_trips(n in 1usize..30, seed in any::<u64>()) {
        let p = Permutation::random(n, &mut search_rng(seed));
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Permutation>(&text).unwrap(), p);
    }

    #[test]
    fn shuffling_destroys_smooth_correlation(seed in any::<u64>(), len in 60usize..200) {
        // AR(1)-like smooth series: rho(1) well above 0.3.
        let mut rng = search_rng(seed);
        let mut x = 0.0f64;
        let series: Vec<f64> = (0..len)
            .map(|_| {
                x = 0.95 * x + rand::Rng::random_range(&mut rng, -1.0..1.0);
                x
            })
            .collect();
        let ac = autocorrelation(&series, 1).unwrap();
        prop_assume!(ac.rho1() > 0.3);
        let null = shuffle_null_model(&series, 100, &mut rng).unwrap();
        prop_assert!(null.mean_rho1.abs() * 5.0 < ac.rho1());
    }
}

#[test]
fn duplicate_permutations_rejected() {
    let json = "[0,0,1]";
    assert!(serde_json::from_str::<Permutation>(json).is_err());
}
