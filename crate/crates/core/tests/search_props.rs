mod common;

use common::{random_qp, rng};
use qpfeas_core::search::ConfigGraph;
use qpfeas_core::{
    cbf_scenario, greedy_maxfs, heuristic_maxfs, phase1_check, validate_hard, Configuration, Error,
    QpInstance,
};
use rand::Rng;

fn hard_feasible_case(seed: u64) -> Option<QpInstance> {
    let mut r = rng(seed);
    let m = r.random_range(1..=4);
    let c = r.random_range(1..=9);
    let qp = random_qp(&mut r, m, c);
    validate_hard(&qp).unwrap().is_feasible().then_some(qp)
}

/// Best level by plain enumeration, decided by the Phase-1 route.
fn brute_force_level(qp: &QpInstance) -> Option<usize> {
    let graph = ConfigGraph::new(qp);
    (0..graph.vertex_count())
        .map(|id| graph.vertex(id))
        .filter(|cfg| phase1_check(qp, cfg).unwrap().is_feasible())
        .map(|cfg| cfg.level())
        .max()
}

#[test]
fn greedy_matches_brute_force() {
    let mut cases = 0;
    for seed in 0..200 {
        let Some(qp) = hard_feasible_case(seed) else {
            continue;
        };
        cases += 1;
        let expected = brute_force_level(&qp);
        match greedy_maxfs(&qp) {
            Ok(res) => {
                assert_eq!(Some(res.level), expected, "seed {seed}");
                assert!(phase1_check(&qp, &res.chosen).unwrap().is_feasible());
                assert_eq!(res.evaluations, 1 << qp.soft_set().len());
            }
            Err(Error::NoFeasibleConfiguration) => assert_eq!(expected, None, "seed {seed}"),
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(cases > 50);
}

#[test]
fn heuristic_never_beats_greedy() {
    let (mut solved, mut dead_ends) = (0, 0);
    for seed in 0..200 {
        let Some(qp) = hard_feasible_case(seed) else {
            continue;
        };
        let Ok(greedy) = greedy_maxfs(&qp) else {
            continue;
        };
        let start = Configuration::all_kept(qp.num_constraints());
        let heur = match heuristic_maxfs(&qp, &start) {
            Ok(h) => h,
            Err(Error::NoFeasibleConfiguration) => {
                // Descent ran out of moves: the fully disregarded vertex is infeasible.
                let all_soft = Configuration::disregarding(qp.num_constraints(), &qp.soft_set());
                assert!(
                    !phase1_check(&qp, &all_soft).unwrap().is_feasible(),
                    "seed {seed}"
                );
                dead_ends += 1;
                continue;
            }
            Err(e) => panic!("seed {seed}: {e}"),
        };
        solved += 1;
        let s = qp.soft_set().len();
        assert!(heur.level <= greedy.level, "seed {seed}");
        assert!(
            phase1_check(&qp, &heur.chosen).unwrap().is_feasible(),
            "seed {seed}"
        );
        assert!(heur.evaluations <= 1 + s * (s + 1) / 2, "seed {seed}");
        assert!(heur.chosen.disregarded().iter().all(|&i| !qp.is_hard(i)));
    }
    assert!(
        solved > 4 * dead_ends,
        "{solved} solved, {dead_ends} dead ends"
    );
}

#[test]
fn greedy_is_deterministic() {
    let qp = cbf_scenario(3.7).unwrap().instance;
    let a = greedy_maxfs(&qp).unwrap();
    let b = greedy_maxfs(&qp).unwrap();
    assert_eq!(a.chosen, b.chosen);
    assert_eq!(a.trace.len(), b.trace.len());
    for ((ca, va), (cb, vb)) in a.trace.iter().zip(b.trace.iter()) {
        assert_eq!(ca, cb);
        assert_eq!(va.status, vb.status);
    }
}

#[test]
fn scenario_at_zero() {
    let qp = cbf_scenario(0.0).unwrap().instance;
    let greedy = greedy_maxfs(&qp).unwrap();
    assert_eq!(greedy.chosen.to_string(), "++++++--+");
    assert_eq!(greedy.level, 7);
    assert_eq!(greedy.evaluations, 32);

    let heur = heuristic_maxfs(&qp, &Configuration::all_kept(9)).unwrap();
    assert_eq!(heur.chosen.to_string(), "++++----+");
    assert_eq!(heur.level, 5);
    assert_eq!(heur.evaluations, 15);
}

#[test]
fn heuristic_rejects_flipped_hard_start() {
    let qp = cbf_scenario(0.0).unwrap().instance;
    let start = Configuration::disregarding(9, &[0]);
    assert!(heuristic_maxfs(&qp, &start).is_err());
}

#[test]
fn random_instances_are_reproducible() {
    use qpfeas_core::random_instance;
    for (m, c) in [(2, 10), (10, 100), (50, 1000)] {
        assert_eq!(random_instance(m, c, 4), random_instance(m, c, 4));
    }
}
