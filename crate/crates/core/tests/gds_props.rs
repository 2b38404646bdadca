mod common;

use common::{perturb, random_graph, random_system, rng};
use graphasm::gds::{
    distance, embed_gas, is_locally_deterministic, psi, run_weakly_fair, starred,
    unique_result_oracle, DistributedSystem, Distance, Gds, Kind, LiveView, RunConfig, RunStatus,
};
use graphasm::graph::{GraphAssemblySystem, Label, LabeledGraph, Rule};
use proptest::prelude::*;
use rand::Rng;

/// Longest chain ending at `s`, by enumerating every chain explicitly.
fn depth_by_paths(d: &DistributedSystem, s: usize) -> usize {
    d.subsystem(s)
        .parents
        .iter()
        .map(|&p| 1 + depth_by_paths(d, p))
        .max()
        .unwrap_or(0)
}

fn system(rules: Vec<Rule>, g0: LabeledGraph, labels: &[&str]) -> GraphAssemblySystem {
    GraphAssemblySystem::new(labels.iter().map(|&l| Label::from(l)), g0, rules)
        .unwrap()
        .auto_orient()
}

fn rule(name: &str, l: LabeledGraph, r: LabeledGraph) -> Rule {
    Rule::new(name, l, r).unwrap()
}

fn v(labels: &[&str]) -> LabeledGraph {
    LabeledGraph::with_labels(labels.iter().copied())
}

fn e(labels: &[&str], edges: &[(usize, usize)]) -> LabeledGraph {
    LabeledGraph::from_parts(labels.iter().copied(), edges.iter().copied()).unwrap()
}

#[test]
fn depth_matches_path_enumeration() {
    let mut r = rng(5);
    for _ in 0..200 {
        let d = random_system(&mut r, 12);
        let depths = d.depths();
        for s in 0..d.len() {
            assert_eq!(depths[s], depth_by_paths(&d, s));
        }
    }
}

#[test]
fn distance_agree_three_differ_four() {
    let mut base = DistributedSystem::new();
    let n = base.add_node();
    let a = base.add_subsystem(Kind::Process, "p", vec![n], vec![]).unwrap();
    let b = base.add_subsystem(Kind::Event, "e", vec![n], vec![a]).unwrap();
    let c = base.add_subsystem(Kind::Process, "p", vec![n], vec![b]).unwrap();
    let mut d1 = base.clone();
    d1.add_subsystem(Kind::Event, "x", vec![n], vec![c]).unwrap();
    let mut d2 = base;
    d2.add_subsystem(Kind::Event, "y", vec![n], vec![c]).unwrap();
    assert!(d1.truncate(3).is_isomorphic(&d2.truncate(3)));
    assert!(!d1.truncate(4).is_isomorphic(&d2.truncate(4)));
    assert_eq!(distance(&d1, &d2), Distance::InvPow2(3));
    assert_eq!(distance(&d1, &d1), Distance::Zero);
}

#[test]
fn ultrametric_on_sampled_triples() {
    let mut r = rng(11);
    for _ in 0..300 {
        let x = random_system(&mut r, 10);
        let y = perturb(&mut r, &x, 12);
        let z = if r.gen_bool(0.5) { perturb(&mut r, &y, 12) } else { random_system(&mut r, 10) };
        assert_eq!(distance(&x, &x), Distance::Zero);
        assert_eq!(distance(&x, &y), distance(&y, &x));
        assert!(distance(&x, &z) <= distance(&x, &y).max(distance(&y, &z)));
    }
}

/// Lockstep exploration: every rule sequence of length ≤ `depth` on the
/// graph side is replayed on the GDS side through the same embedding, and
/// the live part must equal ψ of the graph up to isomorphism.
fn check_lockstep(sys: &GraphAssemblySystem, depth: usize) {
    let (gds, map) = embed_gas(sys).unwrap();
    let g0 = sys.initial_graph();
    let mut stack = vec![(g0, gds.initial.clone(), map, 0usize)];
    while let Some((g, d, map, k)) = stack.pop() {
        assert_eq!(
            LiveView::of(&d).graph.canonical_form(),
            starred(&g).canonical_form()
        );
        assert_eq!(sys.actions(&g).is_empty(), gds.is_final(&d));
        if k == depth {
            continue;
        }
        for act in sys.actions(&g) {
            let g2 = sys.apply(&g, &act).unwrap();
            let site = graphasm::gds::Site(act.embedding.map.iter().map(|&x| map[x]).collect());
            let m = graphasm::gds::Match { production: act.rule, site };
            let d2 = gds.apply(&d, &m).unwrap();
            // the new processes for the matched vertices are the newest ones
            let mut map2 = map.clone();
            let fresh: Vec<usize> = (0..d2.len())
                .filter(|&s| d2.subsystem(s).kind == Kind::Process && s >= d.len())
                .collect();
            for (x, &gx) in act.embedding.map.iter().enumerate() {
                map2[gx] = fresh[x];
            }
            stack.push((g2, d2, map2, k + 1));
        }
    }
}

#[test]
fn production_application_commutes_with_psi() {
    let sys = system(
        vec![
            rule("bind", v(&["a", "b"]), e(&["a", "c"], &[(0, 1)])),
            rule("grow", v(&["c", "b"]), e(&["c", "c"], &[(0, 1)])),
            rule("flip", e(&["a", "c"], &[(0, 1)]), e(&["b", "c"], &[(0, 1)])),
        ],
        v(&["a", "b", "b"]),
        &["a", "b", "c"],
    );
    check_lockstep(&sys, 3);
}

#[test]
fn identity_relabel_records_one_event() {
    let sys = system(vec![rule("id", v(&["a"]), v(&["a"]))], v(&["a"]), &["a"]);
    let (gds, _) = embed_gas(&sys).unwrap();
    let m = gds.enabled(&gds.initial).remove(0);
    let d = gds.apply(&gds.initial, &m).unwrap();
    assert!(LiveView::of(&d).graph.canonical_form() == LiveView::of(&gds.initial).graph.canonical_form());
    assert_eq!(d.subsystems().iter().filter(|s| s.kind == Kind::Event).count(), 1);
    assert!(gds.initial.precedes(0, 0) && d.precedes(0, 2));
}

#[test]
fn disjoint_sites_commute() {
    let sys = system(vec![rule("r", v(&["a"]), v(&["b"]))], v(&["a", "a"]), &["a", "b"]);
    let (gds, _) = embed_gas(&sys).unwrap();
    let ms = gds.enabled(&gds.initial);
    assert_eq!(ms.len(), 2);
    let ab = gds.apply(&gds.apply(&gds.initial, &ms[0]).unwrap(), &ms[1]).unwrap();
    let ba = gds.apply(&gds.apply(&gds.initial, &ms[1]).unwrap(), &ms[0]).unwrap();
    assert!(ab.is_isomorphic(&ba));
}

#[test]
fn runner_basics() {
    let sys = system(vec![], v(&["a"]), &["a"]);
    let (gds, _) = embed_gas(&sys).unwrap();
    let c = run_weakly_fair(&gds, 1, RunConfig::steps(10));
    assert_eq!(c.steps.len(), 1);
    assert_eq!(c.status, RunStatus::Final);

    let sys = system(vec![rule("r", v(&["a"]), v(&["b"]))], v(&["a", "a"]), &["a", "b"]);
    let (gds, _) = embed_gas(&sys).unwrap();
    for seed in 0..20 {
        let c = run_weakly_fair(&gds, seed, RunConfig::steps(2));
        assert_eq!(c.status, RunStatus::Final);
        assert_eq!(c.schedule.len(), 2);
        assert!(c.trace().ends_with("status=final\n"));
    }
}

/// A self-renewing process never halts; the other one must still fire.
#[test]
fn runner_is_weakly_fair_under_a_busy_neighbour() {
    let sys = system(
        vec![rule("spin", v(&["s"]), v(&["s"])), rule("once", v(&["a"]), v(&["b"]))],
        v(&["s", "a"]),
        &["s", "a", "b"],
    );
    let (gds, _) = embed_gas(&sys).unwrap();
    for seed in 0..20 {
        let c = run_weakly_fair(&gds, seed, RunConfig::steps(3));
        assert_eq!(c.status, RunStatus::BudgetExhausted);
        assert!(c.schedule[..2].iter().any(|s| s.name == "once"));
    }
    let c = run_weakly_fair(&gds, 3, RunConfig { max_steps: 50, convergence: Some((2, 5)) });
    assert_eq!(c.status, RunStatus::ConvergedAtTruncation);
}

/// Chain growth from a seed: locally deterministic, with a finite tree.
fn ld_chain(len: usize) -> GraphAssemblySystem {
    let mut labels = vec!["s"];
    labels.extend(std::iter::repeat("f").take(len));
    system(
        vec![rule("grow", v(&["s", "f"]), e(&["t", "s"], &[(0, 1)]))],
        v(&labels),
        &["s", "f", "t"],
    )
}

#[test]
fn seeds_agree_on_ld_instance() {
    let (gds, _) = embed_gas(&ld_chain(3)).unwrap();
    assert!(is_locally_deterministic(&gds, 10, 1000).holds());
    let first = run_weakly_fair(&gds, 0, RunConfig::steps(100));
    for seed in 1..10 {
        let c = run_weakly_fair(&gds, seed, RunConfig::steps(100));
        assert_eq!(c.status, RunStatus::Final);
        assert!(c.result().is_isomorphic(first.result()));
    }
}

#[test]
fn ld_verdicts() {
    let single = system(vec![rule("r", v(&["a"]), v(&["b"]))], v(&["a"]), &["a", "b"]);
    let (gds, _) = embed_gas(&single).unwrap();
    assert!(is_locally_deterministic(&gds, 5, 100).holds());

    let twin = system(
        vec![rule("p", v(&["a"]), v(&["b"])), rule("q", v(&["a"]), v(&["c"]))],
        v(&["a"]),
        &["a", "b", "c"],
    );
    let (gds, _) = embed_gas(&twin).unwrap();
    match is_locally_deterministic(&gds, 5, 100) {
        graphasm::gds::LdVerdict::Counterexample(cx) => {
            assert_eq!(cx.depth, 0);
            assert_eq!(cx.productions, ("p".to_string(), "q".to_string()));
        }
        other => panic!("expected counterexample, got {other:?}"),
    }
    assert!(!unique_result_oracle(&gds, 5, 100).is_unique());
}

#[test]
fn oracle_examples() {
    let none = system(vec![], v(&["a"]), &["a"]);
    let (gds, _) = embed_gas(&none).unwrap();
    assert!(unique_result_oracle(&gds, 3, 100).is_unique());

    let commuting = system(
        vec![rule("p", v(&["a"]), v(&["b"])), rule("q", v(&["c"]), v(&["d"]))],
        v(&["a", "c"]),
        &["a", "b", "c", "d"],
    );
    let (gds, _) = embed_gas(&commuting).unwrap();
    assert!(unique_result_oracle(&gds, 5, 100).is_unique());

    let race = system(
        vec![rule("p", v(&["a", "x"]), v(&["b", "y"])), rule("q", v(&["x", "c"]), v(&["y", "d"]))],
        v(&["a", "x", "c"]),
        &["a", "b", "c", "d", "x", "y"],
    );
    let (gds, _) = embed_gas(&race).unwrap();
    assert!(!is_locally_deterministic(&gds, 5, 100).holds());
    match unique_result_oracle(&gds, 5, 100) {
        graphasm::gds::OracleOutcome::NotUnique { results, .. } => assert!(results >= 2),
        other => panic!("expected two results, got {other:?}"),
    }
}

#[test]
fn psi_of_initial_is_d0() {
    let sys = ld_chain(2);
    let (gds, _) = embed_gas(&sys).unwrap();
    let (d, _) = psi(&starred(&sys.initial_graph()), gds.ports);
    assert_eq!(d, gds.initial);
}

fn random_gas(seed: u64) -> GraphAssemblySystem {
    let mut r = rng(seed);
    let n0 = r.gen_range(2..=4);
    let g0 = random_graph(&mut r, n0, &["a", "b"], 0.3);
    let count = r.gen_range(1..=3);
    let rules = (0..count)
        .map(|i| {
            let n = r.gen_range(1..=2);
            let l = random_graph(&mut r, n, &["a", "b"], 0.5);
            let rr = random_graph(&mut r, n, &["b", "c"], 0.5);
            rule(&format!("r{i}"), l, rr)
        })
        .collect();
    system(rules, g0, &["a", "b", "c"])
}

fn gds_of(seed: u64) -> Gds {
    embed_gas(&random_gas(seed)).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_idempotent(seed in any::<u64>(), m in 0usize..8, n in 0usize..8) {
        let d = random_system(&mut rng(seed), 12);
        let (n, m) = (n.min(m), n.max(m));
        prop_assert!(d.truncate(m).truncate(n).is_isomorphic(&d.truncate(n)));
    }

    #[test]
    fn random_systems_lockstep(seed in any::<u64>()) {
        check_lockstep(&random_gas(seed), 3);
    }

    #[test]
    fn local_determinism_implies_unique_result(seed in any::<u64>()) {
        let gds = gds_of(seed);
        let ld = is_locally_deterministic(&gds, 8, 400);
        let oracle = unique_result_oracle(&gds, 8, 400);
        if let graphasm::gds::LdVerdict::HoldsOnExplored { complete: true, .. } = ld {
            if !matches!(oracle, graphasm::gds::OracleOutcome::Inconclusive { .. }) {
                prop_assert!(oracle.is_unique());
            }
        }
    }

    #[test]
    fn schedules_are_fair_within_horizon(seed in any::<u64>()) {
        let gds = gds_of(seed);
        let c = run_weakly_fair(&gds, seed, RunConfig::steps(12));
        // replay: a pair enabled at step t is fired or disabled within
        // |enabled at t| steps
        let mut pending: Vec<(usize, Vec<usize>, usize, usize)> = Vec::new();
        for (t, d) in c.steps.iter().enumerate().take(c.schedule.len()) {
            let enabled: Vec<(usize, Vec<usize>)> = gds
                .enabled(d)
                .into_iter()
                .map(|m| (m.production, gds.consumed(d, &m).unwrap()))
                .collect();
            pending.retain(|(p, s, _, _)| enabled.contains(&(*p, s.clone())));
            for (p, s) in &enabled {
                if !pending.iter().any(|(q, u, _, _)| q == p && u == s) {
                    pending.push((*p, s.clone(), t, enabled.len()));
                }
            }
            for (_, _, since, bound) in &pending {
                prop_assert!(t - since <= *bound);
            }
            let fired = &c.schedule[t];
            pending.retain(|(p, s, _, _)| !(*p == fired.production && *s == fired.site));
        }
    }
}
