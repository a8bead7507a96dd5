mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use common::{max_len, random_expr, random_labeled, relational_selected, rng, walk_oracle, LABELS};
use proptest::prelude::*;
use rand::Rng;
use webmaps::navlang::{
    compile, evaluate, parse, Automaton, Guard, NavExpression, Semantics, MAX_REPEAT,
};
use webmaps::NodeId;

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z][a-zA-Z0-9_.:#@~%-]{0,6}",
        "[ -~]{1,6}",
        Just("_".to_owned()),
        Just("it's".to_owned()),
    ]
}

fn expr() -> impl Strategy<Value = NavExpression> {
    let leaf = prop_oneof![
        3 => word().prop_map(NavExpression::Label),
        1 => Just(NavExpression::AnyLabel),
        1 => (word(), word()).prop_map(|(k, v)| NavExpression::NodeTest(k, v)),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| NavExpression::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| NavExpression::alt(a, b)),
            inner.clone().prop_map(NavExpression::star),
            inner.clone().prop_map(NavExpression::plus),
            inner.clone().prop_map(NavExpression::optional),
            (inner, 0..=MAX_REPEAT, 0..=4u32).prop_map(|(e, m, d)| NavExpression::repeat(
                e,
                m,
                (m + d).min(MAX_REPEAT)
            )),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn parser_never_panics(src in "[ -~]{0,24}") {
        if let Ok(e) = parse(&src) {
            prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }
}

/// Guards as letters: node checks and edge consumption alike.
type Letter = Guard;

fn closure(a: &Automaton, set: &mut BTreeSet<usize>) {
    let mut stack: Vec<usize> = set.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for t in a.outgoing(q) {
            if t.guard == Guard::Epsilon && set.insert(t.to) {
                stack.push(t.to);
            }
        }
    }
}

fn step(a: &Automaton, set: &BTreeSet<usize>, l: &Letter) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = set
        .iter()
        .flat_map(|&q| a.outgoing(q).filter(|t| &t.guard == l).map(|t| t.to))
        .collect();
    closure(a, &mut out);
    out
}

/// True iff the two automata accept the same guard words, by searching the
/// product of their subset constructions for a state where exactly one
/// accepts.
fn same_guard_language(a: &Automaton, b: &Automaton) -> bool {
    let letters: std::collections::HashSet<&Letter> = a
        .transitions()
        .iter()
        .chain(b.transitions())
        .map(|t| &t.guard)
        .filter(|g| **g != Guard::Epsilon)
        .collect();
    let mut sa = BTreeSet::from([a.start()]);
    let mut sb = BTreeSet::from([b.start()]);
    closure(a, &mut sa);
    closure(b, &mut sb);
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::from([(sa, sb)]);
    while let Some((x, y)) = queue.pop_front() {
        if seen.insert((x.clone(), y.clone()), ()).is_some() {
            continue;
        }
        let acc_x = x.iter().any(|&q| a.is_accepting(q));
        let acc_y = y.iter().any(|&q| b.is_accepting(q));
        if acc_x != acc_y {
            return false;
        }
        for &l in &letters {
            queue.push_back((step(a, &x, l), step(b, &y, l)));
        }
    }
    true
}

#[test]
fn bounded_repeat_equals_concatenation() {
    let mut r = rng(71);
    for _ in 0..300 {
        let depth = r.gen_range(1..=4);
        let e = random_expr(&mut r, depth, true);
        let twice = compile(&NavExpression::repeat(e.clone(), 2, 2));
        let concat = compile(&NavExpression::concat(e.clone(), e.clone()));
        assert!(same_guard_language(&twice, &concat), "{e}");
        let once_more = compile(&NavExpression::concat(
            e.clone(),
            NavExpression::concat(e.clone(), e.clone()),
        ));
        let label = matches!(e, NavExpression::Label(_) | NavExpression::AnyLabel);
        if label {
            assert!(!same_guard_language(&twice, &once_more), "{e}");
        }
    }
}

#[test]
fn semantics_agree_on_selection_and_successful_is_within_visited() {
    let mut r = rng(72);
    for _ in 0..500 {
        let n = r.gen_range(1..=30);
        let m = r.gen_range(0..=3 * n);
        let g = random_labeled(&mut r, n, m);
        let depth = r.gen_range(1..=5);
        let e = random_expr(&mut r, depth, true);
        let seed = NodeId::from(common::name(r.gen_range(0..n)));
        let v = evaluate(&g, &seed, &e, Semantics::Visited).unwrap();
        let s = evaluate(&g, &seed, &e, Semantics::Successful).unwrap();
        assert_eq!(v.selected, s.selected, "{e}");
        let ve: BTreeSet<_> = v.region.edges().iter().collect();
        assert!(s.region.edges().iter().all(|x| ve.contains(x)), "{e}");
        assert_eq!(
            v.selected,
            relational_selected(&g, seed.as_str(), &e),
            "{e}"
        );
        assert!(v.region.contains(seed.as_str()) && s.region.contains(seed.as_str()));
        for x in &s.selected {
            assert!(s.region.contains(x.as_str()));
            let reach = webmaps::reachable_avoiding(&s.region, &seed, &BTreeSet::new()).unwrap();
            assert!(x == &seed || reach.contains(x), "{x} not reachable in {e}");
        }
    }
}

fn edge_ids(g: &webmaps::LabeledGraph, sub: &webmaps::LabeledGraph) -> BTreeSet<usize> {
    sub.edges()
        .iter()
        .map(|e| g.edges().iter().position(|x| x == e).unwrap())
        .collect()
}

#[test]
fn star_free_expressions_match_walk_enumeration_exactly() {
    let mut r = rng(73);
    let mut checked = 0;
    for _ in 0..400 {
        let n = r.gen_range(1..=6);
        let m = r.gen_range(0..=2 * n);
        let g = random_labeled(&mut r, n, m);
        let depth = r.gen_range(1..=4);
        let e = random_expr(&mut r, depth, false);
        let bound = max_len(&e).unwrap();
        if bound > 6 {
            continue;
        }
        let seed = common::name(r.gen_range(0..n));
        let oracle = walk_oracle(&g, &seed, &e, bound);
        let v = evaluate(&g, &seed.as_str().into(), &e, Semantics::Visited).unwrap();
        let s = evaluate(&g, &seed.as_str().into(), &e, Semantics::Successful).unwrap();
        assert_eq!(v.selected, oracle.selected, "{e}");
        assert_eq!(edge_ids(&g, &v.region), oracle.visited, "{e}");
        assert_eq!(edge_ids(&g, &s.region), oracle.successful, "{e}");
        checked += 1;
    }
    assert!(checked >= 300, "{checked}");
}

#[test]
fn starred_expressions_contain_bounded_walk_results() {
    let mut r = rng(74);
    for _ in 0..300 {
        let n = r.gen_range(1..=6);
        let m = r.gen_range(0..=2 * n);
        let g = random_labeled(&mut r, n, m);
        let depth = r.gen_range(1..=4);
        let e = random_expr(&mut r, depth, true);
        let seed = common::name(r.gen_range(0..n));
        let oracle = walk_oracle(&g, &seed, &e, 5);
        let v = evaluate(&g, &seed.as_str().into(), &e, Semantics::Visited).unwrap();
        let s = evaluate(&g, &seed.as_str().into(), &e, Semantics::Successful).unwrap();
        assert!(oracle.selected.is_subset(&v.selected), "{e}");
        assert!(oracle.visited.is_subset(&edge_ids(&g, &v.region)), "{e}");
        assert!(oracle.successful.is_subset(&edge_ids(&g, &s.region)), "{e}");
    }
}

#[test]
fn unknown_seed_is_rejected() {
    let g = random_labeled(&mut rng(75), 3, 3);
    let err = evaluate(
        &g,
        &"nowhere".into(),
        &NavExpression::label(LABELS[0]),
        Semantics::Visited,
    );
    assert!(matches!(err, Err(webmaps::Error::UnknownNode(_))));
}
