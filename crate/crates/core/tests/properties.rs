use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;
use proptest::sample::subsequence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mimred::doc::{from_json, to_json, GraphDocument, HybridDocument};
use mimred::formula::{brute_force_nae, eval_nae, parse_nae_dimacs, random_strict_formula, Assignment, NaeFormula};
use mimred::graph::Graph;
use mimred::layout::TreeLayout;
use mimred::matching::{cut_value, is_acceptable_matching, uim, Conflict, MatchKind};
use mimred::red1::{build_h_scaled, decode_assignment, witness_order, Constants};
use mimred::red2::{build_partitioned, mapping_value, path_mapping_from_order};
use mimred::red3::{build_gadget, build_gstar, caterpillar_layout, same_position_crossing, HybridTree};
use mimred::wgraph::{
    check_balancing_order, enumerate_balancing_orders, is_balancing_order, is_balancing_tree, solve_balancing_order,
    BalancingTree, LinearOrder, WeightedGraph,
};
use mimred::widths::{exact_width, layout_value, WidthKind};

const BUDGET: u64 = 10_000_000;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn weighted(max_n: usize, max_w: u64) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        vec(option::weighted(0.5, 1..=max_w), n * (n - 1) / 2).prop_map(move |ws| {
            let edges: Vec<(usize, usize, u64)> =
                pairs(n).into_iter().zip(ws).filter_map(|((u, v), w)| w.map(|w| (u, v, w))).collect();
            WeightedGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn plain(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let edges: Vec<(usize, usize)> = pairs(n).into_iter().zip(bits).filter(|p| p.1).map(|p| p.0).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn graph_and_sides(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>, Vec<usize>)> {
    plain(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        vec(any::<bool>(), n).prop_map(move |side| {
            let (a, b) = (0..n).partition(|&v| side[v]);
            (g.clone(), a, b)
        })
    })
}

fn lax_formula() -> impl Strategy<Value = NaeFormula> {
    (3..=8usize).prop_flat_map(|n| {
        vec(subsequence((1..=n).collect::<Vec<_>>(), 3), 1..=6)
            .prop_map(move |cs| {
                let clauses = cs.into_iter().map(|c| [c[0], c[1], c[2]]).collect();
                NaeFormula::new(n, clauses, false).unwrap()
            })
    })
}

fn all_orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nae_is_symmetric_under_flip(f in lax_formula(), bits in vec(any::<bool>(), 8)) {
        let a = Assignment(bits[..f.num_vars()].to_vec());
        prop_assert_eq!(eval_nae(&f, &a).unwrap(), eval_nae(&f, &a.complement()).unwrap());
    }

    #[test]
    fn brute_force_agrees_with_evaluation(f in lax_formula()) {
        let n = f.num_vars();
        let sat: Vec<Assignment> = (0..1u32 << n)
            .map(|m| Assignment((0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect()))
            .filter(|a| eval_nae(&f, a).unwrap())
            .collect();
        match brute_force_nae(&f).unwrap() {
            Some(a) => {
                prop_assert!(eval_nae(&f, &a).unwrap());
                prop_assert_eq!(Some(&a), sat.first());
            }
            None => prop_assert!(sat.is_empty()),
        }
    }

    #[test]
    fn dimacs_round_trip(f in lax_formula()) {
        prop_assert_eq!(parse_nae_dimacs(&f.to_dimacs(), false).unwrap(), f);
    }

    #[test]
    fn solver_agrees_with_all_permutations(g in weighted(6, 4), t in 1u64..8) {
        let n = g.vertex_count();
        let exists = all_orders(n).into_iter().any(|o| is_balancing_order(&g, &LinearOrder::new(o, n).unwrap(), t));
        match solve_balancing_order(&g, t, BUDGET).unwrap() {
            Some(ord) => {
                prop_assert!(exists);
                prop_assert_eq!(check_balancing_order(&g, &ord, t).unwrap(), None);
            }
            None => prop_assert!(!exists),
        }
    }

    #[test]
    fn restriction_to_induced_subgraph(g in weighted(7, 4), t in 1u64..10, keep in vec(any::<bool>(), 7)) {
        let n = g.vertex_count();
        let Some(ord) = solve_balancing_order(&g, t, BUDGET).unwrap() else { return Ok(()) };
        let kept: Vec<usize> = ord.as_slice().iter().copied().filter(|&v| keep[v]).collect();
        prop_assume!(!kept.is_empty());
        let mut sorted = kept.clone();
        sorted.sort_unstable();
        let sub = g.induced(&sorted).unwrap();
        let seq: Vec<usize> = kept.iter().map(|v| sorted.binary_search(v).unwrap()).collect();
        prop_assert!(is_balancing_order(&sub, &LinearOrder::new(seq, sorted.len()).unwrap(), t));
        prop_assert!(n >= sorted.len());
    }

    #[test]
    fn heavy_p3_keeps_middle_inside(g in weighted(7, 5), t in 1u64..9) {
        let n = g.vertex_count();
        let mut heavy = Vec::new();
        for b in 0..n {
            for &(a, wa) in g.neighbors(b) {
                for &(c, wc) in g.neighbors(b) {
                    if a < c && wa + wc > t {
                        heavy.push((a, b, c));
                    }
                }
            }
        }
        enumerate_balancing_orders(&g, t, BUDGET, |ord| {
            let pos = LinearOrder::new(ord.to_vec(), n).unwrap().positions();
            for &(a, b, c) in &heavy {
                assert!(pos[a].min(pos[c]) < pos[b] && pos[b] < pos[a].max(pos[c]));
            }
            true
        }).unwrap();
    }

    #[test]
    fn order_implies_path_tree(g in weighted(7, 4), t in 1u64..10, seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut seq: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut seq[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let ord = LinearOrder::new(seq, n).unwrap();
        if is_balancing_order(&g, &ord, t) {
            prop_assert!(is_balancing_tree(&g, &BalancingTree::path(&ord), t));
        }
    }

    #[test]
    fn sim_never_exceeds_mim((g, a, b) in graph_and_sides(9)) {
        let mim = cut_value(&g, &a, &b, MatchKind::Mim, None, BUDGET).unwrap();
        let sim = cut_value(&g, &a, &b, MatchKind::Sim, None, BUDGET).unwrap();
        prop_assert!(sim.value <= mim.value);
        prop_assert!(is_acceptable_matching(&g, &mim.witness, Conflict::SEMI));
        prop_assert!(is_acceptable_matching(&g, &sim.witness, Conflict::FULL));
    }

    #[test]
    fn uim_matches_subset_oracle((g, a, b) in graph_and_sides(7)) {
        let cand: Vec<(usize, usize)> =
            a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).filter(|&(x, y)| g.has_edge(x, y)).collect();
        let best = (0u32..1 << cand.len())
            .map(|m| cand.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &e)| e).collect::<Vec<_>>())
            .filter(|s| is_acceptable_matching(&g, s, Conflict::UPPER))
            .map(|s| s.len())
            .max()
            .unwrap_or(0);
        prop_assert_eq!(uim(&g, &a, BUDGET).unwrap().value, best);
    }

    #[test]
    fn width_chain(g in plain(6)) {
        let w = |kind, linear| exact_width(&g, kind, linear, 6, BUDGET).unwrap();
        let sim = w(WidthKind::Sim, false).value;
        let omim = w(WidthKind::Omim, false).value;
        let mim = w(WidthKind::Mim, false);
        let lmim = w(WidthKind::Mim, true);
        let lsim = w(WidthKind::Sim, true).value;
        prop_assert!(sim <= omim && omim <= mim.value && mim.value <= lmim.value && sim <= lsim);
        for r in [&mim, &lmim] {
            let layout = TreeLayout::from_repr(&r.witness).unwrap();
            prop_assert_eq!(layout_value(&g, &layout, WidthKind::Mim, BUDGET).unwrap().value, r.value);
        }
    }

    #[test]
    fn linear_layout_matches_singleton_path_mapping(g in plain(7), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut seq: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut seq[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let layout = TreeLayout::caterpillar(&seq).unwrap();
        let ord = LinearOrder::new(seq, n).unwrap();
        let parts: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let m = path_mapping_from_order(n, &ord).unwrap();
        for (wk, mk) in [(WidthKind::Mim, MatchKind::Mim), (WidthKind::Sim, MatchKind::Sim)] {
            let lv = layout_value(&g, &layout, wk, BUDGET).unwrap().value;
            let mv = mapping_value(&g, &parts, &m, mk, None, BUDGET).unwrap().value;
            prop_assert_eq!(lv, mv);
        }
    }

    #[test]
    fn weighted_document_round_trip(g in weighted(7, 9)) {
        let doc = GraphDocument::from_weighted(&g);
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_weighted().unwrap(), g);
    }

    #[test]
    fn step_documents_round_trip(mut g in weighted(4, 2), b in 1u64..3) {
        let c = Constants::small(b);
        g.scale(c.a);
        let pg = build_partitioned(&g);
        let doc = GraphDocument::from_partitioned(&pg, Some(c)).unwrap();
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_partitioned().unwrap(), pg.clone());
        let gs = build_gstar(&pg, &c).unwrap();
        let doc = GraphDocument::from_gstar(&gs, Some(c)).unwrap();
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_gstar().unwrap().vertex_count(), gs.vertex_count());
        if pg.part_count() > 0 && gs.vertex_count() > 0 {
            let layout = caterpillar_layout(&gs, &LinearOrder::identity(pg.part_count())).unwrap();
            let hd = HybridDocument::new(HybridTree::from_layout(&layout).unwrap());
            let back: HybridDocument = from_json(&to_json(&hd)).unwrap();
            prop_assert_eq!(&back, &hd);
            prop_assert_eq!(back.into_hybrid().unwrap(), hd.into_hybrid().unwrap());
        }
    }

    #[test]
    fn every_copy_is_an_induced_path(k in 1u64..4, b in 1u64..5) {
        let w = 3 * k;
        let pg = build_partitioned(&WeightedGraph::from_edges(2, &[(0, 1, w)]).unwrap());
        let gadget = build_gadget(&pg, 0, &Constants::small(b)).unwrap();
        let g = Graph::materialize(&gadget, 1000).unwrap();
        for copy in 0..gadget.copies {
            let verts: Vec<usize> = gadget.copy_range(copy).collect();
            let sub = g.induced(&verts);
            let len = verts.len();
            prop_assert_eq!(sub.edge_count(), len - 1);
            for i in 1..len {
                prop_assert!(sub.has_edge(i - 1, i));
            }
        }
    }

    #[test]
    fn splitting_every_copy_yields_a_large_induced_matching(
        k in 1u64..3,
        b in 2u64..9,
        labels in vec(any::<bool>(), 400),
    ) {
        let pg = build_partitioned(&WeightedGraph::from_edges(2, &[(0, 1, 3 * k)]).unwrap());
        let gadget = build_gadget(&pg, 0, &Constants::small(b)).unwrap();
        let len = gadget.path_len();
        let mut class: Vec<usize> = labels[..gadget.vertex_count()].iter().map(|&x| x as usize).collect();
        // Force every copy to meet both sides.
        for copy in 0..gadget.copies {
            class[gadget.local(copy, 0)] = 0;
            class[gadget.local(copy, len - 1)] = 1;
        }
        let g = Graph::materialize(&gadget, 1000).unwrap();
        let (_, edges) = same_position_crossing(&gadget, &class).unwrap();
        prop_assert!(edges.len() * (len - 1) >= gadget.copies);
        prop_assert!(is_acceptable_matching(&g, &edges, Conflict::FULL));
    }
}

#[test]
fn reduction_round_trips_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let c = Constants::small(3);
    let mut checked = 0;
    while checked < 10 {
        let f = random_strict_formula(6, &mut rng).unwrap();
        let Some(a) = brute_force_nae(&f).unwrap() else { continue };
        let h = build_h_scaled(&f, &c).unwrap();
        let ord = witness_order(&f, &h, &a).unwrap();
        assert!(is_balancing_order(&h.graph, &ord, c.tau));
        let pos = ord.positions();
        let m = &h.meta;
        let c_min = m.clauses.iter().map(|&v| pos[v]).min().unwrap();
        let c_max = m.clauses.iter().map(|&v| pos[v]).max().unwrap();
        for (ci, clause) in f.clauses().iter().enumerate() {
            let here = pos[m.clauses[ci]];
            let around: Vec<usize> = clause.iter().map(|&x| pos[m.variables[x - 1]]).collect();
            assert!(around.iter().any(|&p| p < here) && around.iter().any(|&p| p > here));
        }
        for &v in &m.variables {
            assert!(pos[v] < c_min || pos[v] > c_max);
        }
        assert!(eval_nae(&f, &decode_assignment(&f, &h, &ord).unwrap()).unwrap());
        checked += 1;
    }
}

#[test]
fn alpha_identity_on_the_large_profile() {
    let c = Constants::FULL;
    assert_eq!(c.alpha(), c.tau + c.gamma - 1);
    assert_eq!(c.alpha(), (c.b - 1).div_ceil(6 * c.tau) - 1);
}
