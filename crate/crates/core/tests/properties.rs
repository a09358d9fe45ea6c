mod common;

use common::pres;
use ordsep_core::action_graph::lcm_of_cycles;
use ordsep_core::amalgam::{amalgam_eq, conjugate_in_amalgam, is_reduced_amalgam, reduce_amalgam};
use ordsep_core::surgery::{maximal_cycles, splice, SpliceSpec};
use ordsep_core::words::{commensurable, conjugate_in_free, cyclic_reduce, primitive_root};
use ordsep_core::{
    ActionGraph, AmalgamWord, Basis, Budget, Conjugacy, FiniteQuotient, Letter, Perm, Side, Syllable, Word,
};
use proptest::prelude::*;

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect()))
}

fn nonempty_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(rank, max_len).prop_map(|w| w.reduce()).prop_filter("nonempty", |w| !w.is_empty())
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle().prop_map(Perm::from_images)
}

fn graph(max_degree: usize) -> impl Strategy<Value = ActionGraph> {
    (1..=max_degree).prop_flat_map(|n| {
        (perm(n), perm(n)).prop_map(|(a, b)| ActionGraph::new(Basis::new(&["x", "y"]).unwrap(), vec![a, b]).unwrap())
    })
}

fn amalgam_word() -> impl Strategy<Value = AmalgamWord> {
    prop::collection::vec((any::<bool>(), nonempty_word(2, 3)), 0..=4).prop_map(|ss| {
        AmalgamWord::from_syllables(
            ss.into_iter().map(|(a, w)| Syllable::new(if a { Side::A } else { Side::B }, w)).collect(),
        )
    })
}

proptest! {
    #[test]
    fn reduce_is_idempotent_and_shortens(w in word(3, 64)) {
        let r = w.reduce();
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(r.len() <= w.len());
        prop_assert!(r.is_reduced());
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn primitive_root_round_trip(w in nonempty_word(2, 8), k in 1i64..4) {
        let w = w.pow(k);
        let (root, e) = primitive_root(&w).unwrap();
        prop_assert_eq!(root.pow(e as i64).reduce(), w.reduce());
        prop_assert_eq!(cyclic_reduce(&root).0.pow(e as i64).reduce(), cyclic_reduce(&w).0);
        prop_assert!(e as i64 >= k);
    }

    #[test]
    fn free_conjugacy_witness_verifies(u in nonempty_word(2, 6), g in word(2, 6)) {
        let v = g.inverse().mul(&u).mul(&g);
        let h = conjugate_in_free(&u, &v).expect("conjugates");
        prop_assert_eq!(h.inverse().mul(&u).mul(&h), v.reduce());
    }

    #[test]
    fn commensurability_is_an_equivalence(
        roots in prop::collection::vec(nonempty_word(2, 3), 3),
        picks in prop::collection::vec((0usize..3, 1i64..3, word(2, 3)), 3),
    ) {
        // powers of conjugates of a few roots, so that related pairs occur
        let ws: Vec<Word> = picks.iter().map(|(r, k, g)| g.inverse().mul(&roots[*r].pow(*k)).mul(g)).collect();
        let c = |i: usize, j: usize| commensurable(&ws[i], &ws[j]).unwrap();
        for i in 0..3 {
            prop_assert!(c(i, i));
            for j in 0..3 {
                prop_assert_eq!(c(i, j), c(j, i));
                for k in 0..3 {
                    prop_assert!(!(c(i, j) && c(j, k)) || c(i, k));
                }
            }
        }
    }

    #[test]
    fn cycle_laws(g in graph(12), w in nonempty_word(2, 8)) {
        let cycles = g.u_cycles(&w).unwrap();
        prop_assert_eq!(g.element_order(&w), lcm_of_cycles(&cycles));
        prop_assert_eq!(cycles.iter().map(|c| c.length).sum::<usize>(), g.degree());
        for c in &cycles {
            // the representative closes up after `length` passes of the word
            prop_assert_eq!(c.vertices.len(), c.length * w.len());
            prop_assert_eq!(g.trace(*c.vertices.last().unwrap(), &Word::from_letters(vec![*w.letters().last().unwrap()])), c.start);
        }
    }

    #[test]
    fn image_is_a_homomorphism(g in graph(12), a in word(2, 6), b in word(2, 6)) {
        prop_assert_eq!(g.image_perm(&a.mul(&b)), g.image_perm(&a).then(&g.image_perm(&b)));
    }

    #[test]
    fn near_vertices_are_monotone(g in graph(12), w in nonempty_word(2, 5)) {
        for c in g.u_cycles(&w).unwrap() {
            for l in 1..4 {
                if !g.has_l_near(&c, l) {
                    for k in 0..l {
                        prop_assert!(!g.has_l_near(&c, k));
                    }
                }
            }
        }
    }

    #[test]
    fn splice_preserves_divisibility(g in graph(8), w in nonempty_word(2, 4), p in 1usize..4, pick in any::<prop::sample::Index>()) {
        let cycles = g.u_cycles(&w).unwrap();
        let (max, reps) = maximal_cycles(&g, &w).unwrap();
        prop_assume!(cycles.iter().all(|c| max % c.length == 0));
        let rep = &reps[0];
        let once: Vec<usize> = (0..rep.edge_count()).filter(|&i| rep.crossings(&g, rep.positive_edge(&g, i)) == 1).collect();
        prop_assume!(!once.is_empty());
        let spec = SpliceSpec { word: w.clone(), cycle_start: rep.start, edge_index: once[pick.index(once.len())], copies: p };
        let h = splice(&g, &spec).unwrap();
        prop_assert!(h.validate().is_ok());
        prop_assert_eq!(h.degree(), g.degree() * p);
        let new_cycles = h.u_cycles(&w).unwrap();
        let new_max = new_cycles.iter().map(|c| c.length).max().unwrap();
        prop_assert_eq!(new_max, max * p);
        prop_assert!(new_cycles.iter().all(|c| new_max % c.length == 0));
    }

    #[test]
    fn graph_json_round_trip(g in graph(10), w in nonempty_word(2, 5)) {
        prop_assert_eq!(ActionGraph::from_json(&g.to_json()).unwrap(), g.clone());
        let mut q = FiniteQuotient::free(g.clone());
        let text = g.basis().format(&w);
        q.record(&text).unwrap();
        let back = FiniteQuotient::from_json(&q.to_json()).unwrap();
        prop_assert!(back.verify().unwrap());
        prop_assert_eq!(back.order_of(&text).unwrap(), g.element_order(&w));
    }

    #[test]
    fn amalgam_reduction_is_stable(w in amalgam_word()) {
        let p = pres();
        let r = reduce_amalgam(&w, &p);
        prop_assert!(is_reduced_amalgam(&r, &p));
        prop_assert_eq!(reduce_amalgam(&r, &p), r.clone());
        prop_assert!(r.letter_count() <= w.letter_count());
        let back = reduce_amalgam(&p.from_free_word(&p.to_free_word(&r)), &p);
        prop_assert_eq!(back, r);
    }

    #[test]
    fn amalgam_conjugacy_witness_verifies(u in amalgam_word(), g in amalgam_word()) {
        let p = pres();
        let v = g.inverse().concat(&u).concat(&g);
        match conjugate_in_amalgam(&u, &v, &p, &mut Budget::default()).unwrap() {
            Conjugacy::Yes(h) => prop_assert!(amalgam_eq(&h.inverse().concat(&u).concat(&h), &v, &p)),
            Conjugacy::Unknown => {}
            Conjugacy::No => prop_assert!(false, "conjugates reported as not conjugate"),
        }
    }
}
