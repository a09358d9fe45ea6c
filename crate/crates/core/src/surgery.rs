//! Cover surgery on action graphs of a free group.
//!
//! [`splice`] takes `p` copies of a graph, cuts one edge of a `u`-cycle in
//! every copy and reconnects copy `i` to copy `i + 1`. Repeated splicing drives
//! [`equalize_orders`], which produces a p-group quotient where a list of
//! pairwise non-commensurable words share one large order while a further
//! word `v` has a strictly smaller, nontrivial order.

use std::collections::HashSet;

use crate::action_graph::{ActionGraph, CyclePath, FiniteQuotient};
use crate::error::{Budget, Error, Result};
use crate::perm::{gcd, Perm};
use crate::search::{p_group_candidates, small_candidates, Candidate, Family, ALL_FAMILIES};
use crate::words::{commensurable, cyclic_reduce, primitive_root, Basis, Word};

/// Seed for the randomized candidate families when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpliceSpec {
    pub word: Word,
    /// Any vertex of the chosen `u`-cycle; the representative is traced from it.
    pub cycle_start: u32,
    /// Edge position along the representative, 0-based.
    pub edge_index: usize,
    pub copies: usize,
}

/// Vertex `v` of copy `copy` in a graph spliced from `degree`-vertex copies.
pub fn copy_vertex(degree: usize, copy: usize, v: u32) -> u32 {
    (copy * degree) as u32 + v
}

pub fn cycle_from(g: &ActionGraph, u: &Word, start: u32) -> Result<CyclePath> {
    let u = u.reduce();
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut vertices = Vec::new();
    let mut v = start;
    let mut length = 0;
    loop {
        for &l in u.letters() {
            vertices.push(v);
            v = g.step(v, l);
        }
        length += 1;
        if v == start {
            break;
        }
    }
    Ok(CyclePath { word: u, start, length, vertices })
}

pub fn splice(g: &ActionGraph, s: &SpliceSpec) -> Result<ActionGraph> {
    g.validate()?;
    if s.copies == 0 {
        return Err(Error::InvalidSpec("copies must be at least 1".into()));
    }
    if s.cycle_start as usize >= g.degree() {
        return Err(Error::InvalidSpec(format!("vertex {} out of range", s.cycle_start)));
    }
    let rep = cycle_from(g, &s.word, s.cycle_start)?;
    if s.edge_index >= rep.edge_count() {
        return Err(Error::EdgeNotOnCycle { index: s.edge_index, len: rep.edge_count() });
    }
    let letter = rep.letter(s.edge_index);
    let (gen, tail) = rep.positive_edge(g, s.edge_index);
    let head = g.perm(gen as usize).apply(tail);
    let n = g.degree();
    let p = s.copies;
    let perms = g
        .perms()
        .iter()
        .enumerate()
        .map(|(k, perm)| {
            let mut images = Vec::with_capacity(n * p);
            for copy in 0..p {
                for v in 0..n as u32 {
                    let w = perm.apply(v);
                    let target_copy = if k == gen as usize && v == tail {
                        // the representative always moves forward one copy
                        if letter.inv {
                            (copy + p - 1) % p
                        } else {
                            (copy + 1) % p
                        }
                    } else {
                        copy
                    };
                    debug_assert!(k != gen as usize || v != tail || w == head);
                    images.push(copy_vertex(n, target_copy, w));
                }
            }
            Perm::from_images(images)
        })
        .collect();
    ActionGraph::new(g.basis().clone(), perms)
}

/// Maximal cycle length and the representatives attaining it.
pub fn maximal_cycles(g: &ActionGraph, w: &Word) -> Result<(usize, Vec<CyclePath>)> {
    let cycles = g.u_cycles(w)?;
    let max = cycles.iter().map(|c| c.length).max().unwrap_or(0);
    Ok((max, cycles.into_iter().filter(|c| c.length == max).collect()))
}

fn edge_set(g: &ActionGraph, cycles: &[CyclePath]) -> HashSet<(u32, u32)> {
    cycles
        .iter()
        .flat_map(|c| (0..c.edge_count()).map(move |i| c.positive_edge(g, i)))
        .collect()
}

/// Every word's cycles avoid `l`-near vertices and every word acts nontrivially.
pub fn qualifies(c: &Candidate, words: &[Word], l: usize) -> bool {
    words.iter().all(|w| {
        if c.graph.element_order(w) <= 1 {
            return false;
        }
        let cycles = match c.graph.u_cycles(w) {
            Ok(cs) => cs,
            Err(_) => return false,
        };
        // in a Cayley graph every cycle of w is a translate of the one at 0
        let to_check = if c.regular { &cycles[..1] } else { &cycles[..] };
        to_check.iter().all(|cy| !c.graph.has_l_near(cy, l))
    })
}

/// A p-group quotient in which every word's cycles have no `l`-near vertices
/// and every word has nontrivial image.
pub fn find_simple_quotient(
    basis: &Basis,
    words: &[Word],
    p: u64,
    l: usize,
    budget: &mut Budget,
    families: &[Family],
    seed: u64,
) -> Result<FiniteQuotient> {
    let words: Vec<Word> = words.iter().map(Word::reduce).collect();
    if words.iter().any(Word::is_empty) {
        return Err(Error::EmptyWord);
    }
    for w in &words {
        basis.check(w)?;
    }
    for c in p_group_candidates(basis, p, families, seed) {
        budget.charge(1 + c.graph.degree() as u64, "simple quotient search")?;
        if qualifies(&c, &words, l) {
            let mut q = FiniteQuotient::free(c.graph);
            q.log.push(format!("simple quotient: {}", c.label));
            for w in &words {
                let text = basis.format(w);
                q.record(&text)?;
            }
            return Ok(q);
        }
    }
    Err(Error::BudgetExceeded("candidate ladder exhausted without a simple quotient".into()))
}

pub fn find_simple_quotient_default(
    basis: &Basis,
    words: &[Word],
    p: u64,
    l: usize,
    budget: &mut Budget,
) -> Result<FiniteQuotient> {
    find_simple_quotient(basis, words, p, l, budget, &ALL_FAMILIES, DEFAULT_SEED)
}

#[derive(Debug, Clone)]
pub struct EqualizeReport {
    pub quotient: FiniteQuotient,
    pub rounds: usize,
    /// Orders of the input words `us`, then of `v` if one was given.
    pub orders: Vec<u64>,
    /// Lengths of the shared paths walked before each gain.
    pub shared_path_lengths: Vec<usize>,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Position of an edge on some maximal `w`-cycle crossed exactly once by its
/// representative and outside `avoid`.
fn gain_edge(
    g: &ActionGraph,
    max_cycles: &[CyclePath],
    avoid: &HashSet<(u32, u32)>,
) -> Option<(u32, usize)> {
    for c in max_cycles {
        for i in 0..c.edge_count() {
            let e = c.positive_edge(g, i);
            if !avoid.contains(&e) && c.crossings(g, e) == 1 {
                return Some((c.start, i));
            }
        }
    }
    None
}

struct Engine<'a> {
    words: Vec<Word>,
    v: Option<Word>,
    p: u64,
    budget: &'a mut Budget,
    rounds: usize,
    shared: Vec<usize>,
}

impl Engine<'_> {
    fn orders(&self, g: &ActionGraph) -> (Vec<u64>, Option<u64>) {
        (
            self.words.iter().map(|w| g.element_order(w)).collect(),
            self.v.as_ref().map(|v| g.element_order(v)),
        )
    }

    fn splice(&mut self, g: &ActionGraph, word: &Word, start: u32, idx: usize, copies: usize) -> Result<ActionGraph> {
        self.budget.charge((g.degree() * copies) as u64, "splice")?;
        self.rounds += 1;
        splice(g, &SpliceSpec { word: word.clone(), cycle_start: start, edge_index: idx, copies })
    }

    /// Splices until word `i` has order at least every other word's and
    /// strictly above `v`'s.
    fn dominate(&mut self, mut g: ActionGraph, i: usize) -> Result<ActionGraph> {
        let target = self.words[i].clone();
        let mut walk: Option<(u32, usize)> = None;
        loop {
            let (orders, ov) = self.orders(&g);
            let oi = orders[i];
            let mut blockers: Vec<(Word, u64)> = orders
                .iter()
                .enumerate()
                .filter(|&(j, &o)| j != i && o > oi)
                .map(|(j, &o)| (self.words[j].clone(), o))
                .collect();
            if let (Some(v), Some(o)) = (&self.v, ov) {
                if o >= oi {
                    blockers.push((v.clone(), o));
                }
            }
            if blockers.is_empty() {
                return Ok(g);
            }
            let (_, target_cycles) = maximal_cycles(&g, &target)?;
            let mut all_avoid = HashSet::new();
            let mut worst: Option<(HashSet<(u32, u32)>, u64)> = None;
            for (b, o) in &blockers {
                let (_, bc) = maximal_cycles(&g, b)?;
                let edges = edge_set(&g, &bc);
                all_avoid.extend(edges.iter().copied());
                if worst.as_ref().is_none_or(|(_, wo)| o > wo) {
                    worst = Some((edges, *o));
                }
            }
            let worst = worst.expect("at least one blocker").0;
            let choice = gain_edge(&g, &target_cycles, &all_avoid)
                .or_else(|| gain_edge(&g, &target_cycles, &worst));
            match choice {
                Some((start, idx)) => {
                    if let Some((_, len)) = walk.take() {
                        self.shared.push(len);
                    }
                    g = self.splice(&g, &target, start, idx, self.p as usize)?;
                }
                None => {
                    // extend the shared path along one maximal representative
                    let (start, pos) = walk.unwrap_or((target_cycles[0].start, 0));
                    let rep = cycle_from(&g, &target, start)?;
                    let mut idx = pos;
                    while idx < rep.edge_count() && rep.crossings(&g, rep.positive_edge(&g, idx)) != 1 {
                        idx += 1;
                    }
                    if idx >= rep.edge_count() {
                        return Err(Error::BudgetExceeded(
                            "no singly crossed edge left on the maximal representative".into(),
                        ));
                    }
                    g = self.splice(&g, &target, start, idx, self.p as usize)?;
                    walk = Some((start, idx + 1));
                }
            }
        }
    }
}

/// Core of the equalization: `v` may be absent (only the `us` are balanced).
pub fn equalize_with(
    basis: &Basis,
    us: &[Word],
    v: Option<&Word>,
    p: u64,
    min_order: u64,
    budget: &mut Budget,
) -> Result<EqualizeReport> {
    if !is_prime(p) {
        return Err(Error::InvalidSpec(format!("{p} is not prime")));
    }
    if us.is_empty() {
        return Err(Error::InvalidSpec("no words to equalize".into()));
    }
    let mut roots = Vec::new();
    let mut exponent_bound = 1u64;
    for u in us.iter().chain(v) {
        basis.check(u)?;
        let (root, e) = primitive_root(u)?;
        exponent_bound = exponent_bound.max(e);
        roots.push(cyclic_reduce(&root).0);
    }
    let k = us.len();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if commensurable(&roots[i], &roots[j])? {
                return Err(Error::PreconditionCommensurable(i, j));
            }
        }
    }
    if p <= exponent_bound {
        return Err(Error::PTooSmall { p, bound: exponent_bound });
    }
    let v_root = if v.is_some() { Some(roots[k].clone()) } else { None };
    let base = find_simple_quotient_default(basis, &roots, p, 0, budget)?;
    let mut engine = Engine {
        words: roots[..k].to_vec(),
        v: v_root,
        p,
        budget,
        rounds: 0,
        shared: Vec::new(),
    };
    let mut parts = Vec::new();
    for i in 0..k {
        parts.push(engine.dominate(base.graph.clone(), i)?);
    }
    let top = parts.iter().enumerate().map(|(i, g)| g.element_order(&engine.words[i])).max().unwrap_or(1);
    let mut target = 1u64;
    while target < top || target <= min_order {
        target *= p;
    }
    let mut union: Option<ActionGraph> = None;
    for (i, g) in parts.into_iter().enumerate() {
        let word = engine.words[i].clone();
        let oi = g.element_order(&word);
        let factor = (target / oi) as usize;
        let g = if factor > 1 {
            let (_, cycles) = maximal_cycles(&g, &word)?;
            let (start, idx) = gain_edge(&g, &cycles, &HashSet::new()).ok_or_else(|| {
                Error::BudgetExceeded("maximal representative has no singly crossed edge".into())
            })?;
            engine.splice(&g, &word, start, idx, factor)?
        } else {
            g
        };
        union = Some(match union {
            None => g,
            Some(u) => u.disjoint_union(&g)?,
        });
    }
    let graph = union.expect("at least one word");
    let mut quotient = FiniteQuotient::free(graph);
    let mut orders = Vec::new();
    for w in us.iter().chain(v) {
        orders.push(quotient.record(&basis.format(&w.reduce()))?);
    }
    let (ou, ov) = (&orders[..k], orders.get(k));
    let ok = ou.iter().all(|&o| o == ou[0])
        && ou[0] > min_order
        && ov.is_none_or(|&o| ou[0] > o && o > 1);
    if !ok {
        return Err(Error::BudgetExceeded(format!("equalization ended with orders {orders:?}")));
    }
    quotient.log.push(format!("{} splices", engine.rounds));
    Ok(EqualizeReport {
        quotient,
        rounds: engine.rounds,
        orders,
        shared_path_lengths: engine.shared,
    })
}

/// A p-group quotient with `|u_1| = ... = |u_k| > |v| > 1` and `|u_1| > n`.
pub fn equalize_orders(
    basis: &Basis,
    us: &[Word],
    v: &Word,
    p: u64,
    n: u64,
    budget: &mut Budget,
) -> Result<EqualizeReport> {
    equalize_with(basis, us, Some(v), p, n, budget)
}

/// A quotient in which `w` has order exactly `n`.
pub fn exact_order_quotient(basis: &Basis, w: &Word, n: u64, budget: &mut Budget) -> Result<FiniteQuotient> {
    let w = w.reduce();
    basis.check(&w)?;
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if n == 0 {
        return Err(Error::InvalidSpec("order must be positive".into()));
    }
    let rank = basis.rank();
    let sums = w.exponent_sums(rank);
    let finish = |graph: ActionGraph, label: String| -> Result<FiniteQuotient> {
        let mut q = FiniteQuotient::free(graph);
        q.log.push(label);
        q.record(&basis.format(&w))?;
        Ok(q)
    };
    let assigned = |exps: &[u64]| -> u64 {
        let s: i64 = sums.iter().zip(exps).map(|(&e, &c)| e * c as i64).sum();
        s.rem_euclid(n as i64) as u64
    };
    // unit vectors first, then everything in lexicographic order
    let units = (0..rank).map(|i| {
        let mut e = vec![0u64; rank];
        e[i] = 1 % n;
        e
    });
    let lex = (0..n.saturating_pow(rank as u32).min(1 << 20)).map(|mut idx| {
        let mut e = vec![0u64; rank];
        for c in e.iter_mut().rev() {
            *c = idx % n;
            idx /= n;
        }
        e
    });
    // a cyclic image of order n exists iff the exponent sums are jointly prime to n
    let content = sums.iter().fold(0u64, |a, &b| gcd(a, b.unsigned_abs()));
    let cyclic_ok = gcd(content, n) == 1;
    for exps in units.chain(lex).take_while(|_| cyclic_ok) {
        budget.charge(1, "cyclic exact-order search")?;
        if gcd(assigned(&exps), n) == 1 {
            let perms = exps
                .iter()
                .map(|&c| Perm::from_images((0..n as u32).map(|v| (v + c as u32) % n as u32).collect()))
                .collect();
            let graph = ActionGraph::from_parts(basis.clone(), perms)?;
            return finish(graph, format!("Z/{n} exponents {exps:?}"));
        }
    }
    // nonabelian fallback: permutation images of small degree
    for d in 2..=6usize {
        let elems = crate::search::symmetric_group(d);
        let total = (elems.len() as u64).pow(rank as u32);
        for mut idx in 0..total {
            budget.charge(1, "permutation exact-order search")?;
            let mut gens = Vec::with_capacity(rank);
            for _ in 0..rank {
                gens.push(elems[(idx % elems.len() as u64) as usize].clone());
                idx /= elems.len() as u64;
            }
            gens.reverse();
            let graph = ActionGraph::from_parts(basis.clone(), gens)?;
            if graph.element_order(&w) == n {
                return finish(graph, format!("Sym({d}) image"));
            }
        }
    }
    Err(Error::BudgetExceeded(format!("no quotient with |w| = {n} found")))
}

/// Candidate quotients without the p-group restriction, used by the
/// amalgam engine when it needs small groups.
pub fn small_quotients(basis: &Basis) -> Box<dyn Iterator<Item = Candidate>> {
    small_candidates(basis, 12, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Family;

    fn xy() -> Basis {
        Basis::new(&["x", "y"]).unwrap()
    }

    fn w(s: &str) -> Word {
        xy().parse(s).unwrap()
    }

    #[test]
    fn splice_z3_two_copies() {
        let g = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        let s = SpliceSpec { word: w("x"), cycle_start: 0, edge_index: 0, copies: 2 };
        let h = splice(&g, &s).unwrap();
        assert_eq!(h.degree(), 6);
        assert_eq!(h.element_order(&w("x")), 6);
        // cutting (x, 0) in both copies: 0->4->5->3->1->2->0
        assert_eq!(h.perm(0).images(), &[4, 2, 0, 1, 5, 3]);
    }

    #[test]
    fn splice_with_one_copy_is_identity() {
        let g = ActionGraph::cyclic_shift(xy(), 5, &[0, 1]);
        let s = SpliceSpec { word: w("x y"), cycle_start: 2, edge_index: 3, copies: 1 };
        assert_eq!(splice(&g, &s).unwrap(), g);
    }

    #[test]
    fn splice_rejects_bad_specs() {
        let g = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        let s = SpliceSpec { word: w("x"), cycle_start: 0, edge_index: 3, copies: 2 };
        assert_eq!(splice(&g, &s), Err(Error::EdgeNotOnCycle { index: 3, len: 3 }));
        let s = SpliceSpec { word: w("x"), cycle_start: 0, edge_index: 0, copies: 0 };
        assert!(matches!(splice(&g, &s), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn splice_negative_letter() {
        let g = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        let s = SpliceSpec { word: w("x^-1"), cycle_start: 0, edge_index: 1, copies: 3 };
        let h = splice(&g, &s).unwrap();
        assert_eq!(h.element_order(&w("x")), 9);
    }

    #[test]
    fn simple_quotient_examples() {
        let mut b = Budget::default();
        let q = find_simple_quotient_default(&xy(), &[w("x")], 2, 0, &mut b).unwrap();
        assert_eq!(q.graph.degree(), 2);

        let mut b = Budget::default();
        let q = find_simple_quotient_default(&xy(), &[w("x y")], 3, 0, &mut b).unwrap();
        for c in q.graph.u_cycles(&w("x y")).unwrap() {
            assert!(!q.graph.has_l_near(&c, 0));
        }

        let mut b = Budget::default();
        let r = find_simple_quotient(&xy(), &[w("x y x^-1 y^-1")], 2, 0, &mut b, &[Family::Cyclic], DEFAULT_SEED);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn abelianization_grid_is_simple_for_xy() {
        // (Z/3)^2, vertex 3*i + j, x adds to i, y adds to j
        let x = Perm::from_images((0..9).map(|v| ((v / 3 + 1) % 3) * 3 + v % 3).collect());
        let y = Perm::from_images((0..9).map(|v| (v / 3) * 3 + (v % 3 + 1) % 3).collect());
        let g = ActionGraph::new(xy(), vec![x, y]).unwrap();
        let cycles = g.u_cycles(&w("x y")).unwrap();
        assert_eq!(cycles.len(), 3);
        for c in &cycles {
            assert_eq!(c.vertices.len(), 6);
            let distinct: HashSet<u32> = c.vertices.iter().copied().collect();
            assert_eq!(distinct.len(), 6);
            assert!(!g.has_l_near(c, 0));
        }
    }

    #[test]
    fn equalize_examples() {
        let mut b = Budget::default();
        let r = equalize_orders(&xy(), &[w("x"), w("y")], &w("x y"), 2, 2, &mut b).unwrap();
        let g = &r.quotient.graph;
        let (ox, oy, oxy) = (g.element_order(&w("x")), g.element_order(&w("y")), g.element_order(&w("x y")));
        assert!(ox == oy && oy > oxy && oxy > 1 && ox > 2, "{ox} {oy} {oxy}");

        let mut b = Budget::default();
        let r = equalize_orders(&xy(), &[w("x")], &w("y"), 2, 1, &mut b).unwrap();
        let g = &r.quotient.graph;
        assert!(g.element_order(&w("x")) > g.element_order(&w("y")));
        assert!(g.element_order(&w("y")) > 1);

        let mut b = Budget::default();
        let r = equalize_orders(&xy(), &[w("x y"), w("y x")], &w("y"), 2, 1, &mut b);
        assert_eq!(r.unwrap_err(), Error::PreconditionCommensurable(0, 1));
    }

    #[test]
    fn equalize_rejects_small_prime() {
        let mut b = Budget::default();
        let r = equalize_orders(&xy(), &[w("x x y")], &w("y y y x"), 2, 1, &mut b);
        assert!(r.is_ok(), "{r:?}");
        let r = equalize_orders(&xy(), &[w("x y x y")], &w("y"), 2, 1, &mut b);
        assert_eq!(r.unwrap_err(), Error::PTooSmall { p: 2, bound: 2 });
    }

    #[test]
    fn exact_order_examples() {
        let mut b = Budget::default();
        let q = exact_order_quotient(&xy(), &w("x"), 5, &mut b).unwrap();
        assert_eq!(q.graph.degree(), 5);
        assert_eq!(q.graph.element_order(&w("x")), 5);

        let q = exact_order_quotient(&xy(), &w("x y"), 4, &mut b).unwrap();
        assert_eq!(q.graph.perm(0).apply(0), 1);
        assert!(q.graph.perm(1).is_identity());
        assert_eq!(q.graph.element_order(&w("x y")), 4);

        let q = exact_order_quotient(&xy(), &w("x y x^-1 y^-1"), 2, &mut b).unwrap();
        assert_eq!(q.graph.element_order(&w("x y x^-1 y^-1")), 2);
    }
}
