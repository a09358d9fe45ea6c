//! Order separation of two non-conjugate elements of the amalgam.
//!
//! The engine first reduces both elements to cyclically reduced cores and
//! rules out conjugacy, then follows the shape of the pair:
//! a trivial `v`, both cores in one factor, cores in different factors, or
//! an alternating `u`. The last case glues a compact matched pair and, if no
//! gluing separates the two, splices copies along a maximal `u`-cycle until
//! the orders part ways. When a route runs out of budget the engine falls
//! back to gluing small factor quotients, then to the regular action of the
//! image of a small permutation representation.

use std::collections::HashMap;

use crate::action_graph::{ActionGraph, FiniteQuotient};
use crate::amalgam::{
    conjugate_in_amalgam, cyclically_reduce_amalgam, matched_pair_compact, reduce_amalgam, AmalgamPresentation,
    AmalgamWord, Conjugacy, Side,
};
use crate::error::{Budget, Error, Result};
use crate::perm::Perm;
use crate::search::{odometer, small_candidates, symmetric_group, Candidate};
use crate::surgery::{equalize_with, exact_order_quotient};
use crate::words::{commensurable, primitive_root, Basis, Word};

use super::{
    amalgam_splice, c_near_paths, glue_quotient, has_one_near, max_cycle_length, regularize, syllable_cycle,
    syllable_cycles, AmalgamActionGraph, CosetKind, GluingSpec,
};

/// Largest point count tried by the last-resort image search.
const IMAGE_SEARCH_DEGREE: usize = 5;

/// Copies used in the second splice round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondRound {
    /// `n^2` copies.
    Squared,
    /// `n` copies.
    Linear,
}

#[derive(Debug, Clone)]
pub struct SeparateConfig {
    pub second_round: SecondRound,
    /// Largest multiple of the minimal vertex count tried by the gluing search.
    pub max_gluing_multiple: usize,
    /// Matchings tried per vertex count.
    pub max_matchings: usize,
    /// Rotation vectors tried per matching.
    pub max_rotations: usize,
    pub prime: u64,
    /// Work allowed to the splice rounds before falling back to small gluings.
    pub splice_budget: u64,
}

impl Default for SeparateConfig {
    fn default() -> Self {
        SeparateConfig { second_round: SecondRound::Squared, max_gluing_multiple: 2, max_matchings: 24, max_rotations: 32, prime: 3, splice_budget: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    TrivialV,
    SameFactor,
    DifferentFactors,
    Alternating,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::TrivialV => "trivial v",
            Case::SameFactor => "same factor",
            Case::DifferentFactors => "different factors",
            Case::Alternating => "alternating",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Separation {
    pub graph: AmalgamActionGraph,
    pub quotient: FiniteQuotient,
    pub order_u: u64,
    pub order_v: u64,
    pub case: Case,
    pub log: Vec<String>,
}

struct Ctx<'a> {
    pres: &'a AmalgamPresentation,
    u: AmalgamWord,
    v: AmalgamWord,
    budget: &'a mut Budget,
    config: &'a SeparateConfig,
    log: Vec<String>,
}

impl Ctx<'_> {
    fn separates(&self, g: &AmalgamActionGraph) -> bool {
        g.element_order(&self.u) != g.element_order(&self.v)
    }

    fn glue_minimal(&mut self, qa: &ActionGraph, qb: &ActionGraph) -> Result<Option<AmalgamActionGraph>> {
        let ra = regularize(qa)?;
        let rb = regularize(qb)?;
        let na = ra.element_order(&self.pres.a);
        if na != rb.element_order(&self.pres.b) {
            return Ok(None);
        }
        self.budget.charge((ra.degree() * rb.degree()) as u64, "gluing")?;
        let spec = GluingSpec::minimal(ra.degree(), rb.degree(), na);
        glue_quotient(self.pres, &ra, &rb, &spec).map(Some)
    }

    /// Pairs of small factor quotients, glued minimally, in enumeration order.
    fn small_pair_search(&mut self, what: &str) -> Result<AmalgamActionGraph> {
        let bs: Vec<Candidate> = small_candidates(&self.pres.basis_b, 8, 3).take(80).collect();
        for ca in small_candidates(&self.pres.basis_a, 8, 3).take(80) {
            let na = ca.graph.element_order(&self.pres.a);
            for cb in bs.iter().filter(|cb| cb.graph.element_order(&self.pres.b) == na) {
                if let Some(g) = self.glue_minimal(&ca.graph, &cb.graph)? {
                    if self.separates(&g) {
                        self.log.push(format!("{what}: small pair {} / {}", ca.label, cb.label));
                        return Ok(g);
                    }
                }
            }
        }
        self.image_search(what)
    }

    /// Permutation representations of the amalgam on a few points, smallest
    /// degree first. The first one separating the pair is made regular.
    fn image_search(&mut self, what: &str) -> Result<AmalgamActionGraph> {
        let pres = self.pres;
        let (fu, fv) = (pres.to_free_word(&self.u), pres.to_free_word(&self.v));
        let tuple_graph = |basis: &Basis, elems: &[Perm], idx: &[u64]| {
            ActionGraph::from_parts(basis.clone(), idx.iter().map(|&i| elems[i as usize].clone()).collect())
        };
        for d in 2..=IMAGE_SEARCH_DEGREE {
            let elems = symmetric_group(d);
            let m = elems.len() as u64;
            let b_side: Vec<ActionGraph> = odometer(m, pres.basis_b.rank())
                .map(|idx| tuple_graph(&pres.basis_b, &elems, &idx))
                .collect::<Result<_>>()?;
            let mut by_b: HashMap<Perm, Vec<usize>> = HashMap::new();
            for (j, g) in b_side.iter().enumerate() {
                by_b.entry(g.image_perm(&pres.b)).or_default().push(j);
            }
            for idx in odometer(m, pres.basis_a.rank()) {
                let ga = tuple_graph(&pres.basis_a, &elems, &idx)?;
                let Some(matches) = by_b.get(&ga.image_perm(&pres.a)) else { continue };
                self.budget.charge(matches.len() as u64, "image search")?;
                for &j in matches {
                    let mut perms = ga.perms().to_vec();
                    perms.extend(b_side[j].perms().iter().cloned());
                    let g = ActionGraph::from_parts(pres.combined_basis().clone(), perms)?;
                    if g.element_order(&fu) != g.element_order(&fv) {
                        let g = AmalgamActionGraph::from_graph(pres, regularize(&g)?)?;
                        self.log.push(format!("{what}: image of an action on {d} points, {} elements", g.degree()));
                        return Ok(g);
                    }
                }
            }
        }
        Err(Error::BudgetExceeded(format!("{what}: no action on at most {IMAGE_SEARCH_DEGREE} points separates")))
    }

    /// A quotient of the other factor in which its amalgamated generator has order `n`.
    fn partner(&mut self, side: Side, n: u64) -> Result<ActionGraph> {
        let basis = self.pres.basis(side).clone();
        if n == 1 {
            return ActionGraph::from_parts(basis.clone(), vec![Perm::identity(1); basis.rank()]);
        }
        Ok(exact_order_quotient(&basis, self.pres.c(side), n, self.budget)?.graph)
    }

    fn glue_with_partner(&mut self, side: Side, q: &ActionGraph) -> Result<Option<AmalgamActionGraph>> {
        let r = regularize(q)?;
        let n = r.element_order(self.pres.c(side));
        let other = self.partner(side.other(), n)?;
        match side {
            Side::A => self.glue_minimal(&r, &other),
            Side::B => self.glue_minimal(&other, &r),
        }
    }

    /// Free-factor quotient with `|U| != |V|` for two words of one factor.
    fn free_separation(&mut self, basis: &Basis, uw: &Word, vw: &Word) -> Result<ActionGraph> {
        let (ru, eu) = primitive_root(uw)?;
        if vw.is_empty() {
            return Ok(exact_order_quotient(basis, &ru, 2, self.budget)?.graph);
        }
        let (rv, ev) = primitive_root(vw)?;
        if commensurable(&ru, &rv)? {
            // both are powers of one root up to conjugacy: fix the root's order
            let (eu, ev) = (eu as i64, ev as i64);
            let n = (2..)
                .find(|&n: &i64| n / gcd_i(n, eu) != n / gcd_i(n, ev))
                .expect("distinct exponents are separated by some n");
            self.log.push(format!("commensurable pair: root order {n}"));
            return Ok(exact_order_quotient(basis, &ru, n as u64, self.budget)?.graph);
        }
        let r = equalize_with(basis, &[uw.clone()], Some(vw), self.config.prime, 1, self.budget)?;
        self.log.push(format!("equalized in the factor after {} splices", r.rounds));
        Ok(r.quotient.graph)
    }
}

fn gcd_i(a: i64, b: i64) -> i64 {
    crate::perm::gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Separates `u` and `v` by the orders of their images in a finite quotient.
pub fn separate_theorem1(
    u: &AmalgamWord,
    v: &AmalgamWord,
    pres: &AmalgamPresentation,
    budget: &mut Budget,
    config: &SeparateConfig,
) -> Result<Separation> {
    let (mut cu, _) = cyclically_reduce_amalgam(u, pres);
    let (mut cv, _) = cyclically_reduce_amalgam(v, pres);
    for target in [cv.clone(), cv.inverse()] {
        match conjugate_in_amalgam(&cu, &target, pres, budget)? {
            Conjugacy::Yes(_) => return Err(Error::ConjugateInputs),
            Conjugacy::Unknown => return Err(Error::UndecidedConjugacy),
            Conjugacy::No => {}
        }
    }
    // keep the longer core as u
    if cu.is_empty() || (cu.len() == 1 && cv.len() > 1) {
        std::mem::swap(&mut cu, &mut cv);
    }
    let mut ctx = Ctx { pres, u: cu.clone(), v: cv.clone(), budget, config, log: Vec::new() };
    let (case, graph) = if cv.is_empty() {
        (Case::TrivialV, trivial_v(&mut ctx)?)
    } else if cu.len() == 1 && cu.syllables[0].side == cv.syllables[0].side {
        (Case::SameFactor, same_factor(&mut ctx)?)
    } else if cu.len() == 1 {
        (Case::DifferentFactors, different_factors(&mut ctx)?)
    } else {
        (Case::Alternating, alternating(&mut ctx)?)
    };
    super::validate_amalgam_graph(&graph)?;
    let order_u = graph.element_order(&reduce_amalgam(u, pres));
    let order_v = graph.element_order(&reduce_amalgam(v, pres));
    if order_u == order_v {
        return Err(Error::BudgetExceeded("engine ended without separating".into()));
    }
    let mut quotient = graph.to_quotient();
    quotient.record(&pres.format(u))?;
    quotient.record(&pres.format(v))?;
    ctx.log.insert(0, format!("case: {}", case.label()));
    quotient.log = ctx.log.clone();
    Ok(Separation { graph, quotient, order_u, order_v, case, log: ctx.log })
}

fn trivial_v(ctx: &mut Ctx) -> Result<AmalgamActionGraph> {
    if ctx.u.len() == 1 {
        let s = ctx.u.syllables[0].clone();
        let q = exact_order_quotient(ctx.pres.basis(s.side), &s.word, 2, ctx.budget)?;
        ctx.log.push("u sent to an element of order 2".into());
        if let Some(g) = ctx.glue_with_partner(s.side, &q.graph)? {
            if ctx.separates(&g) {
                return Ok(g);
            }
        }
    }
    ctx.small_pair_search("trivial v")
}

fn same_factor(ctx: &mut Ctx) -> Result<AmalgamActionGraph> {
    let side = ctx.u.syllables[0].side;
    let (uw, vw) = (ctx.u.syllables[0].word.clone(), ctx.v.syllables[0].word.clone());
    let basis = ctx.pres.basis(side).clone();
    match ctx.free_separation(&basis, &uw, &vw) {
        Ok(q) => match ctx.glue_with_partner(side, &q) {
            Ok(Some(g)) if ctx.separates(&g) => {
                ctx.log.push("factor quotient glued to an exact-order partner".into());
                return Ok(g);
            }
            Ok(_) => ctx.log.push("factor quotient did not glue".into()),
            Err(e) => ctx.log.push(format!("factor route abandoned: {}", e.code())),
        },
        Err(e) => ctx.log.push(format!("factor route abandoned: {}", e.code())),
    }
    ctx.small_pair_search("same factor")
}

fn different_factors(ctx: &mut Ctx) -> Result<AmalgamActionGraph> {
    let (su, sv) = (ctx.u.syllables[0].clone(), ctx.v.syllables[0].clone());
    let pres = ctx.pres;
    let ue = pres.embed(su.side, &su.word);
    let ve = pres.embed(sv.side, &sv.word);
    let us = [ue, pres.embed(Side::A, &pres.a), pres.embed(Side::B, &pres.b)];
    let eq = equalize_with(pres.combined_basis(), &us, Some(&ve), ctx.config.prime, 1, ctx.budget);
    match eq {
        Ok(r) => {
            let (qa, qb) = crate::amalgam::split_free_product(&r.quotient.graph, pres)?;
            match ctx.glue_minimal(&qa, &qb) {
                Ok(Some(g)) if ctx.separates(&g) => {
                    ctx.log.push(format!("equalized u, a, b above v after {} splices", r.rounds));
                    return Ok(g);
                }
                Ok(_) => ctx.log.push("equalized quotient did not separate".into()),
                Err(e) => ctx.log.push(format!("free product route abandoned: {}", e.code())),
            }
        }
        Err(e) => ctx.log.push(format!("free product route abandoned: {}", e.code())),
    }
    ctx.small_pair_search("different factors")
}

/// Rotations of the orbit matching in lexicographic order.
fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = Some((0..n).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().expect("present");
        match (1..c.len()).rev().find(|&i| c[i - 1] < c[i]) {
            Some(i) => {
                let j = (i..c.len()).rev().find(|&j| c[j] > c[i - 1]).expect("pivot");
                c.swap(i - 1, j);
                c[i..].reverse();
            }
            None => cur = None,
        }
        Some(out)
    })
}

fn rotation_vectors(len: usize, n: u64, cap: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; len]];
    while out.len() < cap {
        let mut next = out.last().expect("nonempty").clone();
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < n {
                break;
            }
            next[i] = 0;
        }
        out.push(next);
    }
    out
}

fn no_one_near(g: &AmalgamActionGraph, words: &[&AmalgamWord]) -> bool {
    let la = g.coset_labels(CosetKind::A);
    let lb = g.coset_labels(CosetKind::B);
    words
        .iter()
        .filter(|w| w.len() >= 2)
        .all(|w| syllable_cycles(g, w).iter().all(|c| !has_one_near(c, &la, &lb)))
}

fn alternating(ctx: &mut Ctx) -> Result<AmalgamActionGraph> {
    let pair = matched_pair_compact(&ctx.u, &ctx.v, ctx.pres, ctx.budget)?;
    ctx.log.push(format!("matched pair with |a| = |b| = {}", pair.order));
    ctx.log.extend(pair.phi.log.iter().cloned());
    let ra = regularize(&pair.phi.graph)?;
    let rb = regularize(&pair.psi.graph)?;
    let n = pair.order;
    let (oa, ob) = (ra.degree(), rb.degree());
    let base_v = crate::perm::lcm(oa as u64, ob as u64) as usize;
    let mut base: Option<AmalgamActionGraph> = None;
    let mut first: Option<AmalgamActionGraph> = None;
    let (u, v) = (ctx.u.clone(), ctx.v.clone());
    for mult in 1..=ctx.config.max_gluing_multiple {
        let total = base_v * mult;
        let orbits = total / n as usize;
        for matching in permutations(orbits).take(ctx.config.max_matchings) {
            for rotations in rotation_vectors(orbits, n, ctx.config.max_rotations) {
                ctx.budget.charge((total * (oa + ob)) as u64, "gluing search")?;
                let spec = GluingSpec { k: total / oa, l: total / ob, matching: matching.clone(), rotations };
                let g = glue_quotient(ctx.pres, &ra, &rb, &spec)?;
                if ctx.separates(&g) {
                    ctx.log.push(format!("gluing search: {} vertices, matching {:?}", total, spec.matching));
                    return Ok(g);
                }
                if base.is_none() && no_one_near(&g, &[&u, &v]) {
                    base = Some(g.clone());
                }
                if first.is_none() {
                    first = Some(g);
                }
            }
        }
    }
    let base = match base {
        Some(b) => {
            ctx.log.push(format!("base gluing without 1-near vertices: {} vertices", b.degree()));
            b
        }
        None => {
            ctx.log.push("no gluing avoided 1-near vertices; splicing the minimal one".into());
            first.expect("at least one gluing")
        }
    };
    let sub_cap = ctx.config.splice_budget.min(ctx.budget.remaining());
    let mut sub = Budget::new(sub_cap);
    let result = splice_induction(ctx, base, &mut sub);
    ctx.budget.charge(sub.used().min(sub_cap), "amalgam splice")?;
    match result {
        Err(Error::BudgetExceeded(why)) => {
            ctx.log.push(format!("splice rounds stopped: {why}"));
            ctx.small_pair_search("alternating")
        }
        other => other,
    }
}

fn splice_induction(ctx: &mut Ctx, base: AmalgamActionGraph, budget: &mut Budget) -> Result<AmalgamActionGraph> {
    let (u, v) = (ctx.u.clone(), ctx.v.clone());
    let cap = 4 * (u.letter_count() + v.letter_count());
    let max_len = max_cycle_length(&base, &u);
    let start = syllable_cycles(&base, &u)
        .into_iter()
        .find(|c| c.length == max_len)
        .map(|c| c.start)
        .expect("some u-cycle");
    let mut g = base;
    for round in 0..cap {
        let n = g.element_order(&u) as usize;
        let copies = match round {
            0 => n,
            1 => match ctx.config.second_round {
                SecondRound::Squared => n * n,
                SecondRound::Linear => n,
            },
            _ => max_cycle_length(&g, &u),
        }
        .max(2);
        let rep = syllable_cycle(&g, &u, start);
        let mut position = round % rep.vertices.len();
        let mut next = None;
        // prefer a cut that already pulls the orders apart
        for p in 0..rep.vertices.len() {
            budget.charge((g.degree() * copies) as u64, "amalgam splice")?;
            let h = amalgam_splice(&g, &u, start, p, copies)?;
            if ctx.separates(&h) {
                position = p;
                next = Some(h);
                break;
            }
        }
        g = match next {
            Some(h) => h,
            None => {
                budget.charge((g.degree() * copies) as u64, "amalgam splice")?;
                amalgam_splice(&g, &u, start, position, copies)?
            }
        };
        let (ou, ov) = (g.element_order(&u), g.element_order(&v));
        ctx.log.push(format!(
            "round {}: {} copies at position {}, {} vertices, |u| = {}, |v| = {}{}",
            round + 1,
            copies,
            position,
            g.degree(),
            ou,
            ov,
            c_near_note(&g, &u, &v, start, round + 1)
        ));
        if ou != ov {
            return Ok(g);
        }
    }
    let recheck = conjugate_in_amalgam(&u, &v, ctx.pres, ctx.budget)?;
    ctx.log.push(format!("iteration cap reached; conjugacy recheck: {}", recheck.label()));
    Err(Error::BudgetExceeded(format!("no separation after {cap} splices")))
}

/// How many maximal `v`-representatives contain a subpath C-near to the
/// first `k` edges of the tracked `u`-representative.
fn c_near_note(g: &AmalgamActionGraph, u: &AmalgamWord, v: &AmalgamWord, start: u32, k: usize) -> String {
    if v.len() < 2 || g.degree() > 5000 {
        return String::new();
    }
    let c = g.coset_labels(CosetKind::C);
    let path: Vec<_> = syllable_cycle(g, u, start).edges().into_iter().take(k).collect();
    let max_v = max_cycle_length(g, v);
    let reps: Vec<_> = syllable_cycles(g, v).into_iter().filter(|r| r.length == max_v).collect();
    let near = reps
        .iter()
        .filter(|r| {
            let e = r.edges();
            (0..e.len()).any(|i| {
                let window: Vec<_> = (0..path.len()).map(|j| e[(i + j) % e.len()]).collect();
                c_near_paths(&c, &path, &window).unwrap_or(false)
            })
        })
        .count();
    format!(", C-near maximal v-representatives {near}/{}", reps.len())
}
