//! Finite action graphs of `G = F_A *_{a=b} F_B` on which both factors act
//! through finite groups, freely.
//!
//! An [`AmalgamActionGraph`] keeps the regular (Cayley) graphs of the two
//! factor images next to the action on its own vertex set, which is stored
//! as an [`ActionGraph`] over the union of the two bases. Every `A(p)`
//! subgraph is then a copy of the A-side Cayley graph, and the amalgamated
//! generator acts by the same permutation from either side.

mod engine;

pub use engine::{separate_theorem1, Case, SecondRound, SeparateConfig, Separation};

use std::collections::VecDeque;

use crate::action_graph::{ActionGraph, FiniteQuotient};
use crate::amalgam::{AmalgamPresentation, AmalgamWord, Side};
use crate::error::{Error, Result};
use crate::perm::{lcm, Perm, PermGroup};
use crate::search::GROUP_CAP;
use crate::words::{Basis, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamActionGraph {
    pub pres: AmalgamPresentation,
    /// Cayley graph of the A-side image group.
    pub quot_a: ActionGraph,
    /// Cayley graph of the B-side image group.
    pub quot_b: ActionGraph,
    /// The action on the vertex set, over the combined basis.
    pub graph: ActionGraph,
}

/// Cayley graph of the permutation group generated by the graph's generators.
pub fn regularize(g: &ActionGraph) -> Result<ActionGraph> {
    let group = PermGroup::generate(g.perms(), g.degree(), GROUP_CAP)
        .ok_or_else(|| Error::BudgetExceeded(format!("image group above {GROUP_CAP} elements")))?;
    ActionGraph::from_parts(g.basis().clone(), group.regular_generators())
}

/// Orbit labels (smallest member) of the group generated by `perms`.
pub fn orbit_labels(perms: &[&Perm], n: usize) -> Vec<u32> {
    let mut label = vec![u32::MAX; n];
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = s as u32;
        let mut queue = VecDeque::from([s as u32]);
        while let Some(v) = queue.pop_front() {
            for p in perms {
                let w = p.apply(v);
                if label[w as usize] == u32::MAX {
                    label[w as usize] = s as u32;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Orbit representatives of a single permutation, by smallest point.
fn cycle_reps(p: &Perm) -> Vec<u32> {
    p.cycles().iter().map(|c| c[0]).collect()
}

/// `copies` disjoint copies of `p`.
fn repeat_blocks(p: &Perm, copies: usize) -> Perm {
    let size = p.degree() as u32;
    Perm::from_images((0..copies as u32).flat_map(|c| p.images().iter().map(move |&x| c * size + x)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingSpec {
    /// Number of A-blocks.
    pub k: usize,
    /// Number of B-blocks.
    pub l: usize,
    /// `matching[i]` is the B-side `<b>`-orbit glued to the `i`-th A-side `<a>`-orbit.
    pub matching: Vec<usize>,
    /// Offset in `Z/n` for each A-side orbit.
    pub rotations: Vec<u64>,
}

impl GluingSpec {
    /// Fewest blocks, identity matching, no rotations.
    pub fn minimal(order_a: usize, order_b: usize, n: u64) -> GluingSpec {
        let v = lcm(order_a as u64, order_b as u64) as usize;
        let orbits = v / n as usize;
        GluingSpec {
            k: v / order_a,
            l: v / order_b,
            matching: (0..orbits).collect(),
            rotations: vec![0; orbits],
        }
    }
}

/// Glues `k` copies of the A-side Cayley graph and `l` copies of the B-side
/// one along their `<a>`- and `<b>`-orbits.
pub fn glue_quotient(
    pres: &AmalgamPresentation,
    quot_a: &ActionGraph,
    quot_b: &ActionGraph,
    spec: &GluingSpec,
) -> Result<AmalgamActionGraph> {
    let ra = regularize(quot_a)?;
    let rb = regularize(quot_b)?;
    let pa = ra.image_perm(&pres.a);
    let pb = rb.image_perm(&pres.b);
    let (na, nb) = (pa.order(), pb.order());
    if na != nb {
        return Err(Error::OrderMismatch { a: na, b: nb });
    }
    let n = na as usize;
    let (oa, ob) = (ra.degree(), rb.degree());
    if spec.k == 0 || spec.k * oa != spec.l * ob {
        return Err(Error::SpecInvalid(format!(
            "{} A-blocks of size {oa} do not cover {} B-blocks of size {ob}",
            spec.k, spec.l
        )));
    }
    let v = spec.k * oa;
    let orbits = v / n;
    let mut seen = vec![false; orbits];
    if spec.matching.len() != orbits
        || spec.rotations.len() != orbits
        || spec.matching.iter().any(|&j| j >= orbits || std::mem::replace(&mut seen[j], true))
    {
        return Err(Error::SpecInvalid(format!("matching must be a permutation of {orbits} orbits")));
    }
    if spec.rotations.iter().any(|&r| r >= n as u64) {
        return Err(Error::SpecInvalid(format!("rotations must lie in Z/{n}")));
    }
    let a_perms: Vec<Perm> = ra.perms().iter().map(|p| repeat_blocks(p, spec.k)).collect();
    let b_virtual: Vec<Perm> = rb.perms().iter().map(|p| repeat_blocks(p, spec.l)).collect();
    let a_on_v = repeat_blocks(&pa, spec.k);
    let b_on_w = repeat_blocks(&pb, spec.l);
    let reps_a = cycle_reps(&a_on_v);
    let reps_b = cycle_reps(&b_on_w);
    // beta sends B-virtual vertex h b^t to rep_a a^(t - r)
    let mut beta = vec![0u32; v];
    for (i, &ra_rep) in reps_a.iter().enumerate() {
        let hb = reps_b[spec.matching[i]];
        let r = spec.rotations[i] as usize;
        let mut a_pow = vec![ra_rep; n];
        for t in 1..n {
            a_pow[t] = a_on_v.apply(a_pow[t - 1]);
        }
        let mut h = hb;
        for t in 0..n {
            beta[h as usize] = a_pow[(t + n - r) % n];
            h = b_on_w.apply(h);
        }
    }
    let b_perms: Vec<Perm> = b_virtual
        .iter()
        .map(|p| {
            let mut images = vec![0u32; v];
            for y in 0..v {
                images[beta[y] as usize] = beta[p.apply(y as u32) as usize];
            }
            Perm::from_images(images)
        })
        .collect();
    let mut perms = a_perms;
    perms.extend(b_perms);
    let graph = ActionGraph::from_parts(pres.combined_basis().clone(), perms)?;
    let g = AmalgamActionGraph { pres: pres.clone(), quot_a: ra, quot_b: rb, graph };
    validate_amalgam_graph(&g)?;
    Ok(g)
}

impl AmalgamActionGraph {
    /// Recovers the factor groups from the action itself.
    pub fn from_graph(pres: &AmalgamPresentation, graph: ActionGraph) -> Result<Self> {
        if graph.basis() != pres.combined_basis() {
            return Err(Error::InvalidSpec("graph basis differs from the presentation".into()));
        }
        graph.validate()?;
        let ra = pres.basis_a.rank();
        let quot_a = regularize(&ActionGraph::from_parts(pres.basis_a.clone(), graph.perms()[..ra].to_vec())?)?;
        let quot_b = regularize(&ActionGraph::from_parts(pres.basis_b.clone(), graph.perms()[ra..].to_vec())?)?;
        Ok(AmalgamActionGraph { pres: pres.clone(), quot_a, quot_b, graph })
    }

    pub fn from_quotient(q: &FiniteQuotient) -> Result<Self> {
        match &q.source {
            crate::action_graph::Source::Amalgam { presentation } => {
                let pres = AmalgamPresentation::from_file(presentation)?;
                Self::from_graph(&pres, q.graph.clone())
            }
            crate::action_graph::Source::Free { .. } => {
                Err(Error::InvalidSpec("quotient is not over an amalgam presentation".into()))
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.graph.degree()
    }

    pub fn factor_order(&self, side: Side) -> usize {
        match side {
            Side::A => self.quot_a.degree(),
            Side::B => self.quot_b.degree(),
        }
    }

    fn side_perms(&self, side: Side) -> &[Perm] {
        let ra = self.pres.basis_a.rank();
        match side {
            Side::A => &self.graph.perms()[..ra],
            Side::B => &self.graph.perms()[ra..],
        }
    }

    /// Permutation of the vertices induced by a word of one factor.
    pub fn act(&self, side: Side, w: &Word) -> Perm {
        self.graph.image_perm(&self.pres.embed(side, w))
    }

    /// The common permutation of `a` and `b`.
    pub fn c_perm(&self) -> Perm {
        self.act(Side::A, &self.pres.a)
    }

    pub fn element_order(&self, w: &AmalgamWord) -> u64 {
        self.graph.element_order(&self.pres.to_free_word(w))
    }

    pub fn to_quotient(&self) -> FiniteQuotient {
        FiniteQuotient::amalgam(self.graph.clone(), &self.pres)
    }

    /// Edge colouring by factor for DOT output.
    pub fn to_dot(&self) -> String {
        let ra = self.pres.basis_a.rank();
        let f = move |g: usize| if g < ra { 'A' } else { 'B' };
        self.graph.to_dot(Some(&f))
    }

    /// Orbit label of every vertex under `A`, `B` or `C`.
    pub fn coset_labels(&self, kind: CosetKind) -> Vec<u32> {
        let n = self.degree();
        match kind {
            CosetKind::A => orbit_labels(&self.side_perms(Side::A).iter().collect::<Vec<_>>(), n),
            CosetKind::B => orbit_labels(&self.side_perms(Side::B).iter().collect::<Vec<_>>(), n),
            CosetKind::C => orbit_labels(&[&self.c_perm()], n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetKind {
    A,
    B,
    C,
}

/// All factor elements paired with their action on the vertices, identity
/// first. `None` when the pairing is not a function of the factor element.
fn joint_elements(g: &AmalgamActionGraph, side: Side) -> Option<(usize, Vec<Perm>)> {
    let quot = match side {
        Side::A => &g.quot_a,
        Side::B => &g.quot_b,
    };
    let order = quot.degree();
    let gens: Vec<Perm> = quot.perms().iter().zip(g.side_perms(side)).map(|(q, v)| q.disjoint_union(v)).collect();
    let group = PermGroup::generate(&gens, order + g.degree(), order + 1)?;
    if group.order() != order {
        return None;
    }
    let vertex_parts = group
        .elements()
        .iter()
        .map(|e| Perm::from_images(e.images()[order..].iter().map(|&x| x - order as u32).collect()))
        .collect();
    Some((order, vertex_parts))
}

pub fn validate_amalgam_graph(g: &AmalgamActionGraph) -> Result<()> {
    g.graph.validate()?;
    g.quot_a.validate()?;
    g.quot_b.validate()?;
    for side in [Side::A, Side::B] {
        let (_, parts) = joint_elements(g, side).ok_or(Error::NotAction(side.as_char()))?;
        for (i, p) in parts.iter().enumerate().skip(1) {
            if p.images().iter().enumerate().any(|(v, &w)| v as u32 == w) {
                return Err(Error::NotFree { side: side.as_char(), element: i });
            }
        }
    }
    if g.act(Side::A, &g.pres.a) != g.act(Side::B, &g.pres.b) {
        return Err(Error::AgreementViolation);
    }
    Ok(())
}

/// The vertices of `A(p)`, `B(p)` or `C(p)`, sorted.
pub fn coset_subgraph(g: &AmalgamActionGraph, p: u32, kind: CosetKind) -> Vec<u32> {
    let labels = g.coset_labels(kind);
    let l = labels[p as usize];
    (0..g.degree() as u32).filter(|&v| labels[v as usize] == l).collect()
}

/// An edge of the syllable graph: its label lies in `side`'s factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SylEdge {
    pub side: Side,
    pub tail: u32,
    pub head: u32,
}

pub fn c_near_edges(c_labels: &[u32], e: &SylEdge, f: &SylEdge) -> bool {
    e.side == f.side
        && c_labels[e.tail as usize] == c_labels[f.tail as usize]
        && c_labels[e.head as usize] == c_labels[f.head as usize]
}

pub fn c_near_paths(c_labels: &[u32], e: &[SylEdge], f: &[SylEdge]) -> Result<bool> {
    if e.len() != f.len() {
        return Err(Error::LengthMismatch(e.len(), f.len()));
    }
    Ok(e.iter().zip(f).all(|(x, y)| c_near_edges(c_labels, x, y)))
}

/// The representative of a `u`-cycle read syllable by syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylCycle {
    pub start: u32,
    /// Number of traversals of `u` before returning to `start`.
    pub length: usize,
    /// Vertex before each syllable edge.
    pub vertices: Vec<u32>,
    pub sides: Vec<Side>,
}

impl SylCycle {
    pub fn edge(&self, i: usize) -> SylEdge {
        let n = self.vertices.len();
        SylEdge { side: self.sides[i % n], tail: self.vertices[i % n], head: self.vertices[(i + 1) % n] }
    }

    pub fn edges(&self) -> Vec<SylEdge> {
        (0..self.vertices.len()).map(|i| self.edge(i)).collect()
    }
}

fn syllable_perms(g: &AmalgamActionGraph, u: &AmalgamWord) -> Vec<Perm> {
    u.syllables.iter().map(|s| g.act(s.side, &s.word)).collect()
}

pub fn syllable_cycle(g: &AmalgamActionGraph, u: &AmalgamWord, start: u32) -> SylCycle {
    let perms = syllable_perms(g, u);
    trace_cycle(&perms, u, start)
}

fn trace_cycle(perms: &[Perm], u: &AmalgamWord, start: u32) -> SylCycle {
    let mut vertices = Vec::new();
    let mut sides = Vec::new();
    let mut v = start;
    let mut length = 0;
    loop {
        for (p, s) in perms.iter().zip(&u.syllables) {
            vertices.push(v);
            sides.push(s.side);
            v = p.apply(v);
        }
        length += 1;
        if v == start || perms.is_empty() {
            break;
        }
    }
    SylCycle { start, length, vertices, sides }
}

/// One representative per `<u>`-orbit, by smallest starting vertex.
pub fn syllable_cycles(g: &AmalgamActionGraph, u: &AmalgamWord) -> Vec<SylCycle> {
    let perms = syllable_perms(g, u);
    let whole = perms.iter().fold(Perm::identity(g.degree()), |acc, p| acc.then(p));
    whole.cycles().iter().map(|c| trace_cycle(&perms, u, c[0])).collect()
}

/// 1-nearness on the syllable graph, computed from coset labels: two
/// vertices are at distance at most 1 iff they share an A- or B-coset.
pub fn has_one_near(cycle: &SylCycle, a_labels: &[u32], b_labels: &[u32]) -> bool {
    let verts = &cycle.vertices;
    let n = verts.len();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i).min(n - (j - i));
            let (x, y) = (verts[i] as usize, verts[j] as usize);
            if x == y {
                return true;
            }
            if gap >= 2 && (a_labels[x] == a_labels[y] || b_labels[x] == b_labels[y]) {
                return true;
            }
        }
    }
    false
}

/// The syllable graph: one generator per element of each factor image, the
/// identity included. Also returns the generator index of every element of
/// each side, keyed by the element's permutation of the vertices.
pub fn syllable_graph(g: &AmalgamActionGraph) -> Result<SyllableGraph> {
    let mut names = Vec::new();
    let mut perms = Vec::new();
    let mut index = Vec::new();
    for side in [Side::A, Side::B] {
        let (_, parts) = joint_elements(g, side).ok_or(Error::NotAction(side.as_char()))?;
        for (i, p) in parts.into_iter().enumerate() {
            names.push(format!("{}{}", side.as_char(), i));
            index.push((side, p.clone()));
            perms.push(p);
        }
    }
    let graph = ActionGraph::from_parts(Basis::new(&names)?, perms)?;
    Ok(SyllableGraph { graph, index })
}

pub struct SyllableGraph {
    pub graph: ActionGraph,
    index: Vec<(Side, Perm)>,
}

impl SyllableGraph {
    /// `u` as a word in the syllable generators.
    pub fn word(&self, g: &AmalgamActionGraph, u: &AmalgamWord) -> Option<Word> {
        let letters = u
            .syllables
            .iter()
            .map(|s| {
                let p = g.act(s.side, &s.word);
                self.index.iter().position(|(side, q)| *side == s.side && *q == p).map(|i| Letter::new(i, false))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Word::from_letters(letters))
    }
}

/// `copies` copies of `g`, cut at the C-orbit entered by edge `position` of
/// the `u`-representative from `rep_start`, and reconnected copy `i` to copy
/// `i + 1` on every edge of that factor meeting the orbit.
pub fn amalgam_splice(
    g: &AmalgamActionGraph,
    u: &AmalgamWord,
    rep_start: u32,
    position: usize,
    copies: usize,
) -> Result<AmalgamActionGraph> {
    let u = crate::amalgam::reduce_amalgam(u, &g.pres);
    if !u.is_alternating_even() {
        return Err(Error::NotCyclicallyReduced);
    }
    if copies == 0 {
        return Err(Error::SpecInvalid("at least one copy is required".into()));
    }
    if rep_start as usize >= g.degree() {
        return Err(Error::InvalidPosition(format!("vertex {rep_start} out of range")));
    }
    let rep = syllable_cycle(g, &u, rep_start);
    if position >= rep.vertices.len() {
        return Err(Error::InvalidPosition(format!(
            "position {position} beyond the representative of {} edges",
            rep.vertices.len()
        )));
    }
    let e = rep.edge(position);
    let c_labels = g.coset_labels(CosetKind::C);
    let orbit = c_labels[e.head as usize];
    if c_labels[e.tail as usize] == orbit {
        return Err(Error::InvalidPosition("edge lies inside its C-orbit".into()));
    }
    let n = g.degree();
    let in_orbit: Vec<bool> = c_labels.iter().map(|&l| l == orbit).collect();
    let ra = g.pres.basis_a.rank();
    let cut_side = e.side;
    let perms = g
        .graph
        .perms()
        .iter()
        .enumerate()
        .map(|(gen, p)| {
            let side = if gen < ra { Side::A } else { Side::B };
            let mut images = Vec::with_capacity(n * copies);
            for j in 0..copies {
                for v in 0..n {
                    let out = if side == cut_side {
                        // conjugate by the shift of the orbit one copy down
                        let j1 = if in_orbit[v] { (j + copies - 1) % copies } else { j };
                        let w = p.apply(v as u32) as usize;
                        let j2 = if in_orbit[w] { (j1 + 1) % copies } else { j1 };
                        j2 * n + w
                    } else {
                        j * n + p.apply(v as u32) as usize
                    };
                    images.push(out as u32);
                }
            }
            Perm::from_images(images)
        })
        .collect();
    let graph = ActionGraph::from_parts(g.pres.combined_basis().clone(), perms)?;
    Ok(AmalgamActionGraph { pres: g.pres.clone(), quot_a: g.quot_a.clone(), quot_b: g.quot_b.clone(), graph })
}

/// Length of the longest cycle of `u`.
pub fn max_cycle_length(g: &AmalgamActionGraph, u: &AmalgamWord) -> usize {
    g.graph.image_perm(&g.pres.to_free_word(u)).cycles().iter().map(Vec::len).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres() -> AmalgamPresentation {
        AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x", "s").unwrap()
    }

    fn z4(basis: &Basis, shifted: &[usize]) -> ActionGraph {
        ActionGraph::cyclic_shift(basis.clone(), 4, shifted)
    }

    fn z4_glue() -> AmalgamActionGraph {
        let p = pres();
        let qa = z4(&p.basis_a, &[0]);
        let qb = z4(&p.basis_b, &[0]);
        glue_quotient(&p, &qa, &qb, &GluingSpec::minimal(4, 4, 4)).unwrap()
    }

    #[test]
    fn glue_z4_examples() {
        let g = z4_glue();
        assert_eq!(g.degree(), 4);
        assert!(validate_amalgam_graph(&g).is_ok());
        let p = &g.pres;
        assert_eq!(g.element_order(&p.parse("A:{x}").unwrap()), 4);
        assert_eq!(g.element_order(&p.parse("B:{s}").unwrap()), 4);
        assert_eq!(coset_subgraph(&g, 2, CosetKind::C), vec![0, 1, 2, 3]);
        assert_eq!(coset_subgraph(&g, 0, CosetKind::A), vec![0, 1, 2, 3]);
    }

    #[test]
    fn glue_order_mismatch() {
        let p = pres();
        let qa = ActionGraph::cyclic_shift(p.basis_a.clone(), 2, &[0]);
        let qb = ActionGraph::cyclic_shift(p.basis_b.clone(), 3, &[0]);
        let spec = GluingSpec::minimal(2, 3, 2);
        assert_eq!(glue_quotient(&p, &qa, &qb, &spec).unwrap_err(), Error::OrderMismatch { a: 2, b: 3 });
        let qb = ActionGraph::cyclic_shift(p.basis_b.clone(), 2, &[0]);
        let bad = GluingSpec { k: 1, l: 1, matching: vec![0], rotations: vec![5] };
        assert!(matches!(glue_quotient(&p, &qa, &qb, &bad), Err(Error::SpecInvalid(_))));
    }

    #[test]
    fn validation_catches_violations() {
        let mut g = z4_glue();
        let ra = g.pres.basis_a.rank();
        // b acting as the inverse shift breaks agreement only
        let mut perms = g.graph.perms().to_vec();
        perms[ra] = perms[ra].inverse();
        g.graph = ActionGraph::from_parts(g.graph.basis().clone(), perms).unwrap();
        g.quot_b = regularize(&ActionGraph::from_parts(
            g.pres.basis_b.clone(),
            g.graph.perms()[ra..].to_vec(),
        ).unwrap()).unwrap();
        assert_eq!(validate_amalgam_graph(&g), Err(Error::AgreementViolation));

        // a fixed point for x
        let mut g = z4_glue();
        let mut perms = g.graph.perms().to_vec();
        perms[0] = Perm::from_images(vec![0, 2, 3, 1]);
        g.graph = ActionGraph::from_parts(g.graph.basis().clone(), perms).unwrap();
        g.quot_a = regularize(&ActionGraph::from_parts(g.pres.basis_a.clone(), g.graph.perms()[..ra].to_vec()).unwrap()).unwrap();
        assert!(matches!(validate_amalgam_graph(&g), Err(Error::NotFree { side: 'A', .. })));

        // the vertex action no longer factors through the claimed group
        let mut g = z4_glue();
        g.quot_a = ActionGraph::cyclic_shift(g.pres.basis_a.clone(), 2, &[0]);
        assert_eq!(validate_amalgam_graph(&g), Err(Error::NotAction('A')));
    }

    #[test]
    fn c_near_examples() {
        let g = z4_glue();
        let c = g.coset_labels(CosetKind::C);
        let e = SylEdge { side: Side::A, tail: 0, head: 1 };
        assert!(c_near_edges(&c, &e, &e));
        let f = SylEdge { side: Side::B, tail: 0, head: 1 };
        assert!(!c_near_edges(&c, &e, &f));
        let h = SylEdge { side: Side::A, tail: 2, head: 3 };
        assert!(c_near_edges(&c, &e, &h));
        assert_eq!(c_near_paths(&c, &[e], &[e, h]), Err(Error::LengthMismatch(1, 2)));
    }

    fn minimal_xy_st() -> AmalgamActionGraph {
        // x and s shift Z/2, y and t act as independent Z/2 factors
        let p = pres();
        let qa = ActionGraph::new(
            p.basis_a.clone(),
            vec![Perm::from_images(vec![1, 0, 3, 2]), Perm::from_images(vec![2, 3, 0, 1])],
        )
        .unwrap();
        let qb = ActionGraph::new(
            p.basis_b.clone(),
            vec![Perm::from_images(vec![1, 0, 3, 2]), Perm::from_images(vec![2, 3, 0, 1])],
        )
        .unwrap();
        glue_quotient(&p, &qa, &qb, &GluingSpec::minimal(4, 4, 2)).unwrap()
    }

    #[test]
    fn splice_examples() {
        let g = minimal_xy_st();
        let u = g.pres.parse("A:{y} B:{t}").unwrap();
        let same = amalgam_splice(&g, &u, 0, 0, 1).unwrap();
        assert_eq!(same.graph, g.graph);

        let before = g.element_order(&u);
        let h = amalgam_splice(&g, &u, 0, 0, 2).unwrap();
        assert!(validate_amalgam_graph(&h).is_ok());
        assert_eq!(h.degree(), 2 * g.degree());
        assert_eq!(h.element_order(&u), 2 * before);

        assert!(matches!(amalgam_splice(&g, &u, 0, 99, 2), Err(Error::InvalidPosition(_))));
        let not_cr = g.pres.parse("A:{y} B:{t} A:{y}").unwrap();
        assert_eq!(amalgam_splice(&g, &not_cr, 0, 0, 2).unwrap_err(), Error::NotCyclicallyReduced);
    }

    #[test]
    fn one_near_fast_path_matches_syllable_graph() {
        let g = minimal_xy_st();
        let h = amalgam_splice(&g, &g.pres.parse("A:{y} B:{t}").unwrap(), 0, 0, 3).unwrap();
        let sg = syllable_graph(&h).unwrap();
        let (la, lb) = (h.coset_labels(CosetKind::A), h.coset_labels(CosetKind::B));
        for text in ["A:{y} B:{t}", "A:{y x} B:{t}", "A:{y} B:{t s}"] {
            let u = h.pres.parse(text).unwrap();
            let w = sg.word(&h, &u).unwrap();
            let slow: Vec<bool> = sg.graph.u_cycles(&w).unwrap().iter().map(|c| sg.graph.has_l_near(c, 1)).collect();
            let fast: Vec<bool> = syllable_cycles(&h, &u).iter().map(|c| has_one_near(c, &la, &lb)).collect();
            assert_eq!(slow, fast, "{text}");
        }
    }
}
