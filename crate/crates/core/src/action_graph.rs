//! Finite action graphs of a free group.
//!
//! Only positively oriented edges are stored: one image array per basis
//! generator. The edge labelled `x` leaving `v` ends at `perms[x][v]`; negative
//! edges are read off the inverse arrays. Words act on vertices from the left
//! letter onwards, so `image_perm(xy) = image_perm(x).then(image_perm(y))`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::amalgam::AmalgamPresentation;
use crate::error::{Error, Result};
use crate::perm::{lcm, Perm};
use crate::words::{Basis, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionGraph {
    basis: Basis,
    perms: Vec<Perm>,
    inverses: Vec<Perm>,
}

impl ActionGraph {
    /// Builds and validates.
    pub fn new(basis: Basis, perms: Vec<Perm>) -> Result<Self> {
        let g = Self::from_parts(basis, perms)?;
        g.validate()?;
        Ok(g)
    }

    /// Builds without checking bijectivity; shape errors (wrong generator
    /// count, ragged arrays, out-of-range images) are still rejected.
    pub fn from_parts(basis: Basis, perms: Vec<Perm>) -> Result<Self> {
        if perms.len() != basis.rank() {
            return Err(Error::MalformedGraph(format!(
                "{} image arrays for {} generators",
                perms.len(),
                basis.rank()
            )));
        }
        let n = perms.first().map_or(0, Perm::degree);
        for p in &perms {
            if p.degree() != n {
                return Err(Error::MalformedGraph("image arrays of unequal length".into()));
            }
            if p.images().iter().any(|&v| v as usize >= n) {
                return Err(Error::MalformedGraph("image out of range".into()));
            }
        }
        let inverses = perms.iter().map(Perm::inverse).collect();
        Ok(ActionGraph { basis, perms, inverses })
    }

    /// Cyclic shift `v -> v + 1 mod n` on the listed generators, identity elsewhere.
    pub fn cyclic_shift(basis: Basis, n: usize, shifted: &[usize]) -> Self {
        let shift = Perm::from_images((0..n as u32).map(|v| (v + 1) % n as u32).collect());
        let perms = (0..basis.rank())
            .map(|g| if shifted.contains(&g) { shift.clone() } else { Perm::identity(n) })
            .collect();
        Self::from_parts(basis, perms).expect("shift is well formed")
    }

    pub fn degree(&self) -> usize {
        self.perms.first().map_or(0, Perm::degree)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn perm(&self, gen: usize) -> &Perm {
        &self.perms[gen]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for (g, p) in self.perms.iter().enumerate() {
            let mut seen = vec![false; n];
            for &v in p.images() {
                if seen[v as usize] {
                    return Err(Error::DuplicateImage {
                        generator: self.basis.name(g).to_string(),
                        vertex: v as usize,
                    });
                }
                seen[v as usize] = true;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn step(&self, v: u32, l: Letter) -> u32 {
        if l.inv {
            self.inverses[l.gen as usize].apply(v)
        } else {
            self.perms[l.gen as usize].apply(v)
        }
    }

    pub fn trace(&self, v: u32, w: &Word) -> u32 {
        w.letters().iter().fold(v, |x, &l| self.step(x, l))
    }

    pub fn image_perm(&self, w: &Word) -> Perm {
        Perm::from_images((0..self.degree() as u32).map(|v| self.trace(v, w)).collect())
    }

    pub fn element_order(&self, w: &Word) -> u64 {
        self.image_perm(w).order()
    }

    /// One cycle per orbit of `<u>`, traced letter by letter along the
    /// reduced notation of `u`.
    pub fn u_cycles(&self, u: &Word) -> Result<Vec<CyclePath>> {
        let u = u.reduce();
        if u.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = self.degree();
        let mut visited = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n as u32 {
            if visited[s as usize] {
                continue;
            }
            let mut vertices = Vec::new();
            let mut v = s;
            let mut length = 0;
            loop {
                visited[v as usize] = true;
                for &l in u.letters() {
                    vertices.push(v);
                    v = self.step(v, l);
                }
                length += 1;
                if v == s {
                    break;
                }
            }
            out.push(CyclePath { word: u.clone(), start: s, length, vertices });
        }
        Ok(out)
    }

    /// Shortest path length ignoring orientation, `None` if unreachable.
    pub fn distance(&self, p: u32, q: u32) -> Option<usize> {
        self.ball(p, usize::MAX).get(&q).copied()
    }

    fn ball(&self, p: u32, radius: usize) -> BTreeMap<u32, usize> {
        let mut dist = BTreeMap::from([(p, 0usize)]);
        let mut queue = VecDeque::from([p]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d >= radius {
                continue;
            }
            for g in 0..self.perms.len() {
                for w in [self.perms[g].apply(v), self.inverses[g].apply(v)] {
                    dist.entry(w).or_insert_with(|| {
                        queue.push_back(w);
                        d + 1
                    });
                }
            }
        }
        dist
    }

    /// True iff some pair of positions `i < j` on the representative sits
    /// closer than `min(j - i, n - (j - i), l + 1)`.
    pub fn has_l_near(&self, c: &CyclePath, l: usize) -> bool {
        let verts = &c.vertices;
        let n = verts.len();
        for i in 0..n {
            let ball = self.ball(verts[i], l);
            for j in i + 1..n {
                let gap = j - i;
                let bound = gap.min(n - gap).min(l + 1);
                if let Some(&d) = ball.get(&verts[j]) {
                    if d < bound {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Block-diagonal union, `self` first.
    pub fn disjoint_union(&self, other: &ActionGraph) -> Result<ActionGraph> {
        if self.basis != other.basis {
            return Err(Error::InvalidSpec("disjoint union over different bases".into()));
        }
        let perms = self
            .perms
            .iter()
            .zip(&other.perms)
            .map(|(a, b)| a.disjoint_union(b))
            .collect();
        ActionGraph::from_parts(self.basis.clone(), perms)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = GraphFile {
            degree: self.degree(),
            generators: self.basis.names().to_vec(),
            perms: self
                .basis
                .names()
                .iter()
                .zip(&self.perms)
                .map(|(n, p)| (n.clone(), p.images().to_vec()))
                .collect(),
        };
        serde_json::to_value(file).expect("graph serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph serializes")
    }

    /// Parses the graph file format; the result is validated.
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let basis = Basis::new(&file.generators)?;
        let mut perms = Vec::with_capacity(basis.rank());
        for name in basis.names() {
            let images = file
                .perms
                .get(name)
                .ok_or_else(|| Error::MalformedGraph(format!("no image array for {name}")))?;
            if images.len() != file.degree {
                return Err(Error::MalformedGraph(format!("array for {name} has wrong length")));
            }
            perms.push(Perm::from_images(images.clone()));
        }
        if file.degree == 0 {
            return Err(Error::EmptyGraph);
        }
        ActionGraph::new(basis, perms)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    /// Graphviz rendering, one edge per positive edge. `factor` tags each
    /// generator with a side letter for amalgam graphs.
    pub fn to_dot(&self, factor: Option<&dyn Fn(usize) -> char>) -> String {
        let mut s = String::from("digraph action_graph {\n");
        for v in 0..self.degree() {
            let _ = writeln!(s, "  {v};");
        }
        for (g, p) in self.perms.iter().enumerate() {
            let name = self.basis.name(g);
            for (v, &w) in p.images().iter().enumerate() {
                match factor {
                    Some(f) => {
                        let side = f(g);
                        let color = if side == 'A' { "blue" } else { "red" };
                        let _ = writeln!(
                            s,
                            "  {v} -> {w} [label=\"{name}\", factor=\"{side}\", color=\"{color}\"];"
                        );
                    }
                    None => {
                        let _ = writeln!(s, "  {v} -> {w} [label=\"{name}\"];");
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    degree: usize,
    generators: Vec<String>,
    perms: BTreeMap<String, Vec<u32>>,
}

/// The traced representative of one `u`-cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePath {
    pub word: Word,
    pub start: u32,
    pub length: usize,
    /// `length * |word|` vertices; vertex `i` is where edge `i` begins.
    pub vertices: Vec<u32>,
}

impl CyclePath {
    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    /// Letter read along edge `i`.
    pub fn letter(&self, i: usize) -> Letter {
        self.word.letters()[i % self.word.len()]
    }

    /// The positively oriented edge `(generator, tail)` underlying edge `i`.
    pub fn positive_edge(&self, g: &ActionGraph, i: usize) -> (u32, u32) {
        let l = self.letter(i);
        let v = self.vertices[i];
        if l.inv {
            (l.gen, g.step(v, l))
        } else {
            (l.gen, v)
        }
    }

    /// Number of times edge `(gen, tail)` is crossed, either direction.
    pub fn crossings(&self, g: &ActionGraph, edge: (u32, u32)) -> usize {
        (0..self.edge_count()).filter(|&i| self.positive_edge(g, i) == edge).count()
    }
}

pub fn lcm_of_cycles(cycles: &[CyclePath]) -> u64 {
    cycles.iter().fold(1, |acc, c| lcm(acc, c.length as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Free { basis: Vec<String> },
    Amalgam { presentation: crate::amalgam::PresentationFile },
}

/// A homomorphism onto the permutation group of `graph`, with the element
/// orders it is claimed to witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuotient {
    pub graph: ActionGraph,
    pub source: Source,
    pub witness_orders: BTreeMap<String, u64>,
    pub log: Vec<String>,
}

impl FiniteQuotient {
    pub fn free(graph: ActionGraph) -> Self {
        let basis = graph.basis().names().to_vec();
        FiniteQuotient {
            graph,
            source: Source::Free { basis },
            witness_orders: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn amalgam(graph: ActionGraph, pres: &AmalgamPresentation) -> Self {
        FiniteQuotient {
            graph,
            source: Source::Amalgam { presentation: pres.to_file() },
            witness_orders: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    /// Parses a witness key in the source's word syntax and returns its order.
    pub fn order_of(&self, text: &str) -> Result<u64> {
        let w = match &self.source {
            Source::Free { .. } => self.graph.basis().parse(text)?,
            Source::Amalgam { presentation } => {
                let pres = AmalgamPresentation::from_file(presentation)?;
                pres.to_free_word(&pres.parse(text)?)
            }
        };
        Ok(self.graph.element_order(&w))
    }

    pub fn record(&mut self, text: &str) -> Result<u64> {
        let o = self.order_of(text)?;
        self.witness_orders.insert(text.to_string(), o);
        Ok(o)
    }

    /// Recomputes every witness order on the graph.
    pub fn verify(&self) -> Result<bool> {
        self.graph.validate()?;
        for (k, &o) in &self.witness_orders {
            if self.order_of(k)? != o {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("graph".into(), self.graph.to_json_value());
        m.insert("source".into(), serde_json::to_value(&self.source).expect("source serializes"));
        m.insert("orders".into(), serde_json::to_value(&self.witness_orders).expect("orders"));
        if !self.log.is_empty() {
            m.insert("log".into(), serde_json::to_value(&self.log).expect("log"));
        }
        serde_json::Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("quotient serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let graph = ActionGraph::from_json_value(
            v.get("graph").ok_or_else(|| Error::Parse("missing graph".into()))?,
        )?;
        let source: Source = match v.get("source") {
            Some(s) => serde_json::from_value(s.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => Source::Free { basis: graph.basis().names().to_vec() },
        };
        let witness_orders = match v.get("orders") {
            Some(o) => serde_json::from_value(o.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => BTreeMap::new(),
        };
        let log = match v.get("log") {
            Some(l) => serde_json::from_value(l.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => Vec::new(),
        };
        Ok(FiniteQuotient { graph, source, witness_orders, log })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Basis {
        Basis::new(&["x", "y"]).unwrap()
    }

    fn w(s: &str) -> Word {
        xy().parse(s).unwrap()
    }

    fn z2_plus_z3() -> ActionGraph {
        let x = Perm::from_cycles(5, &[&[0, 1], &[2, 3, 4]]);
        ActionGraph::new(xy(), vec![x, Perm::identity(5)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(ActionGraph::cyclic_shift(xy(), 3, &[0]).validate().is_ok());
        let bad = ActionGraph::from_parts(
            xy(),
            vec![Perm::from_images(vec![0, 0, 1]), Perm::identity(3)],
        )
        .unwrap();
        assert!(matches!(bad.validate(), Err(Error::DuplicateImage { vertex: 0, .. })));
        let empty = ActionGraph::from_parts(
            xy(),
            vec![Perm::from_images(vec![]), Perm::from_images(vec![])],
        )
        .unwrap();
        assert_eq!(empty.validate(), Err(Error::EmptyGraph));
    }

    #[test]
    fn image_perm_examples() {
        let g = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        assert_eq!(g.image_perm(&w("x")), Perm::from_cycles(3, &[&[0, 1, 2]]));
        assert!(g.image_perm(&w("x x^-1")).is_identity());
        assert_eq!(z2_plus_z3().image_perm(&w("x")).cycle_type(), vec![2, 3]);
    }

    #[test]
    fn u_cycles_examples() {
        let g3 = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        let c = g3.u_cycles(&w("x")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].length, 3);

        let g4 = ActionGraph::cyclic_shift(xy(), 4, &[0]);
        let c = g4.u_cycles(&w("x x")).unwrap();
        assert_eq!(c.iter().map(|c| c.length).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!(c[0].vertices, vec![0, 1, 2, 3]);

        // (Z/2)^2 grid: vertex 2*i + j, x flips i, y flips j
        let x = Perm::from_images(vec![2, 3, 0, 1]);
        let y = Perm::from_images(vec![1, 0, 3, 2]);
        let grid = ActionGraph::new(xy(), vec![x, y]).unwrap();
        let c = grid.u_cycles(&w("x y x^-1 y^-1")).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.length == 1));

        assert_eq!(g3.u_cycles(&w("x x^-1")), Err(Error::EmptyWord));
    }

    #[test]
    fn element_order_examples() {
        assert_eq!(z2_plus_z3().element_order(&w("x")), 6);
        // direct power check of the same claim
        let p = z2_plus_z3().image_perm(&w("x"));
        assert!((1..6).all(|k| !p.pow(k).is_identity()) && p.pow(6).is_identity());
        assert_eq!(z2_plus_z3().element_order(&Word::empty()), 1);
        assert_eq!(ActionGraph::cyclic_shift(xy(), 4, &[0]).element_order(&w("x x")), 2);
    }

    #[test]
    fn distance_examples() {
        let g5 = ActionGraph::cyclic_shift(xy(), 5, &[0]);
        assert_eq!(g5.distance(3, 3), Some(0));
        assert_eq!(g5.distance(0, 1), Some(1));
        assert_eq!(g5.distance(0, 2), Some(2));
        assert_eq!(g5.distance(0, 4), Some(1));
        assert_eq!(z2_plus_z3().distance(0, 3), None);
    }

    #[test]
    fn l_near_examples() {
        let g6 = ActionGraph::cyclic_shift(xy(), 6, &[0]);
        let c = &g6.u_cycles(&w("x")).unwrap()[0];
        assert!(!g6.has_l_near(c, 0));
        assert!(!g6.has_l_near(c, 1));
        // x^2 on the 3-cycle: the 6-edge representative revisits every vertex
        let g3 = ActionGraph::cyclic_shift(xy(), 3, &[0]);
        let c = &g3.u_cycles(&w("x x")).unwrap()[0];
        assert_eq!(c.vertices.len(), 6);
        assert!(g3.has_l_near(c, 0));
        // x y on the 6-cycle where both generators shift: vertices 0..5 each once,
        // but positions 0 and 2 (vertices 0 and 2) are at distance 2, fine;
        // positions 0 and 1 are adjacent.
        let g = ActionGraph::cyclic_shift(xy(), 6, &[0, 1]);
        let c = &g.u_cycles(&w("x y")).unwrap()[0];
        assert!(!g.has_l_near(c, 1));
    }

    #[test]
    fn json_round_trip() {
        let g = z2_plus_z3();
        let back = ActionGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let text = r#"{"degree": 2, "generators": ["x"], "perms": {"x": [1, 1]}}"#;
        assert!(matches!(ActionGraph::from_json(text), Err(Error::DuplicateImage { .. })));
    }

    #[test]
    fn dot_has_one_edge_per_positive_edge() {
        let dot = ActionGraph::cyclic_shift(xy(), 3, &[0]).to_dot(None);
        assert_eq!(dot.matches("->").count(), 6);
        assert!(dot.contains("0 -> 1 [label=\"x\"]"));
    }

    #[test]
    fn quotient_verify_detects_tampering() {
        let mut q = FiniteQuotient::free(ActionGraph::cyclic_shift(xy(), 4, &[0]));
        assert_eq!(q.record("x").unwrap(), 4);
        assert!(q.verify().unwrap());
        q.witness_orders.insert("x".into(), 2);
        assert!(!q.verify().unwrap());
    }
}
