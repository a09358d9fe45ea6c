//! Exhaustive search for homomorphisms into small symmetric groups.
//!
//! Generator images are enumerated in lexicographic order of `Sym(n)` with
//! the first generator most significant. For an amalgam, an A-side tuple is
//! paired with every B-side tuple sending `b` where the A-side tuple sends `a`.

use std::collections::HashMap;

use crate::action_graph::{ActionGraph, FiniteQuotient};
use crate::amalgam::{AmalgamPresentation, AmalgamWord};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::search::symmetric_group;
use crate::words::{Basis, Word};

pub const DEFAULT_CAP: usize = 5;

/// All `rank`-tuples of permutations of `0..n`.
pub fn enumerate_free_homs(rank: usize, n: usize, cap: usize) -> Result<impl Iterator<Item = Vec<Perm>>> {
    if n == 0 || n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let elems = symmetric_group(n);
    let m = elems.len() as u64;
    let total = m.pow(rank as u32);
    Ok((0..total).map(move |mut idx| {
        let mut t = vec![Perm::identity(n); rank];
        for slot in t.iter_mut().rev() {
            *slot = elems[(idx % m) as usize].clone();
            idx /= m;
        }
        t
    }))
}

#[derive(Debug, Clone)]
pub struct OracleHit {
    pub n: usize,
    /// Position in the enumeration at degree `n`.
    pub index: u64,
    pub graph: ActionGraph,
    pub order_u: u64,
    pub order_v: u64,
}

/// `Sym(n)` in lexicographic order with inverses, for evaluating words on
/// tuples of element indices without building graphs.
struct SymTable {
    n: usize,
    elems: Vec<Perm>,
    inv: Vec<Vec<u32>>,
}

impl SymTable {
    fn new(n: usize) -> Self {
        let elems = symmetric_group(n);
        let inv = elems.iter().map(|p| p.inverse().images().to_vec()).collect();
        SymTable { n, elems, inv }
    }

    fn image(&self, choice: &[usize], w: &Word) -> Vec<u32> {
        (0..self.n as u32)
            .map(|mut v| {
                for l in w.letters() {
                    let e = choice[l.gen as usize];
                    v = if l.inv { self.inv[e][v as usize] } else { self.elems[e].apply(v) };
                }
                v
            })
            .collect()
    }

    fn order(&self, choice: &[usize], w: &Word) -> u64 {
        Perm::from_images(self.image(choice, w)).order()
    }

    fn graph(&self, basis: &Basis, choice: &[usize]) -> ActionGraph {
        let perms = choice.iter().map(|&e| self.elems[e].clone()).collect();
        ActionGraph::new(basis.clone(), perms).expect("permutation tuple")
    }
}

/// Index tuples over `m` elements, first entry most significant.
fn tuples(rank: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (m as u64).pow(rank as u32);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; rank];
        for slot in t.iter_mut().rev() {
            *slot = (idx % m as u64) as usize;
            idx /= m as u64;
        }
        t
    })
}

/// Smallest degree and first tuple giving `u` and `v` different orders.
pub fn oracle_separate_free(basis: &Basis, u: &Word, v: &Word, n_max: usize, cap: usize) -> Result<Option<OracleHit>> {
    if n_max > cap {
        return Err(Error::CapExceeded { n: n_max, cap });
    }
    for n in 1..=n_max {
        let table = SymTable::new(n);
        for (index, choice) in tuples(basis.rank(), table.elems.len()).enumerate() {
            let (ou, ov) = (table.order(&choice, u), table.order(&choice, v));
            if ou != ov {
                let graph = table.graph(basis, &choice);
                return Ok(Some(OracleHit { n, index: index as u64, graph, order_u: ou, order_v: ov }));
            }
        }
    }
    Ok(None)
}

/// Index tuples for the combined basis, A-side tuple major, keeping only
/// those where `a` and `b` have the same image.
fn amalgam_tuples<'t>(pres: &AmalgamPresentation, table: &'t SymTable) -> impl Iterator<Item = Vec<usize>> + 't {
    let (ra, rb) = (pres.basis_a.rank(), pres.basis_b.rank());
    let m = table.elems.len();
    let mut by_b: HashMap<Vec<u32>, Vec<Vec<usize>>> = HashMap::new();
    for t in tuples(rb, m) {
        by_b.entry(table.image(&t, &pres.b)).or_default().push(t);
    }
    let a = pres.a.clone();
    tuples(ra, m).flat_map(move |ta| {
        let matches = by_b.get(&table.image(&ta, &a)).cloned().unwrap_or_default();
        matches.into_iter().map(move |tb| {
            let mut t = ta.clone();
            t.extend(tb);
            t
        })
    })
}

/// Homomorphisms of the amalgam into `Sym(n)`, as graphs over the combined basis.
pub fn enumerate_amalgam_homs(pres: &AmalgamPresentation, n: usize, cap: usize) -> Result<Vec<ActionGraph>> {
    if n == 0 || n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let table = SymTable::new(n);
    Ok(amalgam_tuples(pres, &table).map(|t| table.graph(pres.combined_basis(), &t)).collect())
}

pub fn oracle_separate_amalgam(
    pres: &AmalgamPresentation,
    u: &AmalgamWord,
    v: &AmalgamWord,
    n_max: usize,
    cap: usize,
) -> Result<Option<OracleHit>> {
    if n_max > cap {
        return Err(Error::CapExceeded { n: n_max, cap });
    }
    let (fu, fv) = (pres.to_free_word(u), pres.to_free_word(v));
    for n in 1..=n_max {
        let table = SymTable::new(n);
        for (index, choice) in amalgam_tuples(pres, &table).enumerate() {
            let (ou, ov) = (table.order(&choice, &fu), table.order(&choice, &fv));
            if ou != ov {
                let graph = table.graph(pres.combined_basis(), &choice);
                return Ok(Some(OracleHit { n, index: index as u64, graph, order_u: ou, order_v: ov }));
            }
        }
    }
    Ok(None)
}

/// Recomputes the claimed orders and the separation of `u` and `v`.
pub fn oracle_consistency(q: &FiniteQuotient, u: &str, v: &str) -> Result<bool> {
    let witnessed = q.verify()?;
    let (ou, ov) = (q.order_of(u)?, q.order_of(v)?);
    let claims_match = [(u, ou), (v, ov)]
        .iter()
        .all(|(k, o)| q.witness_orders.get(*k).is_none_or(|c| c == o));
    Ok(witnessed && claims_match && ou != ov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Basis {
        Basis::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_free_homs(1, 2, DEFAULT_CAP).unwrap().count(), 2);
        assert_eq!(enumerate_free_homs(2, 2, DEFAULT_CAP).unwrap().count(), 4);
        assert_eq!(enumerate_free_homs(2, 3, DEFAULT_CAP).unwrap().count(), 36);
        assert!(matches!(enumerate_free_homs(1, 6, DEFAULT_CAP), Err(Error::CapExceeded { n: 6, cap: 5 })));
        let first = enumerate_free_homs(2, 2, 5).unwrap().nth(1).unwrap();
        assert!(first[0].is_identity() && !first[1].is_identity());
    }

    #[test]
    fn free_separation_is_found_early() {
        let b = xy();
        // a transposition already gives x order 2 and x^2 order 1
        let hit = oracle_separate_free(&b, &b.parse("x").unwrap(), &b.parse("x x").unwrap(), 4, 5).unwrap().unwrap();
        assert_eq!((hit.n, hit.order_u, hit.order_v), (2, 2, 1));
        let hit = oracle_separate_free(&b, &b.parse("x").unwrap(), &b.parse("y").unwrap(), 3, 5).unwrap().unwrap();
        assert_eq!(hit.n, 2);
        assert_eq!(hit.index, 1);
        let none = oracle_separate_free(&b, &b.parse("x y").unwrap(), &b.parse("y x").unwrap(), 4, 5).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn amalgam_filter_is_exact() {
        let p = AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x", "s").unwrap();
        let mut count = 0;
        for g in enumerate_amalgam_homs(&p, 3, 5).unwrap().iter() {
            assert_eq!(g.perm(0), g.perm(2));
            count += 1;
        }
        // 6 choices of the shared image, then y and t free
        assert_eq!(count, 6 * 6 * 6);
    }

    #[test]
    fn consistency_detects_tampering() {
        let b = xy();
        let g = ActionGraph::cyclic_shift(b.clone(), 4, &[0]);
        let mut q = FiniteQuotient::free(g);
        q.record("x").unwrap();
        q.record("x x").unwrap();
        assert!(oracle_consistency(&q, "x", "x x").unwrap());
        q.witness_orders.insert("x".into(), 3);
        assert!(!oracle_consistency(&q, "x", "x x").unwrap());
        let mut q = FiniteQuotient::free(ActionGraph::cyclic_shift(b, 4, &[0, 1]));
        q.record("x").unwrap();
        assert!(!oracle_consistency(&q, "x", "y").unwrap());
    }
}
