//! Candidate finite quotients of a free group, produced in a fixed order.
//!
//! Two kinds of families live here: p-group families (cyclic p-power groups,
//! unitriangular matrix groups over `Z/p^m`, and iterated wreath products
//! acting on `p^s` points) used wherever a p-group image is required, and a
//! small-group family (all cyclic groups, then all generator tuples in small
//! symmetric groups) used when any finite image will do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action_graph::ActionGraph;
use crate::perm::{Perm, PermGroup};
use crate::words::Basis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Z/p^m`, generators sent to an exponent vector.
    Cyclic,
    /// Unitriangular `d x d` matrices over `Z/p^m`.
    Unitriangular,
    /// Random elements of the Sylow p-subgroup of `Sym(p^s)`.
    PermutationP,
}

pub const ALL_FAMILIES: [Family; 3] = [Family::Cyclic, Family::Unitriangular, Family::PermutationP];

#[derive(Debug, Clone)]
pub struct Candidate {
    pub graph: ActionGraph,
    /// The graph is the Cayley graph of its image group.
    pub regular: bool,
    pub label: String,
}

/// Largest group we are willing to turn into a Cayley graph.
pub const GROUP_CAP: usize = 6000;

fn cyclic_graph(basis: &Basis, modulus: u64, exps: &[u64]) -> ActionGraph {
    let n = modulus as u32;
    let perms = exps
        .iter()
        .map(|&e| Perm::from_images((0..n).map(|v| (v + e as u32) % n).collect()))
        .collect();
    ActionGraph::from_parts(basis.clone(), perms).expect("cyclic graph is well formed")
}

/// Cayley graph of the group generated by `gens`, or `None` above `cap`.
pub fn cayley_graph(basis: &Basis, gens: &[Perm], cap: usize) -> Option<ActionGraph> {
    let degree = gens.first().map_or(1, Perm::degree);
    let group = PermGroup::generate(gens, degree, cap)?;
    Some(ActionGraph::from_parts(basis.clone(), group.regular_generators()).expect("regular graph"))
}

/// Iterates all vectors of `len` digits in `0..base`, lexicographically.
pub(crate) fn odometer(base: u64, len: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = base.checked_pow(len as u32);
    let mut current = Some(vec![0u64; len]);
    let mut emitted = 0u64;
    std::iter::from_fn(move || {
        let out = current.clone()?;
        emitted += 1;
        if total.is_some_and(|t| emitted >= t) {
            current = None;
        } else if let Some(c) = current.as_mut() {
            let mut i = len;
            loop {
                if i == 0 {
                    current = None;
                    break;
                }
                i -= 1;
                c[i] += 1;
                if c[i] < base {
                    break;
                }
                c[i] = 0;
            }
        }
        Some(out)
    })
}

fn cyclic_candidates(basis: Basis, moduli: Vec<u64>) -> impl Iterator<Item = Candidate> {
    moduli.into_iter().flat_map(move |modulus| {
        let basis = basis.clone();
        odometer(modulus, basis.rank()).map(move |exps| Candidate {
            graph: cyclic_graph(&basis, modulus, &exps),
            regular: true,
            label: format!("Z/{modulus} {exps:?}"),
        })
    })
}

/// Action of an upper unitriangular matrix on row vectors of `(Z/q)^d`.
fn unitriangular_perm(d: usize, q: u64, entries: &[u64]) -> Perm {
    let points = q.pow(d as u32);
    let mut images = Vec::with_capacity(points as usize);
    for idx in 0..points {
        let mut v = vec![0u64; d];
        let mut t = idx;
        for c in v.iter_mut() {
            *c = t % q;
            t /= q;
        }
        // (vM)_j = v_j + sum_{i<j} v_i M_ij
        let mut w = v.clone();
        let mut k = 0;
        for i in 0..d {
            for j in i + 1..d {
                w[j] = (w[j] + v[i] * entries[k]) % q;
                k += 1;
            }
        }
        let mut out = 0u64;
        for c in w.iter().rev() {
            out = out * q + c;
        }
        images.push(out as u32);
    }
    Perm::from_images(images)
}

fn unitriangular_candidates(basis: Basis, p: u64) -> impl Iterator<Item = Candidate> {
    let shapes: Vec<(usize, u32)> = [(3usize, 1u32), (3, 2), (4, 1)]
        .into_iter()
        .filter(|&(d, m)| {
            let group = (p.pow(m) as f64).powi((d * (d - 1) / 2) as i32);
            let points = (p.pow(m) as f64).powi(d as i32);
            group <= GROUP_CAP as f64 && points <= 4096.0
        })
        .collect();
    shapes.into_iter().flat_map(move |(d, m)| {
        let q = p.pow(m);
        let e = d * (d - 1) / 2;
        let basis = basis.clone();
        odometer(q, e * basis.rank()).filter_map(move |digits| {
            let gens: Vec<Perm> = digits
                .chunks(e)
                .map(|entries| unitriangular_perm(d, q, entries))
                .collect();
            let graph = cayley_graph(&basis, &gens, GROUP_CAP)?;
            Some(Candidate { graph, regular: true, label: format!("UT({d}, Z/{q}) {digits:?}") })
        })
    })
}

/// A random element of the iterated wreath product `Z/p wr ... wr Z/p`
/// (depth `s`) acting on `p^s` points.
fn random_wreath_element(p: u64, s: u32, rng: &mut ChaCha8Rng) -> Perm {
    let tables: Vec<Vec<u64>> = (0..s).map(|lvl| (0..p.pow(lvl)).map(|_| rng.gen_range(0..p)).collect()).collect();
    let points = p.pow(s);
    let mut images = Vec::with_capacity(points as usize);
    for idx in 0..points {
        // digit 0 is the most significant level
        let mut digits = vec![0u64; s as usize];
        let mut t = idx;
        for lvl in (0..s as usize).rev() {
            digits[lvl] = t % p;
            t /= p;
        }
        let mut out = 0u64;
        let mut prefix = 0u64;
        for lvl in 0..s as usize {
            let nd = (digits[lvl] + tables[lvl][prefix as usize]) % p;
            prefix = prefix * p + digits[lvl];
            out = out * p + nd;
        }
        images.push(out as u32);
    }
    Perm::from_images(images)
}

fn wreath_candidates(basis: Basis, p: u64, seed: u64, per_depth: usize) -> impl Iterator<Item = Candidate> {
    let depths: Vec<u32> = (2..=4).filter(|&s| p.pow(s) <= 256).collect();
    depths.into_iter().flat_map(move |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s as u64 * 0x9e37_79b9));
        let basis = basis.clone();
        (0..per_depth).map(move |i| {
            let gens: Vec<Perm> = (0..basis.rank()).map(|_| random_wreath_element(p, s, &mut rng)).collect();
            Candidate {
                graph: ActionGraph::from_parts(basis.clone(), gens).expect("wreath graph"),
                regular: false,
                label: format!("Sylow_{p}(Sym({})) #{i}", p.pow(s)),
            }
        })
    })
}

/// The p-group ladder in search order, restricted to `families`.
pub fn p_group_candidates(
    basis: &Basis,
    p: u64,
    families: &[Family],
    seed: u64,
) -> Box<dyn Iterator<Item = Candidate>> {
    let mut it: Box<dyn Iterator<Item = Candidate>> = Box::new(std::iter::empty());
    for fam in families {
        let basis = basis.clone();
        it = match fam {
            Family::Cyclic => {
                let moduli: Vec<u64> = (1..)
                    .map(|m| p.pow(m))
                    .take_while(|&q| q <= 256 && q.saturating_pow(basis.rank() as u32) <= 1 << 14)
                    .collect();
                Box::new(it.chain(cyclic_candidates(basis, moduli)))
            }
            Family::Unitriangular => Box::new(it.chain(unitriangular_candidates(basis, p))),
            Family::PermutationP => Box::new(it.chain(wreath_candidates(basis, p, seed, 400))),
        };
    }
    it
}

/// All permutations of `0..n` in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Perm> {
    let mut current: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![Perm::from_images(current.clone())];
    loop {
        let Some(i) = (1..current.len()).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..current.len()).rev().find(|&j| current[j] > current[i - 1]).expect("pivot");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(Perm::from_images(current.clone()));
    }
    out
}

/// Small quotients of any kind, as Cayley graphs: cyclic groups `Z/m` for
/// `m <= max_cyclic`, then generator tuples in `Sym(n)` for `3 <= n <= max_sym`.
pub fn small_candidates(basis: &Basis, max_cyclic: u64, max_sym: usize) -> Box<dyn Iterator<Item = Candidate>> {
    let cyc = cyclic_candidates(basis.clone(), (2..=max_cyclic).collect());
    let basis2 = basis.clone();
    let sym = (3..=max_sym).flat_map(move |n| {
        let elems = symmetric_group(n);
        let basis = basis2.clone();
        odometer(elems.len() as u64, basis.rank()).filter_map(move |idx| {
            let gens: Vec<Perm> = idx.iter().map(|&i| elems[i as usize].clone()).collect();
            let graph = cayley_graph(&basis, &gens, GROUP_CAP)?;
            Some(Candidate { graph, regular: true, label: format!("Sym({n}) {idx:?}") })
        })
    });
    Box::new(cyc.chain(sym))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_counts() {
        assert_eq!(odometer(3, 2).count(), 9);
        assert_eq!(odometer(2, 0).count(), 1);
        assert_eq!(odometer(2, 3).next(), Some(vec![0, 0, 0]));
        assert_eq!(odometer(2, 3).last(), Some(vec![1, 1, 1]));
    }

    #[test]
    fn symmetric_group_is_lexicographic() {
        let s3 = symmetric_group(3);
        assert_eq!(s3.len(), 6);
        assert_eq!(s3[1].images(), &[0, 2, 1]);
        assert_eq!(symmetric_group(4).len(), 24);
    }

    #[test]
    fn unitriangular_action_is_faithful_p_group() {
        let b = Basis::new(&["x", "y"]).unwrap();
        let x = unitriangular_perm(3, 3, &[1, 0, 0]);
        let y = unitriangular_perm(3, 3, &[0, 0, 1]);
        assert!(x.is_bijection() && y.is_bijection());
        let g = cayley_graph(&b, &[x, y], GROUP_CAP).unwrap();
        // Heisenberg group mod 3
        assert_eq!(g.degree(), 27);
    }

    #[test]
    fn wreath_elements_have_p_power_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let e = random_wreath_element(2, 3, &mut rng);
            assert!(e.is_bijection());
            assert!([1, 2, 4, 8].contains(&e.order()));
        }
    }
}
