//! Permutations of `0..n` in image-array form.
//!
//! Products are read left to right: `p.then(&q)` applies `p` first.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// No bijectivity check; callers validate where it matters.
    pub fn from_images(images: Vec<u32>) -> Self {
        Perm(images)
    }

    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Self {
        let mut p: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for i in 0..c.len() {
                p[c[i] as usize] = c[(i + 1) % c.len()];
            }
        }
        Perm(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, v: u32) -> u32 {
        self.0[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v as usize >= n || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    pub fn inverse(&self) -> Perm {
        let mut r = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            r[v as usize] = i as u32;
        }
        Perm(r)
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&v| other.0[v as usize]).collect())
    }

    /// Disjoint cycles, each starting at its smallest point, in order of that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut v = s;
            while !seen[v] {
                seen[v] = true;
                c.push(v as u32);
                v = self.0[v] as usize;
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut result = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        result
    }

    /// Disjoint union: `self` on `0..n`, `other` shifted onto `n..n+m`.
    pub fn disjoint_union(&self, other: &Perm) -> Perm {
        let n = self.0.len() as u32;
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&x| x + n));
        Perm(v)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// The finite group generated by a tuple of permutations, enumerated by
/// breadth-first closure. Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct PermGroup {
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    /// `right_mul[g][e]` is the index of `elements[e].then(gens[g])`.
    right_mul: Vec<Vec<u32>>,
}

impl PermGroup {
    /// Returns `None` when the group has more than `cap` elements.
    pub fn generate(gens: &[Perm], degree: usize, cap: usize) -> Option<PermGroup> {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut right_mul: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (g, gen) in gens.iter().enumerate() {
                let prod = elements[e].then(gen);
                let j = match index.get(&prod) {
                    Some(&j) => j,
                    None => {
                        if elements.len() >= cap {
                            return None;
                        }
                        let j = elements.len();
                        index.insert(prod.clone(), j);
                        elements.push(prod);
                        queue.push_back(j);
                        j
                    }
                };
                let row = &mut right_mul[g];
                if row.len() <= e {
                    row.resize(e + 1, u32::MAX);
                }
                row[e] = j as u32;
            }
        }
        Some(PermGroup { elements, index, right_mul })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Right-regular action of each generator on element indices.
    pub fn regular_generators(&self) -> Vec<Perm> {
        self.right_mul.iter().map(|row| Perm(row.clone())).collect()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_invert() {
        let p = Perm::from_images(vec![1, 2, 0]);
        assert_eq!(p.then(&p.inverse()), Perm::identity(3));
        assert_eq!(p.then(&p), Perm::from_images(vec![2, 0, 1]));
        assert_eq!(p.order(), 3);
        assert_eq!(p.pow(3), Perm::identity(3));
    }

    #[test]
    fn then_applies_left_first() {
        let a = Perm::from_cycles(3, &[&[0, 1]]);
        let b = Perm::from_cycles(3, &[&[1, 2]]);
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).apply(0), 2);
    }

    #[test]
    fn cycle_type_of_union() {
        let p = Perm::from_cycles(2, &[&[0, 1]]).disjoint_union(&Perm::from_cycles(3, &[&[0, 1, 2]]));
        assert_eq!(p.cycle_type(), vec![2, 3]);
        assert_eq!(p.order(), 6);
    }

    #[test]
    fn group_closure_sizes() {
        let s3 = PermGroup::generate(
            &[Perm::from_cycles(3, &[&[0, 1]]), Perm::from_cycles(3, &[&[0, 1, 2]])],
            3,
            100,
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        for g in s3.regular_generators() {
            assert!(g.is_bijection());
        }
        assert!(PermGroup::generate(
            &[Perm::from_cycles(5, &[&[0, 1]]), Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])],
            5,
            100
        )
        .is_none());
    }
}
