//! Words in a finitely generated free group.
//!
//! A [`Word`] is a plain sequence of signed generator indices; it carries no
//! reference to its [`Basis`], which is only needed for parsing and printing.
//! Operations that have group-theoretic meaning always reduce first.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basis {
    names: Vec<String>,
}

impl Basis {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(Error::Parse("basis must have at least one generator".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty()
                || !n.is_ascii()
                || n.chars().any(|c| c.is_whitespace() || c == '^' || c == '{' || c == '}')
            {
                return Err(Error::Parse(format!("invalid generator name {n:?}")));
            }
            if n == "1" {
                return Err(Error::Parse("generator name `1` is reserved".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::Parse(format!("duplicate generator name {n:?}")));
            }
        }
        Ok(Basis { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses `x y^-1 x`; the identity may be written `1` or left empty.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let gen = self
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            letters.push(Letter::new(gen, inv));
        }
        Ok(Word(letters))
    }

    pub fn format(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|l| {
                if l.inv {
                    format!("{}^-1", self.names[l.gen as usize])
                } else {
                    self.names[l.gen as usize].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.gen as usize >= self.rank()) {
            Some(l) => Err(Error::Parse(format!(
                "generator index {} out of range for rank {}",
                l.gen,
                self.rank()
            ))),
            None => Ok(()),
        }
    }
}

/// A generator or its inverse. Ordered by generator, then `x < x^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen: gen as u32, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Builds a word from signed 1-based indices: `2` is generator 1, `-1` is
    /// generator 0 inverted. Zero entries are skipped.
    pub fn from_signed(signed: &[i32]) -> Self {
        Word(
            signed
                .iter()
                .filter(|&&s| s != 0)
                .map(|&s| Letter::new(s.unsigned_abs() as usize - 1, s < 0))
                .collect(),
        )
    }

    pub fn generator(gen: usize) -> Self {
        Word(vec![Letter::new(gen, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| !p[0].cancels(p[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(f), Some(l)) if self.0.len() > 1 => !f.cancels(*l),
                _ => true,
            }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.reduce();
        for &l in other.reduce().letters() {
            push_reduced(&mut out.0, l);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() }.reduce();
        let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            for &l in base.letters() {
                push_reduced(&mut out, l);
            }
        }
        Word(out)
    }

    pub fn reduce(&self) -> Word {
        let mut out = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Cyclic rotation by `r` letters: `w[r..] w[..r]`.
    pub fn rotate(&self, r: usize) -> Word {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let r = r % n;
        let mut v = self.0[r..].to_vec();
        v.extend_from_slice(&self.0[..r]);
        Word(v)
    }

    /// Exponent sum of every generator, indexed by generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut e = vec![0i64; rank];
        for l in &self.0 {
            e[l.gen as usize] += if l.inv { -1 } else { 1 };
        }
        e
    }

    /// Length-first, then lexicographic in basis order.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last().is_some_and(|&t| t.cancels(l)) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for Word {
    /// Basis-free rendering with 1-based signed indices, mostly for debugging.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                let i = l.gen as i64 + 1;
                (if l.inv { -i } else { i }).to_string()
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn reduce(w: &Word) -> Word {
    w.reduce()
}

/// Returns `(core, conjugator)` with `w = conjugator * core * conjugator^-1`.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let r = w.reduce();
    let l = r.letters();
    let mut i = 0;
    while l.len() >= 2 * (i + 1) && l[i].cancels(l[l.len() - 1 - i]) {
        i += 1;
    }
    let core = Word(l[i..l.len() - i].to_vec());
    let conj = Word(l[..i].to_vec());
    (core, conj)
}

fn smallest_period(core: &[Letter]) -> usize {
    let n = core.len();
    (1..=n)
        .find(|&d| n % d == 0 && (d..n).all(|i| core[i] == core[i - d]))
        .unwrap_or(n)
}

/// `w = root^exponent` with `root` not a proper power.
pub fn primitive_root(w: &Word) -> Result<(Word, u64)> {
    let (core, conj) = cyclic_reduce(w);
    if core.is_empty() {
        return Err(Error::EmptyWord);
    }
    let d = smallest_period(core.letters());
    let root_core = Word(core.letters()[..d].to_vec());
    let root = conj.mul(&root_core).mul(&conj.inverse());
    Ok((root, (core.len() / d) as u64))
}

/// Returns the shortlex-smallest minimal-length `g` with `g^-1 u g = v`.
pub fn conjugate_in_free(u: &Word, v: &Word) -> Option<Word> {
    let (cu_core, cu) = cyclic_reduce(u);
    let (cv_core, cv) = cyclic_reduce(v);
    if cu_core.len() != cv_core.len() {
        return None;
    }
    if cu_core.is_empty() {
        return Some(Word::empty());
    }
    let n = cu_core.len();
    let d = smallest_period(cu_core.letters());
    let v_root = Word(cv_core.letters()[..d].to_vec());
    let centralizer_gen = cv.mul(&v_root).mul(&cv.inverse());
    let cv_inv = cv.inverse();
    let mut best: Option<Word> = None;
    for r in 0..n {
        if cu_core.rotate(r) != cv_core {
            continue;
        }
        let prefix = Word(cu_core.letters()[..r].to_vec());
        let suffix_inv = Word(cu_core.letters()[r..].to_vec()).inverse();
        for base in [prefix, suffix_inv] {
            let g = cu.mul(&base).mul(&cv_inv);
            for k in -1..=1 {
                let cand = g.mul(&centralizer_gen.pow(k));
                if best.as_ref().is_none_or(|b| cand.shortlex_cmp(b) == Ordering::Less) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

/// True iff `u` and `v` generate conjugate cyclic subgroups up to commensuration.
pub fn commensurable(u: &Word, v: &Word) -> Result<bool> {
    let (ru, _) = primitive_root(u)?;
    let (rv, _) = primitive_root(v)?;
    Ok(conjugate_in_free(&ru, &rv).is_some() || conjugate_in_free(&ru, &rv.inverse()).is_some())
}
