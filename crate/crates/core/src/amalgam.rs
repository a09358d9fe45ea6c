//! Elements of an amalgamated product `G = F_A *_{a=b} F_B` of two free
//! groups over the cyclic subgroups `<a>` and `<b>`.
//!
//! An [`AmalgamWord`] is a sequence of syllables, each a free word over one
//! side's basis. [`reduce_amalgam`] brings it to an alternating form in which
//! no syllable lies in the amalgamated subgroup, except for a lone power of
//! the amalgamated generator, which is always stored on side A.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action_graph::FiniteQuotient;
use crate::error::{Budget, Error, Result};
use crate::perm::Perm;
use crate::search::{p_group_candidates, small_candidates, Candidate, ALL_FAMILIES};
use crate::surgery::{equalize_with, exact_order_quotient, is_prime};
use crate::words::{conjugate_in_free, cyclic_reduce, primitive_root, Basis, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::A => 'A',
            Side::B => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub side: Side,
    pub word: Word,
}

impl Syllable {
    pub fn new(side: Side, word: Word) -> Self {
        Syllable { side, word }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AmalgamWord {
    pub syllables: Vec<Syllable>,
}

impl AmalgamWord {
    pub fn empty() -> Self {
        AmalgamWord::default()
    }

    pub fn single(side: Side, word: Word) -> Self {
        AmalgamWord { syllables: vec![Syllable::new(side, word)] }
    }

    pub fn from_syllables(syllables: Vec<Syllable>) -> Self {
        AmalgamWord { syllables }
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Total number of letters over all syllables.
    pub fn letter_count(&self) -> usize {
        self.syllables.iter().map(|s| s.word.len()).sum()
    }

    pub fn inverse(&self) -> AmalgamWord {
        AmalgamWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable::new(s.side, s.word.inverse()))
                .collect(),
        }
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &AmalgamWord) -> AmalgamWord {
        let mut syllables = self.syllables.clone();
        syllables.extend(other.syllables.iter().cloned());
        AmalgamWord { syllables }
    }

    /// Sides alternate and there are at least two syllables, an even number.
    pub fn is_alternating_even(&self) -> bool {
        self.len() >= 2
            && self.len() % 2 == 0
            && self.syllables.windows(2).all(|w| w[0].side != w[1].side)
    }

    /// Syllable rotation: `s_r ... s_n s_1 ... s_{r-1}`.
    pub fn rotate(&self, r: usize) -> AmalgamWord {
        let mut s = self.syllables.clone();
        if !s.is_empty() {
            let r = r % s.len();
            s.rotate_left(r);
        }
        AmalgamWord { syllables: s }
    }
}

/// JSON form of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    #[serde(rename = "basis_A")]
    pub basis_a: Vec<String>,
    #[serde(rename = "basis_B")]
    pub basis_b: Vec<String>,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamPresentation {
    pub basis_a: Basis,
    pub basis_b: Basis,
    pub a: Word,
    pub b: Word,
    combined: Basis,
}

impl AmalgamPresentation {
    pub fn new(basis_a: Basis, basis_b: Basis, a: Word, b: Word) -> Result<Self> {
        let names: Vec<String> = basis_a.names().iter().chain(basis_b.names()).cloned().collect();
        let combined = Basis::new(&names)
            .map_err(|_| Error::InvalidSpec("the two bases must use distinct generator names".into()))?;
        basis_a.check(&a)?;
        basis_b.check(&b)?;
        for (name, w) in [("a", &a), ("b", &b)] {
            if !w.is_reduced() || w.is_empty() {
                return Err(Error::InvalidSpec(format!("{name} must be reduced and nontrivial")));
            }
            if primitive_root(w)?.1 != 1 {
                return Err(Error::InvalidSpec(format!("{name} is a proper power")));
            }
        }
        Ok(AmalgamPresentation { basis_a, basis_b, a, b, combined })
    }

    /// Convenience constructor from generator names and word text.
    pub fn from_names(basis_a: &[&str], basis_b: &[&str], a: &str, b: &str) -> Result<Self> {
        let ba = Basis::new(basis_a)?;
        let bb = Basis::new(basis_b)?;
        let (a, b) = (ba.parse(a)?, bb.parse(b)?);
        Self::new(ba, bb, a, b)
    }

    pub fn from_file(f: &PresentationFile) -> Result<Self> {
        let ba = Basis::new(&f.basis_a)?;
        let bb = Basis::new(&f.basis_b)?;
        let (a, b) = (ba.parse(&f.a)?, bb.parse(&f.b)?);
        Self::new(ba, bb, a.reduce(), b.reduce())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&f)
    }

    pub fn to_file(&self) -> PresentationFile {
        PresentationFile {
            basis_a: self.basis_a.names().to_vec(),
            basis_b: self.basis_b.names().to_vec(),
            a: self.basis_a.format(&self.a),
            b: self.basis_b.format(&self.b),
        }
    }

    pub fn basis(&self, side: Side) -> &Basis {
        match side {
            Side::A => &self.basis_a,
            Side::B => &self.basis_b,
        }
    }

    /// The amalgamated generator as seen from `side`.
    pub fn c(&self, side: Side) -> &Word {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// Basis of the free product: side A names, then side B names.
    pub fn combined_basis(&self) -> &Basis {
        &self.combined
    }

    pub fn offset(&self, side: Side) -> usize {
        match side {
            Side::A => 0,
            Side::B => self.basis_a.rank(),
        }
    }

    /// Image of a side word in the free product.
    pub fn embed(&self, side: Side, w: &Word) -> Word {
        let off = self.offset(side);
        Word::from_letters(w.letters().iter().map(|l| Letter::new(l.gen as usize + off, l.inv)).collect())
    }

    pub fn to_free_word(&self, w: &AmalgamWord) -> Word {
        let letters = w
            .syllables
            .iter()
            .flat_map(|s| self.embed(s.side, &s.word).letters().to_vec())
            .collect();
        Word::from_letters(letters)
    }

    /// Splits a free-product word into maximal one-sided runs.
    pub fn from_free_word(&self, w: &Word) -> AmalgamWord {
        let ra = self.basis_a.rank() as u32;
        let mut syllables: Vec<Syllable> = Vec::new();
        for &l in w.letters() {
            let (side, gen) = if l.gen < ra { (Side::A, l.gen) } else { (Side::B, l.gen - ra) };
            let letter = Letter::new(gen as usize, l.inv);
            match syllables.last_mut() {
                Some(s) if s.side == side => {
                    let mut v = s.word.letters().to_vec();
                    v.push(letter);
                    s.word = Word::from_letters(v);
                }
                _ => syllables.push(Syllable::new(side, Word::from_letters(vec![letter]))),
            }
        }
        AmalgamWord { syllables }
    }

    /// Parses `A:{y} B:{t^-1 t^-1}`; `1` or blank text is the identity.
    pub fn parse(&self, text: &str) -> Result<AmalgamWord> {
        let mut syllables = Vec::new();
        let mut rest = text.trim();
        if rest == "1" {
            return Ok(AmalgamWord::empty());
        }
        while !rest.is_empty() {
            let side = if let Some(r) = rest.strip_prefix("A:{") {
                rest = r;
                Side::A
            } else if let Some(r) = rest.strip_prefix("B:{") {
                rest = r;
                Side::B
            } else {
                return Err(Error::Parse(format!("expected `A:{{` or `B:{{` at {rest:?}")));
            };
            let end = rest.find('}').ok_or_else(|| Error::Parse("unterminated syllable".into()))?;
            let word = self.basis(side).parse(&rest[..end])?;
            syllables.push(Syllable::new(side, word));
            rest = rest[end + 1..].trim_start();
        }
        Ok(AmalgamWord { syllables })
    }

    pub fn format(&self, w: &AmalgamWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.syllables
            .iter()
            .map(|s| format!("{}:{{{}}}", s.side.as_char(), self.basis(s.side).format(&s.word)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Exponent `k` with `w = c^k` on `side`, if any.
    pub fn c_exponent(&self, side: Side, w: &Word) -> Option<i64> {
        syllable_membership(w, self.c(side))
    }

    fn c_power(&self, side: Side, k: i64) -> Word {
        self.c(side).pow(k)
    }
}

impl fmt::Display for AmalgamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.syllables.iter().map(|s| format!("{}:{{{}}}", s.side.as_char(), s.word)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `k` with `w = c^k` in the free group, or `None`.
pub fn syllable_membership(w: &Word, c: &Word) -> Option<i64> {
    let w = w.reduce();
    if w.is_empty() {
        return Some(0);
    }
    let (c_core, c_conj) = cyclic_reduce(c);
    if c_core.is_empty() {
        return None;
    }
    // c^k = g c0^k g^-1, so test g^-1 w g against powers of c0
    let inner = c_conj.inverse().mul(&w).mul(&c_conj);
    if inner.len() % c_core.len() != 0 {
        return None;
    }
    let m = (inner.len() / c_core.len()) as i64;
    [m, -m].into_iter().find(|&k| c_core.pow(k) == inner)
}

pub fn reduce_amalgam(w: &AmalgamWord, pres: &AmalgamPresentation) -> AmalgamWord {
    let mut stack: Vec<Syllable> = Vec::new();
    for s in &w.syllables {
        let word = s.word.reduce();
        if word.is_empty() {
            continue;
        }
        let mut incoming = Syllable::new(s.side, word);
        let lone_power = match stack.as_slice() {
            [only] if only.side != incoming.side => pres.c_exponent(only.side, &only.word),
            _ => None,
        };
        match stack.last_mut() {
            Some(top) if top.side == incoming.side => {
                top.word = top.word.mul(&incoming.word);
            }
            _ => {
                if let Some(k) = lone_power {
                    // a lone amalgam power moves into the incoming syllable
                    incoming.word = pres.c_power(incoming.side, k).mul(&incoming.word);
                    stack.pop();
                }
                stack.push(incoming);
            }
        }
        settle(&mut stack, pres);
    }
    if let [only] = stack.as_mut_slice() {
        if let Some(k) = pres.c_exponent(only.side, &only.word) {
            *only = Syllable::new(Side::A, pres.c_power(Side::A, k));
        }
    }
    AmalgamWord { syllables: stack }
}

/// Restores the stack invariant after its top changed: no empty syllable and
/// no amalgam power below the top unless it stands alone.
fn settle(stack: &mut Vec<Syllable>, pres: &AmalgamPresentation) {
    loop {
        let Some(top) = stack.last() else { return };
        if top.word.is_empty() {
            stack.pop();
            continue;
        }
        if stack.len() >= 2 {
            if let Some(k) = pres.c_exponent(top.side, &top.word) {
                let side = top.side.other();
                stack.pop();
                let below = stack.last_mut().expect("len >= 2");
                debug_assert_eq!(below.side, side);
                below.word = below.word.mul(&pres.c_power(side, k));
                continue;
            }
        }
        return;
    }
}

/// True iff the word satisfies the reduced-form invariant.
pub fn is_reduced_amalgam(w: &AmalgamWord, pres: &AmalgamPresentation) -> bool {
    if w.syllables.iter().any(|s| s.word.is_empty() || !s.word.is_reduced()) {
        return false;
    }
    if !w.syllables.windows(2).all(|p| p[0].side != p[1].side) {
        return false;
    }
    match w.len() {
        0 => true,
        1 => {
            let s = &w.syllables[0];
            s.side == Side::A || pres.c_exponent(Side::B, &s.word).is_none()
        }
        _ => w.syllables.iter().all(|s| pres.c_exponent(s.side, &s.word).is_none()),
    }
}

pub fn amalgam_mul(u: &AmalgamWord, v: &AmalgamWord, pres: &AmalgamPresentation) -> AmalgamWord {
    reduce_amalgam(&u.concat(v), pres)
}

pub fn amalgam_eq(u: &AmalgamWord, v: &AmalgamWord, pres: &AmalgamPresentation) -> bool {
    reduce_amalgam(&u.inverse().concat(v), pres).is_empty()
}

/// Returns `(core, conjugator)` with `w = conjugator * core * conjugator^-1`.
pub fn cyclically_reduce_amalgam(w: &AmalgamWord, pres: &AmalgamPresentation) -> (AmalgamWord, AmalgamWord) {
    let mut core = reduce_amalgam(w, pres);
    let mut conj = AmalgamWord::empty();
    loop {
        let n = core.len();
        if n >= 3 && n % 2 == 1 {
            let first = AmalgamWord::from_syllables(vec![core.syllables[0].clone()]);
            core = reduce_amalgam(&first.inverse().concat(&core).concat(&first), pres);
            conj = conj.concat(&first);
        } else if n == 1 {
            let s = &core.syllables[0];
            let (c, g) = cyclic_reduce(&s.word);
            if !g.is_empty() {
                conj = conj.concat(&AmalgamWord::single(s.side, g));
                core = reduce_amalgam(&AmalgamWord::single(s.side, c), pres);
            }
            break;
        } else {
            break;
        }
    }
    (core, reduce_amalgam(&conj, pres))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy {
    /// `g` with `g^-1 u g = v`.
    Yes(AmalgamWord),
    No,
    Unknown,
}

impl Conjugacy {
    pub fn label(&self) -> &'static str {
        match self {
            Conjugacy::Yes(_) => "yes",
            Conjugacy::No => "no",
            Conjugacy::Unknown => "unknown",
        }
    }
}

/// `g` and `k` with `g^-1 w g = c^k` inside the free factor `side`.
fn conjugate_into_c(w: &Word, side: Side, pres: &AmalgamPresentation) -> Option<(Word, i64)> {
    let (w_core, _) = cyclic_reduce(w);
    let (c_core, _) = cyclic_reduce(pres.c(side));
    if w_core.is_empty() || w_core.len() % c_core.len() != 0 {
        return None;
    }
    let m = (w_core.len() / c_core.len()) as i64;
    [m, -m].into_iter().find_map(|k| conjugate_in_free(w, &pres.c(side).pow(k)).map(|g| (g, k)))
}

fn conjugate_single(u: &Syllable, v: &Syllable, pres: &AmalgamPresentation) -> Option<AmalgamWord> {
    if u.side == v.side {
        if let Some(g) = conjugate_in_free(&u.word, &v.word) {
            return Some(AmalgamWord::single(u.side, g));
        }
    }
    // otherwise the class must pass through the amalgamated subgroup
    let (g1, k1) = conjugate_into_c(&u.word, u.side, pres)?;
    let (g2, k2) = conjugate_into_c(&v.word, v.side, pres)?;
    if k1 != k2 {
        return None;
    }
    Some(AmalgamWord::from_syllables(vec![
        Syllable::new(u.side, g1),
        Syllable::new(v.side, g2.inverse()),
    ]))
}

/// Runs the amalgam chain for one rotation: the exponent `k0` works iff
/// every `c_i = s_i^-1 c_{i-1} s'_i` lies in the amalgamated subgroup and
/// the chain closes up at `c_0 = a^k0`.
fn chain_closes(u: &AmalgamWord, v: &AmalgamWord, k0: i64, pres: &AmalgamPresentation) -> bool {
    let mut k = k0;
    for (s, t) in u.syllables.iter().zip(&v.syllables) {
        let c = pres.c_power(s.side, k);
        let next = s.word.inverse().mul(&c).mul(&t.word);
        match pres.c_exponent(s.side, &next) {
            Some(j) => k = j,
            None => return false,
        }
    }
    k == k0
}

/// Largest `|k0|` for which the first chain step can succeed.
fn chain_bound(u: &AmalgamWord, v: &AmalgamWord, pres: &AmalgamPresentation) -> usize {
    let s = &u.syllables[0];
    let t = &v.syllables[0];
    let (core, conj) = cyclic_reduce(pres.c(s.side));
    (s.word.len() + t.word.len() + 2 * conj.len()) / core.len() + 2
}

pub fn conjugate_in_amalgam(
    u: &AmalgamWord,
    v: &AmalgamWord,
    pres: &AmalgamPresentation,
    budget: &mut Budget,
) -> Result<Conjugacy> {
    let u = reduce_amalgam(u, pres);
    let v = reduce_amalgam(v, pres);
    let (cu_core, cu) = cyclically_reduce_amalgam(&u, pres);
    let (cv_core, cv) = cyclically_reduce_amalgam(&v, pres);
    let wrap = |g0: AmalgamWord| reduce_amalgam(&cu.concat(&g0).concat(&cv.inverse()), pres);
    let verified = |g: &AmalgamWord| amalgam_eq(&g.inverse().concat(&u).concat(g), &v, pres);
    match (cu_core.len(), cv_core.len()) {
        (0, 0) => return Ok(Conjugacy::Yes(AmalgamWord::empty())),
        (0, _) | (_, 0) => return Ok(Conjugacy::No),
        (1, 1) => {
            let res = conjugate_single(&cu_core.syllables[0], &cv_core.syllables[0], pres)
                .map(wrap)
                .filter(|g| verified(g));
            return Ok(res.map_or(Conjugacy::No, Conjugacy::Yes));
        }
        (m, n) if m != n => return Ok(Conjugacy::No),
        _ => {}
    }
    let spec_bound = u.letter_count() + v.letter_count();
    let mut undecided = false;
    for r in 0..cu_core.len() {
        let rot = cu_core.rotate(r);
        if rot.syllables[0].side != cv_core.syllables[0].side {
            continue;
        }
        let needed = chain_bound(&rot, &cv_core, pres);
        if needed > spec_bound {
            undecided = true;
        }
        let bound = needed.min(spec_bound) as i64;
        for k0 in (0..=bound).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }) {
            budget.charge(rot.len() as u64, "amalgam conjugacy chain")?;
            if chain_closes(&rot, &cv_core, k0, pres) {
                let prefix = AmalgamWord::from_syllables(cu_core.syllables[..r].to_vec());
                let g0 = prefix.concat(&AmalgamWord::single(Side::A, pres.c_power(Side::A, k0)));
                let g = wrap(g0);
                if verified(&g) {
                    return Ok(Conjugacy::Yes(g));
                }
            }
        }
    }
    Ok(if undecided { Conjugacy::Unknown } else { Conjugacy::No })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSets {
    pub delta_a: Vec<Word>,
    pub delta_b: Vec<Word>,
    /// Exponent `k` with `v = u a^k`, or 0 when `u` and `v` lie in different cosets.
    pub q: i64,
}

fn push_unique(set: &mut Vec<Word>, w: Word) {
    let w = w.reduce();
    if !set.contains(&w) {
        set.push(w);
    }
}

fn side_words(w: &AmalgamWord, side: Side) -> Vec<Word> {
    w.syllables.iter().filter(|s| s.side == side).map(|s| s.word.clone()).collect()
}

/// Fills `set` with `x_i, y_j, x_i x_k^-1, y_j y_t^-1, x_i y_j^-1`.
fn pairwise(set: &mut Vec<Word>, xs: &[Word], ys: &[Word]) {
    for x in xs {
        push_unique(set, x.clone());
    }
    for y in ys {
        push_unique(set, y.clone());
    }
    for group in [xs, ys] {
        for g in group {
            for h in group {
                push_unique(set, g.mul(&h.inverse()));
            }
        }
    }
    for x in xs {
        for y in ys {
            push_unique(set, x.mul(&y.inverse()));
        }
    }
}

pub fn delta_sets(u: &AmalgamWord, v: &AmalgamWord, pres: &AmalgamPresentation) -> Result<DeltaSets> {
    let u = reduce_amalgam(u, pres);
    let v = reduce_amalgam(v, pres);
    if !u.is_alternating_even() {
        return Err(Error::UNotAlternating(pres.format(&u)));
    }
    let (ua, ub) = (side_words(&u, Side::A), side_words(&u, Side::B));
    let mut delta_a = Vec::new();
    let mut delta_b = Vec::new();
    if v.len() == 1 {
        let s = &v.syllables[0];
        for x in &ua {
            push_unique(&mut delta_a, x.clone());
        }
        for y in &ub {
            push_unique(&mut delta_b, y.clone());
        }
        match s.side {
            Side::A => push_unique(&mut delta_a, s.word.clone()),
            Side::B => push_unique(&mut delta_b, s.word.clone()),
        }
        return Ok(DeltaSets { delta_a, delta_b, q: 0 });
    }
    if !v.is_alternating_even() {
        return Err(Error::InvalidSpec(format!("v = {} is neither alternating nor one syllable", pres.format(&v))));
    }
    let diff = reduce_amalgam(&u.inverse().concat(&v), pres);
    let q = match diff.syllables.as_slice() {
        [] => 0,
        [s] => pres.c_exponent(s.side, &s.word).unwrap_or(0),
        _ => 0,
    };
    let a1 = &ua[0];
    push_unique(&mut delta_a, a1.inverse().mul(&pres.c_power(Side::A, q)).mul(a1));
    pairwise(&mut delta_a, &ua, &side_words(&v, Side::A));
    pairwise(&mut delta_b, &ub, &side_words(&v, Side::B));
    Ok(DeltaSets { delta_a, delta_b, q })
}

/// A pair of finite quotients of the two factors with `|phi(a)| = |psi(b)|`.
#[derive(Debug, Clone)]
pub struct MatchedPair {
    pub phi: FiniteQuotient,
    pub psi: FiniteQuotient,
    pub order: u64,
}

/// `image(w)` lies outside the cyclic group generated by `image(c)`.
fn outside_cyclic(img: &Perm, c_img: &Perm) -> bool {
    let ord = c_img.order();
    let mut power = Perm::identity(img.degree());
    for _ in 0..ord {
        if &power == img {
            return false;
        }
        power = power.then(c_img);
    }
    true
}

/// Checks the separation requirements on `delta` for one factor quotient.
pub fn separates_delta(graph: &crate::action_graph::ActionGraph, delta: &[Word], c: &Word) -> bool {
    let c_img = graph.image_perm(c);
    if c_img.is_identity() {
        return false;
    }
    delta.iter().all(|w| {
        let img = graph.image_perm(w);
        let nontrivial = w.is_empty() || !img.is_identity();
        let outside = syllable_membership(w, c).is_some() || outside_cyclic(&img, &c_img);
        nontrivial && outside
    })
}

fn find_separating(
    candidates: Box<dyn Iterator<Item = Candidate>>,
    delta: &[Word],
    c: &Word,
    budget: &mut Budget,
) -> Result<Candidate> {
    for cand in candidates {
        budget.charge(1 + cand.graph.degree() as u64, "delta-separating quotient")?;
        if separates_delta(&cand.graph, delta, c) {
            return Ok(cand);
        }
    }
    Err(Error::BudgetExceeded("no quotient separates the delta set".into()))
}

fn check_prime(p: u64, pres: &AmalgamPresentation) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidSpec(format!("{p} is not prime")));
    }
    let bound = pres.a.len().max(pres.b.len()) as u64;
    if p <= bound {
        return Err(Error::PTooSmall { p, bound });
    }
    Ok(())
}

fn finish_pair(
    pres: &AmalgamPresentation,
    phi: crate::action_graph::ActionGraph,
    psi: crate::action_graph::ActionGraph,
    log: Vec<String>,
) -> Result<MatchedPair> {
    let mut phi = FiniteQuotient::free(phi);
    let mut psi = FiniteQuotient::free(psi);
    let oa = phi.record(&pres.basis_a.format(&pres.a))?;
    let ob = psi.record(&pres.basis_b.format(&pres.b))?;
    if oa != ob {
        return Err(Error::OrderMismatch { a: oa, b: ob });
    }
    phi.log = log.clone();
    psi.log = log;
    Ok(MatchedPair { phi, psi, order: oa })
}

/// The matched pair built as in the classical argument: p-group quotients
/// separating the delta sets, times a quotient of the free product in which
/// `a` and `b` get equal p-power order.
pub fn matched_pair(
    u: &AmalgamWord,
    v: &AmalgamWord,
    pres: &AmalgamPresentation,
    p: u64,
    budget: &mut Budget,
) -> Result<MatchedPair> {
    check_prime(p, pres)?;
    let delta = delta_sets(u, v, pres)?;
    let phi1 = find_separating(p_group_candidates(&pres.basis_a, p, &ALL_FAMILIES, 11), &delta.delta_a, &pres.a, budget)?;
    let psi1 = find_separating(p_group_candidates(&pres.basis_b, p, &ALL_FAMILIES, 13), &delta.delta_b, &pres.b, budget)?;
    let n = phi1.graph.element_order(&pres.a).max(psi1.graph.element_order(&pres.b));
    let us = [pres.embed(Side::A, &pres.a), pres.embed(Side::B, &pres.b)];
    let eq = equalize_with(pres.combined_basis(), &us, None, p, n, budget)?;
    let (phi2, psi2) = split_free_product(&eq.quotient.graph, pres)?;
    let log = vec![
        format!("phi1: {}", phi1.label),
        format!("psi1: {}", psi1.label),
        format!("equalized |a| = |b| = {} after {} splices", eq.orders[0], eq.rounds),
    ];
    finish_pair(pres, phi1.graph.disjoint_union(&phi2)?, psi1.graph.disjoint_union(&psi2)?, log)
}

/// Restricts an action graph of the free product to each factor.
pub fn split_free_product(
    g: &crate::action_graph::ActionGraph,
    pres: &AmalgamPresentation,
) -> Result<(crate::action_graph::ActionGraph, crate::action_graph::ActionGraph)> {
    let ra = pres.basis_a.rank();
    let a = crate::action_graph::ActionGraph::from_parts(pres.basis_a.clone(), g.perms()[..ra].to_vec())?;
    let b = crate::action_graph::ActionGraph::from_parts(pres.basis_b.clone(), g.perms()[ra..].to_vec())?;
    Ok((a, b))
}

/// A compact matched pair: small separating quotients, each multiplied by a
/// quotient in which the amalgamated generator has exactly the common order.
/// The groups stay far smaller than in [`matched_pair`], which is what the
/// amalgam engine needs to build regular blocks.
pub fn matched_pair_compact(
    u: &AmalgamWord,
    v: &AmalgamWord,
    pres: &AmalgamPresentation,
    budget: &mut Budget,
) -> Result<MatchedPair> {
    let delta = delta_sets(u, v, pres)?;
    let phi1 = find_separating(small_candidates(&pres.basis_a, 12, 4), &delta.delta_a, &pres.a, budget)?;
    let psi1 = find_separating(small_candidates(&pres.basis_b, 12, 4), &delta.delta_b, &pres.b, budget)?;
    let oa = phi1.graph.element_order(&pres.a);
    let ob = psi1.graph.element_order(&pres.b);
    let l = crate::perm::lcm(oa, ob);
    let phi = if oa == l {
        phi1.graph.clone()
    } else {
        let e = exact_order_quotient(&pres.basis_a, &pres.a, l, budget)?;
        phi1.graph.disjoint_union(&e.graph)?
    };
    let psi = if ob == l {
        psi1.graph.clone()
    } else {
        let e = exact_order_quotient(&pres.basis_b, &pres.b, l, budget)?;
        psi1.graph.disjoint_union(&e.graph)?
    };
    let log = vec![format!("phi1: {}", phi1.label), format!("psi1: {}", psi1.label), format!("common order {l}")];
    finish_pair(pres, phi, psi, log)
}

/// Recomputes every matched-pair postcondition from the quotients.
pub fn check_matched_pair(pair: &MatchedPair, delta: &DeltaSets, pres: &AmalgamPresentation) -> bool {
    let oa = pair.phi.graph.element_order(&pres.a);
    let ob = pair.psi.graph.element_order(&pres.b);
    oa == ob
        && oa > 1
        && separates_delta(&pair.phi.graph, &delta.delta_a, &pres.a)
        && separates_delta(&pair.psi.graph, &delta.delta_b, &pres.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres() -> AmalgamPresentation {
        AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x", "s").unwrap()
    }

    fn aw(text: &str) -> AmalgamWord {
        pres().parse(text).unwrap()
    }

    #[test]
    fn parse_and_format_round_trip() {
        let p = pres();
        let w = aw("A:{y} B:{t^-1 t^-1}");
        assert_eq!(w.len(), 2);
        assert_eq!(p.format(&w), "A:{y} B:{t^-1 t^-1}");
        assert_eq!(p.format(&aw("1")), "1");
        assert!(p.parse("C:{y}").is_err());
        assert!(p.parse("A:{t}").is_err());
    }

    #[test]
    fn presentation_rejects_bad_input() {
        assert!(AmalgamPresentation::from_names(&["x"], &["x"], "x", "x").is_err());
        assert!(AmalgamPresentation::from_names(&["x", "y"], &["s"], "x x", "s").is_err());
        let f = pres().to_file();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("basis_A"));
        assert_eq!(AmalgamPresentation::from_json(&text).unwrap(), pres());
    }

    #[test]
    fn reduce_examples() {
        let p = pres();
        assert_eq!(reduce_amalgam(&aw("A:{x} B:{t}"), &p), aw("B:{s t}"));
        assert_eq!(reduce_amalgam(&aw("A:{y y^-1}"), &p), AmalgamWord::empty());
        assert_eq!(reduce_amalgam(&aw("A:{y} B:{t}"), &p), aw("A:{y} B:{t}"));
        // amalgam powers cascade through the neighbours
        assert_eq!(reduce_amalgam(&aw("A:{y} B:{t} B:{t^-1 s} A:{x^-1 y^-1}"), &p), AmalgamWord::empty());
        assert_eq!(reduce_amalgam(&aw("B:{s s}"), &p), aw("A:{x x}"));
    }

    #[test]
    fn cyclic_reduction_examples() {
        let p = pres();
        let (core, conj) = cyclically_reduce_amalgam(&aw("B:{t} A:{y} B:{t^-1}"), &p);
        assert_eq!(core, aw("A:{y}"));
        assert_eq!(conj, aw("B:{t}"));
        let (core, conj) = cyclically_reduce_amalgam(&aw("A:{y} B:{t}"), &p);
        assert_eq!(core, aw("A:{y} B:{t}"));
        assert!(conj.is_empty());
        let (core, conj) = cyclically_reduce_amalgam(&aw("A:{y} B:{t} A:{y^-1}"), &p);
        assert_eq!(core, aw("B:{t}"));
        assert_eq!(conj, aw("A:{y}"));
    }

    #[test]
    fn membership_examples() {
        let b = Basis::new(&["x", "y"]).unwrap();
        let xy = b.parse("x y").unwrap();
        assert_eq!(syllable_membership(&xy.pow(3), &xy), Some(3));
        assert_eq!(syllable_membership(&xy.pow(-2), &xy), Some(-2));
        assert_eq!(syllable_membership(&b.parse("y").unwrap(), &b.parse("x").unwrap()), None);
        assert_eq!(syllable_membership(&Word::empty(), &b.parse("x").unwrap()), Some(0));
        let c = b.parse("y x y^-1").unwrap();
        assert_eq!(syllable_membership(&b.parse("y x x y^-1").unwrap(), &c), Some(2));
    }

    #[test]
    fn conjugacy_examples() {
        let p = pres();
        let mut bud = Budget::default();
        let u = aw("A:{y} B:{t} A:{y y} B:{t}");
        let v = aw("A:{y y} B:{t} A:{y} B:{t}");
        let Conjugacy::Yes(g) = conjugate_in_amalgam(&u, &v, &p, &mut bud).unwrap() else {
            panic!("rotation must be conjugate")
        };
        assert!(amalgam_eq(&g.inverse().concat(&u).concat(&g), &v, &p));
        assert_eq!(conjugate_in_amalgam(&aw("A:{y}"), &aw("B:{t}"), &p, &mut bud).unwrap(), Conjugacy::No);
        assert_eq!(
            conjugate_in_amalgam(&aw("A:{y} B:{t}"), &aw("A:{y} B:{t^-1}"), &p, &mut bud).unwrap(),
            Conjugacy::No
        );
    }

    #[test]
    fn conjugacy_through_the_amalgam() {
        let p = pres();
        let mut bud = Budget::default();
        // y x y^-1 is conjugate to x = s, which is conjugate to t s t^-1
        let u = aw("A:{y x y^-1}");
        let v = aw("B:{t s t^-1}");
        let Conjugacy::Yes(g) = conjugate_in_amalgam(&u, &v, &p, &mut bud).unwrap() else { panic!() };
        assert!(amalgam_eq(&g.inverse().concat(&u).concat(&g), &v, &p));
        // conjugation by a power of the amalgamated generator
        let u = aw("A:{y} B:{t}");
        let v = aw("A:{x^-1 y} B:{t s}");
        assert!(matches!(conjugate_in_amalgam(&u, &v, &p, &mut bud).unwrap(), Conjugacy::Yes(_)));
    }

    #[test]
    fn delta_set_examples() {
        let p = pres();
        let d = delta_sets(&aw("A:{y} B:{t}"), &aw("A:{y y}"), &p).unwrap();
        let b = &p.basis_a;
        assert_eq!(d.delta_a, vec![b.parse("y").unwrap(), b.parse("y y").unwrap()]);
        assert_eq!(d.delta_b, vec![p.basis_b.parse("t").unwrap()]);

        let p3 = AmalgamPresentation::from_names(&["x", "y", "z"], &["s", "t"], "x", "s").unwrap();
        let u = p3.parse("A:{y} B:{t}").unwrap();
        let v = p3.parse("A:{z} B:{t}").unwrap();
        let d = delta_sets(&u, &v, &p3).unwrap();
        assert_eq!(d.q, 0);
        for w in ["y", "z", "y z^-1"] {
            assert!(d.delta_a.contains(&p3.basis_a.parse(w).unwrap()), "{w}");
        }
        assert!(d.delta_b.contains(&p3.basis_b.parse("t").unwrap()));

        let u = aw("A:{y} B:{t}");
        let v = reduce_amalgam(&u.concat(&aw("A:{x}")), &p);
        let d = delta_sets(&u, &v, &p).unwrap();
        assert_eq!(d.q, 1);
        assert!(d.delta_a.contains(&b.parse("y^-1 x y").unwrap()));

        assert!(matches!(delta_sets(&aw("A:{y}"), &aw("A:{y}"), &p), Err(Error::UNotAlternating(_))));
    }

    #[test]
    fn matched_pair_examples() {
        let p = pres();
        let u = aw("A:{y} B:{t}");
        let v = aw("A:{y y}");
        let mut bud = Budget::default();
        let pair = matched_pair(&u, &v, &p, 3, &mut bud).unwrap();
        let d = delta_sets(&u, &v, &p).unwrap();
        assert!(check_matched_pair(&pair, &d, &p));

        let pair = matched_pair_compact(&u, &v, &p, &mut bud).unwrap();
        assert!(check_matched_pair(&pair, &d, &p));

        let p3 = AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x y x", "s").unwrap();
        let u = p3.parse("A:{y} B:{t}").unwrap();
        assert_eq!(
            matched_pair(&u, &u, &p3, 2, &mut bud).unwrap_err(),
            Error::PTooSmall { p: 2, bound: 3 }
        );
    }
}
