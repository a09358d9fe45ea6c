#![allow(dead_code)]

use ordsep_core::{ActionGraph, AmalgamPresentation, Basis, Letter, Perm, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn xy() -> Basis {
    Basis::new(&["x", "y"]).unwrap()
}

/// `F(x, y) *_{x = s} F(s, t)`.
pub fn pres() -> AmalgamPresentation {
    AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x", "s").unwrap()
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Perm {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(rng);
    Perm::from_images(images)
}

pub fn random_graph(rng: &mut impl Rng, basis: &Basis, n: usize) -> ActionGraph {
    let perms = (0..basis.rank()).map(|_| random_perm(rng, n)).collect();
    ActionGraph::new(basis.clone(), perms).unwrap()
}

/// A nonempty reduced word of length at most `max_len`.
pub fn random_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let letters = (0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))).collect();
        let w = Word::from_letters(letters).reduce();
        if !w.is_empty() {
            return w;
        }
    }
}

/// Non-conjugate pairs covering every shape the engine distinguishes.
pub const SEPARATION_CATALOG: &[(&str, &str)] = &[
    ("A:{y}", "1"),
    ("A:{y}", "A:{y y}"),
    ("A:{y}", "B:{t}"),
    ("A:{y} B:{t}", "A:{y} B:{t^-1}"),
    ("A:{y} B:{t}", "A:{y y}"),
    ("A:{y} B:{t}", "1"),
    ("A:{y x} B:{t}", "A:{y} B:{t s}"),
    ("A:{y} B:{t} A:{y^-1} B:{t^-1}", "A:{y} B:{t}"),
];

/// Pairs conjugate by a syllable rotation or by a factor element.
pub const CONJUGATE_CATALOG: &[(&str, &str)] = &[
    ("A:{y} B:{t} A:{y y} B:{t}", "A:{y y} B:{t} A:{y} B:{t}"),
    ("A:{y} B:{t}", "B:{t} A:{y}"),
    ("A:{y}", "A:{x^-1 y x}"),
    ("A:{y}", "B:{t} A:{y} B:{t^-1}"),
    ("A:{y} B:{t}", "A:{x^-1 y} B:{t s}"),
];
