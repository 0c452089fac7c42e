//! Permutations of `{1, .., t}` with an explicit degree.
//!
//! Composition reads left to right: `a.compose(&b)` applies `a` first, so
//! `(a·b)(i) = b(a(i))`. The commutator is `[a, g] = a·g·a⁻¹·g⁻¹` and
//! conjugation is `conjugate(a, g) = g⁻¹·a·g`, which relabels every cycle
//! `(p₁ p₂ …)` of `a` into `(g(p₁) g(p₂) …)`. All public entry points take
//! and return 1-based points; the degree is always explicit and is never
//! inferred from the largest moved point.
//!
//! Two textual forms are supported: cycle notation `(1 2)(3 4)` with `()`
//! for the identity, and image lists `[2,1,4,3]`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Sign of a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_cycle_len(len: usize) -> Parity {
        if len % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// A permutation of `{1, .., t}`, stored as the list of images of
/// `1, 2, .., t` in order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            image: (1..=degree).collect(),
        }
    }

    /// Builds from a 1-based image list; rejects anything that is not a
    /// bijection of `{1, .., t}`.
    pub fn from_images(image: Vec<usize>) -> Result<Permutation> {
        let t = image.len();
        let mut seen = vec![false; t];
        for &v in &image {
            if v == 0 || v > t {
                return Err(Error::MalformedImage(format!(
                    "value {v} out of range 1..={t}"
                )));
            }
            if seen[v - 1] {
                return Err(Error::MalformedImage(format!("value {v} repeats")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds from disjoint cycles over `{1, .., degree}`. Singleton cycles
    /// are accepted and ignored.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Permutation> {
        let mut image: Vec<usize> = (1..=degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p == 0 || p > degree {
                    return Err(Error::PointOutOfRange { point: p, degree });
                }
                if touched[p - 1] {
                    return Err(Error::MalformedCycles(format!("point {p} repeats")));
                }
                touched[p - 1] = true;
            }
            if cycle.len() < 2 {
                continue;
            }
            for i in 0..cycle.len() {
                image[cycle[i] - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { image })
    }

    /// Convenience for a single cycle.
    pub fn cycle(degree: usize, points: &[usize]) -> Result<Permutation> {
        Permutation::from_cycles(degree, &[points.to_vec()])
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// Image of a 1-based point.
    pub fn apply(&self, point: usize) -> usize {
        self.image[point - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Left-to-right composition: apply `self`, then `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Permutation {
            image: self.image.iter().map(|&v| other.image[v - 1]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.degree()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v - 1] = i + 1;
        }
        Permutation { image }
    }

    pub fn power(&self, mut k: usize) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("equal degrees");
            }
            base = base.compose(&base).expect("equal degrees");
            k >>= 1;
        }
        acc
    }

    /// `[self, g] = self·g·self⁻¹·g⁻¹`.
    pub fn commutator(&self, g: &Permutation) -> Result<Permutation> {
        self.compose(g)?
            .compose(&self.inverse())?
            .compose(&g.inverse())
    }

    /// `g⁻¹·self·g`: relabels each cycle `(p₁ p₂ …)` to `(g(p₁) g(p₂) …)`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Permutation> {
        g.inverse().compose(self)?.compose(g)
    }

    /// Parity from the cycle count: `(t - #cycles) mod 2`, counting fixed
    /// points as cycles.
    pub fn parity(&self) -> Parity {
        let t = self.degree();
        let mut seen = vec![false; t];
        let mut cycles = 0;
        for start in 0..t {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.image[p] - 1;
            }
        }
        if (t - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity by counting inversions of the image word; used as an
    /// independent cross-check of [`Permutation::parity`].
    pub fn parity_by_inversions(&self) -> Parity {
        let mut inversions = 0usize;
        for i in 0..self.image.len() {
            for j in i + 1..self.image.len() {
                if self.image[i] > self.image[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Points not fixed, ascending.
    pub fn moved_points(&self) -> Vec<usize> {
        self.image
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v != i + 1)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn moved_count(&self) -> usize {
        self.image
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v != i + 1)
            .count()
    }

    /// Canonical cycle decomposition (fixed points omitted).
    pub fn decompose(&self) -> CycleDecomposition {
        let t = self.degree();
        let mut seen = vec![false; t];
        let mut cycles = Vec::new();
        for start in 0..t {
            if seen[start] || self.image[start] == start + 1 {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p + 1);
                p = self.image[p] - 1;
            }
            cycles.push(cycle);
        }
        CycleDecomposition { degree: t, cycles }
    }

    /// Same mapping on a larger degree; new points are fixed.
    pub fn extend(&self, degree: usize) -> Result<Permutation> {
        if degree < self.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: degree,
            });
        }
        let mut image = self.image.clone();
        image.extend(self.degree() + 1..=degree);
        Ok(Permutation { image })
    }

    /// Parses either cycle notation or an image list, against an explicit
    /// degree.
    pub fn parse(degree: usize, s: &str) -> Result<Permutation> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty permutation literal".into()));
        }
        if s.starts_with('[') {
            if !s.ends_with(']') {
                return Err(Error::Parse(format!("unterminated image list: {s}")));
            }
            let inner = &s[1..s.len() - 1];
            let mut image = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    return Err(Error::Parse("empty entry in image list".into()));
                }
                let v: usize = part
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad image value: {part}")))?;
                image.push(v);
            }
            if image.len() != degree {
                return Err(Error::Parse(format!(
                    "image list has {} entries, degree is {degree}",
                    image.len()
                )));
            }
            return Permutation::from_images(image);
        }
        // Cycle notation: a sequence of parenthesised point lists.
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(Error::Parse(format!("expected '(' in: {rest}")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unterminated cycle in: {rest}")))?;
            let body = &rest[1..close];
            let mut cycle = Vec::new();
            for tok in body.split_whitespace() {
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point: {tok}")))?;
                cycle.push(p);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = &rest[close + 1..];
        }
        Permutation::from_cycles(degree, &cycles)
    }

    /// Image-list form, e.g. `[2,1,4,3]`.
    pub fn to_image_string(&self) -> String {
        let parts: Vec<String> = self.image.iter().map(|v| v.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decompose())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.degree())
    }
}

/// Disjoint cycles in canonical form: each cycle starts at its smallest
/// point, cycles are ordered by first point, fixed points are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    degree: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    /// Validates and canonicalises raw cycles. Singleton cycles are dropped.
    pub fn new(degree: usize, cycles: Vec<Vec<usize>>) -> Result<CycleDecomposition> {
        let mut touched = vec![false; degree];
        for cycle in &cycles {
            for &p in cycle {
                if p == 0 || p > degree {
                    return Err(Error::MalformedCycles(format!(
                        "point {p} out of range 1..={degree}"
                    )));
                }
                if touched[p - 1] {
                    return Err(Error::MalformedCycles(format!("point {p} repeats")));
                }
                touched[p - 1] = true;
            }
        }
        let mut canon: Vec<Vec<usize>> = cycles
            .into_iter()
            .filter(|c| c.len() >= 2)
            .map(|c| {
                let min_pos = c
                    .iter()
                    .enumerate()
                    .min_by_key(|&(_, &p)| p)
                    .map(|(i, _)| i)
                    .unwrap();
                let mut rotated = c[min_pos..].to_vec();
                rotated.extend_from_slice(&c[..min_pos]);
                rotated
            })
            .collect();
        canon.sort_by_key(|c| c[0]);
        Ok(CycleDecomposition {
            degree,
            cycles: canon,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Multiset of nontrivial cycle lengths, ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles.iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        lens
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.degree, &self.cycles).expect("validated on construction")
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in &self.cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A witness `g` with `conjugate(a, g) = b`, found by aligning the two
/// canonical decompositions length group by length group.
pub fn conjugator_in_s(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    let t = a.degree();
    let da = a.decompose();
    let db = b.decompose();
    let mut by_len_a: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    let mut by_len_b: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for c in da.cycles() {
        by_len_a.entry(c.len()).or_default().push(c);
    }
    for c in db.cycles() {
        by_len_b.entry(c.len()).or_default().push(c);
    }
    if by_len_a.len() != by_len_b.len()
        || by_len_a
            .iter()
            .zip(by_len_b.iter())
            .any(|((la, va), (lb, vb))| la != lb || va.len() != vb.len())
    {
        return Err(Error::NotConjugate);
    }
    let mut image = vec![0usize; t];
    for (len, ca) in &by_len_a {
        for (cycle_a, cycle_b) in ca.iter().zip(&by_len_b[len]) {
            for (&p, &q) in cycle_a.iter().zip(cycle_b.iter()) {
                image[p - 1] = q;
            }
        }
    }
    let fixed_a: Vec<usize> = (1..=t).filter(|&p| a.apply(p) == p).collect();
    let fixed_b: Vec<usize> = (1..=t).filter(|&p| b.apply(p) == p).collect();
    for (&p, &q) in fixed_a.iter().zip(fixed_b.iter()) {
        image[p - 1] = q;
    }
    let g = Permutation::from_images(image).expect("alignment is a bijection");
    debug_assert_eq!(a.conjugate(&g).unwrap(), *b);
    Ok(g)
}

/// An element of odd parity commuting with `a`, if one exists: either an
/// even-length cycle of `a` taken as a permutation, or the swap of two
/// same-length cycles (fixed points count as length-1 cycles).
fn odd_centralizer_element(a: &Permutation) -> Option<Permutation> {
    let t = a.degree();
    let dec = a.decompose();
    for c in dec.cycles() {
        if c.len() % 2 == 0 {
            return Some(Permutation::from_cycles(t, &[c.clone()]).expect("cycle of a"));
        }
    }
    let mut blocks: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for c in dec.cycles() {
        blocks.entry(c.len()).or_default().push(c.clone());
    }
    for p in 1..=t {
        if a.apply(p) == p {
            blocks.entry(1).or_default().push(vec![p]);
        }
    }
    for (len, group) in &blocks {
        // All lengths here are odd, so the block swap is len transpositions
        // and therefore odd.
        if len % 2 == 1 && group.len() >= 2 {
            let mut image: Vec<usize> = (1..=t).collect();
            for (&p, &q) in group[0].iter().zip(group[1].iter()) {
                image[p - 1] = q;
                image[q - 1] = p;
            }
            let swap = Permutation::from_images(image).expect("pairwise swap");
            debug_assert_eq!(swap.parity(), Parity::Odd);
            debug_assert_eq!(a.conjugate(&swap).unwrap(), *a);
            return Some(swap);
        }
    }
    None
}

/// Like [`conjugator_in_s`] but the witness is even. Fails with
/// `NotConjugateInA` when the class splits (all cycle lengths distinct and
/// odd, counting fixed points) and the straightened witness is odd.
pub fn conjugator_in_a(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    if !a.is_even() {
        return Err(Error::OddElement("conjugator_in_a source"));
    }
    if !b.is_even() {
        return Err(Error::OddElement("conjugator_in_a target"));
    }
    let g = conjugator_in_s(a, b)?;
    if g.is_even() {
        return Ok(g);
    }
    match odd_centralizer_element(a) {
        Some(c) => {
            let repaired = c.compose(&g).expect("equal degrees");
            debug_assert!(repaired.is_even());
            debug_assert_eq!(a.conjugate(&repaired).unwrap(), *b);
            Ok(repaired)
        }
        None => Err(Error::NotConjugateInA),
    }
}

/// Uniform element of the alternating group: shuffle, then repair parity by
/// swapping the images of 1 and 2 (a bijection between odd and even
/// outcomes, so uniformity is preserved).
pub fn random_even<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Permutation {
    let mut image: Vec<usize> = (1..=degree).collect();
    image.shuffle(rng);
    let mut p = Permutation { image };
    if p.parity() == Parity::Odd {
        p.image.swap(0, 1);
    }
    p
}

/// All `t!` permutations of degree `t`, in lexicographic image order.
pub fn all_permutations(degree: usize) -> impl Iterator<Item = Permutation> {
    itertools::Itertools::permutations(1..=degree, degree)
        .map(|image| Permutation { image })
}

/// All elements of the alternating group of degree `t`.
pub fn all_even(degree: usize) -> impl Iterator<Item = Permutation> {
    all_permutations(degree).filter(|p| p.is_even())
}
