//! Vectors of permutations with per-slot provenance, and 1-local maps that
//! transform whole vectors while acting predictably on their folds.
//!
//! The fold of a vector is the left-to-right product of its elements. A
//! conjugation step multiplies the ends of the vector (`(x₁, …, x_m) ↦
//! (γ⁻¹x₁, …, x_mγ)`), a commutation step mirrors it (`(x₁, …, x_mγ,
//! x_m⁻¹, …, x₁⁻¹γ⁻¹)`); the fold becomes `γ⁻¹(Πx)γ` and `[Πx, γ]`
//! respectively, and the identity fold is preserved by both. Each output
//! slot is a constant times one input slot times a constant, which the
//! provenance tags track: this is what makes a compiled [`VectorMap`]
//! 1-local.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::transform::{convert, StepKind, TransformStep};

/// How the output length of a compiled map relates to `degree · input
/// length`. Measured worst case is 16/3 per target point (3-cycle blocks);
/// frozen as a regression bound.
pub const OUTPUT_LEN_FACTOR: usize = 6;

/// What a vector slot depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Constant times input slot `i` times constant.
    Source(usize),
    /// No input dependence at all.
    Constant,
    /// More than one input slot was folded in (compression does this).
    Mixed,
}

impl Provenance {
    fn merge(self, other: Provenance) -> Provenance {
        match (self, other) {
            (Provenance::Constant, x) => x,
            (x, Provenance::Constant) => x,
            _ => Provenance::Mixed,
        }
    }

    /// True when this slot is a function of input slot `i`.
    pub fn cites(&self, i: usize) -> bool {
        match self {
            Provenance::Source(j) => *j == i,
            Provenance::Constant => false,
            Provenance::Mixed => true,
        }
    }
}

/// A nonempty sequence of permutations of one degree, with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductVector {
    degree: usize,
    elements: Vec<Permutation>,
    tags: Vec<Provenance>,
}

impl ProductVector {
    /// Wraps raw input elements; slot `i` is tagged `Source(i)`.
    pub fn from_elements(elements: Vec<Permutation>) -> Result<ProductVector> {
        let tags = (0..elements.len()).map(Provenance::Source).collect();
        ProductVector::from_parts(elements, tags)
    }

    pub fn from_parts(elements: Vec<Permutation>, tags: Vec<Provenance>) -> Result<ProductVector> {
        if elements.is_empty() {
            return Err(Error::EmptyVector);
        }
        if elements.len() != tags.len() {
            return Err(Error::LengthMismatch {
                expected: elements.len(),
                got: tags.len(),
            });
        }
        let degree = elements[0].degree();
        for e in &elements {
            if e.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: e.degree(),
                });
            }
        }
        Ok(ProductVector {
            degree,
            elements,
            tags,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn tags(&self) -> &[Provenance] {
        &self.tags
    }

    pub fn all_even(&self) -> bool {
        self.elements.iter().all(|e| e.is_even())
    }

    /// Left-to-right product of all elements.
    pub fn fold(&self) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for e in &self.elements {
            acc = acc.compose(e).expect("uniform degree");
        }
        acc
    }

    /// Re-tags slot `i` as `Source(i)`, making this vector a fresh input.
    pub fn as_input(&self) -> ProductVector {
        ProductVector {
            degree: self.degree,
            elements: self.elements.clone(),
            tags: (0..self.elements.len()).map(Provenance::Source).collect(),
        }
    }

    /// `(x₁, …, x_m) ↦ (γ⁻¹x₁, …, x_mγ)`; fold maps to `γ⁻¹(Πx)γ` and the
    /// identity fold stays put. Tags are unchanged.
    pub fn conj_step(&self, g: &Permutation) -> Result<ProductVector> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: g.degree(),
            });
        }
        if !g.is_even() {
            return Err(Error::OddGamma);
        }
        let m = self.len();
        let mut elements = self.elements.clone();
        if m == 1 {
            elements[0] = g.inverse().compose(&elements[0])?.compose(g)?;
        } else {
            elements[0] = g.inverse().compose(&elements[0])?;
            elements[m - 1] = elements[m - 1].compose(g)?;
        }
        Ok(ProductVector {
            degree: self.degree,
            elements,
            tags: self.tags.clone(),
        })
    }

    /// `(x₁, …, x_m) ↦ (x₁, …, x_mγ, x_m⁻¹, …, x₁⁻¹γ⁻¹)`; length doubles,
    /// fold maps to `[Πx, γ]`, identity fold stays put. The mirrored half
    /// repeats the source tags in reverse, so each slot still depends on
    /// one input.
    pub fn comm_step(&self, g: &Permutation) -> Result<ProductVector> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: g.degree(),
            });
        }
        if !g.is_even() {
            return Err(Error::OddGamma);
        }
        let m = self.len();
        let mut elements = Vec::with_capacity(2 * m);
        let mut tags = Vec::with_capacity(2 * m);
        for i in 0..m - 1 {
            elements.push(self.elements[i].clone());
            tags.push(self.tags[i]);
        }
        elements.push(self.elements[m - 1].compose(g)?);
        tags.push(self.tags[m - 1]);
        for i in 0..m {
            let src = m - 1 - i;
            let mut e = self.elements[src].inverse();
            if src == 0 {
                e = e.compose(&g.inverse())?;
            }
            elements.push(e);
            tags.push(self.tags[src]);
        }
        Ok(ProductVector {
            degree: self.degree,
            elements,
            tags,
        })
    }

    /// Changes the length without changing the fold: shorter vectors pad
    /// with identities, longer ones fold runs of adjacent elements. A slot
    /// that absorbs two input-dependent elements degrades to `Mixed`.
    pub fn compress(&self, target_len: usize) -> Result<ProductVector> {
        if target_len == 0 {
            return Err(Error::EmptyVector);
        }
        let m = self.len();
        if m <= target_len {
            let mut elements = self.elements.clone();
            let mut tags = self.tags.clone();
            elements.resize(target_len, Permutation::identity(self.degree));
            tags.resize(target_len, Provenance::Constant);
            return Ok(ProductVector {
                degree: self.degree,
                elements,
                tags,
            });
        }
        let base = m / target_len;
        let rem = m % target_len;
        let mut elements = Vec::with_capacity(target_len);
        let mut tags = Vec::with_capacity(target_len);
        let mut at = 0;
        for chunk_idx in 0..target_len {
            let size = if chunk_idx < rem { base + 1 } else { base };
            let mut acc = Permutation::identity(self.degree);
            let mut tag = Provenance::Constant;
            for i in at..at + size {
                acc = acc.compose(&self.elements[i])?;
                tag = tag.merge(self.tags[i]);
            }
            elements.push(acc);
            tags.push(tag);
            at += size;
        }
        debug_assert_eq!(at, m);
        Ok(ProductVector {
            degree: self.degree,
            elements,
            tags,
        })
    }

    /// Appends another vector of the same degree (tags carried over).
    pub fn concat(&self, other: &ProductVector) -> Result<ProductVector> {
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        let mut tags = self.tags.clone();
        tags.extend_from_slice(&other.tags);
        Ok(ProductVector {
            degree: self.degree,
            elements,
            tags,
        })
    }

    /// `vector <degree> <len>` header, then one permutation per line.
    /// Tags are in-memory metadata and are not serialized; parsing yields
    /// a fresh input vector.
    pub fn to_text(&self) -> String {
        let mut out = format!("vector {} {}\n", self.degree, self.len());
        for e in &self.elements {
            out.push_str(&format!("{e}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<ProductVector> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::EmptyVector)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "vector" {
            return Err(Error::Parse(format!("bad vector header: {header}")));
        }
        let degree: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree: {}", parts[1])))?;
        let len: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad length: {}", parts[2])))?;
        let mut elements = Vec::with_capacity(len);
        for line in lines {
            elements.push(Permutation::parse(degree, line)?);
        }
        if elements.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: elements.len(),
            });
        }
        ProductVector::from_elements(elements)
    }
}

impl fmt::Display for ProductVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// One compiled unit of a [`VectorMap`]: the steps that turn an
/// alpha-product into a product of this component of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapBlock {
    component: Permutation,
    steps: Vec<TransformStep>,
}

impl MapBlock {
    pub fn component(&self) -> &Permutation {
        &self.component
    }

    pub fn steps(&self) -> &[TransformStep] {
        &self.steps
    }

    pub fn comm_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind() == StepKind::Comm)
            .count()
    }

    fn apply(&self, x: &ProductVector) -> Result<ProductVector> {
        let mut v = x.as_input();
        for step in &self.steps {
            v = match step.kind() {
                StepKind::Conj => v.conj_step(step.gamma())?,
                StepKind::Comm => v.comm_step(step.gamma())?,
            };
        }
        Ok(v)
    }
}

/// A 1-local map on product vectors: alpha-products map to beta-products,
/// identity products map to identity products, and every output slot
/// depends on at most one input slot.
///
/// One block per component of the target: each odd cycle of `beta` stands
/// alone, even-length cycles are paired off adjacently in canonical order
/// (an even count of them exists since `beta` is even). Every block reads
/// the same input vector, so output length is the sum of block outputs
/// and stays within `OUTPUT_LEN_FACTOR · degree · input_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorMap {
    degree: usize,
    input_len: usize,
    blocks: Vec<MapBlock>,
}

impl VectorMap {
    pub fn build(alpha: &Permutation, beta: &Permutation, input_len: usize) -> Result<VectorMap> {
        let t = alpha.degree();
        if beta.degree() != t {
            return Err(Error::DegreeMismatch {
                left: t,
                right: beta.degree(),
            });
        }
        if t % 4 != 2 {
            return Err(Error::DegreeNotTwoModFour { degree: t });
        }
        if alpha.is_identity() || beta.is_identity() {
            return Err(Error::IdentityElement);
        }
        if !alpha.is_even() {
            return Err(Error::OddElement("map source"));
        }
        if !beta.is_even() {
            return Err(Error::OddElement("map target"));
        }
        if input_len == 0 {
            return Err(Error::EmptyVector);
        }
        if alpha == beta {
            // Pass-through: already the right product class.
            return Ok(VectorMap {
                degree: t,
                input_len,
                blocks: vec![MapBlock {
                    component: beta.clone(),
                    steps: Vec::new(),
                }],
            });
        }

        let dec = beta.decompose();
        let mut components: Vec<Permutation> = Vec::new();
        let mut evens: Vec<Vec<usize>> = Vec::new();
        for cycle in dec.cycles() {
            if cycle.len() % 2 == 1 {
                components.push(Permutation::from_cycles(t, &[cycle.clone()])?);
            } else {
                evens.push(cycle.clone());
            }
        }
        debug_assert_eq!(evens.len() % 2, 0);
        for pair in evens.chunks(2) {
            components.push(Permutation::from_cycles(t, pair)?);
        }

        let mut blocks = Vec::with_capacity(components.len());
        for component in components {
            let script = convert(alpha, &component)?;
            blocks.push(MapBlock {
                component,
                steps: script.steps().to_vec(),
            });
        }
        Ok(VectorMap {
            degree: t,
            input_len,
            blocks,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn blocks(&self) -> &[MapBlock] {
        &self.blocks
    }

    /// Deterministic function of the build inputs alone: each block
    /// contributes `input_len · 2^comms` slots.
    pub fn output_len(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| self.input_len << b.comm_count())
            .sum()
    }

    pub fn apply(&self, x: &ProductVector) -> Result<ProductVector> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: x.degree(),
            });
        }
        if x.len() != self.input_len {
            return Err(Error::LengthMismatch {
                expected: self.input_len,
                got: x.len(),
            });
        }
        let mut out: Option<ProductVector> = None;
        for block in &self.blocks {
            let piece = block.apply(x)?;
            out = Some(match out {
                None => piece,
                Some(acc) => acc.concat(&piece)?,
            });
        }
        let out = out.expect("at least one block");
        debug_assert_eq!(out.len(), self.output_len());
        Ok(out)
    }

    /// `map <degree> <input_len> <output_len>` header, then per block a
    /// `block <component>` line followed by its step lines.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "map {} {} {}\n",
            self.degree,
            self.input_len,
            self.output_len()
        );
        for block in &self.blocks {
            out.push_str(&format!("block {}\n", block.component));
            for step in &block.steps {
                let kind = match step.kind() {
                    StepKind::Conj => "conj",
                    StepKind::Comm => "comm",
                };
                out.push_str(&format!("{kind} {} # {}\n", step.gamma(), step.label()));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<VectorMap> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty map".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "map" {
            return Err(Error::Parse(format!("bad map header: {header}")));
        }
        let degree: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree: {}", parts[1])))?;
        let input_len: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad input length: {}", parts[2])))?;
        let output_len: usize = parts[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad output length: {}", parts[3])))?;
        let mut blocks: Vec<MapBlock> = Vec::new();
        for line in lines {
            let line = line.trim();
            let (head, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad map line: {line}")))?;
            match head {
                "block" => blocks.push(MapBlock {
                    component: Permutation::parse(degree, rest.trim())?,
                    steps: Vec::new(),
                }),
                "conj" | "comm" => {
                    let block = blocks
                        .last_mut()
                        .ok_or_else(|| Error::Parse("step before any block".into()))?;
                    let (perm_text, label) = match rest.split_once('#') {
                        Some((p, l)) => (p.trim(), l.trim().to_string()),
                        None => (rest.trim(), String::new()),
                    };
                    let gamma = Permutation::parse(degree, perm_text)?;
                    block.steps.push(match head {
                        "conj" => TransformStep::conj(gamma, label)?,
                        _ => TransformStep::comm(gamma, label)?,
                    });
                }
                other => return Err(Error::Parse(format!("unknown map line: {other}"))),
            }
        }
        if blocks.is_empty() {
            return Err(Error::Parse("map has no blocks".into()));
        }
        let map = VectorMap {
            degree,
            input_len,
            blocks,
        };
        if map.output_len() != output_len {
            return Err(Error::Parse(format!(
                "header claims output length {output_len}, steps give {}",
                map.output_len()
            )));
        }
        Ok(map)
    }
}

impl fmt::Display for VectorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::random_even;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(t: usize, s: &str) -> Permutation {
        Permutation::parse(t, s).unwrap()
    }

    fn random_product_vector(
        t: usize,
        m: usize,
        product: &Permutation,
        rng: &mut ChaCha8Rng,
    ) -> ProductVector {
        // m-1 free even elements; the last one forces the fold.
        let mut elements: Vec<Permutation> = (0..m - 1).map(|_| random_even(t, rng)).collect();
        let prefix = elements
            .iter()
            .fold(Permutation::identity(t), |acc, e| acc.compose(e).unwrap());
        elements.push(prefix.inverse().compose(product).unwrap());
        ProductVector::from_elements(elements).unwrap()
    }

    #[test]
    fn conj_step_rejects_odd_gamma() {
        let v = ProductVector::from_elements(vec![p(4, "(1 2 3)"), Permutation::identity(4)])
            .unwrap();
        assert_eq!(v.conj_step(&p(4, "(1 4)")).unwrap_err(), Error::OddGamma);
    }

    #[test]
    fn conj_step_single_element() {
        let v = ProductVector::from_elements(vec![p(4, "(1 2)(3 4)")]).unwrap();
        let out = v.conj_step(&p(4, "(1 3)(2 4)")).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.fold(), p(4, "(1 2)(3 4)"));
    }

    #[test]
    fn conj_step_preserves_identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = Permutation::identity(6);
        let v = random_product_vector(6, 4, &id, &mut rng);
        let g = random_even(6, &mut rng);
        assert!(v.conj_step(&g).unwrap().fold().is_identity());
    }

    #[test]
    fn comm_step_single_element_example() {
        let v = ProductVector::from_elements(vec![p(4, "(1 2)(3 4)")]).unwrap();
        let g = p(4, "(1 2 3)");
        let out = v.comm_step(&g).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.element(0), &p(4, "(1 2)(3 4)").compose(&g).unwrap());
        assert_eq!(
            out.element(1),
            &p(4, "(1 2)(3 4)").compose(&g.inverse()).unwrap()
        );
        assert_eq!(out.fold(), p(4, "(1 4)(2 3)"));
    }

    #[test]
    fn comm_step_doubles_length_and_mirrors_tags() {
        let v = ProductVector::from_elements(vec![
            p(6, "(1 2 3)"),
            p(6, "(4 5 6)"),
            p(6, "(1 2)(3 4)"),
        ])
        .unwrap();
        let out = v.comm_step(&p(6, "(1 2 3)")).unwrap();
        assert_eq!(out.len(), 6);
        let want = [
            Provenance::Source(0),
            Provenance::Source(1),
            Provenance::Source(2),
            Provenance::Source(2),
            Provenance::Source(1),
            Provenance::Source(0),
        ];
        assert_eq!(out.tags(), &want);
    }

    #[test]
    fn comm_step_preserves_identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let id = Permutation::identity(6);
        let v = random_product_vector(6, 5, &id, &mut rng);
        let g = random_even(6, &mut rng);
        assert!(v.comm_step(&g).unwrap().fold().is_identity());
    }

    #[test]
    fn step_folds_match_element_semantics() {
        for t in [6usize, 10] {
            let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
            for _ in 0..500 {
                let m = rng.gen_range(1..6);
                let target = random_even(t, &mut rng);
                let v = if m == 1 {
                    ProductVector::from_elements(vec![target.clone()]).unwrap()
                } else {
                    random_product_vector(t, m, &target, &mut rng)
                };
                let g = random_even(t, &mut rng);
                assert_eq!(
                    v.conj_step(&g).unwrap().fold(),
                    v.fold().conjugate(&g).unwrap()
                );
                assert_eq!(
                    v.comm_step(&g).unwrap().fold(),
                    v.fold().commutator(&g).unwrap()
                );
            }
        }
    }

    #[test]
    fn map_three_cycle_to_five_cycle() {
        let alpha = p(6, "(1 2 3)");
        let beta = p(6, "(1 2 3 4 5)");
        let map = VectorMap::build(&alpha, &beta, 1).unwrap();
        let out = map
            .apply(&ProductVector::from_elements(vec![alpha.clone()]).unwrap())
            .unwrap();
        assert_eq!(out.fold(), beta);
        let id_out = map
            .apply(&ProductVector::from_elements(vec![Permutation::identity(6)]).unwrap())
            .unwrap();
        assert!(id_out.fold().is_identity());
    }

    #[test]
    fn map_single_even_pair_is_one_block() {
        let alpha = p(10, "(1 2 3)");
        let beta = p(10, "(1 2)(3 4 5 6)");
        let map = VectorMap::build(&alpha, &beta, 3).unwrap();
        assert_eq!(map.blocks().len(), 1);
        assert_eq!(map.output_len(), map.apply(
            &ProductVector::from_elements(vec![
                alpha.clone(),
                Permutation::identity(10),
                Permutation::identity(10),
            ])
            .unwrap(),
        )
        .unwrap()
        .len());
    }

    #[test]
    fn map_mixed_components_two_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alpha = p(10, "(1 2)(3 4)");
        let beta = p(10, "(1 2 3)(4 5)(6 7)");
        let m = 4;
        let map = VectorMap::build(&alpha, &beta, m).unwrap();
        assert_eq!(map.blocks().len(), 2);
        for _ in 0..200 {
            let v = random_product_vector(10, m, &alpha, &mut rng);
            assert_eq!(map.apply(&v).unwrap().fold(), beta);
        }
        let id = Permutation::identity(10);
        for _ in 0..50 {
            let v = random_product_vector(10, m, &id, &mut rng);
            assert!(map.apply(&v).unwrap().fold().is_identity());
        }
    }

    #[test]
    fn map_off_contract_products_still_apply() {
        let alpha = p(6, "(1 2 3)");
        let beta = p(6, "(1 2 3 4 5)");
        let map = VectorMap::build(&alpha, &beta, 2).unwrap();
        let stray = p(6, "(1 4)(2 5)");
        let v = ProductVector::from_elements(vec![stray, Permutation::identity(6)]).unwrap();
        let out = map.apply(&v).unwrap();
        assert_eq!(out.len(), map.output_len());
    }

    #[test]
    fn map_contract_randomized() {
        for t in [6usize, 10] {
            let mut rng = ChaCha8Rng::seed_from_u64(0x10ca1 ^ t as u64);
            let m = t;
            for _ in 0..100 {
                let mut alpha = random_even(t, &mut rng);
                while alpha.is_identity() {
                    alpha = random_even(t, &mut rng);
                }
                let mut beta = random_even(t, &mut rng);
                while beta.is_identity() {
                    beta = random_even(t, &mut rng);
                }
                let map = VectorMap::build(&alpha, &beta, m).unwrap();
                assert!(map.output_len() <= OUTPUT_LEN_FACTOR * t * m);
                for _ in 0..20 {
                    let v = random_product_vector(t, m, &alpha, &mut rng);
                    assert_eq!(map.apply(&v).unwrap().fold(), beta, "{alpha} -> {beta}");
                    let id = Permutation::identity(t);
                    let w = random_product_vector(t, m, &id, &mut rng);
                    assert!(map.apply(&w).unwrap().fold().is_identity());
                }
            }
        }
    }

    #[test]
    fn map_pass_through_when_alpha_equals_beta() {
        let alpha = p(6, "(1 2 3)");
        let map = VectorMap::build(&alpha, &alpha, 5).unwrap();
        assert_eq!(map.output_len(), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_product_vector(6, 5, &alpha, &mut rng);
        assert_eq!(map.apply(&v).unwrap().fold(), alpha);
    }

    #[test]
    fn map_rejects_identity_and_wrong_degree() {
        let id = Permutation::identity(6);
        let c = p(6, "(1 2 3)");
        assert_eq!(
            VectorMap::build(&id, &c, 2).unwrap_err(),
            Error::IdentityElement
        );
        assert_eq!(
            VectorMap::build(&c, &id, 2).unwrap_err(),
            Error::IdentityElement
        );
        let c8 = p(8, "(1 2 3)");
        assert_eq!(
            VectorMap::build(&c8, &c8, 2).unwrap_err(),
            Error::DegreeNotTwoModFour { degree: 8 }
        );
    }

    #[test]
    fn one_locality_flip_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x10c);
        let alpha = p(10, "(1 2 3 4 5)");
        let beta = p(10, "(1 2)(3 4 5 6)(7 8 9)");
        let m = 6;
        let map = VectorMap::build(&alpha, &beta, m).unwrap();
        let v = random_product_vector(10, m, &alpha, &mut rng);
        let out = map.apply(&v).unwrap();
        for flip in 0..m {
            let mut elements = v.elements().to_vec();
            elements[flip] = random_even(10, &mut rng);
            let v2 = ProductVector::from_elements(elements).unwrap();
            let out2 = map.apply(&v2).unwrap();
            assert_eq!(out.len(), out2.len());
            for i in 0..out.len() {
                if out.element(i) != out2.element(i) {
                    assert_eq!(out.tags()[i], Provenance::Source(flip));
                }
                if !out.tags()[i].cites(flip) {
                    assert_eq!(out.element(i), out2.element(i));
                }
            }
        }
    }

    #[test]
    fn compress_halves_and_preserves_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let target = random_even(6, &mut rng);
        let v = random_product_vector(6, 6, &target, &mut rng);
        let c = v.compress(3).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.fold(), target);
    }

    #[test]
    fn compress_pads_with_identity_constants() {
        let v = ProductVector::from_elements(vec![p(4, "(1 2 3)"), p(4, "(1 2)(3 4)")]).unwrap();
        let c = v.compress(4).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.element(2).is_identity());
        assert!(c.element(3).is_identity());
        assert_eq!(c.tags()[2], Provenance::Constant);
        assert_eq!(c.fold(), v.fold());
    }

    #[test]
    fn compress_long_vector_keeps_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let target = random_even(10, &mut rng);
        let v = random_product_vector(10, 22, &target, &mut rng);
        let c = v.compress(10).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.fold(), target);
    }

    #[test]
    fn compress_merged_tags_become_mixed() {
        let v = ProductVector::from_parts(
            vec![
                p(4, "(1 2 3)"),
                Permutation::identity(4),
                p(4, "(1 2)(3 4)"),
                p(4, "(1 3 2)"),
            ],
            vec![
                Provenance::Source(0),
                Provenance::Constant,
                Provenance::Source(1),
                Provenance::Source(2),
            ],
        )
        .unwrap();
        let c = v.compress(2).unwrap();
        // Chunks: [0,1] and [2,3].
        assert_eq!(c.tags()[0], Provenance::Source(0));
        assert_eq!(c.tags()[1], Provenance::Mixed);
    }

    #[test]
    fn vector_text_round_trip() {
        let v = ProductVector::from_elements(vec![
            p(6, "(1 2 3)"),
            Permutation::identity(6),
            p(6, "(1 2)(3 4)"),
        ])
        .unwrap();
        let parsed = ProductVector::parse(&v.to_text()).unwrap();
        assert_eq!(parsed.elements(), v.elements());
    }

    #[test]
    fn map_text_round_trip() {
        let alpha = p(6, "(1 2 3)");
        let beta = p(6, "(1 2)(3 4 5 6)");
        let map = VectorMap::build(&alpha, &beta, 2).unwrap();
        let parsed = VectorMap::parse(&map.to_text()).unwrap();
        assert_eq!(parsed, map);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_product_vector(6, 2, &alpha, &mut rng);
        assert_eq!(parsed.apply(&v).unwrap().fold(), beta);
    }

    #[test]
    fn empty_vector_rejected() {
        assert_eq!(
            ProductVector::from_elements(vec![]).unwrap_err(),
            Error::EmptyVector
        );
    }
}
