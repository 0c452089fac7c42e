//! Reductions between product problems.
//!
//! Stage one turns a compiled branching-program instance into a list of
//! product vectors such that the program accepts exactly when some vector
//! multiplies to the identity: take the powers of the compiled
//! permutation, wrap each in a gadget that converts "the product sends
//! point 1 to the last point" into "the product is the identity", shorten
//! back, and embed everything into an alternating group two points up.
//!
//! Stage two turns "is the product the identity" into the promise problem
//! "is the product (1 2)(3 4) or the identity": wrap the vector in two
//! commutator steps and a conjugation step drawn from a candidate stream.
//! When the product was the identity every candidate yields the identity;
//! when it was not, some candidate lands exactly on (1 2)(3 4). Deciders
//! are abstract; the exact-fold decider here is the reference oracle.

use itertools::Itertools;
use rayon::prelude::*;
use std::fmt;

use crate::bp::{self, BranchingProgram};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::product::{ProductVector, Provenance};
use crate::transform;

/// The k-th vector (k = 1..=t) holds k copies of `sigma` padded with
/// identities to length t, so its product is `sigma^k`. If point 1
/// reaches point t on sigma's cycle, it does so within t steps.
pub fn power_vectors(sigma: &Permutation) -> Vec<ProductVector> {
    let t = sigma.degree();
    let id = Permutation::identity(t);
    (1..=t)
        .map(|k| {
            let mut elements = vec![sigma.clone(); k];
            elements.resize(t, id.clone());
            ProductVector::from_elements(elements).expect("t >= 1 uniform degree")
        })
        .collect()
}

/// Appends `(t t+1)`, the reversed elementwise inverses, and `(1 t+1)`,
/// all over degree t+1. The output multiplies to the identity exactly
/// when the input's product sends 1 to t; otherwise the output's product
/// sends 1 to t+1. Length grows from m to 2m+2.
pub fn maps_1_to_t_gadget(z: &ProductVector) -> Result<ProductVector> {
    let t = z.degree();
    let m = z.len();
    let mut elements = Vec::with_capacity(2 * m + 2);
    let mut tags = Vec::with_capacity(2 * m + 2);
    for i in 0..m {
        elements.push(z.element(i).extend(t + 1)?);
        tags.push(z.tags()[i]);
    }
    elements.push(Permutation::cycle(t + 1, &[t, t + 1])?);
    tags.push(Provenance::Constant);
    for i in (0..m).rev() {
        elements.push(z.element(i).inverse().extend(t + 1)?);
        tags.push(z.tags()[i]);
    }
    elements.push(Permutation::cycle(t + 1, &[1, t + 1])?);
    tags.push(Provenance::Constant);
    ProductVector::from_parts(elements, tags)
}

/// Doubles odd permutations with a swap of the two new top points, making
/// every image even without disturbing products of the originals.
pub fn embed_even_element(p: &Permutation) -> Result<Permutation> {
    let t = p.degree();
    let wide = p.extend(t + 2)?;
    if wide.is_even() {
        Ok(wide)
    } else {
        wide.compose(&Permutation::cycle(t + 2, &[t + 1, t + 2])?)
    }
}

/// Elementwise [`embed_even_element`]; a product is the identity before
/// exactly when it is after.
pub fn embed_even(v: &ProductVector) -> Result<ProductVector> {
    let elements = v
        .elements()
        .iter()
        .map(embed_even_element)
        .collect::<Result<Vec<_>>>()?;
    ProductVector::from_parts(elements, v.tags().to_vec())
}

/// The full first-stage chain. With t' the compiled degree, each output
/// vector has length t'+1 over degree t'+3, every element is even, and
/// the program accepts the input exactly when at least one vector
/// multiplies to the identity.
pub fn bp_to_id_instances(b: &BranchingProgram, x: &[bool]) -> Result<Vec<ProductVector>> {
    let inst = bp::encode(b, x)?;
    let tp = inst.degree();
    power_vectors(inst.sigma())
        .iter()
        .map(|pv| {
            let padded = maps_1_to_t_gadget(pv)?;
            let short = padded.compress(tp + 1)?;
            embed_even(&short)
        })
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The rank-th k-subset of {1..t} in lexicographic order.
fn unrank_subset(t: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut cur = 1usize;
    for j in 0..k {
        loop {
            let with_cur = binomial((t - cur) as u64, (k - 1 - j) as u64);
            if rank < with_cur {
                break;
            }
            rank -= with_cur;
            cur += 1;
        }
        out.push(cur);
        cur += 1;
    }
    out
}

/// Double-transpositions first (three patterns per 4-subset), then
/// 3-cycles (two per 3-subset), both in lexicographic subset order.
pub fn candidate_element_count(t: usize) -> u64 {
    3 * binomial(t as u64, 4) + 2 * binomial(t as u64, 3)
}

pub fn candidate_element(t: usize, index: u64) -> Result<Permutation> {
    let dts = 3 * binomial(t as u64, 4);
    if index < dts {
        let s = unrank_subset(t, 4, index / 3);
        let (a, b, c, d) = (s[0], s[1], s[2], s[3]);
        let pairs = match index % 3 {
            0 => [[a, b], [c, d]],
            1 => [[a, c], [b, d]],
            _ => [[a, d], [b, c]],
        };
        Permutation::from_cycles(t, &[pairs[0].to_vec(), pairs[1].to_vec()])
    } else {
        let rest = index - dts;
        if rest >= 2 * binomial(t as u64, 3) {
            return Err(Error::BadShape(format!(
                "candidate index {index} out of range for degree {t}"
            )));
        }
        let s = unrank_subset(t, 3, rest / 2);
        let cycle = match rest % 2 {
            0 => vec![s[0], s[1], s[2]],
            _ => vec![s[0], s[2], s[1]],
        };
        Permutation::from_cycles(t, &[cycle])
    }
}

pub fn candidate_pair_count(t: usize) -> u64 {
    let e = candidate_element_count(t);
    e * e
}

/// Pair `index` in the nested lexicographic order over element indices.
pub fn candidate_pair(t: usize, index: u64) -> Result<(Permutation, Permutation)> {
    let e = candidate_element_count(t);
    if index >= e * e {
        return Err(Error::BadShape(format!(
            "candidate pair index {index} out of range for degree {t}"
        )));
    }
    Ok((
        candidate_element(t, index / e)?,
        candidate_element(t, index % e)?,
    ))
}

/// All even permutations moving at most 8 points, grouped by moved-point
/// set: the identity, then every derangement-style assignment of each
/// subset of size 3..=8 that is even. Meant for small degrees; the pool
/// explodes beyond that.
pub fn gamma3_candidates(t: usize) -> Result<Vec<Permutation>> {
    if t > 10 {
        return Err(Error::BudgetExceeded(format!(
            "conjugator enumeration is only supported for degree <= 10, got {t}"
        )));
    }
    let mut out = vec![Permutation::identity(t)];
    for w in 3..=8.min(t) {
        for subset in (1..=t).combinations(w) {
            for arrangement in subset.iter().copied().permutations(w) {
                if arrangement.iter().zip(&subset).any(|(a, s)| a == s) {
                    continue;
                }
                let mut image: Vec<usize> = (1..=t).collect();
                for (s, a) in subset.iter().zip(&arrangement) {
                    image[s - 1] = *a;
                }
                let p = Permutation::from_images(image)?;
                if p.is_even() {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// An even conjugator moving at most 8 points that relabels the given
/// double-transposition to (1 2)(3 4): send its support to 1..4, pair the
/// rest of the touched window off in order, and repair parity inside the
/// window with a swap that commutes with the input.
pub fn small_conjugator_to_1234(alpha: &Permutation) -> Result<Permutation> {
    let decomp = alpha.decompose();
    if decomp.cycle_type() != [2, 2] {
        return Err(Error::BadShape(format!(
            "expected a double-transposition, got {alpha}"
        )));
    }
    let t = alpha.degree();
    let xs: Vec<usize> = decomp.cycles().iter().flatten().copied().collect();
    let mut window: Vec<usize> = (1..=4).chain(xs.iter().copied()).collect();
    window.sort_unstable();
    window.dedup();
    let mut image: Vec<usize> = (1..=t).collect();
    for (i, &x) in xs.iter().enumerate() {
        image[x - 1] = i + 1;
    }
    let spare_domain = window.iter().filter(|p| !xs.contains(p));
    let spare_range = window.iter().filter(|p| **p > 4);
    for (d, r) in spare_domain.zip(spare_range) {
        image[d - 1] = *r;
    }
    let mut g = Permutation::from_images(image)?;
    if !g.is_even() {
        g = Permutation::cycle(t, &[xs[0], xs[1]])?.compose(&g)?;
    }
    debug_assert!(g.moved_count() <= 8);
    debug_assert_eq!(
        alpha.conjugate(&g).unwrap(),
        canonical_double_transposition(t).unwrap()
    );
    Ok(g)
}

/// (1 2)(3 4) at the given degree: the fixed non-identity product every
/// second-stage candidate aims for.
pub fn canonical_double_transposition(t: usize) -> Result<Permutation> {
    Permutation::from_cycles(t, &[vec![1, 2], vec![3, 4]])
}

/// Two commutator layers and one conjugation layer around a product
/// vector. The first two entries must each be a double-transposition or a
/// 3-cycle; the third must be even and move at most 8 points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaTuple {
    gamma1: Permutation,
    gamma2: Permutation,
    gamma3: Permutation,
}

impl GammaTuple {
    pub fn new(gamma1: Permutation, gamma2: Permutation, gamma3: Permutation) -> Result<GammaTuple> {
        for g in [&gamma1, &gamma2] {
            let ct = g.decompose().cycle_type();
            if ct != [2, 2] && ct != [3] {
                return Err(Error::BadShape(format!(
                    "commutator entry must be a double-transposition or 3-cycle, got {g}"
                )));
            }
        }
        if !gamma3.is_even() {
            return Err(Error::OddElement("conjugator entry"));
        }
        if gamma3.moved_count() > 8 {
            return Err(Error::BadShape(format!(
                "conjugator entry moves {} points, limit is 8",
                gamma3.moved_count()
            )));
        }
        for g in [&gamma2, &gamma3] {
            if g.degree() != gamma1.degree() {
                return Err(Error::DegreeMismatch {
                    left: gamma1.degree(),
                    right: g.degree(),
                });
            }
        }
        Ok(GammaTuple {
            gamma1,
            gamma2,
            gamma3,
        })
    }

    pub fn gamma1(&self) -> &Permutation {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &Permutation {
        &self.gamma2
    }

    pub fn gamma3(&self) -> &Permutation {
        &self.gamma3
    }

    pub fn degree(&self) -> usize {
        self.gamma1.degree()
    }
}

impl fmt::Display for GammaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g1={} g2={} g3={}",
            self.gamma1, self.gamma2, self.gamma3
        )
    }
}

/// Wraps `x` in the tuple's layers and shortens back to the input length,
/// so the result has the same shape as `x` and multiplies to
/// `g3^-1 [[Πx, g1], g2] g3`.
pub fn apply_candidate(x: &ProductVector, g: &GammaTuple) -> Result<ProductVector> {
    x.comm_step(g.gamma1())?
        .comm_step(g.gamma2())?
        .conj_step(g.gamma3())?
        .compress(x.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Promise {
    Alpha,
    Id,
    Unknown,
}

impl fmt::Display for Promise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Promise::Alpha => write!(f, "alpha"),
            Promise::Id => write!(f, "id"),
            Promise::Unknown => write!(f, "unknown"),
        }
    }
}

/// A promise-problem instance: decide whether the vector multiplies to
/// (1 2)(3 4) or to the identity. The tag states which branch holds (or
/// that nothing is promised) and is checked at construction.
#[derive(Debug, Clone)]
pub struct SingleElementInstance {
    vector: ProductVector,
    promise: Promise,
}

impl SingleElementInstance {
    pub fn new(vector: ProductVector, promise: Promise) -> Result<SingleElementInstance> {
        let ok = match promise {
            Promise::Alpha => {
                vector.fold() == canonical_double_transposition(vector.degree())?
            }
            Promise::Id => vector.fold().is_identity(),
            Promise::Unknown => true,
        };
        if !ok {
            return Err(Error::BadShape(format!(
                "promise tag {promise} disagrees with the product"
            )));
        }
        Ok(SingleElementInstance { vector, promise })
    }

    pub fn vector(&self) -> &ProductVector {
        &self.vector
    }

    pub fn promise(&self) -> Promise {
        self.promise
    }

    pub fn into_vector(self) -> ProductVector {
        self.vector
    }
}

/// What a decider claims about an instance's product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleAnswer {
    Alpha,
    Id,
}

/// The reference oracle: folds the vector and compares.
pub fn exact_fold_decider(
    t: usize,
) -> Result<impl Fn(&SingleElementInstance) -> SingleAnswer + Sync> {
    let target = canonical_double_transposition(t)?;
    Ok(move |inst: &SingleElementInstance| {
        if inst.vector().fold() == target {
            SingleAnswer::Alpha
        } else {
            SingleAnswer::Id
        }
    })
}

/// How the candidate stream fills the conjugator slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateMode {
    /// Derive the conjugator from the wrapped product (and try a directly
    /// constructed witness first). The practical mode.
    Derive,
    /// Enumerate conjugators too, identity first; no constructed witness.
    /// Kept for fidelity experiments at small degree.
    ExhaustiveGamma3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Built directly from the product, outside the enumeration order.
    Derived,
    /// Found at this index of the candidate stream.
    Enumerated(u64),
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    /// True when some candidate was decided as (1 2)(3 4); for a sound
    /// decider this means the input's product was not the identity.
    pub nonidentity: bool,
    pub witness: Option<(WitnessKind, GammaTuple)>,
    /// Candidates up to and including the witness, or the whole budget
    /// when none hit; deterministic regardless of worker count.
    pub examined: u64,
}

fn tuple_at(
    t: usize,
    alpha: &Permutation,
    index: u64,
    pool: Option<&[Permutation]>,
) -> GammaTuple {
    let (pair_index, gamma3) = match pool {
        Some(pool) => {
            let pairs = candidate_pair_count(t);
            (
                index % pairs,
                pool[(index / pairs) as usize].clone(),
            )
        }
        None => (index, Permutation::identity(t)),
    };
    let (g1, g2) = candidate_pair(t, pair_index).expect("index in range");
    let gamma3 = if pool.is_some() {
        gamma3
    } else {
        let wrapped = alpha
            .commutator(&g1)
            .and_then(|c| c.commutator(&g2))
            .expect("uniform degree");
        if wrapped.decompose().cycle_type() == [2, 2] {
            small_conjugator_to_1234(&wrapped).expect("shape checked")
        } else {
            gamma3
        }
    };
    GammaTuple::new(g1, g2, gamma3).expect("stream shapes are valid")
}

fn candidate_instance(x: &ProductVector, alpha: &Permutation, tuple: &GammaTuple) -> SingleElementInstance {
    let expected = alpha
        .commutator(tuple.gamma1())
        .and_then(|c| c.commutator(tuple.gamma2()))
        .and_then(|c| c.conjugate(tuple.gamma3()))
        .expect("uniform degree");
    let promise = if expected == canonical_double_transposition(x.degree()).expect("degree >= 4") {
        Promise::Alpha
    } else if expected.is_identity() {
        Promise::Id
    } else {
        Promise::Unknown
    };
    let vector = apply_candidate(x, tuple).expect("tuple degree matches");
    SingleElementInstance::new(vector, promise).expect("promise computed from the product")
}

/// Decides whether `x` multiplies to the identity by asking the decider
/// about wrapped candidates and OR-ing the answers, up to `budget`
/// candidates in a fixed stream order. In [`CandidateMode::Derive`] a
/// witness built directly from the product is tried first, so a sound
/// decider answers without touching the stream whenever the product is
/// not the identity.
pub fn reduce_id_to_single<D>(
    x: &ProductVector,
    decider: &D,
    budget: u64,
    mode: CandidateMode,
) -> Result<ReductionOutcome>
where
    D: Fn(&SingleElementInstance) -> SingleAnswer + Sync,
{
    let t = x.degree();
    if t < 8 {
        return Err(Error::DegreeTooSmall { degree: t, min: 8 });
    }
    if x.len() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            got: x.len(),
        });
    }
    if !x.all_even() {
        return Err(Error::OddElement("product vector entry"));
    }
    let alpha = x.fold();

    if mode == CandidateMode::Derive && !alpha.is_identity() {
        let script = transform::to_double_transposition(&alpha)?;
        let g1 = script.steps()[0].gamma().clone();
        let g2 = script.steps()[1].gamma().clone();
        let g3 = small_conjugator_to_1234(script.target())?;
        let tuple = GammaTuple::new(g1, g2, g3)?;
        let inst = candidate_instance(x, &alpha, &tuple);
        debug_assert_eq!(inst.promise(), Promise::Alpha);
        if decider(&inst) == SingleAnswer::Alpha {
            return Ok(ReductionOutcome {
                nonidentity: true,
                witness: Some((WitnessKind::Derived, tuple)),
                examined: 1,
            });
        }
    }

    let pool = match mode {
        CandidateMode::Derive => None,
        CandidateMode::ExhaustiveGamma3 => Some(gamma3_candidates(t)?),
    };
    let total = match &pool {
        Some(pool) => candidate_pair_count(t).saturating_mul(pool.len() as u64),
        None => candidate_pair_count(t),
    };
    let limit = budget.min(total);
    let hit = (0..limit).into_par_iter().find_first(|&index| {
        let tuple = tuple_at(t, &alpha, index, pool.as_deref());
        decider(&candidate_instance(x, &alpha, &tuple)) == SingleAnswer::Alpha
    });
    Ok(match hit {
        Some(index) => ReductionOutcome {
            nonidentity: true,
            witness: Some((
                WitnessKind::Enumerated(index),
                tuple_at(t, &alpha, index, pool.as_deref()),
            )),
            examined: index + 1,
        },
        None => ReductionOutcome {
            nonidentity: false,
            witness: None,
            examined: limit,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{random_program, Decision};
    use crate::perm::{all_even, all_permutations, random_even};
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_perm<R: Rng>(t: usize, rng: &mut R) -> Permutation {
        let mut image: Vec<usize> = (1..=t).collect();
        image.shuffle(rng);
        Permutation::from_images(image).unwrap()
    }

    #[test]
    fn power_vector_products() {
        let sigma = Permutation::parse(3, "(1 2 3)").unwrap();
        let vs = power_vectors(&sigma);
        assert_eq!(vs.len(), 3);
        let folds: Vec<String> = vs.iter().map(|v| v.fold().to_string()).collect();
        assert_eq!(folds, vec!["(1 2 3)", "(1 3 2)", "()"]);
        for v in &vs {
            assert_eq!(v.len(), 3);
        }
        let id = Permutation::identity(3);
        assert!(power_vectors(&id).iter().all(|v| v.fold().is_identity()));
    }

    #[test]
    fn gadget_spec_examples() {
        let z = ProductVector::from_elements(vec![
            Permutation::parse(3, "(1 3)").unwrap(),
            Permutation::identity(3),
            Permutation::identity(3),
        ])
        .unwrap();
        assert_eq!(z.fold().apply(1), 3);
        let out = maps_1_to_t_gadget(&z).unwrap();
        assert_eq!(out.len(), 8);
        assert_eq!(out.degree(), 4);
        assert!(out.fold().is_identity());

        let miss = ProductVector::from_elements(vec![Permutation::identity(3); 3]).unwrap();
        let out = maps_1_to_t_gadget(&miss).unwrap();
        assert_eq!(out.fold().apply(1), 4);
    }

    #[test]
    fn gadget_equivalence_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = rng.gen_range(1..=6);
            let z = ProductVector::from_elements(
                (0..m).map(|_| random_perm(6, &mut rng)).collect(),
            )
            .unwrap();
            let hits = z.fold().apply(1) == 6;
            let folded = maps_1_to_t_gadget(&z).unwrap().fold();
            assert_eq!(folded.is_identity(), hits);
            if !hits {
                assert_eq!(folded.apply(1), 7);
            }
        }
    }

    #[test]
    fn embedding_examples_and_homomorphism() {
        let swap = Permutation::parse(3, "(1 2)").unwrap();
        assert_eq!(
            embed_even_element(&swap).unwrap(),
            Permutation::parse(5, "(1 2)(4 5)").unwrap()
        );
        assert!(embed_even_element(&Permutation::identity(3))
            .unwrap()
            .is_identity());
        let all: Vec<Permutation> = all_permutations(4).collect();
        for a in &all {
            assert!(embed_even_element(a).unwrap().is_even());
            for b in &all {
                let lhs = embed_even_element(a)
                    .unwrap()
                    .compose(&embed_even_element(b).unwrap())
                    .unwrap();
                let rhs = embed_even_element(&a.compose(b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bp_chain_answers_match_the_evaluator() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let b = random_program(rng.gen_range(2..=15), 4, &mut rng);
            let x: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
            let instances = bp_to_id_instances(&b, &x).unwrap();
            let tp = bp::encode(&b, &x).unwrap().degree();
            for v in &instances {
                assert_eq!(v.degree(), tp + 3);
                assert_eq!(v.len(), tp + 1);
                assert!(v.all_even());
            }
            let some_id = instances.iter().any(|v| v.fold().is_identity());
            assert_eq!(some_id, b.eval(&x).unwrap() == Decision::Accept);
        }
    }

    #[test]
    fn candidate_stream_counts_and_shapes() {
        assert_eq!(candidate_element_count(8), 210 + 112);
        assert_eq!(candidate_pair_count(8), 322 * 322);
        let mut seen = std::collections::HashSet::new();
        for i in 0..322 {
            let g = candidate_element(8, i).unwrap();
            let ct = g.decompose().cycle_type();
            if i < 210 {
                assert_eq!(ct, [2, 2]);
            } else {
                assert_eq!(ct, [3]);
            }
            assert!(seen.insert(g.images().to_vec()));
        }
        assert!(candidate_element(8, 322).is_err());
    }

    #[test]
    fn candidate_stream_order() {
        assert_eq!(
            candidate_element(8, 0).unwrap(),
            Permutation::parse(8, "(1 2)(3 4)").unwrap()
        );
        assert_eq!(
            candidate_element(8, 3).unwrap(),
            Permutation::parse(8, "(1 2)(3 5)").unwrap()
        );
        assert_eq!(
            candidate_element(8, 210).unwrap(),
            Permutation::parse(8, "(1 2 3)").unwrap()
        );
        assert_eq!(
            candidate_element(8, 211).unwrap(),
            Permutation::parse(8, "(1 3 2)").unwrap()
        );
        let (a, b) = candidate_pair(8, 1).unwrap();
        assert_eq!(a, Permutation::parse(8, "(1 2)(3 4)").unwrap());
        assert_eq!(b, Permutation::parse(8, "(1 3)(2 4)").unwrap());
    }

    #[test]
    fn small_conjugator_examples() {
        let already = Permutation::parse(8, "(1 2)(3 4)").unwrap();
        assert!(small_conjugator_to_1234(&already).unwrap().is_identity());

        for s in ["(5 6)(7 8)", "(1 5)(2 6)", "(1 3)(2 4)"] {
            let alpha = Permutation::parse(8, s).unwrap();
            let g = small_conjugator_to_1234(&alpha).unwrap();
            assert!(g.is_even());
            assert!(g.moved_count() <= 8);
            assert_eq!(alpha.conjugate(&g).unwrap(), already);
        }
        assert!(matches!(
            small_conjugator_to_1234(&Permutation::parse(8, "(1 2 3)").unwrap()),
            Err(Error::BadShape(_))
        ));
    }

    #[test]
    fn small_conjugator_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let target = canonical_double_transposition(12).unwrap();
        for _ in 0..200 {
            let mut pts: Vec<usize> = (1..=12).collect();
            pts.shuffle(&mut rng);
            let alpha = Permutation::from_cycles(
                12,
                &[vec![pts[0], pts[1]], vec![pts[2], pts[3]]],
            )
            .unwrap();
            let g = small_conjugator_to_1234(&alpha).unwrap();
            assert!(g.is_even() && g.moved_count() <= 8);
            assert_eq!(alpha.conjugate(&g).unwrap(), target);
        }
    }

    #[test]
    fn gamma3_pool_is_exactly_the_even_group_at_degree_8() {
        let pool = gamma3_candidates(8).unwrap();
        assert_eq!(pool[0], Permutation::identity(8));
        assert_eq!(pool.len(), all_even(8).count());
        let set: std::collections::HashSet<Vec<usize>> =
            pool.iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(set.len(), pool.len());
        for p in &pool {
            assert!(p.is_even() && p.moved_count() <= 8);
        }
        assert!(matches!(
            gamma3_candidates(11),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn apply_candidate_spec_example() {
        let mut elements = vec![Permutation::parse(8, "(1 2)(3 4)").unwrap()];
        elements.resize(8, Permutation::identity(8));
        let x = ProductVector::from_elements(elements).unwrap();
        let g1 = Permutation::parse(8, "(1 2 3)").unwrap();
        let g2 = Permutation::parse(8, "(1 4 2)").unwrap();
        let wrapped = x.fold().commutator(&g1).unwrap().commutator(&g2).unwrap();
        assert_eq!(wrapped, Permutation::parse(8, "(1 3)(2 4)").unwrap());
        let g3 = small_conjugator_to_1234(&wrapped).unwrap();
        let tuple = GammaTuple::new(g1, g2, g3).unwrap();
        let out = apply_candidate(&x, &tuple).unwrap();
        assert_eq!(out.len(), 8);
        assert_eq!(out.fold(), canonical_double_transposition(8).unwrap());
    }

    #[test]
    fn apply_candidate_fixes_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = ProductVector::from_elements(vec![Permutation::identity(8); 8]).unwrap();
        let pairs = candidate_pair_count(8);
        for _ in 0..50 {
            let (g1, g2) = candidate_pair(8, rng.gen_range(0..pairs)).unwrap();
            let tuple = GammaTuple::new(g1, g2, Permutation::identity(8)).unwrap();
            let out = apply_candidate(&x, &tuple).unwrap();
            assert_eq!(out.len(), 8);
            assert!(out.fold().is_identity());
        }
    }

    #[test]
    fn tuple_validation() {
        let t8 = Permutation::identity(8);
        let five = Permutation::parse(8, "(1 2 3 4 5)").unwrap();
        assert!(matches!(
            GammaTuple::new(five.clone(), t8.clone(), t8.clone()),
            Err(Error::BadShape(_))
        ));
        let dt = Permutation::parse(8, "(1 2)(3 4)").unwrap();
        assert!(matches!(
            GammaTuple::new(dt.clone(), dt.clone(), Permutation::parse(8, "(1 2)").unwrap()),
            Err(Error::OddElement(_))
        ));
        let wide = Permutation::parse(10, "(1 2 3 4 5 6 7 8 9)").unwrap();
        let dt10 = Permutation::parse(10, "(1 2)(3 4)").unwrap();
        assert!(matches!(
            GammaTuple::new(dt10.clone(), dt10, wide),
            Err(Error::BadShape(_))
        ));
    }

    #[test]
    fn instance_promise_checked() {
        let v = ProductVector::from_elements(vec![Permutation::identity(8); 8]).unwrap();
        assert!(SingleElementInstance::new(v.clone(), Promise::Id).is_ok());
        assert!(matches!(
            SingleElementInstance::new(v, Promise::Alpha),
            Err(Error::BadShape(_))
        ));
    }

    fn vector_with_fold<R: Rng>(t: usize, alpha: &Permutation, rng: &mut R) -> ProductVector {
        // t-1 random even elements, then the correction making the fold alpha.
        let mut elements: Vec<Permutation> = (0..t - 1).map(|_| random_even(t, rng)).collect();
        let partial = elements
            .iter()
            .try_fold(Permutation::identity(t), |acc, e| acc.compose(e))
            .unwrap();
        elements.push(partial.inverse().compose(alpha).unwrap());
        let v = ProductVector::from_elements(elements).unwrap();
        assert_eq!(&v.fold(), alpha);
        v
    }

    #[test]
    fn reduce_finds_every_nonidentity_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let decider = exact_fold_decider(8).unwrap();
        for _ in 0..30 {
            let alpha = loop {
                let a = random_even(8, &mut rng);
                if !a.is_identity() {
                    break a;
                }
            };
            let x = vector_with_fold(8, &alpha, &mut rng);
            let out = reduce_id_to_single(&x, &decider, 0, CandidateMode::Derive).unwrap();
            assert!(out.nonidentity);
            let (kind, tuple) = out.witness.unwrap();
            assert_eq!(kind, WitnessKind::Derived);
            assert_eq!(
                apply_candidate(&x, &tuple).unwrap().fold(),
                canonical_double_transposition(8).unwrap()
            );
            assert_eq!(out.examined, 1);
        }
    }

    #[test]
    fn reduce_spec_fold_examples() {
        let decider = exact_fold_decider(8).unwrap();
        let mut elements = vec![Permutation::parse(8, "(1 2 3 4 5)(6 7 8)").unwrap()];
        elements.resize(8, Permutation::identity(8));
        let x = ProductVector::from_elements(elements).unwrap();
        assert!(
            reduce_id_to_single(&x, &decider, 0, CandidateMode::Derive)
                .unwrap()
                .nonidentity
        );

        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let x = vector_with_fold(8, &Permutation::identity(8), &mut rng);
        let out = reduce_id_to_single(&x, &decider, 50, CandidateMode::Derive).unwrap();
        assert!(!out.nonidentity);
        assert!(out.witness.is_none());
        assert_eq!(out.examined, 50);
        let out = reduce_id_to_single(&x, &decider, 0, CandidateMode::Derive).unwrap();
        assert_eq!(out.examined, 0);
    }

    #[test]
    fn reduce_exhaustive_stream_reaches_a_witness() {
        let decider = exact_fold_decider(8).unwrap();
        let mut elements = vec![Permutation::parse(8, "(1 2)(3 4)").unwrap()];
        elements.resize(8, Permutation::identity(8));
        let x = ProductVector::from_elements(elements).unwrap();
        let out =
            reduce_id_to_single(&x, &decider, 70_000, CandidateMode::ExhaustiveGamma3).unwrap();
        assert!(out.nonidentity);
        let (kind, tuple) = out.witness.unwrap();
        let index = match kind {
            WitnessKind::Enumerated(i) => i,
            other => panic!("expected an enumerated witness, got {other:?}"),
        };
        assert_eq!(out.examined, index + 1);
        // The witness sits in the identity-conjugator block of the stream.
        assert!(index < candidate_pair_count(8));
        assert_eq!(
            apply_candidate(&x, &tuple).unwrap().fold(),
            canonical_double_transposition(8).unwrap()
        );
    }

    #[test]
    fn reduce_validates_input() {
        let decider = exact_fold_decider(6).unwrap();
        let short = ProductVector::from_elements(vec![Permutation::identity(6); 6]).unwrap();
        assert!(matches!(
            reduce_id_to_single(&short, &decider, 0, CandidateMode::Derive),
            Err(Error::DegreeTooSmall { degree: 6, min: 8 })
        ));
        let decider = exact_fold_decider(8).unwrap();
        let wrong_len = ProductVector::from_elements(vec![Permutation::identity(8); 3]).unwrap();
        assert!(matches!(
            reduce_id_to_single(&wrong_len, &decider, 0, CandidateMode::Derive),
            Err(Error::LengthMismatch {
                expected: 8,
                got: 3
            })
        ));
        let odd = ProductVector::from_elements(vec![
            Permutation::parse(8, "(1 2)").unwrap();
            8
        ])
        .unwrap();
        assert!(matches!(
            reduce_id_to_single(&odd, &decider, 0, CandidateMode::Derive),
            Err(Error::OddElement(_))
        ));
    }
}
