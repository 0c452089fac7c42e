//! The cross-module check suite: eleven named checks, each timed and
//! reported with a one-line detail. Seeds and tolerances are pinned here
//! so a run is reproducible bit for bit.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bp::{self, random_program, Decision};
use crate::leakage::{
    self, chi_square_critical_99, sample_class, AmplifierParams, LeakageFunction,
};
use crate::perm::{all_even, random_even, Permutation};
use crate::product::{ProductVector, Provenance, VectorMap, OUTPUT_LEN_FACTOR};
use crate::reduce::{
    self, apply_candidate, bp_to_id_instances, candidate_pair, candidate_pair_count,
    embed_even_element, exact_fold_decider, maps_1_to_t_gadget, small_conjugator_to_1234,
    CandidateMode, GammaTuple,
};
use crate::transform::{ceil_log2, convert, to_double_transposition, CONVERT_COMM_MARGIN};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type CheckResult = std::result::Result<String, String>;
type CheckFn = fn() -> CheckResult;

const CHECKS: [(&str, CheckFn); 11] = [
    ("commutator-identities", commutator_identities),
    ("exhaustive-double-transposition", exhaustive_double_transposition),
    ("convert-contract", convert_contract),
    ("vector-map-contract", vector_map_contract),
    ("moved-points-bound", moved_points_bound),
    ("program-encoding", program_encoding),
    ("instance-chain", instance_chain),
    ("single-element-reduction", single_element_reduction),
    ("sampler-uniformity", sampler_uniformity),
    ("tvd-estimates", tvd_estimates),
    ("amplifier-error", amplifier_error),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs the checks whose name contains `filter` (all when `None`),
/// in declaration order.
pub fn run_matching(filter: Option<&str>) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|(name, _)| filter.map_or(true, |f| name.contains(f)))
        .map(|&(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

pub fn run_all() -> Vec<CheckOutcome> {
    run_matching(None)
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn p(t: usize, s: &str) -> std::result::Result<Permutation, String> {
    Permutation::parse(t, s).map_err(e)
}

fn commutator_identities() -> CheckResult {
    // Each line: alpha, gamma, the exact commutator they must produce.
    let cases = [
        // Two 2-cycles, 3-cycle gamma inside the support plus one point.
        ("(1 2)(3 4)", "(1 2 3)", "(1 4)(2 3)"),
        // Single 3-cycle with a borrowed fixed point.
        ("(1 2 3)", "(1 2)(3 4)", "(1 4)(2 3)"),
        // Two 3-cycles braided by a double-transposition.
        ("(1 2 3)(4 5 6)", "(1 4)(3 6)", "(1 4)(2 5)"),
        // 4-cycle squashed to a double-transposition.
        ("(1 2 3 4)", "(1 2)(3 4)", "(1 3)(2 4)"),
        // Long cycle shortened by a 3-cycle of consecutive points.
        ("(1 2 3 4 5)", "(2 3 4)", "(1 4 3)"),
        // Doubling: two transpositions become four.
        ("(1 2)(3 4)", "(1 5)(2 6)(3 7)(4 8)", "(1 2)(3 4)(5 6)(7 8)"),
        // Weave: paired transpositions plus a spare point close into an
        // odd cycle (x1 x2 y2 y1 c).
        ("(1 4)(2 5)", "(1 4 2 5 3)", "(1 2 5 4 3)"),
    ];
    for (a, g, want) in cases {
        let t = 8;
        let got = p(t, a)?.commutator(&p(t, g)?).map_err(e)?;
        let want = p(t, want)?;
        if got != want {
            return Err(format!("[{a}, {g}] = {got}, expected {want}"));
        }
    }
    // Pairing identity: two transpositions times a cross-pair make a
    // transposition and a 4-cycle.
    let lhs = p(8, "(1 2)(3 4)")?.compose(&p(8, "(3 5)(4 6)")?).map_err(e)?;
    let want = p(8, "(1 2)(3 6 4 5)")?;
    if lhs != want {
        return Err(format!("pairing product = {lhs}, expected {want}"));
    }
    Ok(format!("{} identities hold exactly", cases.len() + 1))
}

fn exhaustive_double_transposition() -> CheckResult {
    let mut count = 0;
    for a in all_even(6) {
        if a.is_identity() {
            continue;
        }
        let script = to_double_transposition(&a).map_err(e)?;
        if script.comm_count() != 2 || script.steps().len() != 2 {
            return Err(format!("{a}: expected exactly 2 commutator steps"));
        }
        if script.target().decompose().cycle_type() != [2, 2] {
            return Err(format!("{a}: target {} is not a double-transposition", script.target()));
        }
        if !script.check() {
            return Err(format!("{a}: script does not reproduce its target"));
        }
        count += 1;
    }
    if count != 359 {
        return Err(format!("covered {count} elements, expected 359"));
    }
    Ok("359/359 nonidentity even elements collapse in two commutators".into())
}

fn random_target(t: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut shapes: Vec<Vec<usize>> = vec![vec![3]];
    for k in (5..t).step_by(2) {
        shapes.push(vec![k]);
    }
    for k1 in (2..=t).step_by(2) {
        for k2 in (k1..=t - k1).step_by(2) {
            shapes.push(vec![k1, k2]);
        }
    }
    let shape = shapes.choose(rng).unwrap();
    let mut points: Vec<usize> = (1..=t).collect();
    points.shuffle(rng);
    let mut cycles = Vec::new();
    let mut at = 0;
    for &len in shape {
        cycles.push(points[at..at + len].to_vec());
        at += len;
    }
    Permutation::from_cycles(t, &cycles).unwrap()
}

fn random_even_nonid(t: usize, rng: &mut impl Rng) -> Permutation {
    loop {
        let a = random_even(t, rng);
        if !a.is_identity() {
            return a;
        }
    }
}

fn convert_contract() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0isize;
    for t in [6usize, 10] {
        let budget = ceil_log2(t) + CONVERT_COMM_MARGIN;
        for _ in 0..250 {
            let alpha = random_even_nonid(t, &mut rng);
            let beta = random_target(t, &mut rng);
            let script = convert(&alpha, &beta).map_err(e)?;
            if !script.check() {
                return Err(format!(
                    "convert {alpha} -> {beta}: script does not reproduce its target"
                ));
            }
            if script.source() != &alpha || script.target() != &beta {
                return Err(format!("script endpoints drifted for {alpha} -> {beta}"));
            }
            if script.comm_count() > budget {
                return Err(format!(
                    "convert {alpha} -> {beta}: {} commutators, budget {budget}",
                    script.comm_count()
                ));
            }
            worst = worst.max(script.comm_count() as isize - ceil_log2(t) as isize);
        }
    }
    Ok(format!(
        "500 conversions exact; worst slack over ceil(log2 t) is {worst} (allowed {CONVERT_COMM_MARGIN})"
    ))
}

fn vector_map_contract() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut max_ratio = 0.0f64;
    for t in [6usize, 10] {
        let m = t;
        for _ in 0..50 {
            let alpha = random_even_nonid(t, &mut rng);
            let beta = random_even_nonid(t, &mut rng);
            let map = VectorMap::build(&alpha, &beta, m).map_err(e)?;
            if map.output_len() > OUTPUT_LEN_FACTOR * t * m {
                return Err(format!(
                    "map {alpha} -> {beta}: output length {} over {}*t*m",
                    map.output_len(),
                    OUTPUT_LEN_FACTOR
                ));
            }
            max_ratio = max_ratio.max(map.output_len() as f64 / (t * m) as f64);
            for _ in 0..20 {
                let x = sample_class(&alpha, m, &mut rng).map_err(e)?;
                let y = map.apply(&x).map_err(e)?;
                if y.fold() != beta {
                    return Err(format!("map {alpha} -> {beta}: product missed the target"));
                }
                if y.len() != map.output_len() {
                    return Err("output length disagrees with the declared one".into());
                }
                if y.tags().iter().any(|tag| matches!(tag, Provenance::Mixed)) {
                    return Err("an output slot depends on more than one input".into());
                }
                let z = sample_class(&Permutation::identity(t), m, &mut rng).map_err(e)?;
                if !map.apply(&z).map_err(e)?.fold().is_identity() {
                    return Err(format!("map {alpha} -> {beta}: identity class not preserved"));
                }
            }
        }
    }
    Ok(format!(
        "100 maps, 20 vectors per class exact; peak output length {max_ratio:.2}*t*m (cap {OUTPUT_LEN_FACTOR})"
    ))
}

fn moved_points_bound() -> CheckResult {
    let group: Vec<Permutation> = all_even(5).collect();
    let mut pairs = 0;
    for a in &group {
        for g in &group {
            let c = a.commutator(g).map_err(e)?;
            if c.moved_count() > 2 * a.moved_count() {
                return Err(format!(
                    "[{a}, {g}] moves {} points, over twice {}",
                    c.moved_count(),
                    a.moved_count()
                ));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} commutators within twice the source support"))
}

fn program_encoding() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut checked = 0u64;
    for _ in 0..500 {
        let b = random_program(rng.gen_range(2..=30), 8, &mut rng);
        for bits in 0..256u32 {
            let x: Vec<bool> = (0..8).map(|i| bits >> i & 1 == 1).collect();
            let inst = bp::encode(&b, &x).map_err(e)?;
            if inst.degree() > 2 * (b.size() + 2) {
                return Err(format!(
                    "degree {} over 2(s+2) for s={}",
                    inst.degree(),
                    b.size()
                ));
            }
            let evals = b.eval(&x).map_err(e)? == Decision::Accept;
            if inst.accepts() != evals {
                return Err(format!("cycle test disagrees with evaluator on {bits:08b}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} program-input pairs agree; degree bound holds"))
}

fn instance_chain() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..200 {
        let b = random_program(rng.gen_range(2..=15), 4, &mut rng);
        let x: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
        let instances = bp_to_id_instances(&b, &x).map_err(e)?;
        let accepts = b.eval(&x).map_err(e)? == Decision::Accept;
        let some_id = instances.iter().any(|v| v.fold().is_identity());
        if some_id != accepts {
            return Err("id-product witness disagrees with the evaluator".into());
        }
        if instances
            .iter()
            .any(|v| !v.all_even())
        {
            return Err("an instance element is odd".into());
        }
    }
    // Gadget equivalence on random vectors.
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let mut image: Vec<usize> = (1..=6).collect();
        let elements = (0..m)
            .map(|_| {
                image.shuffle(&mut rng);
                Permutation::from_images(image.clone()).unwrap()
            })
            .collect();
        let z = ProductVector::from_elements(elements).map_err(e)?;
        let out = maps_1_to_t_gadget(&z).map_err(e)?;
        if out.fold().is_identity() != (z.fold().apply(1) == 6) {
            return Err("gadget equivalence failed".into());
        }
    }
    // Embedding is a parity-fixing homomorphism, exhaustively at degree 4.
    let group: Vec<Permutation> = crate::perm::all_permutations(4).collect();
    for a in &group {
        let ma = embed_even_element(a).map_err(e)?;
        if !ma.is_even() {
            return Err(format!("embedding of {a} is odd"));
        }
        for b in &group {
            let lhs = ma.compose(&embed_even_element(b).map_err(e)?).map_err(e)?;
            let rhs = embed_even_element(&a.compose(b).map_err(e)?).map_err(e)?;
            if lhs != rhs {
                return Err(format!("embedding is not multiplicative at ({a}, {b})"));
            }
        }
    }
    Ok("200 chains, 1000 gadgets, 576 embedding pairs exact".into())
}

fn vector_with_fold(t: usize, alpha: &Permutation, rng: &mut impl Rng) -> ProductVector {
    let mut elements: Vec<Permutation> = (0..t - 1).map(|_| random_even(t, rng)).collect();
    let partial = elements
        .iter()
        .try_fold(Permutation::identity(t), |acc, x| acc.compose(x))
        .unwrap();
    elements.push(partial.inverse().compose(alpha).unwrap());
    ProductVector::from_elements(elements).unwrap()
}

fn single_element_reduction() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for t in [8usize, 10] {
        let decider = exact_fold_decider(t).map_err(e)?;
        for _ in 0..50 {
            let alpha = random_even_nonid(t, &mut rng);
            let x = vector_with_fold(t, &alpha, &mut rng);
            let out =
                reduce::reduce_id_to_single(&x, &decider, 0, CandidateMode::Derive).map_err(e)?;
            if !out.nonidentity || out.witness.is_none() {
                return Err(format!("missed nonidentity product {alpha} at degree {t}"));
            }
        }
        for _ in 0..50 {
            let x = vector_with_fold(t, &Permutation::identity(t), &mut rng);
            let out =
                reduce::reduce_id_to_single(&x, &decider, 60, CandidateMode::Derive).map_err(e)?;
            if out.nonidentity {
                return Err(format!("false witness on an identity product at degree {t}"));
            }
        }
    }
    // Identity products stay identity under any candidate tuple.
    let t = 8;
    let id_vec = vector_with_fold(t, &Permutation::identity(t), &mut rng);
    let pairs = candidate_pair_count(t);
    for _ in 0..100 {
        let (g1, g2) = candidate_pair(t, rng.gen_range(0..pairs)).map_err(e)?;
        let mut pts: Vec<usize> = (1..=t).collect();
        pts.shuffle(&mut rng);
        let dt = Permutation::from_cycles(t, &[vec![pts[0], pts[1]], vec![pts[2], pts[3]]])
            .map_err(e)?;
        let g3 = small_conjugator_to_1234(&dt).map_err(e)?;
        let tuple = GammaTuple::new(g1, g2, g3).map_err(e)?;
        if !apply_candidate(&id_vec, &tuple).map_err(e)?.fold().is_identity() {
            return Err(format!("tuple {tuple} moved an identity product"));
        }
    }
    Ok("200 reductions and 100 identity preservations exact".into())
}

fn sampler_uniformity() -> CheckResult {
    // Exhaustive bijection at degree 3.
    let group: Vec<Permutation> = all_even(3).collect();
    for alpha in ["(1 2 3)", "(1 3 2)"] {
        let mut elements = vec![p(3, alpha)?];
        elements.resize(3, Permutation::identity(3));
        let x = ProductVector::from_elements(elements).map_err(e)?;
        let mut seen = HashSet::new();
        for r1 in &group {
            for r2 in &group {
                let z = leakage::rerandomize_with(&x, &[r1.clone(), r2.clone()]).map_err(e)?;
                if z.fold() != x.fold() {
                    return Err("rerandomization changed the product".into());
                }
                let key: Vec<Vec<usize>> =
                    z.elements().iter().map(|el| el.images().to_vec()).collect();
                if !seen.insert(key) {
                    return Err("rerandomization revisited a class member".into());
                }
            }
        }
        if seen.len() != 9 {
            return Err(format!("{} class members reached, expected 9", seen.len()));
        }
    }
    // Chi-square over the full degree-4 class, 1e5 draws, significance 0.01.
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let alpha = p(4, "(1 2)(3 4)")?;
    let n = 100_000u64;
    let cells = 12u64 * 12 * 12;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for _ in 0..n {
        let v = sample_class(&alpha, 4, &mut rng).map_err(e)?;
        let key: Vec<usize> = v
            .elements()
            .iter()
            .flat_map(|el| el.images().iter().copied())
            .collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let expect = n as f64 / cells as f64;
    let mut stat: f64 = counts
        .values()
        .map(|&c| {
            let d = c as f64 - expect;
            d * d / expect
        })
        .sum();
    stat += (cells - counts.len() as u64) as f64 * expect;
    let critical = chi_square_critical_99(cells as usize - 1);
    if stat >= critical {
        return Err(format!("chi-square {stat:.1} over the 0.99 critical {critical:.1}"));
    }
    Ok(format!(
        "bijection 9/9 twice; chi-square {stat:.1} under critical {critical:.1} on {cells} cells"
    ))
}

fn tvd_estimates() -> CheckResult {
    let alpha = p(4, "(1 2)(3 4)")?;
    let coord = LeakageFunction::coordinate(1, 4).map_err(e)?;
    let ind = LeakageFunction::fold_indicator(alpha.clone()).map_err(e)?;
    let zero = leakage::tvd_exact(&coord, &alpha).map_err(e)?;
    if zero != num_rational::Rational64::new(0, 1) {
        return Err(format!("coordinate distance {zero}, expected 0"));
    }
    let one = leakage::tvd_exact(&ind, &alpha).map_err(e)?;
    if one != num_rational::Rational64::new(1, 1) {
        return Err(format!("indicator distance {one}, expected 1"));
    }
    let est = leakage::tvd_monte_carlo(&coord, &alpha, 4, 100_000, 107).map_err(e)?;
    if est.estimate > est.radius {
        return Err(format!(
            "coordinate estimate {:.4} outside radius {:.4}",
            est.estimate, est.radius
        ));
    }
    let coord_detail = format!("coord {:.4}±{:.4}", est.estimate, est.radius);
    let est = leakage::tvd_monte_carlo(&ind, &alpha, 4, 100_000, 107).map_err(e)?;
    if est.estimate < 1.0 - est.radius {
        return Err(format!(
            "indicator estimate {:.4} more than a radius {:.4} under 1",
            est.estimate, est.radius
        ));
    }
    Ok(format!(
        "exact 0 and 1; {coord_detail}, indicator {:.4}±{:.4}",
        est.estimate, est.radius
    ))
}

fn amplifier_error() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let t = 6;
    let alpha = p(t, "(1 2)(3 4)")?;
    let id = Permutation::identity(t);
    let leak = LeakageFunction::planted(0.3, alpha.clone()).map_err(e)?;
    let eps = leakage::calibrate_eps_alpha(&leak, &alpha, t, 20_000, &mut rng).map_err(e)?;
    let mut rates = Vec::new();
    for m in [10u64, 100, 1000] {
        let params = AmplifierParams::new(m, 1, eps).map_err(e)?;
        let mut errors = 0u32;
        for trial in 0..1000 {
            let (class, want) = if trial % 2 == 0 {
                (&alpha, reduce::SingleAnswer::Alpha)
            } else {
                (&id, reduce::SingleAnswer::Id)
            };
            let x = sample_class(class, t, &mut rng).map_err(e)?;
            if leakage::amplifier_decide(&x, &leak, &params, &mut rng).map_err(e)? != want {
                errors += 1;
            }
        }
        rates.push((m, errors));
    }
    if !(rates[0].1 > rates[1].1 && rates[1].1 > rates[2].1) {
        return Err(format!("error counts not strictly decreasing: {rates:?}"));
    }
    if rates[2].1 >= 10 {
        return Err(format!(
            "error rate {}/1000 at m=1000, expected under 1%",
            rates[2].1
        ));
    }
    Ok(format!(
        "errors per 1000 trials: m=10: {}, m=100: {}, m=1000: {} (calibrated rate {eps:.3})",
        rates[0].1, rates[1].1, rates[2].1
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_stable_and_unique() {
        let names = check_names();
        assert_eq!(names.len(), 11);
        let set: HashSet<_> = names.iter().collect();
        assert_eq!(set.len(), 11);
    }

    #[test]
    fn filter_selects_by_substring() {
        let out = run_matching(Some("moved-points"));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, "moved-points-bound");
        assert!(out[0].passed, "{}", out[0].detail);
    }

    #[test]
    fn quick_checks_pass() {
        // The cheap half of the suite; the full run is the acceptance test.
        for name in [
            "commutator-identities",
            "exhaustive-double-transposition",
            "moved-points-bound",
        ] {
            let out = run_matching(Some(name));
            assert!(out[0].passed, "{}: {}", out[0].name, out[0].detail);
        }
    }
}
