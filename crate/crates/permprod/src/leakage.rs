//! Sampling product-class distributions, measuring what bounded-output
//! functions can see of them, and the threshold amplifier.
//!
//! The class of a permutation alpha is the set of length-m vectors over
//! the even group whose product is alpha. Rerandomization maps any class
//! member to a uniform one without touching the product, so sampling a
//! class needs one representative plus independent uniform even draws.
//! Statistical distance between a function's outputs on two classes is
//! computed exactly at tiny degree (full enumeration) and estimated with
//! a stated confidence radius otherwise. The amplifier turns any one-bit
//! function with an output-frequency gap between the two classes into a
//! high-confidence decider by counting over rerandomized copies.

use std::collections::HashMap;

use num_rational::Rational64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{all_even, random_even, Permutation};
use crate::product::ProductVector;
use crate::reduce::SingleAnswer;

/// Largest output width (bits) the histogram-based estimator accepts.
pub const MAX_HISTOGRAM_BITS: u32 = 20;

/// FNV-1a on a byte slice.
pub fn hash64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// SplitMix64 finalizer; decorrelates consecutive or structured inputs.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn vector_bytes(v: &ProductVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * v.degree() * v.len());
    out.extend_from_slice(&(v.degree() as u32).to_le_bytes());
    for e in v.elements() {
        for &img in e.images() {
            out.extend_from_slice(&(img as u32).to_le_bytes());
        }
    }
    out
}

/// `(x₁, …, x_m) ↦ (x₁r₁, r₁⁻¹x₂r₂, …, r_{m−1}⁻¹x_m)` with the given
/// even blinds; the telescoping cancels, so the product is unchanged.
/// For fixed x the map from blinds to outputs is a bijection onto the
/// product class, which is what makes the random variant uniform.
pub fn rerandomize_with(x: &ProductVector, rs: &[Permutation]) -> Result<ProductVector> {
    let m = x.len();
    if rs.len() + 1 != m {
        return Err(Error::LengthMismatch {
            expected: m - 1,
            got: rs.len(),
        });
    }
    for r in rs {
        if r.degree() != x.degree() {
            return Err(Error::DegreeMismatch {
                left: x.degree(),
                right: r.degree(),
            });
        }
        if !r.is_even() {
            return Err(Error::OddElement("rerandomizer"));
        }
    }
    let mut elements = Vec::with_capacity(m);
    for i in 0..m {
        let mut e = x.element(i).clone();
        if i > 0 {
            e = rs[i - 1].inverse().compose(&e)?;
        }
        if i < m - 1 {
            e = e.compose(&rs[i])?;
        }
        elements.push(e);
    }
    ProductVector::from_parts(elements, x.tags().to_vec())
}

/// [`rerandomize_with`] under fresh uniform even blinds.
pub fn rerandomize<R: Rng + ?Sized>(x: &ProductVector, rng: &mut R) -> ProductVector {
    let rs: Vec<Permutation> = (0..x.len() - 1)
        .map(|_| random_even(x.degree(), rng))
        .collect();
    rerandomize_with(x, &rs).expect("blinds match the vector by construction")
}

/// A uniform draw from the vectors of the given length multiplying to
/// `alpha`: rerandomize the canonical representative `(alpha, id, …, id)`.
pub fn sample_class<R: Rng + ?Sized>(
    alpha: &Permutation,
    len: usize,
    rng: &mut R,
) -> Result<ProductVector> {
    if !alpha.is_even() {
        return Err(Error::OddElement("class representative"));
    }
    let mut elements = vec![alpha.clone()];
    elements.resize(len, Permutation::identity(alpha.degree()));
    Ok(rerandomize(&ProductVector::from_elements(elements)?, rng))
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Position of the permutation in lexicographic order of its degree's
/// image lists; injective, below t!.
pub fn lehmer_rank(p: &Permutation) -> u64 {
    let img = p.images();
    let t = img.len();
    let mut rank = 0u64;
    for j in 0..t {
        let smaller = img[j + 1..].iter().filter(|&&k| k < img[j]).count() as u64;
        rank += smaller * factorial(t - 1 - j);
    }
    rank
}

fn bits_for(max_value: u64) -> u32 {
    64 - max_value.leading_zeros()
}

/// A deterministic bounded-output observer of product vectors. The output
/// is always reported in the low `out_bits` bits of a word.
pub struct LeakageFunction {
    name: String,
    out_bits: u32,
    eval: Box<dyn Fn(&ProductVector) -> u64 + Send + Sync>,
}

impl LeakageFunction {
    pub fn new(
        name: impl Into<String>,
        out_bits: u32,
        eval: impl Fn(&ProductVector) -> u64 + Send + Sync + 'static,
    ) -> Result<LeakageFunction> {
        if out_bits == 0 || out_bits > 63 {
            return Err(Error::BadShape(format!(
                "output width {out_bits} out of range 1..=63"
            )));
        }
        Ok(LeakageFunction {
            name: name.into(),
            out_bits,
            eval: Box::new(eval),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn eval(&self, v: &ProductVector) -> u64 {
        (self.eval)(v) & ((1u64 << self.out_bits) - 1)
    }

    /// The whole i-th element (1-based), encoded by lexicographic rank.
    pub fn coordinate(i: usize, t: usize) -> Result<LeakageFunction> {
        if i == 0 {
            return Err(Error::BadShape("coordinate index is 1-based".into()));
        }
        if t > 20 {
            return Err(Error::BadShape(format!(
                "coordinate rank overflows beyond degree 20, got {t}"
            )));
        }
        let bits = bits_for(factorial(t) - 1).max(1);
        LeakageFunction::new(format!("coord:{i}"), bits, move |v| {
            if i <= v.len() {
                lehmer_rank(v.element(i - 1))
            } else {
                0
            }
        })
    }

    /// One bit: does the vector multiply to `target`?
    pub fn fold_indicator(target: Permutation) -> Result<LeakageFunction> {
        LeakageFunction::new("fold-indicator", 1, move |v| (v.fold() == target) as u64)
    }

    /// Where the product sends point `p`.
    pub fn fold_point_image(p: usize, t: usize) -> Result<LeakageFunction> {
        if p == 0 || p > t {
            return Err(Error::PointOutOfRange { point: p, degree: t });
        }
        let bits = bits_for(t as u64).max(1);
        LeakageFunction::new(format!("point-image:{p}"), bits, move |v| {
            v.fold().apply(p) as u64
        })
    }

    /// Bit i is the parity of where element i sends point 1; a cheap
    /// many-bit probe across the vector, truncated to `k` elements.
    pub fn first_bits(k: u32) -> Result<LeakageFunction> {
        LeakageFunction::new(format!("first-bits:{k}"), k, move |v| {
            let mut out = 0u64;
            for i in 0..(k as usize).min(v.len()) {
                out |= ((v.element(i).apply(1) as u64) & 1) << i;
            }
            out
        })
    }

    /// A synthetic one-bit distinguisher with a planted output-frequency
    /// gap: it hashes the vector to a pseudo-uniform value and fires with
    /// probability 1/2 + gap/2 on the target class, 1/2 − gap/2 off it.
    pub fn planted(gap: f64, target: Permutation) -> Result<LeakageFunction> {
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(Error::BadShape(format!("gap {gap} out of range (0, 1]")));
        }
        let name = format!("planted:{gap}");
        LeakageFunction::new(name, 1, move |v| {
            let p = if v.fold() == target {
                0.5 + gap / 2.0
            } else {
                0.5 - gap / 2.0
            };
            let u = splitmix64(hash64(&vector_bytes(v))) as f64 / (u64::MAX as f64 + 1.0);
            (u < p) as u64
        })
    }

    /// Textual selectors: `coord:i`, `fold-indicator`, `point-image:p`,
    /// `first-bits:k`, `planted:gap`. The reference permutation fills the
    /// target slot where one is needed.
    pub fn parse(spec: &str, t: usize, reference: &Permutation) -> Result<LeakageFunction> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let need = |what: &str| -> Result<&str> {
            arg.ok_or_else(|| Error::Parse(format!("{spec}: missing {what} argument")))
        };
        match head {
            "coord" => {
                let i = need("coordinate")?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coordinate in {spec}")))?;
                LeakageFunction::coordinate(i, t)
            }
            "fold-indicator" => LeakageFunction::fold_indicator(reference.clone()),
            "point-image" => {
                let p = need("point")?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point in {spec}")))?;
                LeakageFunction::fold_point_image(p, t)
            }
            "first-bits" => {
                let k = need("width")?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad width in {spec}")))?;
                LeakageFunction::first_bits(k)
            }
            "planted" => {
                let gap = need("gap")?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad gap in {spec}")))?;
                LeakageFunction::planted(gap, reference.clone())
            }
            other => Err(Error::Parse(format!("unknown leakage function: {other}"))),
        }
    }
}

/// Exact total variation distance between the function's outputs on the
/// `alpha` class and the identity class, at the vector length equal to
/// the degree. Enumerates the free coordinates, so only tiny degrees are
/// admitted (1728 vectors per class at degree 4).
pub fn tvd_exact(l: &LeakageFunction, alpha: &Permutation) -> Result<Rational64> {
    let t = alpha.degree();
    if !alpha.is_even() {
        return Err(Error::OddElement("class representative"));
    }
    if t > 4 {
        return Err(Error::BudgetExceeded(format!(
            "exact enumeration is limited to degree 4, got {t}"
        )));
    }
    let group: Vec<Permutation> = all_even(t).collect();
    let id = Permutation::identity(t);
    let mut count_alpha: HashMap<u64, i64> = HashMap::new();
    let mut count_id: HashMap<u64, i64> = HashMap::new();
    let mut total = 0i64;
    let mut prefix = vec![0usize; t.saturating_sub(1)];
    loop {
        let mut elements: Vec<Permutation> =
            prefix.iter().map(|&i| group[i].clone()).collect();
        let partial = elements
            .iter()
            .try_fold(id.clone(), |acc, e| acc.compose(e))?;
        let free = elements.len();
        elements.push(partial.inverse().compose(alpha)?);
        let v = ProductVector::from_parts(
            elements.clone(),
            vec![crate::product::Provenance::Constant; free + 1],
        )?;
        *count_alpha.entry(l.eval(&v)).or_insert(0) += 1;
        elements[free] = partial.inverse();
        let v = ProductVector::from_parts(
            elements,
            vec![crate::product::Provenance::Constant; free + 1],
        )?;
        *count_id.entry(l.eval(&v)).or_insert(0) += 1;
        total += 1;

        let mut j = 0;
        loop {
            if j == prefix.len() {
                break;
            }
            prefix[j] += 1;
            if prefix[j] < group.len() {
                break;
            }
            prefix[j] = 0;
            j += 1;
        }
        if j == prefix.len() {
            break;
        }
    }
    let mut diff = 0i64;
    let keys: std::collections::HashSet<u64> = count_alpha
        .keys()
        .chain(count_id.keys())
        .copied()
        .collect();
    for k in keys {
        diff += (count_alpha.get(&k).copied().unwrap_or(0)
            - count_id.get(&k).copied().unwrap_or(0))
        .abs();
    }
    Ok(Rational64::new(diff, 2 * total))
}

/// A Monte Carlo distance estimate with its confidence radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvdEstimate {
    pub estimate: f64,
    /// `0.5·sqrt(2K/n) + sqrt(ln(2/δ)/n)` with K the observed support
    /// size and δ = 1e-6: a plug-in bias allowance plus a
    /// bounded-difference deviation term. Distribution-free, not tight.
    pub radius: f64,
    pub samples: u64,
    pub seed: u64,
    pub distinct: usize,
}

const TVD_DELTA: f64 = 1e-6;
const TVD_CHUNK: u64 = 1024;

/// Plug-in total variation estimate from `n` histogrammed samples of each
/// class. Samples are drawn on fixed 1024-sample cipher streams keyed by
/// (seed, chunk), so results are bit-identical for a given seed no matter
/// how many workers run.
pub fn tvd_monte_carlo(
    l: &LeakageFunction,
    alpha: &Permutation,
    len: usize,
    n: u64,
    seed: u64,
) -> Result<TvdEstimate> {
    if l.out_bits() > MAX_HISTOGRAM_BITS {
        return Err(Error::OutputTooWide {
            bits: l.out_bits(),
            max: MAX_HISTOGRAM_BITS,
        });
    }
    if !alpha.is_even() {
        return Err(Error::OddElement("class representative"));
    }
    if n == 0 {
        return Err(Error::BadShape("sample count must be positive".into()));
    }
    let id = Permutation::identity(alpha.degree());
    let chunks = n.div_ceil(TVD_CHUNK);
    let (count_alpha, count_id) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let quota = TVD_CHUNK.min(n - c * TVD_CHUNK);
            let mut ca: HashMap<u64, u64> = HashMap::new();
            let mut ci: HashMap<u64, u64> = HashMap::new();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2 * c);
            for _ in 0..quota {
                let v = sample_class(alpha, len, &mut rng).expect("alpha checked even");
                *ca.entry(l.eval(&v)).or_insert(0) += 1;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2 * c + 1);
            for _ in 0..quota {
                let v = sample_class(&id, len, &mut rng).expect("identity is even");
                *ci.entry(l.eval(&v)).or_insert(0) += 1;
            }
            (ca, ci)
        })
        .reduce(
            || (HashMap::new(), HashMap::new()),
            |(mut a1, mut i1), (a2, i2)| {
                for (k, v) in a2 {
                    *a1.entry(k).or_insert(0) += v;
                }
                for (k, v) in i2 {
                    *i1.entry(k).or_insert(0) += v;
                }
                (a1, i1)
            },
        );
    let keys: std::collections::HashSet<u64> =
        count_alpha.keys().chain(count_id.keys()).copied().collect();
    let distinct = keys.len();
    let mut diff = 0i128;
    for k in &keys {
        let a = count_alpha.get(k).copied().unwrap_or(0) as i128;
        let i = count_id.get(k).copied().unwrap_or(0) as i128;
        diff += (a - i).abs();
    }
    let nf = n as f64;
    Ok(TvdEstimate {
        estimate: diff as f64 / (2.0 * nf),
        radius: 0.5 * (2.0 * distinct as f64 / nf).sqrt() + ((2.0 / TVD_DELTA).ln() / nf).sqrt(),
        samples: n,
        seed,
        distinct,
    })
}

/// Counting thresholds for the amplifier: accept the target class when
/// the hit count over `sample_count` rerandomized copies lands inside
/// `(1 ∓ 1/(2t^exponent)) · sample_count · eps_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierParams {
    sample_count: u64,
    exponent: u32,
    eps_alpha: f64,
}

impl AmplifierParams {
    pub fn new(sample_count: u64, exponent: u32, eps_alpha: f64) -> Result<AmplifierParams> {
        if sample_count == 0 {
            return Err(Error::BadShape("sample count must be positive".into()));
        }
        if exponent == 0 {
            return Err(Error::BadShape("exponent must be positive".into()));
        }
        if !(eps_alpha > 0.0 && eps_alpha <= 1.0) {
            return Err(Error::BadShape(format!(
                "hit-rate estimate {eps_alpha} out of range (0, 1]"
            )));
        }
        Ok(AmplifierParams {
            sample_count,
            exponent,
            eps_alpha,
        })
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn eps_alpha(&self) -> f64 {
        self.eps_alpha
    }

    pub fn thresholds(&self, t: usize) -> (f64, f64) {
        let band = 1.0 / (2.0 * (t as f64).powi(self.exponent as i32));
        let center = self.sample_count as f64 * self.eps_alpha;
        (center * (1.0 - band), center * (1.0 + band))
    }
}

/// Mean one-bit output over fresh draws from the target class; the
/// hit-rate estimate the thresholds are built from.
pub fn calibrate_eps_alpha<R: Rng + ?Sized>(
    c_prime: &LeakageFunction,
    alpha: &Permutation,
    len: usize,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    if c_prime.out_bits() != 1 {
        return Err(Error::BadShape("calibration needs a one-bit function".into()));
    }
    if samples == 0 {
        return Err(Error::BadShape("sample count must be positive".into()));
    }
    let mut hits = 0u64;
    for _ in 0..samples {
        hits += c_prime.eval(&sample_class(alpha, len, rng)?);
    }
    Ok(hits as f64 / samples as f64)
}

/// Counts the one-bit function over rerandomized copies of `x` and
/// thresholds the count. Under the promise that `x` multiplies to the
/// reference class or the identity class, a function with an honest
/// output-frequency gap decides correctly with error falling
/// exponentially in the sample count.
pub fn amplifier_decide<R: Rng + ?Sized>(
    x: &ProductVector,
    c_prime: &LeakageFunction,
    params: &AmplifierParams,
    rng: &mut R,
) -> Result<SingleAnswer> {
    if c_prime.out_bits() != 1 {
        return Err(Error::BadShape("amplifier needs a one-bit function".into()));
    }
    let mut hits = 0u64;
    for _ in 0..params.sample_count() {
        hits += c_prime.eval(&rerandomize(x, rng));
    }
    let (low, high) = params.thresholds(x.degree());
    let hits = hits as f64;
    Ok(if hits >= low && hits <= high {
        SingleAnswer::Alpha
    } else {
        SingleAnswer::Id
    })
}

/// 99th-percentile chi-square critical value by the Wilson-Hilferty cube
/// approximation; accurate to a fraction of a percent for df >= 2.
pub fn chi_square_critical_99(df: usize) -> f64 {
    let z = 2.3263478740408408f64;
    let d = df as f64;
    let core = 1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt();
    d * core * core * core
}
