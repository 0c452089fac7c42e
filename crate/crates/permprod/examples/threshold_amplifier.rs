//! Turning a weakly correlated one-bit leak into a reliable class
//! decider by counting hits over rerandomized copies.

use permprod::leakage::{self, AmplifierParams, LeakageFunction};
use permprod::reduce::SingleAnswer;
use permprod::Permutation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> permprod::Result<()> {
    let t = 8;
    let alpha = Permutation::parse(t, "(1 2)(3 4)")?;
    // Output frequency differs by 0.3 between the two classes; every
    // single bit is still almost a coin flip.
    let leak = LeakageFunction::parse("planted:0.3", t, &alpha)?;
    let id = Permutation::identity(t);
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    let eps = leakage::calibrate_eps_alpha(&leak, &alpha, t, 20_000, &mut rng)?;
    println!("calibrated hit rate on the target class: {eps:.4}");
    println!();

    // The accept window is [(1 - 1/(2t)) m eps, (1 + 1/(2t)) m eps]; the
    // decision gets reliable once the binomial spread fits inside it.
    println!(
        "{:>6} {:>18} {:>12} {:>12} {:>8}",
        "m", "window", "err(alpha)", "err(id)", "rate"
    );
    for m in [100, 400, 1600] {
        let params = AmplifierParams::new(m, 1, eps)?;
        let (low, high) = params.thresholds(t);
        let trials = 100u32;
        let mut wrong_alpha = 0;
        let mut wrong_id = 0;
        for trial in 0..2 * trials {
            let on_alpha = trial % 2 == 0;
            let class = if on_alpha { &alpha } else { &id };
            let x = leakage::sample_class(class, t, &mut rng)?;
            let answer = leakage::amplifier_decide(&x, &leak, &params, &mut rng)?;
            match (on_alpha, answer) {
                (true, SingleAnswer::Id) => wrong_alpha += 1,
                (false, SingleAnswer::Alpha) => wrong_id += 1,
                _ => {}
            }
        }
        println!(
            "{m:>6} {:>18} {:>8}/{trials} {:>8}/{trials} {:>8.3}",
            format!("[{low:.1}, {high:.1}]"),
            wrong_alpha,
            wrong_id,
            f64::from(wrong_alpha + wrong_id) / f64::from(2 * trials)
        );
    }
    Ok(())
}
