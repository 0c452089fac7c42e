//! Deciding identity vs nonidentity products by querying a
//! single-element decider about commutator-wrapped candidates.

use permprod::leakage;
use permprod::product::ProductVector;
use permprod::reduce::{self, CandidateMode, WitnessKind};
use permprod::Permutation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> permprod::Result<()> {
    let t = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let decider = reduce::exact_fold_decider(t)?;

    // A vector multiplying to a 5-cycle: the derived candidate resolves
    // it with a single query.
    let alpha = Permutation::parse(t, "(1 2 3 4 5)")?;
    let x = leakage::sample_class(&alpha, t, &mut rng)?;
    let outcome = reduce::reduce_id_to_single(&x, &decider, 10_000, CandidateMode::Derive)?;
    println!("product {alpha}: nonidentity={}", outcome.nonidentity);
    if let Some((WitnessKind::Derived, tuple)) = &outcome.witness {
        println!("  derived witness {tuple}");
        println!("  queries used: {}", outcome.examined);
    }
    println!();

    // The same input under full enumeration: candidates stream in a
    // fixed order, so the reported witness index is reproducible.
    let alpha = Permutation::parse(t, "(1 2)(3 4)")?;
    let x = leakage::sample_class(&alpha, t, &mut rng)?;
    let outcome =
        reduce::reduce_id_to_single(&x, &decider, 100_000, CandidateMode::ExhaustiveGamma3)?;
    match &outcome.witness {
        Some((WitnessKind::Enumerated(i), tuple)) => {
            println!("product {alpha}: witness at stream index {i}");
            println!("  {tuple}");
            println!("  candidates examined: {}", outcome.examined);
        }
        other => println!("unexpected outcome: {other:?}"),
    }
    println!();

    // Identity products never produce a witness; the budget runs out.
    let id = ProductVector::from_elements(vec![Permutation::identity(t); t])?;
    let outcome = reduce::reduce_id_to_single(&id, &decider, 5_000, CandidateMode::Derive)?;
    println!(
        "identity product: nonidentity={}, witness={}, examined={}",
        outcome.nonidentity,
        if outcome.witness.is_none() { "none" } else { "some" },
        outcome.examined
    );
    Ok(())
}
