//! Entrywise maps between product-vector classes: every output entry
//! depends on a single input entry, yet the product class transfers.

use permprod::leakage;
use permprod::product::{Provenance, VectorMap, OUTPUT_LEN_FACTOR};
use permprod::Permutation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> permprod::Result<()> {
    let t = 10;
    let alpha = Permutation::parse(t, "(1 2 3)")?;
    let beta = Permutation::parse(t, "(1 2 3 4 5)(6 7 8)")?;
    let len = 6;

    let map = VectorMap::build(&alpha, &beta, len)?;
    println!("alpha = {alpha}, beta = {beta}, input length {len}");
    println!(
        "map: {} blocks, output length {} (cap {}*t*len = {})",
        map.blocks().len(),
        map.output_len(),
        OUTPUT_LEN_FACTOR,
        OUTPUT_LEN_FACTOR * t * len
    );
    println!();

    // Vectors multiplying to alpha land exactly on beta; vectors
    // multiplying to the identity stay on the identity.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let id = Permutation::identity(t);
    for (label, class, image) in [("alpha", &alpha, &beta), ("id", &id, &id)] {
        let mut exact = 0;
        for _ in 0..200 {
            let x = leakage::sample_class(class, len, &mut rng)?;
            if map.apply(&x)?.fold() == *image {
                exact += 1;
            }
        }
        println!("{label:>5}-class inputs: {exact}/200 folds land on the image class");
    }
    println!();

    // Each output entry cites at most the one input coordinate it reads.
    let x = leakage::sample_class(&alpha, len, &mut rng)?;
    let y = map.apply(&x)?;
    let tags: Vec<String> = y
        .tags()
        .iter()
        .take(16)
        .map(|p| match p {
            Provenance::Source(i) => format!("s{i}"),
            Provenance::Constant => "c".to_string(),
            Provenance::Mixed => "m".to_string(),
        })
        .collect();
    println!("first output provenance tags: {}", tags.join(" "));

    // Round trip through the text form.
    let reparsed = VectorMap::parse(&map.to_text())?;
    assert_eq!(reparsed.apply(&x)?.fold(), beta);
    println!("text round trip preserves the action");
    Ok(())
}
