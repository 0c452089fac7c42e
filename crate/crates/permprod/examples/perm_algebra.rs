//! Core algebra: composition order, powers, commutators, conjugation.

use permprod::Permutation;

fn main() -> permprod::Result<()> {
    let t = 8;
    let a = Permutation::parse(t, "(1 2 3)")?;
    let b = Permutation::parse(t, "(1 2)(4 5)")?;

    // Products read left to right: (a*b)(i) = b(a(i)).
    let ab = a.compose(&b)?;
    let ba = b.compose(&a)?;
    println!("a        = {a}");
    println!("b        = {b}");
    println!("a*b      = {ab}");
    println!("b*a      = {ba}");
    println!("a^-1     = {}", a.inverse());
    println!("a^2      = {}", a.power(2));
    println!("a^3 = id : {}", a.power(3).is_identity());
    println!();

    // A commutator moves at most twice as many points as its left input,
    // whatever g does elsewhere.
    let alpha = Permutation::parse(t, "(1 2)(3 4)")?;
    let g = Permutation::parse(t, "(1 2 3)(5 6 7)")?;
    let c = alpha.commutator(&g)?;
    println!("[alpha, g]     = {c}");
    println!(
        "moved: alpha {} -> commutator {} (bound {})",
        alpha.moved_count(),
        c.moved_count(),
        2 * alpha.moved_count()
    );

    // Conjugation relabels cycle points: g^-1 a g sends p through g.
    let conj = alpha.conjugate(&g)?;
    println!("alpha^g        = {conj}");
    println!(
        "cycle types    : {:?} -> {:?}",
        alpha.decompose().cycle_type(),
        conj.decompose().cycle_type()
    );
    println!();

    // Parity is a homomorphism onto {even, odd}.
    for s in ["(1 2)", "(1 2 3)", "(1 2 3 4)", "(1 2)(3 4)"] {
        let p = Permutation::parse(t, s)?;
        println!("{s:<12} parity {}", p.parity());
    }
    Ok(())
}
