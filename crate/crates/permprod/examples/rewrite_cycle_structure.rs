//! Rewriting one even element into another by a short script of
//! commutator and conjugation steps.

use permprod::transform::{self, ceil_log2, StepKind};
use permprod::Permutation;

fn main() -> permprod::Result<()> {
    // Any nonidentity even element collapses to a double transposition
    // in exactly two commutator steps.
    let t = 9;
    for s in ["(1 2)(3 4)", "(1 2 3)", "(1 2 3 4 5)", "(1 2 3 4)(5 6)", "(1 2 3)(4 5 6)"] {
        let a = Permutation::parse(t, s)?;
        let script = transform::to_double_transposition(&a)?;
        println!("{s:<16} -> {:<14} via", script.target().to_string());
        for step in script.steps() {
            let kind = match step.kind() {
                StepKind::Comm => "comm",
                StepKind::Conj => "conj",
            };
            println!("    {kind} {}  # {}", step.gamma(), step.label());
        }
    }
    println!();

    // Full conversion reaches an arbitrary even target; the commutator
    // count stays within ceil(log2 t) plus a constant.
    let t = 10;
    let pairs = [
        ("(1 2 3)", "(1 2 3 4 5)"),
        ("(1 2)(3 4)", "(1 2 3 4 5 6 7 8 9)"),
        ("(1 2 3 4 5 6 7)", "(1 2)(3 4)"),
        ("(1 2 3)", "(1 2 3 4)(5 6 7 8)"),
    ];
    for (from, to) in pairs {
        let a = Permutation::parse(t, from)?;
        let b = Permutation::parse(t, to)?;
        let script = transform::convert(&a, &b)?;
        assert!(script.check());
        assert_eq!(script.apply(&a)?, b);
        println!(
            "{from:<20} -> {to:<28} steps {:>2}  comm {:>2}  (cap {})",
            script.steps().len(),
            script.comm_count(),
            ceil_log2(t) + transform::CONVERT_COMM_MARGIN
        );
    }
    println!();

    // The script survives a round trip through its text form.
    let a = Permutation::parse(t, "(1 2 3)")?;
    let b = Permutation::parse(t, "(1 2 3 4)(5 6)")?;
    let script = transform::convert(&a, &b)?;
    let reparsed = transform::TransformScript::parse(&script.to_text())?;
    assert_eq!(reparsed.apply(&a)?, b);
    println!("round-tripped script:\n{}", script.to_text());
    Ok(())
}
