//! Compiling a branching program into a single permutation whose cycle
//! structure answers acceptance.

use permprod::bp::{self, BpNode, BranchingProgram};

fn main() -> permprod::Result<()> {
    // x1 AND (x2 OR x3), as a DAG with shared sinks.
    let program = BranchingProgram::new(
        vec![
            BpNode::Internal { var: 1, succ0: 4, succ1: 1 },
            BpNode::Internal { var: 2, succ0: 2, succ1: 3 },
            BpNode::Internal { var: 3, succ0: 4, succ1: 3 },
            BpNode::Accept,
            BpNode::Reject,
        ],
        3,
        0,
    )?;
    println!("{}", program.to_text());

    println!("{:<6} {:<8} {:<8} {:<7} {}", "x", "eval", "cycle", "degree", "sigma");
    for bits in 0..8u32 {
        let x: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
        let label: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let inst = bp::encode(&program, &x)?;
        let eval = program.eval(&x)?;
        let cycle = if inst.accepts() { "accept" } else { "reject" };
        assert_eq!(eval.to_string(), cycle);
        println!(
            "{label:<6} {:<8} {cycle:<8} {:<7} {}",
            eval.to_string(),
            inst.degree(),
            inst.sigma()
        );
    }
    println!();

    // The dart count is linear in the program size: two darts per edge
    // of the projected forest plus two pendant markers.
    let inst = bp::encode(&program, &[true, false, true])?;
    println!(
        "start dart {} and accept dart {} share a cycle iff the walk accepts",
        inst.start_point(),
        inst.accept_point()
    );
    println!(
        "same_cycle(sigma, {}, {}) = {}",
        inst.start_point(),
        inst.accept_point(),
        bp::same_cycle(inst.sigma(), inst.start_point(), inst.accept_point())?
    );
    Ok(())
}
