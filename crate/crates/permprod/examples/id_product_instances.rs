//! From a program-input pair to a batch of product vectors over a
//! slightly larger alternating group: the pair accepts iff some vector
//! multiplies to the identity.

use permprod::bp::{self, BpNode, BranchingProgram};
use permprod::reduce;

fn main() -> permprod::Result<()> {
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

    for x in [[true, false, true], [false, true, true]] {
        let label: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let eval = program.eval(&x)?;
        let sigma = bp::encode(&program, &x)?;
        let instances = reduce::bp_to_id_instances(&program, &x)?;
        println!(
            "x={label}: eval {eval}, dart degree {}, {} instances of degree {} length {}",
            sigma.degree(),
            instances.len(),
            instances[0].degree(),
            instances[0].len()
        );
        let mut identity_hits = 0;
        for (k, inst) in instances.iter().enumerate() {
            // Every entry is even, so these are legal inputs for the
            // downstream single-element machinery.
            assert!(inst.all_even());
            let fold = inst.fold();
            if fold.is_identity() {
                identity_hits += 1;
                println!("  instance {k}: product = identity");
            } else {
                println!("  instance {k}: product = {fold}");
            }
        }
        let accepted = eval == bp::Decision::Accept;
        assert_eq!(identity_hits > 0, accepted);
        println!(
            "  -> {} ({} identity products)\n",
            if accepted { "accepted" } else { "rejected" },
            identity_hits
        );
    }
    Ok(())
}
