//! Deterministic branching programs and their compilation into a single
//! permutation whose cycle structure answers the program.
//!
//! Fixing an input projects each internal node down to one outgoing edge.
//! Because the program is acyclic, the resulting undirected graph is a
//! forest in which every tree contains exactly one sink, so the program
//! accepts exactly when the start node and the accept sink share a tree.
//! The compiled permutation acts on the darts (oriented edge sides) of
//! that forest, sending each dart entering a node to the dart leaving it
//! along the next incident edge in the node's rotation. Every tree's darts
//! then form a single cycle (its closed tour), which turns tree
//! connectivity into the cycle structure of one permutation. Two pendant
//! edges pin down a start dart and an accept dart; those are relabeled to
//! the first and last point.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Accept => write!(f, "accept"),
            Decision::Reject => write!(f, "reject"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpNode {
    /// Reads 1-based variable `var`; steps to `succ0` or `succ1`.
    Internal {
        var: usize,
        succ0: usize,
        succ1: usize,
    },
    Accept,
    Reject,
}

/// A deterministic branching program: nodes `0..s`, a start node, internal
/// nodes branching on input bits, sinks deciding. Construction validates
/// acyclicity and that exactly one accept sink exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingProgram {
    nodes: Vec<BpNode>,
    var_count: usize,
    start: usize,
    accept: usize,
}

impl BranchingProgram {
    pub fn new(nodes: Vec<BpNode>, var_count: usize, start: usize) -> Result<BranchingProgram> {
        let s = nodes.len();
        if s == 0 {
            return Err(Error::MalformedProgram("no nodes".into()));
        }
        if start >= s {
            return Err(Error::MalformedProgram(format!(
                "start node {start} out of range 0..{s}"
            )));
        }
        let mut accept = None;
        for (i, node) in nodes.iter().enumerate() {
            match node {
                BpNode::Internal { var, succ0, succ1 } => {
                    if *var == 0 || *var > var_count {
                        return Err(Error::MalformedProgram(format!(
                            "node {i} reads variable {var}, valid range is 1..={var_count}"
                        )));
                    }
                    if *succ0 >= s || *succ1 >= s {
                        return Err(Error::MalformedProgram(format!(
                            "node {i} has successor out of range 0..{s}"
                        )));
                    }
                }
                BpNode::Accept => {
                    if accept.replace(i).is_some() {
                        return Err(Error::MalformedProgram(
                            "more than one accept sink".into(),
                        ));
                    }
                }
                BpNode::Reject => {}
            }
        }
        let accept =
            accept.ok_or_else(|| Error::MalformedProgram("no accept sink".into()))?;

        // Kahn's algorithm over the union of both successor settings.
        let mut indegree = vec![0usize; s];
        for node in &nodes {
            if let BpNode::Internal { succ0, succ1, .. } = node {
                indegree[*succ0] += 1;
                indegree[*succ1] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..s).filter(|&i| indegree[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop() {
            seen += 1;
            if let BpNode::Internal { succ0, succ1, .. } = nodes[u] {
                for v in [succ0, succ1] {
                    indegree[v] -= 1;
                    if indegree[v] == 0 {
                        queue.push(v);
                    }
                }
            }
        }
        if seen != s {
            return Err(Error::MalformedProgram(
                "successor graph contains a cycle".into(),
            ));
        }
        Ok(BranchingProgram {
            nodes,
            var_count,
            start,
            accept,
        })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept_node(&self) -> usize {
        self.accept
    }

    pub fn nodes(&self) -> &[BpNode] {
        &self.nodes
    }

    /// Follows the projected successors from the start node; acyclicity
    /// bounds the walk by the node count.
    pub fn eval(&self, x: &[bool]) -> Result<Decision> {
        if x.len() != self.var_count {
            return Err(Error::LengthMismatch {
                expected: self.var_count,
                got: x.len(),
            });
        }
        let mut at = self.start;
        for _ in 0..=self.nodes.len() {
            match self.nodes[at] {
                BpNode::Internal { var, succ0, succ1 } => {
                    at = if x[var - 1] { succ1 } else { succ0 };
                }
                BpNode::Accept => return Ok(Decision::Accept),
                BpNode::Reject => return Ok(Decision::Reject),
            }
        }
        unreachable!("acyclic program cannot walk more than size steps");
    }

    /// Header `bp s n start accept`, then one line per node:
    /// `i var v0 v1` or `i sink accept|reject`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "bp {} {} {} {}\n",
            self.size(),
            self.var_count,
            self.start,
            self.accept
        );
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                BpNode::Internal { var, succ0, succ1 } => {
                    out.push_str(&format!("{i} {var} {succ0} {succ1}\n"));
                }
                BpNode::Accept => out.push_str(&format!("{i} sink accept\n")),
                BpNode::Reject => out.push_str(&format!("{i} sink reject\n")),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<BranchingProgram> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedProgram("empty program".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 || h[0] != "bp" {
            return Err(Error::Parse(format!("bad program header: {header}")));
        }
        let parse_num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number: {s}")))
        };
        let s = parse_num(h[1])?;
        let n = parse_num(h[2])?;
        let start = parse_num(h[3])?;
        let accept = parse_num(h[4])?;
        let mut nodes: Vec<Option<BpNode>> = vec![None; s];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() < 2 {
                return Err(Error::Parse(format!("bad node line: {line}")));
            }
            let id = parse_num(f[0])?;
            if id >= s {
                return Err(Error::MalformedProgram(format!(
                    "node id {id} out of range 0..{s}"
                )));
            }
            let node = match (f.len(), f[1]) {
                (3, "sink") => match f[2] {
                    "accept" => BpNode::Accept,
                    "reject" => BpNode::Reject,
                    other => return Err(Error::Parse(format!("bad sink kind: {other}"))),
                },
                (4, _) => BpNode::Internal {
                    var: parse_num(f[1])?,
                    succ0: parse_num(f[2])?,
                    succ1: parse_num(f[3])?,
                },
                _ => return Err(Error::Parse(format!("bad node line: {line}"))),
            };
            if nodes[id].replace(node).is_some() {
                return Err(Error::MalformedProgram(format!("node {id} defined twice")));
            }
        }
        let nodes: Vec<BpNode> = nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.ok_or(Error::MalformedProgram(format!("node {i} missing"))))
            .collect::<Result<_>>()?;
        let bp = BranchingProgram::new(nodes, n, start)?;
        if bp.accept != accept {
            return Err(Error::MalformedProgram(format!(
                "header names accept node {accept}, nodes give {}",
                bp.accept
            )));
        }
        Ok(bp)
    }
}

/// Parses a string like `1011` into bits.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("bad bit: {other}"))),
        })
        .collect()
}

/// The compiled form of one `(program, input)` pair: a permutation whose
/// cycle structure holds the answer, plus the dart table it was built from.
#[derive(Debug, Clone)]
pub struct EncodedInstance {
    sigma: Permutation,
    start_point: usize,
    accept_point: usize,
    darts: Vec<(usize, usize)>,
}

impl EncodedInstance {
    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn degree(&self) -> usize {
        self.sigma.degree()
    }

    /// Always 1 after relabeling.
    pub fn start_point(&self) -> usize {
        self.start_point
    }

    /// Always the degree after relabeling.
    pub fn accept_point(&self) -> usize {
        self.accept_point
    }

    /// Point `p` came from the oriented edge `darts()[p-1]`.
    pub fn darts(&self) -> &[(usize, usize)] {
        &self.darts
    }

    /// The answer the cycle structure encodes.
    pub fn accepts(&self) -> bool {
        same_cycle(&self.sigma, self.start_point, self.accept_point)
            .expect("points are in range by construction")
    }
}

/// True iff `a` and `b` lie on one cycle of `p` (fixed points count as
/// singleton cycles).
pub fn same_cycle(p: &Permutation, a: usize, b: usize) -> Result<bool> {
    let t = p.degree();
    for q in [a, b] {
        if q == 0 || q > t {
            return Err(Error::PointOutOfRange {
                point: q,
                degree: t,
            });
        }
    }
    if a == b {
        return Ok(true);
    }
    let mut at = p.apply(a);
    while at != a {
        if at == b {
            return Ok(true);
        }
        at = p.apply(at);
    }
    Ok(false)
}

/// Compiles a program and input into an [`EncodedInstance`].
///
/// The degree is `2 · (#internal nodes + 2)`, at most `2(s+2)`. The start
/// pendant dart becomes point 1 and the accept pendant dart the last
/// point, so `same_cycle(sigma, 1, degree)` is the program's answer.
pub fn encode(b: &BranchingProgram, x: &[bool]) -> Result<EncodedInstance> {
    if x.len() != b.var_count() {
        return Err(Error::LengthMismatch {
            expected: b.var_count(),
            got: x.len(),
        });
    }
    let s = b.size();
    let aux_start = s;
    let aux_accept = s + 1;
    let node_count = s + 2;

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, node) in b.nodes().iter().enumerate() {
        if let BpNode::Internal { var, succ0, succ1 } = node {
            let v = if x[*var - 1] { *succ1 } else { *succ0 };
            edges.push((u, v));
        }
    }
    let start_edge = edges.len();
    edges.push((aux_start, b.start()));
    let accept_edge = edges.len();
    edges.push((aux_accept, b.accept_node()));

    // Union-find guards the forest property; with the acyclicity check at
    // construction this cannot fire, but it is the correctness crux.
    let mut parent: Vec<usize> = (0..node_count).collect();
    fn find(parent: &mut Vec<usize>, mut u: usize) -> usize {
        while parent[u] != u {
            parent[u] = parent[parent[u]];
            u = parent[u];
        }
        u
    }
    for &(u, v) in &edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        debug_assert_ne!(ru, rv, "projected graph must stay a forest");
        parent[ru] = rv;
    }
    #[cfg(debug_assertions)]
    {
        // Exactly one sink per tree, the premise that makes connectivity
        // mean acceptance.
        let mut sink_count = std::collections::HashMap::new();
        for (i, node) in b.nodes().iter().enumerate() {
            if matches!(node, BpNode::Accept | BpNode::Reject) {
                *sink_count.entry(find(&mut parent, i)).or_insert(0usize) += 1;
            }
        }
        for (i, node) in b.nodes().iter().enumerate() {
            if matches!(node, BpNode::Internal { .. }) {
                debug_assert_eq!(
                    sink_count.get(&find(&mut parent, i)).copied(),
                    Some(1),
                    "tree of node {i} must contain exactly one sink"
                );
            }
        }
    }

    // Rotation at each node: incident edges sorted by neighbor id.
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); node_count];
    for (eid, &(u, v)) in edges.iter().enumerate() {
        incident[u].push((v, eid));
        incident[v].push((u, eid));
    }
    for list in &mut incident {
        list.sort_unstable();
    }

    // Dart 2e runs edges[e].0 -> edges[e].1, dart 2e+1 the reverse. The
    // tour successor of a dart into v leaves v along the next incident
    // edge after the one it arrived on.
    let dart_count = 2 * edges.len();
    let mut next_dart = vec![0usize; dart_count];
    for (eid, &(u, v)) in edges.iter().enumerate() {
        for (dart, into) in [(2 * eid, v), (2 * eid + 1, u)] {
            let list = &incident[into];
            let pos = list
                .iter()
                .position(|&(_, e)| e == eid)
                .expect("edge is incident to its endpoint");
            let (_, out_edge) = list[(pos + 1) % list.len()];
            let out_dart = if edges[out_edge].0 == into {
                2 * out_edge
            } else {
                2 * out_edge + 1
            };
            next_dart[dart] = out_dart;
        }
    }

    // Relabel darts to points: start pendant dart is 1, accept pendant
    // dart is the degree, the rest keep their relative order.
    let start_dart = 2 * start_edge;
    let accept_dart = 2 * accept_edge;
    let degree = dart_count;
    let mut point_of = vec![0usize; dart_count];
    point_of[start_dart] = 1;
    point_of[accept_dart] = degree;
    let mut next_point = 2;
    for d in 0..dart_count {
        if d != start_dart && d != accept_dart {
            point_of[d] = next_point;
            next_point += 1;
        }
    }

    let mut image = vec![0usize; degree];
    for d in 0..dart_count {
        image[point_of[d] - 1] = point_of[next_dart[d]];
    }
    let sigma = Permutation::from_images(image)?;

    let mut darts = vec![(0usize, 0usize); degree];
    for (eid, &(u, v)) in edges.iter().enumerate() {
        darts[point_of[2 * eid] - 1] = (u, v);
        darts[point_of[2 * eid + 1] - 1] = (v, u);
    }

    Ok(EncodedInstance {
        sigma,
        start_point: 1,
        accept_point: degree,
        darts,
    })
}

/// A random acyclic program: internal nodes come first and only point
/// forward, sinks sit at the top ids, and one random sink accepts.
pub fn random_program<R: Rng + ?Sized>(
    size: usize,
    var_count: usize,
    rng: &mut R,
) -> BranchingProgram {
    assert!(size >= 2 && var_count >= 1);
    let sink_count = rng.gen_range(1..=(size / 3).max(1).min(size - 1));
    let internal = size - sink_count;
    let mut nodes = Vec::with_capacity(size);
    for i in 0..internal {
        nodes.push(BpNode::Internal {
            var: rng.gen_range(1..=var_count),
            succ0: rng.gen_range(i + 1..size),
            succ1: rng.gen_range(i + 1..size),
        });
    }
    let accept = rng.gen_range(internal..size);
    for i in internal..size {
        nodes.push(if i == accept {
            BpNode::Accept
        } else {
            BpNode::Reject
        });
    }
    BranchingProgram::new(nodes, var_count, 0).expect("construction is acyclic by design")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_gate() -> BranchingProgram {
        // Reads x1: false -> reject, true -> accept.
        BranchingProgram::new(
            vec![
                BpNode::Internal {
                    var: 1,
                    succ0: 1,
                    succ1: 2,
                },
                BpNode::Reject,
                BpNode::Accept,
            ],
            1,
            0,
        )
        .unwrap()
    }

    #[test]
    fn eval_one_gate() {
        let b = one_gate();
        assert_eq!(b.eval(&[true]).unwrap(), Decision::Accept);
        assert_eq!(b.eval(&[false]).unwrap(), Decision::Reject);
        assert_eq!(
            b.eval(&[]).unwrap_err(),
            Error::LengthMismatch {
                expected: 1,
                got: 0
            }
        );
    }

    #[test]
    fn construction_rejects_malformed_programs() {
        // Cycle 0 -> 1 -> 0.
        let cyclic = BranchingProgram::new(
            vec![
                BpNode::Internal {
                    var: 1,
                    succ0: 1,
                    succ1: 1,
                },
                BpNode::Internal {
                    var: 1,
                    succ0: 0,
                    succ1: 2,
                },
                BpNode::Accept,
            ],
            1,
            0,
        );
        assert!(matches!(cyclic, Err(Error::MalformedProgram(_))));
        let no_accept =
            BranchingProgram::new(vec![BpNode::Reject], 1, 0);
        assert!(matches!(no_accept, Err(Error::MalformedProgram(_))));
        let two_accepts =
            BranchingProgram::new(vec![BpNode::Accept, BpNode::Accept], 1, 0);
        assert!(matches!(two_accepts, Err(Error::MalformedProgram(_))));
        let bad_var = BranchingProgram::new(
            vec![
                BpNode::Internal {
                    var: 3,
                    succ0: 1,
                    succ1: 1,
                },
                BpNode::Accept,
            ],
            2,
            0,
        );
        assert!(matches!(bad_var, Err(Error::MalformedProgram(_))));
    }

    #[test]
    fn same_cycle_examples() {
        let p = Permutation::parse(3, "(1 2 3)").unwrap();
        assert!(same_cycle(&p, 1, 3).unwrap());
        let q = Permutation::parse(4, "(1 2)(3 4)").unwrap();
        assert!(!same_cycle(&q, 1, 3).unwrap());
        assert!(same_cycle(&q, 2, 2).unwrap());
        assert_eq!(
            same_cycle(&q, 0, 1).unwrap_err(),
            Error::PointOutOfRange {
                point: 0,
                degree: 4
            }
        );
    }

    #[test]
    fn encode_one_gate_both_inputs() {
        let b = one_gate();
        let yes = encode(&b, &[true]).unwrap();
        assert!(yes.accepts());
        assert_eq!(yes.degree(), 6);
        let no = encode(&b, &[false]).unwrap();
        assert!(!no.accepts());
        // Pendant darts land on the pinned points.
        assert_eq!(yes.darts()[0], (3, 0));
        assert_eq!(yes.darts()[yes.degree() - 1], (4, 2));
    }

    #[test]
    fn encoded_degree_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let b = random_program(20, 4, &mut rng);
            let x: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
            let inst = encode(&b, &x).unwrap();
            assert!(inst.degree() <= 2 * (b.size() + 2));
            assert_eq!(inst.start_point(), 1);
            assert_eq!(inst.accept_point(), inst.degree());
        }
    }

    #[test]
    fn tour_cycles_partition_trees() {
        // Each tree's darts form exactly one cycle, and a dart never maps
        // to itself, so the cycle count of sigma equals the number of
        // trees that carry an edge.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let b = random_program(15, 3, &mut rng);
            let x: Vec<bool> = (0..3).map(|_| rng.gen()).collect();
            let inst = encode(&b, &x).unwrap();
            assert_eq!(inst.sigma().moved_count(), inst.degree());
            let mut edge_nodes: std::collections::HashSet<usize> =
                std::collections::HashSet::new();
            for &(u, v) in inst.darts() {
                edge_nodes.insert(u);
                edge_nodes.insert(v);
            }
            let edges = inst.degree() / 2;
            let trees = edge_nodes.len() - edges;
            assert_eq!(inst.sigma().decompose().cycles().len(), trees);
        }
    }

    #[test]
    fn oracle_equivalence_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let size = rng.gen_range(2..=30);
            let b = random_program(size, 8, &mut rng);
            for bits in 0..256u32 {
                let x: Vec<bool> = (0..8).map(|i| bits >> i & 1 == 1).collect();
                let inst = encode(&b, &x).unwrap();
                assert_eq!(
                    inst.accepts(),
                    b.eval(&x).unwrap() == Decision::Accept,
                    "program {b:?} input {x:?}"
                );
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let b = random_program(12, 4, &mut rng);
            let parsed = BranchingProgram::parse(&b.to_text()).unwrap();
            assert_eq!(parsed, b);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(BranchingProgram::parse("").is_err());
        assert!(BranchingProgram::parse("bp 1 1 0").is_err());
        assert!(BranchingProgram::parse("bp 2 1 0 1\n0 1 1 1\n1 sink maybe").is_err());
        assert!(BranchingProgram::parse("bp 2 1 0 1\n0 1 1 1").is_err());
        // Header accept disagrees with the nodes.
        assert!(BranchingProgram::parse("bp 2 1 0 0\n0 1 1 1\n1 sink accept").is_err());
    }

    #[test]
    fn parse_bits_examples() {
        assert_eq!(parse_bits("101").unwrap(), vec![true, false, true]);
        assert!(parse_bits("10x").is_err());
    }
}
