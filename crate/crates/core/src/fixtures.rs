//! Small canonical networks used by tests, the demo and the witness constructions.

use serde::Serialize;

use crate::graph::MultiGraph;

/// Placement of the second origin in the three-vertex gadget: the two OD
/// pairs share either the first origin or the first destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum F1Variant {
    Origin2AtOrigin1,
    Origin2AtDestination1,
}

impl F1Variant {
    pub const ALL: [F1Variant; 2] = [
        F1Variant::Origin2AtOrigin1,
        F1Variant::Origin2AtDestination1,
    ];
}

/// Three vertices `u, v, w`; `e1 = uv`, `e2 = uw`, `e3 = wv`, `e4 = wv`.
/// OD pair 0 is `(u, v)`; OD pair 1 ends at `w` and starts at `u` or `v`.
pub fn f1_graph(variant: F1Variant) -> MultiGraph {
    let origin2 = match variant {
        F1Variant::Origin2AtOrigin1 => "u",
        F1Variant::Origin2AtDestination1 => "v",
    };
    MultiGraph::builder()
        .vertex("u")
        .vertex("v")
        .vertex("w")
        .edge("e1", "u", "v")
        .edge("e2", "u", "w")
        .edge("e3", "w", "v")
        .edge("e4", "w", "v")
        .od("u", "v")
        .od(origin2, "w")
        .build()
        .expect("static fixture")
}

/// Triangle whose two OD pairs share one terminal.
pub fn triangle_two_od() -> MultiGraph {
    cycle(3, &[(0, 1), (0, 2)])
}

/// Cycle on `c0..c{n-1}` with edges `k{i} = (c{i}, c{i+1 mod n})`.
pub fn cycle(n: usize, od: &[(usize, usize)]) -> MultiGraph {
    let mut b = MultiGraph::builder();
    for i in 0..n {
        b = b.vertex(format!("c{i}"));
    }
    for i in 0..n {
        b = b.edge(
            format!("k{i}"),
            format!("c{i}"),
            format!("c{}", (i + 1) % n),
        );
    }
    for &(o, d) in od {
        b = b.od(format!("c{o}"), format!("c{d}"));
    }
    b.build().expect("static fixture")
}

/// Cycle `o-a-d-b-o` plus the bridge `a-b`, single OD `(o, d)`.
pub fn wheatstone() -> MultiGraph {
    MultiGraph::builder()
        .edge("oa", "o", "a")
        .edge("ad", "a", "d")
        .edge("ob", "o", "b")
        .edge("bd", "b", "d")
        .edge("ab", "a", "b")
        .od("o", "d")
        .build()
        .expect("static fixture")
}

/// Two parallel edges between `s` and `t`.
pub fn pigou() -> MultiGraph {
    MultiGraph::builder()
        .edge("top", "s", "t")
        .edge("bottom", "s", "t")
        .od("s", "t")
        .build()
        .expect("static fixture")
}

/// Two parallel pairs in series: `o =a,b= m =c,d= d`.
pub fn series_of_parallel_pairs() -> MultiGraph {
    MultiGraph::builder()
        .edge("a", "o", "m")
        .edge("b", "o", "m")
        .edge("c", "m", "d")
        .edge("e", "m", "d")
        .od("o", "d")
        .build()
        .expect("static fixture")
}

/// Two copies of [`series_of_parallel_pairs`] connected in parallel.
pub fn parallel_doubling() -> MultiGraph {
    MultiGraph::builder()
        .edge("a1", "o", "m1")
        .edge("b1", "o", "m1")
        .edge("c1", "m1", "d")
        .edge("e1", "m1", "d")
        .edge("a2", "o", "m2")
        .edge("b2", "o", "m2")
        .edge("c2", "m2", "d")
        .edge("e2", "m2", "d")
        .od("o", "d")
        .build()
        .expect("static fixture")
}

/// Chain `s =p= u [F1 block on u,v,w] v =q= t`. OD 0 is `(s, t)` and crosses
/// the middle block between `u` and `v`; OD 1 is `(s, w)` and uses it between
/// `u` and `w`.
pub fn chain_with_f1_middle() -> MultiGraph {
    MultiGraph::builder()
        .edge("p1", "s", "u")
        .edge("p2", "s", "u")
        .edge("e1", "u", "v")
        .edge("e2", "u", "w")
        .edge("e3", "w", "v")
        .edge("e4", "w", "v")
        .edge("q1", "v", "t")
        .edge("q2", "v", "t")
        .od("s", "t")
        .od("s", "w")
        .build()
        .expect("static fixture")
}

/// Complete graph on `a, b, c, d` with OD pairs `(a, b)` and `(a, c)`.
pub fn k4_three_terminals() -> MultiGraph {
    MultiGraph::builder()
        .edge("ab", "a", "b")
        .edge("ac", "a", "c")
        .edge("ad", "a", "d")
        .edge("bc", "b", "c")
        .edge("bd", "b", "d")
        .edge("cd", "c", "d")
        .od("a", "b")
        .od("a", "c")
        .build()
        .expect("static fixture")
}

/// Two OD pairs whose chains share a middle parallel-pair block with the same
/// terminal set, traversed in opposite orders.
pub fn coincident_chain() -> MultiGraph {
    MultiGraph::builder()
        .edge("l1", "a", "x")
        .edge("l2", "a", "x")
        .edge("m1", "x", "y")
        .edge("m2", "x", "y")
        .edge("r1", "y", "b")
        .edge("r2", "y", "b")
        .edge("l3", "c", "x")
        .edge("r3", "y", "d")
        .od("a", "b")
        .od("d", "c")
        .build()
        .expect("static fixture")
}
