//! Graphviz output: Hasse diagrams of lattices, specialisation orders of
//! spaces, and bundles drawn as stalk clusters over their base.

use std::fmt::Write;

use rlsheaf_core::bundle::Bundle;
use rlsheaf_core::fintop::FiniteSpace;
use rlsheaf_core::rlcore::ResiduatedLattice;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
fn covers(n: usize, less: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if less(x, y) && !(0..n).any(|z| less(x, z) && less(z, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

/// `x` lies in every open containing `y` but not conversely.
fn specialises(s: &FiniteSpace, x: usize, y: usize) -> bool {
    s.nbhd(y).contains(x) && !s.nbhd(x).contains(y)
}

pub fn lattice(name: &str, l: &ResiduatedLattice) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=plaintext];\n", quote(name));
    for e in l.elements() {
        writeln!(out, "  {};", quote(e)).unwrap();
    }
    for (x, y) in covers(l.len(), |x, y| x != y && l.leq(x, y)) {
        writeln!(out, "  {} -> {} [arrowhead=none];", quote(l.name(x)), quote(l.name(y))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Edges point from a point up to the points it specialises. Points with the
/// same least neighbourhood are drawn with a dashed double edge.
pub fn space(name: &str, s: &FiniteSpace) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=circle];\n", quote(name));
    space_body(&mut out, s, "", "  ");
    out.push_str("}\n");
    out
}

fn space_body(out: &mut String, s: &FiniteSpace, prefix: &str, indent: &str) {
    let n = s.len();
    let id = |i: usize| quote(&format!("{prefix}{}", s.name(i)));
    for i in 0..n {
        writeln!(out, "{indent}{} [label={}];", id(i), quote(s.name(i))).unwrap();
    }
    for (x, y) in covers(n, |x, y| specialises(s, y, x)) {
        writeln!(out, "{indent}{} -> {} [arrowhead=none];", id(x), id(y)).unwrap();
    }
    for x in 0..n {
        for y in x + 1..n {
            if s.nbhd(x) == s.nbhd(y) {
                writeln!(out, "{indent}{} -> {} [dir=both, style=dashed];", id(x), id(y)).unwrap();
            }
        }
    }
}

/// One cluster per stalk, the base below, and dotted projection edges.
pub fn bundle(name: &str, b: &Bundle) -> String {
    let total = b.total();
    let base = b.base();
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  compound=true;\n", quote(name));
    for p in 0..base.len() {
        writeln!(
            out,
            "  subgraph {} {{\n    label={};",
            quote(&format!("cluster_{}", base.name(p))),
            quote(base.name(p))
        )
        .unwrap();
        for t in b.stalk_points(p).iter() {
            writeln!(
                out,
                "    {} [label={}];",
                quote(&format!("t:{}", total.name(t))),
                quote(total.name(t))
            )
            .unwrap();
        }
        out.push_str("  }\n");
    }
    let tn = total.len();
    for (x, y) in covers(tn, |x, y| specialises(total, y, x)) {
        let (a, c) = (format!("t:{}", total.name(x)), format!("t:{}", total.name(y)));
        writeln!(out, "  {} -> {} [arrowhead=none];", quote(&a), quote(&c)).unwrap();
    }
    out.push_str("  subgraph \"cluster_base\" {\n    label=\"base\";\n");
    space_body(&mut out, base, "b:", "    ");
    out.push_str("  }\n");
    for t in 0..tn {
        let p = b.proj().apply(t);
        writeln!(
            out,
            "  {} -> {} [style=dotted];",
            quote(&format!("t:{}", total.name(t))),
            quote(&format!("b:{}", base.name(p)))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rlsheaf_core::fixtures as fx;

    #[test]
    fn hasse_of_a4_has_four_edges() {
        let d = lattice("A4", &fx::a4());
        assert_eq!(d.matches("arrowhead=none").count(), 4);
        assert!(d.contains("\"0\" -> \"a\""));
        assert!(!d.contains("\"0\" -> \"1\""));
    }

    #[test]
    fn sierpinski_has_one_edge() {
        let d = space("S", &fx::sierpinski());
        assert!(d.contains("\"y\" -> \"x\""));
        assert_eq!(d.matches("->").count(), 1);
    }

    #[test]
    fn quotes_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
