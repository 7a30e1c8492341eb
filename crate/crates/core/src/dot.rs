//! Graphviz output for a spectrum: the specialization order on points and
//! the Hasse diagram of the closed-set lattice.

use std::fmt::Write;

use crate::topology::Spectrum;

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

fn header(name: &str, space: &Spectrum) -> String {
    format!(
        "digraph {} {{\n  label={};\n",
        name,
        quote(&format!("{}({})", space.kind(), space.ring().label()))
    )
}

/// One node per point, labelled by its element list; an edge `p -> q` when
/// `q` lies in the closure of `p` and differs from it.
pub fn specialization_dot(space: &Spectrum) -> String {
    let mut out = header("specialization", space);
    for p in 0..space.len() {
        let _ = writeln!(
            out,
            "  p{} [label={}];",
            p,
            quote(&space.point_ideal(p).to_string())
        );
    }
    for (p, q) in space.specialization_edges() {
        let _ = writeln!(out, "  p{p} -> p{q};");
    }
    out.push_str("}\n");
    out
}

/// One node per distinct closed set, labelled by the element lists of its
/// points; edges are covering relations `smaller -> larger`.
pub fn closed_lattice_dot(space: &Spectrum) -> String {
    let closed = space.topology().closed_sets();
    let mut out = header("closed_sets", space);
    for (i, c) in closed.iter().enumerate() {
        let label = if c.points.is_clear() {
            "∅".to_string()
        } else {
            c.points
                .ones()
                .map(|p| space.point_ideal(p).to_string())
                .collect::<Vec<_>>()
                .join("; ")
        };
        let _ = writeln!(out, "  c{} [label={}];", i, quote(&label));
    }
    let below = |a: usize, b: usize| a != b && closed[a].points.is_subset(&closed[b].points);
    for a in 0..closed.len() {
        for b in 0..closed.len() {
            if below(a, b) && !(0..closed.len()).any(|m| below(a, m) && below(m, b)) {
                let _ = writeln!(out, "  c{a} -> c{b};");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};
    use crate::topology::{spectrum, SpectrumKind};

    #[test]
    fn z12_graphs() {
        let r = build_ring(&RingSpec::zmod(12)).unwrap();
        let s = spectrum(&r, SpectrumKind::QPrim).unwrap();
        let spec = specialization_dot(&s);
        assert!(spec.starts_with("digraph specialization {"));
        assert!(spec.contains("p2 [label=\"{0,4,8}\"];"));
        // (2) and (4) specialize to each other
        assert!(spec.contains("p0 -> p2;") && spec.contains("p2 -> p0;"));
        assert_eq!(spec.matches("->").count(), 2);

        let lattice = closed_lattice_dot(&s);
        assert_eq!(lattice.matches("[label=").count(), 4);
        // ∅ < {(3)}, ∅ < {(2),(4)}, both < full
        assert_eq!(lattice.matches("->").count(), 4);
        assert!(lattice.contains("label=\"∅\""));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
