//! Graphviz rendering of labeled trellises.
//!
//! Vertex `v` of class `i` is named `"i:label"`. Every class is drawn as its
//! own rank, left to right. For a tail-biting trellis class 0 is drawn a
//! second time as class `n` so the closing section reads left to right.

use std::fmt::Write;

use trellis_core::{Trellis, Vector};

use crate::error::Result;

fn quote(class: usize, label: &Vector) -> String {
    format!("\"{class}:{}\"", label.to_digits())
}

pub fn to_dot(t: &Trellis) -> Result<String> {
    let n = t.depth();
    let num = t.num_classes();
    let labels = |c: usize| t.labels(c % num).ok_or(trellis_core::Error::Unlabeled);
    let mut out = String::new();
    writeln!(out, "digraph trellis {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle, fontsize=10];").unwrap();
    for c in 0..=n {
        let names: Vec<String> = labels(c)?.iter().map(|l| quote(c, l)).collect();
        writeln!(
            out,
            "  subgraph rank_{c} {{ rank=same; {}; }}",
            names.join("; ")
        )
        .unwrap();
    }
    for (i, sec) in t.sections().iter().enumerate() {
        let (from, to) = (labels(i)?, labels(i + 1)?);
        for e in sec {
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                quote(i, &from[e.from]),
                quote(i + 1, &to[e.to]),
                e.symbol
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}
