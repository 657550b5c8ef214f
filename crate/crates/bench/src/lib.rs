//! Fixed inputs shared by the benchmarks.

use matchboost::corpus::{blossom_gadget, erdos_renyi, planted};
use matchboost::Graph;

/// `(label, graph)` pairs of increasing size.
pub fn inputs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in [64, 256] {
        out.push((format!("er-{n}"), erdos_renyi(n, 4.0 / n as f64, 11)));
        out.push((format!("planted-{n}"), planted(n, 2.0 / n as f64, 11)));
    }
    out.push(("gadget-16".into(), blossom_gadget(16, 11)));
    out
}
