//! Deterministic text rendering. Every number is printed with nine
//! significant digits.

use ibp_core::equilibrium::EquilibriumResult;
use ibp_core::graph::{MultiGraph, VertexId};

/// Nine significant digits, fixed notation for magnitudes in `[1e-4, 1e9)`
/// and scientific otherwise. Negative zero prints as zero.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let scientific = format!("{x:.8e}");
    // exponent after rounding, so 0.99999999999 counts as magnitude 0
    let magnitude: i32 = scientific
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific format has an exponent");
    let s = if (-4..9).contains(&magnitude) {
        format!("{:.*}", (8 - magnitude) as usize, x)
    } else {
        scientific
    };
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn edge_list(
    g: &MultiGraph,
    edges: impl IntoIterator<Item = ibp_core::graph::EdgeId>,
) -> String {
    let names: Vec<&str> = edges.into_iter().map(|e| g.edge_name(e)).collect();
    if names.is_empty() {
        "(none)".to_string()
    } else {
        names.join(" ")
    }
}

pub fn vertex(g: &MultiGraph, v: VertexId) -> &str {
    g.vertex_name(v)
}

/// Fixed-width table with left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("  {}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Per-type latencies, path flows, edge flows and the Wardrop violation.
pub fn equilibrium(g: &MultiGraph, rates: &[f64], result: &EquilibriumResult) -> String {
    let mut out = format!(
        "solver: {}\niterations: {}\n",
        result.solver, result.iterations
    );
    out.push_str("types:\n");
    let rows: Vec<Vec<String>> = result
        .type_latencies
        .iter()
        .enumerate()
        .map(|(j, l)| vec![j.to_string(), num(rates[j]), num(*l)])
        .collect();
    out.push_str(&table(&["type", "rate", "latency"], &rows));
    out.push_str("path flows:\n");
    let mut rows = Vec::new();
    for (j, paths) in result.paths.iter().enumerate() {
        for (p, f) in paths.iter().zip(&result.path_flows[j]) {
            let cost: f64 = p.iter().map(|e| result.edge_latencies[e.0]).sum();
            rows.push(vec![
                j.to_string(),
                edge_list(g, p.iter().copied()),
                num(*f),
                num(cost),
            ]);
        }
    }
    out.push_str(&table(&["type", "path", "flow", "latency"], &rows));
    out.push_str("edges:\n");
    let rows: Vec<Vec<String>> = g
        .edge_ids()
        .map(|e| {
            vec![
                g.edge_name(e).to_string(),
                num(result.edge_flows[e.0]),
                num(result.edge_latencies[e.0]),
            ]
        })
        .collect();
    out.push_str(&table(&["edge", "flow", "latency"], &rows));
    out.push_str(&format!(
        "max Wardrop violation: {}\n",
        num(result.max_wardrop_violation)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(47.0), "47.0000000");
        assert_eq!(num(1.0), "1.00000000");
        assert_eq!(num(0.5), "0.500000000");
        assert_eq!(num(-3.25), "-3.25000000");
        assert_eq!(num(123456789.0), "123456789");
        assert_eq!(num(1e-9), "1.00000000e-9");
        assert_eq!(num(2.5e12), "2.50000000e12");
        assert_eq!(num(0.0), "0.00000000");
        assert_eq!(num(0.99999999999), "1.00000000");
        assert_eq!(num(999999999.7), "1.00000000e9");
        assert_eq!(num(-1e-300 * 0.0), "0.00000000");
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "  a    bb\n  xyz  1\n");
    }
}
