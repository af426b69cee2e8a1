#![allow(dead_code)]

use nlets::graphs::{complete_graph, cycle_graph, random_regular, Graph};

/// Petersen graph: outer 5-cycle, inner pentagram, spokes.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, 5 + i));
    }
    Graph::new(10, edges).unwrap()
}

/// Regular graphs with at most 14 vertices: cycles, complete graphs, Petersen and
/// seeded random regular graphs of degree 3, 4 and 6.
pub fn regular_corpus() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 3..=14 {
        out.push((format!("cycle{n}"), cycle_graph(n)));
    }
    for n in 4..=8 {
        out.push((format!("complete{n}"), complete_graph(n)));
    }
    out.push(("petersen".into(), petersen()));
    for (d, ns) in [
        (3usize, [8usize, 10, 12, 14]),
        (4, [8, 10, 12, 14]),
        (6, [8, 10, 12, 14]),
    ] {
        for n in ns {
            for seed in 0..2 {
                out.push((
                    format!("rr{n}d{d}s{seed}"),
                    random_regular(n, d, seed).unwrap(),
                ));
            }
        }
    }
    out
}

/// Fifty seeded connected graphs with `n <= 30` and degree 2, 3 or 6.
pub fn product_corpus() -> Vec<(String, usize, Graph)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 50 {
        let i = out.len();
        let d = [2usize, 3, 6][i % 3];
        let n = 8 + (i * 7) % 23;
        let n = if (n * d) % 2 == 1 { n + 1 } else { n }.min(30);
        seed += 1;
        if let Ok(g) = random_regular(n, d, seed) {
            out.push((format!("rr{n}d{d}s{seed}"), d, g));
        }
    }
    out
}
