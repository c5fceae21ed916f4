//! Shared inputs for the benchmarks.

use mqe_core::systems;
use mqe_core::{build_polyhedron, parse_system, NewtonPolyhedron, SymbolSystem};

/// A bundled system with its polyhedron.
pub fn fixture(name: &str) -> (SymbolSystem, NewtonPolyhedron) {
    let b = systems::bundled(name).unwrap_or_else(|| panic!("no bundled system {name}"));
    let sys = b.system().expect("bundled systems parse");
    let f = build_polyhedron(&sys).expect("bundled systems build");
    (sys, f)
}

/// Source text with every monomial of total degree at most `degree` in
/// `dim` variables, coefficients `1..`.
pub fn dense_source(dim: usize, degree: u32) -> String {
    let mut terms = Vec::new();
    let mut e = vec![0u32; dim];
    loop {
        if e.iter().sum::<u32>() <= degree {
            let mono: Vec<String> = e.iter().enumerate().filter(|(_, &a)| a > 0).map(|(j, a)| format!("xi{}^{a}", j + 1)).collect();
            let c = terms.len() + 1;
            terms.push(if mono.is_empty() { c.to_string() } else { format!("{c}*{}", mono.join("*")) });
        }
        let mut j = 0;
        loop {
            if j == dim {
                return terms.join(" + ");
            }
            e[j] += 1;
            if e[j] <= degree {
                break;
            }
            e[j] = 0;
            j += 1;
        }
    }
}

pub fn dense_system(dim: usize, degree: u32) -> SymbolSystem {
    parse_system(&dense_source(dim, degree), Some(dim)).expect("dense source parses")
}
