//! Bundled example systems.

use crate::error::Result;
use crate::symbol::{parse_system, SymbolSystem};

#[derive(Clone, Copy, Debug)]
pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
    /// Expected multi-quasi-ellipticity, `None` for irregular inputs.
    pub elliptic: Option<bool>,
}

impl Bundled {
    pub fn system(&self) -> Result<SymbolSystem> {
        parse_system(self.source, None)
    }
}

macro_rules! bundled {
    ($name:literal, $elliptic:expr) => {
        Bundled {
            name: $name,
            source: include_str!(concat!("../systems/", $name, ".sys")),
            elliptic: $elliptic,
        }
    };
}

pub const BUNDLED: &[Bundled] = &[
    bundled!("laplacian", Some(true)),
    bundled!("heat", Some(true)),
    bundled!("wave", Some(false)),
    bundled!("mqe", Some(true)),
    bundled!("pair", Some(true)),
    bundled!("skew_wave", Some(false)),
    bundled!("wave_lower", Some(false)),
    bundled!("quasi_lower", Some(true)),
    bundled!("elliptic3", Some(true)),
    bundled!("irregular", None),
];

pub fn bundled(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

/// The bundled systems with a regular polyhedron.
pub fn regular() -> impl Iterator<Item = &'static Bundled> {
    BUNDLED.iter().filter(|b| b.elliptic.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::build_polyhedron;

    #[test]
    fn all_parse_and_regularity_matches() {
        for b in BUNDLED {
            let sys = b.system().unwrap();
            let f = build_polyhedron(&sys).unwrap();
            assert_eq!(f.is_regular(), b.elliptic.is_some(), "{}", b.name);
        }
        assert_eq!(bundled("irregular").unwrap().system().unwrap().dim(), 2);
        assert_eq!(bundled("elliptic3").unwrap().system().unwrap().dim(), 3);
    }
}
