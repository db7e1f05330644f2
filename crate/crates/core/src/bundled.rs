//! Bundled example inputs.
//!
//! Each example resolves well inside the default truncation and blow-up
//! budget. The acceptance suite and the benchmarks run all of them.

use crate::parse::{infer_vars, parse_with_vars, ParseError};
use crate::resolve::{run_mode, Config, Mode, ResolutionTree, Result, ResolveError};
use crate::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Example {
    pub name: &'static str,
    pub mode: Mode,
    /// One polynomial, or the factors for rectilinearization.
    pub inputs: &'static [&'static str],
}

pub const EXAMPLES: &[Example] = &[
    Example { name: "cusp", mode: Mode::Resolve, inputs: &["y^2 - x^3"] },
    Example { name: "node", mode: Mode::Resolve, inputs: &["y^2 - x^2"] },
    Example { name: "tacnode", mode: Mode::Resolve, inputs: &["y^2 - x^4"] },
    Example { name: "a4", mode: Mode::Resolve, inputs: &["y^2 - x^5"] },
    Example { name: "e6", mode: Mode::Resolve, inputs: &["y^3 - x^4"] },
    Example { name: "e8", mode: Mode::Resolve, inputs: &["y^3 - x^5"] },
    Example { name: "nodal-cubic", mode: Mode::Resolve, inputs: &["y^2 - x^2 - x^3"] },
    Example { name: "three-lines", mode: Mode::Resolve, inputs: &["x*y*(x + y)"] },
    Example { name: "two-cusps", mode: Mode::Resolve, inputs: &["(y^2 - x^3)*(y^2 - 2*x^3)"] },
    Example { name: "sheared-a4", mode: Mode::Resolve, inputs: &["(y - x^2)^2 - x^5"] },
    Example { name: "smooth", mode: Mode::Resolve, inputs: &["y - x^2"] },
    Example { name: "cone", mode: Mode::Resolve, inputs: &["x^2 + y^2 - z^2"] },
    Example { name: "whitney", mode: Mode::Resolve, inputs: &["x^2 - y^2*z"] },
    Example { name: "a1-surface", mode: Mode::Resolve, inputs: &["z^2 - x*y"] },
    Example { name: "cubic-cone", mode: Mode::Resolve, inputs: &["z^2 - x^3 - y^3"] },
    Example { name: "cusp-monomial", mode: Mode::Monomialize, inputs: &["y^2 - x^3"] },
    Example { name: "monomial", mode: Mode::Monomialize, inputs: &["x^2*y^3"] },
    Example { name: "crossing-planes", mode: Mode::Monomialize, inputs: &["z^2 - x^2*y^2"] },
    Example { name: "coordinate-lines", mode: Mode::Rectilinearize, inputs: &["x", "y"] },
    Example { name: "line-pair", mode: Mode::Rectilinearize, inputs: &["x", "x + y"] },
    Example { name: "cusp-and-axis", mode: Mode::Rectilinearize, inputs: &["y^2 - x^3", "x"] },
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

impl Example {
    /// Variables inferred from the inputs, and the parsed inputs.
    pub fn parse(&self, truncation: u32) -> std::result::Result<(Vec<String>, Vec<Jet>), ParseError> {
        let vars = infer_vars(self.inputs)?;
        let jets = self.inputs.iter().map(|s| parse_with_vars(s, &vars, truncation)).collect::<std::result::Result<_, _>>()?;
        Ok((vars, jets))
    }

    pub fn run(&self, cfg: &Config) -> Result<ResolutionTree> {
        let (vars, jets) = self.parse(cfg.truncation).map_err(|e| ResolveError::Input(e.to_string()))?;
        let factors: &[Jet] = if self.mode == Mode::Rectilinearize { &jets } else { &[] };
        let product = jets.iter().skip(1).fold(jets[0].clone(), |a, b| &a * b);
        run_mode(self.mode, &product, factors, Some(vars), cfg)
    }
}
