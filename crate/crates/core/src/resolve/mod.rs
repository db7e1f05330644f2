//! Resolution of hypersurface germs by blow-ups with coordinate-subspace
//! centers.
//!
//! Every local model is a germ at the origin of a chart. A tree starts with
//! one covering piece per base point; below it, blow-up charts and coordinate
//! changes alternate until every leaf has a strict transform of order at most
//! one crossing the exceptional hypersurfaces normally.

mod driver;
pub mod model;
pub mod tree;
pub mod verify;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::blowup::{BlowupError, ExceptionalLedger};
use crate::series::{Jet, SeriesError};

pub use model::{
    coefficient_data, geometric_smoothness, monomial_centers, pair_locus_description, prepare_local_model, ChangeKind,
    CoefficientData, Datum, DatumLabel, Driver, InvariantPair, LocalModel, OmegaScaled, Prepared,
};
pub use tree::{Mode, Node, NodeKind, PhaseInfo, ResolutionTree, Snapshot, Step};
pub use verify::{verify_resolution, LeafReport, VerifyReport};

use driver::{Ctx, Goal, Next, State};
use tree::TNode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error("the input is zero up to truncation")]
    ZeroInput,
    #[error("truncation insufficient: {0}")]
    Truncation(String),
    #[error("blow-up budget exhausted: {0}")]
    Budget(String),
    #[error("driver invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    Input(String),
}

impl ResolveError {
    /// Truncation or budget exhaustion, as opposed to bad input or a bug.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            ResolveError::Truncation(_)
                | ResolveError::Budget(_)
                | ResolveError::ZeroInput
                | ResolveError::Series(SeriesError::TruncationExhausted(_))
                | ResolveError::Blowup(BlowupError::Series(SeriesError::TruncationExhausted(_)))
        )
    }
}

pub type Result<T> = std::result::Result<T, ResolveError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub truncation: u32,
    pub max_blowups: usize,
    /// Base points of the local models; empty means the origin.
    pub base_points: Vec<Vec<BigRational>>,
    /// Resolve sibling charts concurrently.
    pub parallel: bool,
    /// Stop every path after this many blow-ups, leaving unchecked leaves.
    pub stop_after: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config { truncation: 24, max_blowups: 64, base_points: vec![], parallel: false, stop_after: None }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < 4 {
            return Err(ResolveError::Input(format!("truncation {} is below 4", self.truncation)));
        }
        if self.max_blowups < 1 {
            return Err(ResolveError::Input("max_blowups must be at least 1".into()));
        }
        Ok(())
    }
}

/// Builds and verifies a tree for `input` in the given mode.
pub fn run_mode(mode: Mode, input: &Jet, factors: &[Jet], vars: Option<Vec<String>>, cfg: &Config) -> Result<ResolutionTree> {
    cfg.validate()?;
    let n = input.nvars();
    if n == 0 {
        return Err(ResolveError::Input("no variables".into()));
    }
    let vars = vars.unwrap_or_else(|| Jet::default_names(n, "x"));
    if vars.len() != n {
        return Err(ResolveError::Input("variable names do not match the dimension".into()));
    }
    let t0 = cfg.truncation.min(input.truncation());
    let g = input.truncate_to(t0);
    if g.is_zero() {
        return Err(ResolveError::ZeroInput);
    }
    let points = if cfg.base_points.is_empty() { vec![vec![BigRational::zero(); n]] } else { cfg.base_points.clone() };
    let root_model = LocalModel { g: g.clone(), exceptionals: ExceptionalLedger::new(), old: Default::default(), driver: Driver::Strict, d: 0, s: 0, prepared: false };
    let mut root = TNode::leaf(Node::new(NodeKind::Root, None, &root_model));
    root.node.invariant_pair = None;
    let ctx = Ctx::new(cfg, mode);
    for p in &points {
        if p.len() != n {
            return Err(ResolveError::Input(format!("base point has {} coordinates, expected {n}", p.len())));
        }
        let local = g.translate(p)?;
        let st = State::top(local, t0)?;
        let mut cover = Node::new(NodeKind::CoveringPiece, Some(Step::Translate { point: tree::point_strings(p) }), &st.model);
        cover.notes.push(format!("germ at ({})", tree::point_strings(p).join(", ")));
        let children = ctx.run(st, Goal::Resolve, Next::Fresh)?;
        root.children.push(TNode { node: cover, children });
    }
    let mut t = ResolutionTree::from_root(mode, vars, g, factors.iter().map(|f| f.truncate_to(t0)).collect(), t0, root);
    let report = verify_resolution(&t)?;
    for l in report.leaves {
        t.nodes[l.leaf].leaf_checks = l.checks;
    }
    Ok(t)
}

/// Resolves `X = {g = 0}`: smooth strict transform with normal crossings.
pub fn resolve_hypersurface(g: &Jet, cfg: &Config) -> Result<ResolutionTree> {
    run_mode(Mode::Resolve, g, &[], None, cfg)
}

/// Makes the pullback of `(g)` monomial × unit in every leaf chart.
pub fn monomialize_principal(g: &Jet, cfg: &Config) -> Result<ResolutionTree> {
    run_mode(Mode::Monomialize, g, &[], None, cfg)
}

/// Makes every `g_i` monomial × unit in every leaf chart.
pub fn rectilinearize(gs: &[Jet], cfg: &Config) -> Result<ResolutionTree> {
    let first = gs.first().ok_or_else(|| ResolveError::Input("no functions given".into()))?;
    if gs.iter().any(|g| g.nvars() != first.nvars()) {
        return Err(ResolveError::Input("functions live in different dimensions".into()));
    }
    let product = gs.iter().skip(1).fold(first.clone(), |a, b| &a * b);
    run_mode(Mode::Rectilinearize, &product, gs, None, cfg)
}

/// A model reached by the reduction, with the least exponent of its data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCase {
    pub model: LocalModel,
    pub omega: Option<OmegaScaled>,
}

/// Brings the coefficient data of a prepared model to the monomial case,
/// returning one model per resulting chart in pre-order.
pub fn to_monomial_case(model: &LocalModel, cfg: &Config) -> Result<Vec<MonomialCase>> {
    if !model.prepared {
        return Err(ResolveError::Input("model is not prepared".into()));
    }
    let mut ctx = Ctx::new(cfg, Mode::Resolve);
    ctx.collect = Some(Default::default());
    let st = State {
        model: model.clone(),
        tracked: vec![],
        phi: None,
        depth: 0,
        t0: model.g.truncation(),
        pending: vec![],
        level: None,
    };
    ctx.run(st, Goal::Never, Next::Reduce(1))?;
    let out = ctx.collect.take().expect("collector").into_inner().expect("collector");
    Ok(out.into_iter().map(|(model, omega)| MonomialCase { model, omega }).collect())
}
