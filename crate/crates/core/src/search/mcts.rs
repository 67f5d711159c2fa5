//! Monte Carlo tree search over variable orders.
//!
//! Each tree node fixes the next variable of the scheme. An iteration
//! descends through fully expanded nodes with the UCT rule, expands one
//! random untried child, completes the order with a random playout, scores
//! it and backpropagates the score along the path. With [`Criterion::SaUct`]
//! the exploration constant is replaced by a temperature that falls linearly
//! from `cp` at the first iteration to zero at the last.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{rng, Best, Evaluator, SearchResult, TracePoint};
use crate::error::Error;
use crate::expr::{Polynomial, VarId};
use crate::horner::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Criterion {
    #[serde(rename = "uct")]
    Uct,
    #[serde(rename = "sa-uct")]
    SaUct,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Uct => "uct",
            Criterion::SaUct => "sa-uct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub criterion: Criterion,
    /// Exploration constant; the starting temperature for SA-UCT.
    pub cp: f64,
    /// Number of tree updates (and evaluations).
    pub iterations: u64,
    pub direction: Direction,
    pub seed: u64,
    /// Record `(iteration, Δ)` for every evaluation.
    pub trace: bool,
}

impl SearchConfig {
    pub fn uct(cp: f64, iterations: u64, seed: u64) -> Self {
        SearchConfig {
            criterion: Criterion::Uct,
            cp,
            iterations,
            direction: Direction::Forward,
            seed,
            trace: false,
        }
    }

    pub fn sa_uct(cp: f64, iterations: u64, seed: u64) -> Self {
        SearchConfig {
            criterion: Criterion::SaUct,
            ..Self::uct(cp, iterations, seed)
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !self.cp.is_finite() || self.cp < 0.0 {
            return Err(Error::InvalidConfig(format!("cp must be a finite non-negative number, got {}", self.cp)));
        }
        Ok(())
    }
}

/// `T(i) = cp * (N - i) / N`.
pub fn sa_uct_temperature(cp: f64, iteration: u64, budget: u64) -> Result<f64, Error> {
    if budget == 0 {
        return Err(Error::InvalidConfig("iteration budget must be at least 1".into()));
    }
    if iteration > budget {
        return Err(Error::IterationOutOfRange { iteration, budget });
    }
    Ok(cp * ((budget - iteration) as f64 / budget as f64))
}

/// `mean + 2 c sqrt(2 ln n(parent) / n(child))`.
pub fn uct_value(mean: f64, parent_visits: u64, child_visits: u64, c: f64) -> f64 {
    mean + 2.0 * c * (2.0 * (parent_visits as f64).ln() / child_visits as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    /// Variable fixed by this node; `None` at the root.
    pub var: Option<VarId>,
    pub visits: u64,
    score_sum: f64,
    scores: u64,
    /// Playouts started at this node (at expansion, or on re-selecting a
    /// terminal node).
    pub playouts: u64,
    pub children: Vec<usize>,
    /// Variables not yet expanded, ascending.
    pub untried: Vec<VarId>,
}

impl SearchNode {
    fn new(var: Option<VarId>, untried: Vec<VarId>) -> Self {
        SearchNode {
            var,
            visits: 0,
            score_sum: 0.0,
            scores: 0,
            playouts: 0,
            children: Vec::new(),
            untried,
        }
    }

    /// Mean of all scores backpropagated through this node.
    pub fn mean_score(&self) -> f64 {
        if self.scores == 0 {
            0.0
        } else {
            self.score_sum / self.scores as f64
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.untried.is_empty() && self.children.is_empty()
    }
}

/// Arena of search nodes; index 0 is the root.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
}

impl SearchTree {
    /// Root over `vars`, counted as visited once so `ln n(root)` is defined.
    pub fn new(vars: impl IntoIterator<Item = VarId>) -> Self {
        let mut untried: Vec<VarId> = vars.into_iter().collect();
        untried.sort_unstable();
        let mut root = SearchNode::new(None, untried);
        root.visits = 1;
        SearchTree { nodes: vec![root] }
    }

    pub const ROOT: usize = 0;

    pub fn node(&self, idx: usize) -> &SearchNode {
        &self.nodes[idx]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Moves `var` from `parent`'s untried set into a new child.
    fn expand(&mut self, parent: usize, var: VarId) -> usize {
        let p = &mut self.nodes[parent];
        let pos = p.untried.iter().position(|&v| v == var).expect("untried variable");
        p.untried.remove(pos);
        let mut child_untried = self.path_unused(parent);
        child_untried.retain(|&v| v != var);
        let idx = self.nodes.len();
        self.nodes.push(SearchNode::new(Some(var), child_untried));
        self.nodes[parent].children.push(idx);
        idx
    }

    /// Variables unused on the path to `node`: its children plus untried.
    fn path_unused(&self, node: usize) -> Vec<VarId> {
        let n = &self.nodes[node];
        let mut v: Vec<VarId> = n
            .children
            .iter()
            .filter_map(|&c| self.nodes[c].var)
            .chain(n.untried.iter().copied())
            .collect();
        v.sort_unstable();
        v
    }

    /// Child maximizing [`uct_value`]; ties go to the lowest variable id.
    pub fn uct_best_child(&self, node: usize, c: f64) -> Result<usize, Error> {
        let n = &self.nodes[node];
        if !n.untried.is_empty() || n.children.is_empty() {
            return Err(Error::NodeNotExpanded);
        }
        let mut best: Option<(f64, VarId, usize)> = None;
        for &ci in &n.children {
            let ch = &self.nodes[ci];
            if ch.visits == 0 {
                return Err(Error::NodeNotExpanded);
            }
            let value = uct_value(ch.mean_score(), n.visits, ch.visits, c);
            let var = ch.var.expect("non-root child");
            let better = match best {
                None => true,
                Some((bv, bvar, _)) => value > bv || (value == bv && var < bvar),
            };
            if better {
                best = Some((value, var, ci));
            }
        }
        Ok(best.expect("non-empty children").2)
    }

    fn backpropagate(&mut self, path: &[usize], score: f64) {
        for &i in path {
            let n = &mut self.nodes[i];
            n.visits += 1;
            n.score_sum += score;
            n.scores += 1;
        }
        self.nodes[*path.last().unwrap()].playouts += 1;
    }
}

/// Runs exactly `cfg.iterations` MCTS iterations and returns the best
/// complete scheme evaluated along the way.
pub fn mcts_search(p: &Polynomial, cfg: &SearchConfig) -> Result<SearchResult, Error> {
    cfg.validate()?;
    let ev = Evaluator::new(p)?;
    let (result, _) = run(&ev, cfg);
    Ok(result)
}

pub(crate) fn run(ev: &Evaluator<'_>, cfg: &SearchConfig) -> (SearchResult, SearchTree) {
    let all: Vec<VarId> = ev.polynomial().vars().ids().collect();
    let mut tree = SearchTree::new(all.iter().copied());
    let mut best = Best::default();
    let mut trace = cfg.trace.then(Vec::new);
    let mut path: Vec<usize> = Vec::with_capacity(all.len() + 1);
    let mut order: Vec<VarId> = Vec::with_capacity(all.len());
    let mut used = vec![false; all.len()];

    for i in 0..cfg.iterations {
        let mut rng = rng::stream(cfg.seed, i);
        let c = match cfg.criterion {
            Criterion::Uct => cfg.cp,
            Criterion::SaUct => sa_uct_temperature(cfg.cp, i, cfg.iterations).expect("i < N"),
        };

        path.clear();
        order.clear();
        used.iter_mut().for_each(|u| *u = false);
        let mut node = SearchTree::ROOT;
        path.push(node);
        loop {
            let n = tree.node(node);
            if !n.untried.is_empty() {
                let var = n.untried[rng.random_range(0..n.untried.len())];
                node = tree.expand(node, var);
            } else if n.children.is_empty() {
                break;
            } else {
                node = tree.uct_best_child(node, c).expect("fully expanded node");
            }
            path.push(node);
            let var = tree.node(node).var.unwrap();
            order.push(var);
            used[var.index()] = true;
            if tree.node(node).visits == 0 {
                // Freshly expanded.
                break;
            }
        }

        let mut rest: Vec<VarId> = all.iter().copied().filter(|v| !used[v.index()]).collect();
        rest.shuffle(&mut rng);
        order.extend_from_slice(&rest);

        let eval = ev.evaluate_order(&order, cfg.direction);
        best.offer(&order, eval);
        if let Some(t) = trace.as_mut() {
            t.push(TracePoint {
                iteration: i,
                delta: eval.delta.value(),
                ops_total: eval.ops.total(),
            });
        }
        tree.backpropagate(&path, eval.delta.value());
    }
    (best.finish(cfg.direction, ev.calls(), trace), tree)
}
