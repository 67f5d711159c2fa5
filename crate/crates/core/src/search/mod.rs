//! Searching the space of Horner schemes.
//!
//! Every strategy scores a complete variable order by applying it, building
//! the shared DAG and counting the operations left. The score of a scheme is
//! the ratio `Δ = original ops / simplified ops` (higher is better).

mod counter;
pub(crate) mod mcts;
mod nmcs;
pub mod rng;

use std::cell::{Cell, RefCell};
use std::fmt;

use crate::error::Error;
use crate::expr::{OpCount, Polynomial, VarId};
use crate::horner::{DenseTerms, Direction, HornerScheme};

pub use mcts::{mcts_search, sa_uct_temperature, uct_value, Criterion, SearchConfig, SearchNode, SearchTree};
pub use nmcs::{nested_eval_count, nmcs_eval_count, nmcs_search, NmcsConfig};

/// Default variable cap for [`exhaustive_search`].
pub const EXHAUSTIVE_CAP: usize = 8;

/// Improvement ratio of a simplified expression.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
pub struct ScoreDelta(pub f64);

impl ScoreDelta {
    /// `original / simplified`, or 1 when both are zero.
    pub fn new(original: u64, simplified: u64) -> Self {
        if simplified == 0 {
            // Only a bare leaf costs nothing, and then so did the original.
            ScoreDelta(if original == 0 { 1.0 } else { original as f64 })
        } else {
            ScoreDelta(original as f64 / simplified as f64)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for ScoreDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub ops: OpCount,
    pub delta: ScoreDelta,
}

/// Scores schemes for one polynomial and counts how often it was asked to.
pub struct Evaluator<'p> {
    poly: &'p Polynomial,
    counter: RefCell<counter::Counter>,
    original: OpCount,
    calls: Cell<u64>,
}

impl<'p> Evaluator<'p> {
    pub fn new(poly: &'p Polynomial) -> Result<Self, Error> {
        if poly.is_zero() {
            return Err(Error::EmptyPolynomial);
        }
        Ok(Evaluator {
            poly,
            counter: RefCell::new(counter::Counter::new(&DenseTerms::new(poly))),
            original: poly.expanded_op_count(),
            calls: Cell::new(0),
        })
    }

    pub fn polynomial(&self) -> &'p Polynomial {
        self.poly
    }

    pub fn original(&self) -> OpCount {
        self.original
    }

    /// Number of evaluations performed so far.
    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn evaluate(&self, scheme: &HornerScheme) -> Result<Evaluation, Error> {
        scheme.validate(self.poly.vars())?;
        if scheme.order.len() != self.poly.num_vars() {
            return Err(Error::IncompleteScheme {
                got: scheme.order.len(),
                expected: self.poly.num_vars(),
            });
        }
        Ok(self.evaluate_order(&scheme.order, scheme.direction))
    }

    /// Scores a complete order the caller has already validated.
    pub(crate) fn evaluate_order(&self, order: &[VarId], direction: Direction) -> Evaluation {
        self.calls.set(self.calls.get() + 1);
        let mut counter = self.counter.borrow_mut();
        let ops = match direction {
            Direction::Forward => counter.count(order),
            Direction::Backward => {
                let rev: Vec<VarId> = order.iter().rev().copied().collect();
                counter.count(&rev)
            }
        };
        Evaluation {
            ops,
            delta: ScoreDelta::new(self.original.total(), ops.total()),
        }
    }
}

/// Operation count after Horner + CSE for a complete scheme, and its score.
pub fn evaluate_scheme(p: &Polynomial, scheme: &HornerScheme) -> Result<(OpCount, ScoreDelta), Error> {
    let e = Evaluator::new(p)?.evaluate(scheme)?;
    Ok((e.ops, e.delta))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub delta: f64,
    pub ops_total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_scheme: HornerScheme,
    pub best_ops: OpCount,
    pub best_delta: ScoreDelta,
    pub evaluations: u64,
    pub trace: Option<Vec<TracePoint>>,
}

/// Keeps the lowest-cost order seen; ties go to the lexicographically
/// smaller order.
#[derive(Debug, Default)]
pub(crate) struct Best {
    inner: Option<(Vec<VarId>, Evaluation)>,
}

impl Best {
    pub(crate) fn offer(&mut self, order: &[VarId], eval: Evaluation) -> bool {
        let better = match &self.inner {
            None => true,
            Some((o, e)) => {
                let (a, b) = (eval.ops.total(), e.ops.total());
                a < b || (a == b && order < o.as_slice())
            }
        };
        if better {
            self.inner = Some((order.to_vec(), eval));
        }
        better
    }

    pub(crate) fn finish(self, direction: Direction, evaluations: u64, trace: Option<Vec<TracePoint>>) -> SearchResult {
        let (order, eval) = self.inner.expect("at least one evaluation");
        SearchResult {
            best_scheme: HornerScheme::new(order, direction),
            best_ops: eval.ops,
            best_delta: eval.delta,
            evaluations,
            trace,
        }
    }
}

/// Evaluates the occurrence order only.
pub fn occurrence_search(p: &Polynomial, direction: Direction) -> Result<SearchResult, Error> {
    let ev = Evaluator::new(p)?;
    let order = p.occurrence_order()?;
    let mut best = Best::default();
    best.offer(&order, ev.evaluate_order(&order, direction));
    Ok(best.finish(direction, ev.calls(), None))
}

fn next_permutation(v: &mut [VarId]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Evaluates all `n!` orders, refusing when `n > cap`.
pub fn exhaustive_search_capped(p: &Polynomial, direction: Direction, cap: usize) -> Result<SearchResult, Error> {
    let ev = Evaluator::new(p)?;
    let n = p.num_vars();
    if n > cap {
        return Err(Error::ExhaustiveCapExceeded { vars: n, cap });
    }
    let mut order: Vec<VarId> = p.vars().ids().collect();
    let mut best = Best::default();
    loop {
        best.offer(&order, ev.evaluate_order(&order, direction));
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best.finish(direction, ev.calls(), None))
}

pub fn exhaustive_search(p: &Polynomial, direction: Direction) -> Result<SearchResult, Error> {
    exhaustive_search_capped(p, direction, EXHAUSTIVE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    #[test]
    fn delta_degenerate_cases() {
        assert_eq!(ScoreDelta::new(0, 0).value(), 1.0);
        assert_eq!(ScoreDelta::new(11, 6).value(), 11.0 / 6.0);
        assert_eq!(ScoreDelta::new(4, 4).value(), 1.0);
    }

    #[test]
    fn evaluate_first_example() {
        let eq1 = p("x^2*z + x^3*y + x^3*y*z");
        let (ops, delta) = evaluate_scheme(&eq1, &HornerScheme::forward(vec![VarId(0), VarId(1), VarId(2)])).unwrap();
        assert_eq!(ops, OpCount::new(4, 2));
        assert_eq!(delta.value(), 11.0 / 6.0);
    }

    #[test]
    fn evaluate_rejects_incomplete() {
        let eq1 = p("x^2*z + x^3*y + x^3*y*z");
        assert!(matches!(
            evaluate_scheme(&eq1, &HornerScheme::forward(vec![VarId(0), VarId(1)])),
            Err(Error::IncompleteScheme { got: 2, expected: 3 })
        ));
    }

    #[test]
    fn single_term_single_var() {
        let x = p("x");
        let (ops, delta) = evaluate_scheme(&x, &HornerScheme::forward(vec![VarId(0)])).unwrap();
        assert_eq!(ops.total(), 0);
        assert_eq!(delta.value(), 1.0);
        let r = exhaustive_search(&x, Direction::Forward).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.best_scheme.order, vec![VarId(0)]);
        let r = occurrence_search(&x, Direction::Forward).unwrap();
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn constant_polynomial_scores_one() {
        let five = p("5");
        let r = exhaustive_search(&five, Direction::Forward).unwrap();
        assert_eq!(r.best_ops.total(), 0);
        assert_eq!(r.best_delta.value(), 1.0);
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut v = vec![VarId(0), VarId(1), VarId(2)];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exhaustive_cap() {
        let q = p("a*b*c*d*e*f*g*h*i + a");
        assert!(matches!(
            exhaustive_search(&q, Direction::Forward),
            Err(Error::ExhaustiveCapExceeded { vars: 9, cap: 8 })
        ));
    }

    #[test]
    fn evaluator_counts_calls() {
        let q = p("x*y + x");
        let ev = Evaluator::new(&q).unwrap();
        ev.evaluate(&HornerScheme::forward(vec![VarId(0), VarId(1)])).unwrap();
        ev.evaluate(&HornerScheme::backward(vec![VarId(0), VarId(1)])).unwrap();
        assert_eq!(ev.calls(), 2);
        assert!(Evaluator::new(&p("0")).is_err());
    }
}
