//! Nested Monte Carlo search.
//!
//! A level-0 search is one random playout. A level-`k` search walks from the
//! root to a complete order; at every depth it runs a level-`k-1` search on
//! each remaining child, moves to the child whose search scored best, and
//! remembers the best complete order seen anywhere below it.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{rng, Best, Evaluation, Evaluator, SearchResult};
use crate::error::Error;
use crate::expr::{Polynomial, VarId};
use crate::horner::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NmcsConfig {
    pub level: u32,
    pub direction: Direction,
    pub seed: u64,
}

impl NmcsConfig {
    pub fn new(level: u32, seed: u64) -> Self {
        NmcsConfig {
            level,
            direction: Direction::Forward,
            seed,
        }
    }
}

struct Nested<'a, 'p> {
    ev: &'a Evaluator<'p>,
    direction: Direction,
    rng: ChaCha8Rng,
    best: Best,
}

impl Nested<'_, '_> {
    fn score(&mut self, order: &[VarId]) -> Evaluation {
        let e = self.ev.evaluate_order(order, self.direction);
        self.best.offer(order, e);
        e
    }

    /// Best `(evaluation, complete order)` found by a level-`level` search
    /// from `prefix`, where `rest` holds the unused variables ascending.
    fn search(&mut self, level: u32, prefix: &mut Vec<VarId>, rest: &[VarId]) -> (Evaluation, Vec<VarId>) {
        if level == 0 || rest.is_empty() {
            let mut order = prefix.clone();
            let mut tail = rest.to_vec();
            tail.shuffle(&mut self.rng);
            order.extend(tail);
            return (self.score(&order), order);
        }

        let depth = prefix.len();
        let mut rest = rest.to_vec();
        let mut local = Best::default();
        let mut found: Option<(Evaluation, Vec<VarId>)> = None;
        while !rest.is_empty() {
            let mut step: Option<(u64, usize)> = None;
            for i in 0..rest.len() {
                let var = rest[i];
                let remaining: Vec<VarId> = rest.iter().copied().filter(|&v| v != var).collect();
                prefix.push(var);
                let (e, order) = self.search(level - 1, prefix, &remaining);
                prefix.pop();
                if local.offer(&order, e) {
                    found = Some((e, order));
                }
                // Strict improvement keeps the lowest variable id on ties.
                if step.is_none_or(|(ops, _)| e.ops.total() < ops) {
                    step = Some((e.ops.total(), i));
                }
            }
            let var = rest.remove(step.expect("non-empty rest").1);
            prefix.push(var);
        }
        prefix.truncate(depth);
        found.expect("at least one child searched")
    }
}

/// Runs a level-`cfg.level` nested search.
pub fn nmcs_search(p: &Polynomial, cfg: &NmcsConfig) -> Result<SearchResult, Error> {
    if cfg.level < 1 {
        return Err(Error::InvalidConfig("nmcs level must be at least 1".into()));
    }
    let ev = Evaluator::new(p)?;
    let mut run = Nested {
        ev: &ev,
        direction: cfg.direction,
        rng: rng::stream(cfg.seed, 0),
        best: Best::default(),
    };
    let vars: Vec<VarId> = p.vars().ids().collect();
    run.search(cfg.level, &mut Vec::new(), &vars);
    Ok(run.best.finish(cfg.direction, ev.calls(), None))
}

/// Unsigned Stirling number of the first kind `c(n + k, n)`, the evaluation
/// budget usually quoted for a level-`k` search over `n` variables.
pub fn nmcs_eval_count(n: u64, k: u64) -> BigUint {
    let top = (n + k) as usize;
    let n = n as usize;
    // row[b] = c(a, b) for the current a.
    let mut row = vec![BigUint::zero(); n + 1];
    row[0] = BigUint::one();
    for a in 1..=top {
        for b in (1..=n.min(a)).rev() {
            let carried = &row[b] * BigUint::from(a as u64 - 1);
            row[b] = &row[b - 1] + carried;
        }
        row[0] = BigUint::zero();
    }
    row[n].clone()
}

/// Exact number of evaluations [`nmcs_search`] performs at level `k` on `n`
/// variables: `E_0(j) = E_k(0) = 1` and `E_k(j) = sum_{i=1..j} i * E_{k-1}(i-1)`.
///
/// This equals [`nmcs_eval_count`] for `k = 1` and is smaller for `k >= 2`.
pub fn nested_eval_count(n: u64, k: u64) -> BigUint {
    let n = n as usize;
    // prev[j] = E_{level-1}(j)
    let mut prev = vec![BigUint::one(); n + 1];
    for _ in 0..k {
        let mut cur = vec![BigUint::one(); n + 1];
        let mut acc = BigUint::zero();
        for j in 1..=n {
            acc += BigUint::from(j as u64) * &prev[j - 1];
            cur[j] = acc.clone();
        }
        prev = cur;
    }
    prev[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{evaluate_scheme, exhaustive_search};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    fn chain(n: usize) -> Polynomial {
        let src = (0..n).map(|i| format!("v{i:02}*v{:02}", (i + 1) % n)).collect::<Vec<_>>().join(" + ");
        p(&src)
    }

    #[test]
    fn stirling_counts() {
        assert_eq!(nmcs_eval_count(15, 1), BigUint::from(120u32));
        assert_eq!(nmcs_eval_count(15, 2), BigUint::from(8500u32));
        assert_eq!(nmcs_eval_count(100, 1), BigUint::from(5050u32));
        assert_eq!(nmcs_eval_count(100, 2), BigUint::from(13_092_125u32));
        assert_eq!(nmcs_eval_count(1, 1), BigUint::one());
        // c(4, 2) = 11
        assert_eq!(nmcs_eval_count(2, 2), BigUint::from(11u32));
    }

    #[test]
    fn nested_count_recursion() {
        for n in 1..30 {
            assert_eq!(nested_eval_count(n, 1), nmcs_eval_count(n, 1));
            assert_eq!(nested_eval_count(n, 1), BigUint::from(n * (n + 1) / 2));
        }
        assert_eq!(nested_eval_count(15, 2), BigUint::from(6581u32));
        assert_eq!(nested_eval_count(1, 3), BigUint::one());
    }

    #[test]
    fn level_one_counts_and_level_two_counts() {
        for n in [1usize, 2, 5, 15] {
            let q = chain(n.max(2)).clone();
            let q = if n == 1 { p("x^2 + x") } else { q };
            let nv = q.num_vars() as u64;
            let r = nmcs_search(&q, &NmcsConfig::new(1, 4)).unwrap();
            assert_eq!(r.evaluations, nv * (nv + 1) / 2);
        }
        for n in [2usize, 4, 6] {
            let q = chain(n);
            let r = nmcs_search(&q, &NmcsConfig::new(2, 9)).unwrap();
            assert_eq!(BigUint::from(r.evaluations), nested_eval_count(n as u64, 2));
        }
        let q = chain(4);
        let r = nmcs_search(&q, &NmcsConfig::new(3, 9)).unwrap();
        assert_eq!(BigUint::from(r.evaluations), nested_eval_count(4, 3));
    }

    #[test]
    fn single_variable() {
        let r = nmcs_search(&p("x^3 + 2*x"), &NmcsConfig::new(1, 0)).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.best_scheme.order, vec![VarId(0)]);
    }

    #[test]
    fn level_zero_rejected() {
        assert!(nmcs_search(&p("x"), &NmcsConfig::new(0, 0)).is_err());
    }

    #[test]
    fn result_is_reproducible_and_consistent() {
        let q = p("a*b*c + a^2*d + b*d*e - 3*c*e + a*e^2 + 7");
        let cfg = NmcsConfig {
            level: 2,
            direction: Direction::Backward,
            seed: 17,
        };
        let a = nmcs_search(&q, &cfg).unwrap();
        assert_eq!(a, nmcs_search(&q, &cfg).unwrap());
        assert_eq!(evaluate_scheme(&q, &a.best_scheme).unwrap().0, a.best_ops);
        let ex = exhaustive_search(&q, Direction::Backward).unwrap();
        assert!(a.best_ops.total() >= ex.best_ops.total());
    }
}
