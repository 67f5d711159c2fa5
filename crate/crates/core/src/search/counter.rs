//! Allocation-light operation counter.
//!
//! Produces exactly the count of `build_dag(&apply_scheme(p, s)).count_ops()`
//! without building `HornerExpr` or `ExprDag` values: the nested expression
//! goes into a flat arena under the same normalization rules as the
//! `HornerExpr` smart constructors, then is lowered in the same order into a
//! hash-consing table keyed by packed integers.
//!
//! Node ids only matter through their relative order (operands are sorted
//! before binarization). Leaves come first in both implementations, variables
//! by id and then constants by magnitude, and internal nodes are numbered in
//! lowering order, so interning every leaf up front does not change any
//! comparison.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rustc_hash::FxHashMap;

use crate::expr::{OpCount, VarId};
use crate::horner::DenseTerms;

#[derive(Debug, Clone, Copy)]
enum Node {
    /// Leaf with a fixed DAG id (variables and constant magnitudes).
    Leaf(u32),
    Neg(u32),
    Pow(u32, u32),
    Sum(u32, u32),
    Prod(u32, u32),
}

pub(crate) struct Counter {
    nvars: usize,
    exps: Vec<u32>,
    /// Per term: leaf id of |coeff| and whether coeff < 0.
    coeffs: Vec<(u32, bool)>,
    one: u32,
    first_internal: u32,
    scratch: Scratch,
}

#[derive(Default)]
struct Scratch {
    arena: Vec<Node>,
    kids: Vec<u32>,
    flat: Vec<u32>,
    idx: Vec<u32>,
    in_scheme: Vec<bool>,
    table: FxHashMap<u64, u32>,
    one: u32,
    next: u32,
    muls: u64,
    adds: u64,
    stack: Vec<u32>,
}

const MUL_TAG: u64 = 1 << 62;

impl Counter {
    pub(crate) fn new(dense: &DenseTerms) -> Self {
        let nvars = dense.nvars;
        let mut mags: Vec<BigInt> = dense.coeffs.iter().map(|c| c.abs()).collect();
        mags.push(BigInt::one());
        mags.sort();
        mags.dedup();
        let leaf = |m: &BigInt| nvars as u32 + mags.binary_search(m).expect("interned magnitude") as u32;
        Counter {
            nvars,
            exps: dense.exps.clone(),
            coeffs: dense.coeffs.iter().map(|c| (leaf(&c.abs()), c.is_negative())).collect(),
            one: leaf(&BigInt::one()),
            first_internal: (nvars + mags.len()) as u32,
            scratch: Scratch::default(),
        }
    }

    #[inline]
    fn exp(&self, term: u32, v: usize) -> u32 {
        self.exps[term as usize * self.nvars + v]
    }

    pub(crate) fn count(&mut self, order: &[VarId]) -> OpCount {
        let mut s = std::mem::take(&mut self.scratch);
        s.arena.clear();
        s.kids.clear();
        s.table.clear();
        s.next = self.first_internal;
        s.one = self.one;
        s.muls = 0;
        s.adds = 0;
        s.in_scheme.clear();
        s.in_scheme.resize(self.nvars, false);
        for v in order {
            s.in_scheme[v.index()] = true;
        }
        let mut idx = std::mem::take(&mut s.idx);
        idx.clear();
        idx.extend(0..self.coeffs.len() as u32);
        let root = self.build(&mut s, &mut idx, order);
        s.idx = idx;
        s.lower(root);
        let ops = OpCount::new(s.muls, s.adds);
        self.scratch = s;
        ops
    }

    fn build(&self, s: &mut Scratch, idx: &mut [u32], order: &[VarId]) -> u32 {
        let mut rest = order;
        let v = loop {
            match rest.split_first() {
                None => return self.residual(s, idx),
                Some((&v, tail)) => {
                    rest = tail;
                    if idx.iter().any(|&t| self.exp(t, v.index()) > 0) {
                        break v.index();
                    }
                }
            }
        };
        idx.sort_by_key(|&t| self.exp(t, v));

        let mut end = idx.len();
        let last_exp = self.exp(idx[end - 1], v);
        let mut start = end;
        while start > 0 && self.exp(idx[start - 1], v) == last_exp {
            start -= 1;
        }
        let mut acc = self.build(s, &mut idx[start..end], rest);
        let mut upper = last_exp;
        while start > 0 {
            end = start;
            let exp = self.exp(idx[end - 1], v);
            while start > 0 && self.exp(idx[start - 1], v) == exp {
                start -= 1;
            }
            let q = self.build(s, &mut idx[start..end], rest);
            let pw = s.power(v as u32, upper - exp);
            let lifted = s.product(&[pw, acc]);
            acc = s.sum(&[q, lifted]);
            upper = exp;
        }
        if upper > 0 {
            let pw = s.power(v as u32, upper);
            acc = s.product(&[pw, acc]);
        }
        acc
    }

    fn residual(&self, s: &mut Scratch, idx: &[u32]) -> u32 {
        let mut terms = Vec::with_capacity(idx.len());
        let mut factors = Vec::new();
        for &t in idx {
            let (mag, negative) = self.coeffs[t as usize];
            factors.clear();
            factors.push(s.push(Node::Leaf(mag)));
            for v in 0..self.nvars {
                let e = self.exp(t, v);
                if e > 0 && !s.in_scheme[v] {
                    factors.push(s.power(v as u32, e));
                }
            }
            let prod = s.product(&factors);
            terms.push(if negative { s.neg(prod) } else { prod });
        }
        s.sum(&terms)
    }
}

impl Scratch {
    fn push(&mut self, n: Node) -> u32 {
        self.arena.push(n);
        (self.arena.len() - 1) as u32
    }

    fn power(&mut self, v: u32, k: u32) -> u32 {
        debug_assert!(k > 0);
        if k == 1 {
            self.push(Node::Leaf(v))
        } else {
            self.push(Node::Pow(v, k))
        }
    }

    fn neg(&mut self, e: u32) -> u32 {
        match self.arena[e as usize] {
            Node::Neg(inner) => inner,
            _ => self.push(Node::Neg(e)),
        }
    }

    fn flatten_sum(&mut self, e: u32, negate: bool) {
        match self.arena[e as usize] {
            Node::Sum(start, len) => {
                for i in start..start + len {
                    let k = self.kids[i as usize];
                    self.flatten_sum(k, negate);
                }
            }
            Node::Neg(inner) => self.flatten_sum(inner, !negate),
            _ if negate => {
                let n = self.push(Node::Neg(e));
                self.flat.push(n);
            }
            _ => self.flat.push(e),
        }
    }

    fn collapse(&mut self, base: usize, make: fn(u32, u32) -> Node) -> u32 {
        let len = self.flat.len() - base;
        if len == 1 {
            let e = self.flat[base];
            self.flat.truncate(base);
            return e;
        }
        let start = self.kids.len() as u32;
        self.kids.extend_from_slice(&self.flat[base..]);
        self.flat.truncate(base);
        self.push(make(start, len as u32))
    }

    fn sum(&mut self, children: &[u32]) -> u32 {
        let base = self.flat.len();
        for &c in children {
            self.flatten_sum(c, false);
        }
        debug_assert!(self.flat.len() > base, "sums are never empty");
        let all_negative = self.flat[base..].iter().all(|&c| matches!(self.arena[c as usize], Node::Neg(_)));
        if all_negative {
            for i in base..self.flat.len() {
                if let Node::Neg(inner) = self.arena[self.flat[i] as usize] {
                    self.flat[i] = inner;
                }
            }
            let e = self.collapse(base, Node::Sum);
            return self.neg(e);
        }
        self.collapse(base, Node::Sum)
    }

    fn flatten_product(&mut self, e: u32, negative: &mut bool) {
        match self.arena[e as usize] {
            Node::Prod(start, len) => {
                for i in start..start + len {
                    let k = self.kids[i as usize];
                    self.flatten_product(k, negative);
                }
            }
            Node::Neg(inner) => {
                *negative = !*negative;
                self.flatten_product(inner, negative);
            }
            Node::Leaf(id) if id == self.one => {}
            _ => self.flat.push(e),
        }
    }

    /// Constant leaves would lead in the factor list, but leaves intern
    /// nothing during lowering, so the relative order of the other factors is
    /// all that matters here.
    fn product(&mut self, children: &[u32]) -> u32 {
        let base = self.flat.len();
        let mut negative = false;
        for &c in children {
            self.flatten_product(c, &mut negative);
        }
        let e = if self.flat.len() == base {
            self.push(Node::Leaf(self.one))
        } else {
            self.collapse(base, Node::Prod)
        };
        if negative {
            self.neg(e)
        } else {
            e
        }
    }

    fn intern(&mut self, key: u64) -> u32 {
        let next = self.next;
        let id = *self.table.entry(key).or_insert(next);
        if id == next {
            self.next += 1;
            if key & MUL_TAG != 0 {
                self.muls += 1;
            } else {
                self.adds += 1;
            }
        }
        id
    }

    fn mul(&mut self, a: u32, b: u32) -> u32 {
        let (l, r) = if a <= b { (a, b) } else { (b, a) };
        self.intern(MUL_TAG | (u64::from(l) << 31) | u64::from(r))
    }

    /// Operands are encoded as `node << 1 | negated`, which orders like `Operand`.
    fn add(&mut self, a: u32, b: u32) -> u32 {
        let (mut l, mut r) = if a <= b { (a, b) } else { (b, a) };
        let negated = l & 1;
        l ^= negated;
        r ^= negated;
        let id = self.intern((u64::from(l) << 31) | u64::from(r));
        (id << 1) | negated
    }

    fn lower(&mut self, e: u32) -> u32 {
        match self.arena[e as usize] {
            Node::Leaf(id) => id << 1,
            Node::Neg(inner) => self.lower(inner) ^ 1,
            Node::Pow(v, k) => {
                let mut cur = v;
                for _ in 1..k {
                    cur = self.mul(cur, v);
                }
                cur << 1
            }
            Node::Prod(start, len) => {
                let base = self.stack.len();
                let mut negated = 0;
                for i in start..start + len {
                    let o = self.lower(self.kids[i as usize]);
                    negated ^= o & 1;
                    self.stack.push(o >> 1);
                }
                self.stack[base..].sort_unstable();
                let mut acc = self.stack[base];
                for i in base + 1..self.stack.len() {
                    acc = self.mul(acc, self.stack[i]);
                }
                self.stack.truncate(base);
                (acc << 1) | negated
            }
            Node::Sum(start, len) => {
                let base = self.stack.len();
                for i in start..start + len {
                    let o = self.lower(self.kids[i as usize]);
                    self.stack.push(o);
                }
                self.stack[base..].sort_unstable();
                let mut acc = self.stack[base];
                for i in base + 1..self.stack.len() {
                    acc = self.add(acc, self.stack[i]);
                }
                self.stack.truncate(base);
                acc
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::build_dag;
    use crate::expr::Polynomial;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference(p: &Polynomial, order: &[VarId]) -> OpCount {
        build_dag(&DenseTerms::new(p).apply(order)).count_ops()
    }

    fn random_poly(rng: &mut ChaCha8Rng, nvars: usize) -> Polynomial {
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let mut src = String::from("0");
        for _ in 0..rng.random_range(1..12) {
            let sign = if rng.random_bool(0.4) { " - " } else { " + " };
            src += &format!("{sign}{}", rng.random_range(1..=4));
            for n in &names {
                let e = rng.random_range(0..4);
                if e > 0 {
                    src += &format!("*{n}^{e}");
                }
            }
        }
        Polynomial::parse(&src).unwrap()
    }

    #[test]
    fn matches_reference_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let nvars = rng.random_range(1..6);
            let p = random_poly(&mut rng, nvars);
            let mut counter = Counter::new(&DenseTerms::new(&p));
            for _ in 0..5 {
                let mut order: Vec<VarId> = p.vars().ids().collect();
                order.shuffle(&mut rng);
                order.truncate(rng.random_range(0..=order.len()));
                assert_eq!(counter.count(&order), reference(&p, &order), "{p} {order:?}");
            }
        }
    }

    #[test]
    fn matches_reference_on_a_resultant() {
        let p = crate::resolvent::gen_res(crate::resolvent::ResolventSpec::new(4, 3).unwrap()).unwrap();
        let mut counter = Counter::new(&DenseTerms::new(&p));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let mut order: Vec<VarId> = p.vars().ids().collect();
            order.shuffle(&mut rng);
            assert_eq!(counter.count(&order), reference(&p, &order));
        }
    }
}
