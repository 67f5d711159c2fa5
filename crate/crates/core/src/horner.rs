//! Multivariate Horner schemes.
//!
//! A scheme is an ordered list of variables. Applying it to a polynomial
//! extracts the first variable outside brackets, grouping by ascending
//! exponent with incremental powers,
//!
//! ```text
//! p = v^e0 * (Q0 + v^(e1-e0) * (Q1 + v^(e2-e1) * (...)))
//! ```
//!
//! and recurses into every `Qj` with the remaining variables.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::expr::{Polynomial, VarId, VarTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    /// The order is applied reversed, so the first variable chosen is the
    /// last one extracted.
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(Error::InvalidConfig(format!("unknown direction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornerScheme {
    pub order: Vec<VarId>,
    pub direction: Direction,
}

impl HornerScheme {
    pub fn new(order: Vec<VarId>, direction: Direction) -> Self {
        HornerScheme { order, direction }
    }

    pub fn forward(order: Vec<VarId>) -> Self {
        Self::new(order, Direction::Forward)
    }

    pub fn backward(order: Vec<VarId>) -> Self {
        Self::new(order, Direction::Backward)
    }

    /// Order in which variables are extracted.
    pub fn effective_order(&self) -> Vec<VarId> {
        match self.direction {
            Direction::Forward => self.order.clone(),
            Direction::Backward => self.order.iter().rev().copied().collect(),
        }
    }

    /// Checks that ids are unique and exist in `vars`.
    pub fn validate(&self, vars: &VarTable) -> Result<(), Error> {
        let mut seen = vec![false; vars.len()];
        for &v in &self.order {
            let slot = seen.get_mut(v.index()).ok_or(Error::UnknownVariable(v))?;
            if *slot {
                return Err(Error::DuplicateVariable(vars.name(v).to_string()));
            }
            *slot = true;
        }
        Ok(())
    }

    pub fn is_complete(&self, vars: &VarTable) -> bool {
        self.validate(vars).is_ok() && self.order.len() == vars.len()
    }

    /// Comma-separated variable names in `order`.
    pub fn names(&self, vars: &VarTable) -> String {
        self.order
            .iter()
            .map(|&v| vars.name(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`Self::names`].
    pub fn parse_names(text: &str, vars: &VarTable, direction: Direction) -> Result<Self, Error> {
        let order = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| {
                vars.lookup(name)
                    .ok_or_else(|| Error::UnknownName(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scheme = HornerScheme::new(order, direction);
        scheme.validate(vars)?;
        Ok(scheme)
    }
}

/// Nested expression produced by a Horner scheme.
///
/// Constants are stored as magnitudes; signs are carried by `Neg`, which
/// costs nothing since it folds into the enclosing addition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HornerExpr {
    Sum(Vec<HornerExpr>),
    Product(Vec<HornerExpr>),
    Power(Box<HornerExpr>, u32),
    Var(VarId),
    Const(BigInt),
    Neg(Box<HornerExpr>),
}

impl HornerExpr {
    pub fn constant(c: BigInt) -> HornerExpr {
        if c.is_negative() {
            HornerExpr::Neg(Box::new(HornerExpr::Const(-c)))
        } else {
            HornerExpr::Const(c)
        }
    }

    pub fn power(base: HornerExpr, exp: u32) -> HornerExpr {
        match exp {
            0 => HornerExpr::Const(BigInt::one()),
            1 => base,
            k => match base {
                HornerExpr::Neg(inner) if k % 2 == 1 => HornerExpr::neg(HornerExpr::Power(inner, k)),
                HornerExpr::Neg(inner) => HornerExpr::Power(inner, k),
                base => HornerExpr::Power(Box::new(base), k),
            },
        }
    }

    pub fn neg(e: HornerExpr) -> HornerExpr {
        match e {
            HornerExpr::Neg(inner) => *inner,
            HornerExpr::Const(c) if c.is_zero() => HornerExpr::Const(c),
            e => HornerExpr::Neg(Box::new(e)),
        }
    }

    /// Flattening n-ary sum. Zero constants are dropped and an all-negative
    /// sum becomes a negated sum.
    pub fn sum(children: Vec<HornerExpr>) -> HornerExpr {
        let mut flat = Vec::with_capacity(children.len());
        fn push(flat: &mut Vec<HornerExpr>, e: HornerExpr, negate: bool) {
            match e {
                HornerExpr::Sum(cs) => cs.into_iter().for_each(|c| push(flat, c, negate)),
                HornerExpr::Neg(inner) => push(flat, *inner, !negate),
                HornerExpr::Const(c) if c.is_zero() => {}
                e if negate => flat.push(HornerExpr::Neg(Box::new(e))),
                e => flat.push(e),
            }
        }
        for c in children {
            push(&mut flat, c, false);
        }
        if flat.is_empty() {
            return HornerExpr::Const(BigInt::zero());
        }
        if flat.iter().all(|c| matches!(c, HornerExpr::Neg(_))) {
            let positive = flat.into_iter().map(HornerExpr::neg).collect::<Vec<_>>();
            return HornerExpr::neg(Self::collapse_sum(positive));
        }
        Self::collapse_sum(flat)
    }

    fn collapse_sum(mut flat: Vec<HornerExpr>) -> HornerExpr {
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            HornerExpr::Sum(flat)
        }
    }

    /// Flattening n-ary product. Signs are pulled out to a single `Neg`, unit
    /// constants are dropped.
    pub fn product(children: Vec<HornerExpr>) -> HornerExpr {
        let mut flat = Vec::with_capacity(children.len());
        let mut negative = false;
        fn push(flat: &mut Vec<HornerExpr>, negative: &mut bool, e: HornerExpr) {
            match e {
                HornerExpr::Product(cs) => cs.into_iter().for_each(|c| push(flat, negative, c)),
                HornerExpr::Neg(inner) => {
                    *negative = !*negative;
                    push(flat, negative, *inner)
                }
                HornerExpr::Const(c) if c.is_one() => {}
                e => flat.push(e),
            }
        }
        for c in children {
            push(&mut flat, &mut negative, c);
        }
        if flat.iter().any(|c| matches!(c, HornerExpr::Const(z) if z.is_zero())) {
            return HornerExpr::Const(BigInt::zero());
        }
        // Coefficients lead, as in `3*y`.
        flat.sort_by_key(|c| !matches!(c, HornerExpr::Const(_)));
        let e = match flat.len() {
            0 => HornerExpr::Const(BigInt::one()),
            1 => flat.pop().unwrap(),
            _ => HornerExpr::Product(flat),
        };
        if negative {
            HornerExpr::neg(e)
        } else {
            e
        }
    }

    /// Multiplications with no sharing: a power `b^k` costs `k - 1`, an
    /// `m`-factor product `m - 1`.
    pub fn mul_count(&self) -> u64 {
        match self {
            HornerExpr::Sum(cs) => cs.iter().map(HornerExpr::mul_count).sum(),
            HornerExpr::Product(cs) => {
                cs.len() as u64 - 1 + cs.iter().map(HornerExpr::mul_count).sum::<u64>()
            }
            HornerExpr::Power(b, k) => u64::from(*k) - 1 + b.mul_count(),
            HornerExpr::Neg(e) => e.mul_count(),
            HornerExpr::Var(_) | HornerExpr::Const(_) => 0,
        }
    }

    pub fn add_count(&self) -> u64 {
        match self {
            HornerExpr::Sum(cs) => {
                cs.len() as u64 - 1 + cs.iter().map(HornerExpr::add_count).sum::<u64>()
            }
            HornerExpr::Product(cs) => cs.iter().map(HornerExpr::add_count).sum(),
            HornerExpr::Power(b, _) => b.add_count(),
            HornerExpr::Neg(e) => e.add_count(),
            HornerExpr::Var(_) | HornerExpr::Const(_) => 0,
        }
    }

    /// Operation count of the binarized tree without any sharing.
    pub fn tree_op_count(&self) -> crate::expr::OpCount {
        crate::expr::OpCount::new(self.mul_count(), self.add_count())
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        match self {
            HornerExpr::Sum(cs) => cs.iter().map(|c| c.eval(point)).sum(),
            HornerExpr::Product(cs) => cs.iter().map(|c| c.eval(point)).product(),
            HornerExpr::Power(b, k) => num_traits::pow(b.eval(point), *k as usize),
            HornerExpr::Var(v) => point[v.index()].clone(),
            HornerExpr::Const(c) => c.clone(),
            HornerExpr::Neg(e) => -e.eval(point),
        }
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, vars }
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a HornerExpr,
    vars: &'a VarTable,
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(e: &HornerExpr, vars: &VarTable, f: &mut fmt::Formatter<'_>, parent_binds: bool) -> fmt::Result {
            match e {
                HornerExpr::Sum(cs) => {
                    if parent_binds {
                        f.write_str("(")?;
                    }
                    for (i, c) in cs.iter().enumerate() {
                        match (i, c) {
                            (0, HornerExpr::Neg(inner)) => {
                                f.write_str("-")?;
                                go(inner, vars, f, true)?;
                            }
                            (0, c) => go(c, vars, f, false)?,
                            (_, HornerExpr::Neg(inner)) => {
                                f.write_str(" - ")?;
                                go(inner, vars, f, true)?;
                            }
                            (_, c) => {
                                f.write_str(" + ")?;
                                go(c, vars, f, false)?;
                            }
                        }
                    }
                    if parent_binds {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                HornerExpr::Product(cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            f.write_str("*")?;
                        }
                        go(c, vars, f, true)?;
                    }
                    Ok(())
                }
                HornerExpr::Power(b, k) => {
                    if matches!(**b, HornerExpr::Var(_) | HornerExpr::Const(_)) {
                        go(b, vars, f, true)?;
                    } else {
                        f.write_str("(")?;
                        go(b, vars, f, false)?;
                        f.write_str(")")?;
                    }
                    write!(f, "^{k}")
                }
                HornerExpr::Var(v) => f.write_str(vars.name(*v)),
                HornerExpr::Const(c) => write!(f, "{c}"),
                HornerExpr::Neg(inner) => {
                    f.write_str("-")?;
                    go(inner, vars, f, true)
                }
            }
        }
        go(self.expr, self.vars, f, false)
    }
}

/// Dense exponent matrix of a polynomial, reused across scheme applications.
#[derive(Debug, Clone)]
pub(crate) struct DenseTerms {
    pub(crate) nvars: usize,
    pub(crate) exps: Vec<u32>,
    pub(crate) coeffs: Vec<BigInt>,
}

impl DenseTerms {
    pub(crate) fn new(p: &Polynomial) -> Self {
        let nvars = p.num_vars();
        let mut exps = vec![0u32; nvars * p.terms().len()];
        for (t, term) in p.terms().iter().enumerate() {
            for &(v, e) in term.mono.factors() {
                exps[t * nvars + v.index()] = e;
            }
        }
        DenseTerms {
            nvars,
            exps,
            coeffs: p.terms().iter().map(|t| t.coeff.clone()).collect(),
        }
    }

    #[inline]
    fn exp(&self, term: u32, v: VarId) -> u32 {
        self.exps[term as usize * self.nvars + v.index()]
    }

    pub(crate) fn apply(&self, order: &[VarId]) -> HornerExpr {
        let mut in_scheme = vec![false; self.nvars];
        for &v in order {
            in_scheme[v.index()] = true;
        }
        let mut idx: Vec<u32> = (0..self.coeffs.len() as u32).collect();
        self.build(&mut idx, order, &in_scheme)
    }

    fn build(&self, idx: &mut [u32], order: &[VarId], in_scheme: &[bool]) -> HornerExpr {
        let mut rest = order;
        let v = loop {
            match rest.split_first() {
                None => return self.residual(idx, in_scheme),
                Some((&v, tail)) => {
                    rest = tail;
                    if idx.iter().any(|&t| self.exp(t, v) > 0) {
                        break v;
                    }
                }
            }
        };
        idx.sort_by_key(|&t| self.exp(t, v));

        // Runs of equal exponent, ascending.
        let mut runs: Vec<(u32, usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=idx.len() {
            if i == idx.len() || self.exp(idx[i], v) != self.exp(idx[start], v) {
                runs.push((self.exp(idx[start], v), start, i));
                start = i;
            }
        }

        let (last_exp, s, e) = *runs.last().unwrap();
        let mut acc = self.build(&mut idx[s..e], rest, in_scheme);
        let mut upper = last_exp;
        for &(exp, s, e) in runs.iter().rev().skip(1) {
            let q = self.build(&mut idx[s..e], rest, in_scheme);
            let lifted = HornerExpr::product(vec![HornerExpr::power(HornerExpr::Var(v), upper - exp), acc]);
            acc = HornerExpr::sum(vec![q, lifted]);
            upper = exp;
        }
        if upper > 0 {
            acc = HornerExpr::product(vec![HornerExpr::power(HornerExpr::Var(v), upper), acc]);
        }
        acc
    }

    fn residual(&self, idx: &[u32], in_scheme: &[bool]) -> HornerExpr {
        let terms = idx
            .iter()
            .map(|&t| {
                let coeff = &self.coeffs[t as usize];
                let mut factors = vec![HornerExpr::Const(coeff.abs())];
                for v in 0..self.nvars {
                    let id = VarId(v as u32);
                    let e = self.exp(t, id);
                    if e > 0 && !in_scheme[v] {
                        factors.push(HornerExpr::power(HornerExpr::Var(id), e));
                    }
                }
                let prod = HornerExpr::product(factors);
                if coeff.is_negative() {
                    HornerExpr::neg(prod)
                } else {
                    prod
                }
            })
            .collect();
        HornerExpr::sum(terms)
    }
}

/// Applies `scheme` (in its effective order) to `p`.
pub fn apply_scheme(p: &Polynomial, scheme: &HornerScheme) -> Result<HornerExpr, Error> {
    if p.is_zero() {
        return Err(Error::EmptyPolynomial);
    }
    scheme.validate(p.vars())?;
    Ok(DenseTerms::new(p).apply(&scheme.effective_order()))
}
