//! Sparse multivariate polynomials with arbitrary-precision integer coefficients.
//!
//! A [`Polynomial`] is always kept in collected, canonical form: no two terms
//! share a monomial, no coefficient is zero, and terms are sorted by
//! descending graded-lexicographic order of their exponent vectors (variable
//! ids ascending). Parsing assigns variable ids by sorted variable name, so
//! `parse(print(p)) == p` holds structurally.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, ParseError};

/// Dense index of a variable within a [`VarTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Interned variable names. Ids are contiguous from zero; names are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from names in id order. Duplicate or malformed names
    /// are rejected.
    pub fn from_names<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = VarTable::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(Error::InvalidVariable(name));
            }
            if table.lookup(&name).is_some() {
                return Err(Error::DuplicateVariable(name));
            }
            table.names.push(name);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| VarId(i as u32))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A product of variable powers, stored as `(variable, exponent)` pairs sorted
/// by variable id. Exponents are always positive; absent means zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from arbitrary `(var, exp)` pairs, merging repeated
    /// variables and dropping zero exponents.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut v: Vec<(VarId, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_by_key(|&(var, _)| var);
        let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match merged.last_mut() {
                Some((last, acc)) if *last == var => *acc += e,
                _ => merged.push((var, e)),
            }
        }
        Monomial(merged)
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by_key(&v, |&(var, _)| var)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.exponent(v) > 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Lexicographic comparison of the dense exponent vectors, lowest variable
    /// id most significant.
    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    // `a` has a nonzero exponent where `b` has zero.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }

    /// Graded lexicographic order: total degree first, then [`Self::lex_cmp`].
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigInt,
    pub mono: Monomial,
}

/// Multiplication/addition counts of an expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize)]
pub struct OpCount {
    pub muls: u64,
    pub adds: u64,
}

impl OpCount {
    pub fn new(muls: u64, adds: u64) -> Self {
        OpCount { muls, adds }
    }

    pub fn total(&self) -> u64 {
        self.muls + self.adds
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} muls + {} adds = {}", self.muls, self.adds, self.total())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarTable,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(vars: VarTable) -> Self {
        Polynomial {
            vars,
            terms: Vec::new(),
        }
    }

    /// Collects like terms, drops zeros and sorts into canonical order. Every
    /// variable referenced by a term must exist in `vars`.
    pub fn from_terms<I>(vars: VarTable, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (BigInt, Monomial)>,
    {
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for (coeff, mono) in terms {
            if let Some(&(v, _)) = mono.0.iter().find(|&&(v, _)| v.index() >= vars.len()) {
                return Err(Error::UnknownVariable(v));
            }
            *acc.entry(mono).or_insert_with(BigInt::zero) += coeff;
        }
        Ok(Self::from_collected(vars, acc))
    }

    pub(crate) fn from_collected(vars: VarTable, acc: FxHashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term { coeff, mono })
            .collect();
        terms.sort_by(|a, b| b.mono.grlex_cmp(&a.mono));
        Polynomial { vars, terms }
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(vars: VarTable, c: BigInt) -> Self {
        Self::from_collected(vars, std::iter::once((Monomial::one(), c)).collect())
    }

    pub fn variable(vars: VarTable, v: VarId) -> Result<Self, Error> {
        Self::from_terms(vars, [(BigInt::one(), Monomial::var(v))])
    }

    fn check_same_table(&self, other: &Polynomial) -> Result<(), Error> {
        if self.vars != other.vars {
            return Err(Error::VariableTableMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.check_same_table(other)?;
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for t in self.terms.iter().chain(other.terms.iter()) {
            *acc.entry(t.mono.clone()).or_insert_with(BigInt::zero) += &t.coeff;
        }
        Ok(Self::from_collected(self.vars.clone(), acc))
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -&t.coeff,
                    mono: t.mono.clone(),
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.check_same_table(other)?;
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for a in &self.terms {
            for b in &other.terms {
                *acc.entry(a.mono.mul(&b.mono)).or_insert_with(BigInt::zero) += &a.coeff * &b.coeff;
            }
        }
        Ok(Self::from_collected(self.vars.clone(), acc))
    }

    /// Evaluates at an integer point indexed by variable id.
    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        let mut sum = BigInt::zero();
        for t in &self.terms {
            let mut prod = t.coeff.clone();
            for &(v, e) in t.mono.factors() {
                prod *= num_traits::pow(point[v.index()].clone(), e as usize);
            }
            sum += prod;
        }
        sum
    }

    /// Returns the same polynomial over a table whose ids follow sorted
    /// variable names, which is the table `parse` would produce for it.
    pub fn with_sorted_variables(&self) -> Polynomial {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|&a, &b| self.vars.names[a].cmp(&self.vars.names[b]));
        let mut remap = vec![VarId(0); order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = VarId(new as u32);
        }
        let vars = VarTable {
            names: order.iter().map(|&i| self.vars.names[i].clone()).collect(),
        };
        let acc = self
            .terms
            .iter()
            .map(|t| {
                let mono =
                    Monomial::from_pairs(t.mono.factors().iter().map(|&(v, e)| (remap[v.index()], e)));
                (mono, t.coeff.clone())
            })
            .collect();
        Self::from_collected(vars, acc)
    }

    /// Number of terms containing each variable, indexed by variable id.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.vars.len()];
        for t in &self.terms {
            for &(v, _) in t.mono.factors() {
                counts[v.index()] += 1;
            }
        }
        counts
    }

    /// Variables by descending number of terms containing them; ties go to
    /// the lower variable id.
    pub fn occurrence_order(&self) -> Result<Vec<VarId>, Error> {
        if self.is_zero() {
            return Err(Error::EmptyPolynomial);
        }
        let counts = self.occurrence_counts();
        let mut ids: Vec<VarId> = self.vars.ids().collect();
        ids.sort_by(|a, b| counts[b.index()].cmp(&counts[a.index()]).then(a.cmp(b)));
        Ok(ids)
    }

    /// Operation count of the fully expanded sum of products. A power `x^k`
    /// costs `k - 1` multiplications, a coefficient other than `±1` one more,
    /// and signs fold into the additions.
    pub fn expanded_op_count(&self) -> OpCount {
        let muls = self
            .terms
            .iter()
            .map(|t| {
                let factors = t.mono.degree() as u64 + u64::from(!t.coeff.abs().is_one());
                factors.saturating_sub(1)
            })
            .sum();
        OpCount {
            muls,
            adds: (self.terms.len() as u64).saturating_sub(1),
        }
    }

    pub fn parse(src: &str) -> Result<Polynomial, ParseError> {
        Parser::new(src).parse()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = t.coeff.abs();
            let mut first = true;
            if !mag.is_one() || t.mono.is_one() {
                write!(f, "{mag}")?;
                first = false;
            }
            for &(v, e) in t.mono.factors() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(self.vars.name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    peeked: Option<(Token, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            col: 1,
            peeked: None,
        }
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn lex(&mut self) -> Result<Option<(Token, usize, usize)>, ParseError> {
        while matches!(self.peek_char(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let tok = match c {
            '+' => {
                self.bump();
                Token::Plus
            }
            '-' => {
                self.bump();
                Token::Minus
            }
            '*' => {
                self.bump();
                Token::Star
            }
            '^' => {
                self.bump();
                Token::Caret
            }
            c if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let digits = &self.src[start..self.pos];
                Token::Int(digits.parse().expect("digit run"))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek_char(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                Token::Ident(self.src[start..self.pos].to_string())
            }
            other => return Err(self.err(line, col, format!("unexpected character '{other}'"))),
        };
        Ok(Some((tok, line, col)))
    }

    fn peek(&mut self) -> Result<Option<&(Token, usize, usize)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lex()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn next(&mut self) -> Result<Option<(Token, usize, usize)>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(Some(t)),
            None => self.lex(),
        }
    }

    fn parse(mut self) -> Result<Polynomial, ParseError> {
        // Terms reference names; ids are assigned after sorting all names.
        let mut raw: Vec<(BigInt, Vec<(String, u32)>)> = Vec::new();
        let mut sign = match self.peek()? {
            Some((Token::Minus, ..)) => {
                self.next()?;
                -1
            }
            Some((Token::Plus, ..)) => {
                self.next()?;
                1
            }
            _ => 1,
        };
        loop {
            let (coeff, factors) = self.term()?;
            raw.push((coeff * sign, factors));
            match self.next()? {
                None => break,
                Some((Token::Plus, ..)) => sign = 1,
                Some((Token::Minus, ..)) => sign = -1,
                Some((tok, line, col)) => {
                    return Err(self.err(line, col, format!("expected '+', '-' or end of input, found {}", describe(&tok))))
                }
            }
        }

        let mut names: Vec<String> = raw
            .iter()
            .flat_map(|(_, fs)| fs.iter().map(|(n, _)| n.clone()))
            .collect();
        names.sort();
        names.dedup();
        let index: HashMap<&str, VarId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), VarId(i as u32)))
            .collect();
        let terms: Vec<(BigInt, Monomial)> = raw
            .iter()
            .map(|(c, fs)| {
                let mono = Monomial::from_pairs(fs.iter().map(|(n, e)| (index[n.as_str()], *e)));
                (c.clone(), mono)
            })
            .collect();
        let vars = VarTable { names };
        Ok(Polynomial::from_terms(vars, terms).expect("all names interned"))
    }

    fn term(&mut self) -> Result<(BigInt, Vec<(String, u32)>), ParseError> {
        let mut coeff = BigInt::one();
        let mut factors = Vec::new();
        loop {
            match self.next()? {
                Some((Token::Int(n), ..)) => coeff *= n,
                Some((Token::Ident(name), ..)) => {
                    let mut exp = 1u32;
                    if let Some((Token::Caret, ..)) = self.peek()? {
                        self.next()?;
                        match self.next()? {
                            Some((Token::Int(n), line, col)) => {
                                if n.is_zero() {
                                    return Err(self.err(line, col, "exponent must be positive"));
                                }
                                exp = u32::try_from(&n)
                                    .map_err(|_| self.err(line, col, "exponent too large"))?;
                            }
                            Some((Token::Minus, line, col)) => {
                                return Err(self.err(line, col, "exponent must be positive"))
                            }
                            Some((tok, line, col)) => {
                                return Err(self.err(line, col, format!("expected exponent, found {}", describe(&tok))))
                            }
                            None => return Err(self.err(self.line, self.col, "expected exponent, found end of input")),
                        }
                    }
                    factors.push((name, exp));
                }
                Some((tok, line, col)) => {
                    return Err(self.err(line, col, format!("expected integer or identifier, found {}", describe(&tok))))
                }
                None => return Err(self.err(self.line, self.col, "expected integer or identifier, found end of input")),
            }
            match self.peek()? {
                Some((Token::Star, ..)) => {
                    self.next()?;
                }
                _ => return Ok((coeff, factors)),
            }
        }
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Int(n) => format!("integer {n}"),
        Token::Ident(s) => format!("identifier '{s}'"),
        Token::Plus => "'+'".into(),
        Token::Minus => "'-'".into(),
        Token::Star => "'*'".into(),
        Token::Caret => "'^'".into(),
    }
}
