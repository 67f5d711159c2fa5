//! Common subexpression elimination over a hash-consed binary DAG.
//!
//! A [`HornerExpr`] is lowered to binary `Add`/`Mul` nodes. Operands of every
//! n-ary sum or product are sorted by node id and folded left-deep, and powers
//! become multiplication chains `x, x*x, (x*x)*x, ...`, so structurally equal
//! subexpressions (including power prefixes) map to a single node.
//!
//! Addition operands carry a sign, which is how subtraction is represented:
//! negation never costs an operation. The left operand of an `Add` is always
//! positive and has the smaller id, so `a + b`, `b + a`, `a - b` and `-(b - a)`
//! all share one node.
//!
//! Leaves are interned first (variables by id, then constants ascending), and
//! internal nodes follow in creation order, which is topological.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::Error;
use crate::expr::{OpCount, VarId, VarTable};
use crate::horner::HornerExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Reference to a node, possibly negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operand {
    pub node: NodeId,
    pub negated: bool,
}

impl Operand {
    pub fn positive(node: NodeId) -> Self {
        Operand { node, negated: false }
    }

    pub fn flip(self) -> Self {
        Operand {
            node: self.node,
            negated: !self.negated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DagNode {
    Var(VarId),
    /// Non-negative magnitude.
    Const(BigInt),
    Add(Operand, Operand),
    Mul(NodeId, NodeId),
}

impl DagNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, DagNode::Var(_) | DagNode::Const(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprDag {
    nodes: Vec<DagNode>,
    root: Operand,
}

#[derive(Default)]
struct DagBuilder {
    nodes: Vec<DagNode>,
    index: FxHashMap<DagNode, NodeId>,
}

impl DagBuilder {
    fn intern(&mut self, node: DagNode) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn intern_leaves(&mut self, vars: BTreeSet<VarId>, consts: BTreeSet<BigInt>) {
        for v in vars {
            self.intern(DagNode::Var(v));
        }
        for c in consts {
            self.intern(DagNode::Const(c));
        }
    }

    fn add(&mut self, a: Operand, b: Operand) -> Operand {
        let (mut l, mut r) = if a <= b { (a, b) } else { (b, a) };
        let negated = l.negated;
        if negated {
            l = l.flip();
            r = r.flip();
        }
        Operand {
            node: self.intern(DagNode::Add(l, r)),
            negated,
        }
    }

    fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(DagNode::Mul(a.min(b), a.max(b)))
    }

    fn lower(&mut self, e: &HornerExpr) -> Operand {
        match e {
            HornerExpr::Var(v) => Operand::positive(self.intern(DagNode::Var(*v))),
            HornerExpr::Const(c) => Operand {
                node: self.intern(DagNode::Const(c.abs())),
                negated: c.is_negative(),
            },
            HornerExpr::Neg(inner) => self.lower(inner).flip(),
            HornerExpr::Power(base, k) => {
                let b = self.lower(base);
                let mut cur = b.node;
                for _ in 1..*k {
                    cur = self.mul(cur, b.node);
                }
                Operand {
                    node: cur,
                    negated: b.negated && k % 2 == 1,
                }
            }
            HornerExpr::Product(cs) => {
                let mut negated = false;
                let mut ids: Vec<NodeId> = cs
                    .iter()
                    .map(|c| {
                        let o = self.lower(c);
                        negated ^= o.negated;
                        o.node
                    })
                    .collect();
                ids.sort_unstable();
                let mut acc = ids[0];
                for &id in &ids[1..] {
                    acc = self.mul(acc, id);
                }
                Operand { node: acc, negated }
            }
            HornerExpr::Sum(cs) => {
                let mut ops: Vec<Operand> = cs.iter().map(|c| self.lower(c)).collect();
                ops.sort_unstable();
                let mut acc = ops[0];
                for &o in &ops[1..] {
                    acc = self.add(acc, o);
                }
                acc
            }
        }
    }
}

fn collect_leaves(e: &HornerExpr, vars: &mut BTreeSet<VarId>, consts: &mut BTreeSet<BigInt>) {
    match e {
        HornerExpr::Var(v) => {
            vars.insert(*v);
        }
        HornerExpr::Const(c) => {
            consts.insert(c.abs());
        }
        HornerExpr::Neg(inner) | HornerExpr::Power(inner, _) => collect_leaves(inner, vars, consts),
        HornerExpr::Sum(cs) | HornerExpr::Product(cs) => {
            cs.iter().for_each(|c| collect_leaves(c, vars, consts))
        }
    }
}

/// Lowers `e` to a shared DAG.
pub fn build_dag(e: &HornerExpr) -> ExprDag {
    let mut vars = BTreeSet::new();
    let mut consts = BTreeSet::new();
    collect_leaves(e, &mut vars, &mut consts);
    let mut b = DagBuilder::default();
    b.intern_leaves(vars, consts);
    let root = b.lower(e);
    ExprDag { nodes: b.nodes, root }
}

impl ExprDag {
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn root(&self) -> Operand {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DagNode {
        &self.nodes[id.index()]
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root.node];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            match &self.nodes[id.index()] {
                DagNode::Add(l, r) => stack.extend([l.node, r.node]),
                DagNode::Mul(l, r) => stack.extend([*l, *r]),
                DagNode::Var(_) | DagNode::Const(_) => {}
            }
        }
        seen
    }

    /// `Mul` and `Add` nodes reachable from the root.
    pub fn count_ops(&self) -> OpCount {
        let mut ops = OpCount::default();
        for (node, live) in self.nodes.iter().zip(self.reachable()) {
            match node {
                DagNode::Add(..) if live => ops.adds += 1,
                DagNode::Mul(..) if live => ops.muls += 1,
                _ => {}
            }
        }
        ops
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        let mut values: Vec<BigInt> = Vec::with_capacity(self.nodes.len());
        let signed = |values: &[BigInt], o: Operand| {
            let v = &values[o.node.index()];
            if o.negated {
                -v
            } else {
                v.clone()
            }
        };
        for node in &self.nodes {
            let v = match node {
                DagNode::Var(v) => point[v.index()].clone(),
                DagNode::Const(c) => c.clone(),
                DagNode::Add(l, r) => signed(&values, *l) + signed(&values, *r),
                DagNode::Mul(l, r) => &values[l.index()] * &values[r.index()],
            };
            values.push(v);
        }
        signed(&values, self.root)
    }

    /// Straight-line code: one `Z<k> = a op b;` line per reachable internal
    /// node in topological order, then `target = root;`.
    pub fn emit_code(&self, vars: &VarTable, target: &str) -> String {
        let live = self.reachable();
        let mut names: Vec<String> = Vec::with_capacity(self.nodes.len());
        let mut out = String::new();
        let mut next = 1;
        for (i, node) in self.nodes.iter().enumerate() {
            let name = match node {
                DagNode::Var(v) => vars.name(*v).to_string(),
                DagNode::Const(c) => c.to_string(),
                _ if !live[i] => String::new(),
                DagNode::Add(l, r) => {
                    let z = format!("Z{next}");
                    next += 1;
                    let op = if r.negated { '-' } else { '+' };
                    let _ = writeln!(out, "{z} = {} {op} {};", names[l.node.index()], names[r.node.index()]);
                    z
                }
                DagNode::Mul(l, r) => {
                    let z = format!("Z{next}");
                    next += 1;
                    let _ = writeln!(out, "{z} = {}*{};", names[l.index()], names[r.index()]);
                    z
                }
            };
            names.push(name);
        }
        let sign = if self.root.negated { "-" } else { "" };
        let _ = write!(out, "{target} = {sign}{};", names[self.root.node.index()]);
        out
    }

    /// Rebuilds a DAG from code produced by [`Self::emit_code`].
    pub fn from_code(code: &str, vars: &VarTable) -> Result<ExprDag, Error> {
        enum Atom {
            Var(VarId),
            Const(BigInt),
            Temp(String),
        }
        let atom = |tok: &str, line: usize| -> Result<Atom, Error> {
            let tok = tok.trim();
            if tok.starts_with('Z') && tok[1..].chars().all(|c| c.is_ascii_digit()) && tok.len() > 1 {
                Ok(Atom::Temp(tok.to_string()))
            } else if let Some(v) = vars.lookup(tok) {
                Ok(Atom::Var(v))
            } else if let Ok(c) = tok.parse::<BigInt>() {
                Ok(Atom::Const(c))
            } else {
                Err(Error::Code {
                    line,
                    message: format!("unknown operand '{tok}'"),
                })
            }
        };

        enum Stmt {
            Add(String, Atom, bool, Atom),
            Mul(String, Atom, Atom),
            Root(bool, Atom),
        }
        let mut stmts = Vec::new();
        for (i, raw) in code.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Code {
                line,
                message: m.to_string(),
            };
            let body = raw.strip_suffix(';').ok_or_else(|| bad("missing ';'"))?;
            let (lhs, rhs) = body.split_once('=').ok_or_else(|| bad("missing '='"))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if let Some((a, b)) = rhs.split_once('*') {
                stmts.push(Stmt::Mul(lhs.to_string(), atom(a, line)?, atom(b, line)?));
            } else if let Some((a, b)) = rhs.split_once(" + ") {
                stmts.push(Stmt::Add(lhs.to_string(), atom(a, line)?, false, atom(b, line)?));
            } else if let Some((a, b)) = rhs.split_once(" - ") {
                stmts.push(Stmt::Add(lhs.to_string(), atom(a, line)?, true, atom(b, line)?));
            } else if let Some(r) = rhs.strip_prefix('-') {
                stmts.push(Stmt::Root(true, atom(r, line)?));
            } else {
                stmts.push(Stmt::Root(false, atom(rhs, line)?));
            }
        }

        let mut leaf_vars = BTreeSet::new();
        let mut leaf_consts = BTreeSet::new();
        let mut note = |a: &Atom| match a {
            Atom::Var(v) => {
                leaf_vars.insert(*v);
            }
            Atom::Const(c) => {
                leaf_consts.insert(c.clone());
            }
            Atom::Temp(_) => {}
        };
        for s in &stmts {
            match s {
                Stmt::Add(_, a, _, b) | Stmt::Mul(_, a, b) => {
                    note(a);
                    note(b);
                }
                Stmt::Root(_, a) => note(a),
            }
        }

        let mut b = DagBuilder::default();
        b.intern_leaves(leaf_vars, leaf_consts);
        let mut temps: FxHashMap<String, Operand> = FxHashMap::default();
        let mut root = None;
        let resolve = |b: &mut DagBuilder, temps: &FxHashMap<String, Operand>, a: &Atom, line: usize| {
            match a {
                Atom::Var(v) => Ok(Operand::positive(b.intern(DagNode::Var(*v)))),
                Atom::Const(c) => Ok(Operand {
                    node: b.intern(DagNode::Const(c.abs())),
                    negated: c.is_negative(),
                }),
                Atom::Temp(t) => temps.get(t).copied().ok_or_else(|| Error::Code {
                    line,
                    message: format!("'{t}' used before assignment"),
                }),
            }
        };
        for (line, s) in stmts.iter().enumerate() {
            let line = line + 1;
            match s {
                Stmt::Add(z, l, sub, r) => {
                    let l = resolve(&mut b, &temps, l, line)?;
                    let mut r = resolve(&mut b, &temps, r, line)?;
                    if *sub {
                        r = r.flip();
                    }
                    let o = b.add(l, r);
                    temps.insert(z.clone(), o);
                }
                Stmt::Mul(z, l, r) => {
                    let l = resolve(&mut b, &temps, l, line)?;
                    let r = resolve(&mut b, &temps, r, line)?;
                    let node = b.mul(l.node, r.node);
                    temps.insert(
                        z.clone(),
                        Operand {
                            node,
                            negated: l.negated ^ r.negated,
                        },
                    );
                }
                Stmt::Root(neg, a) => {
                    let o = resolve(&mut b, &temps, a, line)?;
                    root = Some(if *neg { o.flip() } else { o });
                }
            }
        }
        let root = root.ok_or(Error::Code {
            line: stmts.len(),
            message: "no final assignment".into(),
        })?;
        Ok(ExprDag { nodes: b.nodes, root })
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self.node(self.root.node), DagNode::Const(c) if c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Polynomial;
    use crate::horner::{apply_scheme, HornerScheme};

    fn var(i: u32) -> HornerExpr {
        HornerExpr::Var(VarId(i))
    }

    #[test]
    fn commutative_sums_collapse() {
        let ab = build_dag(&HornerExpr::Sum(vec![var(0), var(1)]));
        let ba = build_dag(&HornerExpr::Sum(vec![var(1), var(0)]));
        assert_eq!(ab, ba);
        assert_eq!(ab.count_ops(), OpCount::new(0, 1));
    }

    #[test]
    fn shared_subterm_saves_one_add_and_one_mul() {
        // a=0 b=1 c=2 d=3 e=4: c*(b*(a+e)) + d*(b*(a+e))
        let shared = || HornerExpr::Product(vec![var(1), HornerExpr::Sum(vec![var(0), var(4)])]);
        let e = HornerExpr::Sum(vec![
            HornerExpr::Product(vec![var(2), shared()]),
            HornerExpr::Product(vec![var(3), shared()]),
        ]);
        let tree = e.tree_op_count();
        let dag = build_dag(&e).count_ops();
        assert_eq!(tree, OpCount::new(4, 3));
        assert_eq!(dag, OpCount::new(3, 2));
    }

    #[test]
    fn power_prefix_is_shared() {
        let e = HornerExpr::Sum(vec![
            HornerExpr::Power(Box::new(var(0)), 3),
            HornerExpr::Power(Box::new(var(0)), 2),
        ]);
        let d = build_dag(&e);
        assert_eq!(d.count_ops(), OpCount::new(2, 1));
    }

    #[test]
    fn horner_form_of_first_example() {
        let p = Polynomial::parse("x^2*z + x^3*y + x^3*y*z").unwrap();
        let e = apply_scheme(&p, &HornerScheme::forward(vec![VarId(0), VarId(1)])).unwrap();
        assert_eq!(build_dag(&e).count_ops(), OpCount::new(4, 2));
    }

    #[test]
    fn single_leaf() {
        let d = build_dag(&var(0));
        assert_eq!(d.count_ops(), OpCount::new(0, 0));
        let vars = VarTable::from_names(["x"]).unwrap();
        assert_eq!(d.emit_code(&vars, "result"), "result = x;");
    }

    #[test]
    fn emit_product() {
        let vars = VarTable::from_names(["x", "y"]).unwrap();
        let d = build_dag(&HornerExpr::Product(vec![var(0), var(1)]));
        assert_eq!(d.emit_code(&vars, "result"), "Z1 = x*y;\nresult = Z1;");
    }

    #[test]
    fn emit_shared_node_once() {
        let vars = VarTable::from_names(["a", "b", "c"]).unwrap();
        let ab = || HornerExpr::Sum(vec![var(0), var(1)]);
        let e = HornerExpr::Sum(vec![
            HornerExpr::Product(vec![var(2), ab()]),
            HornerExpr::neg(ab()),
        ]);
        let d = build_dag(&e);
        let code = d.emit_code(&vars, "out");
        assert_eq!(code, "Z1 = a + b;\nZ2 = c*Z1;\nZ3 = Z1 - Z2;\nout = -Z3;");
        assert_eq!(code.matches("a + b").count(), 1);
        assert_eq!(code.matches("Z1").count(), 3);
    }

    #[test]
    fn subtraction_orientations_share() {
        let a_minus_b = HornerExpr::Sum(vec![var(0), HornerExpr::neg(var(1))]);
        let b_minus_a = HornerExpr::Sum(vec![var(1), HornerExpr::neg(var(0))]);
        let e = HornerExpr::Product(vec![a_minus_b, b_minus_a]);
        assert_eq!(build_dag(&e).count_ops(), OpCount::new(1, 1));
    }

    #[test]
    fn code_round_trip_rebuilds_identical_dag() {
        let p = Polynomial::parse("3*x^3*y - 2*x*y*z + 7*z^2 - x + 5").unwrap();
        let e = apply_scheme(&p, &HornerScheme::forward(vec![VarId(2), VarId(0), VarId(1)])).unwrap();
        let d = build_dag(&e);
        let code = d.emit_code(p.vars(), "r");
        let again = ExprDag::from_code(&code, p.vars()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn from_code_rejects_garbage() {
        let vars = VarTable::from_names(["x"]).unwrap();
        assert!(ExprDag::from_code("Z1 = x*q;\nr = Z1;", &vars).is_err());
        assert!(ExprDag::from_code("Z1 = x*x", &vars).is_err());
        assert!(ExprDag::from_code("r = Z4;", &vars).is_err());
        assert!(ExprDag::from_code("", &vars).is_err());
    }
}
