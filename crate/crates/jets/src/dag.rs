use std::collections::HashMap;

use interval_core::{Interval, IntervalVector};

use crate::error::JetError;
use crate::jet::{Jet2, Jet2Scalar};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sqr,
    Sqrt,
    Recip,
    Sin,
    Cos,
    Exp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One DAG node. Children always have smaller indices than their parent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node {
    Var(usize),
    Const(Interval),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
}

/// Handle to a node inside a [`DagBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    Var(usize),
    Const(u64, u64),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
}

/// Builds an [`ExprDag`], sharing structurally identical nodes.
#[derive(Clone, Debug)]
pub struct DagBuilder {
    var_names: Vec<String>,
    nodes: Vec<Node>,
    index: HashMap<Key, usize>,
}

impl DagBuilder {
    pub fn new<S: AsRef<str>>(var_names: &[S]) -> Self {
        DagBuilder {
            var_names: var_names.iter().map(|s| s.as_ref().to_string()).collect(),
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.var_names.len()
    }

    fn push(&mut self, node: Node) -> NodeId {
        let key = match node {
            Node::Var(i) => Key::Var(i),
            Node::Const(c) => Key::Const(c.lo().to_bits(), c.hi().to_bits()),
            Node::Unary(op, a) => Key::Unary(op, a),
            Node::Binary(op, a, b) => Key::Binary(op, a, b),
        };
        if let Some(&i) = self.index.get(&key) {
            return NodeId(i);
        }
        self.nodes.push(node);
        let i = self.nodes.len() - 1;
        self.index.insert(key, i);
        NodeId(i)
    }

    pub fn var(&mut self, i: usize) -> NodeId {
        assert!(i < self.arity(), "variable index {i} out of range");
        self.push(Node::Var(i))
    }

    pub fn var_named(&mut self, name: &str) -> Result<NodeId, JetError> {
        let i = self
            .var_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| JetError::UnknownVariable(name.to_string()))?;
        Ok(self.var(i))
    }

    pub fn constant(&mut self, c: Interval) -> NodeId {
        self.push(Node::Const(c))
    }

    pub fn num(&mut self, x: f64) -> NodeId {
        self.constant(Interval::point(x))
    }

    /// The exact rational `p / q`, enclosed.
    pub fn ratio(&mut self, p: f64, q: f64) -> NodeId {
        let c = Interval::point(p).div(&Interval::point(q)).expect("nonzero denominator");
        self.constant(c)
    }

    pub fn unary(&mut self, op: UnaryOp, a: NodeId) -> NodeId {
        self.push(Node::Unary(op, a.0))
    }

    pub fn binary(&mut self, op: BinaryOp, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Binary(op, a.0, b.0))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary(BinaryOp::Add, a, b)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary(BinaryOp::Sub, a, b)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary(BinaryOp::Mul, a, b)
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary(BinaryOp::Div, a, b)
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Neg, a)
    }

    pub fn sqr(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Sqr, a)
    }

    pub fn sqrt(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Sqrt, a)
    }

    pub fn recip(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Recip, a)
    }

    pub fn sin(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Sin, a)
    }

    pub fn cos(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Cos, a)
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.unary(UnaryOp::Exp, a)
    }

    /// `a^n`, expanded into squarings and products.
    pub fn pow(&mut self, a: NodeId, n: i32) -> NodeId {
        if n == 0 {
            return self.num(1.0);
        }
        if n < 0 {
            let p = self.pow(a, -n);
            return self.recip(p);
        }
        if n == 1 {
            return a;
        }
        let half = self.pow(a, n / 2);
        let sq = self.sqr(half);
        if n % 2 == 1 {
            self.mul(sq, a)
        } else {
            sq
        }
    }

    /// Sum of several terms (zero for an empty list).
    pub fn sum(&mut self, terms: &[NodeId]) -> NodeId {
        match terms.split_first() {
            None => self.num(0.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.add(acc, t)),
        }
    }

    /// Copies `dag` into this builder with its variables replaced by `args`.
    pub fn inline(&mut self, dag: &ExprDag, args: &[NodeId]) -> Vec<NodeId> {
        assert_eq!(args.len(), dag.arity(), "inline argument count");
        let mut map = Vec::with_capacity(dag.nodes.len());
        for node in &dag.nodes {
            let id = match *node {
                Node::Var(i) => args[i],
                Node::Const(c) => self.constant(c),
                Node::Unary(op, a) => self.unary(op, map[a]),
                Node::Binary(op, a, b) => self.binary(op, map[a], map[b]),
            };
            map.push(id);
        }
        dag.outputs.iter().map(|&o| map[o]).collect()
    }

    pub fn finish(self, outputs: &[NodeId]) -> ExprDag {
        // Keep only nodes reachable from the outputs, preserving order.
        let mut live = vec![false; self.nodes.len()];
        for o in outputs {
            live[o.0] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if !live[i] {
                continue;
            }
            match self.nodes[i] {
                Node::Unary(_, a) => live[a] = true,
                Node::Binary(_, a, b) => {
                    live[a] = true;
                    live[b] = true;
                }
                _ => {}
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let n = match *node {
                Node::Unary(op, a) => Node::Unary(op, remap[a]),
                Node::Binary(op, a, b) => Node::Binary(op, remap[a], remap[b]),
                other => other,
            };
            remap[i] = nodes.len();
            nodes.push(n);
        }
        ExprDag {
            var_names: self.var_names,
            nodes,
            outputs: outputs.iter().map(|o| remap[o.0]).collect(),
        }
    }
}

/// A vector-valued expression over named real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprDag {
    var_names: Vec<String>,
    nodes: Vec<Node>,
    outputs: Vec<usize>,
}

impl ExprDag {
    pub fn arity(&self) -> usize {
        self.var_names.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Evaluates all outputs over any [`Scalar`] type.
    pub fn eval<S: Scalar>(&self, inputs: &[S]) -> Result<Vec<S>, JetError> {
        if inputs.len() != self.arity() {
            return Err(JetError::DimensionMismatch {
                expected: self.arity(),
                got: inputs.len(),
            });
        }
        let like = match inputs.first() {
            Some(x) => x.clone(),
            None => return Err(JetError::DimensionMismatch { expected: 1, got: 0 }),
        };
        let mut vals: Vec<S> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => inputs[i].clone(),
                Node::Const(c) => S::constant(c, &like),
                Node::Unary(op, a) => unary(op, &vals[a])?,
                Node::Binary(op, a, b) => binary(op, &vals[a], &vals[b])?,
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    pub fn eval_interval(&self, x: &IntervalVector) -> Result<IntervalVector, JetError> {
        Ok(self.eval(x.as_slice())?.into())
    }

    pub fn eval_point(&self, x: &[f64]) -> Result<Vec<f64>, JetError> {
        self.eval(x)
    }

    /// Taylor coefficients `x_0 .. x_order` of the solution of `x' = f(x)`
    /// with `x(0) = x0`. Requires as many outputs as variables.
    pub fn taylor<S: Scalar>(&self, x0: &[S], order: usize) -> Result<Vec<Vec<S>>, JetError> {
        if self.output_count() != self.arity() || x0.len() != self.arity() {
            return Err(JetError::DimensionMismatch {
                expected: self.arity(),
                got: x0.len().min(self.output_count()),
            });
        }
        let like = x0[0].clone();
        let inv: Vec<Interval> = (0..=order + 1)
            .map(|k| {
                if k == 0 {
                    Interval::ZERO
                } else {
                    Interval::ONE.div(&Interval::point(k as f64)).expect("nonzero")
                }
            })
            .collect();
        let n = self.nodes.len();
        let mut ser: Vec<Vec<S>> = vec![Vec::with_capacity(order); n];
        let mut aux: Vec<Vec<S>> = vec![Vec::new(); n];
        let mut vars: Vec<Vec<S>> = x0.iter().map(|x| vec![x.clone()]).collect();
        for k in 0..order {
            for idx in 0..n {
                let c = match self.nodes[idx] {
                    Node::Var(i) => vars[i][k].clone(),
                    Node::Const(c) => {
                        if k == 0 {
                            S::constant(c, &like)
                        } else {
                            S::zero(&like)
                        }
                    }
                    Node::Binary(op, a, b) => {
                        let (sa, sb, sc) = (&ser[a], &ser[b], &ser[idx]);
                        match op {
                            BinaryOp::Add => sa[k].add(&sb[k]),
                            BinaryOp::Sub => sa[k].sub(&sb[k]),
                            BinaryOp::Mul => cauchy(sa, sb, 0, k),
                            BinaryOp::Div => {
                                if k == 0 {
                                    sa[0].div(&sb[0])?
                                } else {
                                    let acc = cauchy(sb, sc, 1, k);
                                    sa[k].sub(&acc).div(&sb[0])?
                                }
                            }
                        }
                    }
                    Node::Unary(op, a) => {
                        let (sa, sc) = (&ser[a], &ser[idx]);
                        match op {
                            UnaryOp::Neg => sa[k].neg(),
                            UnaryOp::Sqr => square_coeff(sa, k),
                            UnaryOp::Sqrt => {
                                if k == 0 {
                                    sa[0].sqrt()?
                                } else if k == 1 {
                                    sa[1].div(&sc[0].scale(Interval::point(2.0)))?
                                } else {
                                    let acc = cauchy_inner(sc, k);
                                    sa[k].sub(&acc).div(&sc[0].scale(Interval::point(2.0)))?
                                }
                            }
                            UnaryOp::Recip => {
                                if k == 0 {
                                    S::constant(Interval::ONE, &like).div(&sa[0])?
                                } else {
                                    cauchy(sa, sc, 1, k).neg().div(&sa[0])?
                                }
                            }
                            UnaryOp::Exp => {
                                if k == 0 {
                                    sa[0].exp()
                                } else {
                                    weighted(sa, sc, k, &inv)
                                }
                            }
                            UnaryOp::Sin | UnaryOp::Cos => {
                                let sign = if op == UnaryOp::Sin { 1.0 } else { -1.0 };
                                if k == 0 {
                                    let (s, c) = (sa[0].sin(), sa[0].cos());
                                    let (main, comp) = if op == UnaryOp::Sin { (s, c) } else { (c, s) };
                                    aux[idx].push(comp);
                                    main
                                } else {
                                    // main' = sign * a' * comp, comp' = -sign * a' * main
                                    let main = weighted(sa, &aux[idx], k, &inv).scale(Interval::point(sign));
                                    let comp = weighted(sa, sc, k, &inv).scale(Interval::point(-sign));
                                    aux[idx].push(comp);
                                    main
                                }
                            }
                        }
                    }
                };
                ser[idx].push(c);
            }
            for i in 0..self.arity() {
                let next = ser[self.outputs[i]][k].scale(inv[k + 1]);
                vars[i].push(next);
            }
        }
        Ok(vars)
    }

    /// The field `-f` (same variables).
    pub fn negated(&self) -> ExprDag {
        let mut b = DagBuilder::new(&self.var_names);
        let args: Vec<NodeId> = (0..self.arity()).map(|i| b.var(i)).collect();
        let outs = b.inline(self, &args);
        let neg: Vec<NodeId> = outs.into_iter().map(|o| b.neg(o)).collect();
        b.finish(&neg)
    }

    /// `self o inner`: variables of `self` replaced by the outputs of `inner`.
    pub fn substitute(&self, inner: &ExprDag) -> Result<ExprDag, JetError> {
        if inner.output_count() != self.arity() {
            return Err(JetError::DimensionMismatch {
                expected: self.arity(),
                got: inner.output_count(),
            });
        }
        let mut b = DagBuilder::new(&inner.var_names);
        let args: Vec<NodeId> = (0..inner.arity()).map(|i| b.var(i)).collect();
        let mid = b.inline(inner, &args);
        let outs = b.inline(self, &mid);
        Ok(b.finish(&outs))
    }

    /// Keeps the listed outputs.
    pub fn select_outputs(&self, idx: &[usize]) -> ExprDag {
        let mut b = DagBuilder::new(&self.var_names);
        let args: Vec<NodeId> = (0..self.arity()).map(|i| b.var(i)).collect();
        let outs = b.inline(self, &args);
        let picked: Vec<NodeId> = idx.iter().map(|&i| outs[i]).collect();
        b.finish(&picked)
    }

    /// Renames the variables (same count).
    pub fn with_var_names<S: AsRef<str>>(&self, names: &[S]) -> ExprDag {
        assert_eq!(names.len(), self.arity(), "variable count");
        let mut d = self.clone();
        d.var_names = names.iter().map(|s| s.as_ref().to_string()).collect();
        d
    }
}

fn unary<S: Scalar>(op: UnaryOp, a: &S) -> Result<S, JetError> {
    Ok(match op {
        UnaryOp::Neg => a.neg(),
        UnaryOp::Sqr => a.sqr(),
        UnaryOp::Sqrt => a.sqrt()?,
        UnaryOp::Recip => S::constant(Interval::ONE, a).div(a)?,
        UnaryOp::Sin => a.sin(),
        UnaryOp::Cos => a.cos(),
        UnaryOp::Exp => a.exp(),
    })
}

fn binary<S: Scalar>(op: BinaryOp, a: &S, b: &S) -> Result<S, JetError> {
    Ok(match op {
        BinaryOp::Add => a.add(b),
        BinaryOp::Sub => a.sub(b),
        BinaryOp::Mul => a.mul(b),
        BinaryOp::Div => a.div(b)?,
    })
}

/// `sum_{i=from..=k} a_i b_{k-i}`.
fn cauchy<S: Scalar>(a: &[S], b: &[S], from: usize, k: usize) -> S {
    let mut acc = a[from].mul(&b[k - from]);
    for i in from + 1..=k {
        acc = acc.add(&a[i].mul(&b[k - i]));
    }
    acc
}

/// `sum_{i=1..k-1} c_i c_{k-i}` for `k >= 2`.
fn cauchy_inner<S: Scalar>(c: &[S], k: usize) -> S {
    let mut acc = c[1].mul(&c[k - 1]);
    for i in 2..k {
        acc = acc.add(&c[i].mul(&c[k - i]));
    }
    acc
}

/// Coefficient `k` of `a^2`, using the symmetry of the Cauchy product.
fn square_coeff<S: Scalar>(a: &[S], k: usize) -> S {
    let half = k / 2;
    let mut acc: Option<S> = None;
    for i in 0..(k + 1) / 2 {
        let t = a[i].mul(&a[k - i]);
        acc = Some(match acc {
            None => t,
            Some(s) => s.add(&t),
        });
    }
    let doubled = acc.map(|s| s.scale(Interval::point(2.0)));
    if k % 2 == 0 {
        let mid = a[half].sqr();
        match doubled {
            None => mid,
            Some(d) => d.add(&mid),
        }
    } else {
        doubled.expect("odd k has at least one pair")
    }
}

/// `(1/k) sum_{i=1..=k} i a_i c_{k-i}`, the recursion shared by exp, sin, cos.
fn weighted<S: Scalar>(a: &[S], c: &[S], k: usize, inv: &[Interval]) -> S {
    let mut acc = a[1].mul(&c[k - 1]);
    for i in 2..=k {
        acc = acc.add(&a[i].mul(&c[k - i]).scale(Interval::point(i as f64)));
    }
    acc.scale(inv[k])
}

/// Enclosure of `f`, `Df` and `D^2 f` over the box `b`.
pub fn eval_jet2(f: &ExprDag, b: &IntervalVector) -> Result<Jet2, JetError> {
    let n = b.len();
    let seeds: Vec<Jet2Scalar> = (0..n).map(|i| Jet2Scalar::variable(n, i, b[i])).collect();
    Ok(Jet2::from_scalars(&f.eval(&seeds)?))
}

/// Evaluates `f` on inputs that already carry jets (chain rule through `f`).
pub fn eval_jet2_seeded(f: &ExprDag, inputs: &Jet2) -> Result<Jet2, JetError> {
    Ok(Jet2::from_scalars(&f.eval(&inputs.to_scalars())?))
}
