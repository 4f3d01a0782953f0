//! Text form of expression DAGs: one prefix expression per output, e.g.
//! `(- y (* eps (cos t) (sqr y)))`.
//!
//! Operators: `+` `*` (any arity), `-` (negation or left-folded
//! difference), `/`, `neg`, `sqr`, `sqrt`, `recip`, `sin`, `cos`, `exp`,
//! `pow` (integer exponent, expanded at build time) and `interval` (two
//! literal endpoints). Numeric literals are decimal or hexadecimal floats;
//! a decimal literal that is not exactly representable becomes the
//! enclosing one-ulp interval.

use interval_core::Interval;

use crate::dag::{BinaryOp, DagBuilder, ExprDag, Node, NodeId, UnaryOp};
use crate::error::JetError;
use crate::hexfloat::{format_hex, parse_hex};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open(usize),
    Close(usize),
    Atom(usize, String),
}

fn tokenize(s: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur: Option<(usize, String)> = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some((p, a)) = cur.take() {
                out.push(Tok::Atom(p, a));
            }
            if c == '(' {
                out.push(Tok::Open(i));
            } else if c == ')' {
                out.push(Tok::Close(i));
            }
        } else {
            match &mut cur {
                Some((_, a)) => a.push(c),
                None => cur = Some((i, c.to_string())),
            }
        }
    }
    if let Some((p, a)) = cur {
        out.push(Tok::Atom(p, a));
    }
    out
}

fn err(pos: usize, msg: impl Into<String>) -> JetError {
    JetError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// Parses a numeric literal into the tightest enclosing interval.
pub fn parse_number(text: &str) -> Option<Interval> {
    if text.contains("0x") || text.contains("0X") || text.ends_with("inf") {
        return parse_hex(text).map(Interval::point);
    }
    let x: f64 = text.parse().ok()?;
    if !x.is_finite() {
        return None;
    }
    if decimal_is_exact(text) {
        Some(Interval::point(x))
    } else {
        Some(Interval::new(x.next_down(), x.next_up()))
    }
}

/// Whether a decimal literal denotes a binary64 value exactly.
fn decimal_is_exact(text: &str) -> bool {
    let t = text.trim_start_matches(['+', '-']);
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().unwrap_or(i64::MAX)),
        None => (t, 0),
    };
    if exp == i64::MAX {
        return false;
    }
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: String = format!("{ip}{fp}");
    let digits = digits.trim_start_matches('0');
    let mut e10 = exp - fp.len() as i64;
    let mut digits = digits.to_string();
    while digits.ends_with('0') {
        digits.pop();
        e10 += 1;
    }
    if digits.is_empty() {
        return true;
    }
    if digits.len() > 36 {
        return false;
    }
    let mut m: u128 = match digits.parse() {
        Ok(v) => v,
        Err(_) => return false,
    };
    if e10 >= 0 {
        for _ in 0..e10 {
            m = match m.checked_mul(10) {
                Some(v) => v,
                None => return false,
            };
        }
        return m <= (1u128 << 53) || (m >> m.trailing_zeros()) < (1u128 << 53);
    }
    // m / 10^k = (m / 5^k) / 2^k: exact iff 5^k divides m and the quotient fits.
    for _ in 0..(-e10) {
        if m % 5 != 0 {
            return false;
        }
        m /= 5;
    }
    (m >> m.trailing_zeros()) < (1u128 << 53) && e10 > -1074
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    b: &'a mut DagBuilder,
}

impl Parser<'_> {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<NodeId, JetError> {
        match self.next() {
            None => Err(err(usize::MAX, "unexpected end of input")),
            Some(Tok::Close(p)) => Err(err(p, "unexpected `)`")),
            Some(Tok::Atom(p, a)) => self.atom(p, &a),
            Some(Tok::Open(p)) => {
                let (op_pos, op) = match self.next() {
                    Some(Tok::Atom(q, a)) => (q, a),
                    _ => return Err(err(p, "expected an operator after `(`")),
                };
                if op == "interval" {
                    let lo = self.literal()?;
                    let hi = self.literal()?;
                    self.close(op_pos)?;
                    let c = Interval::try_new(lo.lo(), hi.hi())
                        .ok_or_else(|| err(op_pos, "interval endpoints out of order"))?;
                    return Ok(self.b.constant(c));
                }
                if op == "pow" {
                    let base = self.expr()?;
                    let n = match self.next() {
                        Some(Tok::Atom(q, a)) => a.parse::<i32>().map_err(|_| err(q, "pow needs an integer exponent"))?,
                        _ => return Err(err(op_pos, "pow needs an integer exponent")),
                    };
                    self.close(op_pos)?;
                    return Ok(self.b.pow(base, n));
                }
                let mut args = Vec::new();
                loop {
                    match self.toks.get(self.pos) {
                        Some(Tok::Close(_)) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(err(p, "unclosed `(`")),
                        _ => args.push(self.expr()?),
                    }
                }
                self.apply(op_pos, &op, &args)
            }
        }
    }

    fn close(&mut self, at: usize) -> Result<(), JetError> {
        match self.next() {
            Some(Tok::Close(_)) => Ok(()),
            _ => Err(err(at, "expected `)`")),
        }
    }

    fn literal(&mut self) -> Result<Interval, JetError> {
        match self.next() {
            Some(Tok::Atom(p, a)) => parse_number(&a).ok_or_else(|| err(p, format!("bad number `{a}`"))),
            _ => Err(err(usize::MAX, "expected a number")),
        }
    }

    fn atom(&mut self, p: usize, a: &str) -> Result<NodeId, JetError> {
        let starts_numeric = a
            .trim_start_matches(['+', '-'])
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '.');
        if starts_numeric {
            let c = parse_number(a).ok_or_else(|| err(p, format!("bad number `{a}`")))?;
            return Ok(self.b.constant(c));
        }
        self.b.var_named(a)
    }

    fn apply(&mut self, p: usize, op: &str, args: &[NodeId]) -> Result<NodeId, JetError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(p, format!("`{op}` takes {n} argument(s), got {}", args.len())))
            }
        };
        let b = &mut *self.b;
        let unary = |b: &mut DagBuilder, u: UnaryOp| -> Result<NodeId, JetError> {
            arity(1)?;
            Ok(b.unary(u, args[0]))
        };
        match op {
            "+" | "*" => {
                if args.is_empty() {
                    return Err(err(p, format!("`{op}` needs arguments")));
                }
                let bop = if op == "+" { BinaryOp::Add } else { BinaryOp::Mul };
                Ok(args[1..].iter().fold(args[0], |acc, &x| b.binary(bop, acc, x)))
            }
            "-" => match args.len() {
                0 => Err(err(p, "`-` needs arguments")),
                1 => Ok(b.neg(args[0])),
                _ => Ok(args[1..].iter().fold(args[0], |acc, &x| b.sub(acc, x))),
            },
            "/" => {
                arity(2)?;
                Ok(b.div(args[0], args[1]))
            }
            "neg" => unary(b, UnaryOp::Neg),
            "sqr" => unary(b, UnaryOp::Sqr),
            "sqrt" => unary(b, UnaryOp::Sqrt),
            "recip" => unary(b, UnaryOp::Recip),
            "sin" => unary(b, UnaryOp::Sin),
            "cos" => unary(b, UnaryOp::Cos),
            "exp" => unary(b, UnaryOp::Exp),
            _ => Err(err(p, format!("unknown operator `{op}`"))),
        }
    }
}

/// Parses one expression per output over the named variables.
pub fn parse_dag<S: AsRef<str>, T: AsRef<str>>(vars: &[S], outputs: &[T]) -> Result<ExprDag, JetError> {
    let mut b = DagBuilder::new(vars);
    let mut outs = Vec::new();
    for text in outputs {
        let toks = tokenize(text.as_ref());
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            b: &mut b,
        };
        let id = p.expr()?;
        if p.pos != toks.len() {
            let at = match &toks[p.pos] {
                Tok::Open(i) | Tok::Close(i) | Tok::Atom(i, _) => *i,
            };
            return Err(err(at, "trailing input"));
        }
        outs.push(id);
    }
    Ok(b.finish(&outs))
}

fn format_const(c: Interval) -> String {
    let lit = |x: f64| {
        if x == x.trunc() && x.abs() < 9.0e15 {
            format!("{}", x as i64)
        } else {
            format_hex(x)
        }
    };
    if c.is_point() && !(c.lo() == 0.0 && c.lo().is_sign_negative()) {
        lit(c.lo())
    } else {
        format!("(interval {} {})", format_hex(c.lo()), format_hex(c.hi()))
    }
}

fn format_node(dag: &ExprDag, i: usize, out: &mut String) {
    match dag.nodes()[i] {
        Node::Var(v) => out.push_str(&dag.var_names()[v]),
        Node::Const(c) => out.push_str(&format_const(c)),
        Node::Unary(op, a) => {
            let name = match op {
                UnaryOp::Neg => "neg",
                UnaryOp::Sqr => "sqr",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Recip => "recip",
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::Exp => "exp",
            };
            out.push('(');
            out.push_str(name);
            out.push(' ');
            format_node(dag, a, out);
            out.push(')');
        }
        Node::Binary(op, a, b) => {
            let name = match op {
                BinaryOp::Add => "+",
                BinaryOp::Sub => "-",
                BinaryOp::Mul => "*",
                BinaryOp::Div => "/",
            };
            out.push('(');
            out.push_str(name);
            out.push(' ');
            format_node(dag, a, out);
            out.push(' ');
            format_node(dag, b, out);
            out.push(')');
        }
    }
}

/// One expression string per output (shared nodes are written out in full).
pub fn format_dag(dag: &ExprDag) -> Vec<String> {
    dag.outputs()
        .iter()
        .map(|&o| {
            let mut s = String::new();
            format_node(dag, o, &mut s);
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let d = parse_dag(&["x", "y"], &["y", "(- x (sqr x))", "(pow x 3)", "(* 2 x y 0.5)"]).unwrap();
        let v = d.eval_point(&[2.0, 3.0]).unwrap();
        assert_eq!(v, vec![3.0, -2.0, 8.0, 6.0]);
    }

    #[test]
    fn inexact_decimals_are_enclosed() {
        let c = parse_number("0.1").unwrap();
        assert!(!c.is_point());
        assert!(c.contains(0.1));
        assert!(parse_number("0.5").unwrap().is_point());
        assert!(parse_number("1.25e2").unwrap().is_point());
        assert!(parse_number("6.278276608e-6").unwrap().width() > 0.0);
        assert_eq!(parse_number("0x1.8p+1"), Some(Interval::point(3.0)));
    }

    #[test]
    fn round_trip_is_exact() {
        let d = parse_dag(
            &["x", "eps", "t", "y"],
            &["(- y (* eps (cos t) (sqr y)))", "0", "1", "(- x (sqr x))", "(/ (interval 0.1 0.2) (exp (neg x)))"],
        )
        .unwrap();
        let text = format_dag(&d);
        let back = parse_dag(d.var_names(), &text).unwrap();
        assert_eq!(format_dag(&back), text);
        let again = parse_dag(back.var_names(), &format_dag(&back)).unwrap();
        assert_eq!(again, back);
        let x = [0.3, 0.01, 1.2, -0.4];
        assert_eq!(back.eval_point(&x).unwrap(), d.eval_point(&x).unwrap());
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(parse_dag(&["x"], &["(+ x z)"]), Err(JetError::UnknownVariable(_))));
        assert!(matches!(parse_dag(&["x"], &["(+ x"]), Err(JetError::Parse { .. })));
        assert!(matches!(parse_dag(&["x"], &["(foo x)"]), Err(JetError::Parse { .. })));
        assert!(matches!(parse_dag(&["x"], &["x x"]), Err(JetError::Parse { .. })));
        assert!(matches!(parse_dag(&["x"], &["(pow x 1.5)"]), Err(JetError::Parse { .. })));
    }
}
