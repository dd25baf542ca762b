//! Arithmetic expression language for scenario files.
//!
//! Two variable contexts share one grammar: generator weights are
//! functions of `t`, while metric entries, field components and scalar
//! coefficients are functions of the chart coordinates `x1..xn`. The
//! grammar covers `+ - * / ^`, `pow`, `exp`, `sin`, `cos`, `sqrt`,
//! numeric literals and `pi`. Exponents must fold to constants so that
//! every expression stays closed under symbolic differentiation, which is
//! how derivative weights (`a1'` etc.) are produced without asking the
//! user to type them.

use std::fmt;
use std::sync::Arc;

use tgverify::diff::{C1Fn, Scalar, D1};
use tgverify::manifold::{MetricField, ScalarField, VectorField};

/// Parse failure with the byte offset into the source string.
#[derive(Debug, Clone)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
    pub src: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "parse error at byte {}: {}", self.pos, self.msg)?;
        writeln!(f, "  {}", self.src)?;
        write!(f, "  {}^", " ".repeat(self.pos.min(self.src.len())))
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    /// Index into the evaluation slot vector (`t` is slot 0; `x{k}` is
    /// slot `k - 1`).
    Var(usize),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Neg(Arc<Node>),
    Powi(Arc<Node>, i32),
    Powf(Arc<Node>, f64),
    Exp(Arc<Node>),
    Sin(Arc<Node>),
    Cos(Arc<Node>),
    Sqrt(Arc<Node>),
}

fn eval_node<S: Scalar>(node: &Node, vars: &[S]) -> S {
    match node {
        Node::Const(c) => S::from_f64(*c),
        Node::Var(i) => vars[*i],
        Node::Add(a, b) => eval_node(a, vars) + eval_node(b, vars),
        Node::Sub(a, b) => eval_node(a, vars) - eval_node(b, vars),
        Node::Mul(a, b) => eval_node(a, vars) * eval_node(b, vars),
        Node::Div(a, b) => eval_node(a, vars) / eval_node(b, vars),
        Node::Neg(a) => -eval_node(a, vars),
        Node::Powi(a, k) => eval_node(a, vars).powi(*k),
        Node::Powf(a, p) => eval_node(a, vars).powf_const(*p),
        Node::Exp(a) => eval_node(a, vars).exp(),
        Node::Sin(a) => eval_node(a, vars).sin(),
        Node::Cos(a) => eval_node(a, vars).cos(),
        Node::Sqrt(a) => eval_node(a, vars).sqrt(),
    }
}

// Folding constructors keep derivative trees from drowning in zeros.
fn c(v: f64) -> Arc<Node> {
    Arc::new(Node::Const(v))
}

fn is_const(n: &Node, v: f64) -> bool {
    matches!(n, Node::Const(x) if *x == v)
}

fn add(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Arc::new(Node::Add(a, b))
}

fn sub(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return Arc::new(Node::Neg(b));
    }
    Arc::new(Node::Sub(a, b))
}

fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return c(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Arc::new(Node::Mul(a, b))
}

fn div(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if is_const(&a, 0.0) {
        return c(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Arc::new(Node::Div(a, b))
}

/// d(node)/d(slot var), as a new tree.
fn diff_node(node: &Node, var: usize) -> Arc<Node> {
    match node {
        Node::Const(_) => c(0.0),
        Node::Var(i) => c(if *i == var { 1.0 } else { 0.0 }),
        Node::Add(a, b) => add(diff_node(a, var), diff_node(b, var)),
        Node::Sub(a, b) => sub(diff_node(a, var), diff_node(b, var)),
        Node::Mul(a, b) => add(
            mul(diff_node(a, var), b.clone()),
            mul(a.clone(), diff_node(b, var)),
        ),
        Node::Div(a, b) => div(
            sub(
                mul(diff_node(a, var), b.clone()),
                mul(a.clone(), diff_node(b, var)),
            ),
            Arc::new(Node::Powi(b.clone(), 2)),
        ),
        Node::Neg(a) => {
            let da = diff_node(a, var);
            if is_const(&da, 0.0) {
                da
            } else {
                Arc::new(Node::Neg(da))
            }
        }
        Node::Powi(a, k) => {
            if *k == 0 {
                return c(0.0);
            }
            mul(
                mul(c(*k as f64), Arc::new(Node::Powi(a.clone(), k - 1))),
                diff_node(a, var),
            )
        }
        Node::Powf(a, p) => mul(
            mul(c(*p), Arc::new(Node::Powf(a.clone(), p - 1.0))),
            diff_node(a, var),
        ),
        Node::Exp(a) => mul(Arc::new(Node::Exp(a.clone())), diff_node(a, var)),
        Node::Sin(a) => mul(Arc::new(Node::Cos(a.clone())), diff_node(a, var)),
        Node::Cos(a) => mul(
            Arc::new(Node::Neg(Arc::new(Node::Sin(a.clone())))),
            diff_node(a, var),
        ),
        Node::Sqrt(a) => div(
            diff_node(a, var),
            mul(c(2.0), Arc::new(Node::Sqrt(a.clone()))),
        ),
    }
}

/// Fold a tree to a constant if it contains no variables.
fn const_value(node: &Node) -> Option<f64> {
    Some(match node {
        Node::Const(v) => *v,
        Node::Var(_) => return None,
        Node::Add(a, b) => const_value(a)? + const_value(b)?,
        Node::Sub(a, b) => const_value(a)? - const_value(b)?,
        Node::Mul(a, b) => const_value(a)? * const_value(b)?,
        Node::Div(a, b) => const_value(a)? / const_value(b)?,
        Node::Neg(a) => -const_value(a)?,
        Node::Powi(a, k) => const_value(a)?.powi(*k),
        Node::Powf(a, p) => const_value(a)?.powf(*p),
        Node::Exp(a) => const_value(a)?.exp(),
        Node::Sin(a) => const_value(a)?.sin(),
        Node::Cos(a) => const_value(a)?.cos(),
        Node::Sqrt(a) => const_value(a)?.sqrt(),
    })
}

/// Which variable names the parser accepts.
#[derive(Clone, Copy, Debug)]
enum VarSet {
    /// Only `t` (generator weights).
    T,
    /// `x1..x{n}` (chart functions).
    Coords(usize),
}

impl VarSet {
    fn slots(&self) -> usize {
        match self {
            VarSet::T => 1,
            VarSet::Coords(n) => *n,
        }
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        match self {
            VarSet::T => (name == "t").then_some(0),
            VarSet::Coords(n) => {
                let idx: usize = name.strip_prefix('x')?.parse().ok()?;
                (idx >= 1 && idx <= *n).then(|| idx - 1)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            VarSet::T => "t".into(),
            VarSet::Coords(n) => format!("x1..x{n}"),
        }
    }
}

/// A parsed expression over a fixed variable set.
#[derive(Clone, Debug)]
pub struct Expr {
    src: String,
    root: Arc<Node>,
    slots: usize,
}

impl Expr {
    /// Parse an expression in the single variable `t`.
    pub fn parse_in_t(src: &str) -> Result<Expr, ParseError> {
        Parser::run(src, VarSet::T)
    }

    /// Parse an expression in the chart coordinates `x1..x{n}`.
    pub fn parse_in_coords(src: &str, n: usize) -> Result<Expr, ParseError> {
        Parser::run(src, VarSet::Coords(n))
    }

    /// Evaluate at any scalar level; `vars` supplies one value per slot.
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> S {
        assert!(
            vars.len() >= self.slots,
            "expression `{}` needs {} variable slots, got {}",
            self.src,
            self.slots,
            vars.len()
        );
        eval_node(&self.root, vars)
    }

    /// Symbolic partial derivative with respect to slot `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        Expr {
            src: format!("d[{}]/d#{var}", self.src),
            root: diff_node(&self.root, var),
            slots: self.slots,
        }
    }

    pub fn source(&self) -> &str {
        &self.src
    }
}

/// Parse a generator weight (function of `t`) into a [`C1Fn`] whose
/// derivative comes from symbolic differentiation of the same tree.
pub fn generator_c1fn(src: &str) -> Result<C1Fn, ParseError> {
    let e = Expr::parse_in_t(src)?;
    let d = e.derivative(0);
    let (root, droot) = (e.root, d.root);
    Ok(C1Fn::new(
        move |t| eval_node::<f64>(&root, &[t]),
        move |t| eval_node::<f64>(&droot, &[t]),
    ))
}

// ---------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<(usize, Tok)>,
    at: usize,
    vars: VarSet,
}

impl<'s> Parser<'s> {
    fn run(src: &'s str, vars: VarSet) -> Result<Expr, ParseError> {
        let toks = lex(src)?;
        if toks.is_empty() {
            return Err(err(src, 0, "empty expression"));
        }
        let mut p = Parser {
            src,
            toks,
            at: 0,
            vars,
        };
        let root = p.expr()?;
        if p.at < p.toks.len() {
            let (pos, tok) = &p.toks[p.at];
            return Err(err(src, *pos, &format!("unexpected `{}`", show(tok))));
        }
        Ok(Expr {
            src: src.to_owned(),
            root,
            slots: vars.slots(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.at)
            .map(|(p, _)| *p)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(err(self.src, self.pos(), what))
        }
    }

    fn expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    lhs = Arc::new(Node::Add(lhs, self.term()?));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    lhs = Arc::new(Node::Sub(lhs, self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    lhs = Arc::new(Node::Mul(lhs, self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    lhs = Arc::new(Node::Div(lhs, self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Arc<Node>, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            return Ok(Arc::new(Node::Neg(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Arc<Node>, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let exp_pos = self.pos();
            let exp = self.factor()?;
            return self.make_pow(base, &exp, exp_pos);
        }
        Ok(base)
    }

    fn make_pow(
        &self,
        base: Arc<Node>,
        exp: &Node,
        exp_pos: usize,
    ) -> Result<Arc<Node>, ParseError> {
        let p = const_value(exp).ok_or_else(|| {
            err(
                self.src,
                exp_pos,
                "exponent must be a constant expression",
            )
        })?;
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            Ok(Arc::new(Node::Powi(base, p as i32)))
        } else {
            Ok(Arc::new(Node::Powf(base, p)))
        }
    }

    fn atom(&mut self) -> Result<Arc<Node>, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Num(_)) => {
                if let Tok::Num(v) = self.bump() {
                    Ok(c(v))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) => {
                let name = match self.bump() {
                    Tok::Ident(s) => s,
                    _ => unreachable!(),
                };
                if self.peek() == Some(&Tok::LParen) {
                    self.at += 1;
                    self.call(&name, pos)
                } else if name == "pi" {
                    Ok(c(std::f64::consts::PI))
                } else if let Some(slot) = self.vars.resolve(&name) {
                    Ok(Arc::new(Node::Var(slot)))
                } else {
                    Err(err(
                        self.src,
                        pos,
                        &format!(
                            "unknown variable `{name}` (allowed: {})",
                            self.vars.describe()
                        ),
                    ))
                }
            }
            _ => Err(err(self.src, pos, "expected a number, name or `(`")),
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Arc<Node>, ParseError> {
        let mut args = vec![self.expr()?];
        let mut arg_positions = vec![pos];
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            arg_positions.push(self.pos());
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "expected `)` after arguments")?;

        let unary = |args: Vec<Arc<Node>>,
                     make: fn(Arc<Node>) -> Node|
         -> Result<Arc<Node>, ParseError> {
            if args.len() != 1 {
                return Err(err(
                    self.src,
                    pos,
                    &format!("`{name}` takes exactly one argument"),
                ));
            }
            Ok(Arc::new(make(args.into_iter().next().unwrap())))
        };

        match name {
            "exp" => unary(args, Node::Exp),
            "sin" => unary(args, Node::Sin),
            "cos" => unary(args, Node::Cos),
            "sqrt" => unary(args, Node::Sqrt),
            "pow" => {
                if args.len() != 2 {
                    return Err(err(self.src, pos, "`pow` takes exactly two arguments"));
                }
                let exp = args.pop().unwrap();
                let base = args.pop().unwrap();
                self.make_pow(base, &exp, arg_positions[1])
            }
            _ => Err(err(self.src, pos, &format!("unknown function `{name}`"))),
        }
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("{v}"),
        Tok::Ident(s) => s.clone(),
        Tok::Plus => "+".into(),
        Tok::Minus => "-".into(),
        Tok::Star => "*".into(),
        Tok::Slash => "/".into(),
        Tok::Caret => "^".into(),
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
        Tok::Comma => ",".into(),
    }
}

fn err(src: &str, pos: usize, msg: &str) -> ParseError {
    ParseError {
        pos,
        msg: msg.to_owned(),
        src: src.to_owned(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // optional exponent, only when followed by digits
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| err(src, start, &format!("malformed number `{text}`")))?;
                toks.push((start, Tok::Num(v)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(src[start..i].to_owned())));
            }
            _ => {
                return Err(err(
                    src,
                    i,
                    &format!("unexpected character `{}`", &src[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------
// Field adapters
// ---------------------------------------------------------------------

/// Vector field (or 1-form, by components) given by coordinate
/// expressions.
pub struct ExprField {
    n: usize,
    comps: Vec<Expr>,
}

impl ExprField {
    pub fn new(sources: &[String], n: usize) -> Result<Self, ParseError> {
        let comps = sources
            .iter()
            .map(|s| Expr::parse_in_coords(s, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExprField { n, comps })
    }

    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        for (o, e) in out.iter_mut().zip(&self.comps) {
            *o = e.eval(x);
        }
    }
}

impl VectorField for ExprField {
    fn dim(&self) -> usize {
        self.n
    }
    tgverify::forward_field_impls!(components);
}

/// Scalar field given by one coordinate expression.
pub struct ExprScalar {
    expr: Expr,
}

impl ExprScalar {
    pub fn new(source: &str, n: usize) -> Result<Self, ParseError> {
        Ok(ExprScalar {
            expr: Expr::parse_in_coords(source, n)?,
        })
    }

    /// Directional derivative `X(f)` at `x` via a dual-number pass.
    pub fn directional(&self, x: &[f64], xdir: &[f64]) -> f64 {
        let seeded: Vec<D1> = x
            .iter()
            .zip(xdir)
            .map(|(&v, &d)| D1::new(v, d))
            .collect();
        self.expr.eval(&seeded).du
    }

    fn value<S: Scalar>(&self, x: &[S]) -> S {
        self.expr.eval(x)
    }
}

impl ScalarField for ExprScalar {
    tgverify::forward_field_impls!(scalar);
}

/// Chart metric given by a row-major matrix of coordinate expressions.
/// Entries are symmetrized on evaluation, so mild asymmetry in the input
/// is forgiven rather than silently breaking inner products.
pub struct ExprMetric {
    n: usize,
    entries: Vec<Expr>,
}

impl ExprMetric {
    pub fn new(rows: &[Vec<String>], n: usize) -> Result<Self, ParseError> {
        assert_eq!(rows.len(), n, "metric needs {n} rows");
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "metric rows need {n} entries");
            for s in row {
                entries.push(Expr::parse_in_coords(s, n)?);
            }
        }
        Ok(ExprMetric { n, entries })
    }

    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let n = self.n;
        let vals: Vec<S> = self.entries.iter().map(|e| e.eval(x)).collect();
        let half = S::from_f64(0.5);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (vals[i * n + j] + vals[j * n + i]) * half;
            }
        }
    }
}

impl MetricField for ExprMetric {
    fn dim(&self) -> usize {
        self.n
    }
    tgverify::forward_field_impls!(components);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use tgverify::diff::D2;

    fn d2_noop(x: f64) -> D2 {
        D2::constant(D1::constant(x))
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse_in_t("2+3*4^2").unwrap();
        assert_eq!(e.eval(&[0.0f64]), 50.0);
        let e = Expr::parse_in_t("-t^2").unwrap();
        assert_eq!(e.eval(&[3.0f64]), -9.0);
        let e = Expr::parse_in_t("(2+3)*4").unwrap();
        assert_eq!(e.eval(&[0.0f64]), 20.0);
        let e = Expr::parse_in_t("2 - 3 - 4").unwrap();
        assert_eq!(e.eval(&[0.0f64]), -5.0);
        let e = Expr::parse_in_t("t^-2").unwrap();
        assert_relative_eq!(e.eval(&[2.0f64]), 0.25);
    }

    #[test]
    fn functions_and_constants() {
        let e = Expr::parse_in_coords("exp(x1)*sin(x2) + sqrt(x1^2) + pi", 2).unwrap();
        let v = e.eval(&[0.5f64, 1.2]);
        assert_relative_eq!(
            v,
            0.5f64.exp() * 1.2f64.sin() + 0.5 + std::f64::consts::PI,
            max_relative = 1e-15
        );
        let p = Expr::parse_in_t("pow(t, 3)").unwrap();
        let q = Expr::parse_in_t("t^3").unwrap();
        assert_eq!(p.eval(&[1.7f64]), q.eval(&[1.7f64]));
        // scientific notation
        let s = Expr::parse_in_t("1.5e-3 * t").unwrap();
        assert_relative_eq!(s.eval(&[2.0f64]), 3.0e-3);
    }

    #[test]
    fn symbolic_derivative_matches_dual_numbers() {
        let sources = [
            "t^3 - 2*t + 1",
            "exp(0.3*t) / (1 + t^2)",
            "sin(t)*cos(2*t) + sqrt(1 + t^2)",
            "pow(1 + t, 2.5)",
            "t^-1 + 3/t^2",
        ];
        for src in sources {
            let e = Expr::parse_in_t(src).unwrap();
            let de = e.derivative(0);
            for k in 0..20 {
                let t = 0.1 + 0.17 * k as f64;
                let dual = e.eval(&[D1::new(t, 1.0)]).du;
                let symbolic = de.eval(&[t]);
                assert_relative_eq!(dual, symbolic, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn generator_c1fn_round_trip() {
        let f = generator_c1fn("1 + 0.5*t^2").unwrap();
        assert_eq!(f.eval(2.0), 3.0);
        assert_eq!(f.deriv(2.0), 2.0);
    }

    #[test]
    fn error_positions_are_reported() {
        let e = Expr::parse_in_t("1 + $").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.msg.contains("unexpected character"));

        let e = Expr::parse_in_t("1 + x1").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.msg.contains("unknown variable"));

        let e = Expr::parse_in_coords("x1 ^ x2", 2).unwrap_err();
        assert!(e.msg.contains("constant"));

        let e = Expr::parse_in_t("sin(t").unwrap_err();
        assert!(e.msg.contains("expected `)`"));

        let e = Expr::parse_in_t("pow(t)").unwrap_err();
        assert!(e.msg.contains("two arguments"));

        let e = Expr::parse_in_t("").unwrap_err();
        assert!(e.msg.contains("empty"));

        let e = Expr::parse_in_t("2 3").unwrap_err();
        assert!(e.msg.contains("unexpected"));
    }

    #[test]
    fn expr_field_supports_all_scalar_levels() {
        let f = ExprField::new(
            &["exp(0.3*x1)*0.8".into(), "exp(0.3*x1)*(-0.5)".into()],
            2,
        )
        .unwrap();
        let mut out = [0.0f64; 2];
        f.eval(&[1.0, 2.0], &mut out);
        assert_relative_eq!(out[0], 0.3f64.exp() * 0.8, max_relative = 1e-15);

        let x1 = [D1::new(1.0, 1.0), D1::constant(2.0)];
        let mut out1 = [D1::constant(0.0); 2];
        f.eval_d1(&x1, &mut out1);
        assert_relative_eq!(out1[0].du, 0.3 * 0.3f64.exp() * 0.8, max_relative = 1e-12);

        let x2 = [
            D2::new(D1::new(1.0, 1.0), D1::constant(1.0)),
            d2_noop(2.0),
        ];
        let mut out2 = [d2_noop(0.0); 2];
        f.eval_d2(&x2, &mut out2);
        assert_relative_eq!(
            out2[0].du.du,
            0.09 * 0.3f64.exp() * 0.8,
            max_relative = 1e-12
        );
    }

    #[test]
    fn expr_metric_symmetrizes() {
        let m = ExprMetric::new(
            &[
                vec!["1".into(), "x1".into()],
                vec!["0".into(), "1 + x1^2".into()],
            ],
            2,
        )
        .unwrap();
        let mut g = [0.0f64; 4];
        m.eval(&[2.0, 0.0], &mut g);
        assert_eq!(g[1], 1.0); // (x1 + 0) / 2
        assert_eq!(g[2], 1.0);
        assert_eq!(g[3], 5.0);
    }

    #[test]
    fn scalar_directional_derivative() {
        let s = ExprScalar::new("-cos(x1)", 2).unwrap();
        let d = s.directional(&[0.7, 0.0], &[2.0, 1.0]);
        assert_relative_eq!(d, 2.0 * 0.7f64.sin(), max_relative = 1e-12);
    }
}
