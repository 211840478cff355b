//! Observable specifications and their canonical text form.
//!
//! ```text
//! spec    := ("C" | "Q") "[" poly "]"
//! poly    := ["-"] term (("+" | "-") term)*  |  "0"
//! term    := number  |  [number "*"] body
//! body    := "sym(" product ")"  |  product
//! product := atom ("*" atom)*
//! atom    := symbol ["^" integer]
//! symbol  := classical: x u        quantum: q p q' p' x k
//! ```
//!
//! Products are kept in the order written. Quantum products that place `q`
//! and `p` of the same mode side by side must be wrapped in `sym(...)`
//! (Weyl symmetrization); every accepted term is then the Weyl
//! quantization of its commutative monomial.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::poly::Poly;
use crate::{Error, Mode, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Classical,
    Quantum,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Classical => "classical",
            Kind::Quantum => "quantum",
        }
    }
}

/// For classical observables `Position(C)` is `x` and `Momentum(C)` is
/// `u = d_x S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    Position(Mode),
    Momentum(Mode),
}

impl Primitive {
    pub fn mode(self) -> Mode {
        match self {
            Primitive::Position(m) | Primitive::Momentum(m) => m,
        }
    }

    /// Slot in `(q, p, q', p', x, k)`.
    pub fn slot(self) -> usize {
        match self {
            Primitive::Position(m) => 2 * m.index(),
            Primitive::Momentum(m) => 2 * m.index() + 1,
        }
    }

    fn from_slot(slot: usize) -> Primitive {
        let m = Mode::from_index(slot / 2).expect("slot < 6");
        if slot % 2 == 0 {
            Primitive::Position(m)
        } else {
            Primitive::Momentum(m)
        }
    }

    fn symbol(self, kind: Kind) -> &'static str {
        use Primitive::*;
        match (kind, self) {
            (Kind::Classical, Position(_)) => "x",
            (Kind::Classical, Momentum(_)) => "u",
            (Kind::Quantum, Position(Mode::Q)) => "q",
            (Kind::Quantum, Momentum(Mode::Q)) => "p",
            (Kind::Quantum, Position(Mode::QPrime)) => "q'",
            (Kind::Quantum, Momentum(Mode::QPrime)) => "p'",
            (Kind::Quantum, Position(Mode::C)) => "x",
            (Kind::Quantum, Momentum(Mode::C)) => "k",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub factors: Vec<Primitive>,
    pub symmetrized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    kind: Kind,
    terms: Vec<Term>,
}

impl ObservableSpec {
    /// Validates kinds, Hermiticity and finiteness; zero-coefficient terms
    /// are dropped.
    pub fn new(kind: Kind, terms: Vec<Term>) -> Result<Self> {
        let mut kept = Vec::with_capacity(terms.len());
        for t in terms {
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {} is not finite",
                    t.coefficient
                )));
            }
            match kind {
                Kind::Classical => {
                    if t.symmetrized {
                        return Err(Error::InvalidArgument(
                            "sym(...) only applies to quantum observables".into(),
                        ));
                    }
                    if t.factors.iter().any(|f| f.mode() != Mode::C) {
                        return Err(Error::InvalidArgument(
                            "classical observables depend on x and u only".into(),
                        ));
                    }
                }
                Kind::Quantum if !t.symmetrized => {
                    let mixed = Mode::ALL.iter().any(|&m| {
                        t.factors.contains(&Primitive::Position(m))
                            && t.factors.contains(&Primitive::Momentum(m))
                    });
                    if mixed {
                        return Err(Error::NonHermitian(render_term(kind, &t, false)));
                    }
                }
                Kind::Quantum => {}
            }
            if t.coefficient != 0.0 {
                kept.push(t);
            }
        }
        Ok(ObservableSpec { kind, terms: kept })
    }

    pub fn classical(f: &Poly) -> Result<Self> {
        Self::from_symbol(Kind::Classical, f)
    }

    pub fn quantum(symbol: &Poly) -> Result<Self> {
        Self::from_symbol(Kind::Quantum, symbol)
    }

    /// Build a spec from a polynomial (the Weyl symbol for quantum kinds).
    pub fn from_symbol(kind: Kind, poly: &Poly) -> Result<Self> {
        let terms = poly
            .terms()
            .map(|(e, c)| {
                let factors: Vec<Primitive> = (0..6)
                    .flat_map(|slot| std::iter::repeat_n(Primitive::from_slot(slot), e[slot] as usize))
                    .collect();
                let symmetrized = kind == Kind::Quantum
                    && (0..3).any(|m| e[2 * m] > 0 && e[2 * m + 1] > 0);
                Term {
                    coefficient: c,
                    factors,
                    symmetrized,
                }
            })
            .collect();
        Self::new(kind, terms)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Subsystems touched by at least one factor.
    pub fn mode_support(&self) -> BTreeSet<Mode> {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.mode()))
            .collect()
    }

    /// Commutative polynomial in the slots; for quantum specs this is the
    /// Weyl symbol of the operator.
    pub fn symbol(&self) -> Poly {
        let mut p = Poly::zero();
        for t in &self.terms {
            let mut e = [0u32; 6];
            for f in &t.factors {
                e[f.slot()] += 1;
            }
            p.add_term(t.coefficient, e);
        }
        p
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coefficient: t.coefficient * s,
                ..t.clone()
            })
            .collect();
        Self::new(self.kind, terms)
    }

    /// Concatenates the terms of two specs of the same kind.
    pub fn plus(&self, other: &ObservableSpec) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.name(),
            });
        }
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.kind, terms)
    }
}

fn render_term(kind: Kind, t: &Term, with_coefficient: bool) -> String {
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < t.factors.len() {
        let f = t.factors[i];
        let mut n = 1;
        while i + n < t.factors.len() && t.factors[i + n] == f {
            n += 1;
        }
        let s = f.symbol(kind);
        atoms.push(if n == 1 { s.to_string() } else { format!("{s}^{n}") });
        i += n;
    }
    let body = atoms.join("*");
    let body = if t.symmetrized { format!("sym({body})") } else { body };
    let c = t.coefficient.abs();
    match (with_coefficient, body.is_empty()) {
        (_, true) => format!("{c}"),
        (true, false) if c != 1.0 => format!("{c}*{body}"),
        _ => body,
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            Kind::Classical => "C",
            Kind::Quantum => "Q",
        };
        write!(f, "{tag}[ ")?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coefficient.is_sign_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}", render_term(self.kind, t, true))?;
        }
        write!(f, " ]")
    }
}

impl FromStr for ObservableSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser { src: s, pos: 0 }.spec()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn spec(&mut self) -> Result<ObservableSpec> {
        let kind = if self.eat("C") {
            Kind::Classical
        } else if self.eat("Q") {
            Kind::Quantum
        } else {
            return self.err("expected `C[` or `Q[`");
        };
        self.expect("[")?;
        let mut terms = Vec::new();
        let mut sign = if self.eat("-") { -1.0 } else { 1.0 };
        loop {
            let mut t = self.term(kind)?;
            t.coefficient *= sign;
            terms.push(t);
            if self.eat("+") {
                sign = 1.0;
            } else if self.eat("-") {
                sign = -1.0;
            } else {
                break;
            }
        }
        self.expect("]")?;
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.err("trailing input");
        }
        // A lone `0` denotes the zero observable.
        if let [t] = terms.as_slice() {
            if t.factors.is_empty() && t.coefficient == 0.0 {
                terms.clear();
            }
        }
        let start = self.pos;
        ObservableSpec::new(kind, terms).map_err(|e| match e {
            Error::NonHermitian(_) | Error::InvalidArgument(_) => Error::Parse {
                pos: start,
                msg: e.to_string(),
            },
            other => other,
        })
    }

    fn number(&mut self) -> Option<Result<f64>> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        if !bytes.first().is_some_and(|b| b.is_ascii_digit() || *b == b'.') {
            return None;
        }
        let mut end = 0;
        while end < bytes.len() {
            let b = bytes[end];
            let exp_sign = (b == b'+' || b == b'-') && end > 0 && matches!(bytes[end - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                end += 1;
            } else {
                break;
            }
        }
        let text = &self.rest()[..end];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += end;
                Some(Ok(v))
            }
            _ => Some(self.err(format!("invalid number `{text}`"))),
        }
    }

    fn term(&mut self, kind: Kind) -> Result<Term> {
        let mut coefficient = 1.0;
        if let Some(c) = self.number() {
            coefficient = c?;
            if !self.eat("*") {
                return Ok(Term {
                    coefficient,
                    factors: Vec::new(),
                    symmetrized: false,
                });
            }
        }
        let symmetrized = self.eat("sym(");
        if symmetrized && kind == Kind::Classical {
            return self.err("sym(...) only applies to quantum observables");
        }
        let mut factors = Vec::new();
        loop {
            let p = self.primitive(kind)?;
            let mut n = 1;
            if self.eat("^") {
                self.skip_ws();
                let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
                n = match self.rest()[..digits].parse::<usize>() {
                    Ok(n) if n > 0 => n,
                    _ => return self.err("expected a positive integer exponent"),
                };
                self.pos += digits;
            }
            factors.extend(std::iter::repeat_n(p, n));
            if !self.eat("*") {
                break;
            }
        }
        if symmetrized {
            self.expect(")")?;
        }
        Ok(Term {
            coefficient,
            factors,
            symmetrized,
        })
    }

    fn primitive(&mut self, kind: Kind) -> Result<Primitive> {
        use Primitive::*;
        let c = match self.peek() {
            Some(c) => c,
            None => return self.err("unexpected end of input"),
        };
        let primed = self.rest()[c.len_utf8()..].starts_with('\'');
        let p = match (kind, c, primed) {
            (Kind::Classical, 'x', false) => Position(Mode::C),
            (Kind::Classical, 'u', false) => Momentum(Mode::C),
            (Kind::Quantum, 'q', p) => Position(if p { Mode::QPrime } else { Mode::Q }),
            (Kind::Quantum, 'p', p) => Momentum(if p { Mode::QPrime } else { Mode::Q }),
            (Kind::Quantum, 'x', false) => Position(Mode::C),
            (Kind::Quantum, 'k', false) => Momentum(Mode::C),
            _ => {
                return self.err(format!("unexpected symbol for a {} observable", kind.name()));
            }
        };
        self.pos += 1 + usize::from(primed);
        Ok(p)
    }
}
