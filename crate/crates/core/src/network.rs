//! `.glv` network descriptions.
//!
//! ```text
//! # classical Lotka reactions
//! cycle {
//!     n = 1; k12 = 1; k23 = 1; k31 = 1;
//!     order1 = X^1;
//!     order2 = X^1 Y^1;
//! }
//! ```
//!
//! Node 1 carries the stoichiometric complex `0`, node 2 `nX`, node 3 `Y`.
//! `order1`..`order3` set the kinetic-order complexes; an omitted species has
//! exponent 0, and an omitted `order3` defaults to node 3's stoichiometric
//! complex `Y`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GlvError, Result};
use crate::model::{GlvSystem, Rates};

/// Kinetic-order complex `X^alpha Y^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticOrder {
    pub alpha: f64,
    pub beta: f64,
}

impl KineticOrder {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        KineticOrder { alpha, beta }
    }
}

/// The three-reaction cycle `0 → nX → Y → 0` with generalized kinetics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    pub n: f64,
    pub rate12: f64,
    pub rate23: f64,
    pub rate31: f64,
    pub order1: KineticOrder,
    pub order2: KineticOrder,
    pub order3: KineticOrder,
}

impl ReactionNetwork {
    /// Stoichiometric complex of node 3, the default kinetic order there.
    pub const NODE3_DEFAULT: KineticOrder = KineticOrder::new(0.0, 1.0);

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n", self.n),
            ("k12", self.rate12),
            ("k23", self.rate23),
            ("k31", self.rate31),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GlvError::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for o in [self.order1, self.order2, self.order3] {
            if !(o.alpha.is_finite() && o.beta.is_finite()) {
                return Err(GlvError::invalid("kinetic orders must be finite"));
            }
        }
        Ok(())
    }

    /// Mass-action rates `k1 = n k12`, `k2 = n k23`, `k3 = k23`, `k4 = k31`.
    pub fn lower(&self) -> GlvSystem {
        let rates = Rates {
            k1: self.n * self.rate12,
            k2: self.n * self.rate23,
            k3: self.rate23,
            k4: self.rate31,
        };
        GlvSystem::new(
            [
                self.order1.alpha,
                self.order1.beta,
                self.order2.alpha,
                self.order2.beta,
                self.order3.alpha,
                self.order3.beta,
            ],
            rates,
        )
        .expect("validated network lowers to a valid system")
    }

    /// Render in the `.glv` syntax. Numbers use the shortest representation
    /// that parses back to the same `f64`.
    pub fn render(&self) -> String {
        fn order(o: KineticOrder) -> String {
            format!("X^{} Y^{}", o.alpha, o.beta)
        }
        format!(
            "cycle {{\n    n = {};\n    k12 = {};\n    k23 = {};\n    k31 = {};\n    order1 = {};\n    order2 = {};\n    order3 = {};\n}}\n",
            self.n,
            self.rate12,
            self.rate23,
            self.rate31,
            order(self.order1),
            order(self.order2),
            order(self.order3)
        )
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LBrace,
    RBrace,
    Eq,
    Semi,
    Caret,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> GlvError {
    GlvError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<(Vec<Token>, (usize, usize))> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(word), line: tl, column: tc });
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            col += i - start;
            let v: f64 = lit
                .parse()
                .map_err(|_| err(tl, tc, format!("malformed number '{lit}'")))?;
            out.push(Token { tok: Tok::Number(v), line: tl, column: tc });
        } else {
            return Err(err(tl, tc, format!("unexpected character '{c}'")));
        }
    }
    Ok((out, (line, col)))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.eof)
    }

    fn next(&mut self, what: &str) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(err(self.eof.0, self.eof.1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let t = self.next(what)?;
        if t.tok == want {
            Ok(t)
        } else {
            Err(err(t.line, t.column, format!("expected {what}, found {:?}", t.tok)))
        }
    }

    fn number(&mut self) -> Result<(f64, usize, usize)> {
        let t = self.next("a number")?;
        match t.tok {
            Tok::Number(v) => Ok((v, t.line, t.column)),
            other => Err(err(t.line, t.column, format!("expected a number, found {other:?}"))),
        }
    }

    fn order(&mut self) -> Result<KineticOrder> {
        let mut x: Option<f64> = None;
        let mut y: Option<f64> = None;
        let mut terms = 0;
        while let Some(Token { tok: Tok::Ident(_), .. }) = self.peek() {
            let t = self.next("a species")?;
            let Tok::Ident(name) = t.tok else { unreachable!() };
            let slot = match name.as_str() {
                "X" => &mut x,
                "Y" => &mut y,
                other => {
                    return Err(err(t.line, t.column, format!("unknown species '{other}', expected X or Y")))
                }
            };
            if slot.is_some() {
                return Err(err(t.line, t.column, format!("duplicate species {name} in complex")));
            }
            self.expect(Tok::Caret, "'^'")?;
            let (v, l, c) = self.number()?;
            if !v.is_finite() {
                return Err(err(l, c, "kinetic order must be finite"));
            }
            *slot = Some(v);
            terms += 1;
        }
        if terms == 0 {
            let (l, c) = self.here();
            return Err(err(l, c, "expected at least one term X^e or Y^e"));
        }
        Ok(KineticOrder::new(x.unwrap_or(0.0), y.unwrap_or(0.0)))
    }
}

/// Parse a `.glv` network description.
pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    let (toks, eof) = lex(text)?;
    let mut p = Parser { toks, pos: 0, eof };
    let head = p.next("'cycle'")?;
    if head.tok != Tok::Ident("cycle".into()) {
        return Err(err(head.line, head.column, "expected 'cycle'"));
    }
    p.expect(Tok::LBrace, "'{'")?;

    let mut scalars: [Option<f64>; 4] = [None; 4];
    let mut orders: [Option<KineticOrder>; 3] = [None; 3];
    loop {
        let t = p.next("a key or '}'")?;
        let key = match t.tok {
            Tok::RBrace => break,
            Tok::Ident(k) => k,
            other => return Err(err(t.line, t.column, format!("expected a key, found {other:?}"))),
        };
        p.expect(Tok::Eq, "'='")?;
        let dup = || err(t.line, t.column, format!("duplicate key '{key}'"));
        match key.as_str() {
            "n" | "k12" | "k23" | "k31" => {
                let idx = ["n", "k12", "k23", "k31"].iter().position(|k| *k == key).unwrap();
                let (v, l, c) = p.number()?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(err(l, c, format!("{key} must be positive, got {v}")));
                }
                if scalars[idx].replace(v).is_some() {
                    return Err(dup());
                }
            }
            "order1" | "order2" | "order3" => {
                let idx = (key.as_bytes()[5] - b'1') as usize;
                let o = p.order()?;
                if orders[idx].replace(o).is_some() {
                    return Err(dup());
                }
            }
            other => return Err(err(t.line, t.column, format!("unknown key '{other}'"))),
        }
        p.expect(Tok::Semi, "';'")?;
    }
    if let Some(t) = p.peek() {
        return Err(err(t.line, t.column, "trailing input after network block"));
    }

    let missing = |name: &str| err(eof.0, eof.1, format!("missing required key '{name}'"));
    let net = ReactionNetwork {
        n: scalars[0].ok_or_else(|| missing("n"))?,
        rate12: scalars[1].ok_or_else(|| missing("k12"))?,
        rate23: scalars[2].ok_or_else(|| missing("k23"))?,
        rate31: scalars[3].ok_or_else(|| missing("k31"))?,
        order1: orders[0].ok_or_else(|| missing("order1"))?,
        order2: orders[1].ok_or_else(|| missing("order2"))?,
        order3: orders[2].unwrap_or(ReactionNetwork::NODE3_DEFAULT),
    };
    net.validate()?;
    Ok(net)
}
