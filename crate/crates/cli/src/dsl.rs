//! The session script language.
//!
//! ```text
//! ring R = QQ[x,y];
//! ring A = Fp(32003)[Y1,Y2] deg Y1 = (2,1) deg Y2 = (3,1);
//! ideal I = (x^2, x*y);
//! module M = coker [[x, y]] twists (0);
//! module N = M(-2);
//! verify I;
//! powers (x^2, y^3) max_v=4;
//! ```
//!
//! Polynomials are evaluated while parsing, in the most recently declared ring, so every
//! statement of a parsed script carries exact data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use regkit_core::{FieldSpec, Monomial, Multidegree, Polynomial, RingSpec};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    Syntax,
    Undeclared,
    Inhomogeneous,
    Arity,
    NoRing,
    Duplicate,
    Field,
    Type,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "E_SYNTAX",
            ErrorCode::Undeclared => "E_UNDECLARED",
            ErrorCode::Inhomogeneous => "E_INHOMOGENEOUS",
            ErrorCode::Arity => "E_ARITY",
            ErrorCode::NoRing => "E_NO_RING",
            ErrorCode::Duplicate => "E_DUPLICATE",
            ErrorCode::Field => "E_FIELD",
            ErrorCode::Type => "E_TYPE",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {code} {message}")]
pub struct Diagnostic {
    pub code: ErrorCode,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
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
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), pos));
        } else if "=;[](),+-*/^".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
            col += 1;
        } else {
            return Err(Diagnostic { code: ErrorCode::Syntax, message: format!("unexpected character `{c}`"), line, col });
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandKind {
    Reg,
    Betti,
    Koszul,
    Duality,
    Verify,
    Powers,
    Rees,
    LinearPowers,
    Rho,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Reg => "reg",
            CommandKind::Betti => "betti",
            CommandKind::Koszul => "koszul",
            CommandKind::Duality => "duality",
            CommandKind::Verify => "verify",
            CommandKind::Powers => "powers",
            CommandKind::Rees => "rees",
            CommandKind::LinearPowers => "linear-powers",
            CommandKind::Rho => "rho",
        }
    }

    fn options(self) -> &'static [&'static str] {
        match self {
            CommandKind::Koszul => &["bound"],
            CommandKind::Powers => &["max_v", "module"],
            CommandKind::LinearPowers | CommandKind::Rho => &["max_v"],
            _ => &[],
        }
    }

    fn from_word(w: &str) -> Option<Self> {
        Some(match w {
            "reg" => CommandKind::Reg,
            "betti" => CommandKind::Betti,
            "koszul" => CommandKind::Koszul,
            "duality" => CommandKind::Duality,
            "verify" => CommandKind::Verify,
            "powers" => CommandKind::Powers,
            "rees" => CommandKind::Rees,
            "rho" => CommandKind::Rho,
            _ => return None,
        })
    }
}

/// What a command acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Name(String),
    /// An inline ideal `(f1, ..., fk)` in the named ring.
    Literal { ring: String, gens: Vec<Polynomial> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OptValue {
    Int(i64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleDef {
    /// `coker [[row], ...] twists (...)`: columns are the relations.
    Coker { rows: Vec<Vec<Polynomial>>, twists: Vec<Multidegree> },
    /// `image [[row], ...] twists (...)`: columns generate a submodule.
    Image { rows: Vec<Vec<Polynomial>>, twists: Vec<Multidegree> },
    /// `free (t1, ...)`: basis elements in the given degrees.
    Free { twists: Vec<Multidegree> },
    /// `quotient I`: the cyclic module `S / I`.
    Quotient(Target),
    /// `M(a)`.
    Twist { base: String, shift: Multidegree },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Ring { name: String, field: FieldSpec, vars: Vec<(String, Multidegree)>, explicit_degrees: bool },
    Ideal { name: String, ring: String, gens: Vec<Polynomial> },
    Module { name: String, ring: String, def: ModuleDef },
    Command { kind: CommandKind, target: Target, options: BTreeMap<String, OptValue> },
}

/// A parsed script. Equality compares statements only, not source positions.
#[derive(Clone, Debug)]
pub struct SessionScript {
    pub statements: Vec<Statement>,
    pub positions: Vec<Pos>,
    pub rings: BTreeMap<String, RingSpec>,
}

impl PartialEq for SessionScript {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl SessionScript {
    pub fn ring(&self, name: &str) -> &RingSpec {
        &self.rings[name]
    }

    /// The declaration of `name` (an ideal or module statement).
    pub fn declaration(&self, name: &str) -> Option<&Statement> {
        self.statements.iter().find(|s| match s {
            Statement::Ideal { name: n, .. } | Statement::Module { name: n, .. } => n == name,
            _ => false,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Ring,
    Ideal,
    Module,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    override_field: Option<FieldSpec>,
    rings: BTreeMap<String, RingSpec>,
    names: HashMap<String, (Kind, String)>,
    current_ring: Option<String>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, code: ErrorCode, pos: Pos, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic { code, message: message.into(), line: pos.line, col: pos.col })
    }

    fn expect_sym(&mut self, c: char) -> PResult<Pos> {
        let (t, p) = self.bump();
        if t == Tok::Sym(c) {
            Ok(p)
        } else {
            self.err(ErrorCode::Syntax, p, format!("expected `{c}`, found {t}"))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => self.err(ErrorCode::Syntax, p, format!("expected a name, found {t}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.bump() {
            (Tok::Ident(s), _) if s == kw => Ok(()),
            (t, p) => self.err(ErrorCode::Syntax, p, format!("expected `{kw}`, found {t}")),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym('-');
        match self.bump() {
            (Tok::Int(n), p) => {
                let v: i64 = n.try_into().map_err(|_| Diagnostic { code: ErrorCode::Syntax, message: "integer too large".into(), line: p.line, col: p.col })?;
                Ok(if neg { -v } else { v })
            }
            (t, p) => self.err(ErrorCode::Syntax, p, format!("expected an integer, found {t}")),
        }
    }

    fn declare(&mut self, name: &str, pos: Pos, kind: Kind, ring: String) -> PResult<()> {
        if self.names.contains_key(name) {
            return self.err(ErrorCode::Duplicate, pos, format!("`{name}` is already declared"));
        }
        self.names.insert(name.to_string(), (kind, ring));
        Ok(())
    }

    fn ring_name(&self, pos: Pos) -> PResult<String> {
        match &self.current_ring {
            Some(r) => Ok(r.clone()),
            None => self.err(ErrorCode::NoRing, pos, "no ring has been declared yet"),
        }
    }

    fn statement(&mut self) -> PResult<(Statement, Pos)> {
        let (word, pos) = self.ident()?;
        let st = match word.as_str() {
            "ring" => self.ring_decl()?,
            "ideal" => {
                let (name, npos) = self.ident()?;
                let ring = self.ring_name(pos)?;
                self.expect_sym('=')?;
                let gens = self.poly_list(&ring, true)?;
                self.declare(&name, npos, Kind::Ideal, ring.clone())?;
                Statement::Ideal { name, ring, gens }
            }
            "module" => {
                let (name, npos) = self.ident()?;
                let ring = self.ring_name(pos)?;
                self.expect_sym('=')?;
                let def = self.module_def(&ring)?;
                self.declare(&name, npos, Kind::Module, ring.clone())?;
                Statement::Module { name, ring, def }
            }
            "linear" => {
                self.expect_sym('-')?;
                self.keyword("powers")?;
                self.command(CommandKind::LinearPowers, pos)?
            }
            w => match CommandKind::from_word(w) {
                Some(k) => self.command(k, pos)?,
                None => return self.err(ErrorCode::Syntax, pos, format!("unknown statement `{w}`")),
            },
        };
        self.expect_sym(';')?;
        Ok((st, pos))
    }

    fn ring_decl(&mut self) -> PResult<Statement> {
        let (name, npos) = self.ident()?;
        self.expect_sym('=')?;
        let (fw, fpos) = self.ident()?;
        let mut field = match fw.as_str() {
            "QQ" => FieldSpec::Rationals,
            "Fp" => {
                self.expect_sym('(')?;
                let p = self.int()?;
                self.expect_sym(')')?;
                match u32::try_from(p).ok().map(FieldSpec::prime) {
                    Some(Ok(f)) => f,
                    _ => return self.err(ErrorCode::Field, fpos, format!("Fp({p}) is not a prime field below 2^31")),
                }
            }
            _ => return self.err(ErrorCode::Field, fpos, format!("unknown field `{fw}`; use QQ or Fp(p)")),
        };
        if let Some(f) = self.override_field {
            field = f;
        }
        self.expect_sym('[')?;
        let mut vars: Vec<(String, Pos)> = vec![self.ident()?];
        while self.eat_sym(',') {
            vars.push(self.ident()?);
        }
        self.expect_sym(']')?;
        let mut degs: BTreeMap<String, Multidegree> = BTreeMap::new();
        let mut arity: Option<u8> = None;
        while matches!(self.peek(), Tok::Ident(s) if s == "deg") {
            self.bump();
            let (v, vpos) = self.ident()?;
            if !vars.iter().any(|(n, _)| *n == v) {
                return self.err(ErrorCode::Undeclared, vpos, format!("`{v}` is not a variable of ring {name}"));
            }
            self.expect_sym('=')?;
            let dpos = self.pos();
            let d = self.degree()?;
            if arity.is_some_and(|a| a != d.arity()) {
                return self.err(ErrorCode::Arity, dpos, "all degree clauses of a ring must have the same arity");
            }
            arity = Some(d.arity());
            if degs.insert(v.clone(), d).is_some() {
                return self.err(ErrorCode::Duplicate, vpos, format!("degree of `{v}` given twice"));
            }
        }
        let explicit_degrees = arity.is_some();
        let arity = arity.unwrap_or(1);
        let mut spec = Vec::new();
        for (v, vpos) in &vars {
            let d = match degs.get(v) {
                Some(d) => *d,
                None if arity == 1 => Multidegree::single(1),
                None => return self.err(ErrorCode::Arity, *vpos, format!("variable `{v}` needs a bidegree")),
            };
            spec.push((v.clone(), d));
        }
        let ring = RingSpec::new(field, spec.clone()).or_else(|e| self.err(ErrorCode::Arity, npos, e.to_string()))?;
        self.declare(&name, npos, Kind::Ring, name.clone())?;
        self.rings.insert(name.clone(), ring);
        self.current_ring = Some(name.clone());
        Ok(Statement::Ring { name, field, vars: spec, explicit_degrees })
    }

    /// `(a)` or `(a,b)`.
    fn degree(&mut self) -> PResult<Multidegree> {
        self.expect_sym('(')?;
        let a = self.int()?;
        let d = if self.eat_sym(',') { Multidegree::pair(a, self.int()?) } else { Multidegree::single(a) };
        self.expect_sym(')')?;
        Ok(d)
    }

    /// A twist entry: `a` for Z-graded rings, `(a,b)` for bigraded ones.
    fn twist_entry(&mut self, arity: u8) -> PResult<Multidegree> {
        let pos = self.pos();
        let d = if *self.peek() == Tok::Sym('(') { self.degree()? } else { Multidegree::single(self.int()?) };
        if d.arity() != arity {
            return self.err(ErrorCode::Arity, pos, format!("expected a degree with {arity} component(s)"));
        }
        Ok(d)
    }

    fn twist_list(&mut self, arity: u8) -> PResult<Vec<Multidegree>> {
        self.expect_sym('(')?;
        let mut out = vec![self.twist_entry(arity)?];
        while self.eat_sym(',') {
            out.push(self.twist_entry(arity)?);
        }
        self.expect_sym(')')?;
        Ok(out)
    }

    fn module_def(&mut self, ring: &str) -> PResult<ModuleDef> {
        let (w, pos) = self.ident()?;
        let arity = self.rings[ring].arity();
        match w.as_str() {
            "coker" | "image" => {
                let mpos = self.pos();
                let rows = self.matrix(ring)?;
                let twists = if matches!(self.peek(), Tok::Ident(s) if s == "twists") {
                    self.bump();
                    let tpos = self.pos();
                    let t = self.twist_list(arity)?;
                    if t.len() != rows.len() {
                        return self.err(ErrorCode::Arity, tpos, format!("{} twists for {} rows", t.len(), rows.len()));
                    }
                    t
                } else {
                    vec![self.rings[ring].zero_degree(); rows.len()]
                };
                self.check_columns(ring, &rows, &twists, mpos)?;
                Ok(if w == "coker" { ModuleDef::Coker { rows, twists } } else { ModuleDef::Image { rows, twists } })
            }
            "free" => Ok(ModuleDef::Free { twists: self.twist_list(arity)? }),
            "quotient" => {
                let t = self.target(ring, Some(Kind::Ideal))?;
                Ok(ModuleDef::Quotient(t))
            }
            _ => {
                let Some((kind, base_ring)) = self.names.get(&w).cloned() else {
                    return self.err(ErrorCode::Undeclared, pos, format!("`{w}` is not declared"));
                };
                if kind == Kind::Ring {
                    return self.err(ErrorCode::Type, pos, format!("`{w}` is a ring, not a module"));
                }
                if base_ring != ring {
                    return self.err(ErrorCode::Type, pos, format!("`{w}` lives over ring {base_ring}, not {ring}"));
                }
                let dpos = self.pos();
                let shift = self.degree()?;
                if shift.arity() != arity {
                    return self.err(ErrorCode::Arity, dpos, format!("expected a shift with {arity} component(s)"));
                }
                Ok(ModuleDef::Twist { base: w, shift })
            }
        }
    }

    fn matrix(&mut self, ring: &str) -> PResult<Vec<Vec<Polynomial>>> {
        let pos = self.expect_sym('[')?;
        let mut rows = Vec::new();
        loop {
            self.expect_sym('[')?;
            let mut row = vec![self.poly(ring)?];
            while self.eat_sym(',') {
                row.push(self.poly(ring)?);
            }
            self.expect_sym(']')?;
            rows.push(row);
            if !self.eat_sym(',') {
                break;
            }
        }
        self.expect_sym(']')?;
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return self.err(ErrorCode::Arity, pos, "matrix rows have different lengths");
        }
        Ok(rows)
    }

    fn check_columns(&self, ring: &str, rows: &[Vec<Polynomial>], twists: &[Multidegree], pos: Pos) -> PResult<()> {
        let r = &self.rings[ring];
        for j in 0..rows[0].len() {
            let mut deg: Option<Multidegree> = None;
            for (k, row) in rows.iter().enumerate() {
                let f = &row[j];
                if f.is_zero() {
                    continue;
                }
                let d = match r.homogeneous_degree(f) {
                    Ok(Some(d)) => d + twists[k],
                    _ => return self.err(ErrorCode::Inhomogeneous, pos, format!("entry {} is not homogeneous", r.render(f))),
                };
                if deg.is_some_and(|e| e != d) {
                    return self.err(ErrorCode::Inhomogeneous, pos, format!("column {} is not homogeneous for the given twists", j + 1));
                }
                deg = Some(d);
            }
        }
        Ok(())
    }

    fn poly_list(&mut self, ring: &str, homogeneous: bool) -> PResult<Vec<Polynomial>> {
        self.expect_sym('(')?;
        let mut out = Vec::new();
        if self.eat_sym(')') {
            return Ok(out);
        }
        loop {
            let pos = self.pos();
            let f = self.poly(ring)?;
            if homogeneous && !f.is_zero() && !matches!(self.rings[ring].homogeneous_degree(&f), Ok(Some(_))) {
                return self.err(ErrorCode::Inhomogeneous, pos, format!("{} is not homogeneous", self.rings[ring].render(&f)));
            }
            out.push(f);
            if !self.eat_sym(',') {
                break;
            }
        }
        self.expect_sym(')')?;
        Ok(out)
    }

    fn target(&mut self, ring: &str, want: Option<Kind>) -> PResult<Target> {
        if *self.peek() == Tok::Sym('(') {
            return Ok(Target::Literal { ring: ring.to_string(), gens: self.poly_list(ring, true)? });
        }
        let (name, pos) = self.ident()?;
        match self.names.get(&name) {
            None => self.err(ErrorCode::Undeclared, pos, format!("`{name}` is not declared")),
            Some((Kind::Ring, _)) => self.err(ErrorCode::Type, pos, format!("`{name}` is a ring")),
            Some((k, _)) if want.is_some_and(|w| w != *k) => {
                self.err(ErrorCode::Type, pos, format!("`{name}` must be an ideal"))
            }
            Some(_) => Ok(Target::Name(name)),
        }
    }

    fn command(&mut self, kind: CommandKind, pos: Pos) -> PResult<Statement> {
        let want = matches!(kind, CommandKind::Powers | CommandKind::Rees | CommandKind::LinearPowers).then_some(Kind::Ideal);
        let target = if *self.peek() == Tok::Sym('(') {
            let ring = self.ring_name(pos)?;
            self.target(&ring, want)?
        } else {
            self.target("", want)?
        };
        let mut options = BTreeMap::new();
        while let Tok::Ident(_) = self.peek() {
            let (key, kpos) = self.ident()?;
            if !kind.options().contains(&key.as_str()) {
                return self.err(ErrorCode::Syntax, kpos, format!("`{}` takes no option `{key}`", kind.name()));
            }
            self.expect_sym('=')?;
            let value = if let Tok::Ident(_) = self.peek() {
                let (v, vpos) = self.ident()?;
                match self.names.get(&v) {
                    Some((Kind::Ideal | Kind::Module, _)) => OptValue::Name(v),
                    _ => return self.err(ErrorCode::Undeclared, vpos, format!("`{v}` is not a declared ideal or module")),
                }
            } else {
                let vpos = self.pos();
                let v = self.int()?;
                if key == "module" {
                    return self.err(ErrorCode::Type, vpos, "`module` expects a module name");
                }
                OptValue::Int(v)
            };
            if options.insert(key.clone(), value).is_some() {
                return self.err(ErrorCode::Duplicate, kpos, format!("option `{key}` given twice"));
            }
        }
        Ok(Statement::Command { kind, target, options })
    }

    // polynomial expressions: sum of products of powers of atoms
    fn poly(&mut self, ring: &str) -> PResult<Polynomial> {
        let r = self.rings[ring].clone();
        let mut acc = if self.eat_sym('-') { r.neg(&self.product(&r)?) } else { self.product(&r)? };
        loop {
            if self.eat_sym('+') {
                let t = self.product(&r)?;
                acc = r.add(&acc, &t).expect("same ring");
            } else if self.eat_sym('-') {
                let t = self.product(&r)?;
                acc = r.sub(&acc, &t).expect("same ring");
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self, r: &RingSpec) -> PResult<Polynomial> {
        let mut acc = self.power(r)?;
        loop {
            if self.eat_sym('*') {
                let f = self.power(r)?;
                acc = r.mul(&acc, &f).expect("same ring");
            } else if *self.peek() == Tok::Sym('/') {
                let (_, pos) = self.bump();
                let f = self.power(r)?;
                let c = match f.terms().next() {
                    Some((m, c)) if f.len() == 1 && m.is_one() => c.clone(),
                    _ if f.is_zero() => return self.err(ErrorCode::Field, pos, "division by zero"),
                    _ => return self.err(ErrorCode::Syntax, pos, "only division by constants is allowed"),
                };
                let inv = r.field().inverse(&c).or_else(|_| self.err(ErrorCode::Field, pos, "division by zero"))?;
                acc = r.scale(&acc, &inv).expect("same field");
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self, r: &RingSpec) -> PResult<Polynomial> {
        let base = self.atom(r)?;
        if self.eat_sym('^') {
            let pos = self.pos();
            let e = self.int()?;
            if e < 0 || e > u32::MAX as i64 {
                return self.err(ErrorCode::Syntax, pos, "exponents must be non-negative");
            }
            return Ok(r.pow(&base, e as u32).expect("same ring"));
        }
        Ok(base)
    }

    fn atom(&mut self, r: &RingSpec) -> PResult<Polynomial> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(r.constant(r.field().from_bigint(&n))),
            (Tok::Ident(v), pos) => match r.var_index(&v) {
                Some(i) => Ok(r.var(i)),
                None => self.err(ErrorCode::Undeclared, pos, format!("`{v}` is not a variable of the current ring")),
            },
            (Tok::Sym('('), _) => {
                let name = self.current_ring.clone().unwrap();
                let f = self.poly(&name)?;
                self.expect_sym(')')?;
                Ok(f)
            }
            (Tok::Sym('-'), _) => Ok(r.neg(&self.power(r)?)),
            (t, pos) => self.err(ErrorCode::Syntax, pos, format!("expected a polynomial, found {t}")),
        }
    }
}

pub fn parse_session(text: &str) -> Result<SessionScript, Diagnostic> {
    parse_session_with(text, None)
}

/// Parses a script, optionally forcing every ring onto `field`.
pub fn parse_session_with(text: &str, field: Option<FieldSpec>) -> Result<SessionScript, Diagnostic> {
    let mut p = Parser { toks: lex(text)?, at: 0, override_field: field, rings: BTreeMap::new(), names: HashMap::new(), current_ring: None };
    let mut statements = Vec::new();
    let mut positions = Vec::new();
    while *p.peek() != Tok::Eof {
        let (s, pos) = p.statement()?;
        statements.push(s);
        positions.push(pos);
    }
    Ok(SessionScript { statements, positions, rings: p.rings })
}

fn render_field(f: &FieldSpec) -> String {
    match f {
        FieldSpec::Rationals => "QQ".into(),
        FieldSpec::Prime(p) => format!("Fp({p})"),
    }
}

fn render_degree(d: &Multidegree) -> String {
    match d.parts() {
        [a] => a.to_string(),
        [a, b] => format!("({a},{b})"),
        _ => unreachable!(),
    }
}

fn render_matrix(r: &RingSpec, rows: &[Vec<Polynomial>]) -> String {
    let rows: Vec<String> = rows.iter().map(|row| format!("[{}]", row.iter().map(|f| r.render(f)).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn render_twists(ts: &[Multidegree]) -> String {
    format!("({})", ts.iter().map(render_degree).collect::<Vec<_>>().join(", "))
}

fn render_target(script: &SessionScript, t: &Target) -> String {
    match t {
        Target::Name(n) => n.clone(),
        Target::Literal { ring, gens } => {
            let r = script.ring(ring);
            format!("({})", gens.iter().map(|f| r.render(f)).collect::<Vec<_>>().join(", "))
        }
    }
}

/// Canonical text of a script; parsing it yields an equal script.
pub fn render(script: &SessionScript) -> String {
    let mut out = String::new();
    for st in &script.statements {
        let line = match st {
            Statement::Ring { name, field, vars, explicit_degrees } => {
                let names: Vec<&str> = vars.iter().map(|(n, _)| n.as_str()).collect();
                let mut s = format!("ring {name} = {}[{}]", render_field(field), names.join(","));
                if *explicit_degrees {
                    for (v, d) in vars {
                        let d = match d.parts() {
                            [a] => format!("({a})"),
                            _ => render_degree(d),
                        };
                        s.push_str(&format!(" deg {v} = {d}"));
                    }
                }
                s
            }
            Statement::Ideal { name, ring, gens } => {
                let r = script.ring(ring);
                format!("ideal {name} = ({})", gens.iter().map(|f| r.render(f)).collect::<Vec<_>>().join(", "))
            }
            Statement::Module { name, ring, def } => {
                let r = script.ring(ring);
                let body = match def {
                    ModuleDef::Coker { rows, twists } => format!("coker {} twists {}", render_matrix(r, rows), render_twists(twists)),
                    ModuleDef::Image { rows, twists } => format!("image {} twists {}", render_matrix(r, rows), render_twists(twists)),
                    ModuleDef::Free { twists } => format!("free {}", render_twists(twists)),
                    ModuleDef::Quotient(t) => format!("quotient {}", render_target(script, t)),
                    ModuleDef::Twist { base, shift } => match shift.parts() {
                        [a] => format!("{base}({a})"),
                        _ => format!("{base}{}", render_degree(shift)),
                    },
                };
                format!("module {name} = {body}")
            }
            Statement::Command { kind, target, options } => {
                let mut s = format!("{} {}", kind.name(), render_target(script, target));
                for (k, v) in options {
                    match v {
                        OptValue::Int(i) => s.push_str(&format!(" {k}={i}")),
                        OptValue::Name(n) => s.push_str(&format!(" {k}={n}")),
                    }
                }
                s
            }
        };
        out.push_str(&line);
        out.push_str(";\n");
    }
    out
}

/// Monomials of a polynomial in a fixed order, used by callers that need term access.
pub fn support(f: &Polynomial) -> Vec<Monomial> {
    f.terms().map(|(m, _)| m.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_statements() {
        let s = parse_session("ring R = QQ[x,y]; ideal I = (x^2, x*y); reg I;").unwrap();
        assert_eq!(s.statements.len(), 3);
        let s = parse_session("ring R = Fp(32003)[x,y,z];").unwrap();
        assert_eq!(s.ring("R").field(), FieldSpec::Prime(32003));
    }

    #[test]
    fn undeclared_position() {
        let e = parse_session("ring R = QQ[x,y];\nreg J;").unwrap_err();
        assert_eq!((e.code, e.line, e.col), (ErrorCode::Undeclared, 2, 5));
    }

    #[test]
    fn diagnostics() {
        let code = |s: &str| parse_session(s).unwrap_err().code;
        assert_eq!(code("ideal I = (x);"), ErrorCode::NoRing);
        assert_eq!(code("ring R = QQ[x,y]; ideal I = (x^2 + y);"), ErrorCode::Inhomogeneous);
        assert_eq!(code("ring R = QQ[x,y] deg x = (1,0) deg y = (1);"), ErrorCode::Arity);
        assert_eq!(code("ring R = QQ[x,y]; ideal I = (x); ideal I = (y);"), ErrorCode::Duplicate);
        assert_eq!(code("ring R = Fp(32004)[x];"), ErrorCode::Field);
        assert_eq!(code("ring R = Fp(7)[x]; ideal I = (x/7);"), ErrorCode::Field);
        assert_eq!(code("ring R = QQ[x,y]; module M = free (0); powers M;"), ErrorCode::Type);
        assert_eq!(code("ring R = QQ[x,y]; ideal I = (x) reg I;"), ErrorCode::Syntax);
        assert_eq!(code("ring R = QQ[x,y]; ideal I = (z);"), ErrorCode::Undeclared);
    }

    #[test]
    fn round_trip() {
        let text = "# a comment\nring R = QQ[x,y];\nideal I = (1/2*x^2 - 3*x*y, (x+y)^2);\nmodule M = coker [[x, y], [y^2, 0]] twists (0, -1);\nmodule N = M(-2);\nmodule Q = quotient (x^3);\nreg I;\npowers I max_v=4 module=N;\nverify (x^2, x*y);\nring A = Fp(32003)[Y1,Y2] deg Y1 = (2,1) deg Y2 = (3,1);\nmodule F = free ((0,0), (1,1));\nmodule G = F(-1,0);\nrho G max_v=6;\nlinear-powers (x);\n";
        let err = parse_session(text).unwrap_err();
        assert_eq!(err.code, ErrorCode::Undeclared, "x is not a variable of A");
        let text = text.replace("linear-powers (x);\n", "linear-powers (Y1);\n");
        let s = parse_session(&text).unwrap();
        let rendered = render(&s);
        let again = parse_session(&rendered).unwrap();
        assert_eq!(s, again);
        assert_eq!(render(&again), rendered);
    }
}
