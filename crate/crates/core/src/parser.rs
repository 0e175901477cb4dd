//! Surface syntax for evidence theories and its canonical renderer.
//!
//! ```text
//! # alphabets first, then statements
//! agents CS, TF, FE;
//! times t1, t2;
//!
//! evidence CS @ t1 : SpPhish.
//! evidence CS @ t1 : Attack <- r1 [CS @ t1 : SpPhish | CS @ t1 : SucPhish].
//! trust(SpeedTr): TF < FE.
//! rtrust: r1 < r4.
//! ```
//!
//! `a < b` reads "a is less trusted than b". Agents and times must be
//! declared before use; variables and reasoning ids are declared by first
//! use, with variable kinds inferred (a derived-evidence head is derived,
//! everything else is simple). Identifiers may carry balanced parentheses,
//! so `Culprit(C,Attack)` and `SpeedTr(23MB/s)` are single names; anything
//! else can be quoted: `"some name"`. `#` starts a line comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{
    is_bare_name, AgentId, AgentTrust, DerivedEvidence, Formula, Literal, PropVar, ReasoningId,
    ReasoningTrust, SimpleEvidence, Status, Theory, TimeLabel, VarKind, KEYWORDS,
};

/// Where in the input an error was found. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Input not tokenizable: stray characters, bad quotes.
    Lexical,
    /// Tokens do not fit the grammar.
    Syntax,
    /// Alphabet declared twice, or one name declared as both agent and time.
    DuplicateDecl,
    /// Agent or time used without being declared.
    UnknownSymbol,
    /// A variable used both as a derived conclusion and as simple evidence
    /// or a trust subject.
    KindConflict,
    /// Derived conclusions depend on each other in a cycle.
    DerivationCycle,
    /// One reasoning id used with two different head/premise shapes.
    ReasoningShapeMismatch,
    /// No evidence statement at all.
    EmptyTheory,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::DuplicateDecl => "duplicate declaration",
            ParseErrorKind::UnknownSymbol => "unknown symbol",
            ParseErrorKind::KindConflict => "kind conflict",
            ParseErrorKind::DerivationCycle => "derivation cycle",
            ParseErrorKind::ReasoningShapeMismatch => "reasoning shape mismatch",
            ParseErrorKind::EmptyTheory => "empty theory",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

/// Parses source text into a validated theory, or every error found.
pub fn parse_theory(source: &str) -> Result<Theory, Vec<ParseError>> {
    parse_theory_named(source, "<input>")
}

/// Like [`parse_theory`] but error spans carry `file`.
pub fn parse_theory_named(source: &str, file: &str) -> Result<Theory, Vec<ParseError>> {
    let tokens = lex(source, file)?;
    let mut parser = Parser { tokens, pos: 0, file: file.to_string(), errors: Vec::new() };
    let (decls, stmts) = parser.run();
    if !parser.errors.is_empty() {
        return Err(parser.errors);
    }
    validate_and_lower(decls, stmts, file)
}

/// Renders a theory back to canonical source text. For open theories the
/// output parses back to an equal theory; a closed theory renders as a
/// banner with no statements.
pub fn render_theory(theory: &Theory) -> String {
    let mut out = String::new();
    if theory.status() == Status::Closed {
        out.push_str("# ⊥ (closed theory)\n");
        return out;
    }
    if !theory.agents().is_empty() {
        out.push_str("agents ");
        for (i, a) in theory.agents().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&a.to_string());
        }
        out.push_str(";\n");
    }
    if !theory.times().is_empty() {
        out.push_str("times ");
        for (i, t) in theory.times().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&t.to_string());
        }
        out.push_str(";\n");
    }
    out.push('\n');
    for f in theory.formulas().iter().filter(|f| f.is_statement()) {
        out.push_str(&format!("{}.\n", f));
    }
    out
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Semi,
    Dot,
    Colon,
    At,
    Lt,
    Arrow,
    LBrack,
    RBrack,
    Pipe,
    Comma,
    LParen,
    RParen,
    Tilde,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Quoted(s) => format!("`\"{}\"`", s),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::At => "`@`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Tilde => "`~`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(source: &str, file: &str) -> Result<Vec<Token>, Vec<ParseError>> {
    let chars: Vec<char> = source.chars().collect();
    let mut toks = Vec::new();
    let mut errs = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    let span = |line, col| SourceSpan { file: file.to_string(), line, column: col };

    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            ' ' | '\t' | '\r' => {
                col += 1;
                i += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let start = col;
                i += 1;
                col += 1;
                let mut s = String::new();
                let mut closed = false;
                while i < chars.len() {
                    let ch = chars[i];
                    if ch == '"' {
                        i += 1;
                        col += 1;
                        closed = true;
                        break;
                    }
                    if ch == '\n' {
                        break;
                    }
                    s.push(ch);
                    i += 1;
                    col += 1;
                }
                if !closed {
                    errs.push(ParseError {
                        span: span(line, start),
                        kind: ParseErrorKind::Lexical,
                        message: "unterminated quoted name".into(),
                    });
                } else if s.is_empty() {
                    errs.push(ParseError {
                        span: span(line, start),
                        kind: ParseErrorKind::Lexical,
                        message: "empty quoted name".into(),
                    });
                } else {
                    toks.push(Token { tok: Tok::Quoted(s), line, col: start });
                }
            }
            '<' => {
                let tok = if chars.get(i + 1) == Some(&'-') { Tok::Arrow } else { Tok::Lt };
                let width = if tok == Tok::Arrow { 2 } else { 1 };
                toks.push(Token { tok, line, col });
                i += width;
                col += width as u32;
            }
            ';' | '.' | ':' | '@' | '[' | ']' | '|' | ',' | '(' | ')' | '~' => {
                let tok = match c {
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '@' => Tok::At,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '|' => Tok::Pipe,
                    ',' => Tok::Comma,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Tilde,
                };
                toks.push(Token { tok, line, col });
                i += 1;
                col += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = col;
                let mut s = String::new();
                s.push(c);
                i += 1;
                col += 1;
                // Names keep `,` and `)` only inside balanced parentheses,
                // so `Culprit(C,Attack)` is one token while `CS, TF` splits.
                let mut depth = 0u32;
                while i < chars.len() {
                    let ch = chars[i];
                    let take = match ch {
                        'a'..='z' | 'A'..='Z' | '0'..='9' | '_' | '/' | '\'' => true,
                        '(' => {
                            depth += 1;
                            true
                        }
                        ')' => {
                            if depth > 0 {
                                depth -= 1;
                                true
                            } else {
                                false
                            }
                        }
                        ',' => depth > 0,
                        _ => false,
                    };
                    if !take {
                        break;
                    }
                    s.push(ch);
                    i += 1;
                    col += 1;
                }
                toks.push(Token { tok: Tok::Ident(s), line, col: start });
            }
            _ => {
                errs.push(ParseError {
                    span: span(line, col),
                    kind: ParseErrorKind::Lexical,
                    message: format!("unexpected character `{}`", c),
                });
                i += 1;
                col += 1;
            }
        }
    }
    if errs.is_empty() {
        Ok(toks)
    } else {
        Err(errs)
    }
}

// --------------------------------------------------------------- parsing

#[derive(Debug, Clone)]
struct Name {
    text: String,
    line: u32,
    col: u32,
}

#[derive(Debug, Clone)]
struct RawLit {
    neg: bool,
    name: Name,
}

#[derive(Debug, Clone)]
struct RawPremise {
    agent: Name,
    time: Name,
    lit: RawLit,
}

#[derive(Debug, Clone)]
enum RawStmt {
    Simple { agent: Name, time: Name, lit: RawLit },
    Derived { agent: Name, time: Name, lit: RawLit, rid: Name, premises: Vec<RawPremise> },
    ATrust { subject: Name, less: Name, more: Name },
    RTrust { less: Name, more: Name },
}

#[derive(Debug, Default)]
struct Decls {
    agents: Vec<Name>,
    times: Vec<Name>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    file: String,
    errors: Vec<ParseError>,
}

impl Parser {
    fn run(&mut self) -> (Decls, Vec<RawStmt>) {
        let mut decls = Decls::default();
        let mut agents_seen: Option<(u32, u32)> = None;
        let mut times_seen: Option<(u32, u32)> = None;

        // Declarations come first; a later decl keyword is a syntax error.
        loop {
            let kw = match self.peek_ident() {
                Some(s) if s == "agents" || s == "times" => s.to_string(),
                _ => break,
            };
            let tok = self.next().unwrap();
            let seen = if kw == "agents" { &mut agents_seen } else { &mut times_seen };
            if seen.is_some() {
                let (line, col) = (tok.line, tok.col);
                self.err_at(
                    line,
                    col,
                    ParseErrorKind::DuplicateDecl,
                    format!("{} declared twice", kw),
                );
            } else {
                *seen = Some((tok.line, tok.col));
            }
            if let Some(names) = self.idlist() {
                if kw == "agents" {
                    decls.agents.extend(names);
                } else {
                    decls.times.extend(names);
                }
            }
        }

        let mut stmts = Vec::new();
        while let Some(tok) = self.peek().cloned() {
            match &tok.tok {
                Tok::Ident(s) if s == "agents" || s == "times" => {
                    self.err_at(
                        tok.line,
                        tok.col,
                        ParseErrorKind::Syntax,
                        "declarations must precede statements".into(),
                    );
                    self.next();
                    self.recover();
                }
                Tok::Ident(s) if s == "evidence" => {
                    if let Some(stmt) = self.evidence_stmt() {
                        stmts.push(stmt);
                    } else {
                        self.recover();
                    }
                }
                Tok::Ident(s) if s == "rtrust" => {
                    if let Some(stmt) = self.rtrust_stmt() {
                        stmts.push(stmt);
                    } else {
                        self.recover();
                    }
                }
                Tok::Ident(s) if s == "trust" || s.starts_with("trust(") => {
                    if let Some(stmt) = self.trust_stmt() {
                        stmts.push(stmt);
                    } else {
                        self.recover();
                    }
                }
                _ => {
                    self.err_at(
                        tok.line,
                        tok.col,
                        ParseErrorKind::Syntax,
                        format!("expected a statement, found {}", tok.tok.describe()),
                    );
                    self.next();
                    self.recover();
                }
            }
        }
        (decls, stmts)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }
    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => Some(s.as_str()),
            _ => None,
        }
    }
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&mut self, line: u32, col: u32, kind: ParseErrorKind, message: String) {
        self.errors.push(ParseError {
            span: SourceSpan { file: self.file.clone(), line, column: col },
            kind,
            message,
        });
    }

    fn err_here(&mut self, kind: ParseErrorKind, message: String) {
        let (line, col) = match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.col))
                .unwrap_or((1, 1)),
        };
        self.err_at(line, col, kind, message);
    }

    /// Skips forward until a statement terminator has been consumed.
    fn recover(&mut self) {
        while let Some(t) = self.next() {
            if matches!(t.tok, Tok::Dot | Tok::Semi) {
                break;
            }
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Option<Token> {
        match self.peek() {
            Some(t) if t.tok == want => self.next(),
            Some(t) => {
                let found = t.tok.describe();
                let (line, col) = (t.line, t.col);
                self.err_at(
                    line,
                    col,
                    ParseErrorKind::Syntax,
                    format!("expected {}, found {}", what, found),
                );
                None
            }
            None => {
                self.err_here(ParseErrorKind::Syntax, format!("expected {}, found end of input", what));
                None
            }
        }
    }

    fn name(&mut self, what: &str) -> Option<Name> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Ident(s), line, col }) => {
                if KEYWORDS.contains(&s.as_str()) {
                    self.err_at(
                        line,
                        col,
                        ParseErrorKind::Syntax,
                        format!("keyword `{}` cannot be used as {}", s, what),
                    );
                    return None;
                }
                if !is_bare_name(&s) {
                    self.err_at(
                        line,
                        col,
                        ParseErrorKind::Syntax,
                        format!("malformed name `{}` (unbalanced parentheses)", s),
                    );
                    return None;
                }
                self.next();
                Some(Name { text: s, line, col })
            }
            Some(Token { tok: Tok::Quoted(s), line, col }) => {
                self.next();
                Some(Name { text: s, line, col })
            }
            Some(t) => {
                let found = t.tok.describe();
                self.err_at(
                    t.line,
                    t.col,
                    ParseErrorKind::Syntax,
                    format!("expected {}, found {}", what, found),
                );
                None
            }
            None => {
                self.err_here(ParseErrorKind::Syntax, format!("expected {}, found end of input", what));
                None
            }
        }
    }

    fn lit(&mut self) -> Option<RawLit> {
        let neg = if matches!(self.peek(), Some(Token { tok: Tok::Tilde, .. })) {
            self.next();
            true
        } else {
            false
        };
        let name = self.name("a variable")?;
        Some(RawLit { neg, name })
    }

    fn idlist(&mut self) -> Option<Vec<Name>> {
        let mut names = vec![self.name("a name")?];
        loop {
            match self.peek() {
                Some(Token { tok: Tok::Comma, .. }) => {
                    self.next();
                    names.push(self.name("a name")?);
                }
                Some(Token { tok: Tok::Semi, .. }) => {
                    self.next();
                    return Some(names);
                }
                _ => {
                    self.expect(Tok::Semi, "`;` after declaration")?;
                    return Some(names);
                }
            }
        }
    }

    fn evidence_stmt(&mut self) -> Option<RawStmt> {
        self.next(); // `evidence`
        let agent = self.name("an agent")?;
        self.expect(Tok::At, "`@`")?;
        let time = self.name("a time label")?;
        self.expect(Tok::Colon, "`:`")?;
        let lit = self.lit()?;
        match self.peek() {
            Some(Token { tok: Tok::Dot, .. }) => {
                self.next();
                Some(RawStmt::Simple { agent, time, lit })
            }
            Some(Token { tok: Tok::Arrow, .. }) => {
                self.next();
                let rid = self.name("a reasoning id")?;
                self.expect(Tok::LBrack, "`[`")?;
                let mut premises = vec![self.premise()?];
                loop {
                    match self.peek() {
                        Some(Token { tok: Tok::Pipe, .. }) => {
                            self.next();
                            premises.push(self.premise()?);
                        }
                        Some(Token { tok: Tok::RBrack, .. }) => {
                            self.next();
                            break;
                        }
                        _ => {
                            self.expect(Tok::RBrack, "`|` or `]`")?;
                            return None;
                        }
                    }
                }
                self.expect(Tok::Dot, "`.`")?;
                Some(RawStmt::Derived { agent, time, lit, rid, premises })
            }
            _ => {
                self.expect(Tok::Dot, "`.` or `<-`")?;
                None
            }
        }
    }

    fn premise(&mut self) -> Option<RawPremise> {
        let agent = self.name("an agent")?;
        self.expect(Tok::At, "`@`")?;
        let time = self.name("a time label")?;
        self.expect(Tok::Colon, "`:`")?;
        let lit = self.lit()?;
        Some(RawPremise { agent, time, lit })
    }

    fn trust_stmt(&mut self) -> Option<RawStmt> {
        let head = self.next().unwrap();
        let head_text = match &head.tok {
            Tok::Ident(s) => s.clone(),
            _ => unreachable!("trust dispatch checked an ident"),
        };
        // `trust(Subject)` lexes as one identifier; `trust ( Subject )` and
        // `trust("a subject")` arrive in pieces.
        let subject = if head_text == "trust" || head_text == "trust(" {
            if head_text == "trust" {
                self.expect(Tok::LParen, "`(`")?;
            }
            let subject = self.name("a trust subject")?;
            self.expect(Tok::RParen, "`)`")?;
            subject
        } else {
            let inner = &head_text["trust(".len()..];
            let inner = inner.strip_suffix(')').unwrap_or(inner);
            if !is_bare_name(inner) || !head_text.ends_with(')') {
                self.err_at(
                    head.line,
                    head.col,
                    ParseErrorKind::Syntax,
                    format!("malformed trust subject in `{}`", head_text),
                );
                return None;
            }
            Name { text: inner.to_string(), line: head.line, col: head.col + "trust(".len() as u32 }
        };
        self.expect(Tok::Colon, "`:`")?;
        let less = self.name("an agent")?;
        self.expect(Tok::Lt, "`<`")?;
        let more = self.name("an agent")?;
        self.expect(Tok::Dot, "`.`")?;
        Some(RawStmt::ATrust { subject, less, more })
    }

    fn rtrust_stmt(&mut self) -> Option<RawStmt> {
        self.next(); // `rtrust`
        self.expect(Tok::Colon, "`:`")?;
        let less = self.name("a reasoning id")?;
        self.expect(Tok::Lt, "`<`")?;
        let more = self.name("a reasoning id")?;
        self.expect(Tok::Dot, "`.`")?;
        Some(RawStmt::RTrust { less, more })
    }
}

// ------------------------------------------------------ validate + lower

fn validate_and_lower(
    decls: Decls,
    stmts: Vec<RawStmt>,
    file: &str,
) -> Result<Theory, Vec<ParseError>> {
    let mut errors: Vec<ParseError> = Vec::new();
    let span = |n: &Name| SourceSpan { file: file.to_string(), line: n.line, column: n.col };
    let err = |n: &Name, kind: ParseErrorKind, message: String| ParseError {
        span: span(n),
        kind,
        message,
    };

    let mut agents: BTreeSet<String> = BTreeSet::new();
    for name in &decls.agents {
        if !agents.insert(name.text.clone()) {
            errors.push(err(
                name,
                ParseErrorKind::DuplicateDecl,
                format!("agent `{}` declared twice", name.text),
            ));
        }
    }
    let mut times: Vec<String> = Vec::new();
    for name in &decls.times {
        if times.contains(&name.text) {
            errors.push(err(
                name,
                ParseErrorKind::DuplicateDecl,
                format!("time `{}` declared twice", name.text),
            ));
        } else if agents.contains(&name.text) {
            errors.push(err(
                name,
                ParseErrorKind::DuplicateDecl,
                format!("`{}` is declared as both an agent and a time", name.text),
            ));
        } else {
            times.push(name.text.clone());
        }
    }

    let check_agent = |n: &Name, errors: &mut Vec<ParseError>| {
        if !agents.contains(&n.text) {
            errors.push(err(
                n,
                ParseErrorKind::UnknownSymbol,
                format!("agent `{}` not declared", n.text),
            ));
        }
    };
    let check_time = |n: &Name, errors: &mut Vec<ParseError>| {
        if !times.contains(&n.text) {
            errors.push(err(
                n,
                ParseErrorKind::UnknownSymbol,
                format!("time `{}` not declared", n.text),
            ));
        }
    };

    // Kind inference: derived-evidence heads are derived, everything simple.
    let mut derived_heads: BTreeMap<String, Name> = BTreeMap::new();
    for stmt in &stmts {
        if let RawStmt::Derived { lit, .. } = stmt {
            derived_heads.entry(lit.name.text.clone()).or_insert_with(|| lit.name.clone());
        }
    }

    let mut shapes: BTreeMap<String, ((bool, String), Vec<(String, String, bool, String)>)> =
        BTreeMap::new();
    let mut evidence_count = 0usize;

    for stmt in &stmts {
        match stmt {
            RawStmt::Simple { agent, time, lit } => {
                evidence_count += 1;
                check_agent(agent, &mut errors);
                check_time(time, &mut errors);
                if derived_heads.contains_key(&lit.name.text) {
                    errors.push(err(
                        &lit.name,
                        ParseErrorKind::KindConflict,
                        format!(
                            "`{}` is a derived conclusion and cannot be asserted as simple evidence",
                            lit.name.text
                        ),
                    ));
                }
            }
            RawStmt::Derived { agent, time, lit, rid, premises } => {
                evidence_count += 1;
                check_agent(agent, &mut errors);
                check_time(time, &mut errors);
                for p in premises {
                    check_agent(&p.agent, &mut errors);
                    check_time(&p.time, &mut errors);
                }
                let head_key = (lit.neg, lit.name.text.clone());
                let mut premise_key: Vec<(String, String, bool, String)> = premises
                    .iter()
                    .map(|p| {
                        (p.agent.text.clone(), p.time.text.clone(), p.lit.neg, p.lit.name.text.clone())
                    })
                    .collect();
                premise_key.sort();
                match shapes.get(&rid.text) {
                    None => {
                        shapes.insert(rid.text.clone(), (head_key, premise_key));
                    }
                    Some((h, p)) => {
                        if *h != head_key || *p != premise_key {
                            errors.push(err(
                                rid,
                                ParseErrorKind::ReasoningShapeMismatch,
                                format!(
                                    "reasoning `{}` already used with a different conclusion or premises",
                                    rid.text
                                ),
                            ));
                        }
                    }
                }
            }
            RawStmt::ATrust { subject, less, more } => {
                check_agent(less, &mut errors);
                check_agent(more, &mut errors);
                if derived_heads.contains_key(&subject.text) {
                    errors.push(err(
                        subject,
                        ParseErrorKind::KindConflict,
                        format!(
                            "`{}` is a derived conclusion and cannot be a trust subject",
                            subject.text
                        ),
                    ));
                }
            }
            RawStmt::RTrust { .. } => {}
        }
    }

    // Derived conclusions must not feed each other in a cycle.
    let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for stmt in &stmts {
        if let RawStmt::Derived { lit, premises, .. } = stmt {
            let entry = edges.entry(lit.name.text.as_str()).or_default();
            for p in premises {
                if derived_heads.contains_key(&p.lit.name.text) {
                    entry.insert(p.lit.name.text.as_str());
                }
            }
        }
    }
    if let Some(cycle) = find_cycle(&edges) {
        let head = derived_heads.get(cycle[0]).cloned().unwrap_or(Name {
            text: cycle[0].to_string(),
            line: 1,
            col: 1,
        });
        errors.push(err(
            &head,
            ParseErrorKind::DerivationCycle,
            format!("derivation cycle: {}", cycle.join(" -> ")),
        ));
    }

    if evidence_count == 0 {
        errors.push(ParseError {
            span: SourceSpan { file: file.to_string(), line: 1, column: 1 },
            kind: ParseErrorKind::EmptyTheory,
            message: "a theory needs at least one evidence statement".into(),
        });
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    // Lowering. Kinds are settled, so literals can be built everywhere.
    let var_kind = |name: &str| {
        if derived_heads.contains_key(name) {
            VarKind::Derived
        } else {
            VarKind::Simple
        }
    };
    let mk_lit = |l: &RawLit| Literal::new(PropVar::new(l.name.text.clone(), var_kind(&l.name.text)), !l.neg);
    let time_labels: Vec<TimeLabel> =
        times.iter().enumerate().map(|(i, t)| TimeLabel::new(t.clone(), i as u32)).collect();
    let mk_time = |n: &Name| {
        let idx = times.iter().position(|t| *t == n.text).unwrap();
        time_labels[idx].clone()
    };

    let mut vars: BTreeSet<PropVar> = BTreeSet::new();
    let mut reasonings: BTreeSet<ReasoningId> = BTreeSet::new();
    let mut formulas: Vec<Formula> = Vec::new();

    for stmt in &stmts {
        match stmt {
            RawStmt::Simple { agent, time, lit } => {
                let l = mk_lit(lit);
                vars.insert(l.var().clone());
                formulas.push(Formula::Simple(SimpleEvidence {
                    agent: AgentId::new(agent.text.clone()),
                    time: mk_time(time),
                    lit: l,
                }));
            }
            RawStmt::Derived { agent, time, lit, rid, premises } => {
                let l = mk_lit(lit);
                vars.insert(l.var().clone());
                let mut prems = Vec::with_capacity(premises.len());
                for p in premises {
                    let pl = mk_lit(&p.lit);
                    vars.insert(pl.var().clone());
                    prems.push((AgentId::new(p.agent.text.clone()), mk_time(&p.time), pl));
                }
                let r = ReasoningId::new(rid.text.clone());
                reasonings.insert(r.clone());
                formulas.push(Formula::Derived(DerivedEvidence {
                    agent: AgentId::new(agent.text.clone()),
                    time: mk_time(time),
                    lit: l,
                    reasoning: r,
                    premises: prems,
                }));
            }
            RawStmt::ATrust { subject, less, more } => {
                let v = PropVar::new(subject.text.clone(), VarKind::Simple);
                vars.insert(v.clone());
                formulas.push(Formula::Trust(AgentTrust {
                    subject: v,
                    less: AgentId::new(less.text.clone()),
                    more: AgentId::new(more.text.clone()),
                }));
            }
            RawStmt::RTrust { less, more } => {
                let l = ReasoningId::new(less.text.clone());
                let m = ReasoningId::new(more.text.clone());
                reasonings.insert(l.clone());
                reasonings.insert(m.clone());
                formulas.push(Formula::RTrust(ReasoningTrust { less: l, more: m }));
            }
        }
    }

    Ok(Theory::new(
        agents.into_iter().map(AgentId::new),
        time_labels,
        vars,
        reasonings,
        formulas,
    ))
}

/// DFS cycle detection; returns one cycle as `[a, b, ..., a]` if any.
fn find_cycle<'a>(edges: &BTreeMap<&'a str, BTreeSet<&'a str>>) -> Option<Vec<&'a str>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: BTreeMap<&str, Color> = edges.keys().map(|k| (*k, Color::White)).collect();

    fn visit<'a>(
        node: &'a str,
        edges: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        color: &mut BTreeMap<&'a str, Color>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<&'a str>> {
        color.insert(node, Color::Gray);
        stack.push(node);
        if let Some(nexts) = edges.get(node) {
            for next in nexts {
                match color.get(next).copied().unwrap_or(Color::Black) {
                    Color::Gray => {
                        let start = stack.iter().position(|n| n == next).unwrap();
                        let mut cycle: Vec<&str> = stack[start..].to_vec();
                        cycle.push(next);
                        return Some(cycle);
                    }
                    Color::White => {
                        if let Some(c) = visit(next, edges, color, stack) {
                            return Some(c);
                        }
                    }
                    Color::Black => {}
                }
            }
        }
        stack.pop();
        color.insert(node, Color::Black);
        None
    }

    let nodes: Vec<&str> = edges.keys().copied().collect();
    for node in nodes {
        if color[&node] == Color::White {
            let mut stack = Vec::new();
            if let Some(c) = visit(node, edges, &mut color, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RuleName;

    fn kinds(errs: &[ParseError]) -> Vec<ParseErrorKind> {
        errs.iter().map(|e| e.kind).collect()
    }

    #[test]
    fn single_statement_theory_parses() {
        let t = parse_theory("agents CS, TF, FE; times t1, t2; evidence FE @ t2 : SpeedTr23.")
            .unwrap();
        assert_eq!(t.agents().len(), 3);
        assert_eq!(t.times().len(), 2);
        assert_eq!(t.simple_evidence().count(), 1);
        let ev = t.simple_evidence().next().unwrap();
        assert_eq!(ev.agent.name(), "FE");
        assert_eq!(ev.time.name(), "t2");
        assert_eq!(ev.time.index(), 1);
        assert_eq!(ev.lit.var().name(), "SpeedTr23");
        assert_eq!(ev.lit.kind(), VarKind::Simple);
        assert!(ev.lit.is_positive());
    }

    #[test]
    fn empty_input_is_an_empty_theory() {
        let errs = parse_theory("").unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::EmptyTheory]);
        assert_eq!(errs[0].span.line, 1);
        assert_eq!(errs[0].span.column, 1);
    }

    #[test]
    fn trust_only_input_is_an_empty_theory() {
        let errs = parse_theory("agents A, B; times t1; trust(p): A < B.").unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::EmptyTheory]);
    }

    #[test]
    fn derived_statement_with_negation_and_premises() {
        let src = "agents A1, A4; times t;\n\
                   evidence A4 @ t : ~Culprit(C,Attack) <- r4 [A4 @ t : ~Fin(C,Attack)].";
        let t = parse_theory(src).unwrap();
        let d = t.derived_evidence().next().unwrap();
        assert!(!d.lit.is_positive());
        assert_eq!(d.lit.var().name(), "Culprit(C,Attack)");
        assert_eq!(d.lit.kind(), VarKind::Derived);
        assert_eq!(d.reasoning.name(), "r4");
        assert_eq!(d.premises.len(), 1);
        assert_eq!(d.premises[0].2.var().name(), "Fin(C,Attack)");
        assert_eq!(d.premises[0].2.kind(), VarKind::Simple);
        assert!(!d.premises[0].2.is_positive());
    }

    #[test]
    fn trust_forms_compact_spaced_and_quoted_agree() {
        let base = "agents A, B; times t1; evidence A @ t1 : p.";
        let compact = parse_theory(&format!("{} trust(Sim): A < B.", base)).unwrap();
        let spaced = parse_theory(&format!("{} trust (Sim) : A < B.", base)).unwrap();
        let quoted = parse_theory(&format!("{} trust(\"Sim\"): A < B.", base)).unwrap();
        assert_eq!(compact, spaced);
        assert_eq!(compact, quoted);
        let tr = compact.agent_trust().next().unwrap();
        assert_eq!(tr.subject.name(), "Sim");
        assert_eq!(tr.less.name(), "A");
        assert_eq!(tr.more.name(), "B");
    }

    #[test]
    fn self_trust_parses_and_closes_only_at_rewrite_time() {
        let t = parse_theory("agents A; times t1; evidence A @ t1 : p. trust(p): A < A.").unwrap();
        assert_eq!(t.agent_trust().count(), 1);
        assert_eq!(t.status(), Status::Open);
    }

    #[test]
    fn rtrust_declares_reasonings_implicitly() {
        let t = parse_theory("agents A; times t1; evidence A @ t1 : p. rtrust: r1 < r2.").unwrap();
        assert_eq!(t.reasonings().len(), 2);
        assert_eq!(t.reasoning_trust().count(), 1);
    }

    #[test]
    fn duplicate_declarations_are_rejected() {
        let errs =
            parse_theory("agents A; agents B; times t1; evidence A @ t1 : p.").unwrap_err();
        assert!(kinds(&errs).contains(&ParseErrorKind::DuplicateDecl));

        let errs = parse_theory("agents A, A; times t1; evidence A @ t1 : p.").unwrap_err();
        assert!(kinds(&errs).contains(&ParseErrorKind::DuplicateDecl));

        let errs = parse_theory("agents A; times A; evidence A @ A : p.").unwrap_err();
        assert!(kinds(&errs).contains(&ParseErrorKind::DuplicateDecl));
    }

    #[test]
    fn undeclared_agents_and_times_are_unknown_symbols() {
        let errs = parse_theory("agents A; times t1; evidence B @ t2 : p.").unwrap_err();
        assert_eq!(
            kinds(&errs),
            vec![ParseErrorKind::UnknownSymbol, ParseErrorKind::UnknownSymbol]
        );
        assert!(errs[0].message.contains("agent `B`"));
        assert!(errs[1].message.contains("time `t2`"));
    }

    #[test]
    fn kind_conflicts_are_rejected() {
        let src = "agents A; times t1;\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : p].\n\
                   evidence A @ t1 : q.";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::KindConflict]);

        let src = "agents A, B; times t1;\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : p].\n\
                   trust(q): A < B.";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::KindConflict]);
    }

    #[test]
    fn derivation_cycles_are_rejected() {
        let src = "agents X; times t1;\n\
                   evidence X @ t1 : A <- r [X @ t1 : B].\n\
                   evidence X @ t1 : B <- rp [X @ t1 : A].";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::DerivationCycle]);
        assert!(errs[0].message.contains("->"));
    }

    #[test]
    fn self_referential_derivation_is_a_cycle() {
        let src = "agents X; times t1; evidence X @ t1 : A <- r [X @ t1 : A].";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::DerivationCycle]);
    }

    #[test]
    fn reasoning_shape_must_be_stable() {
        let src = "agents A, B; times t1;\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : p].\n\
                   evidence B @ t1 : q <- r1 [A @ t1 : x].";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::ReasoningShapeMismatch]);
    }

    #[test]
    fn reasoning_head_time_is_free_per_use() {
        // Same rule, same premises, concluded at two different instants.
        let src = "agents A; times t1, t2;\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : p].\n\
                   evidence A @ t2 : q <- r1 [A @ t1 : p].";
        let t = parse_theory(src).unwrap();
        assert_eq!(t.derived_evidence().count(), 2);
    }

    #[test]
    fn premise_order_does_not_change_the_shape() {
        let src = "agents A; times t1;\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : p | A @ t1 : s].\n\
                   evidence A @ t1 : q <- r1 [A @ t1 : s | A @ t1 : p].";
        let t = parse_theory(src).unwrap();
        // Equal as formulas too: premise order is not significant.
        assert_eq!(t.derived_evidence().count(), 2);
    }

    #[test]
    fn statement_errors_recover_and_keep_reporting() {
        let src = "agents A; times t1;\n\
                   evidence A @ : p.\n\
                   evidence @ t1 : q.\n\
                   evidence A @ t1 : ok.";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(errs.len(), 2);
        assert!(errs.iter().all(|e| e.kind == ParseErrorKind::Syntax));
        assert_eq!(errs[0].span.line, 2);
        assert_eq!(errs[1].span.line, 3);
    }

    #[test]
    fn declarations_after_statements_are_rejected() {
        let errs =
            parse_theory("agents A; times t1; evidence A @ t1 : p. times t2;").unwrap_err();
        assert_eq!(kinds(&errs), vec![ParseErrorKind::Syntax]);
        assert!(errs[0].message.contains("precede"));
    }

    #[test]
    fn lexical_errors_carry_spans() {
        let errs = parse_theory("agents A; times t1;\nevidence A @ t1 : 9bad.").unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Lexical);
        assert_eq!(errs[0].span.line, 2);

        let errs = parse_theory("agents \"A").unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Lexical);
        assert!(errs[0].message.contains("unterminated"));
    }

    #[test]
    fn keywords_cannot_name_things_unquoted() {
        let errs = parse_theory("agents evidence; times t1;").unwrap_err();
        assert!(errs.iter().any(|e| e.kind == ParseErrorKind::Syntax));

        let t = parse_theory("agents \"evidence\"; times t1; evidence \"evidence\" @ t1 : p.")
            .unwrap();
        assert_eq!(t.agents().iter().next().unwrap().name(), "evidence");
    }

    #[test]
    fn comments_and_crlf_are_accepted() {
        let src = "# a file\r\nagents A; # trailing\r\ntimes t1;\r\nevidence A @ t1 : p. # done\r\n";
        let t = parse_theory(src).unwrap();
        assert_eq!(t.simple_evidence().count(), 1);
    }

    #[test]
    fn duplicate_statements_collapse() {
        let src = "agents A; times t1; evidence A @ t1 : p. evidence A @ t1 : p.";
        let t = parse_theory(src).unwrap();
        assert_eq!(t.formulas().len(), 1);
    }

    #[test]
    fn round_trip_preserves_the_theory() {
        let src = "agents CS, TF, FE;\n\
                   times t1, t2;\n\
                   evidence CS @ t1 : SpPhish.\n\
                   evidence CS @ t1 : SucPhish <- r2 [CS @ t1 : LinkCl | CS @ t1 : FFill].\n\
                   evidence TF @ t2 : ~SpeedTr(23MB/s).\n\
                   trust(SpeedTr(23MB/s)): TF < FE.\n\
                   rtrust: r1 < r4.";
        let t = parse_theory(src).unwrap();
        let rendered = render_theory(&t);
        let t2 = parse_theory(&rendered).unwrap();
        assert_eq!(t, t2);
        assert_eq!(rendered, render_theory(&t2));
    }

    #[test]
    fn round_trip_keeps_quoted_names_quoted() {
        let src = "agents \"Crime Lab\"; times t1; evidence \"Crime Lab\" @ t1 : \"odd var\".";
        let t = parse_theory(src).unwrap();
        let rendered = render_theory(&t);
        assert!(rendered.contains("\"Crime Lab\""));
        assert!(rendered.contains("\"odd var\""));
        assert_eq!(parse_theory(&rendered).unwrap(), t);
    }

    #[test]
    fn closed_theory_renders_as_a_banner() {
        let mut t = parse_theory("agents A; times t1; evidence A @ t1 : p.").unwrap();
        t.close(RuleName::XP, vec![]);
        let rendered = render_theory(&t);
        assert!(rendered.contains("⊥ (closed theory)"));
        assert!(!rendered.contains("evidence"));
    }

    #[test]
    fn error_display_is_file_line_column() {
        let errs = parse_theory_named("agents A; times t1; evidence B @ t1 : p.", "case.el")
            .unwrap_err();
        let msg = errs[0].to_string();
        assert!(msg.starts_with("case.el:1:30"), "got {}", msg);
        assert!(msg.contains("unknown symbol"));
    }
}
