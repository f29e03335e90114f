//! The `.pwk` text format: a line-oriented, human-writable description of a
//! machine, with a parser and a canonical serializer.
//!
//! ```text
//! # a comment
//! machine an_bn
//! alphabet: a b
//! messages: a b LEND REND
//! upper:
//!   states: p0 p1 p2
//!   initial: p0
//!   accepting: p2
//!   send-default: echo
//!   step: p0 LEND / REND -> p1 stay
//!   back: p1 LEND / REND -> p0 stay
//! lower:
//!   ...
//! ```
//!
//! `LEND`, `REND` and `NONE` are reserved for the endmarkers and the
//! no-message marker. Canonical output is UTF-8 with LF line endings,
//! blocks in fixed order and rules sorted by (state, symbol, message);
//! serializing any valid spec is byte-identical across runs.

use crate::model::{
    AcceptanceMode, ComponentSpec, DeltaRule, Machine, MachineSpec, Motion, Msg, SendDefault,
    SendRule, TapeSym,
};
use std::fmt;
use thiserror::Error;

/// A location in the source text; 1-based line and column, length >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

/// A syntax error with the offending token's span and an expectation hint.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, col {}: {}",
            self.span.line, self.span.column, self.message
        )?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

struct Tok<'a> {
    s: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut col = 0usize;
    let mut start = None;
    for (i, ch) in line.chars().enumerate() {
        if ch.is_whitespace() {
            if let Some((sc, si)) = start.take() {
                out.push(Tok {
                    s: &line[si..byte_at(line, i)],
                    col: sc + 1,
                });
            }
        } else if start.is_none() {
            start = Some((i, byte_at(line, i)));
        }
        col = i + 1;
    }
    if let Some((sc, si)) = start {
        out.push(Tok {
            s: &line[si..],
            col: sc + 1,
        });
    }
    let _ = col;
    out
}

fn byte_at(line: &str, char_idx: usize) -> usize {
    line.char_indices()
        .nth(char_idx)
        .map(|(b, _)| b)
        .unwrap_or(line.len())
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, line: usize, col: usize, len: usize, msg: &str, expected: Option<&str>) -> ParseError {
        ParseError {
            span: SourceSpan {
                line,
                column: col,
                length: len.max(1),
            },
            message: msg.to_string(),
            expected: expected.map(|s| s.to_string()),
        }
    }

    fn err_tok(&self, line: usize, tok: &Tok<'_>, msg: &str, expected: Option<&str>) -> ParseError {
        self.err(line, tok.col, tok.s.chars().count(), msg, expected)
    }

    fn err_eof(&self, msg: &str, expected: Option<&str>) -> ParseError {
        let line = self.lines.len().max(1);
        self.err(line, 1, 1, msg, expected)
    }

    /// Next significant line: comments stripped, blanks skipped.
    fn next_line(&mut self) -> Option<(usize, Vec<Tok<'a>>)> {
        while self.pos < self.lines.len() {
            let idx = self.pos;
            self.pos += 1;
            let raw = self.lines[idx];
            let stripped = match raw.find('#') {
                Some(b) => &raw[..b],
                None => raw,
            };
            let toks = tokens(stripped);
            if !toks.is_empty() {
                return Some((idx + 1, toks));
            }
        }
        None
    }

    fn peek_keyword(&mut self) -> Option<&'a str> {
        let saved = self.pos;
        let kw = self.next_line().map(|(_, t)| t[0].s);
        self.pos = saved;
        kw
    }
}

fn parse_sym(p: &Parser<'_>, line: usize, tok: &Tok<'_>) -> Result<TapeSym, ParseError> {
    match tok.s {
        "LEND" => Ok(TapeSym::Lend),
        "REND" => Ok(TapeSym::Rend),
        s => {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(TapeSym::Sym(c)),
                _ => Err(p.err_tok(
                    line,
                    tok,
                    &format!("invalid tape symbol '{s}'"),
                    Some("a single character, LEND, or REND"),
                )),
            }
        }
    }
}

fn parse_msg(tok: &Tok<'_>) -> Msg {
    if tok.s == "NONE" {
        Msg::Bot
    } else {
        Msg::Tok(tok.s.to_string())
    }
}

/// Parse a `.pwk` document into a spec. Syntax and reserved-name problems
/// are reported here with source spans; semantic well-formedness is the job
/// of [`crate::model::validate`].
pub fn parse(text: &str) -> Result<MachineSpec, ParseError> {
    let mut p = Parser {
        lines: text.lines().collect(),
        pos: 0,
    };

    let (line, toks) = p
        .next_line()
        .ok_or_else(|| p.err(1, 1, 1, "empty document", Some("machine <name>")))?;
    if toks[0].s != "machine" {
        return Err(p.err_tok(line, &toks[0], "document must start with a machine header", Some("machine <name>")));
    }
    if toks.len() != 2 {
        return Err(p.err_tok(line, &toks[0], "machine header takes exactly one name", Some("machine <name>")));
    }
    let name = toks[1].s.to_string();

    let mut alphabet: Option<Vec<char>> = None;
    let mut messages: Option<Vec<String>> = None;
    let mut acceptance = AcceptanceMode::Normal;

    loop {
        let kw = p.peek_keyword();
        match kw {
            Some("alphabet:") => {
                let (line, toks) = p.next_line().unwrap();
                if alphabet.is_some() {
                    return Err(p.err_tok(line, &toks[0], "duplicate alphabet line", None));
                }
                let mut chars = Vec::new();
                for t in &toks[1..] {
                    if t.s == "LEND" || t.s == "REND" || t.s == "NONE" {
                        return Err(p.err_tok(line, t, "reserved symbol in alphabet", None));
                    }
                    let mut it = t.s.chars();
                    match (it.next(), it.next()) {
                        (Some(c), None) => chars.push(c),
                        _ => {
                            return Err(p.err_tok(
                                line,
                                t,
                                &format!("alphabet symbol '{}' must be a single character", t.s),
                                None,
                            ))
                        }
                    }
                }
                alphabet = Some(chars);
            }
            Some("messages:") => {
                let (line, toks) = p.next_line().unwrap();
                if messages.is_some() {
                    return Err(p.err_tok(line, &toks[0], "duplicate messages line", None));
                }
                let mut msgs = Vec::new();
                for t in &toks[1..] {
                    if t.s == "NONE" {
                        return Err(p.err_tok(line, t, "reserved message token in message alphabet", None));
                    }
                    msgs.push(t.s.to_string());
                }
                messages = Some(msgs);
            }
            Some("accept:") => {
                let (line, toks) = p.next_line().unwrap();
                match toks.get(1).map(|t| t.s) {
                    Some("normal") => acceptance = AcceptanceMode::Normal,
                    Some("complemented") => acceptance = AcceptanceMode::Complemented,
                    _ => {
                        return Err(p.err_tok(line, &toks[0], "bad accept mode", Some("normal or complemented")))
                    }
                }
            }
            Some("upper:") => break,
            Some(other) => {
                let (line, toks) = p.next_line().unwrap();
                let _ = other;
                return Err(p.err_tok(
                    line,
                    &toks[0],
                    &format!("unexpected line '{}'", toks[0].s),
                    Some("alphabet:, messages:, accept:, or upper:"),
                ));
            }
            None => return Err(p.err_eof("missing upper component", Some("upper:"))),
        }
    }

    // consume "upper:"
    let (line, toks) = p.next_line().unwrap();
    if toks.len() != 1 {
        return Err(p.err_tok(line, &toks[1], "unexpected token after upper:", None));
    }
    let upper = parse_component(&mut p, "lower:")?;
    let (_, _) = match p.next_line() {
        Some((l, t)) if t[0].s == "lower:" => (l, t),
        Some((l, t)) => return Err(p.err_tok(l, &t[0], "expected lower component", Some("lower:"))),
        None => return Err(p.err_eof("missing lower component", Some("lower:"))),
    };
    let lower = parse_component(&mut p, "")?;

    Ok(MachineSpec {
        name,
        input_alphabet: alphabet.unwrap_or_default(),
        message_alphabet: messages.unwrap_or_default(),
        upper,
        lower,
        acceptance,
    })
}

fn parse_component(p: &mut Parser<'_>, stop: &str) -> Result<ComponentSpec, ParseError> {
    let mut comp = ComponentSpec::default();
    let mut have_states = false;
    let mut have_initial = false;
    while let Some(kw) = p.peek_keyword() {
        if kw == stop {
            break;
        }
        let (line, toks) = p.next_line().unwrap();
        let rest = &toks[1..];
        match toks[0].s {
            "states:" => {
                comp.states = rest.iter().map(|t| t.s.to_string()).collect();
                have_states = true;
            }
            "initial:" => {
                if rest.len() != 1 {
                    return Err(p.err_tok(line, &toks[0], "initial takes exactly one state", None));
                }
                comp.initial = rest[0].s.to_string();
                have_initial = true;
            }
            "accepting:" => {
                comp.accepting = rest.iter().map(|t| t.s.to_string()).collect();
            }
            "send-default:" | "rsend-default:" => {
                let d = match rest.first().map(|t| t.s) {
                    Some("echo") => SendDefault::Echo,
                    Some("none") => SendDefault::Bot,
                    _ => {
                        return Err(p.err_tok(line, &toks[0], "bad send default", Some("echo or none")))
                    }
                };
                if toks[0].s == "send-default:" {
                    comp.send_default = d;
                } else {
                    comp.reverse_send_default = Some(d);
                }
            }
            "send:" | "rsend:" => {
                // send: <state> <sym> -> <msg>
                if rest.len() != 4 || rest[2].s != "->" {
                    return Err(p.err_tok(
                        line,
                        &toks[0],
                        "malformed broadcast rule",
                        Some("send: <state> <sym> -> <msg>"),
                    ));
                }
                let rule = SendRule {
                    state: rest[0].s.to_string(),
                    sym: parse_sym(p, line, &rest[1])?,
                    msg: parse_msg(&rest[3]),
                };
                if toks[0].s == "send:" {
                    comp.sends.push(rule);
                } else {
                    comp.reverse_sends.push(rule);
                }
            }
            "step:" | "back:" => {
                // step: <state> <sym> / <msg> -> <state> <motion>
                if rest.len() != 7 || rest[2].s != "/" || rest[4].s != "->" {
                    return Err(p.err_tok(
                        line,
                        &toks[0],
                        "malformed transition rule",
                        Some("<state> <sym> / <msg> -> <state> <motion>"),
                    ));
                }
                let is_back = toks[0].s == "back:";
                let motion = match (rest[6].s, is_back) {
                    ("stay", _) => Motion::Stay,
                    ("fwd", false) => Motion::Go,
                    ("rev", true) => Motion::Go,
                    _ => {
                        return Err(p.err_tok(
                            line,
                            &rest[6],
                            &format!("bad motion '{}'", rest[6].s),
                            Some(if is_back { "stay or rev" } else { "stay or fwd" }),
                        ))
                    }
                };
                let rule = DeltaRule {
                    state: rest[0].s.to_string(),
                    sym: parse_sym(p, line, &rest[1])?,
                    msg: parse_msg(&rest[3]),
                    next: rest[5].s.to_string(),
                    motion,
                };
                if is_back {
                    comp.reverse_delta.get_or_insert_with(Vec::new).push(rule);
                } else {
                    comp.delta.push(rule);
                }
            }
            other => {
                return Err(p.err_tok(
                    line,
                    &toks[0],
                    &format!("unexpected line '{other}' in component"),
                    Some("states:, initial:, accepting:, send-default:, send:, rsend-default:, rsend:, step:, or back:"),
                ));
            }
        }
    }
    if !have_states {
        return Err(p.err_eof("component missing states line", Some("states:")));
    }
    if !have_initial {
        return Err(p.err_eof("component missing initial line", Some("initial:")));
    }
    Ok(comp)
}

fn write_component(out: &mut String, comp: &ComponentSpec) {
    use std::fmt::Write;
    let _ = writeln!(out, "  states: {}", comp.states.join(" "));
    let _ = writeln!(out, "  initial: {}", comp.initial);
    if comp.accepting.is_empty() {
        out.push_str("  accepting:\n");
    } else {
        let _ = writeln!(out, "  accepting: {}", comp.accepting.join(" "));
    }
    if comp.send_default == SendDefault::Echo {
        out.push_str("  send-default: echo\n");
    }
    let mut sends = comp.sends.clone();
    sends.sort_by_key(|r| (r.state.clone(), r.sym.token()));
    for r in &sends {
        let _ = writeln!(out, "  send: {} {} -> {}", r.state, r.sym.token(), r.msg.token());
    }
    if let Some(d) = comp.reverse_send_default {
        let _ = writeln!(
            out,
            "  rsend-default: {}",
            if d == SendDefault::Echo { "echo" } else { "none" }
        );
    }
    let mut rsends = comp.reverse_sends.clone();
    rsends.sort_by_key(|r| (r.state.clone(), r.sym.token()));
    for r in &rsends {
        let _ = writeln!(out, "  rsend: {} {} -> {}", r.state, r.sym.token(), r.msg.token());
    }
    let mut steps = comp.delta.clone();
    steps.sort_by_key(|r| (r.state.clone(), r.sym.token(), r.msg.token()));
    for r in &steps {
        let _ = writeln!(
            out,
            "  step: {} {} / {} -> {} {}",
            r.state,
            r.sym.token(),
            r.msg.token(),
            r.next,
            if r.motion == Motion::Go { "fwd" } else { "stay" }
        );
    }
    if let Some(back) = &comp.reverse_delta {
        let mut back = back.clone();
        back.sort_by_key(|r| (r.state.clone(), r.sym.token(), r.msg.token()));
        for r in &back {
            let _ = writeln!(
                out,
                "  back: {} {} / {} -> {} {}",
                r.state,
                r.sym.token(),
                r.msg.token(),
                r.next,
                if r.motion == Motion::Go { "rev" } else { "stay" }
            );
        }
    }
}

/// Canonical text form: fixed block order, rules sorted by
/// (state, symbol, message), LF endings. Byte-identical across runs.
pub fn serialize(spec: &MachineSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("machine {}\n", spec.name));
    out.push_str("alphabet:");
    for c in &spec.input_alphabet {
        out.push(' ');
        out.push(*c);
    }
    out.push('\n');
    out.push_str("messages:");
    for m in &spec.message_alphabet {
        out.push(' ');
        out.push_str(m);
    }
    out.push('\n');
    if spec.acceptance == AcceptanceMode::Complemented {
        out.push_str("accept: complemented\n");
    }
    out.push_str("upper:\n");
    write_component(&mut out, &spec.upper);
    out.push_str("lower:\n");
    write_component(&mut out, &spec.lower);
    out
}

/// Parse, validate and compile in one go.
pub fn load_str(text: &str) -> Result<Machine, LoadError> {
    let spec = parse(text).map_err(LoadError::Parse)?;
    spec.compile().map_err(LoadError::Invalid)
}

/// One-stop error for loading `.pwk` text.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid machine:\n{0}")]
    Invalid(crate::model::ValidationReport),
}
