//! Machine model: static descriptions of two-party Watson-Crick systems,
//! validation, compilation into dense table form, and the forward
//! operational semantics (stepping, running, acceptance, loop detection).
//!
//! A system consists of two finite automata sharing one read-only tape
//! `LEND w REND`. The upper component starts on the left endmarker and walks
//! right; the lower component starts on the right endmarker and walks left.
//! Each step both components broadcast a message (or nothing) based on their
//! current state and scanned symbol, then both transition simultaneously on
//! (state, symbol, received message). The system halts as soon as either
//! transition is undefined; the input is accepted if at halt at least one
//! component is in an accepting state.

use std::collections::{HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// A tape square: one of the two endmarkers or an input symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TapeSym {
    Lend,
    Rend,
    Sym(char),
}

impl TapeSym {
    pub fn token(&self) -> String {
        match self {
            TapeSym::Lend => "LEND".to_string(),
            TapeSym::Rend => "REND".to_string(),
            TapeSym::Sym(c) => c.to_string(),
        }
    }
}

impl fmt::Display for TapeSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// A broadcast message, or `Bot` for "nothing sent".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Msg {
    Bot,
    Tok(String),
}

impl Msg {
    pub fn tok(s: &str) -> Msg {
        Msg::Tok(s.to_string())
    }

    pub fn token(&self) -> String {
        match self {
            Msg::Bot => "NONE".to_string(),
            Msg::Tok(t) => t.clone(),
        }
    }
}

impl fmt::Display for Msg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// Head motion emitted by a transition. In forward tables `Go` advances the
/// head (upper right, lower left); in backward tables `Go` retreats it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Motion {
    Stay,
    Go,
}

/// Default for unlisted broadcast keys: send nothing, or echo the scanned
/// symbol's token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SendDefault {
    #[default]
    Bot,
    Echo,
}

/// How halting configurations are judged. `Complemented` flips acceptance at
/// halt; non-halting runs are rejected under both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AcceptanceMode {
    #[default]
    Normal,
    Complemented,
}

/// One broadcast table entry: in `state` scanning `sym`, send `msg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SendRule {
    pub state: String,
    pub sym: TapeSym,
    pub msg: Msg,
}

/// One transition table entry: in `state` scanning `sym` having received
/// `msg`, go to `next` moving by `motion`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaRule {
    pub state: String,
    pub sym: TapeSym,
    pub msg: Msg,
    pub next: String,
    pub motion: Motion,
}

impl DeltaRule {
    pub fn key(&self) -> (String, TapeSym, Msg) {
        (self.state.clone(), self.sym, self.msg.clone())
    }
}

fn sort_delta(rules: &mut [DeltaRule]) {
    rules.sort_by_key(|r| (r.state.clone(), r.sym.token(), r.msg.token()));
}

fn sort_sends(rules: &mut [SendRule]) {
    rules.sort_by_key(|r| (r.state.clone(), r.sym.token()));
}

/// Static description of one component (the upper or lower automaton).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentSpec {
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub send_default: SendDefault,
    pub sends: Vec<SendRule>,
    pub delta: Vec<DeltaRule>,
    /// Explicit reverse broadcast table; `None` inherits the forward one.
    pub reverse_send_default: Option<SendDefault>,
    pub reverse_sends: Vec<SendRule>,
    /// Backward transition table; `None` marks the component forward-only.
    pub reverse_delta: Option<Vec<DeltaRule>>,
}

impl ComponentSpec {
    /// Effective forward broadcast for `(state, sym)`.
    pub fn effective_send(&self, state: &str, sym: &TapeSym) -> Msg {
        for r in &self.sends {
            if r.state == state && &r.sym == sym {
                return r.msg.clone();
            }
        }
        match self.send_default {
            SendDefault::Bot => Msg::Bot,
            SendDefault::Echo => Msg::Tok(sym.token()),
        }
    }

    /// Effective reverse broadcast; inherits the forward table when no
    /// explicit reverse table was given.
    pub fn effective_reverse_send(&self, state: &str, sym: &TapeSym) -> Msg {
        if self.reverse_send_default.is_none() && self.reverse_sends.is_empty() {
            return self.effective_send(state, sym);
        }
        for r in &self.reverse_sends {
            if r.state == state && &r.sym == sym {
                return r.msg.clone();
            }
        }
        match self.reverse_send_default.unwrap_or(SendDefault::Bot) {
            SendDefault::Bot => Msg::Bot,
            SendDefault::Echo => Msg::Tok(sym.token()),
        }
    }

    fn canonicalize(&mut self) {
        sort_sends(&mut self.sends);
        sort_delta(&mut self.delta);
        sort_sends(&mut self.reverse_sends);
        // An empty backward table is not expressible in the text format and
        // cannot invert anything; normalize it to forward-only.
        if self.reverse_delta.as_ref().is_some_and(|rd| rd.is_empty()) {
            self.reverse_delta = None;
        }
        if let Some(rd) = &mut self.reverse_delta {
            sort_delta(rd);
        }
    }
}

/// Full static description of a two-party system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    pub name: String,
    pub input_alphabet: Vec<char>,
    pub message_alphabet: Vec<String>,
    pub upper: ComponentSpec,
    pub lower: ComponentSpec,
    pub acceptance: AcceptanceMode,
}

impl MachineSpec {
    /// True when both components carry backward transition tables.
    pub fn is_reversible(&self) -> bool {
        self.upper.reverse_delta.is_some() && self.lower.reverse_delta.is_some()
    }

    /// Sort all rule tables into canonical order.
    pub fn canonicalized(mut self) -> Self {
        self.upper.canonicalize();
        self.lower.canonicalize();
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn compile(self) -> Result<Machine, ValidationReport> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(report);
        }
        Ok(Machine::build(self))
    }
}

/// A single well-formedness violation, with a human-readable location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Outcome of validating a [`MachineSpec`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check every structural invariant of a spec. Violations are data, not
/// failures; an empty report means every other operation will accept the
/// spec.
pub fn validate(spec: &MachineSpec) -> ValidationReport {
    let mut out = Vec::new();
    let mut seen_chars = HashSet::new();
    for &c in &spec.input_alphabet {
        if !seen_chars.insert(c) {
            out.push(Violation {
                location: "alphabet".into(),
                message: format!("duplicate symbol '{c}'"),
            });
        }
        if c.is_whitespace() || c == '#' {
            out.push(Violation {
                location: "alphabet".into(),
                message: format!("unusable symbol {c:?}"),
            });
        }
    }
    let mut seen_msgs = HashSet::new();
    for m in &spec.message_alphabet {
        if !seen_msgs.insert(m.clone()) {
            out.push(Violation {
                location: "messages".into(),
                message: format!("duplicate message '{m}'"),
            });
        }
        if m == "NONE" || m.is_empty() || m.chars().any(|c| c.is_whitespace()) {
            out.push(Violation {
                location: "messages".into(),
                message: format!("unusable message token {m:?}"),
            });
        }
    }
    validate_component(spec, &spec.upper, Side::Upper, &mut out);
    validate_component(spec, &spec.lower, Side::Lower, &mut out);
    ValidationReport { violations: out }
}

/// Which component a state or rule belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn label(&self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

fn validate_component(
    spec: &MachineSpec,
    comp: &ComponentSpec,
    side: Side,
    out: &mut Vec<Violation>,
) {
    let loc = |what: &str| format!("{}.{}", side.label(), what);
    let mut states = HashSet::new();
    for s in &comp.states {
        if !states.insert(s.clone()) {
            out.push(Violation {
                location: loc("states"),
                message: format!("duplicate state '{s}'"),
            });
        }
    }
    if comp.states.is_empty() {
        out.push(Violation {
            location: loc("states"),
            message: "no states declared".into(),
        });
    }
    if !states.contains(&comp.initial) {
        out.push(Violation {
            location: loc("initial"),
            message: format!("initial state '{}' not declared", comp.initial),
        });
    }
    for a in &comp.accepting {
        if !states.contains(a) {
            out.push(Violation {
                location: loc("accepting"),
                message: format!("accepting state '{a}' not declared"),
            });
        }
    }

    let sym_ok = |s: &TapeSym| match s {
        TapeSym::Lend | TapeSym::Rend => true,
        TapeSym::Sym(c) => spec.input_alphabet.contains(c),
    };
    let msg_ok = |m: &Msg| match m {
        Msg::Bot => true,
        Msg::Tok(t) => spec.message_alphabet.contains(t),
    };

    let mut send_keys = HashSet::new();
    for r in &comp.sends {
        let at = format!("{} send: {} {}", side.label(), r.state, r.sym);
        if !states.contains(&r.state) {
            out.push(Violation {
                location: at.clone(),
                message: format!("state '{}' not declared", r.state),
            });
        }
        if !sym_ok(&r.sym) {
            out.push(Violation {
                location: at.clone(),
                message: format!("symbol '{}' not in alphabet", r.sym),
            });
        }
        if !msg_ok(&r.msg) {
            out.push(Violation {
                location: at.clone(),
                message: format!("message '{}' not declared", r.msg),
            });
        }
        if !send_keys.insert((r.state.clone(), r.sym)) {
            out.push(Violation {
                location: at,
                message: "duplicate broadcast key".into(),
            });
        }
    }

    if comp.send_default == SendDefault::Echo {
        let mut syms: Vec<TapeSym> = vec![TapeSym::Lend, TapeSym::Rend];
        syms.extend(spec.input_alphabet.iter().map(|&c| TapeSym::Sym(c)));
        for sym in syms {
            if spec.message_alphabet.contains(&sym.token()) {
                continue;
            }
            let uncovered = comp
                .states
                .iter()
                .any(|s| !send_keys.contains(&(s.clone(), sym)));
            if uncovered {
                out.push(Violation {
                    location: loc("send-default"),
                    message: format!("echo default emits '{}' which is not a declared message", sym),
                });
            }
        }
    }

    let check_delta = |rules: &[DeltaRule], kind: &str, out: &mut Vec<Violation>| {
        let mut keys = HashSet::new();
        for r in rules {
            let at = format!("{} {kind}: {} {} / {}", side.label(), r.state, r.sym, r.msg);
            if !states.contains(&r.state) || !states.contains(&r.next) {
                out.push(Violation {
                    location: at.clone(),
                    message: "rule references undeclared state".into(),
                });
            }
            if !sym_ok(&r.sym) {
                out.push(Violation {
                    location: at.clone(),
                    message: format!("symbol '{}' not in alphabet", r.sym),
                });
            }
            if !msg_ok(&r.msg) {
                out.push(Violation {
                    location: at.clone(),
                    message: format!("message '{}' not declared", r.msg),
                });
            }
            if !keys.insert(r.key()) {
                let det = if kind == "step" {
                    "forward nondeterminism"
                } else {
                    "backward nondeterminism"
                };
                out.push(Violation {
                    location: at.clone(),
                    message: format!("{det}: duplicate key"),
                });
            }
            if kind == "step" && r.motion == Motion::Go {
                match (side, &r.sym) {
                    (Side::Upper, TapeSym::Rend) => out.push(Violation {
                        location: at.clone(),
                        message: "upper moves past right endmarker".into(),
                    }),
                    (Side::Lower, TapeSym::Lend) => out.push(Violation {
                        location: at.clone(),
                        message: "lower moves past left endmarker".into(),
                    }),
                    _ => {}
                }
            }
        }
    };
    check_delta(&comp.delta, "step", out);
    if let Some(rd) = &comp.reverse_delta {
        check_delta(rd, "back", out);
    }
    for r in &comp.reverse_sends {
        let at = format!("{} rsend: {} {}", side.label(), r.state, r.sym);
        if !states.contains(&r.state) {
            out.push(Violation {
                location: at.clone(),
                message: format!("state '{}' not declared", r.state),
            });
        }
        if !sym_ok(&r.sym) || !msg_ok(&r.msg) {
            out.push(Violation {
                location: at,
                message: "rule references undeclared symbol or message".into(),
            });
        }
    }
}

/// Error for words that do not fit a machine's input alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("symbol '{ch}' at position {index} is not in the input alphabet")]
    UnknownSymbol { ch: char, index: usize },
}

/// The dynamic state of a computation: both component states plus both head
/// positions on the delimited tape (positions `0..=n+1`). Heads are
/// independent and may cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub upper_state: u16,
    pub upper_pos: u16,
    pub lower_state: u16,
    pub lower_pos: u16,
}

/// Message id inside a compiled machine; 0 is "no message".
pub type MsgId = u16;

pub const MSG_BOT: MsgId = 0;

/// One forward step: the unique successor relation applied once, with the
/// messages both components sent while making it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub pre: Configuration,
    pub post: Configuration,
    pub sent_upper: MsgId,
    pub sent_lower: MsgId,
    pub moves: (Motion, Motion),
}

/// Result of attempting one forward step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepResult {
    Next(StepRecord),
    Halt,
}

/// Final status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
    Loop,
    StepLimit,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::Loop => "loop",
            Verdict::StepLimit => "step-limit",
        })
    }
}

/// Ordered record of a complete computation.
#[derive(Debug, Clone)]
pub struct Trace {
    pub word: String,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
    pub halt_config: Configuration,
}

impl Trace {
    /// The configuration sequence, initial first.
    pub fn configurations(&self) -> Vec<Configuration> {
        let mut cfgs = Vec::with_capacity(self.steps.len() + 1);
        match self.steps.first() {
            Some(s) => cfgs.push(s.pre),
            None => cfgs.push(self.halt_config),
        }
        for s in &self.steps {
            cfgs.push(s.post);
        }
        cfgs
    }
}

/// An input word encoded against a machine's alphabet: symbol ids for
/// `LEND w REND` at positions `0..=n+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub word: String,
    tape: Vec<u16>,
}

impl Input {
    pub fn len(&self) -> usize {
        self.tape.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sym_at(&self, pos: usize) -> u16 {
        self.tape[pos]
    }
}

const SYM_LEND: u16 = 0;
const SYM_REND: u16 = 1;

#[derive(Debug, Clone)]
struct CompiledComponent {
    states: Vec<String>,
    initial: u16,
    accepting: Vec<bool>,
    /// `[state * n_syms + sym] -> MsgId`
    send: Vec<MsgId>,
    rsend: Vec<MsgId>,
    /// `[(state * n_syms + sym) * n_msgs + msg] -> (next, motion)`
    delta: Vec<Option<(u16, Motion)>>,
    rdelta: Option<Vec<Option<(u16, Motion)>>>,
}

/// A validated spec compiled to dense transition tables, ready to execute.
/// Immutable and freely shareable between concurrent runs.
#[derive(Debug, Clone)]
pub struct Machine {
    spec: MachineSpec,
    syms: Vec<TapeSym>,
    /// Message tokens; index 0 is reserved for "no message".
    msgs: Vec<String>,
    upper: CompiledComponent,
    lower: CompiledComponent,
}

impl Machine {
    fn build(spec: MachineSpec) -> Machine {
        let mut syms = vec![TapeSym::Lend, TapeSym::Rend];
        syms.extend(spec.input_alphabet.iter().map(|&c| TapeSym::Sym(c)));
        let mut msgs = vec![String::new()];
        msgs.extend(spec.message_alphabet.iter().cloned());

        let sym_index: HashMap<TapeSym, u16> = syms
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i as u16))
            .collect();
        let msg_index: HashMap<Msg, MsgId> = {
            let mut m = HashMap::new();
            m.insert(Msg::Bot, MSG_BOT);
            for (i, t) in spec.message_alphabet.iter().enumerate() {
                m.insert(Msg::Tok(t.clone()), (i + 1) as MsgId);
            }
            m
        };

        let compile_component = |comp: &ComponentSpec| -> CompiledComponent {
            let n_syms = syms.len();
            let n_msgs = msgs.len();
            let state_index: HashMap<&str, u16> = comp
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_str(), i as u16))
                .collect();
            let n_states = comp.states.len();
            let mut send = vec![MSG_BOT; n_states * n_syms];
            let mut rsend = vec![MSG_BOT; n_states * n_syms];
            for (si, state) in comp.states.iter().enumerate() {
                for (yi, sym) in syms.iter().enumerate() {
                    let f = comp.effective_send(state, sym);
                    let r = comp.effective_reverse_send(state, sym);
                    // Validation guarantees both images are declared messages.
                    send[si * n_syms + yi] = *msg_index.get(&f).unwrap_or(&MSG_BOT);
                    rsend[si * n_syms + yi] = *msg_index.get(&r).unwrap_or(&MSG_BOT);
                }
            }
            let fill = |rules: &[DeltaRule]| -> Vec<Option<(u16, Motion)>> {
                let mut t = vec![None; n_states * n_syms * n_msgs];
                for r in rules {
                    let si = state_index[r.state.as_str()] as usize;
                    let yi = sym_index[&r.sym] as usize;
                    let mi = msg_index[&r.msg] as usize;
                    t[(si * n_syms + yi) * n_msgs + mi] =
                        Some((state_index[r.next.as_str()], r.motion));
                }
                t
            };
            CompiledComponent {
                initial: state_index[comp.initial.as_str()],
                accepting: comp
                    .states
                    .iter()
                    .map(|s| comp.accepting.contains(s))
                    .collect(),
                states: comp.states.clone(),
                send,
                rsend,
                delta: fill(&comp.delta),
                rdelta: comp.reverse_delta.as_deref().map(fill),
            }
        };

        let upper = compile_component(&spec.upper);
        let lower = compile_component(&spec.lower);
        Machine {
            spec,
            syms,
            msgs,
            upper,
            lower,
        }
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn has_reverse(&self) -> bool {
        self.upper.rdelta.is_some() && self.lower.rdelta.is_some()
    }

    /// Encode a word over the input alphabet.
    pub fn input(&self, word: &str) -> Result<Input, WordError> {
        let mut tape = Vec::with_capacity(word.chars().count() + 2);
        tape.push(SYM_LEND);
        for (index, ch) in word.chars().enumerate() {
            let id = self
                .syms
                .iter()
                .position(|s| *s == TapeSym::Sym(ch))
                .ok_or(WordError::UnknownSymbol { ch, index })?;
            tape.push(id as u16);
        }
        tape.push(SYM_REND);
        Ok(Input {
            word: word.to_string(),
            tape,
        })
    }

    /// Upper head on the left endmarker, lower head on the right one, both
    /// components in their initial states.
    pub fn initial_configuration(&self, input: &Input) -> Configuration {
        Configuration {
            upper_state: self.upper.initial,
            upper_pos: 0,
            lower_state: self.lower.initial,
            lower_pos: (input.len() + 1) as u16,
        }
    }

    fn n_syms(&self) -> usize {
        self.syms.len()
    }

    fn n_msgs(&self) -> usize {
        self.msgs.len()
    }

    pub(crate) fn send_of(&self, side: Side, state: u16, sym: u16) -> MsgId {
        let c = self.comp(side);
        c.send[state as usize * self.n_syms() + sym as usize]
    }

    pub(crate) fn rsend_of(&self, side: Side, state: u16, sym: u16) -> MsgId {
        let c = self.comp(side);
        c.rsend[state as usize * self.n_syms() + sym as usize]
    }

    pub(crate) fn delta_of(&self, side: Side, state: u16, sym: u16, msg: MsgId) -> Option<(u16, Motion)> {
        let c = self.comp(side);
        c.delta[(state as usize * self.n_syms() + sym as usize) * self.n_msgs() + msg as usize]
    }

    pub(crate) fn rdelta_of(
        &self,
        side: Side,
        state: u16,
        sym: u16,
        msg: MsgId,
    ) -> Option<Option<(u16, Motion)>> {
        let c = self.comp(side);
        c.rdelta.as_ref().map(|t| {
            t[(state as usize * self.n_syms() + sym as usize) * self.n_msgs() + msg as usize]
        })
    }

    fn comp(&self, side: Side) -> &CompiledComponent {
        match side {
            Side::Upper => &self.upper,
            Side::Lower => &self.lower,
        }
    }

    /// Attempt one forward step from `c`. `Halt` exactly when at least one
    /// component's transition is undefined for what it scans and receives.
    pub fn forward_step(&self, input: &Input, c: Configuration) -> StepResult {
        let last = (input.len() + 1) as u16;
        assert!(c.upper_pos <= last && c.lower_pos <= last, "head position out of range");
        let x = input.sym_at(c.upper_pos as usize);
        let y = input.sym_at(c.lower_pos as usize);
        let m1 = self.send_of(Side::Upper, c.upper_state, x);
        let m2 = self.send_of(Side::Lower, c.lower_state, y);
        let up = self.delta_of(Side::Upper, c.upper_state, x, m2);
        let low = self.delta_of(Side::Lower, c.lower_state, y, m1);
        match (up, low) {
            (Some((us, um)), Some((ls, lm))) => {
                let post = Configuration {
                    upper_state: us,
                    upper_pos: c.upper_pos + (um == Motion::Go) as u16,
                    lower_state: ls,
                    lower_pos: c.lower_pos - (lm == Motion::Go) as u16,
                };
                StepResult::Next(StepRecord {
                    pre: c,
                    post,
                    sent_upper: m1,
                    sent_lower: m2,
                    moves: (um, lm),
                })
            }
            _ => StepResult::Halt,
        }
    }

    fn halt_verdict(&self, c: Configuration) -> Verdict {
        let hit = self.upper.accepting[c.upper_state as usize]
            || self.lower.accepting[c.lower_state as usize];
        let accept = match self.spec.acceptance {
            AcceptanceMode::Normal => hit,
            AcceptanceMode::Complemented => !hit,
        };
        if accept {
            Verdict::Accepted
        } else {
            Verdict::Rejected
        }
    }

    /// Run to halt, loop, or step limit, recording every step. Loop
    /// detection is by full-configuration repetition, which is sound and
    /// complete for this deterministic read-only-input system.
    pub fn run(&self, input: &Input, step_limit: Option<usize>) -> Trace {
        let mut steps = Vec::new();
        let mut seen = HashSet::new();
        let mut cur = self.initial_configuration(input);
        seen.insert(cur);
        loop {
            match self.forward_step(input, cur) {
                StepResult::Halt => {
                    return Trace {
                        word: input.word.clone(),
                        steps,
                        verdict: self.halt_verdict(cur),
                        halt_config: cur,
                    };
                }
                StepResult::Next(rec) => {
                    if step_limit.is_some_and(|l| steps.len() >= l) {
                        return Trace {
                            word: input.word.clone(),
                            steps,
                            verdict: Verdict::StepLimit,
                            halt_config: cur,
                        };
                    }
                    steps.push(rec);
                    cur = rec.post;
                    if !seen.insert(cur) {
                        return Trace {
                            word: input.word.clone(),
                            steps,
                            verdict: Verdict::Loop,
                            halt_config: cur,
                        };
                    }
                }
            }
        }
    }

    /// Verdict without recording a trace. Non-halting runs are cut off by
    /// the pigeonhole bound `|Q1|*|Q2|*(n+2)^2` on distinct configurations.
    pub fn decide(&self, input: &Input) -> Verdict {
        let bound = self.upper.states.len()
            * self.lower.states.len()
            * (input.len() + 2)
            * (input.len() + 2)
            + 1;
        let mut cur = self.initial_configuration(input);
        for _ in 0..bound {
            match self.forward_step(input, cur) {
                StepResult::Halt => return self.halt_verdict(cur),
                StepResult::Next(rec) => cur = rec.post,
            }
        }
        Verdict::Loop
    }

    pub fn accepts(&self, word: &str) -> Result<bool, WordError> {
        Ok(self.decide(&self.input(word)?) == Verdict::Accepted)
    }

    pub fn states(&self, side: Side) -> &[String] {
        &self.comp(side).states
    }

    pub fn state_name(&self, side: Side, id: u16) -> &str {
        &self.comp(side).states[id as usize]
    }

    pub fn state_id(&self, side: Side, name: &str) -> Option<u16> {
        self.comp(side)
            .states
            .iter()
            .position(|s| s == name)
            .map(|i| i as u16)
    }

    pub fn sym_token(&self, id: u16) -> String {
        self.syms[id as usize].token()
    }

    pub fn tape_sym(&self, id: u16) -> &TapeSym {
        &self.syms[id as usize]
    }

    /// Message token for an id; `None` for the no-message id.
    pub fn message_token(&self, id: MsgId) -> Option<&str> {
        if id == MSG_BOT {
            None
        } else {
            Some(&self.msgs[id as usize])
        }
    }

    pub fn message_id(&self, msg: &Msg) -> Option<MsgId> {
        match msg {
            Msg::Bot => Some(MSG_BOT),
            Msg::Tok(t) => self
                .msgs
                .iter()
                .skip(1)
                .position(|m| m == t)
                .map(|i| (i + 1) as MsgId),
        }
    }

    /// Test helper: build a configuration from state names and positions.
    pub fn config(&self, upper: (&str, usize), lower: (&str, usize)) -> Option<Configuration> {
        Some(Configuration {
            upper_state: self.state_id(Side::Upper, upper.0)?,
            upper_pos: upper.1 as u16,
            lower_state: self.state_id(Side::Lower, lower.0)?,
            lower_pos: lower.1 as u16,
        })
    }

    /// Render a configuration as `state,pos|state,pos`.
    pub fn fmt_config(&self, c: &Configuration) -> String {
        format!(
            "{},{}|{},{}",
            self.state_name(Side::Upper, c.upper_state),
            c.upper_pos,
            self.state_name(Side::Lower, c.lower_state),
            c.lower_pos
        )
    }
}

/// Convenience builder for constructing machine specs in code.
#[derive(Debug, Clone)]
pub struct SpecBuilder {
    spec: MachineSpec,
}

impl SpecBuilder {
    pub fn new(name: &str) -> Self {
        SpecBuilder {
            spec: MachineSpec {
                name: name.to_string(),
                input_alphabet: Vec::new(),
                message_alphabet: Vec::new(),
                upper: ComponentSpec::default(),
                lower: ComponentSpec::default(),
                acceptance: AcceptanceMode::Normal,
            },
        }
    }

    pub fn alphabet(mut self, chars: &str) -> Self {
        self.spec.input_alphabet = chars.chars().collect();
        self
    }

    pub fn messages(mut self, toks: &[&str]) -> Self {
        self.spec.message_alphabet = toks.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn component(
        mut self,
        side: Side,
        states: &[&str],
        initial: &str,
        accepting: &[&str],
        send_default: SendDefault,
    ) -> Self {
        let c = ComponentSpec {
            states: states.iter().map(|s| s.to_string()).collect(),
            initial: initial.to_string(),
            accepting: accepting.iter().map(|s| s.to_string()).collect(),
            send_default,
            ..ComponentSpec::default()
        };
        match side {
            Side::Upper => self.spec.upper = c,
            Side::Lower => self.spec.lower = c,
        }
        self
    }

    fn comp_mut(&mut self, side: Side) -> &mut ComponentSpec {
        match side {
            Side::Upper => &mut self.spec.upper,
            Side::Lower => &mut self.spec.lower,
        }
    }

    pub fn step(mut self, side: Side, state: &str, sym: TapeSym, msg: Msg, next: &str, motion: Motion) -> Self {
        self.comp_mut(side).delta.push(DeltaRule {
            state: state.to_string(),
            sym,
            msg,
            next: next.to_string(),
            motion,
        });
        self
    }

    pub fn back(mut self, side: Side, state: &str, sym: TapeSym, msg: Msg, next: &str, motion: Motion) -> Self {
        let c = self.comp_mut(side);
        c.reverse_delta.get_or_insert_with(Vec::new).push(DeltaRule {
            state: state.to_string(),
            sym,
            msg,
            next: next.to_string(),
            motion,
        });
        self
    }

    pub fn send(mut self, side: Side, state: &str, sym: TapeSym, msg: Msg) -> Self {
        self.comp_mut(side).sends.push(SendRule {
            state: state.to_string(),
            sym,
            msg,
        });
        self
    }

    pub fn finish(self) -> MachineSpec {
        self.spec.canonicalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn an_bn() -> Machine {
        zoo::get("an_bn").unwrap().spec.unwrap().compile().unwrap()
    }

    #[test]
    fn an_bn_spec_is_valid() {
        let spec = zoo::get("an_bn").unwrap().spec.unwrap();
        assert!(spec.validate().is_valid());
    }

    #[test]
    fn endmarker_escape_is_flagged() {
        let spec = SpecBuilder::new("bad")
            .alphabet("a")
            .messages(&[])
            .component(Side::Upper, &["q", "r"], "q", &[], SendDefault::Bot)
            .component(Side::Lower, &["t"], "t", &[], SendDefault::Bot)
            .step(Side::Upper, "q", TapeSym::Rend, Msg::Bot, "r", Motion::Go)
            .finish();
        let report = spec.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("upper moves past right endmarker")));
    }

    #[test]
    fn duplicate_delta_key_is_forward_nondeterminism() {
        let spec = SpecBuilder::new("dup")
            .alphabet("a")
            .messages(&[])
            .component(Side::Upper, &["q", "r"], "q", &[], SendDefault::Bot)
            .component(Side::Lower, &["t"], "t", &[], SendDefault::Bot)
            .step(Side::Upper, "q", TapeSym::Sym('a'), Msg::Bot, "r", Motion::Go)
            .step(Side::Upper, "q", TapeSym::Sym('a'), Msg::Bot, "q", Motion::Stay)
            .finish();
        let report = spec.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("forward nondeterminism")));
    }

    #[test]
    fn initial_configuration_positions() {
        let m = an_bn();
        let i = m.input("aabb").unwrap();
        assert_eq!(
            m.initial_configuration(&i),
            m.config(("p0", 0), ("q0", 5)).unwrap()
        );
        let e = m.input("").unwrap();
        assert_eq!(
            m.initial_configuration(&e),
            m.config(("p0", 0), ("q0", 1)).unwrap()
        );
        assert_eq!(
            m.input("axb"),
            Err(WordError::UnknownSymbol { ch: 'x', index: 1 })
        );
    }

    #[test]
    fn forward_step_first_and_halt() {
        let m = an_bn();
        let i = m.input("aabb").unwrap();
        let c0 = m.initial_configuration(&i);
        match m.forward_step(&i, c0) {
            StepResult::Next(rec) => {
                assert_eq!(rec.post, m.config(("p1", 0), ("q1", 4)).unwrap());
                assert_eq!(m.message_token(rec.sent_upper), Some("LEND"));
                assert_eq!(m.message_token(rec.sent_lower), Some("REND"));
            }
            StepResult::Halt => panic!("expected a step"),
        }
        let h = m.config(("p5", 5), ("q5", 0)).unwrap();
        assert_eq!(m.forward_step(&i, h), StepResult::Halt);
    }

    #[test]
    fn forward_step_halts_on_mismatched_message() {
        let m = an_bn();
        let i = m.input("ba").unwrap();
        // Lower scans 'a' and echoes it; delta1(p1, LEND, a) is undefined.
        let c = m.config(("p1", 0), ("q1", 2)).unwrap();
        assert_eq!(m.forward_step(&i, c), StepResult::Halt);
    }

    #[test]
    fn golden_run_aabb() {
        let m = an_bn();
        let i = m.input("aabb").unwrap();
        let t = m.run(&i, None);
        assert_eq!(t.verdict, Verdict::Accepted);
        let want: Vec<Configuration> = [
            (("p0", 0), ("q0", 5)),
            (("p1", 0), ("q1", 4)),
            (("p2", 1), ("q2", 3)),
            (("p2", 2), ("q2", 2)),
            (("p3", 3), ("q3", 1)),
            (("p3", 4), ("q3", 0)),
            (("p4", 5), ("q4", 0)),
            (("p5", 5), ("q5", 0)),
        ]
        .iter()
        .map(|&(u, l)| m.config(u, l).unwrap())
        .collect();
        assert_eq!(t.configurations(), want);
        assert_eq!(t.steps.len(), 7);
    }

    #[test]
    fn run_ab_and_reject_aab() {
        let m = an_bn();
        let t = m.run(&m.input("ab").unwrap(), None);
        assert_eq!(t.verdict, Verdict::Accepted);
        assert_eq!(t.steps.len(), 5);
        assert_eq!(t.halt_config, m.config(("p5", 3), ("q5", 0)).unwrap());

        let t = m.run(&m.input("aab").unwrap(), None);
        assert_eq!(t.verdict, Verdict::Rejected);
        assert_eq!(t.halt_config, m.config(("p3", 2), ("q3", 1)).unwrap());
    }

    #[test]
    fn accepts_examples() {
        let m = an_bn();
        assert!(m.accepts("ab").unwrap());
        assert!(!m.accepts("").unwrap());
        assert!(!m.accepts("abab").unwrap());
    }

    #[test]
    fn loop_verdict_detected() {
        // Both components sit still forever: the initial configuration
        // repeats after one step.
        let spec = SpecBuilder::new("spin")
            .alphabet("a")
            .messages(&[])
            .component(Side::Upper, &["u"], "u", &[], SendDefault::Bot)
            .component(Side::Lower, &["l"], "l", &[], SendDefault::Bot)
            .step(Side::Upper, "u", TapeSym::Lend, Msg::Bot, "u", Motion::Stay)
            .step(Side::Lower, "l", TapeSym::Rend, Msg::Bot, "l", Motion::Stay)
            .finish();
        let m = spec.compile().unwrap();
        let t = m.run(&m.input("a").unwrap(), None);
        assert_eq!(t.verdict, Verdict::Loop);
        assert_eq!(m.decide(&m.input("a").unwrap()), Verdict::Loop);
    }

    #[test]
    fn step_limit_below_halt() {
        let m = an_bn();
        let i = m.input("aabb").unwrap();
        let t = m.run(&i, Some(3));
        assert_eq!(t.verdict, Verdict::StepLimit);
        assert_eq!(t.steps.len(), 3);
        // A limit equal to the full length still halts normally.
        let t = m.run(&i, Some(7));
        assert_eq!(t.verdict, Verdict::Accepted);
    }

    #[test]
    fn an_bn_always_echoes_its_scanned_symbol() {
        let m = an_bn();
        for w in ["ab", "aabb", "aab", "ba", "bbaa", ""] {
            let i = m.input(w).unwrap();
            for rec in m.run(&i, None).steps {
                let x = m.sym_token(i.sym_at(rec.pre.upper_pos as usize));
                let y = m.sym_token(i.sym_at(rec.pre.lower_pos as usize));
                assert_eq!(m.message_token(rec.sent_upper), Some(x.as_str()));
                assert_eq!(m.message_token(rec.sent_lower), Some(y.as_str()));
            }
        }
    }

    #[test]
    fn determinism_rerun_identical() {
        let m = an_bn();
        let i = m.input("aabbab").unwrap();
        let t1 = m.run(&i, None);
        let t2 = m.run(&i, None);
        assert_eq!(t1.configurations(), t2.configurations());
        assert_eq!(t1.verdict, t2.verdict);
    }
}
