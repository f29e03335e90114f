//! Backward operational semantics, bounded reversibility certification, and
//! automatic derivation of backward tables from forward ones.
//!
//! A backward step first moves a head to its candidate predecessor position
//! and then reads the symbol there, so backward tables are keyed on the
//! post-move symbol and the successor-side state. Candidate retreat amounts
//! are not known up front; we try all in-range combinations and demand that
//! exactly one is consistent with both backward tables.

use crate::model::{
    Configuration, DeltaRule, Input, Machine, MachineSpec, Motion, Msg, MsgId, Side, TapeSym,
    Verdict,
};
use crate::oracle::words;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// One performed backward step: the unique predecessor plus the messages the
/// reverse broadcast functions emitted while finding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackStep {
    pub predecessor: Configuration,
    pub sent_upper: MsgId,
    pub sent_lower: MsgId,
    pub moves: (Motion, Motion),
}

/// Outcome of one backward step attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackResult {
    Prev(BackStep),
    NoPredecessor,
    /// Two or more distinct candidate predecessors were consistent.
    Ambiguous(Vec<Configuration>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ReverseError {
    #[error("machine has no reverse tables (forward-only)")]
    MissingReverseTables,
}

/// Enumerate candidate retreats (upper left by 0/1, lower right by 0/1),
/// read the post-move symbols, compute the reverse broadcasts, and keep the
/// candidates on which both backward transitions are defined with matching
/// directions.
pub fn backward_step(
    m: &Machine,
    input: &Input,
    c: Configuration,
) -> Result<BackResult, ReverseError> {
    if !m.has_reverse() {
        return Err(ReverseError::MissingReverseTables);
    }
    let last = (input.len() + 1) as u16;
    assert!(c.upper_pos <= last && c.lower_pos <= last, "head position out of range");
    let mut hits: Vec<BackStep> = Vec::new();
    for du in 0..=1u16 {
        if du > c.upper_pos {
            continue;
        }
        let up = c.upper_pos - du;
        let x = input.sym_at(up as usize);
        for dl in 0..=1u16 {
            if c.lower_pos + dl > last {
                continue;
            }
            let lp = c.lower_pos + dl;
            let y = input.sym_at(lp as usize);
            let m1 = m.rsend_of(Side::Upper, c.upper_state, x);
            let m2 = m.rsend_of(Side::Lower, c.lower_state, y);
            let ur = m.rdelta_of(Side::Upper, c.upper_state, x, m2).unwrap();
            let lr = m.rdelta_of(Side::Lower, c.lower_state, y, m1).unwrap();
            let (Some((us, um)), Some((ls, lm))) = (ur, lr) else {
                continue;
            };
            if (um == Motion::Go) as u16 != du || (lm == Motion::Go) as u16 != dl {
                continue;
            }
            hits.push(BackStep {
                predecessor: Configuration {
                    upper_state: us,
                    upper_pos: up,
                    lower_state: ls,
                    lower_pos: lp,
                },
                sent_upper: m1,
                sent_lower: m2,
                moves: (um, lm),
            });
        }
    }
    Ok(match hits.len() {
        0 => BackResult::NoPredecessor,
        1 => BackResult::Prev(hits[0]),
        _ => BackResult::Ambiguous(hits.iter().map(|h| h.predecessor).collect()),
    })
}

/// Why a run failed to invert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InversionFailure {
    /// Backward from `at` offered several predecessors.
    Ambiguous {
        at: Configuration,
        candidates: Vec<Configuration>,
    },
    /// Backward from `at` found no predecessor although the forward run
    /// reached it by a step.
    Stuck { at: Configuration },
    /// Backward from `at` returned a different predecessor than the forward
    /// step that produced it.
    WrongPredecessor {
        at: Configuration,
        expected: Configuration,
        got: Configuration,
    },
    /// The initial configuration itself has a predecessor.
    SpuriousInitialPredecessor { got: Configuration },
}

/// Result of checking one word's run against its backward replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InversionOutcome {
    Inverts,
    Fails(InversionFailure),
}

impl InversionOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, InversionOutcome::Inverts)
    }
}

/// Check that backward stepping from the run's last configuration reproduces
/// the forward trace exactly in reverse, and that nothing precedes the
/// initial configuration. Because consecutive step records chain, walking
/// the records backwards is the same walk. Runs ending in a loop skip the
/// initial-configuration check (a closed cycle legitimately re-enters it).
pub fn verify_inversion(m: &Machine, input: &Input) -> Result<InversionOutcome, ReverseError> {
    let trace = m.run(input, None);
    for rec in trace.steps.iter().rev() {
        match backward_step(m, input, rec.post)? {
            BackResult::Prev(b) if b.predecessor == rec.pre => {}
            BackResult::Prev(b) => {
                return Ok(InversionOutcome::Fails(InversionFailure::WrongPredecessor {
                    at: rec.post,
                    expected: rec.pre,
                    got: b.predecessor,
                }))
            }
            BackResult::NoPredecessor => {
                return Ok(InversionOutcome::Fails(InversionFailure::Stuck { at: rec.post }))
            }
            BackResult::Ambiguous(cands) => {
                return Ok(InversionOutcome::Fails(InversionFailure::Ambiguous {
                    at: rec.post,
                    candidates: cands,
                }))
            }
        }
    }
    if trace.verdict != Verdict::Loop {
        let init = m.initial_configuration(input);
        match backward_step(m, input, init)? {
            BackResult::NoPredecessor => {}
            BackResult::Prev(b) => {
                return Ok(InversionOutcome::Fails(
                    InversionFailure::SpuriousInitialPredecessor { got: b.predecessor },
                ))
            }
            BackResult::Ambiguous(cands) => {
                return Ok(InversionOutcome::Fails(InversionFailure::Ambiguous {
                    at: init,
                    candidates: cands,
                }))
            }
        }
    }
    Ok(InversionOutcome::Inverts)
}

/// A witnessed backward replay of a halted run, oldest step last.
#[derive(Debug, Clone)]
pub struct Replay {
    pub word: String,
    /// Backward steps in the order they were taken (from the halt
    /// configuration towards the initial one).
    pub steps: Vec<BackStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Reverse(#[from] ReverseError),
    #[error("run does not invert")]
    NotInvertible,
}

/// Run forward, then step backward from the halt configuration all the way
/// to the initial configuration, recording the reverse broadcasts.
pub fn backward_replay(m: &Machine, input: &Input) -> Result<Replay, ReplayError> {
    let trace = m.run(input, None);
    let mut steps = Vec::with_capacity(trace.steps.len());
    for rec in trace.steps.iter().rev() {
        match backward_step(m, input, rec.post)? {
            BackResult::Prev(b) if b.predecessor == rec.pre => steps.push(b),
            _ => return Err(ReplayError::NotInvertible),
        }
    }
    Ok(Replay {
        word: input.word.clone(),
        steps,
    })
}

/// A reproducible reversibility failure: the word plus what went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureWitness {
    pub word: String,
    pub failure: InversionFailure,
}

/// Verdict of bounded certification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertVerdict {
    CertifiedUpTo(usize),
    Fails(FailureWitness),
}

/// Outcome of [`certify_bounded`], with work counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibilityReport {
    pub verdict: CertVerdict,
    pub words_checked: usize,
    pub configurations_checked: usize,
}

impl ReversibilityReport {
    pub fn certified(&self) -> bool {
        matches!(self.verdict, CertVerdict::CertifiedUpTo(_))
    }
}

/// For every word over the input alphabet up to `max_len`, run to
/// halt or loop and check that the whole run inverts uniquely. The first
/// failing word in enumeration order becomes the witness.
pub fn certify_bounded(m: &Machine, max_len: usize) -> Result<ReversibilityReport, ReverseError> {
    if !m.has_reverse() {
        return Err(ReverseError::MissingReverseTables);
    }
    let mut words_checked = 0;
    let mut configurations_checked = 0;
    for word in words(&m.spec().input_alphabet, max_len) {
        let input = m.input(&word).expect("enumerated word is over the alphabet");
        words_checked += 1;
        configurations_checked += m.run(&input, None).steps.len() + 1;
        match verify_inversion(m, &input)? {
            InversionOutcome::Inverts => {}
            InversionOutcome::Fails(failure) => {
                return Ok(ReversibilityReport {
                    verdict: CertVerdict::Fails(FailureWitness { word, failure }),
                    words_checked,
                    configurations_checked,
                });
            }
        }
    }
    Ok(ReversibilityReport {
        verdict: CertVerdict::CertifiedUpTo(max_len),
        words_checked,
        configurations_checked,
    })
}

/// Options for [`derive_reverse`]: how much of the word space to close over
/// when pairing co-firing rules, plus explicit witness words for machines
/// whose deeper rules only fire on long inputs.
#[derive(Debug, Clone)]
pub struct DeriveOptions {
    pub max_word_len: usize,
    pub witnesses: Vec<String>,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions {
            max_word_len: 8,
            witnesses: Vec::new(),
        }
    }
}

/// Backward tables produced by [`derive_reverse`], in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedTables {
    pub upper: Vec<DeltaRule>,
    pub lower: Vec<DeltaRule>,
}

impl DerivedTables {
    /// Install the tables on a copy of the spec. Reverse broadcasts stay
    /// inherited from the forward ones.
    pub fn apply_to(&self, spec: &MachineSpec) -> MachineSpec {
        let mut out = spec.clone();
        out.upper.reverse_delta = Some(self.upper.clone());
        out.lower.reverse_delta = Some(self.lower.clone());
        out.canonicalized()
    }
}

/// Two observed steps demanded different values for the same backward key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeriveConflict {
    pub side: Side,
    pub state: String,
    pub sym: TapeSym,
    pub msg: Msg,
    pub first: (String, Motion),
    pub first_source: String,
    pub second: (String, Motion),
    pub second_source: String,
}

impl fmt::Display for DeriveConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} back key ({} {} / {}): ({}, {:?}) from [{}] vs ({}, {:?}) from [{}]",
            self.side.label(),
            self.state,
            self.sym,
            self.msg,
            self.first.0,
            self.first.1,
            self.first_source,
            self.second.0,
            self.second.1,
            self.second_source,
        )
    }
}

/// The forward tables are not backward deterministic; lists every key clash
/// with the two forward rules that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    pub conflicts: Vec<DeriveConflict>,
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conflicts {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Derive backward tables from the forward ones by inverting every step
/// observed on words up to `opts.max_word_len` plus the witness words: a
/// step from `pre` to `post` contributes, for each component, the entry
/// keyed on (successor state, reread symbol, the other side's reverse
/// broadcast) mapping back to the predecessor state with the flipped
/// motion. Key clashes with different values are reported as conflicts.
pub fn derive_reverse(
    spec: &MachineSpec,
    opts: &DeriveOptions,
) -> Result<DerivedTables, ConflictReport> {
    let forward_only = {
        let mut s = spec.clone();
        s.upper.reverse_delta = None;
        s.lower.reverse_delta = None;
        s
    };
    let m = forward_only
        .compile()
        .expect("derive_reverse requires a valid forward spec");

    // (side, post_state, sym, msg) -> (pre_state, motion, source rule text)
    type BackKey = (u8, u16, u16, MsgId);
    type BackVal = (u16, Motion, String);
    let mut table: BTreeMap<BackKey, BackVal> = BTreeMap::new();
    let mut conflicts = Vec::new();

    let mut word_list: Vec<String> = words(&spec.input_alphabet, opts.max_word_len).collect();
    word_list.extend(opts.witnesses.iter().cloned());

    for word in &word_list {
        let Ok(input) = m.input(word) else { continue };
        let trace = m.run(&input, None);
        for rec in &trace.steps {
            let x = input.sym_at(rec.pre.upper_pos as usize);
            let y = input.sym_at(rec.pre.lower_pos as usize);
            let m1r = m.rsend_of(Side::Upper, rec.post.upper_state, x);
            let m2r = m.rsend_of(Side::Lower, rec.post.lower_state, y);
            let entries = [
                (
                    Side::Upper,
                    rec.post.upper_state,
                    x,
                    m2r,
                    rec.pre.upper_state,
                    rec.moves.0,
                    describe_rule(&m, Side::Upper, rec.pre.upper_state, x, rec.sent_lower),
                ),
                (
                    Side::Lower,
                    rec.post.lower_state,
                    y,
                    m1r,
                    rec.pre.lower_state,
                    rec.moves.1,
                    describe_rule(&m, Side::Lower, rec.pre.lower_state, y, rec.sent_upper),
                ),
            ];
            for (side, post_state, sym, msg, pre_state, motion, source) in entries {
                let side_id = match side {
                    Side::Upper => 0u8,
                    Side::Lower => 1u8,
                };
                let key = (side_id, post_state, sym, msg);
                match table.get(&key) {
                    None => {
                        table.insert(key, (pre_state, motion, source));
                    }
                    Some((s0, mo0, src0)) => {
                        if (*s0, *mo0) != (pre_state, motion) {
                            let c = DeriveConflict {
                                side,
                                state: m.state_name(side, post_state).to_string(),
                                sym: *m.tape_sym(sym),
                                msg: msg_of(&m, msg),
                                first: (m.state_name(side, *s0).to_string(), *mo0),
                                first_source: src0.clone(),
                                second: (m.state_name(side, pre_state).to_string(), motion),
                                second_source: source,
                            };
                            if !conflicts.contains(&c) {
                                conflicts.push(c);
                            }
                        }
                    }
                }
            }
        }
    }

    if !conflicts.is_empty() {
        return Err(ConflictReport { conflicts });
    }

    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for ((side_id, state, sym, msg), (pre, motion, _)) in &table {
        let side = if *side_id == 0 { Side::Upper } else { Side::Lower };
        let rule = DeltaRule {
            state: m.state_name(side, *state).to_string(),
            sym: *m.tape_sym(*sym),
            msg: msg_of(&m, *msg),
            next: m.state_name(side, *pre).to_string(),
            motion: *motion,
        };
        if *side_id == 0 {
            upper.push(rule);
        } else {
            lower.push(rule);
        }
    }
    upper.sort_by_key(|r| (r.state.clone(), r.sym.token(), r.msg.token()));
    lower.sort_by_key(|r| (r.state.clone(), r.sym.token(), r.msg.token()));
    Ok(DerivedTables { upper, lower })
}

fn msg_of(m: &Machine, id: MsgId) -> Msg {
    match m.message_token(id) {
        None => Msg::Bot,
        Some(t) => Msg::Tok(t.to_string()),
    }
}

fn describe_rule(m: &Machine, side: Side, state: u16, sym: u16, recv: MsgId) -> String {
    format!(
        "{} step: {} {} / {}",
        side.label(),
        m.state_name(side, state),
        m.sym_token(sym),
        m.message_token(recv).unwrap_or("NONE"),
    )
}
