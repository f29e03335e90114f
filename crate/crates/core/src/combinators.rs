//! Closure constructions: language reversal by component swap, and
//! complement as an acceptance-mode wrapper guarded by a halting
//! certificate.

use crate::model::{
    AcceptanceMode, ComponentSpec, Machine, MachineSpec, Msg, SendDefault, SendRule, TapeSym,
    Verdict,
};
use crate::oracle::words;
use thiserror::Error;

fn swap_ends(sym: &TapeSym) -> TapeSym {
    match sym {
        TapeSym::Lend => TapeSym::Rend,
        TapeSym::Rend => TapeSym::Lend,
        TapeSym::Sym(c) => TapeSym::Sym(*c),
    }
}

/// Re-key one component for the opposite role: endmarkers swap in every
/// scanned-symbol position while message values are carried verbatim, so
/// the component behaves on the mirrored tape exactly as before. Broadcast
/// values are pinned with explicit entries wherever the default would now
/// disagree (an echo default reads the swapped endmarker).
fn mirror_component(comp: &ComponentSpec, alphabet: &[char]) -> ComponentSpec {
    let mut out = comp.clone();

    let mut all_syms = vec![TapeSym::Lend, TapeSym::Rend];
    all_syms.extend(alphabet.iter().map(|&c| TapeSym::Sym(c)));

    let default_image = |d: SendDefault, sym: &TapeSym| match d {
        SendDefault::Bot => Msg::Bot,
        SendDefault::Echo => Msg::Tok(sym.token()),
    };

    out.sends = Vec::new();
    for state in &comp.states {
        for sym in &all_syms {
            let val = comp.effective_send(state, sym);
            let key = swap_ends(sym);
            if val != default_image(comp.send_default, &key) {
                out.sends.push(SendRule {
                    state: state.clone(),
                    sym: key,
                    msg: val,
                });
            }
        }
    }

    let explicit_reverse = comp.reverse_send_default.is_some() || !comp.reverse_sends.is_empty();
    out.reverse_sends = Vec::new();
    if explicit_reverse {
        let d = comp.reverse_send_default.unwrap_or_default();
        out.reverse_send_default = Some(d);
        for state in &comp.states {
            for sym in &all_syms {
                let val = comp.effective_reverse_send(state, sym);
                let key = swap_ends(sym);
                if val != default_image(d, &key) {
                    out.reverse_sends.push(SendRule {
                        state: state.clone(),
                        sym: key,
                        msg: val,
                    });
                }
            }
        }
    }

    out.delta = comp
        .delta
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.sym = swap_ends(&r.sym);
            r
        })
        .collect();
    out.reverse_delta = comp.reverse_delta.as_ref().map(|rd| {
        rd.iter()
            .map(|r| {
                let mut r = r.clone();
                r.sym = swap_ends(&r.sym);
                r
            })
            .collect()
    });
    out
}

/// Machine for the reversed language: components swap roles, endmarkers
/// swap in every rule key, accepting sets carry over. The former lower
/// component now starts at the left end and reads the word left to right,
/// which is the reversed word right to left.
pub fn reverse_language(spec: &MachineSpec) -> MachineSpec {
    MachineSpec {
        name: format!("{}_rev", spec.name),
        input_alphabet: spec.input_alphabet.clone(),
        message_alphabet: spec.message_alphabet.clone(),
        upper: mirror_component(&spec.lower, &spec.input_alphabet),
        lower: mirror_component(&spec.upper, &spec.input_alphabet),
        acceptance: spec.acceptance,
    }
    .canonicalized()
}

/// Evidence that every word up to `max_len` halts (no loop verdicts), which
/// makes the complement wrapper semantically exact at that bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltingCertificate {
    pub machine: String,
    pub max_len: usize,
    pub all_halt: bool,
}

/// Exhaustively check halting for all words up to `max_len`.
pub fn halting_certificate(m: &Machine, max_len: usize) -> HaltingCertificate {
    let all_halt = words(&m.spec().input_alphabet, max_len).all(|w| {
        let input = m.input(&w).expect("enumerated word is over the alphabet");
        !matches!(m.decide(&input), Verdict::Loop | Verdict::StepLimit)
    });
    HaltingCertificate {
        machine: m.name().to_string(),
        max_len,
        all_halt,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplementError {
    #[error("halting certificate is for machine '{cert}' but the spec is '{spec}'")]
    WrongMachine { cert: String, spec: String },
    #[error("halting certificate failed: some word of length <= {max_len} does not halt")]
    NotAllHalting { max_len: usize },
}

/// Complement by flipping the acceptance mode. The tables are untouched;
/// the simulator then accepts a halting configuration exactly when no
/// component's halting state is accepting. Requires a passing certificate,
/// since a looping word would be accepted by neither machine.
pub fn complement(
    spec: &MachineSpec,
    cert: &HaltingCertificate,
) -> Result<MachineSpec, ComplementError> {
    if cert.machine != spec.name {
        return Err(ComplementError::WrongMachine {
            cert: cert.machine.clone(),
            spec: spec.name.clone(),
        });
    }
    if !cert.all_halt {
        return Err(ComplementError::NotAllHalting {
            max_len: cert.max_len,
        });
    }
    let mut out = spec.clone();
    out.name = format!("{}_comp", spec.name);
    out.acceptance = match spec.acceptance {
        AcceptanceMode::Normal => AcceptanceMode::Complemented,
        AcceptanceMode::Complemented => AcceptanceMode::Normal,
    };
    Ok(out)
}
