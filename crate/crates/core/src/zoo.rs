//! Catalog of concrete machines and reference membership predicates for the
//! witness languages, plus word generators for their parameterized members.
//!
//! Every entry that carries a machine is validated against its predicate by
//! bounded enumeration (see the crate's integration tests), and every entry
//! flagged reversible certifies at the documented bound. Only `an_bn` ships
//! hand-written backward tables; the other machines derive theirs from the
//! forward tables at catalog construction time, which keeps them honest by
//! construction.

use crate::combinators::reverse_language;
use crate::comm::BoundKind;
use crate::model::{
    MachineSpec, Motion::Go, Motion::Stay, Msg, SendDefault, Side::Lower, Side::Upper,
    SpecBuilder, TapeSym,
};
use crate::reverse::{derive_reverse, DeriveOptions};
use std::sync::OnceLock;
use thiserror::Error;

const L: TapeSym = TapeSym::Lend;
const R: TapeSym = TapeSym::Rend;

fn s(c: char) -> TapeSym {
    TapeSym::Sym(c)
}

fn t(tok: &str) -> Msg {
    Msg::tok(tok)
}

const B: Msg = Msg::Bot;

/// One catalog entry: the optional machine, the pure membership predicate
/// (the oracle side), and its documented properties.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub spec: Option<MachineSpec>,
    pub predicate: fn(&str) -> bool,
    /// Expected communication growth on accepted words; `None` for
    /// predicate-only entries.
    pub claimed_comm_class: Option<BoundKind>,
    pub reversible: bool,
    /// Bound for exhaustive machine-vs-predicate equivalence.
    pub equiv_len: usize,
    /// Bound at which reversibility certification is checked.
    pub rev_len: usize,
    pub provenance: &'static str,
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error("unknown zoo entry '{0}'")]
    Unknown(String),
}

/// The full catalog in stable order.
pub fn list() -> &'static [ZooEntry] {
    static CATALOG: OnceLock<Vec<ZooEntry>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

/// Look up one entry by name.
pub fn get(name: &str) -> Result<ZooEntry, ZooError> {
    list()
        .iter()
        .find(|e| e.name == name)
        .cloned()
        .ok_or_else(|| ZooError::Unknown(name.to_string()))
}

/// Evaluate the pure membership predicate, not the machine.
pub fn membership(name: &str, word: &str) -> Result<bool, ZooError> {
    let e = list()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| ZooError::Unknown(name.to_string()))?;
    Ok((e.predicate)(word))
}

// ---------------------------------------------------------------- words --

pub fn an_bn_word(n: usize) -> String {
    format!("{}{}", "a".repeat(n), "b".repeat(n))
}

pub fn l_lin_word(w: &str) -> String {
    let rev: String = w.chars().rev().collect();
    format!("{w}c{rev}")
}

pub fn w_dollar_word(w: &str) -> String {
    let rev: String = w.chars().rev().collect();
    format!("{w}${rev}${}", "a".repeat(w.chars().count()))
}

/// Block word with doubling lengths: `a^1 b a^4 b ... b a^(4^m) c` followed
/// by the mirrored odd-exponent blocks. Accepted length is `2^(2m+2) + 2m`.
pub fn l_expo_word(m: usize) -> String {
    assert!(m >= 1);
    let mut out = String::new();
    for k in 0..=m {
        out.push_str(&"a".repeat(1 << (2 * k)));
        out.push(if k < m { 'b' } else { 'c' });
    }
    for k in (0..=m).rev() {
        out.push_str(&"a".repeat(1 << (2 * k + 1)));
        if k > 0 {
            out.push('b');
        }
    }
    out
}

/// The bit-decorated variant: separators carry bits that must mirror around
/// the center. `bits` supplies x_1..x_m, so `m = bits.len() >= 1`.
#[allow(clippy::needless_range_loop)] // block length and bit share the index
pub fn l_expo_hat_word(bits: &[u8]) -> String {
    let m = bits.len();
    assert!(m >= 1);
    let bit = |b: u8| if b == 0 { '0' } else { '1' };
    let mut out = String::new();
    for k in 0..=m {
        out.push_str(&"a".repeat(1 << (2 * k)));
        out.push(if k < m { bit(bits[k]) } else { 'c' });
    }
    for k in (0..=m).rev() {
        out.push_str(&"a".repeat(1 << (2 * k + 1)));
        if k > 0 {
            out.push(bit(bits[k - 1]));
        }
    }
    out
}

/// Arithmetic-block variant: `a^(4k+1)` blocks up to the center, `a^(4k+3)`
/// blocks after it, bit separators mirrored. `m = bits.len() >= 0`.
#[allow(clippy::needless_range_loop)] // block length and bit share the index
pub fn l_poly_hat_word(bits: &[u8]) -> String {
    let m = bits.len();
    let bit = |b: u8| if b == 0 { '0' } else { '1' };
    let mut out = String::new();
    for k in 0..=m {
        out.push_str(&"a".repeat(4 * k + 1));
        out.push(if k < m { bit(bits[k]) } else { 'c' });
    }
    for k in (0..=m).rev() {
        out.push_str(&"a".repeat(4 * k + 3));
        if k > 0 {
            out.push(bit(bits[k - 1]));
        }
    }
    out
}

// ----------------------------------------------------------- predicates --

fn over(word: &str, alphabet: &str) -> bool {
    word.chars().all(|c| alphabet.contains(c))
}

fn pred_an_bn(w: &str) -> bool {
    let n = w.chars().take_while(|&c| c == 'a').count();
    n >= 1 && w.len() == 2 * n && w[n..].chars().all(|c| c == 'b')
}

fn pred_w_dollar(w: &str) -> bool {
    if !over(w, "ab$") {
        return false;
    }
    let parts: Vec<&str> = w.split('$').collect();
    if parts.len() != 3 {
        return false;
    }
    let (u, v, tail) = (parts[0], parts[1], parts[2]);
    over(u, "ab")
        && v == u.chars().rev().collect::<String>()
        && tail.len() == u.len()
        && tail.chars().all(|c| c == 'a')
}

fn pred_prefix_abb(w: &str) -> bool {
    if !over(w, "ab") {
        return false;
    }
    let rest = w.trim_start_matches('a');
    rest.len() >= 2 && rest.starts_with("bb")
}

fn pred_suffix_bba(w: &str) -> bool {
    let rev: String = w.chars().rev().collect();
    pred_prefix_abb(&rev)
}

fn pred_l_lin(w: &str) -> bool {
    if !over(w, "01c") || w.chars().filter(|&c| c == 'c').count() != 1 {
        return false;
    }
    let mid = w.find('c').unwrap();
    let (u, v) = (&w[..mid], &w[mid + 1..]);
    v == u.chars().rev().collect::<String>()
}

/// Split into maximal a-run lengths and the single non-'a' separators
/// between them; `runs.len() == seps.len() + 1` always.
fn runs_and_seps(w: &str) -> (Vec<usize>, Vec<char>) {
    let mut runs = Vec::new();
    let mut seps = Vec::new();
    let mut cur = 0usize;
    for ch in w.chars() {
        if ch == 'a' {
            cur += 1;
        } else {
            runs.push(cur);
            seps.push(ch);
            cur = 0;
        }
    }
    runs.push(cur);
    (runs, seps)
}

#[allow(clippy::needless_range_loop)] // run index feeds the length formulas
fn block_word_shape(
    w: &str,
    alphabet: &str,
    min_m: usize,
    bits: bool,
    up_len: fn(usize) -> usize,
    low_len: fn(usize) -> usize,
) -> bool {
    if !over(w, alphabet) {
        return false;
    }
    let (runs, seps) = runs_and_seps(w);
    if seps.len() % 2 != 1 {
        return false;
    }
    let m = seps.len() / 2;
    if m < min_m || seps[m] != 'c' {
        return false;
    }
    for (i, &sep) in seps.iter().enumerate() {
        if i == m {
            continue;
        }
        let ok = if bits { sep == '0' || sep == '1' } else { sep == 'b' };
        if !ok {
            return false;
        }
    }
    // Separator layout mirrors around the center.
    if bits && !seps.iter().eq(seps.iter().rev()) {
        return false;
    }
    if runs.len() != 2 * m + 2 {
        return false;
    }
    for k in 0..=m {
        if runs[k] != up_len(k) {
            return false;
        }
    }
    for j in 0..=m {
        if runs[m + 1 + j] != low_len(m - j) {
            return false;
        }
    }
    true
}

fn pred_l_expo(w: &str) -> bool {
    block_word_shape(w, "abc", 1, false, |k| 1 << (2 * k), |k| 1 << (2 * k + 1))
}

fn pred_l_expo_hat(w: &str) -> bool {
    block_word_shape(w, "a01c", 1, true, |k| 1 << (2 * k), |k| 1 << (2 * k + 1))
}

fn pred_l_poly_hat(w: &str) -> bool {
    block_word_shape(w, "a01c", 0, true, |k| 4 * k + 1, |k| 4 * k + 3)
}

fn pred_l_empty(w: &str) -> bool {
    if !over(w, "ab") {
        return false;
    }
    let r = w.trim_start_matches('a').trim_end_matches('a');
    r.len() >= 2 && r.chars().all(|c| c == 'b')
}

fn pred_l_i_template(w: &str) -> bool {
    if !over(w, "ab") {
        return false;
    }
    let r = w.trim_start_matches('a').trim_end_matches('a');
    if r.len() < 2 || !r.starts_with('b') || !r.ends_with('b') {
        return false;
    }
    let v = &r[1..r.len() - 1];
    v.chars().all(|c| c == 'b') || (v.len() >= 2 && v.starts_with('b') && v.ends_with('b'))
}

// ------------------------------------------------------------- machines --

/// The worked counting machine, with its explicit backward tables. The
/// upper backward row for (p4, b) carries message LEND: at the only step it
/// inverts, the lower component rests on the left endmarker and echoes it,
/// so a REND message there would never match and backward replay would
/// strand at p4.
fn an_bn_spec() -> MachineSpec {
    SpecBuilder::new("an_bn")
        .alphabet("ab")
        .messages(&["a", "b", "LEND", "REND"])
        .component(Upper, &["p0", "p1", "p2", "p3", "p4", "p5"], "p0", &["p5"], SendDefault::Echo)
        .component(Lower, &["q0", "q1", "q2", "q3", "q4", "q5"], "q0", &[], SendDefault::Echo)
        .step(Upper, "p0", L, t("REND"), "p1", Stay)
        .step(Upper, "p1", L, t("b"), "p2", Go)
        .step(Upper, "p2", s('a'), t("b"), "p2", Go)
        .step(Upper, "p2", s('a'), t("a"), "p3", Go)
        .step(Upper, "p3", s('b'), t("a"), "p3", Go)
        .step(Upper, "p3", s('b'), t("LEND"), "p4", Go)
        .step(Upper, "p4", R, t("LEND"), "p5", Stay)
        .back(Upper, "p1", L, t("REND"), "p0", Stay)
        .back(Upper, "p2", L, t("b"), "p1", Go)
        .back(Upper, "p2", s('a'), t("b"), "p2", Go)
        .back(Upper, "p3", s('a'), t("a"), "p2", Go)
        .back(Upper, "p3", s('b'), t("a"), "p3", Go)
        .back(Upper, "p4", s('b'), t("LEND"), "p3", Go)
        .back(Upper, "p5", R, t("LEND"), "p4", Stay)
        .step(Lower, "q0", R, t("LEND"), "q1", Go)
        .step(Lower, "q1", s('b'), t("LEND"), "q2", Go)
        .step(Lower, "q2", s('b'), t("a"), "q2", Go)
        .step(Lower, "q2", s('a'), t("a"), "q3", Go)
        .step(Lower, "q3", s('a'), t("b"), "q3", Go)
        .step(Lower, "q3", L, t("b"), "q4", Stay)
        .step(Lower, "q4", L, t("REND"), "q5", Stay)
        .back(Lower, "q1", R, t("LEND"), "q0", Go)
        .back(Lower, "q2", s('b'), t("LEND"), "q1", Go)
        .back(Lower, "q2", s('b'), t("a"), "q2", Go)
        .back(Lower, "q3", s('a'), t("a"), "q2", Go)
        .back(Lower, "q3", s('a'), t("b"), "q3", Go)
        .back(Lower, "q4", L, t("b"), "q3", Stay)
        .back(Lower, "q5", L, t("REND"), "q4", Stay)
        .finish()
}

/// Both components sweep towards the middle marker, comparing echoed
/// symbols every step; the lower then sweeps out alone to rule out a second
/// marker and announces the left endmarker.
fn l_lin_forward() -> MachineSpec {
    SpecBuilder::new("l_lin")
        .alphabet("01c")
        .messages(&["0", "1", "c", "LEND", "REND"])
        .component(Upper, &["u0", "u1", "u2", "u3"], "u0", &[], SendDefault::Echo)
        .component(Lower, &["d0", "d1", "d2", "d3"], "d0", &["d3"], SendDefault::Echo)
        .step(Upper, "u0", L, t("REND"), "u1", Go)
        .step(Upper, "u1", s('0'), t("0"), "u1", Go)
        .step(Upper, "u1", s('1'), t("1"), "u1", Go)
        .step(Upper, "u1", s('c'), t("c"), "u2", Stay)
        .step(Upper, "u2", s('c'), t("0"), "u2", Stay)
        .step(Upper, "u2", s('c'), t("1"), "u2", Stay)
        .step(Upper, "u2", s('c'), t("LEND"), "u3", Stay)
        .step(Lower, "d0", R, t("LEND"), "d1", Go)
        .step(Lower, "d1", s('0'), t("0"), "d1", Go)
        .step(Lower, "d1", s('1'), t("1"), "d1", Go)
        .step(Lower, "d1", s('c'), t("c"), "d2", Go)
        .step(Lower, "d2", s('0'), t("c"), "d2", Go)
        .step(Lower, "d2", s('1'), t("c"), "d2", Go)
        .step(Lower, "d2", L, t("c"), "d3", Stay)
        .finish()
}

/// The upper waits on the left endmarker while the lower crosses the
/// a-block; both then sweep and compare the mirrored halves; the upper
/// re-crosses to the second marker while the lower waits; both sweep out,
/// and the endmarkers must be reached in the same step.
fn w_dollar_forward() -> MachineSpec {
    SpecBuilder::new("w_dollar")
        .alphabet("ab$")
        .messages(&["a", "b", "$", "LEND"])
        .component(Upper, &["u0", "uc", "u2", "u3", "uacc"], "u0", &["uacc"], SendDefault::Bot)
        .component(Lower, &["d0", "da", "dc", "dwait", "d3", "dfin"], "d0", &[], SendDefault::Bot)
        .send(Upper, "uc", s('a'), t("a"))
        .send(Upper, "uc", s('b'), t("b"))
        .send(Upper, "uc", s('$'), t("$"))
        .send(Upper, "u2", s('$'), t("$"))
        .send(Lower, "da", s('$'), t("$"))
        .send(Lower, "dc", s('a'), t("a"))
        .send(Lower, "dc", s('b'), t("b"))
        .send(Lower, "dc", s('$'), t("$"))
        .send(Lower, "d3", L, t("LEND"))
        .step(Upper, "u0", L, B, "u0", Stay)
        .step(Upper, "u0", L, t("$"), "uc", Go)
        .step(Upper, "uc", s('a'), t("a"), "uc", Go)
        .step(Upper, "uc", s('b'), t("b"), "uc", Go)
        .step(Upper, "uc", s('$'), t("$"), "u2", Go)
        .step(Upper, "u2", s('a'), B, "u2", Go)
        .step(Upper, "u2", s('b'), B, "u2", Go)
        .step(Upper, "u2", s('$'), B, "u3", Go)
        .step(Upper, "u3", s('a'), B, "u3", Go)
        .step(Upper, "u3", R, t("LEND"), "uacc", Stay)
        .step(Lower, "d0", R, B, "da", Go)
        .step(Lower, "da", s('a'), B, "da", Go)
        .step(Lower, "da", s('$'), B, "dc", Go)
        .step(Lower, "dc", s('a'), t("a"), "dc", Go)
        .step(Lower, "dc", s('b'), t("b"), "dc", Go)
        .step(Lower, "dc", s('$'), t("$"), "dwait", Stay)
        .step(Lower, "dwait", s('$'), B, "dwait", Stay)
        .step(Lower, "dwait", s('$'), t("$"), "d3", Go)
        .step(Lower, "d3", s('a'), B, "d3", Go)
        .step(Lower, "d3", s('b'), B, "d3", Go)
        .step(Lower, "d3", L, B, "dfin", Stay)
        .finish()
}

/// The upper component alone scans for an `a* b b` prefix and halts in an
/// accepting sink; the lower idles silently on the right endmarker, so the
/// whole system halts as soon as the upper does.
fn prefix_abb_forward() -> MachineSpec {
    SpecBuilder::new("prefix_abb")
        .alphabet("ab")
        .messages(&[])
        .component(Upper, &["s0", "s1", "s2", "s3"], "s0", &["s3"], SendDefault::Bot)
        .component(Lower, &["t0"], "t0", &[], SendDefault::Bot)
        .step(Upper, "s0", L, B, "s1", Go)
        .step(Upper, "s1", s('a'), B, "s1", Go)
        .step(Upper, "s1", s('b'), B, "s2", Go)
        .step(Upper, "s2", s('b'), B, "s3", Go)
        .step(Lower, "t0", R, B, "t0", Stay)
        .finish()
}

/// Doubling-block comparisons: the upper crosses its blocks at half speed
/// while the lower crosses the twice-as-long opposite blocks at full speed,
/// so milestones land in the same step. The lower announces each milestone;
/// the upper is silent except for one resume signal after the center. The
/// (ubm, c) broadcast never fires forward on accepted words; it
/// disambiguates rewinding the lower's center wait.
fn l_expo_forward() -> MachineSpec {
    SpecBuilder::new("l_expo")
        .alphabet("abc")
        .messages(&["b", "c", "LEND"])
        .component(
            Upper,
            &["u0", "u1s", "u1m", "ubm", "u2s", "u2m", "uend", "uend2", "uacc"],
            "u0",
            &["uacc"],
            SendDefault::Bot,
        )
        .component(Lower, &["d0", "d1", "dw", "d2", "dfin"], "d0", &[], SendDefault::Bot)
        .send(Upper, "ubm", s('b'), t("b"))
        .send(Upper, "ubm", s('c'), t("c"))
        .send(Lower, "d1", s('b'), t("b"))
        .send(Lower, "d1", s('c'), t("c"))
        .send(Lower, "d2", s('b'), t("b"))
        .send(Lower, "d2", L, t("LEND"))
        .step(Upper, "u0", L, B, "u1s", Go)
        .step(Upper, "u1s", s('a'), B, "u1m", Stay)
        .step(Upper, "u1m", s('a'), B, "u1s", Go)
        .step(Upper, "u1s", s('b'), t("b"), "u1s", Go)
        .step(Upper, "u1s", s('c'), t("c"), "ubm", Go)
        .step(Upper, "ubm", s('a'), B, "ubm", Go)
        .step(Upper, "ubm", s('b'), B, "u2s", Go)
        .step(Upper, "u2s", s('a'), B, "u2m", Stay)
        .step(Upper, "u2m", s('a'), B, "u2s", Go)
        .step(Upper, "u2s", s('b'), t("b"), "u2s", Go)
        .step(Upper, "u2s", R, t("b"), "uend", Stay)
        // The end wait is a counted two-state chain, not a loop: it admits
        // exactly one silent step, which pins the leftmost block to a single
        // symbol and thereby anchors the whole doubling cascade.
        .step(Upper, "uend", R, B, "uend2", Stay)
        .step(Upper, "uend2", R, t("LEND"), "uacc", Stay)
        .step(Lower, "d0", R, B, "d1", Go)
        .step(Lower, "d1", s('a'), B, "d1", Go)
        .step(Lower, "d1", s('b'), B, "d1", Go)
        .step(Lower, "d1", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), t("b"), "d2", Go)
        .step(Lower, "d2", s('a'), B, "d2", Go)
        .step(Lower, "d2", s('b'), B, "d2", Go)
        .step(Lower, "d2", L, B, "dfin", Stay)
        .finish()
}

/// Same skeleton as l_expo, with bit separators. Bit equality is enforced
/// at the aligned first-phase milestones; the second-phase milestones pair
/// offset separators, so there any bit combination may pass.
fn l_expo_hat_forward() -> MachineSpec {
    SpecBuilder::new("l_expo_hat")
        .alphabet("a01c")
        .messages(&["0", "1", "c", "LEND"])
        .component(
            Upper,
            &["u0", "u1s", "u1m", "ubm", "u2s", "u2m", "uend", "uend2", "uacc"],
            "u0",
            &["uacc"],
            SendDefault::Bot,
        )
        .component(Lower, &["d0", "d1", "dw", "d2", "dfin"], "d0", &[], SendDefault::Bot)
        .send(Upper, "ubm", s('0'), t("0"))
        .send(Upper, "ubm", s('1'), t("1"))
        .send(Upper, "ubm", s('c'), t("c"))
        .send(Lower, "d1", s('0'), t("0"))
        .send(Lower, "d1", s('1'), t("1"))
        .send(Lower, "d1", s('c'), t("c"))
        .send(Lower, "d2", s('0'), t("0"))
        .send(Lower, "d2", s('1'), t("1"))
        .send(Lower, "d2", L, t("LEND"))
        .step(Upper, "u0", L, B, "u1s", Go)
        .step(Upper, "u1s", s('a'), B, "u1m", Stay)
        .step(Upper, "u1m", s('a'), B, "u1s", Go)
        .step(Upper, "u1s", s('0'), t("0"), "u1s", Go)
        .step(Upper, "u1s", s('1'), t("1"), "u1s", Go)
        .step(Upper, "u1s", s('c'), t("c"), "ubm", Go)
        .step(Upper, "ubm", s('a'), B, "ubm", Go)
        .step(Upper, "ubm", s('0'), B, "u2s", Go)
        .step(Upper, "ubm", s('1'), B, "u2s", Go)
        .step(Upper, "u2s", s('a'), B, "u2m", Stay)
        .step(Upper, "u2m", s('a'), B, "u2s", Go)
        .step(Upper, "u2s", s('0'), t("0"), "u2s", Go)
        .step(Upper, "u2s", s('0'), t("1"), "u2s", Go)
        .step(Upper, "u2s", s('1'), t("0"), "u2s", Go)
        .step(Upper, "u2s", s('1'), t("1"), "u2s", Go)
        .step(Upper, "u2s", R, t("0"), "uend", Stay)
        .step(Upper, "u2s", R, t("1"), "uend", Stay)
        // Counted end wait, as in l_expo: pins the leftmost block to one a.
        .step(Upper, "uend", R, B, "uend2", Stay)
        .step(Upper, "uend2", R, t("LEND"), "uacc", Stay)
        .step(Lower, "d0", R, B, "d1", Go)
        .step(Lower, "d1", s('a'), B, "d1", Go)
        .step(Lower, "d1", s('0'), B, "d1", Go)
        .step(Lower, "d1", s('1'), B, "d1", Go)
        .step(Lower, "d1", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), t("0"), "d2", Go)
        .step(Lower, "dw", s('c'), t("1"), "d2", Go)
        .step(Lower, "d2", s('a'), B, "d2", Go)
        .step(Lower, "d2", s('0'), B, "d2", Go)
        .step(Lower, "d2", s('1'), B, "d2", Go)
        .step(Lower, "d2", L, B, "dfin", Stay)
        .finish()
}

/// Arithmetic blocks differ by two per pair, so both components run at full
/// speed and the upper waits two counted steps at each separator. With no
/// bits at all (m = 0) the upper reaches the right endmarker while the
/// lower still waits on the center, so the resume signal is sent from the
/// endmarker instead of a separator.
fn l_poly_hat_forward() -> MachineSpec {
    SpecBuilder::new("l_poly_hat")
        .alphabet("a01c")
        .messages(&["0", "1", "c", "LEND", "REND"])
        .component(
            Upper,
            &[
                "u0", "ua", "uw1", "uw2", "ucw1", "ucw2", "ubm", "u2a", "u2w1", "u2w2", "ue1",
                "ue2", "ue3", "ue4", "uacc",
            ],
            "u0",
            &["uacc"],
            SendDefault::Bot,
        )
        .component(Lower, &["d0", "d1", "dw", "d2", "dfin"], "d0", &[], SendDefault::Bot)
        .send(Upper, "ubm", s('0'), t("0"))
        .send(Upper, "ubm", s('1'), t("1"))
        .send(Upper, "ubm", s('c'), t("c"))
        .send(Upper, "ubm", R, t("REND"))
        .send(Lower, "d1", s('0'), t("0"))
        .send(Lower, "d1", s('1'), t("1"))
        .send(Lower, "d1", s('c'), t("c"))
        .send(Lower, "d2", s('0'), t("0"))
        .send(Lower, "d2", s('1'), t("1"))
        .send(Lower, "d2", L, t("LEND"))
        .step(Upper, "u0", L, B, "ua", Go)
        .step(Upper, "ua", s('a'), B, "ua", Go)
        .step(Upper, "ua", s('0'), B, "uw1", Stay)
        .step(Upper, "ua", s('1'), B, "uw1", Stay)
        .step(Upper, "uw1", s('0'), B, "uw2", Stay)
        .step(Upper, "uw1", s('1'), B, "uw2", Stay)
        .step(Upper, "uw2", s('0'), t("0"), "ua", Go)
        .step(Upper, "uw2", s('1'), t("1"), "ua", Go)
        .step(Upper, "ua", s('c'), B, "ucw1", Stay)
        .step(Upper, "ucw1", s('c'), B, "ucw2", Stay)
        .step(Upper, "ucw2", s('c'), t("c"), "ubm", Go)
        .step(Upper, "ubm", s('a'), B, "ubm", Go)
        .step(Upper, "ubm", s('0'), B, "u2a", Go)
        .step(Upper, "ubm", s('1'), B, "u2a", Go)
        .step(Upper, "ubm", R, B, "ue3", Stay)
        .step(Upper, "u2a", s('a'), B, "u2a", Go)
        .step(Upper, "u2a", s('0'), B, "u2w1", Stay)
        .step(Upper, "u2a", s('1'), B, "u2w1", Stay)
        .step(Upper, "u2w1", s('0'), B, "u2w2", Stay)
        .step(Upper, "u2w1", s('1'), B, "u2w2", Stay)
        .step(Upper, "u2w2", s('0'), t("0"), "u2a", Go)
        .step(Upper, "u2w2", s('0'), t("1"), "u2a", Go)
        .step(Upper, "u2w2", s('1'), t("0"), "u2a", Go)
        .step(Upper, "u2w2", s('1'), t("1"), "u2a", Go)
        .step(Upper, "u2a", R, B, "ue1", Stay)
        .step(Upper, "ue1", R, B, "ue2", Stay)
        .step(Upper, "ue2", R, t("0"), "ue3", Stay)
        .step(Upper, "ue2", R, t("1"), "ue3", Stay)
        .step(Upper, "ue3", R, B, "ue4", Stay)
        .step(Upper, "ue4", R, t("LEND"), "uacc", Stay)
        .step(Lower, "d0", R, B, "d1", Go)
        .step(Lower, "d1", s('a'), B, "d1", Go)
        .step(Lower, "d1", s('0'), B, "d1", Go)
        .step(Lower, "d1", s('1'), B, "d1", Go)
        .step(Lower, "d1", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), B, "dw", Stay)
        .step(Lower, "dw", s('c'), t("0"), "d2", Go)
        .step(Lower, "dw", s('c'), t("1"), "d2", Go)
        .step(Lower, "dw", s('c'), t("REND"), "d2", Go)
        .step(Lower, "d2", s('a'), B, "d2", Go)
        .step(Lower, "d2", s('0'), B, "d2", Go)
        .step(Lower, "d2", s('1'), B, "d2", Go)
        .step(Lower, "d2", L, B, "dfin", Stay)
        .finish()
}

fn derive_and_apply(spec: MachineSpec, max_word_len: usize, witnesses: Vec<String>) -> MachineSpec {
    let opts = DeriveOptions {
        max_word_len,
        witnesses,
    };
    match derive_reverse(&spec, &opts) {
        Ok(tables) => tables.apply_to(&spec),
        Err(report) => panic!("zoo machine '{}' is not backward deterministic:\n{report}", spec.name),
    }
}

fn build_catalog() -> Vec<ZooEntry> {
    let an_bn = an_bn_spec();
    let l_lin = derive_and_apply(l_lin_forward(), 8, vec![]);
    let w_dollar = derive_and_apply(w_dollar_forward(), 8, vec![]);
    let prefix_abb = derive_and_apply(prefix_abb_forward(), 8, vec![]);
    let suffix_bba = {
        let mut sp = reverse_language(&prefix_abb);
        sp.name = "suffix_bba".into();
        sp
    };
    let l_expo = derive_and_apply(
        l_expo_forward(),
        8,
        vec![l_expo_word(1), l_expo_word(2), l_expo_word(3)],
    );
    let l_expo_hat = derive_and_apply(
        l_expo_hat_forward(),
        6,
        vec![
            l_expo_hat_word(&[0]),
            l_expo_hat_word(&[1]),
            l_expo_hat_word(&[0, 0]),
            l_expo_hat_word(&[0, 1]),
            l_expo_hat_word(&[1, 0]),
            l_expo_hat_word(&[1, 1]),
        ],
    );
    let l_poly_hat = derive_and_apply(
        l_poly_hat_forward(),
        6,
        vec![
            l_poly_hat_word(&[]),
            l_poly_hat_word(&[0]),
            l_poly_hat_word(&[1]),
            l_poly_hat_word(&[0, 0]),
            l_poly_hat_word(&[0, 1]),
            l_poly_hat_word(&[1, 0]),
            l_poly_hat_word(&[1, 1]),
            l_poly_hat_word(&[0, 1, 0]),
        ],
    );

    vec![
        ZooEntry {
            name: "an_bn",
            spec: Some(an_bn),
            predicate: pred_an_bn,
            claimed_comm_class: Some(BoundKind::Linear),
            reversible: true,
            equiv_len: 14,
            rev_len: 6,
            provenance: "canonical worked counting language a^n b^n with explicit forward and backward tables",
            note: Some(
                "the upper backward row for (p4, b) carries message LEND: the lower component \
                 rests on the left endmarker at the one step this row inverts, so a REND message \
                 there would never match and backward replay would strand",
            ),
        },
        ZooEntry {
            name: "w_dollar",
            spec: Some(w_dollar),
            predicate: pred_w_dollar,
            claimed_comm_class: Some(BoundKind::Linear),
            reversible: true,
            equiv_len: 12,
            rev_len: 6,
            provenance: "non-context-free mirror-and-budget language w $ w^R $ a^|w|; tables are engineered here and oracle-validated",
            note: Some("malformed inputs halt non-accepting at the first structural violation"),
        },
        ZooEntry {
            name: "prefix_abb",
            spec: Some(prefix_abb),
            predicate: pred_prefix_abb,
            claimed_comm_class: Some(BoundKind::Constant),
            reversible: true,
            equiv_len: 10,
            rev_len: 6,
            provenance: "regular prefix language a^m b b v accepted with zero communication",
            note: None,
        },
        ZooEntry {
            name: "suffix_bba",
            spec: Some(suffix_bba),
            predicate: pred_suffix_bba,
            claimed_comm_class: Some(BoundKind::Constant),
            reversible: true,
            equiv_len: 10,
            rev_len: 6,
            provenance: "reversal of prefix_abb, obtained by the component-swap construction",
            note: None,
        },
        ZooEntry {
            name: "l_expo",
            spec: Some(l_expo),
            predicate: pred_l_expo,
            claimed_comm_class: Some(BoundKind::Logarithmic),
            reversible: true,
            equiv_len: 8,
            rev_len: 6,
            provenance: "non-semilinear doubling-block language; at most 2m+3 messages each way on accepted words",
            note: None,
        },
        ZooEntry {
            name: "l_lin",
            spec: Some(l_lin),
            predicate: pred_l_lin,
            claimed_comm_class: Some(BoundKind::Linear),
            reversible: true,
            equiv_len: 11,
            rev_len: 6,
            provenance: "mirror language w c w^R; both components communicate every step",
            note: None,
        },
        ZooEntry {
            name: "l_expo_hat",
            spec: Some(l_expo_hat),
            predicate: pred_l_expo_hat,
            claimed_comm_class: Some(BoundKind::Logarithmic),
            reversible: true,
            equiv_len: 8,
            rev_len: 6,
            provenance: "bit-decorated doubling-block language; mirror bit checks ride on the milestone messages",
            note: None,
        },
        ZooEntry {
            name: "l_poly_hat",
            spec: Some(l_poly_hat),
            predicate: pred_l_poly_hat,
            claimed_comm_class: Some(BoundKind::SquareRoot),
            reversible: true,
            equiv_len: 8,
            rev_len: 6,
            provenance: "bit-decorated arithmetic-block language; block count grows like the square root of the length",
            note: None,
        },
        ZooEntry {
            name: "l_empty_I",
            spec: None,
            predicate: pred_l_empty,
            claimed_comm_class: None,
            reversible: false,
            equiv_len: 0,
            rev_len: 0,
            provenance: "regular negative control a^m1 b b^m3 b a^m2",
            note: Some("not accepted by any reversible two-party system, with any amount of communication"),
        },
        ZooEntry {
            name: "l_I_template",
            spec: None,
            predicate: pred_l_i_template,
            claimed_comm_class: None,
            reversible: false,
            equiv_len: 0,
            rev_len: 0,
            provenance: "negative-control family a^m1 b v b a^m2 with v in b* or in b{a,b}*b",
            note: Some("intersection witness: equals the intersection of prefix_abb and suffix_bba languages"),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::equiv_bounded;
    use crate::reverse::certify_bounded;

    #[test]
    fn catalog_is_stable_and_complete() {
        let names: Vec<&str> = list().iter().map(|e| e.name).collect();
        assert_eq!(
            names,
            [
                "an_bn",
                "w_dollar",
                "prefix_abb",
                "suffix_bba",
                "l_expo",
                "l_lin",
                "l_expo_hat",
                "l_poly_hat",
                "l_empty_I",
                "l_I_template"
            ]
        );
        assert!(matches!(get("nope"), Err(ZooError::Unknown(_))));
    }

    #[test]
    fn an_bn_entry_matches_the_reference_tables() {
        let e = get("an_bn").unwrap();
        let spec = e.spec.unwrap();
        assert_eq!(spec.upper.delta.len(), 7);
        assert_eq!(spec.lower.delta.len(), 7);
        assert_eq!(spec.upper.reverse_delta.as_ref().unwrap().len(), 7);
        assert_eq!(spec.lower.reverse_delta.as_ref().unwrap().len(), 7);
        assert_eq!(spec.upper.accepting, vec!["p5".to_string()]);
        assert!(spec.lower.accepting.is_empty());
        assert_eq!(e.claimed_comm_class, Some(BoundKind::Linear));
        assert!(e.reversible);
    }

    #[test]
    fn negative_controls_carry_no_machine() {
        let e = get("l_empty_I").unwrap();
        assert!(e.spec.is_none());
        assert!(e.note.unwrap().contains("not accepted by any reversible"));
    }

    #[test]
    fn membership_examples() {
        assert!(membership("l_lin", "0c0").unwrap());
        assert!(!membership("l_lin", "0c1").unwrap());
        assert!(membership("l_lin", "c").unwrap());
        assert!(membership("l_expo", "abaaaacaaaaaaaabaa").unwrap());
        assert!(membership("l_poly_hat", "acaaa").unwrap());
        assert!(membership("l_expo_hat", "a0aaaacaaaaaaaa0aa").unwrap());
        assert!(membership("l_empty_I", "aabbaa").unwrap());
        assert!(!membership("l_empty_I", "aba").unwrap());
        assert!(membership("l_I_template", "abbbba").unwrap());
        assert!(membership("l_I_template", "abababa").unwrap_or(false) == pred_l_i_template("abababa"));
    }

    #[test]
    fn generated_members_satisfy_their_predicates() {
        assert_eq!(l_expo_word(1), "abaaaacaaaaaaaabaa");
        assert_eq!(l_expo_word(1).len(), 18);
        assert_eq!(l_expo_word(2).len(), 68);
        assert_eq!(l_expo_word(3).len(), 262);
        for m in 1..=3 {
            assert!(pred_l_expo(&l_expo_word(m)), "m={m}");
        }
        assert!(pred_l_expo_hat(&l_expo_hat_word(&[1])));
        assert!(pred_l_expo_hat(&l_expo_hat_word(&[0, 1])));
        assert!(!pred_l_expo_hat("a0aaaacaaaaaaaa1aa"), "mirror bits must match");
        assert_eq!(l_poly_hat_word(&[]), "acaaa");
        assert!(pred_l_poly_hat(&l_poly_hat_word(&[1, 0])));
        assert_eq!(l_poly_hat_word(&[0]).len(), 19);
        assert_eq!(l_poly_hat_word(&[0, 0]).len(), 41);
        assert_eq!(l_poly_hat_word(&[0, 0, 0]).len(), 71);
        assert_eq!(l_poly_hat_word(&[0, 0, 0, 0]).len(), 109);
    }

    #[test]
    fn machines_agree_with_predicates_at_small_lengths() {
        for e in list() {
            let Some(spec) = &e.spec else { continue };
            let m = spec.clone().compile().unwrap();
            let r = equiv_bounded(&m, e.predicate, 7);
            assert!(r.passed(), "{}: {:?}", e.name, r);
        }
    }

    #[test]
    fn machines_accept_their_long_members() {
        let la = |name: &str, w: &str| {
            let m = get(name).unwrap().spec.unwrap().compile().unwrap();
            m.accepts(w).unwrap()
        };
        for m in 1..=3 {
            assert!(la("l_expo", &l_expo_word(m)), "l_expo m={m}");
        }
        for bits in [&[0u8][..], &[1], &[0, 1], &[1, 1]] {
            assert!(la("l_expo_hat", &l_expo_hat_word(bits)), "hat {bits:?}");
        }
        for bits in [&[][..], &[0], &[1], &[1, 0], &[0, 1, 1]] {
            assert!(la("l_poly_hat", &l_poly_hat_word(bits)), "poly {bits:?}");
        }
        for w in ["", "a", "ab", "ba", "abb"] {
            assert!(la("w_dollar", &w_dollar_word(w)), "w_dollar w={w:?}");
        }
    }

    #[test]
    fn point_mutations_never_fool_the_machines() {
        let cases = [
            ("l_expo", l_expo_word(1)),
            ("l_expo_hat", l_expo_hat_word(&[1])),
            ("l_poly_hat", l_poly_hat_word(&[0])),
            ("w_dollar", w_dollar_word("ab")),
            ("l_lin", l_lin_word("01")),
        ];
        for (name, word) in cases {
            let e = get(name).unwrap();
            let m = e.spec.unwrap().compile().unwrap();
            let sigma: Vec<char> = m.spec().input_alphabet.clone();
            let chars: Vec<char> = word.chars().collect();
            let mut variants = Vec::new();
            for i in 0..chars.len() {
                // deletion
                let mut d: Vec<char> = chars.clone();
                d.remove(i);
                variants.push(d.iter().collect::<String>());
                // substitutions and insertions
                for &c in &sigma {
                    let mut sub = chars.clone();
                    sub[i] = c;
                    variants.push(sub.iter().collect::<String>());
                    let mut ins = chars.clone();
                    ins.insert(i, c);
                    variants.push(ins.iter().collect::<String>());
                }
            }
            for v in variants {
                assert_eq!(
                    m.accepts(&v).unwrap(),
                    (e.predicate)(&v),
                    "{name}: mutant {v:?}"
                );
            }
        }
    }

    #[test]
    fn template_is_the_intersection_of_prefix_and_suffix() {
        for w in crate::oracle::words(&['a', 'b'], 10) {
            let both = pred_prefix_abb(&w) && pred_suffix_bba(&w);
            assert_eq!(pred_l_i_template(&w), both, "word {w:?}");
        }
    }

    #[test]
    fn suffix_is_prefix_reversed() {
        for w in crate::oracle::words(&['a', 'b'], 8) {
            let rev: String = w.chars().rev().collect();
            assert_eq!(
                membership("suffix_bba", &w).unwrap(),
                membership("prefix_abb", &rev).unwrap(),
                "word {w:?}"
            );
        }
    }

    #[test]
    fn reversible_entries_certify_at_a_small_bound() {
        for e in list() {
            if !e.reversible {
                continue;
            }
            let m = e.spec.clone().unwrap().compile().unwrap();
            let rep = certify_bounded(&m, 4).unwrap();
            assert!(rep.certified(), "{} failed: {:?}", e.name, rep.verdict);
        }
    }

    #[test]
    fn long_members_invert_exactly() {
        use crate::reverse::verify_inversion;
        let checks = [
            ("l_expo", l_expo_word(2)),
            ("l_expo_hat", l_expo_hat_word(&[1, 0])),
            ("l_poly_hat", l_poly_hat_word(&[0, 1])),
            ("w_dollar", w_dollar_word("abba")),
            ("l_lin", l_lin_word("0110")),
        ];
        for (name, w) in checks {
            let m = get(name).unwrap().spec.unwrap().compile().unwrap();
            let i = m.input(&w).unwrap();
            assert!(verify_inversion(&m, &i).unwrap().is_ok(), "{name} on {w:?}");
        }
    }
}
