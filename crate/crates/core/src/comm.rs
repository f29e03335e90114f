//! Message accounting per computation and empirical classification of
//! communication growth against four bound classes: constant, logarithmic,
//! square-root, and linear.

use crate::model::{Machine, Trace, Verdict, MSG_BOT};
use crate::reverse::{backward_replay, Replay};
use thiserror::Error;

/// Message counts for one computation. A send of "nothing" is never
/// counted; totals are sums of the per-component counts by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CommStats {
    pub word_length: usize,
    pub forward_upper: u64,
    pub forward_lower: u64,
    pub backward_upper: u64,
    pub backward_lower: u64,
}

impl CommStats {
    pub fn forward_total(&self) -> u64 {
        self.forward_upper + self.forward_lower
    }

    pub fn backward_total(&self) -> u64 {
        self.backward_upper + self.backward_lower
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommError {
    #[error("forward trace is for {forward:?} but backward replay is for {backward:?}")]
    MismatchedWords { forward: String, backward: String },
    #[error("classification needs at least 3 points with distinct lengths, got {have}")]
    TooFewPoints { have: usize },
}

/// Count non-empty sends per step and component. Backward counts are zero
/// when no backward replay is supplied.
pub fn count_messages(trace: &Trace, backward: Option<&Replay>) -> Result<CommStats, CommError> {
    if let Some(r) = backward {
        if r.word != trace.word {
            return Err(CommError::MismatchedWords {
                forward: trace.word.clone(),
                backward: r.word.clone(),
            });
        }
    }
    let mut stats = CommStats {
        word_length: trace.word.chars().count(),
        ..CommStats::default()
    };
    for s in &trace.steps {
        stats.forward_upper += (s.sent_upper != MSG_BOT) as u64;
        stats.forward_lower += (s.sent_lower != MSG_BOT) as u64;
    }
    if let Some(r) = backward {
        for s in &r.steps {
            stats.backward_upper += (s.sent_upper != MSG_BOT) as u64;
            stats.backward_lower += (s.sent_lower != MSG_BOT) as u64;
        }
    }
    Ok(stats)
}

/// Measurement over a word list: one series entry per accepted word
/// (backward counts included when the machine carries reverse tables and
/// the run inverts), with rejected or ill-formed words reported separately.
#[derive(Debug, Clone, Default)]
pub struct MeasureOutcome {
    pub series: Vec<(usize, CommStats)>,
    pub rejected: Vec<String>,
}

pub fn measure(m: &Machine, words: &[String]) -> MeasureOutcome {
    let mut out = MeasureOutcome::default();
    for w in words {
        let Ok(input) = m.input(w) else {
            out.rejected.push(w.clone());
            continue;
        };
        let trace = m.run(&input, None);
        if trace.verdict != Verdict::Accepted {
            out.rejected.push(w.clone());
            continue;
        }
        let replay = if m.has_reverse() {
            backward_replay(m, &input).ok()
        } else {
            None
        };
        let stats = count_messages(&trace, replay.as_ref()).expect("replay is for the same word");
        out.series.push((stats.word_length, stats));
    }
    out
}

/// Growth classes, ordered weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundKind {
    Constant,
    Logarithmic,
    SquareRoot,
    Linear,
    Other,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::Constant => "constant",
            BoundKind::Logarithmic => "log",
            BoundKind::SquareRoot => "sqrt",
            BoundKind::Linear => "linear",
            BoundKind::Other => "other",
        }
    }
}

/// Nonnegative least-squares fit of `count ~ scale * g(n) + offset` for one
/// basis, with its range-normalized RMS residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub basis: BoundKind,
    pub scale: f64,
    pub offset: f64,
    pub nrmse: f64,
}

/// Classification outcome: the weakest class whose fit meets the residual
/// threshold, plus the fit itself (for `Other`, the best fit found).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundClass {
    pub kind: BoundKind,
    pub fit: Fit,
}

/// Residual threshold for accepting a class.
pub const RESIDUAL_THRESHOLD: f64 = 0.1;

fn basis_fn(kind: BoundKind, n: f64) -> f64 {
    match kind {
        BoundKind::Constant => 1.0,
        BoundKind::Logarithmic => (n + 1.0).log2(),
        BoundKind::SquareRoot => n.sqrt(),
        BoundKind::Linear => n,
        BoundKind::Other => unreachable!("no basis for Other"),
    }
}

fn rmse(points: &[(f64, f64)], scale: f64, offset: f64) -> f64 {
    let sq: f64 = points
        .iter()
        .map(|&(g, y)| {
            let e = y - (scale * g + offset);
            e * e
        })
        .sum();
    (sq / points.len() as f64).sqrt()
}

/// Least squares with both coefficients clamped to be nonnegative: take the
/// unconstrained solution if feasible, otherwise the better of the two
/// single-coefficient fits.
fn nonneg_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let gm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sgg: f64 = points.iter().map(|p| (p.0 - gm) * (p.0 - gm)).sum();
    let sgy: f64 = points.iter().map(|p| (p.0 - gm) * (p.1 - ym)).sum();
    if sgg > 0.0 {
        let a = sgy / sgg;
        let b = ym - a * gm;
        if a >= 0.0 && b >= 0.0 {
            return (a, b);
        }
    }
    // Through the origin, or flat at the mean; pick the better feasible one.
    let sg2: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sgyo: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let a0 = if sg2 > 0.0 { (sgyo / sg2).max(0.0) } else { 0.0 };
    let cand_origin = (a0, 0.0);
    let cand_flat = (0.0, ym.max(0.0));
    if rmse(points, cand_origin.0, cand_origin.1) <= rmse(points, cand_flat.0, cand_flat.1) {
        cand_origin
    } else {
        cand_flat
    }
}

/// Fit each basis in class order and return the first whose normalized
/// residual is at most [`RESIDUAL_THRESHOLD`]; `Other` if none fits. The
/// residual is normalized by the spread of the counts, which makes the
/// class label invariant under scaling the whole series.
pub fn classify(points: &[(usize, u64)]) -> Result<BoundClass, CommError> {
    let distinct: std::collections::BTreeSet<usize> = points.iter().map(|p| p.0).collect();
    if distinct.len() < 3 {
        return Err(CommError::TooFewPoints {
            have: distinct.len(),
        });
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1 as f64).collect();
    let range = ys.iter().cloned().fold(f64::MIN, f64::max)
        - ys.iter().cloned().fold(f64::MAX, f64::min);

    let mut best: Option<Fit> = None;
    for kind in [
        BoundKind::Constant,
        BoundKind::Logarithmic,
        BoundKind::SquareRoot,
        BoundKind::Linear,
    ] {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .map(|&(n, y)| (basis_fn(kind, n as f64), y as f64))
            .collect();
        let (scale, offset) = nonneg_fit(&pts);
        let r = rmse(&pts, scale, offset);
        let nrmse = if r == 0.0 {
            0.0
        } else if range == 0.0 {
            f64::INFINITY
        } else {
            r / range
        };
        let fit = Fit {
            basis: kind,
            scale,
            offset,
            nrmse,
        };
        if nrmse <= RESIDUAL_THRESHOLD {
            return Ok(BoundClass { kind, fit });
        }
        if best.is_none_or(|b| fit.nrmse < b.nrmse) {
            best = Some(fit);
        }
    }
    Ok(BoundClass {
        kind: BoundKind::Other,
        fit: best.unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Motion, Msg, SendDefault, Side, SpecBuilder, TapeSym};
    use crate::zoo;

    fn an_bn() -> Machine {
        zoo::get("an_bn").unwrap().spec.unwrap().compile().unwrap()
    }

    #[test]
    fn echo_machine_counts_two_per_step() {
        let m = an_bn();
        let i = m.input("ab").unwrap();
        let t = m.run(&i, None);
        let s = count_messages(&t, None).unwrap();
        assert_eq!(s.forward_total(), 10);
        assert_eq!(s.backward_total(), 0);

        let i = m.input("aabb").unwrap();
        let t = m.run(&i, None);
        let r = backward_replay(&m, &i).unwrap();
        let s = count_messages(&t, Some(&r)).unwrap();
        assert_eq!(s.forward_total(), 14);
        assert_eq!(s.backward_total(), 14);
        assert_eq!(s.forward_upper, 7);
        assert_eq!(s.backward_lower, 7);
    }

    #[test]
    fn silent_machine_counts_zero() {
        let spec = SpecBuilder::new("quiet")
            .alphabet("a")
            .messages(&[])
            .component(Side::Upper, &["u", "v"], "u", &["v"], SendDefault::Bot)
            .component(Side::Lower, &["l"], "l", &[], SendDefault::Bot)
            .step(Side::Upper, "u", TapeSym::Lend, Msg::Bot, "u", Motion::Go)
            .step(Side::Upper, "u", TapeSym::Sym('a'), Msg::Bot, "u", Motion::Go)
            .step(Side::Upper, "u", TapeSym::Rend, Msg::Bot, "v", Motion::Stay)
            .step(Side::Lower, "l", TapeSym::Rend, Msg::Bot, "l", Motion::Stay)
            .finish();
        let m = spec.compile().unwrap();
        let t = m.run(&m.input("aaa").unwrap(), None);
        assert_eq!(count_messages(&t, None).unwrap().forward_total(), 0);
    }

    #[test]
    fn mismatched_words_are_rejected() {
        let m = an_bn();
        let t = m.run(&m.input("ab").unwrap(), None);
        let r = backward_replay(&m, &m.input("aabb").unwrap()).unwrap();
        assert!(matches!(
            count_messages(&t, Some(&r)),
            Err(CommError::MismatchedWords { .. })
        ));
    }

    #[test]
    fn measure_an_bn_series() {
        let m = an_bn();
        let words: Vec<String> = (1..=4)
            .map(|n| format!("{}{}", "a".repeat(n), "b".repeat(n)))
            .collect();
        let out = measure(&m, &words);
        let counts: Vec<u64> = out.series.iter().map(|(_, s)| s.forward_total()).collect();
        assert_eq!(counts, [10, 14, 18, 22]);
        assert!(out.rejected.is_empty());
        // Exact inversion, echo discipline: backward totals match forward.
        assert!(out
            .series
            .iter()
            .all(|(_, s)| s.backward_total() == s.forward_total()));
    }

    #[test]
    fn measure_reports_rejects_separately() {
        let m = an_bn();
        let out = measure(&m, &["ab".into(), "ba".into(), "a!".into()]);
        assert_eq!(out.series.len(), 1);
        assert_eq!(out.rejected, ["ba", "a!"]);
    }

    #[test]
    fn classify_flat_log_linear() {
        let c = classify(&[(10, 4), (100, 4), (1000, 4)]).unwrap();
        assert_eq!(c.kind, BoundKind::Constant);

        let c = classify(&[(18, 5), (70, 7), (268, 9)]).unwrap();
        assert_eq!(c.kind, BoundKind::Logarithmic);

        let c = classify(&[(2, 10), (4, 14), (8, 22), (16, 38)]).unwrap();
        assert_eq!(c.kind, BoundKind::Linear);
        assert!(c.fit.nrmse < 1e-9);
    }

    #[test]
    fn classify_needs_three_distinct_lengths() {
        assert!(matches!(
            classify(&[(3, 1), (3, 2), (3, 9)]),
            Err(CommError::TooFewPoints { have: 1 })
        ));
        assert!(matches!(
            classify(&[(1, 1), (2, 2)]),
            Err(CommError::TooFewPoints { have: 2 })
        ));
    }

    #[test]
    fn class_label_is_scale_invariant() {
        let base: Vec<(usize, u64)> = vec![(3, 10), (5, 14), (7, 18), (9, 22), (11, 26)];
        let kind = classify(&base).unwrap().kind;
        assert_eq!(kind, BoundKind::Linear);
        for k in [2u64, 3, 10, 100] {
            let scaled: Vec<(usize, u64)> = base.iter().map(|&(n, y)| (n, y * k)).collect();
            assert_eq!(classify(&scaled).unwrap().kind, kind, "scale {k}");
        }
    }

    #[test]
    fn other_when_nothing_fits() {
        // Exponential growth fits none of the four bases.
        let c = classify(&[(1, 2), (2, 4), (3, 16), (4, 256), (5, 65536)]).unwrap();
        assert_eq!(c.kind, BoundKind::Other);
        assert!(c.fit.nrmse > RESIDUAL_THRESHOLD);
    }
}
