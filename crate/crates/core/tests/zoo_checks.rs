//! Catalog-wide checks at the documented bounds: exhaustive language
//! equivalence, reversibility certification, communication-class claims,
//! and cross-checks between the derivation and certification machinery.

use pwk_core::comm::{classify, count_messages, measure, BoundKind};
use pwk_core::combinators::reverse_language;
use pwk_core::model::Machine;
use pwk_core::oracle::equiv_bounded;
use pwk_core::reverse::{backward_replay, certify_bounded, derive_reverse, DeriveOptions};
use pwk_core::zoo;

fn compiled(name: &str) -> Machine {
    zoo::get(name).unwrap().spec.unwrap().compile().unwrap()
}

#[test]
fn machines_match_their_predicates_at_documented_bounds() {
    for e in zoo::list() {
        let Some(spec) = &e.spec else { continue };
        let m = spec.clone().compile().unwrap();
        let r = equiv_bounded(&m, e.predicate, e.equiv_len);
        assert!(r.passed(), "{} at length {}: {:?}", e.name, e.equiv_len, r);
    }
}

#[test]
fn parameterized_members_are_covered_beyond_enumeration() {
    let l_expo = compiled("l_expo");
    for m in 1..=2 {
        assert!(l_expo.accepts(&zoo::l_expo_word(m)).unwrap(), "l_expo m={m}");
    }
    let hat = compiled("l_expo_hat");
    for bits in [&[0u8][..], &[1], &[0, 0], &[0, 1], &[1, 0], &[1, 1]] {
        assert!(hat.accepts(&zoo::l_expo_hat_word(bits)).unwrap(), "hat {bits:?}");
    }
    let poly = compiled("l_poly_hat");
    for bits in [
        &[][..],
        &[0],
        &[1],
        &[0, 0],
        &[1, 1],
        &[0, 1, 0],
        &[1, 0, 1],
    ] {
        assert!(poly.accepts(&zoo::l_poly_hat_word(bits)).unwrap(), "poly {bits:?}");
    }
}

#[test]
fn every_reversible_entry_certifies_at_its_bound() {
    for e in zoo::list() {
        if !e.reversible {
            continue;
        }
        let m = compiled(e.name);
        let rep = certify_bounded(&m, e.rev_len).unwrap();
        assert!(
            rep.certified(),
            "{} fails certification at {}: {:?}",
            e.name,
            e.rev_len,
            rep.verdict
        );
    }
}

#[test]
fn reversal_preserves_certification_on_the_zoo() {
    for e in zoo::list() {
        let Some(spec) = &e.spec else { continue };
        if !e.reversible {
            continue;
        }
        let mr = reverse_language(spec).compile().unwrap();
        let rep = certify_bounded(&mr, 6).unwrap();
        assert!(
            rep.certified(),
            "reversal of {} fails certification: {:?}",
            e.name,
            rep.verdict
        );
    }
}

#[test]
fn derived_tables_certify_across_the_zoo() {
    // Re-derive backward tables for every machine from its forward rules
    // alone and check the result certifies; the witnesses mirror the ones
    // the catalog itself uses.
    let witnesses: &[(&str, Vec<String>)] = &[
        ("an_bn", vec![]),
        ("l_lin", vec![]),
        ("w_dollar", vec![]),
        ("prefix_abb", vec![]),
        ("l_expo", vec![zoo::l_expo_word(1), zoo::l_expo_word(2)]),
        (
            "l_expo_hat",
            vec![
                zoo::l_expo_hat_word(&[0]),
                zoo::l_expo_hat_word(&[1]),
                zoo::l_expo_hat_word(&[0, 1]),
                zoo::l_expo_hat_word(&[1, 0]),
            ],
        ),
        (
            "l_poly_hat",
            vec![
                zoo::l_poly_hat_word(&[]),
                zoo::l_poly_hat_word(&[0]),
                zoo::l_poly_hat_word(&[1]),
                zoo::l_poly_hat_word(&[0, 1]),
            ],
        ),
    ];
    for (name, extra) in witnesses {
        let spec = zoo::get(name).unwrap().spec.unwrap();
        let opts = DeriveOptions {
            max_word_len: 6,
            witnesses: extra.clone(),
        };
        let tables = derive_reverse(&spec, &opts)
            .unwrap_or_else(|e| panic!("{name} conflicts:\n{e}"));
        let m = tables.apply_to(&spec).compile().unwrap();
        let rep = certify_bounded(&m, 6).unwrap();
        assert!(rep.certified(), "derived {name}: {:?}", rep.verdict);
    }
}

#[test]
fn communication_claims_hold() {
    let series_for = |name: &str, words: Vec<String>| -> Vec<(usize, u64)> {
        let m = compiled(name);
        let out = measure(&m, &words);
        assert!(out.rejected.is_empty(), "{name}: rejected {:?}", out.rejected);
        out.series
            .iter()
            .map(|(n, s)| (*n, s.forward_total()))
            .collect()
    };

    let an_bn = series_for("an_bn", (0..5).map(|k| zoo::an_bn_word(1 << k)).collect());
    assert_eq!(classify(&an_bn).unwrap().kind, BoundKind::Linear);

    let l_lin = series_for(
        "l_lin",
        ["0", "01", "010", "0110", "01101"]
            .iter()
            .map(|w| zoo::l_lin_word(w))
            .collect(),
    );
    assert_eq!(classify(&l_lin).unwrap().kind, BoundKind::Linear);

    let w_dollar = series_for(
        "w_dollar",
        [1usize, 2, 4, 8, 16]
            .iter()
            .map(|&k| zoo::w_dollar_word(&"ab".repeat(k)[..k]))
            .collect(),
    );
    assert_eq!(classify(&w_dollar).unwrap().kind, BoundKind::Linear);

    let l_expo = series_for("l_expo", (1..=3).map(zoo::l_expo_word).collect());
    assert_eq!(classify(&l_expo).unwrap().kind, BoundKind::Logarithmic);

    let hat = series_for(
        "l_expo_hat",
        vec![
            zoo::l_expo_hat_word(&[1]),
            zoo::l_expo_hat_word(&[0, 1]),
            zoo::l_expo_hat_word(&[1, 0, 1]),
        ],
    );
    assert_eq!(classify(&hat).unwrap().kind, BoundKind::Logarithmic);

    let poly = series_for(
        "l_poly_hat",
        vec![
            zoo::l_poly_hat_word(&[1]),
            zoo::l_poly_hat_word(&[0, 1]),
            zoo::l_poly_hat_word(&[1, 0, 1]),
            zoo::l_poly_hat_word(&[0, 1, 0, 1]),
        ],
    );
    assert_eq!(classify(&poly).unwrap().kind, BoundKind::SquareRoot);

    // Zero-communication machines classify as constant.
    let m = compiled("prefix_abb");
    let accepted = pwk_core::oracle::enumerate_accepted(&m, &['a', 'b'], 8);
    let out = measure(&m, &accepted);
    let series: Vec<(usize, u64)> = out
        .series
        .iter()
        .map(|(n, s)| (*n, s.forward_total()))
        .collect();
    assert!(series.iter().all(|&(_, c)| c == 0));
    assert_eq!(classify(&series).unwrap().kind, BoundKind::Constant);
}

#[test]
fn echo_machines_send_symmetrically_in_both_directions() {
    for (name, words) in [
        ("an_bn", vec![zoo::an_bn_word(1), zoo::an_bn_word(3)]),
        ("l_lin", vec![zoo::l_lin_word("01"), zoo::l_lin_word("110")]),
    ] {
        let m = compiled(name);
        for w in words {
            let input = m.input(&w).unwrap();
            let t = m.run(&input, None);
            let r = backward_replay(&m, &input).unwrap();
            let s = count_messages(&t, Some(&r)).unwrap();
            assert_eq!(
                s.forward_total(),
                s.backward_total(),
                "{name} on {w:?}: {s:?}"
            );
        }
    }
}
