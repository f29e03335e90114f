//! Brute-force ground truth: bounded word enumeration, machine-vs-predicate
//! equivalence, and configuration-graph analysis.
//!
//! Enumeration order is fixed (length, then lexicographic by declared
//! alphabet order) so counterexamples are deterministic.

use crate::model::{Configuration, Input, Machine, StepResult, Verdict};
use std::collections::HashMap;

/// All words over `alphabet` of length `<= max_len`, shortest first,
/// lexicographic within a length by the declared symbol order.
pub fn words(alphabet: &[char], max_len: usize) -> Words {
    Words {
        alphabet: alphabet.to_vec(),
        max_len,
        len: 0,
        digits: Vec::new(),
        fresh_len: true,
        done: false,
    }
}

pub struct Words {
    alphabet: Vec<char>,
    max_len: usize,
    len: usize,
    digits: Vec<usize>,
    fresh_len: bool,
    done: bool,
}

impl Iterator for Words {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        if self.fresh_len {
            self.digits = vec![0; self.len];
            self.fresh_len = false;
        } else {
            // Odometer increment, rightmost digit least significant.
            let mut i = self.len;
            loop {
                if i == 0 {
                    self.len += 1;
                    self.fresh_len = true;
                    break;
                }
                i -= 1;
                self.digits[i] += 1;
                if self.digits[i] < self.alphabet.len() {
                    break;
                }
                self.digits[i] = 0;
            }
            if self.fresh_len {
                if self.len > self.max_len || self.alphabet.is_empty() {
                    self.done = true;
                    return None;
                }
                self.digits = vec![0; self.len];
                self.fresh_len = false;
            }
        }
        Some(self.digits.iter().map(|&d| self.alphabet[d]).collect())
    }
}

/// All accepted words of length `<= max_len` over `alphabet`, in
/// enumeration order.
pub fn enumerate_accepted(m: &Machine, alphabet: &[char], max_len: usize) -> Vec<String> {
    words(alphabet, max_len)
        .filter(|w| match m.input(w) {
            Ok(input) => m.decide(&input) == Verdict::Accepted,
            Err(_) => false,
        })
        .collect()
}

/// Outcome of bounded machine-vs-predicate comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivResult {
    Pass {
        words_checked: usize,
    },
    /// First disagreement in enumeration order.
    Counterexample {
        word: String,
        machine_verdict: bool,
        predicate_verdict: bool,
    },
}

impl EquivResult {
    pub fn passed(&self) -> bool {
        matches!(self, EquivResult::Pass { .. })
    }
}

/// Compare acceptance against a total predicate on every word over the
/// machine's input alphabet up to `max_len`.
pub fn equiv_bounded<P: Fn(&str) -> bool>(m: &Machine, predicate: P, max_len: usize) -> EquivResult {
    let sigma = m.spec().input_alphabet.clone();
    let mut words_checked = 0;
    for w in words(&sigma, max_len) {
        words_checked += 1;
        let input = m.input(&w).expect("enumerated word is over the alphabet");
        let got = m.decide(&input) == Verdict::Accepted;
        let want = predicate(&w);
        if got != want {
            return EquivResult::Counterexample {
                word: w,
                machine_verdict: got,
                predicate_verdict: want,
            };
        }
    }
    EquivResult::Pass { words_checked }
}

/// The reachable configuration graph of one word: nodes in discovery order,
/// step edges, and degree annotations. Forward determinism keeps every
/// out-degree at most 1; an in-degree of 2 or more is a semantic
/// irreversibility witness independent of any backward tables.
#[derive(Debug, Clone)]
pub struct ConfigGraph {
    pub word: String,
    pub nodes: Vec<Configuration>,
    pub edges: Vec<(usize, usize)>,
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
}

impl ConfigGraph {
    pub fn max_in_degree(&self) -> usize {
        self.in_degree.iter().copied().max().unwrap_or(0)
    }

    /// Indices of nodes witnessing a forward merge.
    pub fn merge_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.in_degree[i] >= 2)
            .collect()
    }

    /// Render as a DOT digraph with `state,pos|state,pos` node ids.
    pub fn to_dot(&self, m: &Machine) -> String {
        let mut out = String::from("digraph config_graph {\n");
        for c in &self.nodes {
            out.push_str(&format!("  \"{}\";\n", m.fmt_config(c)));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                m.fmt_config(&self.nodes[a]),
                m.fmt_config(&self.nodes[b])
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Closure of the step relation from the initial configuration. The system
/// is deterministic, so this is a chain that either halts or closes into a
/// cycle; the walk stops at the first repeated configuration.
pub fn config_graph(m: &Machine, input: &Input) -> ConfigGraph {
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut cur = m.initial_configuration(input);
    index.insert(cur, 0);
    nodes.push(cur);
    loop {
        match m.forward_step(input, cur) {
            StepResult::Halt => break,
            StepResult::Next(rec) => {
                let from = index[&rec.pre];
                match index.get(&rec.post) {
                    Some(&to) => {
                        edges.push((from, to));
                        break;
                    }
                    None => {
                        let to = nodes.len();
                        index.insert(rec.post, to);
                        nodes.push(rec.post);
                        edges.push((from, to));
                        cur = rec.post;
                    }
                }
            }
        }
    }
    let mut in_degree = vec![0; nodes.len()];
    let mut out_degree = vec![0; nodes.len()];
    for &(a, b) in &edges {
        out_degree[a] += 1;
        in_degree[b] += 1;
    }
    ConfigGraph {
        word: input.word.clone(),
        nodes,
        edges,
        in_degree,
        out_degree,
    }
}
