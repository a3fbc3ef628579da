//! Plain-text election and graph files.
//!
//! ```text
//! # comment
//! candidates: a b c
//! order 2: a > b > c
//! table 1: a>b, b>c, c>a
//! ```
//!
//! ```text
//! graph: 3
//! edge: 1 2
//! ```

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::control::Witness;
use crate::election::{Ballot, Candidate, Election, PairTable, Preference};
use crate::reductions::Graph;

/// A rejected input file; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {msg}")]
    SyntaxError { line: usize, msg: String },
    #[error("line {line}: duplicate candidate {name}")]
    DuplicateCandidate { line: usize, name: String },
    #[error("line {line}: table misses the pair {a}/{b}")]
    IncompleteTable { line: usize, a: String, b: String },
    #[error("line {line}: unknown candidate {name}")]
    UnknownCandidate { line: usize, name: String },
    #[error("line {line}: multiplicity must be a positive integer, got {text:?}")]
    BadMultiplicity { line: usize, text: String },
    #[error("line {line}: vertex out of range or loop: {text:?}")]
    BadVertex { line: usize, text: String },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::SyntaxError { line, .. }
            | ParseError::DuplicateCandidate { line, .. }
            | ParseError::IncompleteTable { line, .. }
            | ParseError::UnknownCandidate { line, .. }
            | ParseError::BadMultiplicity { line, .. }
            | ParseError::BadVertex { line, .. }
            | ParseError::DuplicateEdge { line, .. } => *line,
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::SyntaxError { line, msg: msg.into() }
}

/// Non-blank lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

struct Names {
    list: Vec<Candidate>,
    index: HashMap<String, usize>,
}

impl Names {
    fn parse(line: usize, rest: &str) -> Result<Names, ParseError> {
        let mut names = Names { list: vec![], index: HashMap::new() };
        for w in rest.split_whitespace() {
            let c = Candidate::new(w).map_err(|_| syntax(line, format!("bad candidate name {w:?}")))?;
            if names.index.insert(w.to_string(), names.list.len()).is_some() {
                return Err(ParseError::DuplicateCandidate { line, name: w.to_string() });
            }
            names.list.push(c);
        }
        Ok(names)
    }

    fn get(&self, line: usize, w: &str) -> Result<usize, ParseError> {
        self.index.get(w).copied().ok_or_else(|| ParseError::UnknownCandidate { line, name: w.to_string() })
    }
}

fn multiplicity(line: usize, text: &str) -> Result<BigUint, ParseError> {
    let bad = || ParseError::BadMultiplicity { line, text: text.to_string() };
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let m: BigUint = text.parse().map_err(|_| bad())?;
    if m.is_zero() {
        return Err(bad());
    }
    Ok(m)
}

fn parse_order(line: usize, body: &str, names: &Names) -> Result<Preference, ParseError> {
    let n = names.list.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for w in body.split('>').map(str::trim) {
        if w.is_empty() {
            return Err(syntax(line, "empty position in order"));
        }
        let c = names.get(line, w)?;
        if std::mem::replace(&mut seen[c], true) {
            return Err(syntax(line, format!("{w} appears twice in the order")));
        }
        order.push(c);
    }
    if order.len() != n {
        return Err(syntax(line, format!("order ranks {} of {n} candidates", order.len())));
    }
    Ok(Preference::Order(order))
}

fn parse_table(line: usize, body: &str, names: &Names) -> Result<Preference, ParseError> {
    let n = names.list.len();
    let mut wins: Vec<Option<bool>> = vec![None; n * n];
    for entry in body.split(',').map(str::trim) {
        if body.trim().is_empty() && n < 2 {
            break;
        }
        let (a, b) = entry.split_once('>').ok_or_else(|| syntax(line, format!("expected a>b, got {entry:?}")))?;
        let (a, b) = (names.get(line, a.trim())?, names.get(line, b.trim())?);
        if a == b {
            return Err(syntax(line, format!("entry {entry:?} compares a candidate with itself")));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if wins[lo * n + hi].replace(a == lo).is_some() {
            return Err(syntax(line, format!("pair in {entry:?} given twice")));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if wins[a * n + b].is_none() {
                return Err(ParseError::IncompleteTable {
                    line,
                    a: names.list[a].to_string(),
                    b: names.list[b].to_string(),
                });
            }
        }
    }
    Ok(Preference::Table(PairTable::from_fn(n, |a, b| wins[a * n + b] == Some(true))))
}

/// Parses an election file.
pub fn parse_election(text: &str) -> Result<Election, ParseError> {
    let mut names: Option<Names> = None;
    let mut ballots = Vec::new();
    for (line, l) in content_lines(text) {
        let (head, body) = l.split_once(':').ok_or_else(|| syntax(line, "expected a ':'"))?;
        let mut head_words = head.split_whitespace();
        let kind = head_words.next().unwrap_or("");
        if kind == "candidates" {
            if head_words.next().is_some() {
                return Err(syntax(line, "unexpected text before ':'"));
            }
            if names.is_some() {
                return Err(syntax(line, "second candidates line"));
            }
            names = Some(Names::parse(line, body)?);
            continue;
        }
        if kind != "order" && kind != "table" {
            return Err(syntax(line, format!("unknown line kind {kind:?}")));
        }
        let names = names.as_ref().ok_or_else(|| syntax(line, "ballot before the candidates line"))?;
        let m = multiplicity(line, head_words.next().unwrap_or(""))?;
        if head_words.next().is_some() {
            return Err(syntax(line, "unexpected text before ':'"));
        }
        let preference = if kind == "order" { parse_order(line, body, names)? } else { parse_table(line, body, names)? };
        ballots.push(Ballot { preference, multiplicity: m });
    }
    let names = names.ok_or_else(|| syntax(content_lines(text).next().map_or(1, |l| l.0), "missing candidates line"))?;
    Ok(Election::new(names.list, ballots).expect("validated while parsing"))
}

fn preference_text(p: &Preference, names: &[Candidate]) -> String {
    match p {
        Preference::Order(o) => o.iter().map(|&c| names[c].as_str()).collect::<Vec<_>>().join(" > "),
        Preference::Table(t) => {
            let n = names.len();
            let mut parts = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let (w, l) = if t.prefers(a, b) { (a, b) } else { (b, a) };
                    parts.push(format!("{}>{}", names[w], names[l]));
                }
            }
            parts.join(", ")
        }
    }
}

/// One ballot line without the newline.
pub fn ballot_line(b: &Ballot, names: &[Candidate]) -> String {
    let kind = match b.preference {
        Preference::Order(_) => "order",
        Preference::Table(_) => "table",
    };
    format!("{kind} {}: {}", b.multiplicity, preference_text(&b.preference, names))
}

/// Writes an election file; implicit voters are written out explicitly.
pub fn serialize_election(e: &Election) -> String {
    let names = e.candidates();
    let mut out = String::from("candidates:");
    for c in names {
        out.push(' ');
        out.push_str(c.as_str());
    }
    out.push('\n');
    for b in e.ballots() {
        out.push_str(&ballot_line(&b, names));
        out.push('\n');
    }
    out
}

/// Parses a file holding only a candidates line (the spoiler set).
pub fn parse_candidate_list(text: &str) -> Result<Vec<String>, ParseError> {
    let e = parse_election(text)?;
    if let Some((line, _)) = content_lines(text).find(|(_, l)| !l.starts_with("candidates")) {
        return Err(syntax(line, "a candidate list holds no ballots"));
    }
    Ok(e.candidates().iter().map(|c| c.as_str().to_string()).collect())
}

/// Parses a voter-pool file and re-indexes its ballots to the candidate
/// order of `base`; both files must name the same candidates.
pub fn parse_pool(text: &str, base: &Election) -> Result<Vec<Ballot>, ParseError> {
    let pool = parse_election(text)?;
    let line = content_lines(text).next().map_or(1, |l| l.0);
    let n = base.len();
    let mut map = Vec::with_capacity(n);
    for c in pool.candidates() {
        let i = base.index_of(c.as_str()).map_err(|_| ParseError::UnknownCandidate { line, name: c.to_string() })?;
        map.push(i);
    }
    if map.len() != n {
        return Err(syntax(line, format!("pool names {} candidates, the election {n}", map.len())));
    }
    Ok(pool
        .ballots()
        .map(|b| {
            let preference = match &b.preference {
                Preference::Order(o) => Preference::Order(o.iter().map(|&c| map[c]).collect()),
                Preference::Table(t) => {
                    let mut inv = vec![0; n];
                    for (i, &j) in map.iter().enumerate() {
                        inv[j] = i;
                    }
                    Preference::Table(PairTable::from_fn(n, |a, c| t.prefers(inv[a], inv[c])))
                }
            };
            Ballot { preference, multiplicity: b.multiplicity.clone() }
        })
        .collect())
}

/// Parses a graph file.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (line, l) in content_lines(text) {
        let (head, body) = l.split_once(':').ok_or_else(|| syntax(line, "expected a ':'"))?;
        match (head.trim(), n) {
            ("graph", None) => {
                n = Some(body.trim().parse().map_err(|_| syntax(line, format!("bad vertex count {:?}", body.trim())))?);
            }
            ("graph", Some(_)) => return Err(syntax(line, "second graph line")),
            ("edge", Some(n)) => {
                let words: Vec<&str> = body.split_whitespace().collect();
                let [u, v] = words[..] else {
                    return Err(syntax(line, "expected two vertices"));
                };
                let vertex = |w: &str| -> Result<usize, ParseError> {
                    let x: usize = w.parse().map_err(|_| syntax(line, format!("bad vertex {w:?}")))?;
                    if x == 0 || x > n {
                        return Err(ParseError::BadVertex { line, text: body.trim().to_string() });
                    }
                    Ok(x)
                };
                let (u, v) = (vertex(u)?, vertex(v)?);
                if u == v {
                    return Err(ParseError::BadVertex { line, text: body.trim().to_string() });
                }
                let e = (u.min(v), u.max(v));
                if edges.contains(&e) {
                    return Err(ParseError::DuplicateEdge { line, u: e.0, v: e.1 });
                }
                edges.push(e);
            }
            ("edge", None) => return Err(syntax(line, "edge before the graph line")),
            (other, _) => return Err(syntax(line, format!("unknown line kind {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| syntax(1, "missing graph line"))?;
    Ok(Graph::new(n, edges).expect("validated while parsing"))
}

pub fn serialize_graph(g: &Graph) -> String {
    g.to_string()
}

fn name_list(items: &[usize], names: &[Candidate]) -> String {
    items.iter().map(|&c| format!(" {}", names[c])).collect()
}

/// Nonzero per-line counts as ` line:count`, lines numbered from 1.
fn line_counts(counts: &[BigUint]) -> String {
    counts
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!(" {}:{c}", i + 1))
        .collect()
}

/// The witness block printed after `YES`. Voter lines and unit voters are
/// numbered from 1.
pub fn witness_text(w: &Witness, names: &[Candidate]) -> String {
    match w {
        Witness::AddedCandidates(v) => format!("add:{}\n", name_list(v, names)),
        Witness::DeletedCandidates(v) => format!("delete:{}\n", name_list(v, names)),
        Witness::CandidatePartition { first, second } => {
            format!("first:{}\nsecond:{}\n", name_list(first, names), name_list(second, names))
        }
        Witness::AddedVoters(c) => format!("add-voters:{}\n", line_counts(c)),
        Witness::DeletedVoters(c) => format!("delete-voters:{}\n", line_counts(c)),
        Witness::VoterPartition(c) => format!("first-voters:{}\n", line_counts(c)),
        Witness::BribedBallots(v) => {
            if v.is_empty() {
                return "bribe:\n".into();
            }
            v.iter().map(|(i, p)| format!("bribe: {} {}\n", i + 1, preference_text(p, names))).collect()
        }
        Witness::Flips(v) => {
            if v.is_empty() {
                return "flip:\n".into();
            }
            v.iter().map(|&(i, a, b)| format!("flip: {} {} {}\n", i + 1, names[a], names[b])).collect()
        }
    }
}
