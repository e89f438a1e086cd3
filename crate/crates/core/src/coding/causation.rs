//! Cause and effect chains from connectives such as "because" or "leads to".

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{Codebook, Direction};
use crate::quantify::Entity;
use crate::text::{is_stopword, tokenize, LoweredText};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalLink {
    pub cause: String,
    pub effect: String,
    pub connective: String,
    pub cause_span: (usize, usize),
    pub effect_span: (usize, usize),
    pub connective_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalChain {
    pub codes: Vec<String>,
    /// One link per adjacent pair of codes.
    pub links: Vec<CausalLink>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Clause(usize, usize),
    Connective(usize, usize, Direction),
}

#[derive(Debug, Clone)]
struct ClauseCode {
    code: String,
    key: String,
    span: (usize, usize),
}

static BOUNDARY: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[,;.!?:]|\band\b|\bbut\b|\bthen\b").unwrap());

/// Splits lowered text into clauses and connectives, in order. Offsets are
/// chars.
fn pieces(text: &str, codebook: &Codebook) -> Vec<Piece> {
    let lowered = LoweredText::new(text);
    let lower = &lowered.lower;
    let mut cuts: Vec<(usize, usize, Option<Direction>)> = Vec::new();
    for m in codebook.connective_regex().find_iter(lower) {
        let dir = codebook.direction_of(m.as_str());
        let (s, e) = lowered.char_span(m.start(), m.end());
        cuts.push((s, e, dir));
    }
    for m in BOUNDARY.find_iter(lower) {
        let (s, e) = lowered.char_span(m.start(), m.end());
        if !cuts.iter().any(|&(cs, ce, _)| s < ce && cs < e) {
            cuts.push((s, e, None));
        }
    }
    cuts.sort_by_key(|c| c.0);

    let mut out = Vec::new();
    let mut pos = 0;
    for (s, e, dir) in cuts {
        if s > pos {
            out.push(Piece::Clause(pos, s));
        }
        if let Some(d) = dir {
            out.push(Piece::Connective(s, e, d));
        } else {
            // a plain boundary still separates clauses
            out.push(Piece::Clause(s, s));
        }
        pos = e;
    }
    if pos < lowered.char_len {
        out.push(Piece::Clause(pos, lowered.char_len));
    }
    out
}

fn clause_code(text: &str, span: (usize, usize), entities: &[Entity]) -> Option<ClauseCode> {
    let (s, e) = span;
    let mut best: Option<(&Entity, (usize, usize))> = None;
    for ent in entities {
        let Some(&m) = ent.mentions.iter().find(|&&(ms, me)| ms >= s && me <= e) else {
            continue;
        };
        let better = match best {
            None => true,
            Some((b, bm)) => ent.salience > b.salience || (ent.salience == b.salience && m.0 < bm.0),
        };
        if better {
            best = Some((ent, m));
        }
    }
    if let Some((ent, m)) = best {
        return Some(ClauseCode {
            code: crate::text::slice_chars(text, m.0, m.1).to_lowercase(),
            key: ent.lemma.clone(),
            span: m,
        });
    }
    tokenize(text)
        .into_iter()
        .filter(|t| t.start >= s && t.end <= e)
        .find(|t| t.is_alphabetic() && !is_stopword(&t.lower))
        .map(|t| ClauseCode {
            key: t.lemma(),
            span: (t.start, t.end),
            code: t.lower,
        })
}

/// The non-empty clause directly beside piece `at`, if any.
fn adjacent_clause(pieces: &[Piece], at: usize, step: isize) -> Option<(usize, usize)> {
    let i = at.checked_add_signed(step)?;
    match pieces.get(i)? {
        Piece::Clause(s, e) if e > s => Some((*s, *e)),
        _ => None,
    }
}

/// Cause and effect links in order of their connectives.
pub fn causal_links(text: &str, entities: &[Entity], codebook: &Codebook) -> Vec<CausalLink> {
    let ps = pieces(text, codebook);
    let mut links = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        let Piece::Connective(cs, ce, dir) = *p else {
            continue;
        };
        let before = adjacent_clause(&ps, i, -1);
        let after = adjacent_clause(&ps, i, 1);
        let (cause_span, effect_span) = match (dir, before, after) {
            (Direction::CauseFirst, Some(b), Some(a)) => (a, b),
            // "Because of exams, I'm anxious": the effect follows the cause clause
            (Direction::CauseFirst, None, Some(a)) => {
                let after_idx = ps.iter().position(|q| *q == Piece::Clause(a.0, a.1)).unwrap();
                let mut next = None;
                for q in &ps[after_idx + 1..] {
                    match *q {
                        Piece::Clause(s, e) if e > s => {
                            next = Some((s, e));
                            break;
                        }
                        Piece::Clause(..) => {}
                        Piece::Connective(..) => break,
                    }
                }
                match next {
                    Some(n) => (a, n),
                    None => continue,
                }
            }
            (Direction::EffectFirst, Some(b), Some(a)) => (b, a),
            _ => continue,
        };
        let (Some(cause), Some(effect)) = (
            clause_code(text, cause_span, entities),
            clause_code(text, effect_span, entities),
        ) else {
            continue;
        };
        if cause.key == effect.key {
            continue;
        }
        links.push((cause, effect, (cs, ce)));
    }
    links
        .into_iter()
        .map(|(c, e, span)| CausalLink {
            cause: c.code,
            effect: e.code,
            connective: crate::text::slice_chars(text, span.0, span.1),
            cause_span: c.span,
            effect_span: e.span,
            connective_span: span,
        })
        .collect()
}

/// Joins links into maximal chains: a link continues a chain when its cause
/// has the same lemma as the chain's last effect.
pub fn code_causation(text: &str, entities: &[Entity], codebook: &Codebook) -> Vec<CausalChain> {
    let links = causal_links(text, entities, codebook);
    let key = |code: &str| {
        let toks = tokenize(code);
        let refs: Vec<_> = toks.iter().collect();
        crate::quantify::phrase_lemma(&refs)
    };
    let cause_keys: Vec<String> = links.iter().map(|l| key(&l.cause)).collect();
    let effect_keys: Vec<String> = links.iter().map(|l| key(&l.effect)).collect();
    let n = links.len();
    let has_incoming: Vec<bool> = (0..n)
        .map(|j| (0..n).any(|i| i != j && effect_keys[i] == cause_keys[j]))
        .collect();

    let mut used = vec![false; n];
    let mut chains = Vec::new();
    let starts: Vec<usize> = (0..n)
        .filter(|&i| !has_incoming[i])
        .chain(0..n)
        .collect();
    for start in starts {
        if used[start] {
            continue;
        }
        let mut path = vec![start];
        used[start] = true;
        loop {
            let last = *path.last().unwrap();
            match (0..n).find(|&j| !used[j] && cause_keys[j] == effect_keys[last]) {
                Some(j) => {
                    used[j] = true;
                    path.push(j);
                }
                None => break,
            }
        }
        let mut codes = vec![links[path[0]].cause.clone()];
        codes.extend(path.iter().map(|&i| links[i].effect.clone()));
        chains.push(CausalChain {
            codes,
            links: path.iter().map(|&i| links[i].clone()).collect(),
        });
    }
    chains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantify::extract_entities;

    fn chains(text: &str) -> Vec<Vec<String>> {
        let cb = Codebook::bundled();
        code_causation(text, &extract_entities(text), &cb)
            .into_iter()
            .map(|c| c.codes)
            .collect()
    }

    #[test]
    fn transitive_chain() {
        assert_eq!(
            chains("smoking cigarettes causes cancer and cancer causes lung damage"),
            vec![vec!["smoking cigarettes", "cancer", "lung damage"]]
        );
    }

    #[test]
    fn no_connective() {
        assert!(chains("I sleep badly").is_empty());
    }

    #[test]
    fn cause_first_direction() {
        assert_eq!(chains("I'm anxious because of exams"), vec![vec!["exams", "anxious"]]);
    }

    #[test]
    fn leading_because() {
        assert_eq!(chains("Because of exams, I'm anxious"), vec![vec!["exams", "anxious"]]);
    }

    #[test]
    fn spans_inside_text() {
        let text = "Debt leads to stress, and stress leads to insomnia.";
        let cb = Codebook::bundled();
        let n = text.chars().count();
        for c in code_causation(text, &extract_entities(text), &cb) {
            assert_eq!(c.links.len() + 1, c.codes.len());
            for l in c.links {
                for (s, e) in [l.cause_span, l.effect_span, l.connective_span] {
                    assert!(s < e && e <= n);
                }
            }
        }
    }
}
