//! Positive not-all-equal 3-SAT instances in DIMACS CNF syntax.
//!
//! Negation has no representation here: a negative literal in the input is a
//! validation error, not something the parser carries along.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default largest variable count accepted by [`brute_force_nae`].
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

/// A positive NAE-3-SAT formula. Variables are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaeFormula {
    num_vars: usize,
    clauses: Vec<[usize; 3]>,
}

impl NaeFormula {
    /// Builds a formula, enforcing the occurrence profile when `strict`.
    pub fn new(num_vars: usize, clauses: Vec<[usize; 3]>, strict: bool) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::invalid("formula must have at least one variable"));
        }
        for (ci, clause) in clauses.iter().enumerate() {
            for &v in clause {
                if v == 0 || v > num_vars {
                    return Err(Error::VariableOutOfRange { var: v, num_vars });
                }
            }
            check_distinct(ci + 1, clause)?;
        }
        let f = NaeFormula { num_vars, clauses };
        if strict {
            f.check_strict()?;
        }
        Ok(f)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    /// Occurrence count of every variable, indexed from 0 (variable 1).
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for clause in &self.clauses {
            for &v in clause {
                occ[v - 1] += 1;
            }
        }
        occ
    }

    pub fn check_strict(&self) -> Result<()> {
        match self.occurrences().iter().position(|&c| c != 4) {
            Some(i) => Err(Error::OccurrenceCount { var: i + 1, count: self.occurrences()[i] }),
            None => Ok(()),
        }
    }

    pub fn is_strict(&self) -> bool {
        self.check_strict().is_ok()
    }

    /// Clause indices (0-based) that contain variable `var` (1-based).
    pub fn clauses_of(&self, var: usize) -> Vec<usize> {
        (0..self.clauses.len()).filter(|&c| self.clauses[c].contains(&var)).collect()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for [a, b, c] in &self.clauses {
            out.push_str(&format!("{a} {b} {c} 0\n"));
        }
        out
    }
}

fn check_distinct(clause: usize, lits: &[usize]) -> Result<()> {
    for i in 0..lits.len() {
        if lits[..i].contains(&lits[i]) {
            return Err(Error::RepeatedVariable { clause, var: lits[i] });
        }
    }
    Ok(())
}

/// Truth values indexed from 0 (variable 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of variable `var` (1-based).
    pub fn value(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn complement(&self) -> Assignment {
        Assignment(self.0.iter().map(|b| !b).collect())
    }

    /// `TFF`-style rendering.
    pub fn to_letters(&self) -> String {
        self.0.iter().map(|&b| if b { 'T' } else { 'F' }).collect()
    }

    pub fn from_letters(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'T' | 't' | '1' => Ok(true),
                'F' | 'f' | '0' => Ok(false),
                other => Err(Error::invalid(format!("bad truth value {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }
}

/// Parses DIMACS CNF text into a positive NAE formula.
///
/// In lax mode only positivity, arity 3 and distinct variables per clause are
/// enforced; strict mode also requires every variable to occur exactly 4 times.
pub fn parse_nae_dimacs(text: &str, strict: bool) -> Result<NaeFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<[usize; 3]> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut last_pos = (1, 1);

    for (li, line) in text.lines().enumerate() {
        let lineno = li + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(lineno, 1, "duplicate problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax(lineno, 1, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2].parse::<usize>().map_err(|_| syntax(lineno, col_of(line, parts[2]), "bad variable count"))?;
            let m = parts[3].parse::<usize>().map_err(|_| syntax(lineno, col_of(line, parts[3]), "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(syntax(lineno, 1, "clause before the problem line"));
        };
        for token in tokens(line) {
            let (col, tok) = token;
            last_pos = (lineno, col);
            let lit: i64 = tok.parse().map_err(|_| syntax(lineno, col, &format!("bad literal {tok:?}")))?;
            if lit == 0 {
                let ci = clauses.len() + 1;
                if current.len() != 3 {
                    return Err(Error::ClauseArity { clause: ci, arity: current.len() });
                }
                check_distinct(ci, &current)?;
                clauses.push([current[0], current[1], current[2]]);
                current.clear();
            } else if lit < 0 {
                return Err(Error::NegativeLiteral { line: lineno, literal: lit });
            } else {
                let v = lit as usize;
                if v > n {
                    return Err(Error::VariableOutOfRange { var: v, num_vars: n });
                }
                current.push(v);
            }
        }
    }

    let Some((n, m)) = header else {
        return Err(syntax(1, 1, "missing problem line"));
    };
    if !current.is_empty() {
        return Err(syntax(last_pos.0, last_pos.1, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(syntax(last_pos.0, last_pos.1, &format!("header announces {m} clauses, found {}", clauses.len())));
    }
    NaeFormula::new(n, clauses, strict)
}

fn syntax(line: usize, col: usize, msg: &str) -> Error {
    Error::Syntax { line, col, msg: msg.to_string() }
}

fn col_of(line: &str, tok: &str) -> usize {
    line.find(tok).map_or(1, |i| i + 1)
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start().len();
        offset += skip;
        rest = &rest[skip..];
        if rest.is_empty() {
            return None;
        }
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..len];
        let col = offset + 1;
        offset += len;
        rest = &rest[len..];
        Some((col, tok))
    })
}

/// True iff every clause has at least one true and one false variable.
pub fn eval_nae(f: &NaeFormula, a: &Assignment) -> Result<bool> {
    if a.len() != f.num_vars {
        return Err(Error::LengthMismatch { expected: f.num_vars, got: a.len() });
    }
    Ok(f.clauses.iter().all(|clause| {
        let t = clause.iter().filter(|&&v| a.value(v)).count();
        t != 0 && t != 3
    }))
}

/// Exhaustive NAE search with the default cap.
pub fn brute_force_nae(f: &NaeFormula) -> Result<Option<Assignment>> {
    brute_force_nae_capped(f, DEFAULT_BRUTE_FORCE_CAP)
}

/// Scans assignments in lexicographic order (variable 1 most significant,
/// false before true) and returns the first NAE-satisfying one.
pub fn brute_force_nae_capped(f: &NaeFormula, cap: usize) -> Result<Option<Assignment>> {
    let n = f.num_vars;
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let masks: Vec<u32> = f
        .clauses
        .iter()
        .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << (n - v)))
        .collect();
    for bits in 0u64..(1u64 << n) {
        let bits = bits as u32;
        if masks.iter().all(|&m| bits & m != 0 && bits & m != m) {
            let values = (1..=n).map(|v| bits >> (n - v) & 1 == 1).collect();
            return Ok(Some(Assignment(values)));
        }
    }
    Ok(None)
}

/// Random strict instance: every variable occurs exactly 4 times. `n` must be
/// a multiple of 3 so that the 4n occurrences split into 3-clauses.
pub fn random_strict_formula<R: Rng>(n: usize, rng: &mut R) -> Result<NaeFormula> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::invalid(format!("strict instances need a positive multiple of 3 variables, got {n}")));
    }
    let mut slots: Vec<usize> = (1..=n).flat_map(|v| [v; 4]).collect();
    for _ in 0..10_000 {
        slots.shuffle(rng);
        let clauses: Vec<[usize; 3]> = slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        if clauses.iter().all(|c| c[0] != c[1] && c[1] != c[2] && c[0] != c[2]) {
            return NaeFormula::new(n, clauses, true);
        }
    }
    Err(Error::invalid("could not draw a strict instance"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_COPIES: &str = "p cnf 3 4\n1 2 3 0\n1 2 3 0\n1 2 3 0\n1 2 3 0\n";

    #[test]
    fn parses_four_copies_strict() {
        let f = parse_nae_dimacs(FOUR_COPIES, true).unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.clauses(), &[[1, 2, 3]; 4]);
        assert!(f.is_strict());
    }

    #[test]
    fn rejects_negative_literal() {
        let err = parse_nae_dimacs("p cnf 2 1\n1 -2 2 0\n", false).unwrap_err();
        assert_eq!(err, Error::NegativeLiteral { line: 2, literal: -2 });
    }

    #[test]
    fn strict_occurrence_count() {
        let text = "p cnf 3 3\n1 2 3 0\n1 2 3 0\n1 2 3 0\n";
        assert_eq!(parse_nae_dimacs(text, true).unwrap_err(), Error::OccurrenceCount { var: 1, count: 3 });
        assert!(parse_nae_dimacs(text, false).is_ok());
    }

    #[test]
    fn arity_and_repeats() {
        assert!(matches!(
            parse_nae_dimacs("p cnf 3 1\n1 2 0\n", false),
            Err(Error::ClauseArity { clause: 1, arity: 2 })
        ));
        assert!(matches!(
            parse_nae_dimacs("p cnf 3 1\n1 2 1 0\n", false),
            Err(Error::RepeatedVariable { clause: 1, var: 1 })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_nae_dimacs("p cnf 3 1\n1 x 3 0\n", false) {
            Err(Error::Syntax { line: 2, col: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_nae_dimacs("1 2 3 0\n", false), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(parse_nae_dimacs("p cnf 3 1\n1 2 3\n", false), Err(Error::Syntax { .. })));
        assert!(matches!(parse_nae_dimacs("p cnf 3 2\n1 2 3 0\n", false), Err(Error::Syntax { .. })));
    }

    #[test]
    fn clauses_may_span_lines_and_comments() {
        let f = parse_nae_dimacs("c hello\np cnf 3 1\n1 2\n3 0\n", false).unwrap();
        assert_eq!(f.clauses(), &[[1, 2, 3]]);
    }

    #[test]
    fn eval_examples() {
        let one = NaeFormula::new(3, vec![[1, 2, 3]], false).unwrap();
        assert!(eval_nae(&one, &Assignment(vec![true, false, false])).unwrap());
        assert!(!eval_nae(&one, &Assignment(vec![true, true, true])).unwrap());
        let four = parse_nae_dimacs(FOUR_COPIES, true).unwrap();
        assert!(eval_nae(&four, &Assignment(vec![true, false, true])).unwrap());
        assert_eq!(
            eval_nae(&four, &Assignment(vec![true])),
            Err(Error::LengthMismatch { expected: 3, got: 1 })
        );
    }

    #[test]
    fn brute_force_cap() {
        let f = NaeFormula::new(1, vec![], false).unwrap();
        assert_eq!(brute_force_nae_capped(&f, 0), Err(Error::CapExceeded { size: 1, cap: 0 }));
    }

    #[test]
    fn random_strict_is_strict() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3, 6, 9] {
            let f = random_strict_formula(n, &mut rng).unwrap();
            assert!(f.is_strict());
            assert_eq!(3 * f.clauses().len(), 4 * n);
        }
        assert!(random_strict_formula(4, &mut rng).is_err());
    }

    #[test]
    fn letters_round_trip() {
        let a = Assignment::from_letters("TFT").unwrap();
        assert_eq!(a.to_letters(), "TFT");
        assert_eq!(Assignment::from_letters("1,0").unwrap(), Assignment(vec![true, false]));
    }
}
