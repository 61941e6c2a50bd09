//! Text format for systems, formulas, decision trees and basis files.
//!
//! Formulas are s-expressions: atoms `p<i>` / `p<i>'`, constants
//! `true`/`false`, connectives `and`, `or`, `not`, `xor`, `iff`. A system
//! file is
//!
//! ```text
//! vars <n>
//! init <formula>
//! trans <formula>
//! bad <formula>
//! ```
//!
//! Lines starting with `#` are comments. Decision trees are nested
//! `(node p<i> <low> <high>)` / `(leaf true|false)`; a basis file holds one
//! cube per line in the formula syntax.

use std::fmt;

use thiserror::Error;

use crate::dtree::DecisionTree;
use crate::formula::Formula;
use crate::system::TransitionSystem;
use crate::types::{Cube, CubeError, Literal, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Scope(#[from] crate::system::SystemError),
    #[error("tree: {0}")]
    Tree(#[from] crate::dtree::TreeError),
    #[error("not a cube: {0}")]
    NotACube(String),
    #[error("inconsistent cube: {0}")]
    Cube(#[from] CubeError),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    LParen,
    RParen,
    Word(String),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Token,
    line: usize,
    col: usize,
}

struct Lexer {
    toks: Vec<Spanned>,
    pos: usize,
}

fn err(line: usize, col: usize, msg: impl fmt::Display) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.to_string() }
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        let mut toks = Vec::new();
        for (li, raw_line) in text.lines().enumerate() {
            let line = li + 1;
            let content = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            };
            let mut chars = content.char_indices().peekable();
            while let Some(&(ci, c)) = chars.peek() {
                let col = ci + 1;
                match c {
                    '(' => {
                        toks.push(Spanned { tok: Token::LParen, line, col });
                        chars.next();
                    }
                    ')' => {
                        toks.push(Spanned { tok: Token::RParen, line, col });
                        chars.next();
                    }
                    c if c.is_whitespace() => {
                        chars.next();
                    }
                    _ => {
                        let mut word = String::new();
                        while let Some(&(_, c)) = chars.peek() {
                            if c.is_whitespace() || c == '(' || c == ')' {
                                break;
                            }
                            word.push(c);
                            chars.next();
                        }
                        toks.push(Spanned { tok: Token::Word(word), line, col });
                    }
                }
            }
        }
        Ok(Lexer { toks, pos: 0 })
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> (usize, usize) {
        self.toks
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1))
    }

    fn expect_word(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.next() {
            Some(Spanned { tok: Token::Word(w), line, col }) => Ok((w, line, col)),
            Some(Spanned { line, col, .. }) => Err(err(line, col, format!("expected {what}"))),
            None => {
                let (line, col) = self.end_pos();
                Err(err(line, col, format!("expected {what}, found end of input")))
            }
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let (w, line, col) = self.expect_word(&format!("`{kw}`"))?;
        if w == kw {
            Ok(())
        } else {
            Err(err(line, col, format!("expected `{kw}`, found `{w}`")))
        }
    }
}

fn parse_atom(word: &str, line: usize, col: usize) -> Result<Var, ParseError> {
    let rest = word
        .strip_prefix('p')
        .ok_or_else(|| err(line, col, format!("expected a variable `p<i>`, found `{word}`")))?;
    let digits_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let (digits, primes) = rest.split_at(digits_end);
    if digits.is_empty() || !primes.chars().all(|c| c == '\'') {
        return Err(err(line, col, format!("malformed variable `{word}`")));
    }
    let index: u32 = digits
        .parse()
        .map_err(|_| err(line, col, format!("variable index out of range in `{word}`")))?;
    Ok(Var::with_copy(index, primes.len() as u32))
}

fn parse_formula_tokens(lex: &mut Lexer) -> Result<Formula, ParseError> {
    let t = match lex.next() {
        Some(t) => t,
        None => {
            let (line, col) = lex.end_pos();
            return Err(err(line, col, "expected a formula, found end of input"));
        }
    };
    match t.tok {
        Token::Word(w) => match w.as_str() {
            "true" => Ok(Formula::Const(true)),
            "false" => Ok(Formula::Const(false)),
            _ => Ok(Formula::Atom(parse_atom(&w, t.line, t.col)?)),
        },
        Token::LParen => {
            let (op, line, col) = lex.expect_word("a connective")?;
            let mut args = Vec::new();
            while let Some(peeked) = lex.peek() {
                if peeked.tok == Token::RParen {
                    break;
                }
                args.push(parse_formula_tokens(lex)?);
            }
            match lex.next() {
                Some(Spanned { tok: Token::RParen, .. }) => {}
                _ => {
                    let (l, c) = lex.end_pos();
                    return Err(err(l, c, "missing `)`"));
                }
            }
            match (op.as_str(), args.len()) {
                ("not", 1) => Ok(args.pop().unwrap().negated()),
                ("not", k) => Err(err(line, col, format!("`not` takes 1 argument, found {k}"))),
                ("and", _) => Ok(Formula::and(args)),
                ("or", _) => Ok(Formula::or(args)),
                ("xor", 2) => {
                    let b = args.pop().unwrap();
                    let a = args.pop().unwrap();
                    Ok(Formula::Xor(Box::new(a), Box::new(b)))
                }
                ("iff", 2) => {
                    let b = args.pop().unwrap();
                    let a = args.pop().unwrap();
                    Ok(Formula::Iff(Box::new(a), Box::new(b)))
                }
                ("xor" | "iff", k) => {
                    Err(err(line, col, format!("`{op}` takes 2 arguments, found {k}")))
                }
                _ => Err(err(line, col, format!("unknown connective `{op}`"))),
            }
        }
        Token::RParen => Err(err(t.line, t.col, "unexpected `)`")),
    }
}

/// Parses a single formula; trailing tokens are an error.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut lex = Lexer::new(text)?;
    let f = parse_formula_tokens(&mut lex)?;
    if let Some(t) = lex.peek() {
        return Err(err(t.line, t.col, "trailing input after formula"));
    }
    Ok(f)
}

/// Parses a system file: `vars <n>` then `init`, `trans`, `bad` sections.
pub fn parse_system(text: &str) -> Result<TransitionSystem, ParseError> {
    let mut lex = Lexer::new(text)?;
    lex.expect_keyword("vars")?;
    let (nw, line, col) = lex.expect_word("a variable count")?;
    let n: u32 = nw
        .parse()
        .map_err(|_| err(line, col, format!("invalid variable count `{nw}`")))?;
    lex.expect_keyword("init")?;
    let init = parse_formula_tokens(&mut lex)?;
    lex.expect_keyword("trans")?;
    let tr = parse_formula_tokens(&mut lex)?;
    lex.expect_keyword("bad")?;
    let bad = parse_formula_tokens(&mut lex)?;
    if let Some(t) = lex.peek() {
        return Err(err(t.line, t.col, "trailing input after `bad` section"));
    }
    Ok(TransitionSystem::new(n, init, tr, bad)?)
}

/// Prints a system in the file format, with an optional leading comment block.
pub fn print_system(ts: &TransitionSystem, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("vars {}\n", ts.n()));
    out.push_str(&format!("init {}\n", ts.init));
    out.push_str(&format!("trans {}\n", ts.tr));
    out.push_str(&format!("bad {}\n", ts.bad));
    out
}

fn parse_tree_tokens(lex: &mut Lexer) -> Result<DecisionTree, ParseError> {
    let t = match lex.next() {
        Some(t) => t,
        None => {
            let (line, col) = lex.end_pos();
            return Err(err(line, col, "expected a tree, found end of input"));
        }
    };
    let (line, col) = (t.line, t.col);
    if t.tok != Token::LParen {
        return Err(err(line, col, "expected `(`"));
    }
    let (kind, kline, kcol) = lex.expect_word("`node` or `leaf`")?;
    let tree = match kind.as_str() {
        "leaf" => {
            let (w, wl, wc) = lex.expect_word("`true` or `false`")?;
            match w.as_str() {
                "true" => DecisionTree::Leaf(true),
                "false" => DecisionTree::Leaf(false),
                _ => return Err(err(wl, wc, format!("expected `true` or `false`, found `{w}`"))),
            }
        }
        "node" => {
            let (w, wl, wc) = lex.expect_word("a variable")?;
            let var = parse_atom(&w, wl, wc)?;
            let low = parse_tree_tokens(lex)?;
            let high = parse_tree_tokens(lex)?;
            DecisionTree::Node { var, low: Box::new(low), high: Box::new(high) }
        }
        _ => return Err(err(kline, kcol, format!("expected `node` or `leaf`, found `{kind}`"))),
    };
    match lex.next() {
        Some(Spanned { tok: Token::RParen, .. }) => Ok(tree),
        _ => {
            let (l, c) = lex.end_pos();
            Err(err(l, c, "missing `)`"))
        }
    }
}

pub fn parse_tree(text: &str) -> Result<DecisionTree, ParseError> {
    let mut lex = Lexer::new(text)?;
    let tree = parse_tree_tokens(&mut lex)?;
    if let Some(t) = lex.peek() {
        return Err(err(t.line, t.col, "trailing input after tree"));
    }
    tree.validate()?;
    Ok(tree)
}

pub fn print_tree(tree: &DecisionTree) -> String {
    match tree {
        DecisionTree::Leaf(b) => format!("(leaf {b})"),
        DecisionTree::Node { var, low, high } => {
            format!("(node {var} {} {})", print_tree(low), print_tree(high))
        }
    }
}

/// Interprets a formula as a cube: a literal, `true`, or a conjunction of
/// literals.
pub fn formula_to_cube(f: &Formula) -> Result<Cube, ParseError> {
    fn literal_of(f: &Formula) -> Option<Literal> {
        match f {
            Formula::Atom(v) => Some(Literal::positive(*v)),
            Formula::Not(inner) => match **inner {
                Formula::Atom(v) => Some(Literal::negative(v)),
                _ => None,
            },
            _ => None,
        }
    }
    match f {
        Formula::Const(true) => Ok(Cube::top()),
        Formula::And(parts) => {
            let mut cube = Cube::top();
            for p in parts {
                let lit = literal_of(p).ok_or_else(|| ParseError::NotACube(p.to_string()))?;
                cube.insert(lit)?;
            }
            Ok(cube)
        }
        _ => literal_of(f)
            .map(Cube::unit)
            .ok_or_else(|| ParseError::NotACube(f.to_string())),
    }
}

/// Parses a basis file: one cube per line in the formula syntax.
pub fn parse_basis(text: &str) -> Result<Vec<Cube>, ParseError> {
    let mut cubes = Vec::new();
    for line in text.lines() {
        let content = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let f = parse_formula(content)?;
        cubes.push(formula_to_cube(&f)?);
    }
    Ok(cubes)
}

/// Reads `# key: value` comment lines from a generated file.
pub fn read_metadata_comments(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                out.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{State, Vocab};

    #[test]
    fn minimal_system_file() {
        let text = "vars 2\ninit (and (not p0) (not p1))\ntrans (iff p0' p0)\nbad p1\n";
        let ts = parse_system(text).unwrap();
        assert_eq!(ts.n(), 2);
        assert_eq!(ts.bad, Formula::Atom(Var::new(1)));
    }

    #[test]
    fn primed_var_in_init_is_rejected() {
        let text = "vars 2\ninit p0'\ntrans true\nbad false\n";
        assert!(matches!(parse_system(text), Err(ParseError::Scope(_))));
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let text = "vars 2\ninit (and p0 q1)\ntrans true\nbad false\n";
        match parse_system(text) {
            Err(ParseError::Syntax { line, col, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(col, 14);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "vars 3\ninit (and (not p0) (not p1) (not p2))\ntrans (or (and (iff p0' p0) (iff p1' p1) (iff p2' p2)) (xor p0' p1'))\nbad (or p0 (and p1 p2))\n";
        let ts = parse_system(text).unwrap();
        let printed = print_system(&ts, &[]);
        let ts2 = parse_system(&printed).unwrap();
        assert_eq!(ts, ts2);
        assert_eq!(printed, print_system(&ts2, &[]));
    }

    #[test]
    fn comments_are_skipped_and_readable() {
        let text =
            "# family: demo\n# s: 1\nvars 1\ninit (not p0) # inline note\ntrans true\nbad p0\n";
        let ts = parse_system(text).unwrap();
        assert_eq!(ts.n(), 1);
        let meta = read_metadata_comments(text);
        assert_eq!(meta[0], ("family".to_string(), "demo".to_string()));
        assert_eq!(meta[1], ("s".to_string(), "1".to_string()));
    }

    #[test]
    fn tree_round_trip_and_primed_atoms() {
        let text = "(node p0 (leaf false) (node p2 (leaf true) (leaf false)))";
        let t = parse_tree(text).unwrap();
        assert_eq!(print_tree(&t), text);
        assert_eq!(t.size(), 3);
        let f = parse_formula("(and p1' (not p0))").unwrap();
        let v = Vocab::pair(2);
        let s = State::new(vec![false, false, false, true]);
        assert_eq!(f.eval(&s, &v), Ok(true));
    }

    #[test]
    fn basis_file_parses_cubes() {
        let text = "(and p0 (not p1))\ntrue\np2\n";
        let cubes = parse_basis(text).unwrap();
        assert_eq!(cubes.len(), 3);
        assert_eq!(cubes[1], Cube::top());
        assert!(parse_basis("(or p0 p1)\n").is_err());
    }
}
