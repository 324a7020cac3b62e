use std::collections::HashMap;
use std::fmt;

use crate::{KnotError, Result};

/// One passage through a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeToken {
    pub id: usize,
    pub over: bool,
    /// +1 or -1.
    pub sign: i8,
}

impl fmt::Display for CodeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ou = if self.over { 'O' } else { 'U' };
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "{ou}{}{s}", self.id)
    }
}

/// Signed over/under Gauss code of a one-component knot diagram.
///
/// Text form: whitespace-separated tokens such as `O1+ U2+ O3+ U1+ O2+ U3+`.
/// The empty string is the crossingless unknot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KnotDiagramCode {
    tokens: Vec<CodeToken>,
}

impl KnotDiagramCode {
    pub fn new(tokens: Vec<CodeToken>) -> Result<Self> {
        let mut seen: HashMap<usize, (usize, CodeToken)> = HashMap::new();
        for (pos, tok) in tokens.iter().enumerate() {
            if tok.sign != 1 && tok.sign != -1 {
                return Err(parse_err(pos, format!("bad sign on crossing {}", tok.id)));
            }
            match seen.get_mut(&tok.id) {
                None => {
                    seen.insert(tok.id, (1, *tok));
                }
                Some((count, prev)) => {
                    *count += 1;
                    if *count > 2 {
                        return Err(parse_err(pos, format!("crossing {} appears more than twice", tok.id)));
                    }
                    if prev.over == tok.over {
                        let which = if tok.over { "over" } else { "under" };
                        return Err(parse_err(
                            pos,
                            format!("crossing {} is {which} twice", tok.id),
                        ));
                    }
                    if prev.sign != tok.sign {
                        return Err(parse_err(pos, format!("crossing {} has inconsistent signs", tok.id)));
                    }
                }
            }
        }
        if let Some((id, _)) = seen.iter().filter(|(_, (c, _))| *c == 1).min_by_key(|(id, _)| **id) {
            let pos = tokens.iter().position(|t| t.id == *id).unwrap();
            return Err(parse_err(pos, format!("crossing {id} appears once")));
        }
        Ok(Self { tokens })
    }

    pub fn unknot() -> Self {
        Self { tokens: Vec::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (pos, raw) in text.split_whitespace().enumerate() {
            let mut chars = raw.chars();
            let over = match chars.next() {
                Some('O') | Some('o') => true,
                Some('U') | Some('u') => false,
                _ => return Err(parse_err(pos, format!("`{raw}` must start with O or U"))),
            };
            let rest = chars.as_str();
            let (digits, sign) = match rest.chars().last() {
                Some('+') => (&rest[..rest.len() - 1], 1),
                Some('-') => (&rest[..rest.len() - 1], -1),
                _ => return Err(parse_err(pos, format!("`{raw}` must end with + or -"))),
            };
            let id = digits
                .parse()
                .map_err(|_| parse_err(pos, format!("`{raw}` has no crossing number")))?;
            tokens.push(CodeToken { id, over, sign });
        }
        Self::new(tokens)
    }

    pub fn tokens(&self) -> &[CodeToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn crossings(&self) -> usize {
        self.tokens.len() / 2
    }

    /// Both positions of crossing `id`, in traversal order.
    pub fn positions(&self, id: usize) -> Option<(usize, usize)> {
        let mut it = self
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.id == id)
            .map(|(p, _)| p);
        Some((it.next()?, it.next()?))
    }

    /// Sum of crossing signs.
    pub fn writhe(&self) -> i64 {
        self.tokens.iter().map(|t| i64::from(t.sign)).sum::<i64>() / 2
    }

    /// Relabels crossings 1, 2, ... in order of first appearance.
    pub fn normalized(&self) -> Self {
        let mut ids = HashMap::new();
        let tokens = self
            .tokens
            .iter()
            .map(|t| {
                let next = ids.len() + 1;
                CodeToken {
                    id: *ids.entry(t.id).or_insert(next),
                    ..*t
                }
            })
            .collect();
        Self { tokens }
    }

    /// Same diagram read from another base point.
    pub fn rotated(&self, by: usize) -> Self {
        let mut tokens = self.tokens.clone();
        if !tokens.is_empty() {
            let k = by % tokens.len();
            tokens.rotate_left(k);
        }
        Self { tokens }
    }
}

impl fmt::Display for KnotDiagramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.tokens.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for KnotDiagramCode {
    type Err = KnotError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_err(position: usize, message: String) -> KnotError {
    KnotError::Parse { position, message }
}
