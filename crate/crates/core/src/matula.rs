//! Matula numbering of rooted trees.
//!
//! `1` is the single node; a root whose subtrees have numbers `i_1..i_k` is
//! `p_(i_1) · ... · p_(i_k)`. Height under `H(p_i) = H(i) + 1` is the edge count.
//!
//! Text form, children in ascending order of their numbers:
//!
//! ```text
//! tree := "(" tree* ")"
//! ```
//!
//! so `1` is `()`, `2` is `(())` and `4` is `(()())`.

use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::factor;
use crate::primality::{PrimeError, PrimeTable, DEFAULT_SIEVE_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatulaError {
    #[error("Matula numbers start at 1")]
    Zero,
    #[error("tree text, byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("Matula number of this tree exceeds 64 bits")]
    Overflow,
    #[error(transparent)]
    Prime(#[from] PrimeError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    children: Vec<RootedTree>,
}

impl RootedTree {
    pub fn leaf() -> Self {
        RootedTree { children: Vec::new() }
    }

    /// Children are kept in the given order; use [`canonical`](Self::canonical)
    /// to compare trees as unordered.
    pub fn with_children(children: Vec<RootedTree>) -> Self {
        RootedTree { children }
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(RootedTree::node_count).sum::<usize>()
    }

    pub fn edge_count(&self) -> usize {
        self.node_count() - 1
    }

    /// Order-independent form: children sorted structurally, recursively.
    pub fn canonical(&self) -> RootedTree {
        let mut children: Vec<RootedTree> = self.children.iter().map(RootedTree::canonical).collect();
        children.sort_by_cached_key(|c| c.to_string());
        RootedTree { children }
    }

    /// True when no node has two isomorphic subtrees.
    pub fn is_identity(&self) -> bool {
        let c = self.canonical();
        c.no_repeated_children()
    }

    fn no_repeated_children(&self) -> bool {
        self.children.windows(2).all(|w| w[0] != w[1]) && self.children.iter().all(RootedTree::no_repeated_children)
    }

    fn write_text(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.write_text(out);
        }
        out.push(')');
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(2 * self.node_count());
        self.write_text(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for RootedTree {
    type Err = MatulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes: Vec<(usize, u8)> = s.bytes().enumerate().filter(|(_, b)| !b.is_ascii_whitespace()).collect();
        let mut stack: Vec<Vec<RootedTree>> = Vec::new();
        let mut done: Option<RootedTree> = None;
        for &(pos, b) in &bytes {
            if done.is_some() {
                return Err(MatulaError::Parse { pos, message: "text after the root closed".into() });
            }
            match b {
                b'(' => stack.push(Vec::new()),
                b')' => {
                    let children = stack.pop().ok_or(MatulaError::Parse { pos, message: "unmatched `)`".into() })?;
                    let node = RootedTree { children };
                    match stack.last_mut() {
                        Some(parent) => parent.push(node),
                        None => done = Some(node),
                    }
                }
                other => {
                    return Err(MatulaError::Parse { pos, message: format!("unexpected `{}`", other as char) });
                }
            }
        }
        done.ok_or(MatulaError::Parse { pos: s.len(), message: "unclosed or empty tree".into() })
    }
}

/// Encoder/decoder sharing a growable prime table.
pub struct Codec {
    table: RwLock<PrimeTable>,
}

impl Codec {
    pub fn new(sieve_cap: u64) -> Result<Self, MatulaError> {
        Ok(Codec { table: RwLock::new(PrimeTable::sieve_with_cap(1 << 16, sieve_cap.max(1 << 16))?) })
    }

    fn index_of(&self, p: u64) -> Result<u64, MatulaError> {
        {
            let t = self.table.read().expect("table lock");
            if p <= t.limit() {
                return Ok(t.index_of(p)?.expect("factor is prime"));
            }
        }
        Ok(self.table.write().expect("table lock").index_of_extending(p)?.expect("factor is prime"))
    }

    fn nth(&self, i: u64) -> Result<u64, MatulaError> {
        if let Ok(p) = self.table.read().expect("table lock").nth(i) {
            return Ok(p);
        }
        Ok(self.table.write().expect("table lock").nth_extending(i)?)
    }

    /// The tree numbered m; children ascend by number.
    pub fn decode(&self, m: u64) -> Result<RootedTree, MatulaError> {
        if m == 0 {
            return Err(MatulaError::Zero);
        }
        let mut children = Vec::new();
        for (p, e) in factor::factorize(m) {
            let child = self.decode(self.index_of(p)?)?;
            for _ in 0..e {
                children.push(child.clone());
            }
        }
        Ok(RootedTree { children })
    }

    pub fn encode(&self, t: &RootedTree) -> Result<u64, MatulaError> {
        let mut m = 1u64;
        for c in &t.children {
            let p = self.nth(self.encode(c)?)?;
            m = m.checked_mul(p).ok_or(MatulaError::Overflow)?;
        }
        Ok(m)
    }

    /// m and, recursively, every prime index in its expansion are squarefree.
    pub fn is_identity_tree(&self, m: u64) -> Result<bool, MatulaError> {
        if m == 0 {
            return Err(MatulaError::Zero);
        }
        for (p, e) in factor::factorize(m) {
            if e > 1 || !self.is_identity_tree(self.index_of(p)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn shared() -> &'static Codec {
    static CODEC: OnceLock<Codec> = OnceLock::new();
    CODEC.get_or_init(|| Codec::new(DEFAULT_SIEVE_CAP).expect("default cap is valid"))
}

pub fn decode(m: u64) -> Result<RootedTree, MatulaError> {
    shared().decode(m)
}

pub fn encode(t: &RootedTree) -> Result<u64, MatulaError> {
    shared().encode(t)
}

pub fn is_identity_tree(m: u64) -> Result<bool, MatulaError> {
    shared().is_identity_tree(m)
}

/// Every rooted tree with exactly n nodes up to isomorphism, built
/// structurally (no numbering involved). `all_trees(n)[k]` lists size k.
pub fn all_trees(n: usize) -> Vec<Vec<RootedTree>> {
    let mut by_size: Vec<Vec<RootedTree>> = vec![Vec::new(); n + 1];
    if n == 0 {
        return by_size;
    }
    by_size[1].push(RootedTree::leaf());
    for size in 2..=n {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        forests(&by_size, size - 1, (size - 1, usize::MAX), &mut chosen, &mut out);
        by_size[size] = out.into_iter().map(RootedTree::with_children).collect();
    }
    by_size
}

// Multisets of trees totalling `remaining` nodes, drawn in non-increasing
// (size, index) order so each multiset appears once.
fn forests(
    by_size: &[Vec<RootedTree>],
    remaining: usize,
    bound: (usize, usize),
    chosen: &mut Vec<RootedTree>,
    out: &mut Vec<Vec<RootedTree>>,
) {
    if remaining == 0 {
        out.push(chosen.clone());
        return;
    }
    for size in (1..=remaining.min(bound.0)).rev() {
        let limit = if size == bound.0 { bound.1.min(by_size[size].len().saturating_sub(1)) } else { by_size[size].len().saturating_sub(1) };
        if by_size[size].is_empty() {
            continue;
        }
        for idx in (0..=limit).rev() {
            chosen.push(by_size[size][idx].clone());
            forests(by_size, remaining - size, (size, idx), chosen, out);
            chosen.pop();
        }
    }
}
