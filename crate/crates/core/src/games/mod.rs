//! Bounded atomic games.
//!
//! A play starts with ∀ choosing an atom and ∃ answering with a network that
//! contains it; every later round is a cylindrifier demand. `rounds` counts the
//! initial move, so `G_1` is decided by the initial move alone.
//!
//! The solver works over an [`Arena`]: positions with a canonical key, ∀'s
//! non-null demands and ∃'s replies. ∃-wins are first attempted with a
//! restricted set of replies (a sound certificate), and only when that fails
//! is ∀ searched for exactly, against every reply.

mod graph;
mod hyper;
mod network;
mod script;

pub use graph::{solve_rainbow, GraphArena, GraphDemand, GraphMove};
pub use hyper::{network_hypergame, solve_hypergame, HyperArena, HyperConfig};
pub use network::{legal_extensions, Network, NetworkArena, NetworkDemand, NetworkMove};
pub use script::{cone_script, verify_script, ConeScript, Script, ScriptReport};

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Default cap on memo entries.
pub const STATE_BUDGET: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "Gk")]
    Gk,
    #[serde(rename = "Gmk")]
    Gmk,
    #[serde(rename = "boldGm")]
    BoldGm,
    #[serde(rename = "Hk")]
    Hk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub variant: Variant,
    pub rounds: usize,
    pub node_bound: Option<usize>,
    pub reuse: bool,
    pub hyperedge_len_bound: Option<usize>,
}

impl GameConfig {
    pub fn gk(rounds: usize) -> GameConfig {
        GameConfig { variant: Variant::Gk, rounds, node_bound: None, reuse: false, hyperedge_len_bound: None }
    }

    pub fn gmk(m: usize, rounds: usize) -> GameConfig {
        GameConfig { variant: Variant::Gmk, rounds, node_bound: Some(m), reuse: false, hyperedge_len_bound: None }
    }

    pub fn bold(m: usize, rounds: usize) -> GameConfig {
        GameConfig { variant: Variant::BoldGm, rounds, node_bound: Some(m), reuse: true, hyperedge_len_bound: None }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.rounds > 20 {
            return Err(Error::Precondition(format!("at most 20 rounds, got {}", self.rounds)));
        }
        match self.variant {
            Variant::Gk | Variant::Hk if self.reuse => Err(Error::Precondition("reuse only in boldGm".into())),
            Variant::BoldGm if !self.reuse => Err(Error::Precondition("boldGm requires reuse".into())),
            Variant::Gmk | Variant::BoldGm => match self.node_bound {
                Some(m) if m >= n => Ok(()),
                Some(m) => Err(Error::Precondition(format!("node bound {m} is below the dimension {n}"))),
                None => Err(Error::Precondition("node bound required".into())),
            },
            _ => Ok(()),
        }
    }

    /// Node cap: `m` for the bounded games, `rounds + n` otherwise (each round
    /// adds at most one node, so the cap never binds).
    pub fn limit(&self, n: usize) -> Limit {
        let cap = match self.variant {
            Variant::Gmk | Variant::BoldGm => self.node_bound.unwrap_or(n),
            _ => self.rounds + n,
        };
        Limit { cap, reuse: self.reuse }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limit {
    pub cap: usize,
    pub reuse: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    #[serde(rename = "∃")]
    Exists,
    #[serde(rename = "∀")]
    Forall,
}

/// The moves and replies of a game family.
pub trait Arena: Sync {
    type Pos: Clone + Send + Sync + Debug;
    type Move: Clone + Send + Sync + Debug;

    fn dim(&self) -> usize;
    /// ∀'s initial choices (atoms, up to isomorphism where possible).
    fn initial_moves(&self) -> Result<Vec<Self::Move>>;
    /// ∃'s networks containing the initial atom, on minimal node sets.
    fn initial_replies(&self, mv: &Self::Move) -> Vec<Self::Pos>;
    /// ∀'s legal demands that have no witness yet.
    fn demands(&self, p: &Self::Pos, limit: Limit) -> Vec<Self::Move>;
    /// ∃'s replies; with `restricted`, a subset that still contains a reply
    /// whenever one exists for the final round.
    fn replies(&self, p: &Self::Pos, mv: &Self::Move, restricted: bool) -> Vec<Self::Pos>;
    /// Whether ∃ can answer every demand in a last round.
    fn answerable(&self, p: &Self::Pos, limit: Limit) -> bool {
        self.demands(p, limit).iter().all(|d| !self.replies(p, d, false).is_empty())
    }
    /// `Err` with a reason when `mv` is not a legal demand at `p`.
    fn check_demand(&self, p: &Self::Pos, mv: &Self::Move, limit: Limit) -> std::result::Result<(), String>;
    /// Canonical key: equal for isomorphic positions.
    fn key(&self, p: &Self::Pos) -> Vec<u8>;
    fn nodes(&self, p: &Self::Pos) -> usize;
    /// Larger values are tried first by ∀.
    fn priority(&self, _p: &Self::Pos, _mv: &Self::Move) -> i64 {
        0
    }
    /// Initial moves with larger values are probed first for a quick ∀ win.
    fn initial_priority(&self, _mv: &Self::Move) -> i64 {
        0
    }
    fn move_json(&self, mv: &Self::Move) -> Value;
}

pub fn position_hash(key: &[u8]) -> String {
    hex::encode(&Sha256::digest(key)[..8])
}

/// Summary of ∃'s strategy dag: positions counted with multiplicity, and an
/// order-independent digest of them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    count: u64,
    digest: [u64; 2],
}

impl Tally {
    fn leaf() -> Tally {
        Tally { count: 1, digest: [0, 0] }
    }

    fn node(key: &[u8], r: usize) -> Tally {
        let mut h = Sha256::new();
        h.update(key);
        h.update([r as u8]);
        let d = h.finalize();
        let a = u64::from_le_bytes(d[..8].try_into().unwrap());
        let b = u64::from_le_bytes(d[8..16].try_into().unwrap());
        Tally { count: 1, digest: [a, b] }
    }

    fn add(&mut self, o: &Tally) {
        self.count += o.count;
        self.digest[0] = self.digest[0].wrapping_add(o.digest[0]);
        self.digest[1] = self.digest[1].wrapping_add(o.digest[1]);
    }

    fn hex(&self) -> String {
        format!("{:016x}{:016x}", self.digest[0], self.digest[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// ∃ answers every ∀ line with the restricted replies; `positions` counts
    /// the strategy dag with multiplicity.
    Memo { positions: u64, digest: String, node_cap: usize, exact_search: bool },
    /// ∀'s strategy tree: a demand per position and a subtree per ∃ reply.
    Strategy { tree: Value, node_cap: usize },
    Trivial { node_cap: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub winner: Winner,
    pub rounds: usize,
    /// For a ∀-win, the least number of rounds he needs.
    pub decided_at: Option<usize>,
    pub certificate: Certificate,
    pub memo_entries: usize,
}

type AMemo = DashMap<(Vec<u8>, u8), Option<Arc<Value>>>;

/// Positions the ∀ probe may visit per depth before giving up.
const PROBE_BUDGET: usize = 200_000;
/// Demands the probe tries at each position, best first.
const PROBE_WIDTH: usize = 2;

pub struct Solver<'a, A: Arena> {
    arena: &'a A,
    limit: Limit,
    budget: usize,
    entries: AtomicUsize,
    emo: DashMap<(Vec<u8>, u8), Option<Tally>>,
    amo: AMemo,
}

impl<'a, A: Arena> Solver<'a, A> {
    pub fn new(arena: &'a A, limit: Limit, budget: usize) -> Self {
        Solver { arena, limit, budget, entries: AtomicUsize::new(0), emo: DashMap::new(), amo: DashMap::new() }
    }

    /// Distinct memo entries; unlike the budget counter this does not depend
    /// on the schedule.
    pub fn memo_entries(&self) -> usize {
        self.emo.len() + self.amo.len()
    }

    fn charge(&self) -> Result<()> {
        if self.entries.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::Budget(format!("memo table exceeded {} states", self.budget)));
        }
        Ok(())
    }

    /// ∃ survives `r` more rounds from `p` using restricted replies.
    fn e_wins(&self, p: &A::Pos, r: usize) -> Result<Option<Tally>> {
        if r == 0 {
            return Ok(Some(Tally::leaf()));
        }
        if r == 1 {
            return Ok(self.arena.answerable(p, self.limit).then(Tally::leaf));
        }
        let key = self.arena.key(p);
        let mk = (key, r as u8);
        if let Some(v) = self.emo.get(&mk) {
            return Ok(*v);
        }
        let mut total = Tally::node(&mk.0, r);
        let mut won = true;
        for d in self.arena.demands(p, self.limit) {
            let mut answered = None;
            for q in self.arena.replies(p, &d, true) {
                if let Some(t) = self.e_wins(&q, r - 1)? {
                    answered = Some(t);
                    break;
                }
            }
            match answered {
                Some(t) => total.add(&t),
                None => {
                    won = false;
                    break;
                }
            }
        }
        let v = won.then_some(total);
        self.charge()?;
        self.emo.entry(mk).or_insert(v);
        Ok(v)
    }

    /// A cheap search for a ∀ win that only follows his best-ranked demands,
    /// but still against every reply, so a tree it returns is a real win.
    fn a_probe(&self, p: &A::Pos, r: usize, visits: &mut usize, memo: &mut HashMap<(Vec<u8>, u8), Option<Arc<Value>>>) -> Option<Arc<Value>> {
        if r == 0 || *visits >= PROBE_BUDGET {
            return None;
        }
        *visits += 1;
        let key = self.arena.key(p);
        let mk = (key, r as u8);
        if let Some(v) = memo.get(&mk) {
            return v.clone();
        }
        let mut demands = self.arena.demands(p, self.limit);
        demands.sort_by_key(|d| std::cmp::Reverse(self.arena.priority(p, d)));
        let mut found = None;
        'demand: for d in demands.into_iter().take(PROBE_WIDTH) {
            let replies = self.arena.replies(p, &d, false);
            let mut subtrees = Vec::with_capacity(replies.len());
            for q in &replies {
                match self.a_probe(q, r - 1, visits, memo) {
                    Some(t) => subtrees.push(t),
                    None => continue 'demand,
                }
            }
            found = Some(Arc::new(json!({
                "position_hash": position_hash(&mk.0),
                "demand": self.arena.move_json(&d),
                "replies": subtrees.iter().map(|t| (**t).clone()).collect::<Vec<_>>(),
            })));
            break;
        }
        memo.insert(mk, found.clone());
        found
    }

    /// ∀'s strategy tree for winning within `r` more rounds from `p`, if any.
    fn a_wins(&self, p: &A::Pos, r: usize) -> Result<Option<Arc<Value>>> {
        if r == 0 {
            return Ok(None);
        }
        if self.e_wins(p, r)?.is_some() {
            return Ok(None);
        }
        let key = self.arena.key(p);
        let mk = (key, r as u8);
        if let Some(v) = self.amo.get(&mk) {
            return Ok(v.clone());
        }
        let mut demands = self.arena.demands(p, self.limit);
        demands.sort_by_key(|d| std::cmp::Reverse(self.arena.priority(p, d)));
        let mut found = None;
        'demand: for d in demands {
            let replies = self.arena.replies(p, &d, false);
            let mut subtrees = Vec::with_capacity(replies.len());
            for q in &replies {
                match self.a_wins(q, r - 1)? {
                    Some(t) => subtrees.push(t),
                    None => continue 'demand,
                }
            }
            found = Some(Arc::new(json!({
                "position_hash": position_hash(&mk.0),
                "demand": self.arena.move_json(&d),
                "replies": subtrees.iter().map(|t| (**t).clone()).collect::<Vec<_>>(),
            })));
            break;
        }
        self.charge()?;
        self.amo.entry(mk).or_insert(found.clone());
        Ok(found)
    }
}

/// Exact winner of the configured game.
pub fn solve_game<A: Arena>(arena: &A, cfg: &GameConfig) -> Result<SolveResult> {
    solve_game_with(arena, cfg, STATE_BUDGET)
}

pub fn solve_game_with<A: Arena>(arena: &A, cfg: &GameConfig, budget: usize) -> Result<SolveResult> {
    if cfg.variant == Variant::Hk {
        return Err(Error::Precondition("use solve_hypergame for Hk".into()));
    }
    cfg.validate(arena.dim())?;
    let limit = cfg.limit(arena.dim());
    let solver = Solver::new(arena, limit, budget);
    solve_with(&solver, cfg.rounds)
}

fn solve_with<A: Arena>(solver: &Solver<'_, A>, rounds: usize) -> Result<SolveResult> {
    let limit = solver.limit;
    if rounds == 0 {
        return Ok(SolveResult {
            winner: Winner::Exists,
            rounds,
            decided_at: None,
            certificate: Certificate::Trivial { node_cap: limit.cap },
            memo_entries: 0,
        });
    }
    let moves = solver.arena.initial_moves()?;
    let mut exact = false;
    let mut last = Tally::default();
    let mut ranked: Vec<&A::Move> = moves.iter().collect();
    ranked.sort_by_key(|m| std::cmp::Reverse(solver.arena.initial_priority(m)));
    // Deepen one round at a time: a ∀ win is found at its least depth, and ∃
    // is only searched deeply once every shallower game is hers.
    for k in 1..=rounds {
        if let Some(tree) = probe(solver, &ranked, k) {
            return Ok(SolveResult {
                winner: Winner::Forall,
                rounds,
                decided_at: Some(k),
                certificate: Certificate::Strategy { tree, node_cap: limit.cap },
                memo_entries: solver.memo_entries(),
            });
        }
        let tallies: Vec<Option<Tally>> = moves
            .par_iter()
            .map(|m| -> Result<Option<Tally>> {
                for p in solver.arena.initial_replies(m) {
                    if let Some(t) = solver.e_wins(&p, k - 1)? {
                        return Ok(Some(t));
                    }
                }
                Ok(None)
            })
            .collect::<Result<_>>()?;
        let mut total = Tally::default();
        let mut open = Vec::new();
        for (m, t) in moves.iter().zip(&tallies) {
            match t {
                Some(t) => total.add(t),
                None => open.push(m),
            }
        }
        exact = !open.is_empty();
        for m in open {
            let replies = solver.arena.initial_replies(m);
            let mut subtrees = Vec::new();
            let mut all = true;
            for p in &replies {
                match solver.a_wins(p, k - 1)? {
                    Some(t) => subtrees.push((*t).clone()),
                    None => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                let tree = json!({
                    "initial": solver.arena.move_json(m),
                    "replies": subtrees,
                });
                return Ok(SolveResult {
                    winner: Winner::Forall,
                    rounds,
                    decided_at: Some(k),
                    certificate: Certificate::Strategy { tree, node_cap: limit.cap },
                    memo_entries: solver.memo_entries(),
                });
            }
        }
        last = total;
    }
    Ok(SolveResult {
        winner: Winner::Exists,
        rounds,
        decided_at: None,
        certificate: Certificate::Memo {
            positions: last.count,
            digest: last.hex(),
            node_cap: limit.cap,
            exact_search: exact,
        },
        memo_entries: solver.memo_entries(),
    })
}

/// Try the probe from each initial move in turn.
fn probe<A: Arena>(solver: &Solver<'_, A>, moves: &[&A::Move], k: usize) -> Option<Value> {
    let mut visits = 0;
    let mut memo = HashMap::new();
    for m in moves {
        let replies = solver.arena.initial_replies(m);
        let mut subtrees = Vec::new();
        for p in &replies {
            match solver.a_probe(p, k - 1, &mut visits, &mut memo) {
                Some(t) => subtrees.push((*t).clone()),
                None => break,
            }
        }
        if subtrees.len() == replies.len() {
            return Some(json!({ "initial": solver.arena.move_json(m), "replies": subtrees }));
        }
        if visits >= PROBE_BUDGET {
            break;
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyndonRow {
    pub k: usize,
    pub winner: Winner,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyndonProfile {
    pub rows: Vec<LyndonRow>,
    /// Set when a budget stopped the table early.
    pub truncated_at: Option<usize>,
}

/// Winner of `G_k` for `k = 1..=kmax`. One memo table serves every `k` (the
/// node cap `kmax + n` never binds), so later rows reuse earlier work.
pub fn lyndon_profile<A: Arena>(arena: &A, kmax: usize, budget: usize) -> Result<LyndonProfile> {
    let limit = GameConfig::gk(kmax).limit(arena.dim());
    let solver = Solver::new(arena, limit, budget);
    let mut rows: Vec<LyndonRow> = Vec::new();
    for k in 1..=kmax {
        match solve_with(&solver, k) {
            Ok(r) => {
                if r.winner == Winner::Exists && rows.iter().any(|row| row.winner == Winner::Forall) {
                    return Err(Error::Malformed(format!("∃ wins G_{k} after losing a shorter game")));
                }
                rows.push(LyndonRow { k, winner: r.winner });
            }
            Err(Error::Budget(_)) => return Ok(LyndonProfile { rows, truncated_at: Some(k) }),
            Err(e) => return Err(e),
        }
    }
    Ok(LyndonProfile { rows, truncated_at: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub player: String,
    #[serde(rename = "move")]
    pub mv: Value,
    pub position_hash: String,
}
