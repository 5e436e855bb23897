//! Scripted ∀ strategies, checked against every ∃ reply.

use serde::Serialize;
use serde_json::json;

use super::{position_hash, Arena, GameConfig, GraphArena, GraphDemand, GraphMove, TranscriptEntry};
use crate::error::{Error, Result};
use crate::rainbow::{ColouredGraph, Palette};

/// A ∀ strategy as a function of the play so far.
pub trait Script<A: Arena> {
    fn initial(&self, arena: &A) -> Result<A::Move>;
    /// `history` holds the positions after rounds `1..round`.
    fn next(&self, arena: &A, history: &[A::Pos], round: usize) -> Option<A::Move>;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScriptReport {
    pub verified: bool,
    /// The latest round at which some branch left ∃ without a reply.
    pub max_round_reached: usize,
    pub branches: usize,
    /// The longest play, ending where ∃ is stuck (or where the script failed).
    pub transcript: Vec<TranscriptEntry>,
}

/// Bombard the base `0..n-1` with cones of the given tints, in order. When
/// the node bound is reached the oldest surviving apex is reused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeScript {
    pub tints: Vec<i64>,
}

pub fn cone_script(tints: impl IntoIterator<Item = i64>) -> ConeScript {
    ConeScript { tints: tints.into_iter().collect() }
}

impl ConeScript {
    fn base(n: usize) -> Vec<usize> {
        (0..n - 1).collect()
    }

    fn tint_id(&self, p: &Palette, round: usize) -> Result<u8> {
        let t = self.tints.get(round - 1).ok_or_else(|| Error::Precondition("script ran out of tints".into()))?;
        p.tint_id(*t).ok_or_else(|| Error::Precondition(format!("tint {t} not in signature")))
    }
}

impl Script<GraphArena> for ConeScript {
    /// Nodes `0..n`: `M(i,j) = w0` inside the base, `M(j, n-1) = g_j`,
    /// `M(0, n-1) = g0^t` for the first tint, full shades on the base.
    fn initial(&self, arena: &GraphArena) -> Result<GraphMove> {
        let p = arena.palette();
        let n = arena.dim();
        let mut g = ColouredGraph::new(n, arena.capacity());
        for _ in 0..n {
            g.add_node();
        }
        let w0 = p.white_id(0).ok_or_else(|| Error::Precondition("no w0".into()))?;
        for i in 0..n - 1 {
            for j in i + 1..n - 1 {
                g.set_edge(p, i, j, w0);
            }
        }
        for j in 1..n - 1 {
            let gj = p.green_id(j as u32).ok_or_else(|| Error::Precondition(format!("no g{j}")))?;
            g.set_edge(p, j, n - 1, gj);
        }
        g.set_edge(p, 0, n - 1, self.tint_id(p, 1)?);
        for t in g.yellow_tuples(p) {
            g.set_shade(&t, Palette::FULL);
        }
        if let Some(v) = g.violation(p) {
            return Err(Error::Precondition(format!("initial cone is not a coloured graph: {v}")));
        }
        Ok(GraphMove::Initial(g))
    }

    fn next(&self, arena: &GraphArena, history: &[ColouredGraph], round: usize) -> Option<GraphMove> {
        let p = arena.palette();
        let n = arena.dim();
        let g = history.last()?;
        let tint = self.tint_id(p, round).ok()?;
        let base = Self::base(n);
        let mut colours = vec![tint];
        for j in 1..n - 1 {
            colours.push(p.green_id(j as u32)?);
        }
        let drop = if g.len() >= arena.capacity() {
            // the apex whose tint was played first
            (0..g.len())
                .filter(|v| !base.contains(v))
                .filter_map(|v| {
                    let t = p.tint(g.edge(0, v))?;
                    Some((self.tints.iter().position(|&s| s == t).unwrap_or(usize::MAX), v))
                })
                .min()
                .map(|(_, v)| v)
        } else {
            None
        };
        Some(GraphMove::Demand(GraphDemand { drop, face: base, colours }))
    }
}

/// Play `script` against every ∃ reply and check that each branch leaves ∃
/// stuck within `cfg.rounds`.
pub fn verify_script<A: Arena, S: Script<A>>(arena: &A, script: &S, cfg: &GameConfig) -> Result<ScriptReport> {
    cfg.validate(arena.dim())?;
    let limit = cfg.limit(arena.dim());
    let first = script.initial(arena)?;
    let mut report = ScriptReport { verified: true, max_round_reached: 0, branches: 0, transcript: Vec::new() };
    if cfg.rounds == 0 {
        report.verified = false;
        return Ok(report);
    }
    let start = vec![TranscriptEntry {
        round: 1,
        player: "∀".into(),
        mv: arena.move_json(&first),
        position_hash: String::new(),
    }];
    let replies = arena.initial_replies(&first);
    if replies.is_empty() {
        report.max_round_reached = 1;
        report.branches = 1;
        report.transcript = start;
        return Ok(report);
    }
    for p in replies {
        let mut trail = start.clone();
        trail.push(entry(arena, 1, "∃", json!("network"), &p));
        let mut history = vec![p];
        walk(arena, script, cfg, limit, &mut history, &mut trail, &mut report)?;
    }
    Ok(report)
}

fn entry<A: Arena>(arena: &A, round: usize, player: &str, mv: serde_json::Value, p: &A::Pos) -> TranscriptEntry {
    TranscriptEntry { round, player: player.into(), mv, position_hash: position_hash(&arena.key(p)) }
}

fn walk<A: Arena, S: Script<A>>(
    arena: &A,
    script: &S,
    cfg: &GameConfig,
    limit: super::Limit,
    history: &mut Vec<A::Pos>,
    trail: &mut Vec<TranscriptEntry>,
    report: &mut ScriptReport,
) -> Result<()> {
    let round = history.len() + 1;
    let finish = |report: &mut ScriptReport, trail: &[TranscriptEntry], won: bool| {
        report.branches += 1;
        if !won {
            report.verified = false;
        } else {
            report.max_round_reached = report.max_round_reached.max(round);
        }
        if trail.len() >= report.transcript.len() {
            report.transcript = trail.to_vec();
        }
    };
    if round > cfg.rounds {
        finish(report, trail, false);
        return Ok(());
    }
    let p = history.last().expect("history is never empty").clone();
    let Some(mv) = script.next(arena, history, round) else {
        finish(report, trail, false);
        return Ok(());
    };
    if let Err(why) = arena.check_demand(&p, &mv, limit) {
        let played: Vec<String> = trail.iter().map(|t| t.mv.to_string()).collect();
        return Err(Error::Precondition(format!(
            "script move {} in round {round} is illegal ({why}); play so far: {}",
            arena.move_json(&mv),
            played.join(" ; ")
        )));
    }
    trail.push(entry(arena, round, "∀", arena.move_json(&mv), &p));
    let replies = arena.replies(&p, &mv, false);
    if replies.is_empty() {
        finish(report, trail, true);
    }
    for q in replies {
        trail.push(entry(arena, round, "∃", json!("extension"), &q));
        history.push(q);
        walk(arena, script, cfg, limit, history, trail, report)?;
        history.pop();
        trail.pop();
    }
    trail.pop();
    Ok(())
}
