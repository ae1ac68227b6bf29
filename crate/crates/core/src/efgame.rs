//! Ehrenfeucht-Fraisse games between `G = H + S` and `H`, where `H` is a
//! disjoint union of `rounds` copies of every `radius`-ball of the base
//! structure `S`.
//!
//! Indices below `|H|` in `G` have the same layout as in `H`, and the copy
//! of `S` sits after them. Every ball copy is an index-preserving relabelling
//! of its ball, so the fixed isomorphism between a copy and the true ball in
//! `S` is `local index -> ball.members[local]`, and two copies of the same
//! ball correspond by equal local index.
//!
//! After round `i` the checker enforces, for all played indices including
//! the latest, with `large_i = 2^(rounds - i + 1)`:
//!
//! 1. `h_j` corresponds to `g_j`;
//! 2. `G`-distances below `large_i` are reproduced exactly in `H`;
//! 3. `G`-distances of at least `large_i` stay at least `large_i` in `H`;
//! 4. `min(boundary distance, large_i)` agrees for `g_j` and `h_j`, where
//!    the copy of `S` has no boundary;
//!
//! plus partial isomorphism of the played points.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{n_ball_with, Ball, ShadowGraph};
use crate::error::{Error, Result};
use crate::structure::{disjoint_union, KStructure};

const INF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    G,
    H,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::G => Side::H,
            Side::H => Side::G,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::G => "G",
            Side::H => "H",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpoilerMove {
    pub side: Side,
    pub element: usize,
}

/// A ball of the base with its internal distances.
#[derive(Debug, Clone)]
pub struct BallData {
    pub ball: Ball,
    dist: Vec<Vec<u32>>,
    boundary_dist: Vec<u32>,
}

/// One ball copy inside `H` (and at the same indices inside `G`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallCopy {
    pub ball: usize,
    pub copy: usize,
    pub offset: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Copy { copy: usize, local: usize },
    Base(usize),
}

#[derive(Debug, Clone)]
pub struct GameInstance {
    pub base: KStructure,
    pub rounds: usize,
    pub radius: usize,
    pub strict: bool,
    pub balls: Vec<BallData>,
    pub copies: Vec<BallCopy>,
    pub h: KStructure,
    pub g: KStructure,
    copy_of: Vec<usize>,
    base_dist: Vec<Vec<u32>>,
}

fn all_pairs(s: &KStructure) -> Vec<Vec<u32>> {
    let shadow = ShadowGraph::of_structure(s);
    (0..s.len())
        .map(|a| {
            shadow
                .distances_from(a)
                .into_iter()
                .map(|d| d.map_or(INF, |d| d as u32))
                .collect()
        })
        .collect()
}

pub fn build_instance(s: &KStructure, rounds: usize, radius: usize, strict: bool) -> Result<GameInstance> {
    if rounds == 0 {
        return Err(Error::PreconditionFailed("at least one round is needed".into()));
    }
    let bound = 1u64.checked_shl(rounds as u32 + 1).unwrap_or(u64::MAX);
    if strict && (radius as u64) <= bound {
        return Err(Error::RadiusTooSmall {
            radius,
            rounds,
            bound,
        });
    }
    let base_dist = all_pairs(s);
    let mut balls = Vec::with_capacity(s.len());
    for (a, row) in base_dist.iter().enumerate() {
        let dist: Vec<Option<usize>> = row.iter().map(|&d| (d != INF).then_some(d as usize)).collect();
        let ball = n_ball_with(s, a, radius, &dist)?;
        // the fixed isomorphism must carry the copy onto the true ball
        for t in ball.structure.relation() {
            let image: Vec<usize> = t.iter().map(|&x| ball.members[x]).collect();
            if !s.contains(&image) {
                return Err(Error::Verification(format!("ball of {a} is not induced")));
            }
        }
        let inner = all_pairs(&ball.structure);
        let boundary_dist = (0..ball.members.len())
            .map(|x| ball.boundary.iter().map(|&b| inner[x][b]).min().unwrap_or(INF))
            .collect();
        balls.push(BallData {
            ball,
            dist: inner,
            boundary_dist,
        });
    }
    let mut parts = Vec::with_capacity(s.len() * rounds);
    let mut copies = Vec::with_capacity(s.len() * rounds);
    let mut offset = 0;
    for (a, b) in balls.iter().enumerate() {
        for copy in 0..rounds {
            let size = b.ball.members.len();
            copies.push(BallCopy {
                ball: a,
                copy,
                offset,
                size,
            });
            offset += size;
            parts.push(b.ball.structure.clone());
        }
    }
    let h = if parts.is_empty() {
        KStructure::with_size(s.arity(), 0, Vec::new())?
    } else {
        disjoint_union(&parts)?.structure
    };
    let g = disjoint_union(&[h.clone(), s.clone()])?.structure;
    let mut copy_of = vec![0; h.len()];
    for (c, bc) in copies.iter().enumerate() {
        copy_of[bc.offset..bc.offset + bc.size].fill(c);
    }
    Ok(GameInstance {
        base: s.clone(),
        rounds,
        radius,
        strict,
        balls,
        copies,
        h,
        g,
        copy_of,
        base_dist,
    })
}

/// Threshold `2^(rounds - i + 1)`.
pub fn large(rounds: usize, i: usize) -> u64 {
    1u64.checked_shl((rounds + 1 - i.min(rounds + 1)) as u32)
        .unwrap_or(u64::MAX)
}

impl GameInstance {
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::G => self.g.len(),
            Side::H => self.h.len(),
        }
    }

    pub fn structure(&self, side: Side) -> &KStructure {
        match side {
            Side::G => &self.g,
            Side::H => &self.h,
        }
    }

    /// Index of the first element of the copy of the base inside `G`.
    pub fn base_offset(&self) -> usize {
        self.h.len()
    }

    fn locate(&self, side: Side, x: usize) -> Loc {
        if side == Side::G && x >= self.h.len() {
            return Loc::Base(x - self.h.len());
        }
        let copy = self.copy_of[x];
        Loc::Copy {
            copy,
            local: x - self.copies[copy].offset,
        }
    }

    /// Shadow distance inside one side; `u32::MAX` for infinity.
    pub fn distance(&self, side: Side, x: usize, y: usize) -> u32 {
        match (self.locate(side, x), self.locate(side, y)) {
            (Loc::Copy { copy: c, local: a }, Loc::Copy { copy: d, local: b }) if c == d => {
                self.balls[self.copies[c].ball].dist[a][b]
            }
            (Loc::Base(a), Loc::Base(b)) => self.base_dist[a][b],
            _ => INF,
        }
    }

    /// Distance to the boundary of the element's own component.
    pub fn boundary_distance(&self, side: Side, x: usize) -> u32 {
        match self.locate(side, x) {
            Loc::Copy { copy, local } => self.balls[self.copies[copy].ball].boundary_dist[local],
            Loc::Base(_) => INF,
        }
    }

    pub fn corresponds(&self, g: usize, h: usize) -> bool {
        let Loc::Copy { copy, local } = self.locate(Side::H, h) else {
            return false;
        };
        let ball = self.copies[copy].ball;
        match self.locate(Side::G, g) {
            Loc::Copy { copy: c, local: l } => self.copies[c].ball == ball && l == local,
            Loc::Base(s) => self.balls[ball].ball.members[local] == s,
        }
    }

    fn check_move(&self, mv: SpoilerMove) -> Result<()> {
        if mv.element >= self.side_len(mv.side) {
            return Err(Error::InvalidMove(format!(
                "{} has no element {}",
                mv.side, mv.element
            )));
        }
        Ok(())
    }

    fn element_name(&self, side: Side, x: usize) -> &str {
        &self.structure(side).universe()[x]
    }
}

/// Played pairs `(g_j, h_j)` in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub played: Vec<(usize, usize)>,
}

impl GameState {
    pub fn round(&self) -> usize {
        self.played.len()
    }

    fn own(&self, side: Side, j: usize) -> usize {
        match side {
            Side::G => self.played[j].0,
            Side::H => self.played[j].1,
        }
    }

    fn push(&mut self, mv: SpoilerMove, reply: usize) {
        self.played.push(match mv.side {
            Side::G => (mv.element, reply),
            Side::H => (reply, mv.element),
        });
    }
}

/// Duplicator's reply to `mv` after `state`.
pub fn duplicator_move(inst: &GameInstance, state: &GameState, mv: SpoilerMove) -> Result<usize> {
    let i = state.round();
    if i >= inst.rounds {
        return Err(Error::InvalidMove("the game is over".into()));
    }
    inst.check_move(mv)?;
    let side = mv.side;
    let x = mv.element;
    let other = side.other();
    if let Some(j) = (0..i).find(|&j| state.own(side, j) == x) {
        return Ok(state.own(other, j));
    }
    let threshold = large(inst.rounds, i + 1);
    let near = (0..i)
        .map(|j| (inst.distance(side, x, state.own(side, j)), j))
        .filter(|&(d, _)| (d as u64) < threshold)
        .min();
    let Some((_, l)) = near else {
        // every played point is far: answer in an unused copy of the ball
        let (ball, local) = match inst.locate(side, x) {
            Loc::Copy { copy, local } => (inst.copies[copy].ball, local),
            Loc::Base(s) => (s, inst.balls[s].ball.centre),
        };
        let used = |c: usize| {
            (0..i).any(|j| match inst.locate(other, state.own(other, j)) {
                Loc::Copy { copy, .. } => copy == c,
                Loc::Base(_) => false,
            })
        };
        let first = ball * inst.rounds;
        let fresh = (first..first + inst.rounds)
            .find(|&c| !used(c))
            .ok_or(Error::NoFreshCopy)?;
        return Ok(inst.copies[fresh].offset + local);
    };
    let partner = state.own(other, l);
    let unmatched = || Error::InvalidMove(format!("no element corresponds to {side}{x}"));
    match (inst.locate(side, x), inst.locate(other, partner)) {
        (Loc::Copy { copy: cx, local }, Loc::Copy { copy: cy, .. }) => {
            if inst.copies[cx].ball != inst.copies[cy].ball {
                return Err(unmatched());
            }
            Ok(inst.copies[cy].offset + local)
        }
        (Loc::Base(s), Loc::Copy { copy: cy, .. }) => {
            let members = &inst.balls[inst.copies[cy].ball].ball.members;
            let local = members.binary_search(&s).map_err(|_| unmatched())?;
            Ok(inst.copies[cy].offset + local)
        }
        (Loc::Copy { copy: cx, local }, Loc::Base(_)) => {
            Ok(inst.base_offset() + inst.balls[inst.copies[cx].ball].ball.members[local])
        }
        (Loc::Base(_), Loc::Base(_)) => Err(unmatched()),
    }
}

/// A failed condition after some round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFailure {
    /// "1".."4", "iso" or "strategy".
    pub condition: String,
    pub detail: String,
}

fn failure(condition: &str, detail: String) -> ConditionFailure {
    ConditionFailure {
        condition: condition.to_string(),
        detail,
    }
}

fn show(d: u32) -> String {
    if d == INF {
        "inf".into()
    } else {
        d.to_string()
    }
}

/// Checks conditions (1)-(4) and partial isomorphism after the current
/// round.
pub fn check_conditions(inst: &GameInstance, state: &GameState) -> Vec<ConditionFailure> {
    let i = state.round();
    let lg = large(inst.rounds, i);
    let mut out = Vec::new();
    for (j, &(g, h)) in state.played.iter().enumerate() {
        if !inst.corresponds(g, h) {
            out.push(failure("1", format!("pair {j}: h does not correspond to g")));
        }
        let bg = (inst.boundary_distance(Side::G, g) as u64).min(lg);
        let bh = (inst.boundary_distance(Side::H, h) as u64).min(lg);
        if bg != bh {
            out.push(failure(
                "4",
                format!("pair {j}: boundary distances {bg} and {bh} below {lg}"),
            ));
        }
        for (l, &(g2, h2)) in state.played.iter().enumerate().skip(j + 1) {
            let dg = inst.distance(Side::G, g, g2);
            let dh = inst.distance(Side::H, h, h2);
            if (dg as u64) < lg {
                if dg != dh {
                    out.push(failure(
                        "2",
                        format!("pairs {j},{l}: distance {} in G but {} in H", show(dg), show(dh)),
                    ));
                }
            } else if (dh as u64) < lg {
                out.push(failure(
                    "3",
                    format!("pairs {j},{l}: distance {} in G but {} in H", show(dg), show(dh)),
                ));
            }
        }
    }
    if let Err(detail) = partial_isomorphism(&inst.g, &inst.h, &state.played) {
        out.push(failure("iso", detail));
    }
    out
}

/// Whether `a_j -> b_j` is a well-defined injective map whose domain and
/// image induce isomorphic substructures.
pub fn partial_isomorphism(
    a: &KStructure,
    b: &KStructure,
    pairs: &[(usize, usize)],
) -> std::result::Result<(), String> {
    for (j, &(x, y)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[..j] {
            if (x == x2) != (y == y2) {
                return Err(format!("pair {j} breaks injectivity"));
            }
        }
    }
    let k = a.arity();
    let m = pairs.len();
    if m == 0 {
        return Ok(());
    }
    let mut idx = vec![0usize; k];
    loop {
        let ta: Vec<usize> = idx.iter().map(|&j| pairs[j].0).collect();
        let tb: Vec<usize> = idx.iter().map(|&j| pairs[j].1).collect();
        if a.contains(&ta) != b.contains(&tb) {
            return Err(format!("tuple over pairs {idx:?} is related on one side only"));
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRound {
    pub spoiler: SpoilerMove,
    pub reply: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub play: u64,
    pub round: usize,
    pub failures: Vec<ConditionFailure>,
    pub transcript: Vec<TranscriptRound>,
}

/// Spoiler strategies for [`play`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpoilerPolicy {
    /// Every sequence of moves.
    Exhaustive,
    /// Seeded random plays, biased towards moves near earlier points.
    Random { seed: u64, trials: u64 },
    /// One play with the given moves.
    Scripted(Vec<SpoilerMove>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayReport {
    pub plays: u64,
    pub rounds_checked: u64,
    pub violation_count: u64,
    /// The first violations in play order.
    pub violations: Vec<Violation>,
}

const KEPT_VIOLATIONS: usize = 100;

impl PlayReport {
    fn empty() -> Self {
        PlayReport {
            plays: 0,
            rounds_checked: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn merge(mut self, other: PlayReport) -> Self {
        self.plays += other.plays;
        self.rounds_checked += other.rounds_checked;
        self.violation_count += other.violation_count;
        let room = KEPT_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
        self
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

/// Applies one Spoiler move and checks the conditions. Returns false when
/// the play must stop.
fn step(
    inst: &GameInstance,
    state: &mut GameState,
    transcript: &mut Vec<TranscriptRound>,
    mv: SpoilerMove,
    play_id: u64,
    report: &mut PlayReport,
) -> bool {
    let (failures, reply) = match duplicator_move(inst, state, mv) {
        Ok(reply) => {
            state.push(mv, reply);
            (check_conditions(inst, state), Some(reply))
        }
        Err(e) => (vec![failure("strategy", e.to_string())], None),
    };
    transcript.push(TranscriptRound {
        spoiler: mv,
        reply: reply.unwrap_or(usize::MAX),
    });
    report.rounds_checked += 1;
    if !failures.is_empty() {
        report.violation_count += 1;
        if report.violations.len() < KEPT_VIOLATIONS {
            report.violations.push(Violation {
                play: play_id,
                round: transcript.len(),
                failures,
                transcript: transcript.clone(),
            });
        }
        return false;
    }
    reply.is_some()
}

fn all_moves(inst: &GameInstance) -> Vec<SpoilerMove> {
    [Side::G, Side::H]
        .into_iter()
        .flat_map(|side| (0..inst.side_len(side)).map(move |element| SpoilerMove { side, element }))
        .collect()
}

fn exhaustive_from(
    inst: &GameInstance,
    moves: &[SpoilerMove],
    state: &GameState,
    transcript: &[TranscriptRound],
    play_id: &mut u64,
    report: &mut PlayReport,
) {
    for &mv in moves {
        let mut st = state.clone();
        let mut tr = transcript.to_vec();
        if step(inst, &mut st, &mut tr, mv, *play_id, report) && st.round() < inst.rounds {
            exhaustive_from(inst, moves, &st, &tr, play_id, report);
        } else {
            report.plays += 1;
            *play_id += 1;
        }
    }
}

/// Plays according to `policy`; violations are reported, never raised.
pub fn play(inst: &GameInstance, policy: &SpoilerPolicy) -> PlayReport {
    match policy {
        SpoilerPolicy::Exhaustive => {
            let moves = all_moves(inst);
            let reports: Vec<PlayReport> = moves
                .par_iter()
                .enumerate()
                .map(|(first, &mv)| {
                    let mut report = PlayReport::empty();
                    let mut state = GameState::default();
                    let mut transcript = Vec::new();
                    // plays are numbered by their first move, then in order
                    let mut play_id = (first as u64) << 32;
                    if step(inst, &mut state, &mut transcript, mv, play_id, &mut report) && inst.rounds > 1 {
                        exhaustive_from(inst, &moves, &state, &transcript, &mut play_id, &mut report);
                    } else {
                        report.plays += 1;
                    }
                    report
                })
                .collect();
            reports.into_iter().fold(PlayReport::empty(), PlayReport::merge)
        }
        SpoilerPolicy::Random { seed, trials } => {
            let reports: Vec<PlayReport> = (0..*trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(t);
                    let mut report = PlayReport::empty();
                    let mut state = GameState::default();
                    let mut transcript = Vec::new();
                    while state.round() < inst.rounds {
                        let mv = random_move(inst, &state, &mut rng);
                        if !step(inst, &mut state, &mut transcript, mv, t, &mut report) {
                            break;
                        }
                    }
                    report.plays = 1;
                    report
                })
                .collect();
            reports.into_iter().fold(PlayReport::empty(), PlayReport::merge)
        }
        SpoilerPolicy::Scripted(moves) => {
            let mut report = PlayReport::empty();
            let mut state = GameState::default();
            let mut transcript = Vec::new();
            for &mv in moves.iter().take(inst.rounds) {
                if !step(inst, &mut state, &mut transcript, mv, 0, &mut report) {
                    break;
                }
            }
            report.plays = 1;
            report
        }
    }
}

/// Half the time a move close to an earlier point (forcing the near-point
/// cases), otherwise a uniform move.
fn random_move(inst: &GameInstance, state: &GameState, rng: &mut ChaCha8Rng) -> SpoilerMove {
    let side = if rng.random_bool(0.5) { Side::G } else { Side::H };
    let i = state.round();
    if i > 0 && rng.random_bool(0.5) {
        let anchor = state.own(side, rng.random_range(0..i));
        let threshold = large(inst.rounds, i + 1);
        let near: Vec<usize> = match inst.locate(side, anchor) {
            Loc::Copy { copy, .. } => {
                let c = inst.copies[copy];
                (c.offset..c.offset + c.size).collect::<Vec<_>>()
            }
            Loc::Base(_) => (inst.base_offset()..inst.g.len()).collect::<Vec<_>>(),
        }
        .into_iter()
        .filter(|&y| (inst.distance(side, anchor, y) as u64) < threshold)
        .collect();
        if !near.is_empty() {
            return SpoilerMove {
                side,
                element: near[rng.random_range(0..near.len())],
            };
        }
    }
    SpoilerMove {
        side,
        element: rng.random_range(0..inst.side_len(side)),
    }
}

/// Parses `"<side> <element>"` where side is `G` or `H` (any case) and the
/// element is an index or an element name on that side. Indices take precedence
/// over names, and a trailing `(name)` annotation as written by [`format_move`]
/// is ignored.
pub fn parse_spoiler_move(inst: &GameInstance, text: &str) -> Result<SpoilerMove> {
    let trimmed = text.trim_end();
    let body = match trimmed.rfind(" (") {
        Some(at) if trimmed.ends_with(')') => &trimmed[..at],
        _ => trimmed,
    };
    let mut parts = body.split_whitespace();
    let (Some(side), Some(element), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::InvalidMove(format!(
            "expected `<G|H> <element>`, got {text:?}"
        )));
    };
    let side = match side {
        "G" | "g" => Side::G,
        "H" | "h" => Side::H,
        other => return Err(Error::InvalidMove(format!("unknown side {other:?}"))),
    };
    let element = match element.parse::<usize>() {
        Ok(x) => x,
        Err(_) => inst
            .structure(side)
            .element_index(element)
            .ok_or_else(|| Error::InvalidMove(format!("{side} has no element {element:?}")))?,
    };
    let mv = SpoilerMove { side, element };
    inst.check_move(mv)?;
    Ok(mv)
}

/// Formats a move so that [`parse_spoiler_move`] reads it back.
pub fn format_move(inst: &GameInstance, mv: SpoilerMove) -> String {
    format!(
        "{} {} ({})",
        mv.side,
        mv.element,
        inst.element_name(mv.side, mv.element)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Duplicator,
    Spoiler,
}

const GAME_TREE_LIMIT: u128 = 100_000_000;

/// Exact winner of the `rounds`-round game on `a` and `b`, by memoised
/// search over played positions.
pub fn game_winner(a: &KStructure, b: &KStructure, rounds: usize) -> Result<Winner> {
    if a.arity() != b.arity() {
        return Err(Error::MixedArity);
    }
    let size = (a.len() + b.len()) as u128;
    let tree = size.checked_pow(2 * rounds as u32).unwrap_or(u128::MAX);
    if tree > GAME_TREE_LIMIT {
        return Err(Error::TooLarge(tree));
    }
    let mut memo = HashMap::new();
    let mut pairs = Vec::new();
    Ok(if duplicator_wins(a, b, rounds, &mut pairs, &mut memo) {
        Winner::Duplicator
    } else {
        Winner::Spoiler
    })
}

/// Winner cache keyed by the positions played so far and the rounds left.
type Memo = HashMap<(Vec<(usize, usize)>, usize), bool>;

fn duplicator_wins(
    a: &KStructure,
    b: &KStructure,
    left: usize,
    pairs: &mut Vec<(usize, usize)>,
    memo: &mut Memo,
) -> bool {
    if partial_isomorphism(a, b, pairs).is_err() {
        return false;
    }
    if left == 0 {
        return true;
    }
    let mut key = pairs.clone();
    key.sort_unstable();
    key.dedup();
    if let Some(&v) = memo.get(&(key.clone(), left)) {
        return v;
    }
    let mut wins = true;
    'spoiler: for side in [Side::G, Side::H] {
        let (own, other) = match side {
            Side::G => (a.len(), b.len()),
            Side::H => (b.len(), a.len()),
        };
        for x in 0..own {
            let mut answered = false;
            for y in 0..other {
                pairs.push(if side == Side::G { (x, y) } else { (y, x) });
                let ok = duplicator_wins(a, b, left - 1, pairs, memo);
                pairs.pop();
                if ok {
                    answered = true;
                    break;
                }
            }
            if !answered {
                wins = false;
                break 'spoiler;
            }
        }
    }
    memo.insert((key, left), wins);
    wins
}
