//! Zigzag paths: the staircase data that determines a rectangle.
//!
//! A zigzag path from a vertex at position `(p, q)` alternates an `E⁺` edge
//! rightward with an `E⁻` edge traversed backward from the next diagonal
//! vertex, descending the staircase `(p, q), (p, q+1), (p-1, q+1), ...`.
//! Fattening the staircase by square completions recovers the full
//! `(p,q)`-rectangle; conversely every rectangle restricts to its staircase,
//! and the two operations are mutually inverse.
//!
//! Infinite paths are represented either as a finite prefix or as an
//! eventually periodic step sequence.  A periodic tail repeats the last
//! `period` steps shifted two levels per step; this is only meaningful at
//! stabilized levels, where consecutive level pairs share one index space,
//! and path validation enforces it.

use crate::bisystem::{LambdaBiSystem, MinusRef, PlusRef};
use crate::canonical::detect_stabilization;
use crate::configuration::grid::{complete_square_in, complete_square_out, level_of, Grid, Pos};
use crate::error::{LgbsError, Result};
use serde::{Deserialize, Serialize};

/// One zigzag step: `plus` leaves the current diagonal vertex, `minus` comes
/// back down from the next diagonal vertex onto the shared middle vertex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ZigzagStep {
    pub plus: PlusRef,
    pub minus: MinusRef,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Tail {
    /// The path ends after the explicit steps.
    Finite,
    /// The last `period` explicit steps repeat forever, transported two
    /// levels up per step.
    Periodic { period: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZigzagPath {
    pub anchor: Pos,
    /// Vertex index of the start at level `n(anchor)`.
    pub start: usize,
    pub steps: Vec<ZigzagStep>,
    pub tail: Tail,
}

impl ZigzagPath {
    pub fn base_level(&self) -> Result<usize> {
        level_of(self.anchor)
    }

    /// Number of explicit steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.tail, Tail::Periodic { .. })
    }

    /// Depth available without expansion limits: explicit length for finite
    /// paths, unbounded for periodic ones (capped by the caller).
    pub fn available_depth(&self, want: usize) -> usize {
        match self.tail {
            Tail::Finite => self.steps.len().min(want),
            Tail::Periodic { .. } => want,
        }
    }

    /// The step at index `i`, expanding the periodic tail by level transport.
    pub fn step_at(&self, b: &LambdaBiSystem, i: usize) -> Result<ZigzagStep> {
        if i < self.steps.len() {
            return Ok(self.steps[i]);
        }
        let Tail::Periodic { period } = self.tail else {
            return Err(LgbsError::DepthExhausted(format!(
                "zigzag has {} steps, step {i} requested",
                self.steps.len()
            )));
        };
        if period == 0 || period > self.steps.len() {
            return Err(LgbsError::InconsistentBisystem("bad zigzag period".into()));
        }
        let base = self.steps.len() - period + (i - self.steps.len()) % period;
        let delta = 2 * (((i - base) / period) * period);
        let s = self.steps[base];
        let step = ZigzagStep {
            plus: PlusRef { low: s.plus.low + delta, idx: s.plus.idx },
            minus: MinusRef { low: s.minus.low + delta, idx: s.minus.idx },
        };
        // Transport is only valid where the edge pattern repeats.
        if !b.level_accessible(step.minus.low + 1) {
            return Err(LgbsError::DepthExhausted(format!(
                "step {i} reaches level {} beyond the truncation",
                step.minus.low + 1
            )));
        }
        Ok(step)
    }

    /// Diagonal vertex before step `i` (the start for `i = 0`).
    pub fn vertex_at(&self, b: &LambdaBiSystem, i: usize) -> Result<usize> {
        if i == 0 {
            return Ok(self.start);
        }
        let s = self.step_at(b, i - 1)?;
        Ok(b.minus_edge(s.minus)?.src as usize)
    }

    /// Chain and label constraints, plus tail validity.  Periodic tails
    /// require a verified stabilization certificate and a cycle wholly inside
    /// the stable levels that closes up index-wise.
    pub fn validate(&self, b: &LambdaBiSystem) -> Result<()> {
        let base = self.base_level()?;
        let mut cur = self.start;
        for (i, s) in self.steps.iter().enumerate() {
            let m = base + 2 * i;
            if s.plus.low != m || s.minus.low != m + 1 {
                return Err(LgbsError::InvalidBisystem(format!(
                    "step {i} edge levels ({}, {}) do not match staircase level {m}",
                    s.plus.low, s.minus.low
                )));
            }
            let pe = b.plus_edge(s.plus)?;
            let me = b.minus_edge(s.minus)?;
            if pe.src as usize != cur {
                return Err(LgbsError::InvalidBisystem(format!(
                    "step {i} does not start at the current vertex"
                )));
            }
            if pe.tgt != me.tgt {
                return Err(LgbsError::InvalidBisystem(format!("step {i} edges do not meet")));
            }
            cur = me.src as usize;
        }
        if let Tail::Periodic { period } = self.tail {
            if period == 0 || period > self.steps.len() {
                return Err(LgbsError::InvalidBisystem("periodic tail longer than the path".into()));
            }
            let (onset, _) = detect_stabilization(b).ok_or_else(|| {
                LgbsError::InvalidBisystem(
                    "periodic zigzag tails need a stabilized system".into(),
                )
            })?;
            let first_cycle_step = self.steps.len() - period;
            if base + 2 * first_cycle_step < onset + 1 {
                return Err(LgbsError::InvalidBisystem(format!(
                    "cycle starts below the stabilization onset {onset}"
                )));
            }
            // Closure: the endpoint equals the cycle entry vertex, on the
            // shared stable index space.
            let entry = self.vertex_at(b, first_cycle_step)?;
            let exit = self.vertex_at(b, self.steps.len())?;
            if entry != exit {
                return Err(LgbsError::InvalidBisystem("periodic tail does not close up".into()));
            }
            // The transported continuation must chain like the stored cycle.
            for i in self.steps.len()..self.steps.len() + period {
                let s = self.step_at(b, i)?;
                let prev = self.vertex_at(b, i)?;
                if b.plus_edge(s.plus)?.src as usize != prev {
                    return Err(LgbsError::InvalidBisystem(
                        "transported cycle does not chain".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Positions visited by step `i`: the diagonal cell and the middle cell.
    pub fn step_positions(&self, i: usize) -> (Pos, Pos) {
        let (p, q) = self.anchor;
        let j = i as i64;
        ((p - j, q + j), (p - j, q + j + 1))
    }
}

/// Install the staircase of a zigzag prefix into a grid.
pub fn place_staircase(b: &LambdaBiSystem, path: &ZigzagPath, depth: usize, grid: &mut Grid) -> Result<()> {
    grid.set_vertex(path.anchor, path.start)?;
    for i in 0..depth {
        let s = path.step_at(b, i)?;
        let (diag, mid) = path.step_positions(i);
        grid.set_eplus(b, diag, s.plus)?;
        grid.set_eminus(b, mid, s.minus)?;
    }
    Ok(())
}

/// Fatten a zigzag prefix into the filled square window of side `depth + 1`
/// hanging from the anchor: all positions `(p-a, q+b)` with `0 <= a, b <=
/// depth`.  Repeated square completions propagate the staircase data; the
/// procedure fails only on inconsistent systems or exhausted depth.
pub fn fatten(b: &LambdaBiSystem, path: &ZigzagPath, depth: usize) -> Result<Grid> {
    let mut grid = Grid::new();
    place_staircase(b, path, depth, &mut grid)?;
    let (p, q) = path.anchor;
    // Sweep until fixpoint; each round fills at least one anti-diagonal.
    loop {
        let mut progress = false;
        for a in 0..=depth as i64 {
            for bb in 0..=depth as i64 {
                let k = p - a;
                let l = q + bb;
                // Outer completion at the square with top-left (k, l):
                // top e⁺ at (k,l) + right e⁻ at (k,l+1) give the bottom-left.
                if bb < depth as i64 && a < depth as i64 {
                    if let (Some(fp), Some(fm)) = (grid.eplus((k, l)), grid.eminus((k, l + 1))) {
                        if grid.eminus((k, l)).is_none() || grid.eplus((k - 1, l)).is_none() {
                            let (em, ep) = complete_square_out(b, fp, fm)?;
                            grid.set_eminus(b, (k, l), em)?;
                            grid.set_eplus(b, (k - 1, l), ep)?;
                            progress = true;
                        }
                    }
                }
                // Inner completion: bottom e⁺ at (k-1,l) + left e⁻ at (k,l)
                // give the top-right.
                if a < depth as i64 && bb < depth as i64 {
                    if let (Some(em), Some(ep)) = (grid.eminus((k, l)), grid.eplus((k - 1, l))) {
                        if grid.eplus((k, l)).is_none() || grid.eminus((k, l + 1)).is_none() {
                            let (fp, fm) = complete_square_in(b, em, ep)?;
                            grid.set_eplus(b, (k, l), fp)?;
                            grid.set_eminus(b, (k, l + 1), fm)?;
                            progress = true;
                        }
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    // The filled window: all cells (p-a, q+b), 0 <= a,b <= depth.
    for a in 0..=depth as i64 {
        for bb in 0..=depth as i64 {
            if grid.vertex((p - a, q + bb)).is_none() {
                return Err(LgbsError::InconsistentBisystem(format!(
                    "fattening left ({}, {}) unfilled",
                    p - a,
                    q + bb
                )));
            }
        }
    }
    Ok(grid)
}

/// Read the zigzag prefix of the given depth off a grid.
pub fn extract_zigzag(grid: &Grid, anchor: Pos, depth: usize) -> Result<ZigzagPath> {
    let start = grid
        .vertex(anchor)
        .ok_or_else(|| LgbsError::DepthExhausted(format!("no vertex at {anchor:?}")))?;
    let (p, q) = anchor;
    let mut steps = Vec::new();
    for i in 0..depth as i64 {
        let diag = (p - i, q + i);
        let mid = (p - i, q + i + 1);
        let plus = grid
            .eplus(diag)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("no E+ edge at {diag:?}")))?;
        let minus = grid
            .eminus(mid)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("no E- edge at {mid:?}")))?;
        steps.push(ZigzagStep { plus, minus });
    }
    Ok(ZigzagPath { anchor, start, steps, tail: Tail::Finite })
}

/// All zigzag steps leaving a vertex: each pairs an `E⁺` edge out of it with
/// an `E⁻` edge from two levels up onto the same middle vertex.
pub fn steps_from(b: &LambdaBiSystem, level: usize, v: usize) -> Result<Vec<ZigzagStep>> {
    let mut out = Vec::new();
    for plus in b.plus_out_of(level, v)? {
        let mid = b.plus_edge(plus)?.tgt as usize;
        for minus in b.minus_into(level + 1, mid)? {
            out.push(ZigzagStep { plus, minus });
        }
    }
    out.sort();
    Ok(out)
}
