//! Finite and lazy representations of configurations.
//!
//! A configuration is determined by a head symbol and a zigzag path from a
//! level-1 vertex anchored at `(-1, 1)`; with an eventually periodic path the
//! representation is exact for the whole infinite object, otherwise all
//! answers are depth-qualified.

use crate::alphabet::{Sym, Word};
use crate::bisystem::LambdaBiSystem;
use crate::canonical::{detect_stabilization, ClassLocator};
use crate::configuration::grid::{level_of, Grid, Pos};
use crate::configuration::zigzag::{extract_zigzag, fatten, Tail, ZigzagPath, ZigzagStep};
use crate::configuration::{extend_grid, ExtendOrder};
use crate::error::{LgbsError, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfigurationRep {
    pub head: Sym,
    pub zigzag: ZigzagPath,
}

impl ConfigurationRep {
    /// Validate the pair: the zigzag must be anchored at `(-1, 1)` and the
    /// head symbol must label an `E⁺` edge into its start vertex.
    pub fn new(b: &LambdaBiSystem, head: Sym, zigzag: ZigzagPath) -> Result<ConfigurationRep> {
        if zigzag.anchor != (-1, 1) {
            return Err(LgbsError::InvalidBisystem(
                "configuration zigzags are anchored at (-1, 1)".into(),
            ));
        }
        zigzag.validate(b)?;
        if b.plus_into(0, zigzag.start, head)?.is_none() {
            return Err(LgbsError::InvalidBisystem(format!(
                "no E+ edge labeled {} into {}",
                b.alphabet.name(head),
                b.vertex_id(1, zigzag.start)
            )));
        }
        Ok(ConfigurationRep { head, zigzag })
    }

    pub fn is_periodic(&self) -> bool {
        self.zigzag.is_periodic()
    }

    /// Steps usable for a window of the given size.
    fn depth_available(&self, depth: usize) -> bool {
        match self.zigzag.tail {
            Tail::Finite => self.zigzag.len() >= depth,
            Tail::Periodic { .. } => true,
        }
    }
}

/// The triangle window `Δ_{(-n, n)}` of the configuration, with all labels.
pub fn config_window(b: &LambdaBiSystem, rep: &ConfigurationRep, n: usize) -> Result<Grid> {
    if n == 0 {
        return Err(LgbsError::DepthExhausted("window size must be >= 1".into()));
    }
    let depth = n - 1;
    if !rep.depth_available(depth) {
        return Err(LgbsError::DepthExhausted(format!(
            "zigzag depth {} cannot fill a window of size {n}",
            rep.zigzag.len()
        )));
    }
    let fat = fatten(b, &rep.zigzag, depth)?;
    let rect = fat.restrict_rectangle((-1, 1), depth, depth);
    extend_grid(b, &rect, (-1, 1), depth, depth, &[rep.head], ExtendOrder::LeftFirst)
}

/// Read the label word `x_a .. x_b` of the configuration.
pub fn pi_range(b: &LambdaBiSystem, rep: &ConfigurationRep, a: i64, upto: i64) -> Result<Word> {
    if a > upto {
        return Ok(Vec::new());
    }
    let n = (a.abs().max(upto.abs()) + 1) as usize;
    let g = config_window(b, rep, n)?;
    let mut out = Vec::new();
    for i in a..=upto {
        let r = g
            .eplus((i - 1, i))
            .ok_or_else(|| LgbsError::DepthExhausted(format!("label x_{i} missing")))?;
        out.push(b.plus_edge(r)?.label);
    }
    Ok(out)
}

/// Extract the representation back out of a window (the inverse of
/// [`config_window`] on the covered depth).
pub fn rep_from_window(b: &LambdaBiSystem, g: &Grid, depth: usize) -> Result<ConfigurationRep> {
    let zig = extract_zigzag(g, (-1, 1), depth)?;
    let head_edge = g
        .eplus((-1, 0))
        .ok_or_else(|| LgbsError::DepthExhausted("window misses the head edge".into()))?;
    let head = b.plus_edge(head_edge)?.label;
    ConfigurationRep::new(b, head, zig)
}

// ---------------------------------------------------------------------------
// Periodic points
// ---------------------------------------------------------------------------

/// Exact representation of the configuration of the periodic point
/// `x_i = block[i mod per]`.  With a stabilized system the zigzag carries a
/// periodic tail of the same period; otherwise it is the longest finite
/// prefix the truncation supports.
pub fn periodic_config(
    b: &LambdaBiSystem,
    loc: &ClassLocator,
    block: &[Sym],
) -> Result<ConfigurationRep> {
    if block.is_empty() {
        return Err(LgbsError::InvalidPresentation("empty period block".into()));
    }
    if !loc.periodic_point_exists(block) {
        return Err(LgbsError::InvalidPresentation(format!(
            "{} does not spell a cycle",
            b.alphabet.format_word(block)
        )));
    }
    let per = block.len();
    let sym_at = |i: i64| -> Sym {
        let m = per as i64;
        block[(((i % m) + m) % m) as usize]
    };

    let stab = detect_stabilization(b);
    let explicit = match stab {
        Some((onset, _)) => onset.div_ceil(2) + per,
        None => {
            let top = b.top_level();
            if top < 3 {
                return Err(LgbsError::DepthExhausted("truncation too shallow".into()));
            }
            (top - 3) / 2 + 1
        }
    };

    let start = loc.class_at(block, -1, 1)?;
    let mut steps = Vec::new();
    let mut cur = start;
    for j in 0..explicit as i64 {
        let (k, l) = (-1 - j, 1 + j);
        let mid = loc.class_at(block, k, l + 1)?;
        let next = loc.class_at(block, k - 1, l + 1)?;
        let low = level_of((k, l))?;
        let plus = b
            .plus_into(low, mid, sym_at(l))?
            .ok_or_else(|| LgbsError::InconsistentBisystem("periodic E+ step missing".into()))?;
        if b.plus_edge(plus)?.src as usize != cur {
            return Err(LgbsError::InconsistentBisystem("periodic E+ step detached".into()));
        }
        let minus = b
            .minus_out(low + 1, next, sym_at(k))?
            .ok_or_else(|| LgbsError::InconsistentBisystem("periodic E- step missing".into()))?;
        if b.minus_edge(minus)?.tgt as usize != mid {
            return Err(LgbsError::InconsistentBisystem("periodic E- step detached".into()));
        }
        steps.push(ZigzagStep { plus, minus });
        cur = next;
    }
    let tail = if stab.is_some() { Tail::Periodic { period: per } } else { Tail::Finite };
    let zigzag = ZigzagPath { anchor: (-1, 1), start, steps, tail };
    ConfigurationRep::new(b, sym_at(0), zigzag)
}

// ---------------------------------------------------------------------------
// Shift
// ---------------------------------------------------------------------------

/// Shift by one: `(σx)_{(k,l)} = x_{(k+1,l+1)}`.
pub fn shift_rep(b: &LambdaBiSystem, rep: &ConfigurationRep) -> Result<ConfigurationRep> {
    reanchor(b, rep, 1)
}

/// Inverse shift.
pub fn unshift_rep(b: &LambdaBiSystem, rep: &ConfigurationRep) -> Result<ConfigurationRep> {
    reanchor(b, rep, -1)
}

pub fn shift_by(b: &LambdaBiSystem, rep: &ConfigurationRep, n: i64) -> Result<ConfigurationRep> {
    let mut cur = rep.clone();
    for _ in 0..n.abs() {
        cur = if n > 0 { shift_rep(b, &cur)? } else { unshift_rep(b, &cur)? };
    }
    Ok(cur)
}

/// Re-anchor the representation at origin `n`: the result represents `σⁿ x`.
/// Its staircase lives at the source cells `(n-1-j, n+1+j)`.
fn reanchor(b: &LambdaBiSystem, rep: &ConfigurationRep, n: i64) -> Result<ConfigurationRep> {
    match rep.zigzag.tail {
        Tail::Periodic { period } => {
            let (onset, _) = detect_stabilization(b).ok_or_else(|| {
                LgbsError::InvalidBisystem("periodic rep without stabilization".into())
            })?;
            let i0 = rep.zigzag.len() - period;
            // Beyond j_safe the derived staircase sits inside the periodic
            // part of the source rectangle, so it repeats with the same
            // period; collect one extra period to verify.
            let j_safe = (n.unsigned_abs() as usize + i0 + 1).max(onset.div_ceil(2));
            let prefix = j_safe + period;
            let collect = prefix + period;
            let window = n.unsigned_abs() as usize + collect + 3;
            let g = config_window(b, rep, window)?;
            let (steps, start) = derived_staircase(&g, n, collect)?;
            for j in j_safe..j_safe + period {
                let a = steps[j];
                let c = steps[j + period];
                if a.plus.idx != c.plus.idx
                    || a.minus.idx != c.minus.idx
                    || c.plus.low != a.plus.low + 2 * period
                {
                    return Err(LgbsError::InconsistentBisystem(
                        "shifted staircase lost its periodicity".into(),
                    ));
                }
            }
            let head = label_at(b, &g, n)?;
            let zigzag = ZigzagPath {
                anchor: (-1, 1),
                start,
                steps: steps[..prefix].to_vec(),
                tail: Tail::Periodic { period },
            };
            ConfigurationRep::new(b, head, zigzag)
        }
        Tail::Finite => {
            let s = rep.zigzag.len();
            let window = s + 1;
            let max_j = window as i64 - n.abs() - 2;
            if max_j < 0 {
                return Err(LgbsError::DepthExhausted(
                    "not enough zigzag depth to re-anchor".into(),
                ));
            }
            let g = config_window(b, rep, window)?;
            let (steps, start) = derived_staircase(&g, n, max_j as usize)?;
            let head = label_at(b, &g, n)?;
            let zigzag = ZigzagPath { anchor: (-1, 1), start, steps, tail: Tail::Finite };
            ConfigurationRep::new(b, head, zigzag)
        }
    }
}

/// Collect the staircase of the configuration re-anchored at origin `n` from
/// a window grid of the original: steps at source cells `(n-1-j, n+1+j)`,
/// re-indexed to anchor `(-1, 1)`.
fn derived_staircase(g: &Grid, n: i64, depth: usize) -> Result<(Vec<ZigzagStep>, usize)> {
    let start = g
        .vertex((n - 1, n + 1))
        .ok_or_else(|| LgbsError::DepthExhausted("window misses the new anchor".into()))?;
    let mut steps = Vec::new();
    for j in 0..depth as i64 {
        let diag = (n - 1 - j, n + 1 + j);
        let mid = (n - 1 - j, n + 2 + j);
        let plus = g
            .eplus(diag)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("window misses E+ at {diag:?}")))?;
        let minus = g
            .eminus(mid)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("window misses E- at {mid:?}")))?;
        steps.push(ZigzagStep { plus, minus });
    }
    Ok((steps, start))
}

fn label_at(b: &LambdaBiSystem, g: &Grid, i: i64) -> Result<Sym> {
    let r = g
        .eplus((i - 1, i))
        .ok_or_else(|| LgbsError::DepthExhausted(format!("label x_{i} missing")))?;
    Ok(b.plus_edge(r)?.label)
}

// ---------------------------------------------------------------------------
// Window equivalence and the metric
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WindowEquivalence {
    Equal,
    Distinct,
    UnknownAtDepth(usize),
}

/// Corner trace of a rep at `(p, q)`: the corner vertex and zigzag steps.
fn corner_trace(
    b: &LambdaBiSystem,
    rep: &ConfigurationRep,
    corner: Pos,
    depth: usize,
) -> Result<(usize, Vec<ZigzagStep>)> {
    let (p, q) = corner;
    let span = p.abs().max(q.abs()) as usize + depth + 2;
    if !rep.depth_available(span.saturating_sub(1)) {
        return Err(LgbsError::DepthExhausted(format!(
            "zigzag depth {} cannot reach corner {corner:?} at depth {depth}",
            rep.zigzag.len()
        )));
    }
    let g = config_window(b, rep, span)?;
    let start = g.vertex(corner).expect("corner inside window");
    let mut steps = Vec::new();
    for j in 0..depth as i64 {
        let diag = (p - j, q + j);
        let mid = (p - j, q + j + 1);
        let plus = g.eplus(diag).expect("staircase inside window");
        let minus = g.eminus(mid).expect("staircase inside window");
        steps.push(ZigzagStep { plus, minus });
    }
    Ok((start, steps))
}

/// Exactness bound for a periodic rep's corner trace at `(p, q)`: from this
/// step index on, the trace lies inside the periodic part of the rectangle.
fn exact_from(rep: &ConfigurationRep, corner: Pos, onset: usize) -> usize {
    let Tail::Periodic { period } = rep.zigzag.tail else { return usize::MAX };
    let i0 = rep.zigzag.len() - period;
    let (p, q) = corner;
    let by_region = ((p + 1 + i0 as i64).max(1 + i0 as i64 - q)).max(0) as usize;
    by_region.max(onset.div_ceil(2))
}

/// Decide whether two configurations share their `(p,q)`-rectangle: exact
/// for eventually periodic reps past stabilization, otherwise bounded by the
/// requested depth.
pub fn equivalent_at(
    b: &LambdaBiSystem,
    x: &ConfigurationRep,
    z: &ConfigurationRep,
    corner: Pos,
    depth: usize,
) -> Result<WindowEquivalence> {
    level_of(corner)?;
    let exact = x.is_periodic() && z.is_periodic();
    if exact {
        let (onset, _) = detect_stabilization(b)
            .ok_or_else(|| LgbsError::InvalidBisystem("periodic rep without stabilization".into()))?;
        let px = match x.zigzag.tail {
            Tail::Periodic { period } => period,
            Tail::Finite => unreachable!(),
        };
        let pz = match z.zigzag.tail {
            Tail::Periodic { period } => period,
            Tail::Finite => unreachable!(),
        };
        let pi = lcm(px, pz);
        let j0 = exact_from(x, corner, onset).max(exact_from(z, corner, onset));
        let need = j0 + 2 * pi;
        let (vx, sx) = corner_trace(b, x, corner, need)?;
        let (vz, sz) = corner_trace(b, z, corner, need)?;
        if vx != vz {
            return Ok(WindowEquivalence::Distinct);
        }
        for j in 0..need {
            if sx[j] != sz[j] {
                return Ok(WindowEquivalence::Distinct);
            }
        }
        // Both traces repeat with period pi beyond j0; agreement on the
        // verified range settles the infinite comparison.
        for (s, name) in [(&sx, "left"), (&sz, "right")] {
            for j in j0..j0 + pi {
                let a = s[j];
                let c = s[j + pi];
                if a.plus.idx != c.plus.idx
                    || a.minus.idx != c.minus.idx
                    || c.plus.low != a.plus.low + 2 * pi
                {
                    return Err(LgbsError::InconsistentBisystem(format!(
                        "{name} corner trace lost its periodicity"
                    )));
                }
            }
        }
        return Ok(WindowEquivalence::Equal);
    }

    // Bounded comparison for finite reps.
    let reach = |r: &ConfigurationRep| -> usize {
        match r.zigzag.tail {
            Tail::Periodic { .. } => depth,
            Tail::Finite => {
                let span = r.zigzag.len() + 1;
                let off = (corner.0.abs().max(corner.1.abs()) + 2) as usize;
                depth.min(span.saturating_sub(off))
            }
        }
    };
    let d = reach(x).min(reach(z));
    if d == 0 {
        return Ok(WindowEquivalence::UnknownAtDepth(0));
    }
    let (vx, sx) = corner_trace(b, x, corner, d)?;
    let (vz, sz) = corner_trace(b, z, corner, d)?;
    if vx != vz || sx != sz {
        return Ok(WindowEquivalence::Distinct);
    }
    Ok(WindowEquivalence::UnknownAtDepth(d))
}

fn lcm(a: usize, c: usize) -> usize {
    let g = gcd(a, c);
    a / g * c
}

fn gcd(a: usize, c: usize) -> usize {
    if c == 0 { a } else { gcd(c, a % c) }
}

/// A dyadic distance value: zero or an exact power `2^{-p}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dyadic {
    Zero,
    /// The value `2^{-p}`; `Pow(0)` is 1.
    Pow(u32),
}

impl Dyadic {
    pub fn as_f64(&self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow(p) => 0.5f64.powi(*p as i32),
        }
    }

    pub fn le(&self, other: &Dyadic) -> bool {
        match (self, other) {
            (Dyadic::Zero, _) => true,
            (Dyadic::Pow(_), Dyadic::Zero) => false,
            (Dyadic::Pow(a), Dyadic::Pow(c)) => a >= c,
        }
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dyadic::Zero => write!(f, "0"),
            Dyadic::Pow(0) => write!(f, "1"),
            Dyadic::Pow(p) => write!(f, "2^-{p}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistanceResult {
    Exact(Dyadic),
    /// Depth-limited comparison: the distance is at most this value.
    UpperBound(Dyadic),
}

/// The configuration ultrametric: 1 when the unit triangles differ, `2^{-p}`
/// when `p` is the largest window of agreement, 0 for equal configurations.
pub fn distance(b: &LambdaBiSystem, x: &ConfigurationRep, z: &ConfigurationRep) -> Result<DistanceResult> {
    // Cap for exact equality of periodic pairs: windows are determined by the
    // head and the staircase, both settled within the verified periodic range.
    let exact_cap: Option<usize> = if x.is_periodic() && z.is_periodic() {
        match equivalent_at(b, x, z, (-1, 1), 0)? {
            WindowEquivalence::Equal => {
                if x.head == z.head {
                    return Ok(DistanceResult::Exact(Dyadic::Zero));
                }
                Some(1)
            }
            _ => Some(usize::MAX),
        }
    } else {
        None
    };

    let mut p = 1usize;
    loop {
        let wx = config_window(b, x, p);
        let wz = config_window(b, z, p);
        match (wx, wz) {
            (Ok(a), Ok(c)) => {
                if a != c {
                    return Ok(DistanceResult::Exact(Dyadic::Pow(p as u32 - 1)));
                }
            }
            _ => {
                // Depth exhausted: agreement certified to window p-1 only.
                return Ok(DistanceResult::UpperBound(Dyadic::Pow(p as u32 - 1)));
            }
        }
        if let Some(cap) = exact_cap {
            if cap != usize::MAX && p > cap {
                // Heads differ yet windows agree: impossible, the head edge
                // label sits inside every window.
                return Err(LgbsError::InconsistentBisystem("head not visible in window".into()));
            }
        }
        p += 1;
        if p > 64 {
            // Periodic pairs settle through the Equal branch above; finite
            // pairs exhaust their depth.  Reaching here means both reps are
            // periodic and distinct, and the divergence bound says the
            // difference must show within the verified range.
            return Err(LgbsError::InconsistentBisystem(
                "distance loop exceeded the periodic divergence bound".into(),
            ));
        }
    }
}

// ---------------------------------------------------------------------------
// Class members
// ---------------------------------------------------------------------------

/// The member of the `(p,q)`-rectangle class of `x` with triangle word `mu`:
/// shares the rectangle of `x` at `(p, q)` and has `P`-word `mu` there.
pub fn class_member(
    b: &LambdaBiSystem,
    x: &ConfigurationRep,
    corner: Pos,
    mu: &[Sym],
) -> Result<ConfigurationRep> {
    let (p, q) = corner;
    let n = level_of(corner)?;
    if mu.len() != n {
        return Err(LgbsError::WordNotInP(format!(
            "word length {} does not match corner level {n}",
            mu.len()
        )));
    }
    // Steps from which the (-1,1)-staircase lies inside the (p,q)-rectangle.
    let j0 = (-1 - p).max(q - 1).max(0) as usize;
    let span = (p.abs().max(q.abs()) as usize) + j0 + 3;
    if !x.depth_available(span - 1) {
        return Err(LgbsError::DepthExhausted("zigzag too short for the class corner".into()));
    }
    let g = config_window(b, x, span)?;
    let height = (p - (-(span as i64))).max(0) as usize;
    let width = ((span as i64) - q).max(0) as usize;
    let rect = g.restrict_rectangle(corner, height, width);
    let z = extend_grid(b, &rect, corner, height, width, mu, ExtendOrder::LeftFirst)?;

    let start = z
        .vertex((-1, 1))
        .ok_or_else(|| LgbsError::DepthExhausted("extension misses the anchor".into()))?;
    let mut steps = Vec::new();
    for j in 0..j0 as i64 {
        let diag = (-1 - j, 1 + j);
        let mid = (-1 - j, 2 + j);
        let plus = z
            .eplus(diag)
            .ok_or_else(|| LgbsError::DepthExhausted("extension misses a staircase edge".into()))?;
        let minus = z
            .eminus(mid)
            .ok_or_else(|| LgbsError::DepthExhausted("extension misses a staircase edge".into()))?;
        steps.push(ZigzagStep { plus, minus });
    }
    // Inside the rectangle the member shares the staircase of x verbatim.
    let total = x.zigzag.len().max(j0);
    for j in j0..total {
        steps.push(x.zigzag.step_at(b, j)?);
    }
    let head_edge = z
        .eplus((-1, 0))
        .ok_or_else(|| LgbsError::DepthExhausted("extension misses the head".into()))?;
    let head = b.plus_edge(head_edge)?.label;
    let zigzag = ZigzagPath { anchor: (-1, 1), start, steps, tail: x.zigzag.tail };
    ConfigurationRep::new(b, head, zigzag)
}
