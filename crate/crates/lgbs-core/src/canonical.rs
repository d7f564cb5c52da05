//! Canonical bisystem of a subshift, built from central word classes.
//!
//! Central word sets of a sofic presentation are indexed by profile pairs
//! (left context profile, right context profile).  Rather than enumerate
//! words, the builder refines a partition of the finite profile-pair set:
//! two pairs are level-(n+1)-equivalent iff for every symbol b their
//! prefix-stepped pairs are level-n-equivalent.  The level-n vertices of the
//! canonical bisystem are the non-empty partition blocks; `E⁻` edges are
//! prefix derivatives and `E⁺` edges suffix derivatives of the block word
//! sets.
//!
//! The refinement map sends the level-n partition to the level-(n+1)
//! partition deterministically, so the partition sequence is eventually
//! periodic; if two consecutive partitions are equal the sequence is constant
//! from there on (equality propagates level by level through the prefix
//! decomposition of the word sets).  That first repeated level is the
//! stabilization onset: all deeper levels are copies of the stable pattern,
//! which is what makes infinite-depth questions about sofic inputs exactly
//! decidable downstream.

use crate::alphabet::Sym;
use crate::bisystem::{Edge, LambdaBiSystem, Stabilization};
use crate::error::{LgbsError, Result};
use crate::subshift::{LabeledGraph, ProfilePair, SubshiftPresentation};
use std::collections::{BTreeMap, BTreeSet};

/// Word-materialization budget for canonical ordering and verification.
const WORD_BUDGET: usize = 1 << 20;

/// Partition of the profile-pair set by word-set identity at one length.
/// `None` marks pairs whose central set is empty at this length.  Blocks are
/// numbered by first occurrence in pair order, which makes `==` mean
/// "same grouping".
#[derive(Clone, PartialEq, Eq, Debug)]
struct Partition {
    block_of: Vec<Option<usize>>,
    nblocks: usize,
    rep: Vec<usize>,
}

struct PairAnalysis {
    graph: LabeledGraph,
    pairs: Vec<ProfilePair>,
    /// Prefix step: (L, R) -> (step(L, b), R), None when the image is empty.
    left_step: Vec<Vec<Option<usize>>>,
    /// Suffix step: (L, R) -> (L, pre(R, a)), None when the preimage is empty.
    right_step: Vec<Vec<Option<usize>>>,
    /// partitions[n] classifies central sets of length n, for n up to the
    /// stabilization onset + 1 (or the computation cap).
    partitions: Vec<Partition>,
    /// First n with partitions[n] == partitions[n+1].
    onset: Option<usize>,
}

impl PairAnalysis {
    fn analyze(p: &SubshiftPresentation, want_levels: usize) -> Result<PairAnalysis> {
        let graph = p.essential_graph()?;
        let lefts = graph.left_profiles();
        let rights = graph.right_profiles();
        let mut pairs = Vec::new();
        for &l in &lefts {
            for &r in &rights {
                pairs.push(ProfilePair { left: l, right: r });
            }
        }
        pairs.sort();
        let index: BTreeMap<ProfilePair, usize> =
            pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let nsym = graph.alphabet.len();
        let mut left_step = vec![vec![None; nsym]; pairs.len()];
        let mut right_step = vec![vec![None; nsym]; pairs.len()];
        for (i, pr) in pairs.iter().enumerate() {
            for s in graph.alphabet.syms() {
                let l2 = graph.step_set(pr.left, s);
                if !l2.is_empty() {
                    let key = ProfilePair { left: l2, right: pr.right };
                    // The eventual-image family is closed under non-empty
                    // steps, so the stepped pair is always present.
                    left_step[i][s.0 as usize] = Some(index[&key]);
                }
                let r2 = graph.pre_set(pr.right, s);
                if !r2.is_empty() {
                    let key = ProfilePair { left: pr.left, right: r2 };
                    right_step[i][s.0 as usize] = Some(index[&key]);
                }
            }
        }

        // Level 0: the central set is {empty word} iff the contexts meet.
        let block_of: Vec<Option<usize>> = pairs
            .iter()
            .map(|pr| if pr.left.intersect(&pr.right).is_empty() { None } else { Some(0) })
            .collect();
        let rep = block_of.iter().position(|b| b.is_some()).into_iter().collect::<Vec<_>>();
        if rep.is_empty() {
            return Err(LgbsError::EmptySubshift);
        }
        let p0 = Partition { block_of, nblocks: 1, rep };

        let mut analysis = PairAnalysis {
            graph,
            pairs,
            left_step,
            right_step,
            partitions: vec![p0],
            onset: None,
        };
        let cap = 2 * analysis.pairs.len() + want_levels + 8;
        for n in 1..=cap {
            let next = analysis.refine(&analysis.partitions[n - 1]);
            if next == analysis.partitions[n - 1] {
                analysis.onset = Some(n - 1);
                break;
            }
            analysis.partitions.push(next);
        }
        Ok(analysis)
    }

    fn refine(&self, prev: &Partition) -> Partition {
        let nsym = self.graph.alphabet.len();
        let mut key_to_block: BTreeMap<Vec<Option<usize>>, usize> = BTreeMap::new();
        let mut block_of = Vec::with_capacity(self.pairs.len());
        let mut rep = Vec::new();
        for i in 0..self.pairs.len() {
            let sig: Vec<Option<usize>> = (0..nsym)
                .map(|s| self.left_step[i][s].and_then(|j| prev.block_of[j]))
                .collect();
            if sig.iter().all(Option::is_none) {
                block_of.push(None);
                continue;
            }
            let next_id = key_to_block.len();
            let id = *key_to_block.entry(sig).or_insert(next_id);
            if id == rep.len() {
                rep.push(i);
            }
            block_of.push(Some(id));
        }
        Partition { block_of, nblocks: rep.len(), rep }
    }

    /// Partition valid for level n (clamped into the stable regime).
    fn part(&self, n: usize) -> Result<&Partition> {
        if n < self.partitions.len() {
            Ok(&self.partitions[n])
        } else if self.onset.is_some() {
            Ok(self.partitions.last().unwrap())
        } else {
            Err(LgbsError::ExactnessUnavailable(format!(
                "partition sequence did not stabilize within {} levels",
                self.partitions.len()
            )))
        }
    }

    /// Lexicographic rank (by materialized word set) of each block at one level.
    fn lex_order(&self, n: usize) -> Result<Vec<usize>> {
        let part = self.part(n)?;
        let mut budget = WORD_BUDGET;
        let mut keyed: Vec<(BTreeSet<crate::alphabet::Word>, usize)> = Vec::new();
        for (b, &r) in part.rep.iter().enumerate() {
            let count = self.graph.central_count(self.pairs[r], n) as usize;
            if count > budget {
                return Err(LgbsError::ExactnessUnavailable(format!(
                    "central sets at level {n} exceed the materialization budget"
                )));
            }
            budget -= count;
            keyed.push((self.graph.central_set(self.pairs[r], n).words, b));
        }
        keyed.sort();
        let mut order = vec![0usize; part.nblocks];
        for (rank, (_, b)) in keyed.into_iter().enumerate() {
            order[b] = rank;
        }
        Ok(order)
    }
}

/// Pair analysis plus the per-level vertex orderings actually used by the
/// build: lexicographic up to the stabilization onset + 1, inherited through
/// the level isomorphism beyond it (which keeps all stable levels on one
/// index space).
struct Frame {
    analysis: PairAnalysis,
    stable_top: usize,
    orders: Vec<Vec<usize>>,
}

impl Frame {
    fn new(p: &SubshiftPresentation, want_levels: usize) -> Result<Frame> {
        let analysis = PairAnalysis::analyze(p, want_levels)?;
        let stable_top = match analysis.onset {
            Some(onset) => (onset + 1).min(want_levels),
            None => want_levels,
        };
        let mut orders = Vec::new();
        for n in 0..=stable_top {
            orders.push(analysis.lex_order(n)?);
        }
        Ok(Frame { analysis, stable_top, orders })
    }

    fn order_at(&self, n: usize) -> &Vec<usize> {
        &self.orders[n.min(self.stable_top)]
    }

    /// Vertex index at a level of the class containing the given pair, if
    /// the class is non-empty.
    fn vertex_of_pair(&self, n: usize, pair_idx: usize) -> Result<Option<usize>> {
        let part = self.analysis.part(n)?;
        Ok(part.block_of[pair_idx].map(|b| self.order_at(n)[b]))
    }
}

/// Construct the canonical bisystem of a subshift up to the given level.
///
/// Vertices at level n are the distinct non-empty central sets of length n in
/// lexicographic order; an `E⁻` edge carries each class to its prefix
/// derivative and an `E⁺` edge comes from each suffix derivative.  When the
/// class partition stabilizes early enough the result carries a
/// [`Stabilization`] certificate and all levels beyond the truncation stay
/// accessible through the stable pattern.
pub fn build_canonical(p: &SubshiftPresentation, levels: usize) -> Result<LambdaBiSystem> {
    if levels < 1 {
        return Err(LgbsError::InvalidPresentation("level bound must be >= 1".into()));
    }
    let frame = Frame::new(p, levels)?;
    build_from_frame(p, &frame, levels)
}

/// Like [`build_canonical`], but extends the truncation as needed so that the
/// stabilization certificate is included whenever the partition stabilizes.
pub fn build_canonical_stabilized(p: &SubshiftPresentation, min_levels: usize) -> Result<LambdaBiSystem> {
    let probe = PairAnalysis::analyze(p, min_levels)?;
    let levels = match probe.onset {
        Some(onset) => min_levels.max(onset + 2).max(1),
        None => min_levels.max(1),
    };
    let frame = Frame::new(p, levels)?;
    build_from_frame(p, &frame, levels)
}

fn build_from_frame(p: &SubshiftPresentation, frame: &Frame, levels: usize) -> Result<LambdaBiSystem> {
    let analysis = &frame.analysis;
    let order_at = |n: usize| frame.order_at(n);

    let mut level_ids = Vec::new();
    for n in 0..=levels {
        let part = analysis.part(n)?;
        let mut ids = vec![String::new(); part.nblocks];
        for b in 0..part.nblocks {
            ids[order_at(n)[b]] = format!("v{n}_{}", order_at(n)[b]);
        }
        level_ids.push(ids);
    }

    let mut minus: Vec<Vec<Edge>> = Vec::new();
    let mut plus: Vec<Vec<Edge>> = Vec::new();
    for low in 0..levels {
        let hi_part = analysis.part(low + 1)?;
        let lo_part = analysis.part(low)?;
        let hi_ord = order_at(low + 1);
        let lo_ord = order_at(low);
        let mut mi = Vec::new();
        let mut pl = Vec::new();
        for b in 0..hi_part.nblocks {
            let rep = hi_part.rep[b];
            for s in analysis.graph.alphabet.syms() {
                // Prefix derivative: one E- edge per symbol with non-empty
                // derivative, landing on the class of the derived set.
                if let Some(tb) = analysis.left_step[rep][s.0 as usize].and_then(|j| lo_part.block_of[j]) {
                    mi.push(Edge { src: hi_ord[b] as u32, tgt: lo_ord[tb] as u32, label: s });
                }
                // Suffix derivative: one E+ edge per symbol, entering the class.
                if let Some(sb) = analysis.right_step[rep][s.0 as usize].and_then(|j| lo_part.block_of[j]) {
                    pl.push(Edge { src: lo_ord[sb] as u32, tgt: hi_ord[b] as u32, label: s });
                }
            }
            // Well-definedness across the block: every member pair must give
            // the same derivative classes as the representative.
            for (i, blk) in hi_part.block_of.iter().enumerate() {
                if *blk != Some(b) || i == rep {
                    continue;
                }
                for s in 0..analysis.graph.alphabet.len() {
                    let a = analysis.left_step[rep][s].and_then(|j| lo_part.block_of[j]);
                    let c = analysis.left_step[i][s].and_then(|j| lo_part.block_of[j]);
                    if a != c {
                        return Err(LgbsError::InconsistentBisystem(format!(
                            "prefix derivative not class-invariant at level {} block {b}",
                            low + 1
                        )));
                    }
                    let a = analysis.right_step[rep][s].and_then(|j| lo_part.block_of[j]);
                    let c = analysis.right_step[i][s].and_then(|j| lo_part.block_of[j]);
                    if a != c {
                        return Err(LgbsError::InconsistentBisystem(format!(
                            "suffix derivative not class-invariant at level {} block {b}",
                            low + 1
                        )));
                    }
                }
            }
        }
        mi.sort();
        pl.sort();
        minus.push(mi);
        plus.push(pl);
    }

    let mut b = LambdaBiSystem::new(p.alphabet.clone(), level_ids, minus, plus, None)?;

    if let Some(onset) = analysis.onset {
        if onset + 2 <= levels {
            // Index map from the onset-level lex order to the stable lex order.
            let part = analysis.part(onset)?;
            let o_lo = order_at(onset);
            let o_hi = order_at(onset + 1);
            let mut iso = vec![0usize; part.nblocks];
            for blk in 0..part.nblocks {
                iso[o_lo[blk]] = o_hi[blk];
            }
            b.set_stabilization(Stabilization { onset, iso });
        }
    }

    verify_build(p, &b)?;
    Ok(b)
}

/// Re-verify the constructed system: structural axioms at every built level,
/// follower/predecessor agreement (counts everywhere, word sets within
/// budget).  A failure here indicates a bug in the profile machinery.
fn verify_build(p: &SubshiftPresentation, b: &LambdaBiSystem) -> Result<()> {
    let report = b.validate_axioms_structural();
    if let Some(fail) = report.failures().first() {
        return Err(LgbsError::InconsistentBisystem(format!(
            "canonical build failed {:?}: {}",
            fail.axiom,
            fail.witness.clone().unwrap_or_default()
        )));
    }
    let mut budget = WORD_BUDGET as u64;
    for l in 0..=b.top_level() {
        for v in 0..b.m(l)? {
            let fc = b.follower_count(l, v)?;
            let pc = b.predecessor_count(l, v)?;
            if fc != pc {
                return Err(LgbsError::InconsistentBisystem(format!(
                    "follower/predecessor count mismatch at {}",
                    b.vertex_id(l, v)
                )));
            }
            if fc <= budget {
                budget -= fc;
                if b.follower_set(l, v)? != b.predecessor_set(l, v)? {
                    return Err(LgbsError::InconsistentBisystem(format!(
                        "FPCC word sets differ at {}",
                        b.vertex_id(l, v)
                    )));
                }
            }
        }
    }
    let _ = p;
    Ok(())
}

/// Resolves central classes of concrete periodic points to vertex indices of
/// a canonical build.  Rebuilds the pair analysis of the presentation, so it
/// must be constructed from the same presentation the bisystem came from.
pub struct ClassLocator {
    frame: Frame,
}

impl ClassLocator {
    pub fn new(p: &SubshiftPresentation, b: &LambdaBiSystem) -> Result<ClassLocator> {
        let frame = Frame::new(p, b.top_level())?;
        for l in 0..=b.top_level() {
            let part = frame.analysis.part(l)?;
            if part.nblocks != b.m(l)? {
                return Err(LgbsError::InvalidBisystem(format!(
                    "bisystem does not match the presentation at level {l}"
                )));
            }
        }
        Ok(ClassLocator { frame })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.frame.analysis.graph
    }

    /// Whether the bi-infinite repetition of `block` is a point of the
    /// subshift.
    pub fn periodic_point_exists(&self, block: &[Sym]) -> bool {
        self.graph().periodic_point_exists(block)
    }

    /// Vertex index at level `n(k,l)` of the central class of the periodic
    /// point `x_i = block[i mod per]` at the cut `(k, l)`.
    pub fn class_at(&self, block: &[Sym], k: i64, l: i64) -> Result<usize> {
        let per = block.len() as i64;
        if per == 0 {
            return Err(LgbsError::InvalidPresentation("empty period block".into()));
        }
        let n = (l - k - 1) as usize;
        let g = self.graph();
        let rotate = |shift: i64| -> Vec<Sym> {
            (0..per)
                .map(|i| block[(((shift + i) % per + per) % per) as usize])
                .collect()
        };
        let left = g
            .left_profile_of_periodic(&rotate(k + 1))
            .ok_or_else(|| LgbsError::InvalidPresentation("period block is not admissible".into()))?;
        let right = g
            .right_profile_of_periodic(&rotate(l))
            .ok_or_else(|| LgbsError::InvalidPresentation("period block is not admissible".into()))?;
        let pair = ProfilePair { left, right };
        let idx = self
            .frame
            .analysis
            .pairs
            .binary_search(&pair)
            .map_err(|_| LgbsError::InconsistentBisystem("profile pair outside the family".into()))?;
        self.frame
            .vertex_of_pair(n, idx)?
            .ok_or_else(|| LgbsError::InconsistentBisystem("periodic point in an empty class".into()))
    }
}

/// Return the verified stabilization onset and level-isomorphism data of a
/// canonical build, if recorded: the smallest level whose class structure
/// repeats, with the index map from that level onto the next.
pub fn detect_stabilization(b: &LambdaBiSystem) -> Option<(usize, Vec<usize>)> {
    let stab = b.stabilization()?;
    let onset = stab.onset;
    let top = b.top_level();
    if onset + 2 > top {
        return None;
    }
    if b.m(onset).ok()? != b.m(onset + 1).ok()? {
        return None;
    }
    // The stable pattern must repeat verbatim above the onset...
    let pat_minus = b.minus_edges(onset + 1).ok()?.to_vec();
    let pat_plus = b.plus_edges(onset + 1).ok()?.to_vec();
    for low in onset + 1..top {
        if b.minus_edges(low).ok()? != pat_minus.as_slice() || b.plus_edges(low).ok()? != pat_plus.as_slice() {
            return None;
        }
    }
    // ...and the boundary pair must match the pattern through the iso.
    let iso = &stab.iso;
    let boundary_minus: BTreeSet<Edge> = b
        .minus_edges(onset)
        .ok()?
        .iter()
        .map(|e| Edge { src: e.src, tgt: iso[e.tgt as usize] as u32, label: e.label })
        .collect();
    if boundary_minus != pat_minus.iter().copied().collect() {
        return None;
    }
    let boundary_plus: BTreeSet<Edge> = b
        .plus_edges(onset)
        .ok()?
        .iter()
        .map(|e| Edge { src: iso[e.src as usize] as u32, tgt: e.tgt, label: e.label })
        .collect();
    if boundary_plus != pat_plus.iter().copied().collect() {
        return None;
    }
    Some((onset, iso.clone()))
}

// ---------------------------------------------------------------------------
// Point-semantics verification
// ---------------------------------------------------------------------------

/// Outcome of replaying the point-based edge definition against the
/// derivative-based edges of a canonical build.
#[derive(Clone, Debug, Default)]
pub struct PointCheckReport {
    pub points_checked: usize,
    pub edges_checked: usize,
    pub failures: Vec<String>,
    pub language_checked_to: usize,
    pub language_ok: bool,
}

impl PointCheckReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty() && self.language_ok
    }
}

/// For every periodic point of the subshift up to the period bound, insert
/// each admissible symbol next to each cut position, recompute the central
/// class of the modified point, and compare with the derivative-based edge of
/// the build.  Also checks that the word sets presented by the bisystem agree
/// with the subshift language level by level.
pub fn verify_point_semantics(
    p: &SubshiftPresentation,
    b: &LambdaBiSystem,
    max_level: usize,
    period_bound: usize,
) -> Result<PointCheckReport> {
    let frame = Frame::new(p, b.top_level())?;
    let analysis = &frame.analysis;
    let graph = &analysis.graph;
    let mut report = PointCheckReport { language_ok: true, ..Default::default() };

    // Deterministic sample: all periodic points up to the period bound.
    let mut points: Vec<Vec<Sym>> = Vec::new();
    for per in 1..=period_bound {
        for w in graph.admissible_words(per) {
            if graph.periodic_point_exists(&w) {
                points.push(w);
            }
        }
    }

    let max_level = max_level.min(b.top_level());
    for w in &points {
        report.points_checked += 1;
        let per = w.len() as i64;
        for n in 1..=max_level {
            for k in -per..0 {
                let l = k + n as i64 + 1;
                let rotate = |shift: i64| -> Vec<Sym> {
                    (0..per)
                        .map(|i| w[(((shift + i) % per + per) % per) as usize])
                        .collect()
                };
                // Left ray ends at position k, right ray starts at l.
                let left = graph
                    .left_profile_of_periodic(&rotate(k + 1))
                    .ok_or_else(|| LgbsError::InconsistentBisystem("periodic ray vanished".into()))?;
                let right = graph
                    .right_profile_of_periodic(&rotate(l))
                    .ok_or_else(|| LgbsError::InconsistentBisystem("periodic ray vanished".into()))?;
                let pair = ProfilePair { left, right };
                let pair_idx = analysis.pairs.binary_search(&pair).map_err(|_| {
                    LgbsError::InconsistentBisystem("periodic profile pair outside the family".into())
                })?;
                let Some(src) = frame.vertex_of_pair(n, pair_idx)? else {
                    return Err(LgbsError::InconsistentBisystem(
                        "periodic point in an empty class".into(),
                    ));
                };

                for s in graph.alphabet.syms() {
                    // Point-based E- edge: insert s after position k; the
                    // modified point is admissible iff some central word
                    // starts with s.
                    let stepped = analysis.left_step[pair_idx][s.0 as usize]
                        .filter(|&j| analysis.part(n - 1).map(|pt| pt.block_of[j].is_some()).unwrap_or(false));
                    let derived = b.minus_out(n - 1, src, s)?;
                    report.edges_checked += 1;
                    match (stepped, derived) {
                        (None, None) => {}
                        (Some(j), Some(mr)) => {
                            let want = frame.vertex_of_pair(n - 1, j)?.unwrap();
                            let got = b.minus_edge(mr)?.tgt as usize;
                            if want != got {
                                report.failures.push(format!(
                                    "E- target mismatch at level {n} vertex {src} symbol {}",
                                    graph.alphabet.name(s)
                                ));
                            }
                        }
                        (a, c) => report.failures.push(format!(
                            "E- existence mismatch at level {n} vertex {src} symbol {}: point {} vs derivative {}",
                            graph.alphabet.name(s),
                            a.is_some(),
                            c.is_some()
                        )),
                    }

                    // Point-based E+ edge: insert s before position l.
                    let stepped = analysis.right_step[pair_idx][s.0 as usize]
                        .filter(|&j| analysis.part(n - 1).map(|pt| pt.block_of[j].is_some()).unwrap_or(false));
                    let derived = b.plus_into(n - 1, src, s)?;
                    report.edges_checked += 1;
                    match (stepped, derived) {
                        (None, None) => {}
                        (Some(j), Some(pr)) => {
                            let want = frame.vertex_of_pair(n - 1, j)?.unwrap();
                            let got = b.plus_edge(pr)?.src as usize;
                            if want != got {
                                report.failures.push(format!(
                                    "E+ source mismatch at level {n} vertex {src} symbol {}",
                                    graph.alphabet.name(s)
                                ));
                            }
                        }
                        (a, c) => report.failures.push(format!(
                            "E+ existence mismatch at level {n} vertex {src} symbol {}: point {} vs derivative {}",
                            graph.alphabet.name(s),
                            a.is_some(),
                            c.is_some()
                        )),
                    }
                }
            }
        }
    }

    // Language comparison: the union of class word sets is the factor
    // language, level by level within budget.
    let mut budget = WORD_BUDGET;
    for n in 0..=max_level {
        let admissible = graph.admissible_words(n);
        if admissible.len() > budget {
            break;
        }
        budget -= admissible.len();
        let mut union = BTreeSet::new();
        for v in 0..b.m(n)? {
            union.extend(b.follower_set(n, v)?);
        }
        report.language_checked_to = n;
        if union != admissible {
            report.language_ok = false;
            report.failures.push(format!("presented language differs at length {n}"));
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift;

    #[test]
    fn golden_mean_level_sizes() {
        let b = build_canonical(&subshift::golden_mean(), 5).unwrap();
        let m: Vec<usize> = (0..=5).map(|l| b.m(l).unwrap()).collect();
        assert_eq!(m, vec![1, 2, 4, 4, 4, 4]);
    }

    #[test]
    fn full_shift_stabilizes_at_zero() {
        let b = build_canonical_stabilized(&subshift::full_shift(2), 3).unwrap();
        let (onset, iso) = detect_stabilization(&b).unwrap();
        assert_eq!(onset, 0);
        assert_eq!(iso, vec![0]);
    }

    #[test]
    fn golden_mean_stabilizes_by_four() {
        let b = build_canonical_stabilized(&subshift::golden_mean(), 8).unwrap();
        let (onset, _) = detect_stabilization(&b).unwrap();
        assert!(onset <= 4, "onset {onset}");
        // m(l) eventually constant.
        let m: Vec<usize> = (0..=8).map(|l| b.m(l).unwrap()).collect();
        assert_eq!(&m[2..], &[4, 4, 4, 4, 4, 4, 4]);
        // Virtual levels keep the stable pattern.
        assert_eq!(b.m(40).unwrap(), 4);
        assert_eq!(b.minus_edges(40).unwrap(), b.minus_edges(onset + 1).unwrap());
    }

    #[test]
    fn golden_mean_edge_table() {
        let gm = subshift::golden_mean();
        let b = build_canonical(&gm, 2).unwrap();
        // Level-2 classes in lex order: v2_0={00}, v2_1={00,01}, v2_2={00,01,10}, v2_3={00,10}.
        // Their prefix derivatives: d0{00}={0}, d1{00}=∅; d0{00,01}={0,1}, d1{00,01}=∅;
        // d0{00,01,10}={0,1}, d1{00,01,10}={0}; d0{00,10}={0}, d1{00,10}={0}.
        // Level-1 lex order: v1_0={0}, v1_1={0,1}.
        let a0 = gm.alphabet.lookup("0").unwrap();
        let a1 = gm.alphabet.lookup("1").unwrap();
        let mut edges: Vec<(usize, usize, Sym)> = b
            .minus_edges(1)
            .unwrap()
            .iter()
            .map(|e| (e.src as usize, e.tgt as usize, e.label))
            .collect();
        edges.sort();
        assert_eq!(
            edges,
            vec![
                (0, 0, a0),
                (1, 1, a0),
                (2, 1, a0),
                (2, 0, a1),
                (3, 0, a0),
                (3, 0, a1),
            ]
            .into_iter()
            .map(|(s, t, l)| (s, t, l))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>()
        );
        // The class {00,01} admits no E- edge labeled 1.
        assert!(b.minus_out(1, 1, a1).unwrap().is_none());
    }

    #[test]
    fn derivatives_commute() {
        // Prefix and suffix derivatives commute on every class and symbol
        // pair; this is the well-definedness of the canonical square
        // bijection.
        for p in [subshift::golden_mean(), subshift::even_shift(), subshift::full_shift(3)] {
            let b = build_canonical(&p, 5).unwrap();
            for level in 2..=5usize {
                for v in 0..b.m(level).unwrap() {
                    let words = b.follower_set(level, v).unwrap();
                    for a in p.alphabet.syms() {
                        for bb in p.alphabet.syms() {
                            let d1: BTreeSet<_> = words
                                .iter()
                                .filter(|w| w.first() == Some(&bb))
                                .map(|w| w[1..].to_vec())
                                .filter(|w| w.last() == Some(&a))
                                .map(|w| w[..w.len() - 1].to_vec())
                                .collect();
                            let d2: BTreeSet<_> = words
                                .iter()
                                .filter(|w| w.last() == Some(&a))
                                .map(|w| w[..w.len() - 1].to_vec())
                                .filter(|w| w.first() == Some(&bb))
                                .map(|w| w[1..].to_vec())
                                .collect();
                            assert_eq!(d1, d2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn point_semantics_full_shift() {
        let p = subshift::full_shift(2);
        let b = build_canonical(&p, 4).unwrap();
        let r = verify_point_semantics(&p, &b, 4, 4).unwrap();
        assert!(r.all_ok(), "{:?}", r.failures);
        assert!(r.points_checked > 0 && r.edges_checked > 0);
    }

    #[test]
    fn point_semantics_golden_mean() {
        let p = subshift::golden_mean();
        let b = build_canonical(&p, 5).unwrap();
        let r = verify_point_semantics(&p, &b, 5, 6).unwrap();
        assert!(r.all_ok(), "{:?}", r.failures);
        assert!(r.language_checked_to >= 5);
    }

    #[test]
    fn point_semantics_even_shift() {
        let p = subshift::even_shift();
        let b = build_canonical(&p, 5).unwrap();
        let r = verify_point_semantics(&p, &b, 5, 6).unwrap();
        assert!(r.all_ok(), "{:?}", r.failures);
    }

    #[test]
    fn no_stabilization_reported_when_m_grows() {
        // Period-2 orbit: central sets alternate between empty and singleton
        // per parity, so consecutive partitions never agree.
        let a = crate::alphabet::Alphabet::new(["0", "1"]).unwrap();
        let p = SubshiftPresentation::sft_matrix(a, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let b = build_canonical(&p, 6).unwrap();
        assert!(detect_stabilization(&b).is_none());
    }

    #[test]
    fn two_component_classes() {
        let p = subshift::two_component();
        let b = build_canonical_stabilized(&p, 4).unwrap();
        for l in 1..=4 {
            assert_eq!(b.m(l).unwrap(), 2);
        }
        assert!(detect_stabilization(&b).is_some());
    }
}
