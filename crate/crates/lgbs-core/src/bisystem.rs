//! The lambda-graph bisystem data structure and its axiom validators.
//!
//! A bisystem holds leveled vertex sets `V_0..V_top` (`V_0` a singleton), a
//! downward edge set `E⁻_{l+1,l}` per level pair and an upward edge set
//! `E⁺_{l,l+1}`.  Edge lists are indexed by the lower level of the pair they
//! connect.  Bisystems are infinite objects; a value of this type is a finite
//! truncation, and every "for all levels" axiom is checked up to the
//! truncation and reported as verified to that level.  Canonical builds may
//! additionally carry stabilization data that makes all deeper levels
//! available as copies of the stable pattern.

use crate::alphabet::{Alphabet, Sym, Word};
use crate::error::{LgbsError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// A labeled edge between consecutive levels.  For an `E⁻` edge, `src` is the
/// vertex index at the upper level and `tgt` at the lower level; for an `E⁺`
/// edge, `src` is at the lower level and `tgt` at the upper level.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub tgt: u32,
    pub label: Sym,
}

/// Reference to an `E⁺` edge: index `idx` in the edge list between levels
/// `low` and `low+1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PlusRef {
    pub low: usize,
    pub idx: usize,
}

/// Reference to an `E⁻` edge between levels `low+1` and `low`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MinusRef {
    pub low: usize,
    pub idx: usize,
}

/// Explicit square-bijection entry: the outer corner `(f⁺, f⁻)` at lower
/// level `low` matched with the inner corner `(e⁻, e⁺)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PhiEntry {
    pub low: usize,
    pub f_plus: usize,
    pub f_minus: usize,
    pub e_minus: usize,
    pub e_plus: usize,
}

/// Stabilization certificate for a canonical build: levels `onset` and
/// `onset+1` are isomorphic via `iso` (index at `onset` -> index at
/// `onset+1`), levels at and above `onset+1` share one index space, and the
/// edge pattern repeats from `onset+1` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilization {
    pub onset: usize,
    pub iso: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaBiSystem {
    pub alphabet: Alphabet,
    level_ids: Vec<Vec<String>>,
    minus: Vec<Vec<Edge>>,
    plus: Vec<Vec<Edge>>,
    phi: Option<Vec<PhiEntry>>,
    stabilization: Option<Stabilization>,
}

impl LambdaBiSystem {
    pub fn new(
        alphabet: Alphabet,
        level_ids: Vec<Vec<String>>,
        minus: Vec<Vec<Edge>>,
        plus: Vec<Vec<Edge>>,
        phi: Option<Vec<PhiEntry>>,
    ) -> Result<Self> {
        if level_ids.is_empty() {
            return Err(LgbsError::InvalidBisystem("no levels".into()));
        }
        if minus.len() + 1 != level_ids.len() || plus.len() + 1 != level_ids.len() {
            return Err(LgbsError::InvalidBisystem(
                "edge lists must cover exactly the consecutive level pairs".into(),
            ));
        }
        for (l, ids) in level_ids.iter().enumerate() {
            if ids.is_empty() {
                return Err(LgbsError::InvalidBisystem(format!("level {l} is empty")));
            }
            let distinct: BTreeSet<&String> = ids.iter().collect();
            if distinct.len() != ids.len() {
                return Err(LgbsError::InvalidBisystem(format!("duplicate vertex ids at level {l}")));
            }
        }
        for (l, es) in minus.iter().enumerate() {
            for e in es {
                if e.src as usize >= level_ids[l + 1].len() || e.tgt as usize >= level_ids[l].len() {
                    return Err(LgbsError::InvalidBisystem(format!("minus edge out of range at level {l}")));
                }
            }
        }
        for (l, es) in plus.iter().enumerate() {
            for e in es {
                if e.src as usize >= level_ids[l].len() || e.tgt as usize >= level_ids[l + 1].len() {
                    return Err(LgbsError::InvalidBisystem(format!("plus edge out of range at level {l}")));
                }
            }
        }
        Ok(LambdaBiSystem { alphabet, level_ids, minus, plus, phi, stabilization: None })
    }

    pub(crate) fn set_stabilization(&mut self, s: Stabilization) {
        self.stabilization = Some(s);
    }

    pub fn stabilization(&self) -> Option<&Stabilization> {
        self.stabilization.as_ref()
    }

    /// Highest explicitly stored level.
    pub fn top_level(&self) -> usize {
        self.level_ids.len() - 1
    }

    /// True when vertex and edge data at this level is available, either
    /// stored or via the stable pattern.
    pub fn level_accessible(&self, l: usize) -> bool {
        l <= self.top_level() || self.stabilization.is_some()
    }

    fn require_level(&self, l: usize) -> Result<()> {
        if self.level_accessible(l) {
            Ok(())
        } else {
            Err(LgbsError::DepthExhausted(format!(
                "level {l} beyond truncation {} with no stabilization",
                self.top_level()
            )))
        }
    }

    /// Number of vertices at a level, following the stable pattern beyond the
    /// truncation.
    pub fn m(&self, l: usize) -> Result<usize> {
        self.require_level(l)?;
        if l <= self.top_level() {
            Ok(self.level_ids[l].len())
        } else {
            let s = self.stabilization.as_ref().unwrap();
            Ok(self.level_ids[s.onset + 1].len())
        }
    }

    /// Vertex id; ids for levels beyond the truncation are synthesized from
    /// the stable index.
    pub fn vertex_id(&self, l: usize, i: usize) -> String {
        if l <= self.top_level() {
            self.level_ids[l][i].clone()
        } else {
            format!("v{l}_{i}")
        }
    }

    /// `E⁻` edges between levels `low+1` and `low`.
    pub fn minus_edges(&self, low: usize) -> Result<&[Edge]> {
        self.require_level(low + 1)?;
        if low + 1 <= self.top_level() {
            Ok(&self.minus[low])
        } else {
            let s = self.stabilization.as_ref().unwrap();
            Ok(&self.minus[s.onset + 1])
        }
    }

    /// `E⁺` edges between levels `low` and `low+1`.
    pub fn plus_edges(&self, low: usize) -> Result<&[Edge]> {
        self.require_level(low + 1)?;
        if low + 1 <= self.top_level() {
            Ok(&self.plus[low])
        } else {
            let s = self.stabilization.as_ref().unwrap();
            Ok(&self.plus[s.onset + 1])
        }
    }

    pub fn minus_edge(&self, r: MinusRef) -> Result<Edge> {
        Ok(self.minus_edges(r.low)?[r.idx])
    }

    pub fn plus_edge(&self, r: PlusRef) -> Result<Edge> {
        Ok(self.plus_edges(r.low)?[r.idx])
    }

    /// The unique `E⁻` edge out of a vertex with the given label, if any
    /// (uniqueness holds when right-resolving has been validated).
    pub fn minus_out(&self, low: usize, src: usize, label: Sym) -> Result<Option<MinusRef>> {
        let es = self.minus_edges(low)?;
        let mut found = None;
        for (i, e) in es.iter().enumerate() {
            if e.src as usize == src && e.label == label {
                if found.is_some() {
                    return Err(LgbsError::AmbiguousSquares(format!(
                        "duplicate E- label {} at {}",
                        self.alphabet.name(label),
                        self.vertex_id(low + 1, src)
                    )));
                }
                found = Some(MinusRef { low, idx: i });
            }
        }
        Ok(found)
    }

    /// The unique `E⁺` edge into a vertex with the given label, if any.
    pub fn plus_into(&self, low: usize, tgt: usize, label: Sym) -> Result<Option<PlusRef>> {
        let es = self.plus_edges(low)?;
        let mut found = None;
        for (i, e) in es.iter().enumerate() {
            if e.tgt as usize == tgt && e.label == label {
                if found.is_some() {
                    return Err(LgbsError::AmbiguousSquares(format!(
                        "duplicate E+ label {} into {}",
                        self.alphabet.name(label),
                        self.vertex_id(low + 1, tgt)
                    )));
                }
                found = Some(PlusRef { low, idx: i });
            }
        }
        Ok(found)
    }

    pub fn plus_out_of(&self, low: usize, src: usize) -> Result<Vec<PlusRef>> {
        Ok(self
            .plus_edges(low)?
            .iter()
            .enumerate()
            .filter(|(_, e)| e.src as usize == src)
            .map(|(i, _)| PlusRef { low, idx: i })
            .collect())
    }

    pub fn minus_into(&self, low: usize, tgt: usize) -> Result<Vec<MinusRef>> {
        Ok(self
            .minus_edges(low)?
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tgt as usize == tgt)
            .map(|(i, _)| MinusRef { low, idx: i })
            .collect())
    }

    /// Label words of all full descending `E⁻` paths from the vertex to
    /// `V_0`; the first letter is the label of the edge leaving the vertex.
    pub fn follower_set(&self, level: usize, v: usize) -> Result<BTreeSet<Word>> {
        self.require_level(level)?;
        let mut frontier: Vec<(usize, Word)> = vec![(v, Vec::new())];
        for low in (0..level).rev() {
            let es = self.minus_edges(low)?;
            let mut next = Vec::new();
            for (u, w) in &frontier {
                for e in es.iter().filter(|e| e.src as usize == *u) {
                    let mut w2 = w.clone();
                    w2.push(e.label);
                    next.push((e.tgt as usize, w2));
                }
            }
            frontier = next;
        }
        Ok(frontier.into_iter().map(|(_, w)| w).collect())
    }

    /// Label words of all ascending `E⁺` paths from `V_0` into the vertex;
    /// the last letter is the label of the edge entering the vertex.
    pub fn predecessor_set(&self, level: usize, v: usize) -> Result<BTreeSet<Word>> {
        self.require_level(level)?;
        let mut frontier: BTreeMap<usize, BTreeSet<Word>> =
            (0..self.m(0)?).map(|i| (i, BTreeSet::from([Vec::new()]))).collect();
        for low in 0..level {
            let es = self.plus_edges(low)?;
            let mut next: BTreeMap<usize, BTreeSet<Word>> = BTreeMap::new();
            for e in es.iter() {
                if let Some(ws) = frontier.get(&(e.src as usize)) {
                    let entry = next.entry(e.tgt as usize).or_default();
                    for w in ws {
                        let mut w2 = w.clone();
                        w2.push(e.label);
                        entry.insert(w2);
                    }
                }
            }
            frontier = next;
        }
        Ok(frontier.remove(&v).unwrap_or_default())
    }

    /// `|P(v)|` by path counting (left-resolving makes words and paths agree).
    pub fn predecessor_count(&self, level: usize, v: usize) -> Result<u64> {
        self.require_level(level)?;
        let mut counts: Vec<u64> = vec![1; self.m(0)?];
        for low in 0..level {
            let es = self.plus_edges(low)?;
            let mut next = vec![0u64; self.m(low + 1)?];
            for e in es.iter() {
                next[e.tgt as usize] += counts[e.src as usize];
            }
            counts = next;
        }
        Ok(counts[v])
    }

    /// `|F(v)|` by path counting (right-resolving makes words and paths agree).
    pub fn follower_count(&self, level: usize, v: usize) -> Result<u64> {
        self.require_level(level)?;
        let mut counts: BTreeMap<usize, u64> = BTreeMap::from([(v, 1)]);
        for low in (0..level).rev() {
            let es = self.minus_edges(low)?;
            let mut next: BTreeMap<usize, u64> = BTreeMap::new();
            for e in es.iter() {
                if let Some(c) = counts.get(&(e.src as usize)) {
                    *next.entry(e.tgt as usize).or_insert(0) += c;
                }
            }
            counts = next;
        }
        Ok(counts.values().sum())
    }
}

// ---------------------------------------------------------------------------
// Axiom validation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    TopSingleton,
    RightResolving,
    LeftResolving,
    LocalProperty,
    Fpcc,
    Essentiality,
    PhiBijection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verified_to_level: usize,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl LambdaBiSystem {
    /// Check every bisystem axiom up to the truncation level and report
    /// pass/fail with a minimal witness per failure.
    pub fn validate_axioms(&self) -> ValidationReport {
        self.validate_inner(true)
    }

    /// The structural axioms only (everything except FPCC word-set
    /// enumeration, whose cost grows with the language).
    pub fn validate_axioms_structural(&self) -> ValidationReport {
        self.validate_inner(false)
    }

    fn validate_inner(&self, with_fpcc: bool) -> ValidationReport {
        let top = self.top_level();
        let mut checks = Vec::new();

        // V_0 singleton.
        let v0 = self.level_ids[0].len();
        checks.push(AxiomCheck {
            axiom: Axiom::TopSingleton,
            passed: v0 == 1,
            witness: (v0 != 1).then(|| format!("level 0 has {v0} vertices")),
        });

        // Right-resolving: per E⁻ source, labels distinct.
        let mut rr_witness = None;
        'rr: for low in 0..top {
            let mut seen = BTreeSet::new();
            for e in &self.minus[low] {
                if !seen.insert((e.src, e.label)) {
                    rr_witness = Some(format!(
                        "E- edges from {} duplicate label {}",
                        self.vertex_id(low + 1, e.src as usize),
                        self.alphabet.name(e.label)
                    ));
                    break 'rr;
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: Axiom::RightResolving,
            passed: rr_witness.is_none(),
            witness: rr_witness,
        });

        // Left-resolving: per E⁺ target, labels distinct.
        let mut lr_witness = None;
        'lr: for low in 0..top {
            let mut seen = BTreeSet::new();
            for e in &self.plus[low] {
                if !seen.insert((e.tgt, e.label)) {
                    lr_witness = Some(format!(
                        "E+ edges into {} duplicate label {}",
                        self.vertex_id(low + 1, e.tgt as usize),
                        self.alphabet.name(e.label)
                    ));
                    break 'lr;
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: Axiom::LeftResolving,
            passed: lr_witness.is_none(),
            witness: lr_witness,
        });

        // Local property: for every u at level low, v at level low+2, the
        // label-pair multisets of outer and inner corners agree.
        let mut local_witness = None;
        'local: for low in 0..top.saturating_sub(1) {
            for u in 0..self.level_ids[low].len() {
                for v in 0..self.level_ids[low + 2].len() {
                    let mut outer: BTreeMap<(Sym, Sym), usize> = BTreeMap::new();
                    for pe in self.plus[low].iter() {
                        if pe.src as usize != u {
                            continue;
                        }
                        for me in &self.minus[low + 1] {
                            if me.src as usize == v && me.tgt == pe.tgt {
                                *outer.entry((pe.label, me.label)).or_insert(0) += 1;
                            }
                        }
                    }
                    let mut inner: BTreeMap<(Sym, Sym), usize> = BTreeMap::new();
                    for me in &self.minus[low] {
                        if me.tgt as usize != u {
                            continue;
                        }
                        for pe in &self.plus[low + 1] {
                            if pe.tgt as usize == v && pe.src == me.src {
                                *inner.entry((pe.label, me.label)).or_insert(0) += 1;
                            }
                        }
                    }
                    if outer != inner {
                        local_witness = Some(format!(
                            "corner multisets differ at ({}, {}): outer {} vs inner {}",
                            self.vertex_id(low, u),
                            self.vertex_id(low + 2, v),
                            fmt_pairs(&self.alphabet, &outer),
                            fmt_pairs(&self.alphabet, &inner),
                        ));
                        break 'local;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: Axiom::LocalProperty,
            passed: local_witness.is_none(),
            witness: local_witness,
        });

        // FPCC: follower and predecessor word sets coincide vertexwise.
        if with_fpcc {
            let mut fpcc_witness = None;
            'fpcc: for l in 0..=top {
                for v in 0..self.level_ids[l].len() {
                    let f = self.follower_set(l, v).unwrap_or_default();
                    let p = self.predecessor_set(l, v).unwrap_or_default();
                    if f != p {
                        fpcc_witness = Some(format!(
                            "F({id}) has {nf} words, P({id}) has {np}; first difference {d:?}",
                            id = self.vertex_id(l, v),
                            nf = f.len(),
                            np = p.len(),
                            d = f
                                .symmetric_difference(&p)
                                .next()
                                .map(|w| self.alphabet.format_word(w)),
                        ));
                        break 'fpcc;
                    }
                }
            }
            checks.push(AxiomCheck {
                axiom: Axiom::Fpcc,
                passed: fpcc_witness.is_none(),
                witness: fpcc_witness,
            });
        }

        // Essentiality.
        let mut ess_witness = None;
        'ess: for l in 0..=top {
            for v in 0..self.level_ids[l].len() {
                if l < top {
                    if !self.plus[l].iter().any(|e| e.src as usize == v) {
                        ess_witness = Some(format!("{} has no outgoing E+ edge", self.vertex_id(l, v)));
                        break 'ess;
                    }
                    if !self.minus[l].iter().any(|e| e.tgt as usize == v) {
                        ess_witness =
                            Some(format!("{} has no E- edge from the level above", self.vertex_id(l, v)));
                        break 'ess;
                    }
                }
                if l > 0 {
                    if !self.minus[l - 1].iter().any(|e| e.src as usize == v) {
                        ess_witness = Some(format!("{} has no outgoing E- edge", self.vertex_id(l, v)));
                        break 'ess;
                    }
                    if !self.plus[l - 1].iter().any(|e| e.tgt as usize == v) {
                        ess_witness = Some(format!("{} has no incoming E+ edge", self.vertex_id(l, v)));
                        break 'ess;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: Axiom::Essentiality,
            passed: ess_witness.is_none(),
            witness: ess_witness,
        });

        // Explicit phi, when supplied, must be a label-preserving bijection
        // between the corner sets.
        if let Some(phi) = &self.phi {
            let witness = self.check_phi(phi);
            checks.push(AxiomCheck { axiom: Axiom::PhiBijection, passed: witness.is_none(), witness });
        }

        ValidationReport { verified_to_level: top, checks }
    }

    fn check_phi(&self, phi: &[PhiEntry]) -> Option<String> {
        let top = self.top_level();
        let mut seen_outer = BTreeSet::new();
        let mut seen_inner = BTreeSet::new();
        for entry in phi {
            let low = entry.low;
            if low + 2 > top {
                return Some(format!("phi entry beyond truncation at level {low}"));
            }
            let f_plus = self.plus[low].get(entry.f_plus).copied();
            let f_minus = self.minus[low + 1].get(entry.f_minus).copied();
            let e_minus = self.minus[low].get(entry.e_minus).copied();
            let e_plus = self.plus[low + 1].get(entry.e_plus).copied();
            let (Some(fp), Some(fm), Some(em), Some(ep)) = (f_plus, f_minus, e_minus, e_plus) else {
                return Some(format!("phi entry with out-of-range edge index at level {low}"));
            };
            if fp.tgt != fm.tgt {
                return Some(format!("phi entry at level {low} is not an outer corner"));
            }
            if em.src != ep.src {
                return Some(format!("phi entry at level {low} is not an inner corner"));
            }
            if em.tgt != fp.src || ep.tgt != fm.src {
                return Some(format!("phi entry at level {low} does not fix (u, v)"));
            }
            if fp.label != ep.label || fm.label != em.label {
                return Some(format!("phi entry at level {low} does not preserve labels"));
            }
            if !seen_outer.insert((low, entry.f_plus, entry.f_minus)) {
                return Some(format!("phi maps an outer corner twice at level {low}"));
            }
            if !seen_inner.insert((low, entry.e_minus, entry.e_plus)) {
                return Some(format!("phi hits an inner corner twice at level {low}"));
            }
        }
        // Totality on all outer corners.
        for low in 0..top.saturating_sub(1) {
            for (pi, pe) in self.plus[low].iter().enumerate() {
                for (mi, me) in self.minus[low + 1].iter().enumerate() {
                    if pe.tgt == me.tgt && !seen_outer.contains(&(low, pi, mi)) {
                        return Some(format!(
                            "phi misses the outer corner ({}, {}) at level {low}",
                            pi, mi
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn phi(&self) -> Option<&[PhiEntry]> {
        self.phi.as_deref()
    }
}

fn fmt_pairs(a: &Alphabet, m: &BTreeMap<(Sym, Sym), usize>) -> String {
    let mut s = String::new();
    for ((x, y), c) in m {
        let _ = write!(s, "({},{})x{c} ", a.name(*x), a.name(*y));
    }
    s.trim_end().to_string()
}

// ---------------------------------------------------------------------------
// Incidence matrices
// ---------------------------------------------------------------------------

/// Label-forgetting edge-count matrices with per-symbol 0-1 slices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncidenceMatrices {
    /// minus_total[l]: m(l+1) x m(l) E⁻ edge counts.
    pub minus_total: Vec<Vec<Vec<u64>>>,
    /// plus_total[l]: m(l) x m(l+1) E⁺ edge counts.
    pub plus_total: Vec<Vec<Vec<u64>>>,
    /// minus_slices[l][sym]: 0-1 slice per symbol.
    pub minus_slices: Vec<Vec<Vec<Vec<u64>>>>,
    pub plus_slices: Vec<Vec<Vec<Vec<u64>>>>,
}

impl LambdaBiSystem {
    pub fn incidence(&self) -> IncidenceMatrices {
        let top = self.top_level();
        let nsym = self.alphabet.len();
        let mut minus_total = Vec::new();
        let mut plus_total = Vec::new();
        let mut minus_slices = Vec::new();
        let mut plus_slices = Vec::new();
        for low in 0..top {
            let rows = self.level_ids[low + 1].len();
            let cols = self.level_ids[low].len();
            let mut mt = vec![vec![0u64; cols]; rows];
            let mut ms = vec![vec![vec![0u64; cols]; rows]; nsym];
            for e in &self.minus[low] {
                mt[e.src as usize][e.tgt as usize] += 1;
                ms[e.label.0 as usize][e.src as usize][e.tgt as usize] += 1;
            }
            minus_total.push(mt);
            minus_slices.push(ms);

            let mut pt = vec![vec![0u64; rows]; cols];
            let mut ps = vec![vec![vec![0u64; rows]; cols]; nsym];
            for e in &self.plus[low] {
                pt[e.src as usize][e.tgt as usize] += 1;
                ps[e.label.0 as usize][e.src as usize][e.tgt as usize] += 1;
            }
            plus_total.push(pt);
            plus_slices.push(ps);
        }
        IncidenceMatrices { minus_total, plus_total, minus_slices, plus_slices }
    }
}

// ---------------------------------------------------------------------------
// Serialization ("bisystem/1") and DOT rendering
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BisystemDoc {
    schema: String,
    alphabet: Vec<String>,
    m: Vec<usize>,
    levels: Vec<Vec<String>>,
    edges: Vec<BisEdgeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<Vec<PhiEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilization: Option<Stabilization>,
}

#[derive(Serialize, Deserialize)]
struct BisEdgeDoc {
    kind: String,
    level: usize,
    src: String,
    tgt: String,
    label: String,
}

impl LambdaBiSystem {
    pub fn to_json(&self) -> serde_json::Value {
        let mut edges = Vec::new();
        for (low, es) in self.minus.iter().enumerate() {
            for e in es {
                edges.push(BisEdgeDoc {
                    kind: "-".into(),
                    level: low,
                    src: self.vertex_id(low + 1, e.src as usize),
                    tgt: self.vertex_id(low, e.tgt as usize),
                    label: self.alphabet.name(e.label).to_string(),
                });
            }
        }
        for (low, es) in self.plus.iter().enumerate() {
            for e in es {
                edges.push(BisEdgeDoc {
                    kind: "+".into(),
                    level: low,
                    src: self.vertex_id(low, e.src as usize),
                    tgt: self.vertex_id(low + 1, e.tgt as usize),
                    label: self.alphabet.name(e.label).to_string(),
                });
            }
        }
        let doc = BisystemDoc {
            schema: "bisystem/1".into(),
            alphabet: self.alphabet.names().to_vec(),
            m: self.level_ids.iter().map(|v| v.len()).collect(),
            levels: self.level_ids.clone(),
            edges,
            phi: self.phi.clone(),
            stabilization: self.stabilization.clone(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LambdaBiSystem> {
        let doc: BisystemDoc =
            serde_json::from_value(v.clone()).map_err(|e| LgbsError::Parse(e.to_string()))?;
        if doc.schema != "bisystem/1" {
            return Err(LgbsError::Parse(format!(
                "unsupported schema {:?}, expected \"bisystem/1\"",
                doc.schema
            )));
        }
        let alphabet = Alphabet::new(doc.alphabet)?;
        let index: Vec<BTreeMap<&String, usize>> = doc
            .levels
            .iter()
            .map(|ids| ids.iter().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let top = doc.levels.len().saturating_sub(1);
        let mut minus: Vec<Vec<Edge>> = vec![Vec::new(); top];
        let mut plus: Vec<Vec<Edge>> = vec![Vec::new(); top];
        for e in &doc.edges {
            if e.level >= top {
                return Err(LgbsError::Parse(format!("edge at level {} beyond top", e.level)));
            }
            let label = alphabet
                .lookup(&e.label)
                .ok_or_else(|| LgbsError::Parse(format!("unknown label {:?}", e.label)))?;
            let (src_level, tgt_level): (usize, usize) = match e.kind.as_str() {
                "-" => (e.level + 1, e.level),
                "+" => (e.level, e.level + 1),
                other => return Err(LgbsError::Parse(format!("unknown edge kind {other:?}"))),
            };
            let src = *index[src_level]
                .get(&e.src)
                .ok_or_else(|| LgbsError::Parse(format!("unknown vertex {:?}", e.src)))?;
            let tgt = *index[tgt_level]
                .get(&e.tgt)
                .ok_or_else(|| LgbsError::Parse(format!("unknown vertex {:?}", e.tgt)))?;
            let bucket = if e.kind == "-" { &mut minus[e.level] } else { &mut plus[e.level] };
            bucket.push(Edge { src: src as u32, tgt: tgt as u32, label });
        }
        for es in minus.iter_mut().chain(plus.iter_mut()) {
            es.sort();
        }
        let mut b = LambdaBiSystem::new(alphabet, doc.levels, minus, plus, doc.phi)?;
        if let Some(s) = doc.stabilization {
            if s.onset + 2 > b.top_level() {
                return Err(LgbsError::Parse("stabilization onset too close to truncation".into()));
            }
            b.set_stabilization(s);
        }
        Ok(b)
    }

    /// DOT rendering: levels ranked, `E⁻` solid, `E⁺` dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph bisystem {\n  rankdir=BT;\n");
        for (l, ids) in self.level_ids.iter().enumerate() {
            let _ = writeln!(out, "  {{ rank=same;");
            for id in ids {
                let _ = writeln!(out, "    \"{id}\" [label=\"{id}\"];");
            }
            let _ = writeln!(out, "  }} // level {l}");
        }
        for (low, es) in self.minus.iter().enumerate() {
            for e in es {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\", style=solid];",
                    self.vertex_id(low + 1, e.src as usize),
                    self.vertex_id(low, e.tgt as usize),
                    self.alphabet.name(e.label)
                );
            }
        }
        for (low, es) in self.plus.iter().enumerate() {
            for e in es {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\", style=dashed];",
                    self.vertex_id(low, e.src as usize),
                    self.vertex_id(low + 1, e.tgt as usize),
                    self.alphabet.name(e.label)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical;
    use crate::subshift;

    #[test]
    fn full_shift_canonical_validates() {
        let b = build_canonical(&subshift::full_shift(2), 4).unwrap();
        let report = b.validate_axioms();
        assert!(report.all_passed(), "{:?}", report.failures());
        // Single vertex per level, 2 E- and 2 E+ edges per level pair.
        for l in 0..=4 {
            assert_eq!(b.m(l).unwrap(), 1);
        }
        for low in 0..4 {
            assert_eq!(b.minus_edges(low).unwrap().len(), 2);
            assert_eq!(b.plus_edges(low).unwrap().len(), 2);
        }
    }

    #[test]
    fn golden_mean_canonical_validates() {
        let b = build_canonical(&subshift::golden_mean(), 5).unwrap();
        let report = b.validate_axioms();
        assert!(report.all_passed(), "{:?}", report.failures());
    }

    #[test]
    fn follower_and_predecessor_sets() {
        let b = build_canonical(&subshift::full_shift(2), 3).unwrap();
        assert_eq!(b.follower_set(2, 0).unwrap().len(), 4);
        assert_eq!(b.predecessor_set(3, 0).unwrap().len(), 8);
        assert_eq!(b.follower_set(0, 0).unwrap(), BTreeSet::from([vec![]]));
        assert_eq!(b.predecessor_set(0, 0).unwrap(), BTreeSet::from([vec![]]));
    }

    #[test]
    fn golden_mean_follower_matches_class_words() {
        let gm = subshift::golden_mean();
        let b = build_canonical(&gm, 4).unwrap();
        // Classes at level 2, in lexicographic order: {00}, {00,01}, {00,01,10}, {00,10}.
        let expect: Vec<usize> = vec![1, 2, 3, 2];
        for (i, want) in expect.iter().enumerate() {
            let f = b.follower_set(2, i).unwrap();
            let p = b.predecessor_set(2, i).unwrap();
            assert_eq!(f.len(), *want);
            assert_eq!(f, p);
        }
        // The class {00} has follower set {00} exactly.
        let f = b.follower_set(2, 0).unwrap();
        let w00 = gm.alphabet.parse_word("00").unwrap();
        assert_eq!(f, BTreeSet::from([w00]));
    }

    #[test]
    fn right_resolving_failure_witness() {
        // One E- edge label duplicated at a source.
        let a = Alphabet::new(["0", "1"]).unwrap();
        let s = a.lookup("0").unwrap();
        let b = LambdaBiSystem::new(
            a,
            vec![vec!["r".into()], vec!["x".into(), "y".into()]],
            vec![vec![
                Edge { src: 0, tgt: 0, label: s },
                Edge { src: 0, tgt: 0, label: s },
                Edge { src: 1, tgt: 0, label: s },
            ]],
            vec![vec![
                Edge { src: 0, tgt: 0, label: s },
                Edge { src: 0, tgt: 1, label: s },
            ]],
            None,
        )
        .unwrap();
        let report = b.validate_axioms();
        let rr = report.checks.iter().find(|c| c.axiom == Axiom::RightResolving).unwrap();
        assert!(!rr.passed);
        assert!(rr.witness.as_deref().unwrap().contains("duplicate label"));
    }

    #[test]
    fn incidence_full_shift() {
        let b = build_canonical(&subshift::full_shift(2), 3).unwrap();
        let inc = b.incidence();
        for low in 0..3 {
            assert_eq!(inc.minus_total[low], vec![vec![2]]);
            assert_eq!(inc.plus_total[low], vec![vec![2]]);
        }
    }

    #[test]
    fn incidence_golden_mean_level12_count() {
        let b = build_canonical(&subshift::golden_mean(), 3).unwrap();
        assert_eq!(b.minus_edges(1).unwrap().len(), 6);
    }

    #[test]
    fn incidence_slices_sum_to_totals() {
        for p in [subshift::golden_mean(), subshift::even_shift()] {
            let b = build_canonical(&p, 4).unwrap();
            let inc = b.incidence();
            for low in 0..b.top_level() {
                let rows = inc.minus_total[low].len();
                let cols = inc.minus_total[low][0].len();
                for r in 0..rows {
                    for c in 0..cols {
                        let s: u64 = inc.minus_slices[low].iter().map(|sl| sl[r][c]).sum();
                        assert_eq!(s, inc.minus_total[low][r][c]);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip_idempotent() {
        for p in [subshift::golden_mean(), subshift::even_shift(), subshift::full_shift(2)] {
            let b = build_canonical(&p, 4).unwrap();
            let j1 = b.to_json();
            let b2 = LambdaBiSystem::from_json(&j1).unwrap();
            let j2 = b2.to_json();
            assert_eq!(b, b2);
            assert_eq!(j1, j2);
            assert_eq!(j1["schema"], "bisystem/1");
        }
    }

    #[test]
    fn dot_has_rank_groups() {
        let b = build_canonical(&subshift::full_shift(2), 2).unwrap();
        let dot = b.to_dot();
        assert_eq!(dot.matches("rank=same").count(), 3);
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("style=solid"));
    }
}
