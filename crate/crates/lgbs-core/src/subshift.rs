//! Finite presentations of subshifts and exact central-word machinery.
//!
//! Three presentation kinds are supported: a 0-1 transition matrix (vertex
//! shift, symbols = states), a memory-m forbidden-word list, and a
//! right-resolving labeled graph (sofic).  All three compile to an essential
//! right-resolving labeled graph, on which context profiles and central word
//! sets are computed exactly:
//!
//! * the left profile of a left-infinite ray is the set of states the ray can
//!   end at; realizable left profiles form the eventual image of the subset
//!   automaton seeded at the full state set;
//! * the right profile of a right-infinite ray is the set of states from which
//!   the ray can be spelled; realizable right profiles are the symmetric
//!   construction on the reversed graph;
//! * the central set of a profile pair at length n is the set of length-n
//!   words labelling a path from the left profile into the right profile.

use crate::alphabet::{Alphabet, Sym, Word};
use crate::error::{LgbsError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Maximum number of presentation states for the bitmask profile machinery.
pub const MAX_STATES: usize = 64;

/// One of the three supported finite descriptions of a subshift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationKind {
    /// Vertex shift of a 0-1 matrix; symbols are the matrix states.
    SftMatrix { matrix: Vec<Vec<u8>> },
    /// Shift of finite type given by forbidden words of length at most
    /// `memory + 1`.
    ForbiddenWords { memory: usize, words: Vec<Word> },
    /// Right-resolving labeled graph (sofic presentation).
    SoficGraph { states: Vec<String>, edges: Vec<GraphEdge> },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub label: Sym,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubshiftPresentation {
    pub alphabet: Alphabet,
    pub kind: PresentationKind,
}

/// Working form: an essential right-resolving labeled graph.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub alphabet: Alphabet,
    pub state_names: Vec<String>,
    pub edges: Vec<GraphEdge>,
    /// out[q][a] = target of the unique a-labeled edge out of q, if any.
    out: Vec<Vec<Option<usize>>>,
}

/// Subset of presentation states, as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn full(n: usize) -> StateSet {
        debug_assert!(n <= MAX_STATES);
        if n == 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(q: usize) -> StateSet {
        StateSet(1u64 << q)
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0 & (1u64 << q) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (0..64).filter(move |q| bits & (1u64 << q) != 0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }
}

/// Left context profile paired with a right context profile.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProfilePair {
    pub left: StateSet,
    pub right: StateSet,
}

/// The set of admissible words of one length insertable between the contexts
/// of some point; its identity is the word set itself.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CentralSet {
    pub length: usize,
    pub words: BTreeSet<Word>,
}

/// Realizable context-profile families of a presentation.
#[derive(Clone, Debug)]
pub struct ProfileFamilies {
    pub left: Vec<StateSet>,
    pub right: Vec<StateSet>,
}

impl ProfileFamilies {
    pub fn pairs(&self) -> Vec<ProfilePair> {
        let mut out = Vec::new();
        for &l in &self.left {
            for &r in &self.right {
                out.push(ProfilePair { left: l, right: r });
            }
        }
        out
    }
}

impl LabeledGraph {
    pub fn new(alphabet: Alphabet, state_names: Vec<String>, mut edges: Vec<GraphEdge>) -> Result<Self> {
        let n = state_names.len();
        if n == 0 {
            return Err(LgbsError::EmptySubshift);
        }
        if n > MAX_STATES {
            return Err(LgbsError::InvalidPresentation(format!(
                "too many states ({n}), maximum is {MAX_STATES}"
            )));
        }
        edges.sort();
        edges.dedup();
        let mut out = vec![vec![None; alphabet.len()]; n];
        for e in &edges {
            if e.from >= n || e.to >= n {
                return Err(LgbsError::InvalidPresentation("edge endpoint out of range".into()));
            }
            let slot = &mut out[e.from][e.label.0 as usize];
            if slot.is_some() {
                return Err(LgbsError::InvalidPresentation(format!(
                    "not right-resolving: state {} has two out-edges labeled {}",
                    state_names[e.from],
                    alphabet.name(e.label)
                )));
            }
            *slot = Some(e.to);
        }
        Ok(LabeledGraph { alphabet, state_names, edges, out })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn step(&self, q: usize, a: Sym) -> Option<usize> {
        self.out[q][a.0 as usize]
    }

    /// Image of a state set under one symbol.
    pub fn step_set(&self, s: StateSet, a: Sym) -> StateSet {
        let mut r = StateSet::EMPTY;
        for q in s.iter() {
            if let Some(t) = self.step(q, a) {
                r.0 |= 1u64 << t;
            }
        }
        r
    }

    /// Preimage of a state set under one symbol (step in the reversed graph).
    pub fn pre_set(&self, s: StateSet, a: Sym) -> StateSet {
        let mut r = StateSet::EMPTY;
        for q in 0..self.state_count() {
            if let Some(t) = self.step(q, a) {
                if s.contains(t) {
                    r.0 |= 1u64 << q;
                }
            }
        }
        r
    }

    /// True when every state has at least one in-edge and one out-edge.
    pub fn is_essential(&self) -> bool {
        let n = self.state_count();
        let mut has_in = vec![false; n];
        let mut has_out = vec![false; n];
        for e in &self.edges {
            has_out[e.from] = true;
            has_in[e.to] = true;
        }
        (0..n).all(|q| has_in[q] && has_out[q])
    }

    /// Remove states that do not lie on a bi-infinite path.
    pub fn essentialize(&self) -> Result<LabeledGraph> {
        let mut alive: Vec<bool> = vec![true; self.state_count()];
        loop {
            let mut changed = false;
            let mut has_in = vec![false; self.state_count()];
            let mut has_out = vec![false; self.state_count()];
            for e in &self.edges {
                if alive[e.from] && alive[e.to] {
                    has_out[e.from] = true;
                    has_in[e.to] = true;
                }
            }
            for q in 0..self.state_count() {
                if alive[q] && !(has_in[q] && has_out[q]) {
                    alive[q] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..self.state_count()).filter(|&q| alive[q]).collect();
        if keep.is_empty() {
            return Err(LgbsError::EmptySubshift);
        }
        let renum: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let names = keep.iter().map(|&q| self.state_names[q].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| GraphEdge { from: renum[&e.from], to: renum[&e.to], label: e.label })
            .collect();
        LabeledGraph::new(self.alphabet.clone(), names, edges)
    }

    /// All length-n label words of paths; in an essential graph this is the
    /// factor language of the presented subshift.
    pub fn admissible_words(&self, n: usize) -> BTreeSet<Word> {
        let mut acc: BTreeSet<(usize, Word)> =
            (0..self.state_count()).map(|q| (q, Vec::new())).collect();
        for _ in 0..n {
            let mut next = BTreeSet::new();
            for (q, w) in &acc {
                for a in self.alphabet.syms() {
                    if let Some(t) = self.step(*q, a) {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.insert((t, w2));
                    }
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(_, w)| w).collect()
    }

    pub fn word_admissible(&self, w: &[Sym]) -> bool {
        let mut s = StateSet::full(self.state_count());
        for &a in w {
            s = self.step_set(s, a);
            if s.is_empty() {
                return false;
            }
        }
        true
    }

    /// Eventual image of the subset automaton seeded at the full state set:
    /// the non-empty subsets reachable by arbitrarily long words.  With
    /// `reversed`, words are fed to the reversed graph instead.
    fn eventual_image(&self, reversed: bool) -> Vec<StateSet> {
        let start = StateSet::full(self.state_count());
        let step = |s: StateSet, a: Sym| if reversed { self.pre_set(s, a) } else { self.step_set(s, a) };

        // Reachable non-empty subsets.
        let mut seen: BTreeSet<StateSet> = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(s) = queue.pop_front() {
            for a in self.alphabet.syms() {
                let t = step(s, a);
                if !t.is_empty() && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        let nodes: Vec<StateSet> = seen.into_iter().collect();
        let index: BTreeMap<StateSet, usize> = nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let succ: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&s| {
                self.alphabet
                    .syms()
                    .filter_map(|a| {
                        let t = step(s, a);
                        if t.is_empty() {
                            None
                        } else {
                            Some(index[&t])
                        }
                    })
                    .collect()
            })
            .collect();

        // A subset is in the eventual image iff it is reachable from a node
        // that lies on a directed cycle.
        let on_cycle: Vec<bool> = (0..nodes.len())
            .map(|i| {
                let mut seen = vec![false; nodes.len()];
                let mut q = VecDeque::from_iter(succ[i].iter().copied());
                while let Some(j) = q.pop_front() {
                    if j == i {
                        return true;
                    }
                    if !seen[j] {
                        seen[j] = true;
                        q.extend(succ[j].iter().copied());
                    }
                }
                false
            })
            .collect();
        let mut eventual = vec![false; nodes.len()];
        let mut q: VecDeque<usize> = (0..nodes.len()).filter(|&i| on_cycle[i]).collect();
        for &i in &q {
            eventual[i] = true;
        }
        while let Some(i) = q.pop_front() {
            for &j in &succ[i] {
                if !eventual[j] {
                    eventual[j] = true;
                    q.push_back(j);
                }
            }
        }
        nodes.into_iter().zip(eventual).filter(|(_, e)| *e).map(|(s, _)| s).collect()
    }

    pub fn left_profiles(&self) -> Vec<StateSet> {
        self.eventual_image(false)
    }

    pub fn right_profiles(&self) -> Vec<StateSet> {
        self.eventual_image(true)
    }

    /// Whether the bi-infinite repetition of `w` is a point of the subshift:
    /// the partial state map of `w` must have a periodic orbit, which by
    /// pigeonhole shows up within `state_count` iterations.
    pub fn periodic_point_exists(&self, w: &[Sym]) -> bool {
        if w.is_empty() {
            return false;
        }
        let step_word = |q: usize| -> Option<usize> {
            let mut t = q;
            for &a in w {
                t = self.step(t, a)?;
            }
            Some(t)
        };
        'outer: for q in 0..self.state_count() {
            let mut t = q;
            for _ in 0..=self.state_count() {
                match step_word(t) {
                    Some(t2) => t = t2,
                    None => continue 'outer,
                }
            }
            return true;
        }
        false
    }

    /// Profile of the left-infinite ray `(..., w, w, w]` of period `w`.
    pub fn left_profile_of_periodic(&self, w: &[Sym]) -> Option<StateSet> {
        let mut s = StateSet::full(self.state_count());
        let mut seen = BTreeSet::new();
        loop {
            if !seen.insert(s) {
                break;
            }
            for &a in w {
                s = self.step_set(s, a);
            }
            if s.is_empty() {
                return None;
            }
        }
        Some(s)
    }

    /// Profile of the right-infinite ray `[w, w, w, ...)` of period `w`.
    pub fn right_profile_of_periodic(&self, w: &[Sym]) -> Option<StateSet> {
        let mut s = StateSet::full(self.state_count());
        let mut seen = BTreeSet::new();
        loop {
            if !seen.insert(s) {
                break;
            }
            for &a in w.iter().rev() {
                s = self.pre_set(s, a);
            }
            if s.is_empty() {
                return None;
            }
        }
        Some(s)
    }

    /// Number of length-n words with a path from `left` into `right`.
    /// Counts words, not paths.
    pub fn central_count(&self, pair: ProfilePair, n: usize) -> u64 {
        // Subset DP: the set of words is the language of the deterministic
        // subset automaton started at `left`, accepting when intersecting
        // `right`; distinct words reach distinct subset orbits, so counting
        // words equals counting accepted label sequences of the DFA.
        let mut layer: BTreeMap<StateSet, u64> = BTreeMap::from([(self.restrict(pair.left), 1)]);
        for _ in 0..n {
            let mut next: BTreeMap<StateSet, u64> = BTreeMap::new();
            for (&s, &c) in &layer {
                for a in self.alphabet.syms() {
                    let t = self.step_set(s, a);
                    if !t.is_empty() {
                        *next.entry(t).or_insert(0) += c;
                    }
                }
            }
            layer = next;
        }
        layer
            .into_iter()
            .filter(|(s, _)| !s.intersect(&pair.right).is_empty())
            .map(|(_, c)| c)
            .sum()
    }

    fn restrict(&self, s: StateSet) -> StateSet {
        s.intersect(&StateSet::full(self.state_count()))
    }

    /// Materialize the central set of a profile pair.
    pub fn central_set(&self, pair: ProfilePair, n: usize) -> CentralSet {
        let mut layer: BTreeMap<Word, StateSet> = BTreeMap::from([(Vec::new(), self.restrict(pair.left))]);
        for _ in 0..n {
            let mut next = BTreeMap::new();
            for (w, s) in &layer {
                for a in self.alphabet.syms() {
                    let t = self.step_set(*s, a);
                    if !t.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.insert(w2, t);
                    }
                }
            }
            layer = next;
        }
        let words = layer
            .into_iter()
            .filter(|(_, s)| !s.intersect(&pair.right).is_empty())
            .map(|(w, _)| w)
            .collect();
        CentralSet { length: n, words }
    }
}

impl SubshiftPresentation {
    pub fn sft_matrix(alphabet: Alphabet, matrix: Vec<Vec<u8>>) -> Result<Self> {
        let n = matrix.len();
        if n != alphabet.len() {
            return Err(LgbsError::InvalidPresentation(
                "matrix size must equal alphabet size (symbols are the states)".into(),
            ));
        }
        for row in &matrix {
            if row.len() != n {
                return Err(LgbsError::InvalidPresentation("matrix is not square".into()));
            }
            if row.iter().any(|&x| x > 1) {
                return Err(LgbsError::InvalidPresentation("matrix entries must be 0 or 1".into()));
            }
        }
        Ok(SubshiftPresentation { alphabet, kind: PresentationKind::SftMatrix { matrix } })
    }

    pub fn forbidden_words(alphabet: Alphabet, memory: usize, words: Vec<Word>) -> Result<Self> {
        for w in &words {
            if w.len() > memory + 1 {
                return Err(LgbsError::InvalidPresentation(format!(
                    "forbidden word of length {} exceeds memory bound {} + 1",
                    w.len(),
                    memory
                )));
            }
            if w.iter().any(|s| (s.0 as usize) >= alphabet.len()) {
                return Err(LgbsError::InvalidPresentation("forbidden word uses unknown symbol".into()));
            }
        }
        Ok(SubshiftPresentation { alphabet, kind: PresentationKind::ForbiddenWords { memory, words } })
    }

    pub fn sofic_graph(alphabet: Alphabet, states: Vec<String>, edges: Vec<GraphEdge>) -> Result<Self> {
        // Construction through LabeledGraph enforces right-resolving.
        LabeledGraph::new(alphabet.clone(), states.clone(), edges.clone())?;
        Ok(SubshiftPresentation { alphabet, kind: PresentationKind::SoficGraph { states, edges } })
    }

    /// Full shift over the given symbols.
    pub fn full_shift(alphabet: Alphabet) -> Self {
        let edges = alphabet
            .syms()
            .map(|a| GraphEdge { from: 0, to: 0, label: a })
            .collect();
        SubshiftPresentation {
            alphabet,
            kind: PresentationKind::SoficGraph { states: vec!["q0".into()], edges },
        }
    }

    /// Compile to the right-resolving labeled graph the profile machinery
    /// runs on.  Matrix presentations become vertex shifts (edge i -> j
    /// labeled j); forbidden-word presentations become memory-m block shifts.
    pub fn to_graph(&self) -> Result<LabeledGraph> {
        match &self.kind {
            PresentationKind::SoficGraph { states, edges } => {
                LabeledGraph::new(self.alphabet.clone(), states.clone(), edges.clone())
            }
            PresentationKind::SftMatrix { matrix } => {
                let mut edges = Vec::new();
                for (i, row) in matrix.iter().enumerate() {
                    for (j, &x) in row.iter().enumerate() {
                        if x == 1 {
                            edges.push(GraphEdge { from: i, to: j, label: Sym(j as u16) });
                        }
                    }
                }
                LabeledGraph::new(
                    self.alphabet.clone(),
                    self.alphabet.names().to_vec(),
                    edges,
                )
            }
            PresentationKind::ForbiddenWords { memory, words } => {
                let m = *memory;
                if m == 0 {
                    let allowed: Vec<Sym> = self
                        .alphabet
                        .syms()
                        .filter(|a| !words.iter().any(|w| w.as_slice() == [*a]))
                        .collect();
                    if allowed.is_empty() {
                        return Err(LgbsError::EmptySubshift);
                    }
                    let edges = allowed
                        .iter()
                        .map(|&a| GraphEdge { from: 0, to: 0, label: a })
                        .collect();
                    return LabeledGraph::new(self.alphabet.clone(), vec!["q0".into()], edges);
                }
                let contains_forbidden = |w: &[Sym]| -> bool {
                    words.iter().any(|f| !f.is_empty() && w.windows(f.len()).any(|win| win == f.as_slice()))
                };
                // States are the allowed m-blocks.
                let mut blocks: Vec<Word> = vec![Vec::new()];
                for _ in 0..m {
                    let mut next = Vec::new();
                    for b in &blocks {
                        for a in self.alphabet.syms() {
                            let mut b2 = b.clone();
                            b2.push(a);
                            if !contains_forbidden(&b2) {
                                next.push(b2);
                            }
                        }
                    }
                    blocks = next;
                }
                if blocks.is_empty() {
                    return Err(LgbsError::EmptySubshift);
                }
                let index: BTreeMap<Word, usize> =
                    blocks.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
                let mut edges = Vec::new();
                for (i, b) in blocks.iter().enumerate() {
                    for a in self.alphabet.syms() {
                        let mut ext = b.clone();
                        ext.push(a);
                        if contains_forbidden(&ext) {
                            continue;
                        }
                        let tail: Word = ext[1..].to_vec();
                        if let Some(&j) = index.get(&tail) {
                            edges.push(GraphEdge { from: i, to: j, label: a });
                        }
                    }
                }
                let names = blocks.iter().map(|b| self.alphabet.format_word(b)).collect();
                LabeledGraph::new(self.alphabet.clone(), names, edges)
            }
        }
    }

    /// Same subshift, with stranded states removed so every finite path
    /// extends bi-infinitely.
    pub fn essentialize(&self) -> Result<SubshiftPresentation> {
        match &self.kind {
            PresentationKind::SftMatrix { .. } => {
                let g = self.to_graph()?.essentialize()?;
                // The essentialized vertex shift is again a vertex shift on
                // the surviving states.
                let names: Vec<String> = g.state_names.clone();
                let keep: Vec<Sym> = names
                    .iter()
                    .map(|n| self.alphabet.lookup(n).expect("state name is a symbol"))
                    .collect();
                let alphabet = Alphabet::new(names.clone())?;
                let n = names.len();
                let mut matrix = vec![vec![0u8; n]; n];
                for e in &g.edges {
                    matrix[e.from][e.to] = 1;
                }
                let _ = keep;
                SubshiftPresentation::sft_matrix(alphabet, matrix)
            }
            PresentationKind::SoficGraph { .. } => {
                let g = self.to_graph()?.essentialize()?;
                SubshiftPresentation::sofic_graph(self.alphabet.clone(), g.state_names.clone(), g.edges.clone())
            }
            PresentationKind::ForbiddenWords { .. } => {
                // Compiled block shifts carry the essential structure; the
                // presentation itself is returned as the compiled graph.
                let g = self.to_graph()?.essentialize()?;
                SubshiftPresentation::sofic_graph(self.alphabet.clone(), g.state_names.clone(), g.edges.clone())
            }
        }
    }

    pub fn essential_graph(&self) -> Result<LabeledGraph> {
        self.to_graph()?.essentialize()
    }

    /// The set of admissible words of the given length, deterministically
    /// ordered.
    pub fn admissible_words(&self, n: usize) -> Result<BTreeSet<Word>> {
        Ok(self.essential_graph()?.admissible_words(n))
    }

    /// Realizable left and right context-profile families.
    pub fn realizable_profiles(&self) -> Result<ProfileFamilies> {
        let g = self.essential_graph()?;
        Ok(ProfileFamilies { left: g.left_profiles(), right: g.right_profiles() })
    }

    /// Central word set of one profile pair.
    pub fn central_set(&self, pair: ProfilePair, n: usize) -> Result<CentralSet> {
        Ok(self.essential_graph()?.central_set(pair, n))
    }

    /// The distinct non-empty central sets at length n, lexicographically
    /// ordered, each with one representative profile pair.
    pub fn central_classes(&self, n: usize) -> Result<Vec<(CentralSet, ProfilePair)>> {
        let g = self.essential_graph()?;
        let fams = ProfileFamilies { left: g.left_profiles(), right: g.right_profiles() };
        let mut by_set: BTreeMap<BTreeSet<Word>, ProfilePair> = BTreeMap::new();
        for pair in fams.pairs() {
            let cs = g.central_set(pair, n);
            if !cs.words.is_empty() {
                by_set.entry(cs.words).or_insert(pair);
            }
        }
        Ok(by_set
            .into_iter()
            .map(|(words, pair)| (CentralSet { length: n, words }, pair))
            .collect())
    }

    /// k-th higher block presentation: symbols are admissible k-words, states
    /// are paths of length k-1 in the essential graph.  The presented shift
    /// is topologically conjugate to the original.
    pub fn higher_block(&self, k: usize) -> Result<SubshiftPresentation> {
        if k == 0 {
            return Err(LgbsError::InvalidPresentation("block length must be >= 1".into()));
        }
        let g = self.essential_graph()?;
        if k == 1 {
            return SubshiftPresentation::sofic_graph(
                g.alphabet.clone(),
                g.state_names.clone(),
                g.edges.clone(),
            );
        }
        let blocks: Vec<Word> = g.admissible_words(k).into_iter().collect();
        let names: Vec<String> = blocks.iter().map(|w| g.alphabet.format_word(w)).collect();
        let block_alphabet = Alphabet::new(names)?;
        let block_index: BTreeMap<&Word, usize> =
            blocks.iter().enumerate().map(|(i, w)| (w, i)).collect();

        // States: (start state, path of k-1 edges) collapsed to
        // (source state, spelled word) since the graph is right-resolving.
        let mut paths: Vec<(usize, Word)> = Vec::new();
        for q in 0..g.state_count() {
            let mut acc = vec![(q, Vec::new())];
            for _ in 0..k - 1 {
                let mut next = Vec::new();
                for (t, w) in &acc {
                    for a in g.alphabet.syms() {
                        if let Some(t2) = g.step(*t, a) {
                            let mut w2 = w.clone();
                            w2.push(a);
                            next.push((t2, w2));
                        }
                    }
                }
                acc = next;
            }
            for (_, w) in acc {
                paths.push((q, w));
            }
        }
        paths.sort();
        paths.dedup();
        let path_index: BTreeMap<(usize, Word), usize> =
            paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut edges = Vec::new();
        for (i, (q, w)) in paths.iter().enumerate() {
            // Extend the path by one edge; the new block is w extended by a.
            let mut t = *q;
            for &a in w {
                t = g.step(t, a).expect("path is valid");
            }
            for a in g.alphabet.syms() {
                if g.step(t, a).is_none() {
                    continue;
                }
                let mut block = w.clone();
                block.push(a);
                let label = Sym(block_index[&block] as u16);
                let next_state = {
                    let q2 = g.step(*q, w[0]).expect("path is valid");
                    let mut w2: Word = w[1..].to_vec();
                    w2.push(a);
                    path_index[&(q2, w2)]
                };
                edges.push(GraphEdge { from: i, to: next_state, label });
            }
        }
        let state_names = paths
            .iter()
            .map(|(q, w)| format!("{}|{}", g.state_names[*q], g.alphabet.format_word(w)))
            .collect();
        SubshiftPresentation::sofic_graph(block_alphabet, state_names, edges)
    }
}

// ---------------------------------------------------------------------------
// JSON ("subshift/1")
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SubshiftDoc {
    schema: String,
    alphabet: Vec<String>,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<u8>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    memory: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    forbidden: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeDoc>>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    from: String,
    to: String,
    label: String,
}

impl SubshiftPresentation {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = match &self.kind {
            PresentationKind::SftMatrix { matrix } => SubshiftDoc {
                schema: "subshift/1".into(),
                alphabet: self.alphabet.names().to_vec(),
                kind: "sft-matrix".into(),
                matrix: Some(matrix.clone()),
                memory: None,
                forbidden: None,
                states: None,
                edges: None,
            },
            PresentationKind::ForbiddenWords { memory, words } => SubshiftDoc {
                schema: "subshift/1".into(),
                alphabet: self.alphabet.names().to_vec(),
                kind: "forbidden-words".into(),
                matrix: None,
                memory: Some(*memory),
                forbidden: Some(words.iter().map(|w| self.alphabet.format_word(w)).collect()),
                states: None,
                edges: None,
            },
            PresentationKind::SoficGraph { states, edges } => SubshiftDoc {
                schema: "subshift/1".into(),
                alphabet: self.alphabet.names().to_vec(),
                kind: "sofic-graph".into(),
                matrix: None,
                memory: None,
                forbidden: None,
                states: Some(states.clone()),
                edges: Some(
                    edges
                        .iter()
                        .map(|e| EdgeDoc {
                            from: states[e.from].clone(),
                            to: states[e.to].clone(),
                            label: self.alphabet.name(e.label).to_string(),
                        })
                        .collect(),
                ),
            },
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SubshiftPresentation> {
        let doc: SubshiftDoc =
            serde_json::from_value(v.clone()).map_err(|e| LgbsError::Parse(e.to_string()))?;
        if doc.schema != "subshift/1" {
            return Err(LgbsError::Parse(format!(
                "unsupported schema {:?}, expected \"subshift/1\"",
                doc.schema
            )));
        }
        let alphabet = Alphabet::new(doc.alphabet)?;
        match doc.kind.as_str() {
            "sft-matrix" => {
                let matrix = doc
                    .matrix
                    .ok_or_else(|| LgbsError::Parse("sft-matrix requires \"matrix\"".into()))?;
                SubshiftPresentation::sft_matrix(alphabet, matrix)
            }
            "forbidden-words" => {
                let memory =
                    doc.memory.ok_or_else(|| LgbsError::Parse("forbidden-words requires \"memory\"".into()))?;
                let words = doc
                    .forbidden
                    .ok_or_else(|| LgbsError::Parse("forbidden-words requires \"forbidden\"".into()))?
                    .iter()
                    .map(|w| alphabet.parse_word(w))
                    .collect::<Result<Vec<_>>>()?;
                SubshiftPresentation::forbidden_words(alphabet, memory, words)
            }
            "sofic-graph" => {
                let states =
                    doc.states.ok_or_else(|| LgbsError::Parse("sofic-graph requires \"states\"".into()))?;
                let lookup = |name: &str| {
                    states
                        .iter()
                        .position(|s| s == name)
                        .ok_or_else(|| LgbsError::Parse(format!("unknown state {name:?}")))
                };
                let edges = doc
                    .edges
                    .ok_or_else(|| LgbsError::Parse("sofic-graph requires \"edges\"".into()))?
                    .iter()
                    .map(|e| {
                        Ok(GraphEdge {
                            from: lookup(&e.from)?,
                            to: lookup(&e.to)?,
                            label: alphabet
                                .lookup(&e.label)
                                .ok_or_else(|| LgbsError::Parse(format!("unknown label {:?}", e.label)))?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                SubshiftPresentation::sofic_graph(alphabet, states, edges)
            }
            other => Err(LgbsError::Parse(format!("unknown presentation kind {other:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Stock examples used across the test suites.
// ---------------------------------------------------------------------------

/// Full shift on n single-character symbols 0..n-1.
pub fn full_shift(n: usize) -> SubshiftPresentation {
    let alphabet = Alphabet::new((0..n).map(|i| i.to_string())).unwrap();
    SubshiftPresentation::full_shift(alphabet)
}

/// Golden mean shift: binary, word 11 forbidden.
pub fn golden_mean() -> SubshiftPresentation {
    let alphabet = Alphabet::new(["0", "1"]).unwrap();
    SubshiftPresentation::sft_matrix(alphabet, vec![vec![1, 1], vec![1, 0]]).unwrap()
}

/// Even shift: binary, maximal 0-runs between 1s have even length.
pub fn even_shift() -> SubshiftPresentation {
    let alphabet = Alphabet::new(["0", "1"]).unwrap();
    let one = alphabet.lookup("1").unwrap();
    let zero = alphabet.lookup("0").unwrap();
    SubshiftPresentation::sofic_graph(
        alphabet,
        vec!["e".into(), "o".into()],
        vec![
            GraphEdge { from: 0, to: 0, label: one },
            GraphEdge { from: 0, to: 1, label: zero },
            GraphEdge { from: 1, to: 0, label: zero },
        ],
    )
    .unwrap()
}

/// Disjoint union of two one-symbol full shifts, presented as one graph.
pub fn two_component() -> SubshiftPresentation {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let a = alphabet.lookup("a").unwrap();
    let b = alphabet.lookup("b").unwrap();
    SubshiftPresentation::sofic_graph(
        alphabet,
        vec!["A".into(), "B".into()],
        vec![
            GraphEdge { from: 0, to: 0, label: a },
            GraphEdge { from: 1, to: 1, label: b },
        ],
    )
    .unwrap()
}

/// One-point subshift: full shift on a single symbol.
pub fn one_point() -> SubshiftPresentation {
    full_shift(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: &Alphabet, s: &str) -> Word {
        a.parse_word(s).unwrap()
    }

    #[test]
    fn essentialize_examples() {
        // Golden mean matrix is already essential.
        let gm = golden_mean();
        let e = gm.essentialize().unwrap();
        assert_eq!(e, gm);

        // A sink state is deleted, leaving the one-state full shift remnant.
        let a = Alphabet::new(["0", "1"]).unwrap();
        let p = SubshiftPresentation::sft_matrix(a, vec![vec![1, 1], vec![0, 0]]).unwrap();
        let e = p.essentialize().unwrap();
        match &e.kind {
            PresentationKind::SftMatrix { matrix } => assert_eq!(matrix, &vec![vec![1]]),
            _ => panic!("expected matrix kind"),
        }
        assert_eq!(e.alphabet.names(), &["0".to_string()]);

        // The one-state full-shift graph is unchanged.
        let fs = full_shift(2);
        assert_eq!(fs.essentialize().unwrap(), fs);
    }

    #[test]
    fn essentialize_empty() {
        let a = Alphabet::new(["0"]).unwrap();
        let p = SubshiftPresentation::sft_matrix(a, vec![vec![0]]).unwrap();
        assert!(matches!(p.essentialize(), Err(LgbsError::EmptySubshift)));
    }

    #[test]
    fn admissible_words_examples() {
        let fs = full_shift(2);
        let a = fs.alphabet.clone();
        let words = fs.admissible_words(2).unwrap();
        let expect: BTreeSet<Word> =
            ["00", "01", "10", "11"].iter().map(|s| w(&a, s)).collect();
        assert_eq!(words, expect);

        let gm = golden_mean();
        let words = gm.admissible_words(2).unwrap();
        let expect: BTreeSet<Word> = ["00", "01", "10"].iter().map(|s| w(&gm.alphabet, s)).collect();
        assert_eq!(words, expect);

        assert_eq!(gm.admissible_words(0).unwrap(), BTreeSet::from([Vec::new()]));
    }

    #[test]
    fn forbidden_words_compile_matches_matrix() {
        let a = Alphabet::new(["0", "1"]).unwrap();
        let one = a.lookup("1").unwrap();
        let p = SubshiftPresentation::forbidden_words(a, 1, vec![vec![one, one]]).unwrap();
        for n in 0..6 {
            assert_eq!(
                p.admissible_words(n).unwrap(),
                golden_mean().admissible_words(n).unwrap(),
                "length {n}"
            );
        }
    }

    #[test]
    fn full_shift_profiles_trivial() {
        let fs = full_shift(2);
        let fams = fs.realizable_profiles().unwrap();
        assert_eq!(fams.left, vec![StateSet::singleton(0)]);
        assert_eq!(fams.right, vec![StateSet::singleton(0)]);
    }

    #[test]
    fn golden_mean_central_sets() {
        let gm = golden_mean();
        let g = gm.essential_graph().unwrap();
        let a = &gm.alphabet;
        let ray0 = w(a, "0");
        let ray1 = w(a, "10"); // rays through symbol 1 must alternate with 0

        // Contexts (...0 | 0...): everything of length 2 except 11.
        let pair = ProfilePair {
            left: g.left_profile_of_periodic(&ray0).unwrap(),
            right: g.right_profile_of_periodic(&ray0).unwrap(),
        };
        let cs = g.central_set(pair, 2);
        let expect: BTreeSet<Word> = ["00", "01", "10"].iter().map(|s| w(a, s)).collect();
        assert_eq!(cs.words, expect);

        // Contexts (...01 | 10...): only 00 fits between two 1s.
        let pair = ProfilePair {
            left: g.left_profile_of_periodic(&w(a, "01")).unwrap(),
            right: g.right_profile_of_periodic(&ray1).unwrap(),
        };
        let cs = g.central_set(pair, 2);
        let expect: BTreeSet<Word> = [w(a, "00")].into_iter().collect();
        assert_eq!(cs.words, expect);
    }

    #[test]
    fn golden_mean_central_classes() {
        let gm = golden_mean();
        let a = &gm.alphabet;
        let classes = gm.central_classes(1).unwrap();
        let sets: Vec<BTreeSet<Word>> = classes.iter().map(|(c, _)| c.words.clone()).collect();
        assert_eq!(sets, vec![
            ["0"].iter().map(|s| w(a, s)).collect::<BTreeSet<_>>(),
            ["0", "1"].iter().map(|s| w(a, s)).collect(),
        ]);

        let classes = gm.central_classes(2).unwrap();
        let sets: Vec<BTreeSet<Word>> = classes.iter().map(|(c, _)| c.words.clone()).collect();
        assert_eq!(sets, vec![
            ["00"].iter().map(|s| w(a, s)).collect::<BTreeSet<_>>(),
            ["00", "01"].iter().map(|s| w(a, s)).collect(),
            ["00", "01", "10"].iter().map(|s| w(a, s)).collect(),
            ["00", "10"].iter().map(|s| w(a, s)).collect(),
        ]);
    }

    #[test]
    fn full_shift_single_class() {
        let fs = full_shift(3);
        for n in 0..4 {
            let classes = fs.central_classes(n).unwrap();
            assert_eq!(classes.len(), 1, "length {n}");
            assert_eq!(classes[0].0.words.len(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn central_set_monotone_under_profile_containment() {
        let es = even_shift();
        let g = es.essential_graph().unwrap();
        let fams = es.realizable_profiles().unwrap();
        for &l1 in &fams.left {
            for &l2 in &fams.left {
                if !l1.is_subset(&l2) {
                    continue;
                }
                for &r1 in &fams.right {
                    for &r2 in &fams.right {
                        if !r1.is_subset(&r2) {
                            continue;
                        }
                        for n in 0..5 {
                            let small = g.central_set(ProfilePair { left: l1, right: r1 }, n);
                            let big = g.central_set(ProfilePair { left: l2, right: r2 }, n);
                            assert!(small.words.is_subset(&big.words));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classes_cover_language() {
        for p in [golden_mean(), even_shift(), full_shift(2), two_component()] {
            for n in 0..5 {
                let union: BTreeSet<Word> = p
                    .central_classes(n)
                    .unwrap()
                    .into_iter()
                    .flat_map(|(c, _)| c.words)
                    .collect();
                assert_eq!(union, p.admissible_words(n).unwrap());
            }
        }
    }

    #[test]
    fn central_count_matches_enumeration() {
        let es = even_shift();
        let g = es.essential_graph().unwrap();
        for pair in es.realizable_profiles().unwrap().pairs() {
            for n in 0..7 {
                assert_eq!(
                    g.central_count(pair, n),
                    g.central_set(pair, n).words.len() as u64
                );
            }
        }
    }

    #[test]
    fn higher_block_language_sizes() {
        let gm = golden_mean();
        let b2 = gm.higher_block(2).unwrap();
        // Block words of length n correspond to base words of length n+1.
        for n in 1..5 {
            assert_eq!(
                b2.admissible_words(n).unwrap().len(),
                gm.admissible_words(n + 1).unwrap().len()
            );
        }
    }

    #[test]
    fn json_round_trip() {
        for p in [golden_mean(), even_shift(), full_shift(2)] {
            let v = p.to_json();
            let q = SubshiftPresentation::from_json(&v).unwrap();
            assert_eq!(p, q);
        }
    }
}
