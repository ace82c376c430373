//! Exact emptiness for one-dimensional shifts via transfer graphs.
//!
//! A bi-infinite admissible sequence is the same thing as a bi-infinite walk
//! in the graph of admissible `m`-blocks, and such a walk exists iff the
//! graph has a cycle.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::eds::GenCylinder;
use crate::error::{Error, Result};
use crate::patterns::{is_admissible, Alphabet, Pattern, SftSpec};

/// Default cap on the number of Cantor bits materialized by
/// [`decide_empty_eds_1d`].
pub const DEFAULT_BIT_CAP: usize = 20;

/// A translation-invariant local constraint on one-dimensional words.
pub trait WordConstraint {
    fn alphabet_size(&self) -> u32;

    /// Length of the longest constraint window (0 if unconstrained).
    fn span(&self) -> usize;

    /// True iff no forbidden configuration occurs inside `word`.
    fn word_admissible(&self, word: &[u32]) -> bool;
}

impl WordConstraint for SftSpec {
    fn alphabet_size(&self) -> u32 {
        self.alphabet().len() as u32
    }

    fn span(&self) -> usize {
        if self.forbidden().is_empty() {
            0
        } else {
            self.max_diameter() as usize + 1
        }
    }

    fn word_admissible(&self, word: &[u32]) -> bool {
        word.is_empty() || is_admissible(&Pattern::word(word), self).unwrap_or(false)
    }
}

/// Graph whose vertices are admissible words of length `block_len` and whose
/// edges join overlapping blocks whose merged word is admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferGraph {
    pub block_len: usize,
    pub vertices: Vec<Vec<u32>>,
    pub edges: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
}

impl TransferGraph {
    pub fn from_constraint<C: WordConstraint + ?Sized>(c: &C, block_len: usize) -> Self {
        let k = c.alphabet_size();
        let mut vertices = Vec::new();
        let mut word = Vec::with_capacity(block_len + 1);
        extend_words(c, k, block_len, &mut word, &mut vertices);
        let index: HashMap<&[u32], usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_slice(), i))
            .collect();
        let mut edges = Vec::new();
        let mut succ = vec![Vec::new(); vertices.len()];
        for (i, v) in vertices.iter().enumerate() {
            for s in 0..k {
                let mut merged = v.clone();
                merged.push(s);
                let Some(&j) = index.get(&merged[1..]) else {
                    continue;
                };
                if c.word_admissible(&merged) {
                    edges.push((i, j));
                    succ[i].push(j);
                }
            }
        }
        TransferGraph {
            block_len,
            vertices,
            edges,
            succ,
        }
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Strongly connected components (Tarjan, iterative).
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut next = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w) = self.succ[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("nonempty stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    /// Vertices lying on some cycle.
    pub fn cyclic_vertices(&self) -> BTreeSet<usize> {
        self.sccs()
            .into_iter()
            .filter(|c| c.len() > 1 || self.succ[c[0]].contains(&c[0]))
            .flatten()
            .collect()
    }

    /// Repeatedly deletes vertices without a predecessor or successor among
    /// the survivors. Returns the survivors and the number of rounds taken.
    pub fn prune(&self) -> (BTreeSet<usize>, usize) {
        let n = self.vertices.len();
        let mut alive = vec![true; n];
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            outdeg[a] += 1;
            indeg[b] += 1;
            pred[b].push(a);
        }
        let mut frontier: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0 || outdeg[v] == 0).collect();
        let mut rounds = 0;
        while !frontier.is_empty() {
            rounds += 1;
            let mut next = Vec::new();
            for v in frontier {
                if !alive[v] {
                    continue;
                }
                alive[v] = false;
                for &w in &self.succ[v] {
                    if alive[w] {
                        indeg[w] -= 1;
                        if indeg[w] == 0 {
                            next.push(w);
                        }
                    }
                }
                for &w in &pred[v] {
                    if alive[w] {
                        outdeg[w] -= 1;
                        if outdeg[w] == 0 {
                            next.push(w);
                        }
                    }
                }
            }
            frontier = next;
        }
        ((0..n).filter(|&v| alive[v]).collect(), rounds)
    }
}

fn extend_words<C: WordConstraint + ?Sized>(
    c: &C,
    k: u32,
    len: usize,
    word: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if word.len() == len {
        out.push(word.clone());
        return;
    }
    for s in 0..k {
        word.push(s);
        if c.word_admissible(word) {
            extend_words(c, k, len, word, out);
        }
        word.pop();
    }
}

fn check_dim1(spec: &SftSpec) -> Result<()> {
    if spec.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: spec.dim(),
        });
    }
    Ok(())
}

pub fn default_block_len<C: WordConstraint + ?Sized>(c: &C) -> usize {
    c.span().max(1)
}

pub fn build_transfer_graph(spec: &SftSpec) -> Result<TransferGraph> {
    check_dim1(spec)?;
    Ok(TransferGraph::from_constraint(spec, default_block_len(spec)))
}

/// Overrides the block length; it must be at least the longest forbidden
/// window.
pub fn build_transfer_graph_with(spec: &SftSpec, block_len: usize) -> Result<TransferGraph> {
    check_dim1(spec)?;
    if block_len < default_block_len(spec) {
        return Err(Error::InvalidInput(format!(
            "block length {block_len} is shorter than the forbidden span {}",
            spec.span()
        )));
    }
    Ok(TransferGraph::from_constraint(spec, block_len))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptinessReport {
    pub empty: bool,
    pub vertices: usize,
    pub edges: usize,
    /// Vertices surviving pruning: those on bi-infinite walks.
    pub essential: usize,
    /// Number of pruning rounds until the graph stabilized.
    pub prune_rounds: usize,
}

pub fn emptiness_report<C: WordConstraint + ?Sized>(c: &C) -> EmptinessReport {
    let g = TransferGraph::from_constraint(c, default_block_len(c));
    let cyclic = g.cyclic_vertices();
    let (essential, rounds) = g.prune();
    debug_assert_eq!(cyclic.is_empty(), essential.is_empty());
    EmptinessReport {
        empty: cyclic.is_empty(),
        vertices: g.num_vertices(),
        edges: g.edges.len(),
        essential: essential.len(),
        prune_rounds: rounds,
    }
}

/// True iff the one-dimensional SFT has no configurations.
pub fn decide_empty_1d(spec: &SftSpec) -> Result<bool> {
    check_dim1(spec)?;
    Ok(emptiness_report(spec).empty)
}

/// A word `w` whose bi-infinite repetition is admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicWord {
    pub period: usize,
    pub word: Vec<u32>,
}

/// Shortest periodic point (lexicographically least word among the shortest).
pub fn periodic_point_1d(spec: &SftSpec) -> Result<Option<PeriodicWord>> {
    check_dim1(spec)?;
    Ok(shortest_cycle_word(spec))
}

pub fn shortest_cycle_word<C: WordConstraint + ?Sized>(c: &C) -> Option<PeriodicWord> {
    let g = TransferGraph::from_constraint(c, default_block_len(c));
    let n = g.num_vertices();
    let mut pred = vec![Vec::new(); n];
    for &(a, b) in &g.edges {
        pred[b].push(a);
    }
    // dist_back[v][u]: shortest path length u -> v, computed on demand
    let dist_to = |target: usize| -> Vec<usize> {
        let mut d = vec![usize::MAX; n];
        let mut q = VecDeque::new();
        d[target] = 0;
        q.push_back(target);
        while let Some(v) = q.pop_front() {
            for &u in &pred[v] {
                if d[u] == usize::MAX {
                    d[u] = d[v] + 1;
                    q.push_back(u);
                }
            }
        }
        d
    };
    let dists: Vec<Vec<usize>> = (0..n).map(dist_to).collect();
    let period = (0..n)
        .filter_map(|v| {
            g.successors(v)
                .iter()
                .filter(|&&w| dists[v][w] != usize::MAX)
                .map(|&w| dists[v][w] + 1)
                .min()
        })
        .min()?;
    let mut best: Option<Vec<u32>> = None;
    for start in 0..n {
        let mut path = vec![start];
        closed_walks(&g, &dists[start], start, period, &mut path, &mut |walk| {
            let w: Vec<u32> = walk.iter().map(|&v| g.vertices[v][0]).collect();
            if best.as_ref().map_or(true, |b| w < *b) {
                best = Some(w);
            }
        });
    }
    best.map(|word| PeriodicWord { period, word })
}

fn closed_walks(
    g: &TransferGraph,
    dist_to_start: &[usize],
    start: usize,
    len: usize,
    path: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let v = *path.last().expect("nonempty path");
    let remaining = len - (path.len() - 1);
    for &w in g.successors(v) {
        if remaining == 1 {
            if w == start {
                visit(path);
            }
            continue;
        }
        if dist_to_start[w] != usize::MAX && dist_to_start[w] <= remaining - 1 {
            path.push(w);
            closed_walks(g, dist_to_start, start, len, path, visit);
            path.pop();
        }
    }
}

/// Checks that the periodic extension of `word` is admissible.
pub fn verify_periodic_word(spec: &SftSpec, word: &[u32]) -> Result<bool> {
    check_dim1(spec)?;
    if word.is_empty() {
        return Ok(false);
    }
    let reps = spec.span().div_ceil(word.len()) + 1;
    let long: Vec<u32> = word.iter().copied().cycle().take(word.len() * reps).collect();
    is_admissible(&Pattern::word(&long), spec)
}

/// One-dimensional shift over the alphabet `{0,1}^I` obtained from a finite
/// set of generalized cylinders: symbol `s` stores Cantor bit `I[j]` in its
/// `j`-th binary digit.
#[derive(Debug, Clone)]
pub struct CylinderShift {
    bits: Vec<u64>,
    /// per cylinder: (offset, mask, value) triples, offsets starting at 0
    rules: Vec<Vec<(usize, u32, u32)>>,
    span: usize,
}

impl CylinderShift {
    pub fn new(cylinders: &[GenCylinder], extra_bits: &[u64], cap: usize) -> Result<Self> {
        let mut bitset: BTreeSet<u64> = extra_bits.iter().copied().collect();
        for c in cylinders {
            if c.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: c.dim(),
                });
            }
            bitset.extend(c.bit_support());
        }
        if bitset.len() > cap || bitset.len() > 31 {
            return Err(Error::SupportCapExceeded {
                bits: bitset.len(),
                cap: cap.min(31),
            });
        }
        let bits: Vec<u64> = bitset.into_iter().collect();
        let pos: HashMap<u64, usize> = bits.iter().enumerate().map(|(j, &b)| (b, j)).collect();
        let mut span = 0;
        let mut rules = Vec::new();
        for c in cylinders {
            let c = c.normalized();
            let mut rule = Vec::new();
            for (s, p) in c.cells() {
                let off = s.coords()[0] as usize;
                let (mut mask, mut value) = (0u32, 0u32);
                for (b, v) in p.bits() {
                    mask |= 1 << pos[&b];
                    value |= u32::from(v) << pos[&b];
                }
                rule.push((off, mask, value));
                span = span.max(off + 1);
            }
            rules.push(rule);
        }
        Ok(CylinderShift { bits, rules, span })
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    /// Materializes the forbidden words explicitly. Exponential in the number
    /// of unconstrained bits; meant for cross-checking small instances.
    pub fn to_sft(&self) -> Result<SftSpec> {
        let k = 1usize << self.bits.len();
        let names: Vec<String> = (0..k)
            .map(|s| {
                if self.bits.is_empty() {
                    "e".to_string()
                } else {
                    (0..self.bits.len())
                        .map(|j| if s >> j & 1 == 1 { '1' } else { '0' })
                        .collect()
                }
            })
            .collect();
        let alphabet = Alphabet::new(names)?;
        let mut forbidden = Vec::new();
        for rule in &self.rules {
            let mut partial: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
            for &(off, mask, value) in rule {
                let mut next = Vec::new();
                for p in &partial {
                    for s in 0..k as u32 {
                        if s & mask == value {
                            let mut q = p.clone();
                            q.push((off, s));
                            next.push(q);
                        }
                    }
                }
                partial = next;
            }
            for cells in partial {
                forbidden.push(Pattern::from_cells(
                    1,
                    cells
                        .into_iter()
                        .map(|(o, s)| (crate::patterns::Site::new(vec![o as i64]), s)),
                )?);
            }
        }
        SftSpec::new(alphabet, 1, forbidden)
    }
}

impl WordConstraint for CylinderShift {
    fn alphabet_size(&self) -> u32 {
        1 << self.bits.len()
    }

    fn span(&self) -> usize {
        self.span
    }

    fn word_admissible(&self, word: &[u32]) -> bool {
        self.rules.iter().all(|rule| {
            let width = rule.iter().map(|r| r.0 + 1).max().unwrap_or(1);
            (0..(word.len() + 1).saturating_sub(width)).all(|start| {
                !rule
                    .iter()
                    .all(|&(off, mask, value)| word[start + off] & mask == value)
            })
        })
    }
}

/// Emptiness of the effective subshift excluding (all translates of) the
/// given generalized cylinders.
pub fn decide_empty_eds_1d(cylinders: &[GenCylinder]) -> Result<bool> {
    decide_empty_eds_1d_with(cylinders, &[], DEFAULT_BIT_CAP)
}

pub fn decide_empty_eds_1d_with(
    cylinders: &[GenCylinder],
    extra_bits: &[u64],
    cap: usize,
) -> Result<bool> {
    let shift = CylinderShift::new(cylinders, extra_bits, cap)?;
    Ok(emptiness_report(&shift).empty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eds::CylinderPattern;

    fn spec2(words: &[[u32; 2]]) -> SftSpec {
        SftSpec::new(
            Alphabet::numbered(2),
            1,
            words.iter().map(|w| Pattern::word(w)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn golden_mean_graph() {
        let g = build_transfer_graph(&SftSpec::golden_mean(1)).unwrap();
        assert_eq!(g.vertices, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(g.edges, vec![(0, 0), (0, 1), (1, 2), (2, 0), (2, 1)]);
    }

    #[test]
    fn degenerate_graphs() {
        let all = spec2(&[[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert!(build_transfer_graph(&all).unwrap().vertices.is_empty());
        let single = SftSpec::full_shift(1, 1);
        let g = build_transfer_graph(&single).unwrap();
        assert_eq!(g.block_len, 1);
        assert_eq!(g.edges, vec![(0, 0)]);
    }

    #[test]
    fn emptiness_examples() {
        assert!(!decide_empty_1d(&SftSpec::golden_mean(1)).unwrap());
        assert!(decide_empty_1d(&spec2(&[[0, 0], [0, 1], [1, 0], [1, 1]])).unwrap());
        assert!(decide_empty_1d(&spec2(&[[0, 0], [0, 1], [1, 1]])).unwrap());
        assert!(decide_empty_1d(&SftSpec::golden_mean(2)).is_err());
    }

    #[test]
    fn periodic_points() {
        let p = periodic_point_1d(&SftSpec::golden_mean(1)).unwrap().unwrap();
        assert_eq!((p.period, p.word), (1, vec![0]));
        let p = periodic_point_1d(&spec2(&[[0, 0], [1, 1]])).unwrap().unwrap();
        assert_eq!((p.period, p.word.clone()), (2, vec![0, 1]));
        assert!(verify_periodic_word(&spec2(&[[0, 0], [1, 1]]), &p.word).unwrap());
        assert!(periodic_point_1d(&spec2(&[[0, 0], [0, 1], [1, 0], [1, 1]]))
            .unwrap()
            .is_none());
    }

    #[test]
    fn prune_removes_transient_vertices() {
        // only "10" survives as a 2-block, with no self-loop
        let g = build_transfer_graph(&spec2(&[[0, 0], [0, 1], [1, 1]])).unwrap();
        let (alive, rounds) = g.prune();
        assert!(alive.is_empty());
        assert!(rounds >= 1);
    }

    fn bit0(site: i64, v: bool) -> (Site, CylinderPattern) {
        (Site::new(vec![site]), CylinderPattern::full().with(0, v))
    }

    use crate::patterns::Site;

    #[test]
    fn eds_emptiness_examples() {
        let one = GenCylinder::from_cells(1, [bit0(0, true)]).unwrap();
        let zero = GenCylinder::from_cells(1, [bit0(0, false)]).unwrap();
        assert!(!decide_empty_eds_1d(&[one.clone()]).unwrap());
        assert!(decide_empty_eds_1d(&[one, zero]).unwrap());
        let pair = GenCylinder::from_cells(1, [bit0(0, false), bit0(1, false)]).unwrap();
        assert!(!decide_empty_eds_1d(&[pair]).unwrap());
    }

    #[test]
    fn eds_reduction_matches_materialized_sft() {
        let a = GenCylinder::from_cells(1, [bit0(0, false), bit0(1, false)]).unwrap();
        let b = GenCylinder::from_cells(
            1,
            [(Site::new(vec![0]), CylinderPattern::full().with(0, true).with(2, true))],
        )
        .unwrap();
        let shift = CylinderShift::new(&[a, b], &[], DEFAULT_BIT_CAP).unwrap();
        let sft = shift.to_sft().unwrap();
        assert_eq!(
            emptiness_report(&shift).empty,
            decide_empty_1d(&sft).unwrap()
        );
        assert_eq!(
            TransferGraph::from_constraint(&shift, 2).vertices,
            TransferGraph::from_constraint(&sft, 2).vertices
        );
    }

    #[test]
    fn support_cap_refuses() {
        let big = GenCylinder::line(vec![CylinderPattern::from_prefix(&[true; 25])]);
        assert!(matches!(
            decide_empty_eds_1d(&[big]),
            Err(Error::SupportCapExceeded { .. })
        ));
    }
}
