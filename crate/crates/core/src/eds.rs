//! Effective dynamical systems over the Cantor alphabet `K = {0,1}^N`,
//! approximated at finite stages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::patterns::{SftSpec, Site, SiteBox};

/// Finite partial assignment of Cantor bits; denotes the cylinder set of all
/// points agreeing with it.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CylinderPattern {
    bits: BTreeMap<u64, bool>,
}

impl CylinderPattern {
    pub fn new(bits: BTreeMap<u64, bool>) -> Self {
        CylinderPattern { bits }
    }

    /// The whole Cantor space.
    pub fn full() -> Self {
        CylinderPattern::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = (u64, bool)>) -> Self {
        CylinderPattern {
            bits: bits.into_iter().collect(),
        }
    }

    /// Cylinder fixing bits `0..prefix.len()`.
    pub fn from_prefix(prefix: &[bool]) -> Self {
        CylinderPattern::from_bits(prefix.iter().enumerate().map(|(i, &b)| (i as u64, b)))
    }

    pub fn with(mut self, bit: u64, value: bool) -> Self {
        self.bits.insert(bit, value);
        self
    }

    pub fn get(&self, bit: u64) -> Option<bool> {
        self.bits.get(&bit).copied()
    }

    pub fn bits(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.bits.iter().map(|(&i, &v)| (i, v))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn max_bit(&self) -> Option<u64> {
        self.bits.keys().next_back().copied()
    }

    /// True when the two cylinders intersect.
    pub fn compatible(&self, other: &CylinderPattern) -> bool {
        other.bits().all(|(i, v)| self.get(i).map_or(true, |w| w == v))
    }

    /// Intersection, if nonempty.
    pub fn meet(&self, other: &CylinderPattern) -> Option<CylinderPattern> {
        if !self.compatible(other) {
            return None;
        }
        let mut bits = self.bits.clone();
        bits.extend(other.bits());
        Some(CylinderPattern { bits })
    }
}

impl fmt::Display for CylinderPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, v)) in self.bits().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "bit {i} = {}", u8::from(v))?;
        }
        Ok(())
    }
}

/// Finite map from sites of `Z^d` to cylinder patterns; denotes the product
/// of the cylinders, unconstrained away from the support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenCylinder {
    dim: usize,
    cells: BTreeMap<Site, CylinderPattern>,
}

impl GenCylinder {
    pub fn new(dim: usize, cells: BTreeMap<Site, CylinderPattern>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptySupport);
        }
        for s in cells.keys() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        Ok(GenCylinder { dim, cells })
    }

    pub fn from_cells(
        dim: usize,
        cells: impl IntoIterator<Item = (Site, CylinderPattern)>,
    ) -> Result<Self> {
        GenCylinder::new(dim, cells.into_iter().collect())
    }

    /// One-dimensional generalized cylinder at sites `0..patterns.len()`.
    pub fn line(patterns: Vec<CylinderPattern>) -> Self {
        assert!(!patterns.is_empty(), "support must be nonempty");
        GenCylinder {
            dim: 1,
            cells: patterns
                .into_iter()
                .enumerate()
                .map(|(i, p)| (Site::new(vec![i as i64]), p))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Site, &CylinderPattern)> {
        self.cells.iter()
    }

    pub fn get(&self, u: &Site) -> Option<&CylinderPattern> {
        self.cells.get(u)
    }

    pub fn support(&self) -> impl Iterator<Item = &Site> {
        self.cells.keys()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Every Cantor bit position mentioned anywhere.
    pub fn bit_support(&self) -> BTreeSet<u64> {
        self.cells.values().flat_map(|p| p.support()).collect()
    }

    pub fn translate(&self, u: &Site) -> GenCylinder {
        GenCylinder {
            dim: self.dim,
            cells: self.cells.iter().map(|(s, p)| (s.add(u), p.clone())).collect(),
        }
    }

    /// Translate so that the lexicographically least site is the origin.
    pub fn normalized(&self) -> GenCylinder {
        let m = self.cells.keys().next().expect("nonempty").clone();
        self.translate(&Site::origin(self.dim).sub(&m))
    }

    /// Representative of the semantic class: sites carrying the empty pattern
    /// constrain nothing and are dropped (keeping a single origin site when
    /// every site is unconstrained).
    pub fn canonical(&self) -> GenCylinder {
        let cells: BTreeMap<_, _> = self
            .cells
            .iter()
            .filter(|(_, p)| !p.is_empty())
            .map(|(s, p)| (s.clone(), p.clone()))
            .collect();
        if cells.is_empty() {
            GenCylinder {
                dim: self.dim,
                cells: [(Site::origin(self.dim), CylinderPattern::full())].into(),
            }
        } else {
            GenCylinder {
                dim: self.dim,
                cells,
            }
        }
    }

    /// True when every site carries the empty pattern, i.e. the set is all
    /// of `Ω`.
    pub fn is_everything(&self) -> bool {
        self.cells.values().all(CylinderPattern::is_empty)
    }
}

impl fmt::Display for GenCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (s, p)) in self.cells.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "site {s} : {p}")?;
        }
        Ok(())
    }
}

/// `[a] ⊆ [b]` in `K`.
pub fn cyl_subset(a: &CylinderPattern, b: &CylinderPattern) -> bool {
    b.bits().all(|(i, v)| a.get(i) == Some(v))
}

/// `[ā] ⊆ [b̄]` in `Ω`. Sites of `b̄` carrying the empty pattern constrain
/// nothing, so only its nonempty sites need to be covered by `ā`.
pub fn gencyl_subset(a: &GenCylinder, b: &GenCylinder) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let empty = CylinderPattern::full();
    Ok(b.cells().all(|(u, pb)| cyl_subset(a.get(u).unwrap_or(&empty), pb)))
}

/// Semantic equality of generalized cylinders.
pub fn gencyl_equivalent(a: &GenCylinder, b: &GenCylinder) -> Result<bool> {
    Ok(gencyl_subset(a, b)? && gencyl_subset(b, a)?)
}

/// Cantor pairing `φ(i, n) = (i+n)(i+n+1)/2 + n`.
pub fn pairing(i: u64, n: u64) -> u64 {
    let s = i + n;
    s * (s + 1) / 2 + n
}

/// Inverse of [`pairing`].
pub fn unpairing(k: u64) -> (u64, u64) {
    let w = ((8 * k as u128 + 1).isqrt() as u64 - 1) / 2;
    let n = k - w * (w + 1) / 2;
    (w - n, n)
}

/// `π_n` on cylinder patterns: keeps the bits in lane `n`, re-indexed
/// through `φ(·, n)^{-1}`.
pub fn project_cylinder(n: u64, a: &CylinderPattern) -> CylinderPattern {
    CylinderPattern::from_bits(a.bits().filter_map(|(k, v)| {
        let (i, lane) = unpairing(k);
        (lane == n).then_some((i, v))
    }))
}

pub fn project_gencyl(n: u64, a: &GenCylinder) -> GenCylinder {
    GenCylinder {
        dim: a.dim,
        cells: a
            .cells
            .iter()
            .map(|(s, p)| (s.clone(), project_cylinder(n, p)))
            .collect(),
    }
}

/// Places a pattern into lane `n`: bit `i` becomes bit `φ(i, n)`.
pub fn lift_cylinder(n: u64, b: &CylinderPattern) -> CylinderPattern {
    CylinderPattern::from_bits(b.bits().map(|(i, v)| (pairing(i, n), v)))
}

/// Canonical preimage of `[b̄]` under `π_n`.
pub fn lift_gencyl(n: u64, b: &GenCylinder) -> GenCylinder {
    GenCylinder {
        dim: b.dim,
        cells: b
            .cells
            .iter()
            .map(|(s, p)| (s.clone(), lift_cylinder(n, p)))
            .collect(),
    }
}

/// `π_n([ā]) ⊆ [b̄]`.
pub fn proj_subset(n: u64, a: &GenCylinder, b: &GenCylinder) -> Result<bool> {
    gencyl_subset(&project_gencyl(n, a), b)
}

/// A step-indexed generator of excluded generalized cylinders.
///
/// `step(k)` is the finite set emitted within `k` steps; it must be monotone
/// in `k`, deterministic, and empty at `k = 0`.
pub trait Enumerator {
    fn dim(&self) -> usize;

    fn step(&self, k: u64) -> Result<Vec<GenCylinder>>;
}

/// Enumerator given by an explicit list of emissions stamped with the step
/// at which each appears.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedEnumerator {
    dim: usize,
    emissions: Vec<(u64, GenCylinder)>,
}

impl ScriptedEnumerator {
    pub fn new(dim: usize, mut emissions: Vec<(u64, GenCylinder)>) -> Result<Self> {
        for (stamp, g) in &emissions {
            if *stamp == 0 {
                return Err(Error::InvalidInput("emission stamps start at 1".into()));
            }
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        emissions.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(ScriptedEnumerator { dim, emissions })
    }

    pub fn emissions(&self) -> &[(u64, GenCylinder)] {
        &self.emissions
    }
}

impl Enumerator for ScriptedEnumerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn step(&self, k: u64) -> Result<Vec<GenCylinder>> {
        Ok(self
            .emissions
            .iter()
            .take_while(|(s, _)| *s <= k)
            .map(|(_, g)| g.clone())
            .collect())
    }
}

/// A point of `K` with finitely many ones.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CantorPoint {
    ones: BTreeSet<u64>,
}

impl CantorPoint {
    pub fn new(ones: impl IntoIterator<Item = u64>) -> Self {
        CantorPoint {
            ones: ones.into_iter().collect(),
        }
    }

    pub fn bit(&self, i: u64) -> bool {
        self.ones.contains(&i)
    }

    pub fn in_cylinder(&self, a: &CylinderPattern) -> bool {
        a.bits().all(|(i, v)| self.bit(i) == v)
    }

    pub fn project(&self, n: u64) -> CantorPoint {
        CantorPoint::new(self.ones.iter().filter_map(|&k| {
            let (i, lane) = unpairing(k);
            (lane == n).then_some(i)
        }))
    }

    pub fn lift(&self, n: u64) -> CantorPoint {
        CantorPoint::new(self.ones.iter().map(|&i| pairing(i, n)))
    }

    /// Bitwise union; combines points living in disjoint lanes.
    pub fn union(&self, other: &CantorPoint) -> CantorPoint {
        CantorPoint::new(self.ones.union(&other.ones).copied())
    }
}

/// A point of `Ω_d` periodic under a finite-index lattice, given on its
/// fundamental domain `[0, p_1) × … × [0, p_d)` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicPoint {
    periods: Vec<usize>,
    cells: Vec<CantorPoint>,
}

impl PeriodicPoint {
    pub fn new(periods: Vec<usize>, cells: Vec<CantorPoint>) -> Result<Self> {
        if periods.is_empty() || periods.contains(&0) {
            return Err(Error::InvalidInput("periods must be positive".into()));
        }
        if cells.len() != periods.iter().product::<usize>() {
            return Err(Error::InvalidInput("cell count must match the periods".into()));
        }
        Ok(PeriodicPoint { periods, cells })
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn at(&self, u: &Site) -> &CantorPoint {
        let mut idx = 0;
        for (x, &p) in u.coords().iter().zip(&self.periods) {
            idx = idx * p + x.rem_euclid(p as i64) as usize;
        }
        &self.cells[idx]
    }

    pub fn project(&self, n: u64) -> PeriodicPoint {
        PeriodicPoint {
            periods: self.periods.clone(),
            cells: self.cells.iter().map(|c| c.project(n)).collect(),
        }
    }

    /// True iff some translate `T^u x` lies in `[ā]`.
    pub fn hits(&self, a: &GenCylinder) -> bool {
        let dom = SiteBox::new(
            Site::origin(self.dim()),
            Site::new(self.periods.iter().map(|&p| p as i64 - 1).collect()),
        )
        .expect("positive periods");
        let hit = dom
            .sites()
            .any(|u| a.cells().all(|(v, p)| self.at(&v.add(&u)).in_cylinder(p)));
        hit
    }
}

/// Finite set of excluded generalized cylinders: a finite-stage
/// approximation of an effective subshift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSet {
    dim: usize,
    excluded: Vec<GenCylinder>,
}

impl StageSet {
    pub fn new(dim: usize, excluded: impl IntoIterator<Item = GenCylinder>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for g in excluded {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            set.insert(g.canonical());
        }
        Ok(StageSet {
            dim,
            excluded: set.into_iter().collect(),
        })
    }

    pub fn empty(dim: usize) -> Self {
        StageSet {
            dim,
            excluded: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn excluded(&self) -> &[GenCylinder] {
        &self.excluded
    }

    pub fn len(&self) -> usize {
        self.excluded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excluded.is_empty()
    }

    /// True iff the point avoids every translate of every exclusion.
    pub fn contains(&self, x: &PeriodicPoint) -> bool {
        x.dim() == self.dim && !self.excluded.iter().any(|a| x.hits(a))
    }

    /// Same set of exclusions up to semantic equivalence.
    pub fn equivalent(&self, other: &StageSet) -> bool {
        self.dim == other.dim && self.excluded == other.excluded
    }

    /// Emptiness of the subshift (one-dimensional stages only).
    pub fn defines_empty_1d(&self, cap: usize) -> Result<bool> {
        crate::onedim::decide_empty_eds_1d_with(&self.excluded, &[], cap)
    }
}

/// Emissions of finitely many lanes merged into one stream of pairs
/// `(n, b̄)`: at stage `k`, lanes `n ≤ k` contribute their stage-`k` sets.
pub fn master_step(lanes: &[&dyn Enumerator], k: u64) -> Result<Vec<(u64, GenCylinder)>> {
    let mut out = Vec::new();
    for (n, lane) in lanes.iter().enumerate().take(k as usize + 1) {
        out.extend(lane.step(k)?.into_iter().map(|g| (n as u64, g)));
    }
    Ok(out)
}

/// Stage `k` of the product system: every emitted `(n, b̄)` is lifted to the
/// canonical preimage of `[b̄]` under `π_n`, which is the largest element of
/// `{ā : π_n([ā]) ⊆ [b̄]}`.
pub fn product_stage(lanes: &[&dyn Enumerator], k: u64) -> Result<StageSet> {
    let dim = lanes.first().map_or(1, |l| l.dim());
    if let Some(l) = lanes.iter().find(|l| l.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: l.dim(),
        });
    }
    StageSet::new(
        dim,
        master_step(lanes, k)?
            .into_iter()
            .map(|(n, b)| lift_gencyl(n, &b)),
    )
}

/// Grade of a generalized cylinder in the canonical enumeration: after
/// dropping unconstrained sites and translating the least site to the
/// origin, the site spread plus `(bit index + 1)` over all fixed bits. Each
/// grade contains finitely many cylinders.
pub fn canonical_grade(a: &GenCylinder) -> u64 {
    let a = a.canonical().normalized();
    let spread: u64 = a.support().map(|s| s.norm_inf() as u64).max().unwrap_or(0);
    let bits: u64 = a
        .cells()
        .map(|(_, p)| p.support().map(|i| i + 1).sum::<u64>())
        .sum();
    spread + bits
}

/// `L_j`: emissions within `j` steps whose canonical grade is at most `j`.
pub fn truncated_emissions(a: &dyn Enumerator, j: u64) -> Result<Vec<GenCylinder>> {
    Ok(a.step(j)?
        .into_iter()
        .filter(|g| canonical_grade(g) <= j)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedStage {
    pub stage: StageSet,
    /// Largest `j ≤ k` whose truncation still defines a nonempty system.
    pub used: u64,
    /// First `j` at which the truncation became empty, if the guard fired.
    pub fired_at: Option<u64>,
}

/// Guarded stage of a one-dimensional enumerator: the largest truncation
/// `L_j`, `j ≤ k`, whose subshift is nonempty.
pub fn guarded_stage(a: &dyn Enumerator, k: u64, cap: usize) -> Result<GuardedStage> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: a.dim(),
        });
    }
    let mut kept: Vec<GenCylinder> = Vec::new();
    let mut used = 0;
    for j in 1..=k {
        let lj = truncated_emissions(a, j)?;
        if lj.len() != kept.len() && crate::onedim::decide_empty_eds_1d_with(&lj, &[], cap)? {
            return Ok(GuardedStage {
                stage: StageSet::new(1, kept)?,
                used,
                fired_at: Some(j),
            });
        }
        kept = lj;
        used = j;
    }
    Ok(GuardedStage {
        stage: StageSet::new(1, kept)?,
        used,
        fired_at: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalStage {
    /// Guarded stage of each contributing lane, in lane order.
    pub lanes: Vec<GuardedStage>,
    pub product: StageSet,
}

/// Stage `k` of the product of guarded lanes `n ≤ k` of the registry.
pub fn universal_stage(k: u64, registry: &[&dyn Enumerator], cap: usize) -> Result<UniversalStage> {
    let mut lanes = Vec::new();
    let mut lifted = Vec::new();
    for (n, a) in registry.iter().enumerate().take(k as usize + 1) {
        let g = guarded_stage(*a, k, cap)?;
        lifted.extend(g.stage.excluded().iter().map(|b| lift_gencyl(n as u64, b)));
        lanes.push(g);
    }
    Ok(UniversalStage {
        lanes,
        product: StageSet::new(1, lifted)?,
    })
}

/// Lane-`n` part of a product stage, projected back: the exclusions whose
/// bits all lie in lane `n`.
pub fn lane_projection(product: &StageSet, n: u64) -> Result<StageSet> {
    StageSet::new(
        product.dim(),
        product
            .excluded()
            .iter()
            .filter(|g| !g.is_everything() && g.bit_support().iter().all(|&k| unpairing(k).1 == n))
            .map(|g| project_gencyl(n, g)),
    )
}

/// Cap on the number of `(site, bit)` coordinates examined when validating
/// a partition.
pub const PARTITION_COORD_CAP: usize = 20;

/// A partition of `Ω` into finitely many clopen sets, each a finite union of
/// generalized cylinders, labelled by target symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenPartition {
    dim: usize,
    parts: BTreeMap<u32, Vec<GenCylinder>>,
}

impl ClopenPartition {
    /// Validates disjointness and covering by checking every assignment of
    /// the finitely many constrained coordinates.
    pub fn new(dim: usize, parts: BTreeMap<u32, Vec<GenCylinder>>) -> Result<Self> {
        let mut coords: BTreeSet<(Site, u64)> = BTreeSet::new();
        for g in parts.values().flatten() {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            for (s, p) in g.cells() {
                coords.extend(p.support().map(|b| (s.clone(), b)));
            }
        }
        if coords.len() > PARTITION_COORD_CAP {
            return Err(Error::InvalidPartition(format!(
                "{} constrained coordinates exceed the cap of {PARTITION_COORD_CAP}",
                coords.len()
            )));
        }
        let coords: Vec<(Site, u64)> = coords.into_iter().collect();
        let index: BTreeMap<&(Site, u64), usize> =
            coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let matches = |g: &GenCylinder, m: u32| {
            g.cells().all(|(s, p)| {
                p.bits()
                    .all(|(b, v)| (m >> index[&(s.clone(), b)] & 1 == 1) == v)
            })
        };
        for m in 0..1u32 << coords.len() {
            let hits: Vec<u32> = parts
                .iter()
                .filter(|(_, gs)| gs.iter().any(|g| matches(g, m)))
                .map(|(&s, _)| s)
                .collect();
            if hits.len() != 1 {
                return Err(Error::InvalidPartition(format!(
                    "assignment {m:#b} lies in {} parts",
                    hits.len()
                )));
            }
        }
        Ok(ClopenPartition { dim, parts })
    }

    /// `U_σ = {x : x(0) has bit `bit` equal to σ}` over two symbols.
    pub fn by_bit(dim: usize, bit: u64) -> Self {
        let part = |v: bool| {
            vec![GenCylinder::from_cells(
                dim,
                [(Site::origin(dim), CylinderPattern::full().with(bit, v))],
            )
            .expect("nonempty")]
        };
        ClopenPartition::new(dim, [(0, part(false)), (1, part(true))].into()).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &BTreeMap<u32, Vec<GenCylinder>> {
        &self.parts
    }

    /// Symbol assigned to `T^u x`.
    pub fn symbol_at(&self, x: &PeriodicPoint, u: &Site) -> u32 {
        *self
            .parts
            .iter()
            .find(|(_, gs)| {
                gs.iter()
                    .any(|g| g.cells().all(|(v, p)| x.at(&u.add(v)).in_cylinder(p)))
            })
            .expect("partition covers Ω")
            .0
    }
}

/// Checks that every point surviving the stage exclusions placed at offsets
/// `‖u‖∞ ≤ n` is symbolized, through `part`, into a dst-admissible pattern
/// on `[-r; r]^d`.
///
/// Both sides are cylinder conditions on finitely many `(site, bit)`
/// coordinates, so the check is a finite satisfiability search: for every
/// placement of a forbidden dst pattern and every choice of cylinders
/// realizing its symbols, ask whether the resulting cylinder meets the
/// surviving set.
pub fn verify_partition_factor(
    src_stage: &StageSet,
    part: &ClopenPartition,
    dst: &SftSpec,
    n: i64,
    r: i64,
    budget: &mut Budget,
) -> Result<bool> {
    let d = src_stage.dim();
    if part.dim() != d || dst.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if part.dim() != d { part.dim() } else { dst.dim() },
        });
    }
    for &s in part.parts().keys() {
        dst.alphabet().check(s)?;
    }
    if r <= dst.max_diameter() {
        return Err(Error::RadiusTooSmall {
            r,
            bound: dst.max_diameter(),
        });
    }
    // exclusion nogoods over (site, bit) coordinates
    let mut vars: BTreeMap<(Site, u64), usize> = BTreeMap::new();
    let var = |vars: &mut BTreeMap<(Site, u64), usize>, key: (Site, u64)| {
        let next = vars.len();
        *vars.entry(key).or_insert(next)
    };
    let mut nogoods: Vec<Vec<(usize, u32)>> = Vec::new();
    let offsets = SiteBox::cube(d, n.max(0));
    for a in src_stage.excluded() {
        for u in offsets.sites() {
            let mut ng = Vec::new();
            for (v, p) in a.cells() {
                for (b, val) in p.bits() {
                    ng.push((var(&mut vars, (v.add(&u), b)), u32::from(val)));
                }
            }
            nogoods.push(ng);
        }
    }
    let window = SiteBox::cube(d, r);
    for b in dst.forbidden() {
        let fb = b.bounding_box();
        let Ok(places) = SiteBox::new(window.lo().sub(fb.lo()), window.hi().sub(fb.hi())) else {
            continue;
        };
        let cells: Vec<(Site, u32)> = b.cells().map(|(s, v)| (s.clone(), v)).collect();
        for w in places.sites() {
            let choices: Vec<&Vec<GenCylinder>> = cells
                .iter()
                .map(|(_, sym)| part.parts().get(sym).map_or(&EMPTY_PART, |p| p))
                .collect();
            let mut pick = vec![0usize; cells.len()];
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            loop {
                budget.charge(1)?;
                if let Some(target) = realize(&cells, &choices, &pick, &w) {
                    let mut local = vars.clone();
                    let fixed: Vec<(usize, u32)> = target
                        .into_iter()
                        .map(|(key, val)| (var(&mut local, key), u32::from(val)))
                        .collect();
                    let mut csp = crate::csp::Csp::new(local.len(), 2);
                    for ng in &nogoods {
                        csp.forbid(ng.clone());
                    }
                    for (v, val) in fixed {
                        csp.fix(v, val);
                    }
                    if csp.find_first(budget)?.is_some() {
                        return Ok(false);
                    }
                }
                if !advance(&mut pick, &choices) {
                    break;
                }
            }
        }
    }
    Ok(true)
}

/// Next choice vector in mixed radix; false after the last one.
fn advance(pick: &mut [usize], choices: &[&Vec<GenCylinder>]) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < choices[i].len() {
            return true;
        }
        pick[i] = 0;
    }
    false
}

static EMPTY_PART: Vec<GenCylinder> = Vec::new();

/// Intersection of the chosen cylinders, each translated to its site;
/// `None` when they conflict.
fn realize(
    cells: &[(Site, u32)],
    choices: &[&Vec<GenCylinder>],
    pick: &[usize],
    w: &Site,
) -> Option<BTreeMap<(Site, u64), bool>> {
    let mut out: BTreeMap<(Site, u64), bool> = BTreeMap::new();
    for (i, (s, _)) in cells.iter().enumerate() {
        let g = &choices[i][pick[i]];
        let base = s.add(w);
        for (v, p) in g.cells() {
            for (b, val) in p.bits() {
                match out.insert((base.add(v), b), val) {
                    Some(prev) if prev != val => return None,
                    _ => {}
                }
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit(i: u64, v: bool) -> CylinderPattern {
        CylinderPattern::full().with(i, v)
    }

    fn at0(p: CylinderPattern) -> GenCylinder {
        GenCylinder::line(vec![p])
    }

    fn constant_point(ones: &[u64]) -> PeriodicPoint {
        PeriodicPoint::new(vec![1], vec![CantorPoint::new(ones.iter().copied())]).unwrap()
    }

    #[test]
    fn subset_basics() {
        let a = bit(0, true).with(1, false);
        assert!(cyl_subset(&a, &bit(0, true)));
        assert!(!cyl_subset(&bit(0, true), &a));
        assert!(cyl_subset(&a, &CylinderPattern::full()));
        let ga = GenCylinder::line(vec![a.clone(), bit(2, true)]);
        let gb = GenCylinder::line(vec![CylinderPattern::full(), bit(2, true)]);
        assert!(gencyl_subset(&ga, &gb).unwrap());
        assert!(!gencyl_subset(&gb, &ga).unwrap());
    }

    #[test]
    fn pairing_round_trip() {
        for i in 0..100 {
            for n in 0..100 {
                assert_eq!(unpairing(pairing(i, n)), (i, n));
            }
        }
        assert_eq!(pairing(3, 2), 17);
    }

    #[test]
    fn projection_reindexes_lane_bits() {
        let a = CylinderPattern::from_bits([(pairing(3, 2), true), (pairing(1, 0), false)]);
        assert_eq!(project_cylinder(2, &a), bit(3, true));
        assert!(project_cylinder(5, &a).is_empty());
        let empty = at0(CylinderPattern::full());
        assert!(proj_subset(2, &at0(a), &empty).unwrap());
    }

    #[test]
    fn single_lane_product_is_lift() {
        let g = at0(bit(1, true));
        let e = ScriptedEnumerator::new(1, vec![(1, g.clone())]).unwrap();
        let stage = product_stage(&[&e], 1).unwrap();
        assert_eq!(stage.excluded(), &[lift_gencyl(0, &g)]);
    }

    #[test]
    fn two_lane_membership_is_conjunction() {
        let e0 = ScriptedEnumerator::new(1, vec![(1, at0(bit(0, true)))]).unwrap();
        let e1 = ScriptedEnumerator::new(1, vec![(1, at0(bit(1, false)))]).unwrap();
        let lanes: [&dyn Enumerator; 2] = [&e0, &e1];
        let prod = product_stage(&lanes, 1).unwrap();
        let s0 = StageSet::new(1, e0.step(1).unwrap()).unwrap();
        let s1 = StageSet::new(1, e1.step(1).unwrap()).unwrap();
        for l0 in [vec![], vec![0], vec![1]] {
            for l1 in [vec![], vec![1], vec![0, 1]] {
                let p0 = CantorPoint::new(l0.clone());
                let p1 = CantorPoint::new(l1.clone());
                let x = PeriodicPoint::new(vec![1], vec![p0.lift(0).union(&p1.lift(1))]).unwrap();
                let expect = s0.contains(&x.project(0)) && s1.contains(&x.project(1));
                assert_eq!(prod.contains(&x), expect, "{l0:?} {l1:?}");
            }
        }
    }

    #[test]
    fn guard_passes_satisfiable_exclusion() {
        let e = ScriptedEnumerator::new(1, vec![(1, at0(bit(0, true)))]).unwrap();
        let g = guarded_stage(&e, 5, DEFAULT_CAP).unwrap();
        assert_eq!(g.fired_at, None);
        assert_eq!(g.stage.excluded(), &[at0(bit(0, true))]);
    }

    #[test]
    fn guard_truncates_before_emptying() {
        let e = ScriptedEnumerator::new(
            1,
            vec![(1, at0(bit(0, false))), (2, at0(bit(0, true)))],
        )
        .unwrap();
        let g = guarded_stage(&e, 10, DEFAULT_CAP).unwrap();
        assert_eq!(g.fired_at, Some(2));
        assert_eq!(g.stage.excluded(), &[at0(bit(0, false))]);
        assert!(!g.stage.defines_empty_1d(DEFAULT_CAP).unwrap());
    }

    #[test]
    fn universal_projection_matches_lanes() {
        let e0 = ScriptedEnumerator::new(1, vec![(1, at0(bit(0, true)))]).unwrap();
        let e1 = ScriptedEnumerator::new(
            1,
            vec![(1, at0(bit(0, false))), (3, at0(bit(0, true)))],
        )
        .unwrap();
        let reg: [&dyn Enumerator; 2] = [&e0, &e1];
        let u = universal_stage(6, &reg, DEFAULT_CAP).unwrap();
        for n in 0..2 {
            let proj = lane_projection(&u.product, n as u64).unwrap();
            assert!(proj.equivalent(&u.lanes[n].stage));
        }
        assert!(universal_stage(6, &[], DEFAULT_CAP).unwrap().product.is_empty());
    }

    #[test]
    fn partition_validation() {
        let p = ClopenPartition::by_bit(1, 0);
        assert_eq!(p.symbol_at(&constant_point(&[0]), &Site::origin(1)), 1);
        let overlap = ClopenPartition::new(
            1,
            [(0, vec![at0(CylinderPattern::full())]), (1, vec![at0(bit(0, true))])].into(),
        );
        assert!(matches!(overlap, Err(Error::InvalidPartition(_))));
        let gap = ClopenPartition::new(1, [(0, vec![at0(bit(0, true))])].into());
        assert!(gap.is_err());
    }

    #[test]
    fn partition_factor_examples() {
        let part = ClopenPartition::by_bit(1, 0);
        let full = StageSet::empty(1);
        let mut b = Budget::unlimited();
        assert!(verify_partition_factor(&full, &part, &SftSpec::full_shift(2, 1), 0, 2, &mut b).unwrap());
        let gm = SftSpec::golden_mean(1);
        assert!(!verify_partition_factor(&full, &part, &gm, 0, 2, &mut b).unwrap());
        let no_ones = StageSet::new(1, [at0(bit(0, true))]).unwrap();
        assert!(verify_partition_factor(&no_ones, &part, &gm, 2, 2, &mut b).unwrap());
        assert!(!verify_partition_factor(&no_ones, &part, &gm, 0, 2, &mut b).unwrap());
    }

    const DEFAULT_CAP: usize = crate::onedim::DEFAULT_BIT_CAP;
}
