//! Effective maps on `R^d` given by precision oracles, image approximation
//! on dyadic cells, semi-decisions about attractors, and the encoding of an
//! attractor as a one-dimensional effective subshift.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::budget::Budget;
use crate::dyadic::{cells_meeting, BinaryRep, Dyadic, DyadicCell, Interval};
use crate::eds::{CylinderPattern, Enumerator, GenCylinder};
use crate::error::{Error, Result};
use crate::patterns::Site;

/// A map with a sound interval extension: `eval(B)` encloses `f(B)` whenever
/// it returns `Some`.
pub trait IntervalMap: Send + Sync {
    fn dim(&self) -> usize;

    /// Whether the closed box lies in the domain of `f`.
    fn domain_contains(&self, b: &[Interval]) -> bool;

    /// Enclosure of the image, rounded outward to `2^-prec`; `None` when the
    /// box is too coarse to bound the image.
    fn eval(&self, b: &[Interval], prec: u32) -> Option<Vec<Interval>>;
}

/// `x ↦ A x + c` on a box domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub matrix: Vec<Vec<Dyadic>>,
    pub offset: Vec<Dyadic>,
    pub domain: Vec<Interval>,
}

impl Affine {
    pub fn new(matrix: Vec<Vec<Dyadic>>, offset: Vec<Dyadic>, domain: Vec<Interval>) -> Result<Self> {
        let d = offset.len();
        if d == 0 || matrix.len() != d || matrix.iter().any(|r| r.len() != d) || domain.len() != d {
            return Err(Error::InvalidInput("affine map needs a square matrix matching the offset and domain".into()));
        }
        Ok(Affine { matrix, offset, domain })
    }

    /// `x ↦ diag(scale) x + offset`.
    pub fn diagonal(scale: Vec<Dyadic>, offset: Vec<Dyadic>, domain: Vec<Interval>) -> Result<Self> {
        let d = scale.len();
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { scale[i].clone() } else { Dyadic::zero() }).collect())
            .collect();
        Affine::new(matrix, offset, domain)
    }

    /// `x ↦ c x` on `[-r, r]^d`.
    pub fn scalar(d: usize, c: Dyadic, r: i64) -> Self {
        Affine::diagonal(vec![c; d], vec![Dyadic::zero(); d], symmetric_box(d, r)).expect("well-formed")
    }
}

/// `[-r, r]^d`.
pub fn symmetric_box(d: usize, r: i64) -> Vec<Interval> {
    vec![Interval::new(Dyadic::int(-r), Dyadic::int(r)); d]
}

fn box_within(b: &[Interval], dom: &[Interval]) -> bool {
    b.len() == dom.len() && b.iter().zip(dom).all(|(x, y)| x.is_within(y))
}

impl IntervalMap for Affine {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn domain_contains(&self, b: &[Interval]) -> bool {
        box_within(b, &self.domain)
    }

    fn eval(&self, b: &[Interval], prec: u32) -> Option<Vec<Interval>> {
        Some(
            self.matrix
                .iter()
                .zip(&self.offset)
                .map(|(row, c)| {
                    row.iter()
                        .zip(b)
                        .fold(Interval::point(c.clone()), |acc, (a, x)| acc.add(&x.scale(a)))
                        .round_out(prec)
                })
                .collect(),
        )
    }
}

const TRIG_PREC: u32 = 128;

/// Enclosures of `cos 1` and `sin 1` of width at most `2^-126`.
fn cos_sin_one() -> &'static (Interval, Interval) {
    static CELL: OnceLock<(Interval, Interval)> = OnceLock::new();
    CELL.get_or_init(|| {
        // alternating Taylor series with 40 terms; the tail is below 1/81!
        const K: u64 = 40;
        let den: BigInt = (1..=2 * K + 1).product();
        let mut fact = BigInt::one();
        let (mut c, mut s) = (BigInt::from(0), BigInt::from(0));
        for i in 0..=2 * K + 1 {
            if i > 0 {
                fact *= i;
            }
            let term = &den / &fact;
            let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
            if i % 2 == 0 {
                c += term * sign;
            } else {
                s += term * sign;
            }
        }
        let enclose = |v: BigInt| {
            Interval::new(
                Dyadic::ratio_floor(&(&v - 1), &den, TRIG_PREC),
                Dyadic::ratio_ceil(&(&v + 1), &den, TRIG_PREC),
            )
        };
        (enclose(c), enclose(s))
    })
}

/// The planar spiral `f(p) = R(1)(p/2 + p/(2|p|))`, in polar coordinates
/// `(r, θ) ↦ (1/2 + r/2, θ + 1)`, on the part of `[-2, 2]^2` at distance at
/// least `1/8` from the origin. Its attractor is the unit circle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Spiral;

impl IntervalMap for Spiral {
    fn dim(&self) -> usize {
        2
    }

    fn domain_contains(&self, b: &[Interval]) -> bool {
        if !box_within(b, &symmetric_box(2, 2)) {
            return false;
        }
        let near: Dyadic = b.iter().map(|x| x.dist(&Dyadic::zero())).map(|d| &d * &d).fold(Dyadic::zero(), |a, x| a + x);
        near >= Dyadic::new(1, 6)
    }

    fn eval(&self, b: &[Interval], prec: u32) -> Option<Vec<Interval>> {
        let (x, y) = (&b[0], &b[1]);
        let r = x.square().add(&y.square()).sqrt(prec)?;
        let inv = r.recip(prec)?;
        let half = Dyadic::new(1, 1);
        let s = Interval::point(half.clone()).add(&inv.scale(&half)).round_out(prec);
        let (qx, qy) = (x.mul(&s), y.mul(&s));
        let (c, sn) = cos_sin_one();
        Some(vec![
            c.mul(&qx).sub(&sn.mul(&qy)).round_out(prec),
            sn.mul(&qx).add(&c.mul(&qy)).round_out(prec),
        ])
    }
}

/// `g(q) = (f(2^e q + t) - t) / 2^e`: the map `f` seen through an exact
/// affine change of coordinates.
#[derive(Debug, Clone)]
pub struct Conjugated<M> {
    pub inner: M,
    pub exp: i32,
    pub shift: Vec<Dyadic>,
}

impl<M: IntervalMap> Conjugated<M> {
    fn forward(&self, b: &[Interval]) -> Vec<Interval> {
        b.iter()
            .zip(&self.shift)
            .map(|(x, t)| {
                Interval::new(&x.lo.mul_pow2(self.exp) + t, &x.hi.mul_pow2(self.exp) + t)
            })
            .collect()
    }
}

impl<M: IntervalMap> IntervalMap for Conjugated<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain_contains(&self, b: &[Interval]) -> bool {
        self.inner.domain_contains(&self.forward(b))
    }

    fn eval(&self, b: &[Interval], prec: u32) -> Option<Vec<Interval>> {
        let out = self.inner.eval(&self.forward(b), prec + self.exp.max(0) as u32)?;
        Some(
            out.iter()
                .zip(&self.shift)
                .map(|(y, t)| {
                    Interval::new((&y.lo - t).mul_pow2(-self.exp), (&y.hi - t).mul_pow2(-self.exp))
                        .round_out(prec)
                })
                .collect(),
        )
    }
}

/// The spiral moved to `[0, 1]^2` by `q ↦ 4q - 2`; its attractor is the
/// circle of radius `1/4` about `(1/2, 1/2)`.
pub fn unit_square_spiral() -> Conjugated<Spiral> {
    Conjugated {
        inner: Spiral,
        exp: 2,
        shift: vec![Dyadic::int(-2), Dyadic::int(-2)],
    }
}

/// The built-in map library as data: each variant is an exact interval
/// map, and `Compose` applies its parts left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapExpr {
    Affine(Affine),
    Spiral,
    /// The spiral moved to `[0, 1]^2`.
    UnitSpiral,
    Compose(Vec<MapExpr>),
}

/// Working precision for domain checks of intermediate images.
const DOMAIN_PREC: u32 = 40;

impl IntervalMap for MapExpr {
    fn dim(&self) -> usize {
        match self {
            MapExpr::Affine(a) => a.dim(),
            MapExpr::Spiral | MapExpr::UnitSpiral => 2,
            MapExpr::Compose(parts) => parts.first().map_or(0, |p| p.dim()),
        }
    }

    fn domain_contains(&self, b: &[Interval]) -> bool {
        match self {
            MapExpr::Affine(a) => a.domain_contains(b),
            MapExpr::Spiral => Spiral.domain_contains(b),
            MapExpr::UnitSpiral => unit_square_spiral().domain_contains(b),
            MapExpr::Compose(parts) => {
                let mut cur = b.to_vec();
                for p in parts {
                    if !p.domain_contains(&cur) {
                        return false;
                    }
                    match p.eval(&cur, DOMAIN_PREC) {
                        Some(next) => cur = next,
                        None => return false,
                    }
                }
                true
            }
        }
    }

    fn eval(&self, b: &[Interval], prec: u32) -> Option<Vec<Interval>> {
        match self {
            MapExpr::Affine(a) => a.eval(b, prec),
            MapExpr::Spiral => Spiral.eval(b, prec),
            MapExpr::UnitSpiral => unit_square_spiral().eval(b, prec),
            MapExpr::Compose(parts) => {
                let mut cur = b.to_vec();
                for p in parts {
                    cur = p.eval(&cur, prec + 4)?;
                }
                Some(cur.iter().map(|iv| iv.round_out(prec)).collect())
            }
        }
    }
}

/// Answer of a precision query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// Within `1/n` of `f(x)` in the sup norm.
    pub y: Vec<Dyadic>,
    /// Number of fractional digits of each coordinate that were consulted.
    pub digits_read: u32,
}

/// An effective map: answers `1/n`-approximations of `f(x)` from finitely
/// many binary digits of `x`.
pub trait EffectiveMap: Send + Sync {
    fn dim(&self) -> usize;

    fn domain_contains(&self, b: &[Interval]) -> bool;

    /// Deterministic; the answer depends only on the integer parts and the
    /// first `digits_read` digits of the coordinates.
    fn query(&self, x: &[BinaryRep], n: u64) -> Result<Answer>;
}

/// Oracle that reads digits one at a time until the interval extension of
/// the map pins the image down to a box of side `2/n`.
#[derive(Debug, Clone)]
pub struct IntervalOracle<M> {
    pub map: M,
    pub max_digits: u32,
}

impl<M> IntervalOracle<M> {
    pub fn new(map: M) -> Self {
        IntervalOracle { map, max_digits: 64 }
    }
}

fn ceil_log2(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

impl<M: IntervalMap> EffectiveMap for IntervalOracle<M> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn domain_contains(&self, b: &[Interval]) -> bool {
        self.map.domain_contains(b)
    }

    fn query(&self, x: &[BinaryRep], n: u64) -> Result<Answer> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let n = n.max(1);
        let bound = Dyadic::ratio_floor(&BigInt::from(2), &BigInt::from(n), ceil_log2(n) + 8);
        for digits in 0..=self.max_digits {
            let b: Vec<Interval> = x.iter().map(|r| r.prefix_interval(digits)).collect();
            let Some(out) = self.map.eval(&b, digits + ceil_log2(n) + 8) else {
                continue;
            };
            if out.iter().all(|iv| iv.width() <= bound) {
                return Ok(Answer {
                    y: out.iter().map(Interval::mid).collect(),
                    digits_read: digits,
                });
            }
        }
        Err(Error::DomainViolation(format!(
            "no 1/{n} answer within {} digits",
            self.max_digits
        )))
    }
}

/// Levels of subdivision below the input cell before approximation gives up.
pub const MAX_SUBDIVISION: u32 = 24;

/// Points `y` with `f(D) ⊆ ⋃ B∞(y, 1/m)`, each `y` within `1/m` of `f(D)`.
///
/// A query at the lower corner of a subcell `Q` of level `L` that reads at
/// most `L` digits answers identically for every point of `Q`, because each
/// point of the closed cell has an expansion sharing those digits; so `f(Q)`
/// lies in the `1/m`-ball about the answer. Cells that need more digits are
/// split.
pub fn image_cover(oracle: &dyn EffectiveMap, d: &DyadicCell, m: u64, budget: &mut Budget) -> Result<Vec<Vec<Dyadic>>> {
    if d.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: d.dim(),
        });
    }
    if !oracle.domain_contains(&d.to_box()) {
        return Err(Error::DomainViolation(format!("{d} is outside the domain")));
    }
    let mut out = BTreeSet::new();
    let mut stack = vec![d.clone()];
    while let Some(q) = stack.pop() {
        budget.charge(1)?;
        let a = oracle.query(&q.lower_corner_reps(), m)?;
        if a.digits_read <= q.level() {
            out.insert(a.y);
        } else if q.level() >= d.level() + MAX_SUBDIVISION {
            return Err(Error::BudgetExhausted { spent: budget.spent() });
        } else {
            stack.extend(q.children());
        }
    }
    Ok(out.into_iter().collect())
}

/// A finite set of points `5/m`-dense in `f(D)` with every point within
/// `1/m` of `f(D)`, for `m = 5n`; hence `1/n`-dense.
pub fn approx_image(oracle: &dyn EffectiveMap, d: &DyadicCell, n: u64, budget: &mut Budget) -> Result<Vec<Vec<Dyadic>>> {
    image_cover(oracle, d, 5 * n.max(1), budget)
}

/// `1/m` rounded up to a dyadic.
fn inv_ceil(m: u64) -> Dyadic {
    Dyadic::ratio_ceil(&BigInt::one(), &BigInt::from(m), ceil_log2(m) + 4)
}

fn ball(y: &[Dyadic], r: &Dyadic) -> Vec<Interval> {
    y.iter().map(|c| Interval::new(c - r, c + r)).collect()
}

/// Outcome of a semi-decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disjointness {
    ProvedDisjoint { n: u64 },
    Unknown { fuel: u64 },
}

impl Disjointness {
    pub fn is_proved(&self) -> bool {
        matches!(self, Disjointness::ProvedDisjoint { .. })
    }
}

/// A finite union `C` of closed dyadic cells asserted to contain the
/// attractor and to be mapped into a forward-invariant neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrapRegion {
    cells: BTreeSet<DyadicCell>,
}

impl TrapRegion {
    pub fn new(cells: impl IntoIterator<Item = DyadicCell>) -> Result<Self> {
        let cells: BTreeSet<DyadicCell> = cells.into_iter().collect();
        let Some(first) = cells.first() else {
            return Err(Error::InvalidInput("trap region needs at least one cell".into()));
        };
        let d = first.dim();
        if let Some(c) = cells.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
        }
        Ok(TrapRegion { cells })
    }

    /// Cells of `level` meeting the closed box.
    pub fn covering(level: u32, b: &[Interval]) -> Result<Self> {
        TrapRegion::new(cells_meeting(level, b))
    }

    pub fn dim(&self) -> usize {
        self.cells.first().expect("nonempty").dim()
    }

    pub fn cells(&self) -> &BTreeSet<DyadicCell> {
        &self.cells
    }

    pub fn finest_level(&self) -> u32 {
        self.cells.iter().map(DyadicCell::level).max().expect("nonempty")
    }

    pub fn meets(&self, c: &DyadicCell) -> bool {
        self.cells.iter().any(|t| t.meets(c))
    }

    pub fn dist(&self, y: &[Dyadic]) -> Dyadic {
        self.cells.iter().map(|c| c.dist(y)).min().expect("nonempty")
    }

    /// Necessary check at precisions `1..=max_n`: every cell lies in the
    /// domain and every approximate image point stays within `2/n` of `C`.
    pub fn validate(&self, oracle: &dyn EffectiveMap, max_n: u64, budget: &mut Budget) -> Result<()> {
        if oracle.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: oracle.dim(), found: self.dim() });
        }
        for n in 1..=max_n {
            let slack = Dyadic::ratio_floor(&BigInt::from(2), &BigInt::from(n), ceil_log2(n) + 4);
            for c in &self.cells {
                if !oracle.domain_contains(&c.to_box()) {
                    return Err(Error::TrapRejected(format!("{c} is outside the domain")));
                }
                for y in approx_image(oracle, c, n, budget)? {
                    if self.dist(&y) > slack {
                        let ys: Vec<String> = y.iter().map(Dyadic::to_string).collect();
                        return Err(Error::TrapRejected(format!(
                            "image point ({}) of {c} is farther than 2/{n} from the region",
                            ys.join(", ")
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nested over-approximations `G_j ⊇ f^j(C) ⊇ X` of the attractor.
///
/// `G_0` is the trap region. `G_j` consists of the cells of level
/// `⌈log2(5j)⌉` meeting both `C` and a `1/(5j)`-ball about an image point of
/// some cell of `G_{j-1}`; the balls cover `f(G_{j-1})`, so `X ⊆ G_j`.
#[derive(Debug, Clone)]
pub struct AttractorCover {
    trap: TrapRegion,
    stages: Vec<Vec<DyadicCell>>,
}

impl AttractorCover {
    pub fn new(trap: TrapRegion) -> Self {
        let g0 = trap.cells.iter().cloned().collect();
        AttractorCover { trap, stages: vec![g0] }
    }

    pub fn trap(&self) -> &TrapRegion {
        &self.trap
    }

    pub fn stage(&mut self, j: usize, oracle: &dyn EffectiveMap, budget: &mut Budget) -> Result<&[DyadicCell]> {
        while self.stages.len() <= j {
            let k = self.stages.len() as u64;
            let m = 5 * k;
            let level = ceil_log2(m).max(self.trap.finest_level());
            let r = inv_ceil(m);
            let mut next = BTreeSet::new();
            for c in self.stages.last().expect("stage 0") {
                for y in image_cover(oracle, c, m, budget)? {
                    for g in cells_meeting(level, &ball(&y, &r)) {
                        if !next.contains(&g) && self.trap.meets(&g) {
                            next.insert(g);
                        }
                    }
                }
            }
            self.stages.push(next.into_iter().collect());
        }
        Ok(&self.stages[j])
    }

    /// Halts with `ProvedDisjoint { n }` at the first `n ≤ fuel` such that
    /// `G_n` misses the closed cell `D`.
    pub fn avoids(&mut self, d: &DyadicCell, fuel: u64, oracle: &dyn EffectiveMap, budget: &mut Budget) -> Result<Disjointness> {
        for n in 1..=fuel {
            if !self.stage(n as usize, oracle, budget)?.iter().any(|g| g.meets(d)) {
                return Ok(Disjointness::ProvedDisjoint { n });
            }
        }
        Ok(Disjointness::Unknown { fuel })
    }
}

/// Semi-decides `X ∩ D = ∅` for the attractor `X` inside an accepted trap.
pub fn semidecide_cell_avoids_attractor(
    oracle: &dyn EffectiveMap,
    trap: &TrapRegion,
    d: &DyadicCell,
    fuel: u64,
    budget: &mut Budget,
) -> Result<Disjointness> {
    AttractorCover::new(trap.clone()).avoids(d, fuel, oracle, budget)
}

/// Semi-decides `f(D') ∩ D'' = ∅`: halts once every point of a `1/n`-dense
/// approximation of `f(D')` lies farther than `1/n` from `D''`.
pub fn semidecide_images_disjoint(
    oracle: &dyn EffectiveMap,
    d1: &DyadicCell,
    d2: &DyadicCell,
    fuel: u64,
    budget: &mut Budget,
) -> Result<Disjointness> {
    for n in 1..=fuel {
        let pts = approx_image(oracle, d1, n, budget)?;
        let gap = inv_ceil(n);
        if pts.iter().all(|y| d2.dist(y) > gap) {
            return Ok(Disjointness::ProvedDisjoint { n });
        }
    }
    Ok(Disjointness::Unknown { fuel })
}

/// Binary digit `j` (0-based) of `x ∈ [0, 1]`, using the finite expansion
/// for dyadics and the all-ones expansion for `1`.
fn digit(x: &Dyadic, j: u32) -> bool {
    if *x >= Dyadic::int(1) {
        return true;
    }
    x.floor_scaled(j + 1).bit(0)
}

/// First `d · depth` bits of the interleaved encoding: bit `d·j + i` is the
/// digit of `x_i` of weight `2^{-(j+1)}`.
pub fn encode_point(x: &[Dyadic], depth: u32) -> Result<Vec<bool>> {
    let (zero, one) = (Dyadic::zero(), Dyadic::int(1));
    if let Some(v) = x.iter().find(|v| **v < zero || **v > one) {
        return Err(Error::DomainViolation(format!("{v} is outside [0, 1]")));
    }
    Ok((0..depth)
        .flat_map(|j| x.iter().map(move |v| digit(v, j)))
        .collect())
}

/// Closed cell of level `depth` encoded by a cylinder fixing bits
/// `0..d·depth`.
pub fn decode_cell(a: &CylinderPattern, d: usize, depth: u32) -> Result<DyadicCell> {
    let mut corner = vec![0i64; d];
    for j in 0..depth as u64 {
        for (i, k) in corner.iter_mut().enumerate() {
            let bit = a.get(d as u64 * j + i as u64).ok_or_else(|| {
                Error::InvalidInput(format!("bit {} is not fixed", d as u64 * j + i as u64))
            })?;
            *k = 2 * *k + i64::from(bit);
        }
    }
    Ok(DyadicCell::new(depth, corner))
}

/// Inverse of [`decode_cell`] for cells inside `[0, 1]^d`.
pub fn cell_pattern(c: &DyadicCell) -> CylinderPattern {
    let d = c.dim() as u64;
    let depth = c.level();
    CylinderPattern::from_bits((0..depth).flat_map(|j| {
        c.corner()
            .iter()
            .enumerate()
            .map(move |(i, &k)| (d * j as u64 + i as u64, k >> (depth - 1 - j) & 1 == 1))
    }))
}

/// Cells of `level` tiling `[0, 1]^d`.
pub fn unit_cells(d: usize, level: u32) -> Vec<DyadicCell> {
    crate::dyadic::box_cells(level, &vec![0; d], &vec![(1i64 << level) - 1; d])
}

/// Default bound on cylinder depth in the subshift presentation.
pub const DEFAULT_DEPTH_CAP: u32 = 2;

/// Incremental search for forbidden two-site cylinders, reusing work across
/// increasing fuel.
#[derive(Debug, Clone)]
pub struct ForbiddenSearch {
    cover: AttractorCover,
    depth_cap: u32,
    avoid: BTreeMap<DyadicCell, (u64, bool)>,
    images: BTreeMap<DyadicCell, u64>,
    separated: BTreeSet<(DyadicCell, DyadicCell)>,
}

impl ForbiddenSearch {
    pub fn new(trap: TrapRegion, depth_cap: u32) -> Self {
        ForbiddenSearch {
            cover: AttractorCover::new(trap),
            depth_cap,
            avoid: BTreeMap::new(),
            images: BTreeMap::new(),
            separated: BTreeSet::new(),
        }
    }

    fn avoids(&mut self, c: &DyadicCell, fuel: u64, oracle: &dyn EffectiveMap, budget: &mut Budget) -> Result<bool> {
        if let Some(&(f, v)) = self.avoid.get(c) {
            if v || f >= fuel {
                return Ok(v);
            }
        }
        let v = self.cover.avoids(c, fuel, oracle, budget)?.is_proved();
        self.avoid.insert(c.clone(), (fuel, v));
        Ok(v)
    }

    /// Advances the image-separation search of `c1` up to precision `fuel`.
    fn separate(&mut self, c1: &DyadicCell, cells: &[DyadicCell], fuel: u64, oracle: &dyn EffectiveMap, budget: &mut Budget) -> Result<()> {
        let done = self.images.get(c1).copied().unwrap_or(0);
        for n in done + 1..=fuel {
            let pts = approx_image(oracle, c1, n, budget)?;
            let gap = inv_ceil(n);
            for c2 in cells {
                if !self.separated.contains(&(c1.clone(), c2.clone())) && pts.iter().all(|y| c2.dist(y) > gap) {
                    self.separated.insert((c1.clone(), c2.clone()));
                }
            }
        }
        self.images.insert(c1.clone(), fuel.max(done));
        Ok(())
    }

    /// Cylinders `{0 ↦ [c1], 1 ↦ [c2]}` over cells of depth
    /// `≤ min(fuel, depth_cap)` such that, within fuel, `c1` or `c2` was shown
    /// to avoid the attractor or `f(c1)` was shown to miss `c2`.
    pub fn emit(&mut self, fuel: u64, oracle: &dyn EffectiveMap, budget: &mut Budget) -> Result<Vec<GenCylinder>> {
        let d = self.cover.trap().dim();
        let mut out = Vec::new();
        for depth in 1..=fuel.min(u64::from(self.depth_cap)) as u32 {
            let cells = unit_cells(d, depth);
            let mut avoid = Vec::with_capacity(cells.len());
            for c in &cells {
                avoid.push(self.avoids(c, fuel, oracle, budget)?);
            }
            for (i, c1) in cells.iter().enumerate() {
                let in_domain = oracle.domain_contains(&c1.to_box());
                if in_domain {
                    self.separate(c1, &cells, fuel, oracle, budget)?;
                }
                for (j, c2) in cells.iter().enumerate() {
                    let sep = in_domain && self.separated.contains(&(c1.clone(), c2.clone()));
                    if avoid[i] || avoid[j] || sep {
                        out.push(
                            GenCylinder::from_cells(
                                1,
                                [
                                    (Site::new(vec![0]), cell_pattern(c1)),
                                    (Site::new(vec![1]), cell_pattern(c2)),
                                ],
                            )
                            .expect("one-dimensional sites"),
                        );
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Forbidden two-site cylinders found within `fuel`.
pub fn enumerate_forbidden_cylinders(
    oracle: &dyn EffectiveMap,
    trap: &TrapRegion,
    fuel: u64,
    depth_cap: u32,
    budget: &mut Budget,
) -> Result<Vec<GenCylinder>> {
    ForbiddenSearch::new(trap.clone(), depth_cap).emit(fuel, oracle, budget)
}

/// The forbidden-cylinder stream packaged as an enumerator: `step(k)` is the
/// emission at fuel `k`.
pub struct AttractorPresentation {
    oracle: Arc<dyn EffectiveMap>,
    search: Mutex<ForbiddenSearch>,
    node_limit: u64,
}

impl AttractorPresentation {
    pub fn new(oracle: Arc<dyn EffectiveMap>, trap: TrapRegion, depth_cap: u32) -> Self {
        AttractorPresentation {
            oracle,
            search: Mutex::new(ForbiddenSearch::new(trap, depth_cap)),
            node_limit: 50_000_000,
        }
    }
}

/// Same as [`AttractorPresentation::new`].
pub fn eds_presentation(oracle: Arc<dyn EffectiveMap>, trap: TrapRegion, depth_cap: u32) -> AttractorPresentation {
    AttractorPresentation::new(oracle, trap, depth_cap)
}

impl Enumerator for AttractorPresentation {
    fn dim(&self) -> usize {
        1
    }

    fn step(&self, k: u64) -> Result<Vec<GenCylinder>> {
        let mut budget = Budget::new(self.node_limit);
        let mut search = self.search.lock().expect("search state poisoned");
        search.emit(k, self.oracle.as_ref(), &mut budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn halving() -> IntervalOracle<Affine> {
        IntervalOracle::new(Affine::scalar(1, dy("1/2"), 2))
    }

    fn cell(level: u32, corner: &[i64]) -> DyadicCell {
        DyadicCell::new(level, corner.to_vec())
    }

    fn halving_trap() -> TrapRegion {
        TrapRegion::new([cell(1, &[-1]), cell(1, &[0])]).unwrap()
    }

    fn spiral_trap() -> TrapRegion {
        let ring: Vec<DyadicCell> = cells_meeting(2, &symmetric_box(2, 2))
            .into_iter()
            .filter(|c| {
                let b = c.to_box();
                let near = b.iter().map(|x| x.dist(&Dyadic::zero())).map(|d| &d * &d).fold(Dyadic::zero(), |a, x| a + x);
                let far = b.iter().map(|x| Dyadic::max(&x.lo.abs(), &x.hi.abs())).map(|d| &d * &d).fold(Dyadic::zero(), |a, x| a + x);
                Spiral.domain_contains(&b) && near <= dy("9/4") && far >= dy("1/4")
            })
            .collect();
        TrapRegion::new(ring).unwrap()
    }

    #[test]
    fn identity_image_is_two_sided_close() {
        let id = IntervalOracle::new(Affine::scalar(1, dy("1"), 2));
        let d = cell(1, &[0]);
        let pts = approx_image(&id, &d, 4, &mut Budget::unlimited()).unwrap();
        assert!(pts.iter().all(|y| d.dist(y) <= dy("1/4")));
        for k in 0..=16 {
            let x = Dyadic::new(k, 5);
            assert!(pts.iter().any(|y| (&y[0] - &x).abs() <= dy("1/4")));
        }
    }

    #[test]
    fn constant_map_image() {
        let c = IntervalOracle::new(
            Affine::diagonal(vec![dy("0")], vec![dy("3/8")], symmetric_box(1, 2)).unwrap(),
        );
        let pts = approx_image(&c, &cell(0, &[0]), 8, &mut Budget::unlimited()).unwrap();
        assert!(pts.iter().all(|y| (&y[0] - &dy("3/8")).abs() <= dy("1/8")));
    }

    #[test]
    fn locality_of_answers() {
        let o = IntervalOracle::new(unit_square_spiral());
        let x = vec![BinaryRep::of_fraction(3, 3), BinaryRep::of_fraction(1, 4)];
        let a = o.query(&x, 16).unwrap();
        let mut y = x.clone();
        for r in &mut y {
            r.digits.resize(a.digits_read as usize, false);
            r.tail = true;
        }
        assert_eq!(o.query(&y, 16).unwrap(), a);
    }

    #[test]
    fn trap_validation() {
        let mut b = Budget::unlimited();
        halving_trap().validate(&halving(), 8, &mut b).unwrap();
        let doubling = IntervalOracle::new(Affine::scalar(1, dy("2"), 4));
        assert!(matches!(
            halving_trap().validate(&doubling, 8, &mut b),
            Err(Error::TrapRejected(_))
        ));
    }

    #[test]
    fn halving_cell_tests() {
        let mut b = Budget::unlimited();
        let o = halving();
        let v = semidecide_cell_avoids_attractor(&o, &halving_trap(), &cell(2, &[1]), 16, &mut b).unwrap();
        assert!(v.is_proved());
        let v = semidecide_cell_avoids_attractor(&o, &halving_trap(), &cell(3, &[-1]), 16, &mut b).unwrap();
        assert_eq!(v, Disjointness::Unknown { fuel: 16 });
    }

    #[test]
    fn spiral_origin_cell_avoids_circle() {
        let o = IntervalOracle::new(Spiral);
        let trap = spiral_trap();
        trap.validate(&o, 2, &mut Budget::unlimited()).unwrap();
        let v = semidecide_cell_avoids_attractor(&o, &trap, &cell(2, &[0, 0]), 8, &mut Budget::unlimited()).unwrap();
        assert!(v.is_proved(), "{v:?}");
    }

    #[test]
    fn image_disjointness() {
        let mut b = Budget::unlimited();
        let o = halving();
        assert!(semidecide_images_disjoint(&o, &cell(1, &[1]), &cell(3, &[0]), 32, &mut b).unwrap().is_proved());
        assert!(!semidecide_images_disjoint(&o, &cell(1, &[0]), &cell(2, &[0]), 16, &mut b).unwrap().is_proved());
        let id = IntervalOracle::new(Affine::scalar(1, dy("1"), 2));
        let v = semidecide_images_disjoint(&id, &cell(2, &[0]), &cell(2, &[2]), 8, &mut b).unwrap();
        assert!(matches!(v, Disjointness::ProvedDisjoint { n } if n <= 8));
    }

    #[test]
    fn composition_chains_maps() {
        let half = MapExpr::Affine(Affine::scalar(1, dy("1/2"), 2));
        let quarter = IntervalOracle::new(MapExpr::Compose(vec![half.clone(), half]));
        let pts = approx_image(&quarter, &cell(0, &[0]), 8, &mut Budget::unlimited()).unwrap();
        let target = Interval::new(dy("0"), dy("1/4"));
        assert!(pts.iter().all(|y| target.dist(&y[0]) <= dy("1/32")));
    }

    #[test]
    fn encoding() {
        assert_eq!(encode_point(&[dy("0")], 3).unwrap(), vec![false; 3]);
        assert_eq!(encode_point(&[dy("1/2")], 3).unwrap(), vec![true, false, false]);
        assert_eq!(
            encode_point(&[dy("1/2"), dy("1/4")], 3).unwrap(),
            vec![true, false, false, true, false, false]
        );
        let c = cell(3, &[5, 2]);
        assert_eq!(decode_cell(&cell_pattern(&c), 2, 3).unwrap(), c);
        let p = CylinderPattern::from_prefix(&encode_point(&[dy("1"), dy("3/8")], 3).unwrap());
        assert_eq!(decode_cell(&p, 2, 3).unwrap(), cell(3, &[7, 3]));
    }

    #[test]
    fn presentation_is_monotone_and_spares_the_fixed_point() {
        let p = eds_presentation(Arc::new(halving()), halving_trap(), DEFAULT_DEPTH_CAP);
        assert!(p.step(0).unwrap().is_empty());
        let mut prev: BTreeSet<GenCylinder> = BTreeSet::new();
        for k in 1..=8 {
            let cur: BTreeSet<GenCylinder> = p.step(k).unwrap().into_iter().collect();
            assert!(prev.is_subset(&cur));
            prev = cur;
        }
        for depth in 1..=DEFAULT_DEPTH_CAP {
            let z = CylinderPattern::from_prefix(&encode_point(&[dy("0")], depth).unwrap());
            let orbit = GenCylinder::line(vec![z.clone(), z]);
            assert!(!prev.contains(&orbit));
        }
        // [1/4, 1/2] avoids the attractor {0}
        let q = cell_pattern(&cell(2, &[1]));
        assert!(prev.contains(&GenCylinder::line(vec![q.clone(), q])));
    }
}
