//! Budgeted emptiness semi-decision for `d`-dimensional SFTs.
//!
//! Emptiness is proved by finding a radius `n` with no admissible pattern on
//! `[-n; n]^d`; nonemptiness by exhibiting a periodic configuration. Neither
//! ladder terminates on every input, so each run carries explicit fuel.

use std::fmt;

use crate::budget::Budget;
use crate::csp::Csp;
use crate::error::{Error, Result};
use crate::patterns::{Alphabet, Pattern, SftSpec, Site, SiteBox};

/// A fully periodic configuration given by its values on the fundamental
/// domain `[0, p_1) × … × [0, p_d)`, listed in lexicographic site order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPattern {
    periods: Vec<usize>,
    cells: Vec<u32>,
}

impl TorusPattern {
    pub fn new(periods: Vec<usize>, cells: Vec<u32>) -> Result<Self> {
        if periods.is_empty() || periods.contains(&0) {
            return Err(Error::InvalidInput("periods must be positive".into()));
        }
        let vol: usize = periods.iter().product();
        if cells.len() != vol {
            return Err(Error::InvalidInput(format!(
                "torus needs {vol} cells, got {}",
                cells.len()
            )));
        }
        Ok(TorusPattern { periods, cells })
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn domain(&self) -> SiteBox {
        SiteBox::new(
            Site::origin(self.dim()),
            Site::new(self.periods.iter().map(|&p| p as i64 - 1).collect()),
        )
        .expect("positive periods")
    }

    fn index(&self, u: &Site) -> usize {
        let mut idx = 0;
        for (x, &p) in u.coords().iter().zip(&self.periods) {
            idx = idx * p + x.rem_euclid(p as i64) as usize;
        }
        idx
    }

    /// Value of the periodic extension at `u`.
    pub fn at(&self, u: &Site) -> u32 {
        self.cells[self.index(u)]
    }

    /// Restriction of the periodic extension to a box.
    pub fn window(&self, b: &SiteBox) -> Pattern {
        let vals: Vec<u32> = b.sites().map(|u| self.at(&u)).collect();
        Pattern::from_box(b, &vals)
    }
}

impl fmt::Display for TorusPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.periods.iter().map(usize::to_string).collect();
        let c: Vec<String> = self.cells.iter().map(u32::to_string).collect();
        write!(f, "torus {} [{}]", p.join("x"), c.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ProvedEmpty { n: usize },
    ProvedNonempty { cert: TorusPattern },
    Unknown { fuel_spent: u64 },
}

impl Verdict {
    pub fn is_empty(&self) -> Option<bool> {
        match self {
            Verdict::ProvedEmpty { .. } => Some(true),
            Verdict::ProvedNonempty { .. } => Some(false),
            Verdict::Unknown { .. } => None,
        }
    }
}

/// Fuel for [`semidecide_empty`]: the largest radius (and period) tried and a
/// node budget shared by both ladders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    pub max_radius: usize,
    pub nodes: u64,
}

impl Fuel {
    pub fn new(max_radius: usize) -> Self {
        Fuel {
            max_radius,
            nodes: 5_000_000,
        }
    }
}

fn check_dim(spec: &SftSpec, d: usize) -> Result<()> {
    if spec.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: d,
        });
    }
    Ok(())
}

/// True iff no forbidden pattern appears anywhere in the periodic extension.
pub fn verify_torus(spec: &SftSpec, t: &TorusPattern) -> Result<bool> {
    check_dim(spec, t.dim())?;
    if t.cells.iter().any(|&s| spec.alphabet().check(s).is_err()) {
        return Ok(false);
    }
    let dom = t.domain();
    for b in spec.forbidden() {
        for u in dom.sites() {
            if b.cells().all(|(v, s)| t.at(&v.add(&u)) == s) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn torus_csp(spec: &SftSpec, periods: &[usize]) -> Csp {
    let shell = TorusPattern::new(periods.to_vec(), vec![0; periods.iter().product()])
        .expect("positive periods");
    let dom = shell.domain();
    let mut csp = Csp::new(dom.volume(), spec.alphabet().len() as u32);
    for b in spec.forbidden() {
        for u in dom.sites() {
            csp.forbid(b.cells().map(|(v, s)| (shell.index(&v.add(&u)), s)).collect());
        }
    }
    csp
}

fn try_periods(spec: &SftSpec, periods: &[usize], budget: &mut Budget) -> Result<Option<TorusPattern>> {
    let csp = torus_csp(spec, periods);
    Ok(csp
        .find_first(budget)?
        .map(|cells| TorusPattern::new(periods.to_vec(), cells).expect("consistent size")))
}

/// Period tuples bounded by `max`, ordered by volume and then lexicographically.
pub fn period_order(max: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &m in max {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=m).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.sort_by_key(|p| (p.iter().product::<usize>(), p.clone()));
    out
}

/// First torus pattern (in period-volume order, then lexicographic) whose
/// periodic extension is admissible.
pub fn search_periodic(
    spec: &SftSpec,
    max_periods: &[usize],
    budget: &mut Budget,
) -> Result<Option<TorusPattern>> {
    check_dim(spec, max_periods.len())?;
    if max_periods.contains(&0) {
        return Err(Error::InvalidInput("period bounds must be positive".into()));
    }
    for p in period_order(max_periods) {
        if let Some(t) = try_periods(spec, &p, budget)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// True iff some pattern on `[-n; n]^d` is admissible.
pub fn has_admissible_cube(spec: &SftSpec, n: usize, budget: &mut Budget) -> Result<bool> {
    Ok(spec
        .box_csp(&SiteBox::cube(spec.dim(), n as i64))?
        .find_first(budget)?
        .is_some())
}

/// Alternates the emptiness ladder (radius `n`) with the periodic ladder
/// (tori whose largest period is `n`) for `n = 1, 2, …, max_radius`.
pub fn semidecide_empty(spec: &SftSpec, fuel: Fuel) -> Verdict {
    let mut budget = Budget::new(fuel.nodes);
    let d = spec.dim();
    for n in 1..=fuel.max_radius {
        match has_admissible_cube(spec, n, &mut budget) {
            Ok(false) => return Verdict::ProvedEmpty { n },
            Ok(true) => {}
            Err(_) => break,
        }
        let round: Vec<Vec<usize>> = period_order(&vec![n; d])
            .into_iter()
            .filter(|p| p.iter().max() == Some(&n))
            .collect();
        for p in round {
            match try_periods(spec, &p, &mut budget) {
                Ok(Some(cert)) => return Verdict::ProvedNonempty { cert },
                Ok(None) => {}
                Err(_) => {
                    return Verdict::Unknown {
                        fuel_spent: budget.spent(),
                    }
                }
            }
        }
    }
    Verdict::Unknown {
        fuel_spent: budget.spent(),
    }
}

/// A Wang tile: edge colors north, east, south, west.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WangTile {
    pub name: String,
    pub n: String,
    pub e: String,
    pub s: String,
    pub w: String,
}

/// Compiles a Wang tile set into a 2D SFT over the tile names. Axis 0 points
/// east and axis 1 points north.
pub fn wang_to_sft(tiles: &[WangTile]) -> Result<SftSpec> {
    let alphabet = Alphabet::new(tiles.iter().map(|t| t.name.clone()))?;
    let o = Site::origin(2);
    let east = Site::new(vec![1, 0]);
    let north = Site::new(vec![0, 1]);
    let mut forbidden = Vec::new();
    for (i, a) in tiles.iter().enumerate() {
        for (j, b) in tiles.iter().enumerate() {
            let (i, j) = (i as u32, j as u32);
            if a.e != b.w {
                forbidden.push(Pattern::from_cells(2, [(o.clone(), i), (east.clone(), j)])?);
            }
            if a.n != b.s {
                forbidden.push(Pattern::from_cells(2, [(o.clone(), i), (north.clone(), j)])?);
            }
        }
    }
    SftSpec::new(alphabet, 2, forbidden)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bad_tile() -> SftSpec {
        wang_to_sft(&[WangTile {
            name: "t".into(),
            n: "a".into(),
            e: "x".into(),
            s: "b".into(),
            w: "x".into(),
        }])
        .unwrap()
    }

    #[test]
    fn single_mismatched_tile_is_empty_at_radius_one() {
        assert_eq!(semidecide_empty(&bad_tile(), Fuel::new(4)), Verdict::ProvedEmpty { n: 1 });
    }

    #[test]
    fn golden_mean_2d_has_zero_fixed_point() {
        let v = semidecide_empty(&SftSpec::golden_mean(2), Fuel::new(4));
        assert_eq!(
            v,
            Verdict::ProvedNonempty {
                cert: TorusPattern::new(vec![1, 1], vec![0]).unwrap()
            }
        );
    }

    #[test]
    fn checkerboard_certificate() {
        let cb = SftSpec::checkerboard(2);
        let expected = TorusPattern::new(vec![2, 2], vec![0, 1, 1, 0]).unwrap();
        assert_eq!(
            semidecide_empty(&cb, Fuel::new(4)),
            Verdict::ProvedNonempty {
                cert: expected.clone()
            }
        );
        assert_eq!(
            search_periodic(&cb, &[1, 1], &mut Budget::unlimited()).unwrap(),
            None
        );
        assert_eq!(
            search_periodic(&cb, &[3, 3], &mut Budget::unlimited()).unwrap(),
            Some(expected.clone())
        );
        assert!(verify_torus(&cb, &expected).unwrap());
    }

    #[test]
    fn verify_torus_examples() {
        let one = TorusPattern::new(vec![1, 1], vec![1]).unwrap();
        assert!(!verify_torus(&SftSpec::golden_mean(2), &one).unwrap());
        assert!(verify_torus(&SftSpec::full_shift(2, 2), &one).unwrap());
        assert!(verify_torus(&SftSpec::golden_mean(1), &one).is_err());
    }

    #[test]
    fn forbid_everything_has_no_torus() {
        let spec = SftSpec::new(
            Alphabet::numbered(2),
            2,
            vec![
                Pattern::from_cells(2, [(Site::origin(2), 0)]).unwrap(),
                Pattern::from_cells(2, [(Site::origin(2), 1)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(search_periodic(&spec, &[3, 3], &mut Budget::unlimited()).unwrap(), None);
        assert_eq!(semidecide_empty(&spec, Fuel::new(3)), Verdict::ProvedEmpty { n: 1 });
    }

    #[test]
    fn period_order_is_by_volume() {
        let p = period_order(&[2, 2]);
        assert_eq!(p, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn exhausted_fuel_is_unknown() {
        let v = semidecide_empty(
            &SftSpec::checkerboard(2),
            Fuel {
                max_radius: 4,
                nodes: 3,
            },
        );
        assert!(matches!(v, Verdict::Unknown { .. }));
    }
}
