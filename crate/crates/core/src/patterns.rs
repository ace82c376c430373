//! Alphabets, sites, finite patterns and forbidden-pattern specifications.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::budget::Budget;
use crate::csp::{Csp, SearchState};
use crate::error::{Error, Result};

/// Finite ordered alphabet. Symbols are identified with `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad symbol name {s:?}")));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet `{0, 1, …, k-1}` with decimal names.
    pub fn numbered(k: usize) -> Self {
        assert!(k > 0, "alphabet must be nonempty");
        Alphabet {
            symbols: (0..k).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, symbol: u32) -> &str {
        &self.symbols[symbol as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.symbols.iter().position(|s| s == name).map(|i| i as u32)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// True when every symbol name is a single character, so words can be
    /// written without separators.
    pub fn is_compact(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    pub fn check(&self, symbol: u32) -> Result<()> {
        if (symbol as usize) < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidSymbol {
                symbol,
                size: self.len(),
            })
        }
    }
}

/// A point of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(Vec<i64>);

impl Site {
    pub fn new(coords: Vec<i64>) -> Self {
        Site(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Site(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Site {
        Site(self.0.iter().map(|a| a * k).collect())
    }

    /// Sup norm.
    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }
}

impl From<Vec<i64>> for Site {
    fn from(v: Vec<i64>) -> Self {
        Site(v)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Axis-aligned box `lo ≤ u ≤ hi` in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteBox {
    lo: Site,
    hi: Site,
}

impl SiteBox {
    pub fn new(lo: Site, hi: Site) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                found: hi.dim(),
            });
        }
        if lo.dim() == 0 {
            return Err(Error::InvalidBox("dimension must be positive".into()));
        }
        if lo.0.iter().zip(&hi.0).any(|(a, b)| a > b) {
            return Err(Error::InvalidBox(format!("lo {lo} exceeds hi {hi}")));
        }
        Ok(SiteBox { lo, hi })
    }

    /// `[-n; n]^d`.
    pub fn cube(dim: usize, n: i64) -> Self {
        SiteBox::new(Site(vec![-n; dim]), Site(vec![n; dim])).expect("valid cube")
    }

    /// `[0; n-1]^d`.
    pub fn corner(dim: usize, n: i64) -> Self {
        SiteBox::new(Site(vec![0; dim]), Site(vec![n - 1; dim])).expect("valid box")
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &Site {
        &self.lo
    }

    pub fn hi(&self) -> &Site {
        &self.hi
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo
            .0
            .iter()
            .zip(&self.hi.0)
            .map(|(a, b)| (b - a + 1) as usize)
            .collect()
    }

    pub fn volume(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn contains(&self, u: &Site) -> bool {
        u.dim() == self.dim()
            && u
                .0
                .iter()
                .zip(self.lo.0.iter().zip(&self.hi.0))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    pub fn contains_box(&self, other: &SiteBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Row-major index of `u` (first coordinate most significant), matching
    /// the lexicographic order of [`SiteBox::sites`].
    pub fn index_of(&self, u: &Site) -> Option<usize> {
        if !self.contains(u) {
            return None;
        }
        let shape = self.shape();
        let mut idx = 0usize;
        for (i, x) in u.0.iter().enumerate() {
            idx = idx * shape[i] + (x - self.lo.0[i]) as usize;
        }
        Some(idx)
    }

    pub fn site_at(&self, mut idx: usize) -> Site {
        let shape = self.shape();
        let mut c = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            c[i] = self.lo.0[i] + (idx % shape[i]) as i64;
            idx /= shape[i];
        }
        Site(c)
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.volume()).map(move |i| self.site_at(i))
    }

    pub fn translate(&self, u: &Site) -> SiteBox {
        SiteBox {
            lo: self.lo.add(u),
            hi: self.hi.add(u),
        }
    }

    /// Grows (or with negative `by`, shrinks) every side by `by`.
    pub fn inflate(&self, by: i64) -> Option<SiteBox> {
        let lo = Site(self.lo.0.iter().map(|a| a - by).collect());
        let hi = Site(self.hi.0.iter().map(|a| a + by).collect());
        SiteBox::new(lo, hi).ok()
    }
}

impl fmt::Display for SiteBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]..[{}]", self.lo, self.hi)
    }
}

/// Finite coloring of sites of `Z^d` by symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    dim: usize,
    cells: BTreeMap<Site, u32>,
}

impl Pattern {
    pub fn new(dim: usize, cells: BTreeMap<Site, u32>) -> Result<Self> {
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
        Ok(Pattern { dim, cells })
    }

    pub fn from_cells(dim: usize, cells: impl IntoIterator<Item = (Site, u32)>) -> Result<Self> {
        Pattern::new(dim, cells.into_iter().collect())
    }

    /// A one-dimensional word placed at sites `0..len`.
    pub fn word(symbols: &[u32]) -> Self {
        assert!(!symbols.is_empty(), "word must be nonempty");
        Pattern {
            dim: 1,
            cells: symbols
                .iter()
                .enumerate()
                .map(|(i, &s)| (Site(vec![i as i64]), s))
                .collect(),
        }
    }

    /// A pattern filling `b`, with values listed in lexicographic site order.
    pub fn from_box(b: &SiteBox, values: &[u32]) -> Self {
        assert_eq!(values.len(), b.volume(), "value count must match box volume");
        Pattern {
            dim: b.dim(),
            cells: b.sites().zip(values.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, u: &Site) -> Option<u32> {
        self.cells.get(u).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Site, u32)> {
        self.cells.iter().map(|(s, &v)| (s, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &Site> {
        self.cells.keys()
    }

    /// Lexicographically least site of the support.
    pub fn min_site(&self) -> &Site {
        self.cells.keys().next().expect("nonempty support")
    }

    pub fn translate(&self, u: &Site) -> Pattern {
        Pattern {
            dim: self.dim,
            cells: self.cells.iter().map(|(s, &v)| (s.add(u), v)).collect(),
        }
    }

    /// Translate so that the lexicographic minimum of the support is the origin.
    pub fn normalized(&self) -> Pattern {
        let m = self.min_site().clone();
        self.translate(&Site(m.0.iter().map(|x| -x).collect()))
    }

    /// Smallest box containing the support.
    pub fn bounding_box(&self) -> SiteBox {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for s in self.cells.keys() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(s.0[i]);
                hi[i] = hi[i].max(s.0[i]);
            }
        }
        SiteBox::new(Site(lo), Site(hi)).expect("nonempty support")
    }

    /// Largest coordinate extent `max - min` over all axes.
    pub fn diameter(&self) -> i64 {
        let b = self.bounding_box();
        b.shape().iter().map(|&w| w as i64 - 1).max().unwrap_or(0)
    }

    /// True when the support is exactly its bounding box.
    pub fn is_box(&self) -> bool {
        self.bounding_box().volume() == self.len()
    }

    /// Values in lexicographic order of the bounding box, when the pattern
    /// fills it.
    pub fn box_values(&self) -> Option<(SiteBox, Vec<u32>)> {
        if !self.is_box() {
            return None;
        }
        Some((self.bounding_box(), self.cells.values().copied().collect()))
    }

    pub fn restrict(&self, keep: impl Fn(&Site) -> bool) -> Option<Pattern> {
        let cells: BTreeMap<_, _> = self
            .cells
            .iter()
            .filter(|(s, _)| keep(s))
            .map(|(s, &v)| (s.clone(), v))
            .collect();
        (!cells.is_empty()).then_some(Pattern {
            dim: self.dim,
            cells,
        })
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        self.cells.values().try_for_each(|&v| alphabet.check(v))
    }
}

/// A shift of finite type: all configurations avoiding a finite list of
/// forbidden patterns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SftSpec {
    alphabet: Alphabet,
    dim: usize,
    forbidden: Vec<Pattern>,
}

impl SftSpec {
    /// Validates the forbidden list and stores it in translation-normal form,
    /// sorted and deduplicated.
    pub fn new(alphabet: Alphabet, dim: usize, forbidden: Vec<Pattern>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for p in forbidden {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            p.check_alphabet(&alphabet)?;
            set.insert(p.normalized());
        }
        Ok(SftSpec {
            alphabet,
            dim,
            forbidden: set.into_iter().collect(),
        })
    }

    pub fn full_shift(k: usize, dim: usize) -> Self {
        SftSpec::new(Alphabet::numbered(k), dim, Vec::new()).expect("valid")
    }

    /// Binary configurations with no two adjacent ones along any axis.
    pub fn golden_mean(dim: usize) -> Self {
        SftSpec::new(Alphabet::numbered(2), dim, adjacent_pairs(dim, |a, b| a == 1 && b == 1))
            .expect("valid")
    }

    /// Binary configurations whose adjacent sites always differ.
    pub fn checkerboard(dim: usize) -> Self {
        SftSpec::new(Alphabet::numbered(2), dim, adjacent_pairs(dim, |a, b| a == b))
            .expect("valid")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// Largest diameter among forbidden patterns (0 when there are none).
    pub fn max_diameter(&self) -> i64 {
        self.forbidden.iter().map(Pattern::diameter).max().unwrap_or(0)
    }

    fn check_dim(&self, p: &Pattern) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(())
    }

    /// Builds the search problem "fill `b` admissibly". Variable `i` is the
    /// `i`-th site of `b` in lexicographic order.
    pub fn box_csp(&self, b: &SiteBox) -> Result<Csp> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.dim(),
            });
        }
        let mut csp = Csp::new(b.volume(), self.alphabet.len() as u32);
        for f in &self.forbidden {
            let fb = f.bounding_box();
            // offsets u with fb + u inside b
            let lo = b.lo().sub(fb.lo());
            let hi = b.hi().sub(fb.hi());
            let Ok(offsets) = SiteBox::new(lo, hi) else {
                continue;
            };
            for u in offsets.sites() {
                let ng = f
                    .cells()
                    .map(|(s, v)| (b.index_of(&s.add(&u)).expect("inside box"), v))
                    .collect();
                csp.forbid(ng);
            }
        }
        Ok(csp)
    }
}

fn adjacent_pairs(dim: usize, bad: impl Fn(u32, u32) -> bool) -> Vec<Pattern> {
    let mut out = Vec::new();
    for axis in 0..dim {
        let mut e = vec![0; dim];
        e[axis] = 1;
        for a in 0..2 {
            for b in 0..2 {
                if bad(a, b) {
                    out.push(
                        Pattern::from_cells(dim, [(Site::origin(dim), a), (Site(e.clone()), b)])
                            .expect("nonempty"),
                    );
                }
            }
        }
    }
    out
}

/// True iff `b` translated by `u` matches `a` everywhere on its support.
pub fn appears_at(a: &Pattern, b: &Pattern, u: &Site) -> Result<bool> {
    if a.dim() != b.dim() || u.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: if a.dim() != b.dim() { b.dim() } else { u.dim() },
        });
    }
    let mut all = true;
    for (v, sym) in b.cells() {
        match a.get(&v.add(u)) {
            None => return Err(Error::SupportNotContained),
            Some(x) if x != sym => all = false,
            Some(_) => {}
        }
    }
    Ok(all)
}

/// Same as [`appears_at`] but treats an uncontained placement as "does not
/// appear".
fn appears_inside(a: &Pattern, b: &Pattern, u: &Site) -> bool {
    b.cells().all(|(v, sym)| a.get(&v.add(u)) == Some(sym))
}

/// True iff no forbidden pattern of `spec` appears anywhere inside `a`.
pub fn is_admissible(a: &Pattern, spec: &SftSpec) -> Result<bool> {
    spec.check_dim(a)?;
    for b in spec.forbidden() {
        let origin = b.min_site();
        for s in a.support() {
            let u = s.sub(origin);
            if appears_inside(a, b, &u) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Stream of admissible patterns on a box in lexicographic order of their
/// value vectors. On budget exhaustion it yields one `Err` and stops.
pub struct AdmissibleIter<'b> {
    bx: SiteBox,
    csp: Csp,
    state: SearchState,
    budget: &'b mut Budget,
}

impl Iterator for AdmissibleIter<'_> {
    type Item = Result<Pattern>;

    fn next(&mut self) -> Option<Self::Item> {
        self.state
            .next(&self.csp, self.budget)
            .map(|r| r.map(|vals| Pattern::from_box(&self.bx, &vals)))
    }
}

pub fn enumerate_admissible<'b>(
    spec: &SftSpec,
    bx: &SiteBox,
    budget: &'b mut Budget,
) -> Result<AdmissibleIter<'b>> {
    let csp = spec.box_csp(bx)?;
    Ok(AdmissibleIter {
        bx: bx.clone(),
        state: SearchState::new(csp.num_vars()),
        csp,
        budget,
    })
}

/// Number of admissible patterns on `[0; n-1]^d`.
pub fn count_admissible(spec: &SftSpec, n: usize, budget: &mut Budget) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("side length must be at least 1".into()));
    }
    spec.box_csp(&SiteBox::corner(spec.dim(), n as i64))?
        .count(budget)
}

/// `log(count_admissible(n)) / n^d`; `-inf` when nothing is admissible.
pub fn entropy_upper(spec: &SftSpec, n: usize, budget: &mut Budget) -> Result<f64> {
    let count = count_admissible(spec, n, budget)?;
    let vol = (n as f64).powi(spec.dim() as i32);
    Ok(if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).ln() / vol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin_words(n: usize) -> Vec<Vec<u32>> {
        (0..1u32 << n)
            .map(|m| (0..n).map(|i| (m >> (n - 1 - i)) & 1).collect())
            .collect()
    }

    #[test]
    fn appears_at_word_examples() {
        let a = Pattern::word(&[0, 1, 1]);
        let b = Pattern::word(&[1, 1]);
        assert!(appears_at(&a, &b, &Site::new(vec![1])).unwrap());
        assert!(!appears_at(&a, &b, &Site::new(vec![0])).unwrap());
        assert_eq!(
            appears_at(&a, &b, &Site::new(vec![2])),
            Err(Error::SupportNotContained)
        );
        let c = Pattern::from_box(&SiteBox::corner(2, 2), &[0, 1, 1, 0]);
        assert!(matches!(
            appears_at(&c, &b, &Site::new(vec![0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn appears_at_singleton_on_checkerboard() {
        let a = Pattern::from_box(&SiteBox::corner(2, 2), &[0, 1, 1, 0]);
        let zero = Pattern::from_cells(2, [(Site::origin(2), 0)]).unwrap();
        assert!(appears_at(&a, &zero, &Site::new(vec![0, 0])).unwrap());
        assert!(!appears_at(&a, &zero, &Site::new(vec![0, 1])).unwrap());
    }

    #[test]
    fn golden_mean_admissibility() {
        let gm = SftSpec::golden_mean(1);
        assert!(is_admissible(&Pattern::word(&[0, 1, 0]), &gm).unwrap());
        assert!(!is_admissible(&Pattern::word(&[0, 1, 1, 0]), &gm).unwrap());
        let ok = bin_words(3)
            .iter()
            .filter(|w| is_admissible(&Pattern::word(w), &gm).unwrap())
            .count();
        assert_eq!(ok, 5);
    }

    #[test]
    fn forbidden_list_is_normalized_and_deduplicated() {
        let p = Pattern::from_cells(1, [(Site::new(vec![5]), 1), (Site::new(vec![6]), 1)]).unwrap();
        let spec = SftSpec::new(Alphabet::numbered(2), 1, vec![p, Pattern::word(&[1, 1])]).unwrap();
        assert_eq!(spec.forbidden(), &[Pattern::word(&[1, 1])]);
        assert!(SftSpec::new(Alphabet::numbered(2), 1, vec![Pattern::word(&[2])]).is_err());
    }

    #[test]
    fn enumerate_small_cases() {
        let gm = SftSpec::golden_mean(1);
        let mut budget = Budget::unlimited();
        let got: Vec<Pattern> = enumerate_admissible(&gm, &SiteBox::corner(1, 3), &mut budget)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        let expected: Vec<Pattern> = bin_words(3)
            .into_iter()
            .map(|w| Pattern::word(&w))
            .filter(|p| is_admissible(p, &gm).unwrap())
            .collect();
        assert_eq!(got, expected);

        let free = SftSpec::full_shift(2, 1);
        assert_eq!(count_admissible(&free, 1, &mut budget).unwrap(), 2);

        let none = SftSpec::new(
            Alphabet::numbered(2),
            1,
            vec![Pattern::word(&[0]), Pattern::word(&[1])],
        )
        .unwrap();
        assert_eq!(count_admissible(&none, 1, &mut budget).unwrap(), 0);
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let gm = SftSpec::golden_mean(1);
        let counts: Vec<u64> = (1..=5)
            .map(|n| count_admissible(&gm, n, &mut Budget::unlimited()).unwrap())
            .collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13]);
    }

    #[test]
    fn checkerboard_two_by_two() {
        let cb = SftSpec::checkerboard(2);
        assert_eq!(count_admissible(&cb, 2, &mut Budget::unlimited()).unwrap(), 2);
    }

    #[test]
    fn full_shift_counts() {
        for k in 1..4usize {
            let spec = SftSpec::full_shift(k, 1);
            for n in 1..5 {
                assert_eq!(
                    count_admissible(&spec, n, &mut Budget::unlimited()).unwrap(),
                    (k as u64).pow(n as u32)
                );
            }
        }
    }

    #[test]
    fn enumeration_budget_yields_prefix_then_error() {
        let spec = SftSpec::full_shift(2, 1);
        let mut budget = Budget::new(20);
        let items: Vec<_> = enumerate_admissible(&spec, &SiteBox::corner(1, 6), &mut budget)
            .unwrap()
            .collect();
        let (ok, err): (Vec<_>, Vec<_>) = items.into_iter().partition(|r| r.is_ok());
        assert_eq!(err.len(), 1);
        assert!(ok.len() < 64);
    }

    #[test]
    fn box_indexing_round_trips() {
        let b = SiteBox::new(Site::new(vec![-1, 2]), Site::new(vec![1, 4])).unwrap();
        for (i, s) in b.sites().enumerate() {
            assert_eq!(b.index_of(&s), Some(i));
        }
        assert_eq!(b.volume(), 9);
    }
}
