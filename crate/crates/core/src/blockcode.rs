//! Sliding block codes, factor verification between SFTs and finite-window
//! image languages of cellular automata.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::budget::Budget;
use crate::csp::Csp;
use crate::error::{Error, Result};
use crate::patterns::{Alphabet, Pattern, SftSpec, Site, SiteBox};

/// A map `Δ^Z^d → Σ^Z^d` given by a local rule on a finite window.
///
/// The rule table is indexed by the window contents read in canonical
/// (lexicographic) site order as a big-endian base-`|Δ|` number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockCode {
    dim: usize,
    src: Alphabet,
    dst: Alphabet,
    window: Vec<Site>,
    rule: Vec<u32>,
}

fn table_len(src: usize, window: usize) -> Result<usize> {
    u32::try_from(window)
        .ok()
        .and_then(|w| src.checked_pow(w))
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| Error::InvalidInput(format!("rule table {src}^{window} is too large")))
}

impl BlockCode {
    pub fn new(
        dim: usize,
        src: Alphabet,
        dst: Alphabet,
        window: Vec<Site>,
        rule: Vec<u32>,
    ) -> Result<Self> {
        let mut sorted = window.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::EmptySupport);
        }
        if sorted.len() != window.len() {
            return Err(Error::InvalidInput("window sites repeat".into()));
        }
        if sorted != window {
            return Err(Error::InvalidInput("window must be listed in lexicographic order".into()));
        }
        if let Some(s) = window.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        let len = table_len(src.len(), window.len())?;
        if rule.len() != len {
            return Err(Error::InvalidInput(format!(
                "rule table has {} entries, expected {len}",
                rule.len()
            )));
        }
        rule.iter().try_for_each(|&s| dst.check(s))?;
        Ok(BlockCode {
            dim,
            src,
            dst,
            window,
            rule,
        })
    }

    /// Builds the table by evaluating `f` on every window word. The window is
    /// sorted first; `f` sees symbols in sorted window order.
    pub fn from_fn(
        dim: usize,
        src: Alphabet,
        dst: Alphabet,
        mut window: Vec<Site>,
        f: impl Fn(&[u32]) -> u32,
    ) -> Result<Self> {
        window.sort();
        window.dedup();
        let len = table_len(src.len(), window.len())?;
        let k = src.len() as u32;
        let mut word = vec![0u32; window.len()];
        let mut rule = Vec::with_capacity(len);
        for _ in 0..len {
            rule.push(f(&word));
            odometer(&mut word, k);
        }
        BlockCode::new(dim, src, dst, window, rule)
    }

    pub fn identity(alphabet: Alphabet, dim: usize) -> Self {
        BlockCode::from_fn(dim, alphabet.clone(), alphabet, vec![Site::origin(dim)], |w| w[0])
            .expect("valid")
    }

    /// `(σ^u x)(v) = x(v + u)`.
    pub fn shift(alphabet: Alphabet, by: Site) -> Self {
        let dim = by.dim();
        BlockCode::from_fn(dim, alphabet.clone(), alphabet, vec![by], |w| w[0]).expect("valid")
    }

    pub fn constant(src: Alphabet, dst: Alphabet, dim: usize, symbol: u32) -> Result<Self> {
        dst.check(symbol)?;
        BlockCode::from_fn(dim, src, dst, vec![Site::origin(dim)], |_| symbol)
    }

    /// The 1D map `x(i) ⊕ x(i+1)` on `{0,1}`.
    pub fn xor() -> Self {
        let a = Alphabet::numbered(2);
        BlockCode::from_fn(
            1,
            a.clone(),
            a,
            vec![Site::new(vec![0]), Site::new(vec![1])],
            |w| w[0] ^ w[1],
        )
        .expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn src(&self) -> &Alphabet {
        &self.src
    }

    pub fn dst(&self) -> &Alphabet {
        &self.dst
    }

    pub fn window(&self) -> &[Site] {
        &self.window
    }

    pub fn rule(&self) -> &[u32] {
        &self.rule
    }

    /// Sup-norm radius of the window.
    pub fn radius(&self) -> i64 {
        self.window.iter().map(Site::norm_inf).max().unwrap_or(0)
    }

    /// Coordinate extent `max - min` of the window.
    pub fn window_size(&self) -> i64 {
        let p = Pattern::from_cells(self.dim, self.window.iter().map(|s| (s.clone(), 0)))
            .expect("nonempty window");
        p.diameter()
    }

    pub fn rule_index(&self, word: &[u32]) -> usize {
        let k = self.src.len();
        word.iter().fold(0usize, |acc, &s| acc * k + s as usize)
    }

    pub fn eval(&self, word: &[u32]) -> u32 {
        self.rule[self.rule_index(word)]
    }

    fn window_bounds(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for s in &self.window {
            for i in 0..self.dim {
                lo[i] = lo[i].min(s.coords()[i]);
                hi[i] = hi[i].max(s.coords()[i]);
            }
        }
        (lo, hi)
    }

    /// Output box `{u : u + F ⊆ b}`.
    pub fn output_box(&self, b: &SiteBox) -> Result<SiteBox> {
        let (lo, hi) = self.window_bounds();
        let olo: Vec<i64> = b.lo().coords().iter().zip(&lo).map(|(x, l)| x - l).collect();
        let ohi: Vec<i64> = b.hi().coords().iter().zip(&hi).map(|(x, h)| x - h).collect();
        SiteBox::new(Site::new(olo), Site::new(ohi)).map_err(|_| Error::EmptyOutputSupport)
    }

    /// Applies the code to values filling box `b` (lexicographic order).
    pub fn apply_box(&self, b: &SiteBox, values: &[u32]) -> Result<(SiteBox, Vec<u32>)> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.dim(),
            });
        }
        let out = self.output_box(b)?;
        let shape = b.shape();
        let mut strides = vec![1usize; self.dim];
        for i in (0..self.dim.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        // linear offset of each window site, relative to the output site
        let deltas: Vec<isize> = self
            .window
            .iter()
            .map(|s| {
                s.coords()
                    .iter()
                    .zip(&strides)
                    .map(|(&c, &st)| c as isize * st as isize)
                    .sum()
            })
            .collect();
        let k = self.src.len();
        let mut result = Vec::with_capacity(out.volume());
        for u in out.sites() {
            // u itself may lie outside b when the window misses the origin
            let base: isize = u
                .coords()
                .iter()
                .zip(b.lo().coords())
                .zip(&strides)
                .map(|((&x, &l), &st)| (x - l) as isize * st as isize)
                .sum();
            let idx = deltas
                .iter()
                .fold(0usize, |acc, &d| acc * k + values[(base + d) as usize] as usize);
            result.push(self.rule[idx]);
        }
        Ok((out, result))
    }
}

fn odometer(word: &mut [u32], k: u32) -> bool {
    for x in word.iter_mut().rev() {
        *x += 1;
        if *x < k {
            return true;
        }
        *x = 0;
    }
    false
}

/// Applies `code` to a box-shaped pattern; the result lives on the sites `u`
/// with `u + F` inside the pattern's box.
pub fn apply_to_pattern(code: &BlockCode, a: &Pattern) -> Result<Pattern> {
    if a.dim() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: a.dim(),
        });
    }
    let (b, vals) = a
        .box_values()
        .ok_or_else(|| Error::InvalidInput("pattern must fill a box".into()))?;
    a.check_alphabet(code.src())?;
    let (ob, out) = code.apply_box(&b, &vals)?;
    Ok(Pattern::from_box(&ob, &out))
}

/// `outer ∘ inner`, with window `F_outer + F_inner`.
pub fn compose(outer: &BlockCode, inner: &BlockCode) -> Result<BlockCode> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch {
            expected: outer.dim,
            found: inner.dim,
        });
    }
    if inner.dst != outer.src {
        return Err(Error::AlphabetMismatch(
            "inner destination differs from outer source".into(),
        ));
    }
    let window: BTreeSet<Site> = outer
        .window
        .iter()
        .flat_map(|o| inner.window.iter().map(move |i| o.add(i)))
        .collect();
    let window: Vec<Site> = window.into_iter().collect();
    let pos: HashMap<&Site, usize> = window.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let gather: Vec<Vec<usize>> = outer
        .window
        .iter()
        .map(|o| inner.window.iter().map(|i| pos[&o.add(i)]).collect())
        .collect();
    BlockCode::from_fn(
        outer.dim,
        inner.src.clone(),
        outer.dst.clone(),
        window.clone(),
        |w| {
            let mid: Vec<u32> = gather
                .iter()
                .map(|g| inner.eval(&g.iter().map(|&p| w[p]).collect::<Vec<_>>()))
                .collect();
            outer.eval(&mid)
        },
    )
}

/// Reusable state for checking many codes with the same window radius at the
/// same verification radius.
///
/// For a code of radius `k` the output on `[-R; R]^d` depends only on the
/// input on `[-(R+k); R+k]^d`, so the check "every admissible pattern on
/// `[-r; r]^d` maps to a dst-admissible pattern on `[-R; R]^d`" is decided by
/// scanning the admissible inner patterns and, only for those producing a bad
/// output, asking whether they extend admissibly to `[-r; r]^d`.
pub struct FactorChecker<'s> {
    src: &'s SftSpec,
    r: i64,
    k: i64,
    inner: SiteBox,
    target: SiteBox,
    dst_csp: Csp,
    patterns: Vec<Vec<u32>>,
    extendable: Vec<Option<bool>>,
    witnesses: Vec<usize>,
}

impl<'s> FactorChecker<'s> {
    pub fn new(
        src: &'s SftSpec,
        dst: &SftSpec,
        k: i64,
        r: i64,
        budget: &mut Budget,
    ) -> Result<Self> {
        if src.dim() != dst.dim() {
            return Err(Error::DimensionMismatch {
                expected: src.dim(),
                found: dst.dim(),
            });
        }
        let big_r = src.max_diameter().max(dst.max_diameter());
        if r <= big_r + k + 1 {
            return Err(Error::RadiusTooSmall {
                r,
                bound: big_r + k + 1,
            });
        }
        let d = src.dim();
        let inner = SiteBox::cube(d, big_r + k);
        let target = SiteBox::cube(d, big_r);
        let patterns = src
            .box_csp(&inner)?
            .solutions(budget)
            .collect::<Result<Vec<_>>>()?;
        let n = patterns.len();
        Ok(FactorChecker {
            src,
            r,
            k,
            inner,
            target,
            dst_csp: dst.box_csp(&SiteBox::cube(d, big_r))?,
            patterns,
            extendable: vec![None; n],
            witnesses: Vec::new(),
        })
    }

    pub fn radius(&self) -> i64 {
        self.r
    }

    fn output_ok(&self, code: &BlockCode, i: usize) -> Result<bool> {
        let (ob, out) = code.apply_box(&self.inner, &self.patterns[i])?;
        let vals: Vec<u32> = self
            .target
            .sites()
            .map(|u| out[ob.index_of(&u).expect("target inside output")])
            .collect();
        Ok(self.dst_csp.satisfies(&vals))
    }

    fn is_extendable(&mut self, i: usize, budget: &mut Budget) -> Result<bool> {
        if let Some(e) = self.extendable[i] {
            return Ok(e);
        }
        let outer = SiteBox::cube(self.src.dim(), self.r);
        let mut csp = self.src.box_csp(&outer)?;
        for (j, u) in self.inner.sites().enumerate() {
            csp.fix(outer.index_of(&u).expect("inner inside outer"), self.patterns[i][j]);
        }
        let e = csp.find_first(budget)?.is_some();
        self.extendable[i] = Some(e);
        if e {
            self.witnesses.push(i);
        }
        Ok(e)
    }

    /// Runs the check for one code. Patterns already known to extend are
    /// tried first, which rejects most bad codes immediately.
    pub fn check(&mut self, code: &BlockCode, budget: &mut Budget) -> Result<bool> {
        if code.radius() > self.k {
            return Err(Error::InvalidInput(format!(
                "code radius {} exceeds checker radius {}",
                code.radius(),
                self.k
            )));
        }
        for w in 0..self.witnesses.len() {
            let i = self.witnesses[w];
            budget.charge(1)?;
            if !self.output_ok(code, i)? {
                return Ok(false);
            }
        }
        for i in 0..self.patterns.len() {
            budget.charge(1)?;
            if self.extendable[i] == Some(true) || self.output_ok(code, i)? {
                continue;
            }
            if self.is_extendable(i, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// True iff for every src-admissible pattern on `[-r; r]^d` the image under
/// `code`, restricted to `[-R; R]^d`, is dst-admissible. Requires
/// `r > R + k + 1` where `R` is the largest forbidden diameter and `k` the
/// code's window radius.
pub fn verify_factor_step(
    src: &SftSpec,
    dst: &SftSpec,
    code: &BlockCode,
    r: i64,
    budget: &mut Budget,
) -> Result<bool> {
    check_code_alphabets(src, dst, code)?;
    FactorChecker::new(src, dst, code.radius(), r, budget)?.check(code, budget)
}

fn check_code_alphabets(src: &SftSpec, dst: &SftSpec, code: &BlockCode) -> Result<()> {
    if code.dim() != src.dim() || code.dim() != dst.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            found: code.dim(),
        });
    }
    if code.src() != src.alphabet() || code.dst() != dst.alphabet() {
        return Err(Error::AlphabetMismatch(
            "code alphabets differ from the shift alphabets".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_k: i64,
    pub max_r: i64,
    /// Total number of rule tables that may be examined.
    pub max_rules: u64,
    pub nodes: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_k: 1,
            max_r: 6,
            max_rules: 100_000,
            nodes: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorFound {
    pub code: BlockCode,
    pub k: i64,
    pub r: i64,
}

/// Searches codes on windows `[-k; k]^d` in increasing `(k, r, rule index)`
/// order. At each `(k, r)` the centre projection is tried first when the
/// target alphabet is large enough to hold it. `Ok(None)` means the bounded
/// search space was exhausted without success.
pub fn search_factor(
    src: &SftSpec,
    dst: &SftSpec,
    bounds: SearchBounds,
) -> Result<Option<FactorFound>> {
    if src.dim() != dst.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            found: dst.dim(),
        });
    }
    let d = src.dim();
    let mut budget = Budget::new(bounds.nodes);
    let mut rules_left = bounds.max_rules;
    let big_r = src.max_diameter().max(dst.max_diameter());
    let (ks, kd) = (src.alphabet().len(), dst.alphabet().len() as u32);
    for k in 0..=bounds.max_k {
        let window: Vec<Site> = SiteBox::cube(d, k).sites().collect();
        let centre = window.len() / 2;
        let len = table_len(ks, window.len())?;
        let seed = (ks as u32 <= kd).then(|| {
            BlockCode::from_fn(d, src.alphabet().clone(), dst.alphabet().clone(), window.clone(), |w| {
                w[centre]
            })
            .expect("valid table")
        });
        for r in (big_r + k + 2)..=bounds.max_r {
            let mut checker = FactorChecker::new(src, dst, k, r, &mut budget)?;
            if let Some(code) = &seed {
                take_rule(&mut rules_left, &budget)?;
                if checker.check(code, &mut budget)? {
                    return Ok(Some(FactorFound {
                        code: code.clone(),
                        k,
                        r,
                    }));
                }
            }
            let mut table = vec![0u32; len];
            loop {
                take_rule(&mut rules_left, &budget)?;
                let code = BlockCode::new(
                    d,
                    src.alphabet().clone(),
                    dst.alphabet().clone(),
                    window.clone(),
                    table.clone(),
                )?;
                if Some(&code) != seed.as_ref() && checker.check(&code, &mut budget)? {
                    return Ok(Some(FactorFound { code, k, r }));
                }
                if !odometer(&mut table, kd) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

fn take_rule(left: &mut u64, budget: &Budget) -> Result<()> {
    if *left == 0 {
        return Err(Error::BudgetExhausted {
            spent: budget.spent(),
        });
    }
    *left -= 1;
    Ok(())
}

/// A cellular automaton: a block code from a full shift to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaSpec {
    code: BlockCode,
}

impl CaSpec {
    pub fn new(code: BlockCode) -> Result<Self> {
        if code.src() != code.dst() {
            return Err(Error::AlphabetMismatch(
                "a cellular automaton needs equal source and target alphabets".into(),
            ));
        }
        Ok(CaSpec { code })
    }

    pub fn code(&self) -> &BlockCode {
        &self.code
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.code.src()
    }
}

/// Exact set of patterns on `[0; n-1]^d` occurring in `f^t(Σ^{Z^d})`.
///
/// Computed by the recursion `L_t(m) = f(L_{t-1}(m + s))`, `s` the window
/// extent, starting from all patterns; this is the image of all patterns on
/// the window inflated by `t` window extents.
pub fn ca_image_language(
    ca: &CaSpec,
    t: usize,
    n: usize,
    budget: &mut Budget,
) -> Result<BTreeSet<Pattern>> {
    if n == 0 {
        return Err(Error::InvalidInput("window length must be at least 1".into()));
    }
    let code = &ca.code;
    let d = code.dim();
    let (lo, hi) = code.window_bounds();
    let span: Vec<i64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
    let shape_at = |level: usize| -> Vec<i64> {
        span.iter().map(|s| n as i64 + s * level as i64).collect()
    };
    // level j holds the language of f^(t-j) on boxes of shape_at(j)
    let top = shape_at(t);
    let top_box = SiteBox::new(Site::origin(d), Site::new(top.iter().map(|m| m - 1).collect()))?;
    let k = code.src().len() as u32;
    let total = (k as u64)
        .checked_pow(top_box.volume() as u32)
        .ok_or(Error::BudgetExhausted {
            spent: budget.spent(),
        })?;
    budget.charge(total)?;
    let mut current: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut word = vec![0u32; top_box.volume()];
    loop {
        current.insert(word.clone());
        if !odometer(&mut word, k) {
            break;
        }
    }
    for level in (0..t).rev() {
        let shape = shape_at(level + 1);
        let in_box = SiteBox::new(
            Site::new(lo.clone()),
            Site::new(shape.iter().zip(&lo).map(|(m, l)| m - 1 + l).collect()),
        )?;
        let mut next = BTreeSet::new();
        for vals in &current {
            budget.charge(1)?;
            let (_, out) = code.apply_box(&in_box, vals)?;
            next.insert(out);
        }
        current = next;
    }
    let window = SiteBox::corner(d, n as i64);
    Ok(current.iter().map(|v| Pattern::from_box(&window, v)).collect())
}

/// Symbols whose uniform configuration is fixed by the automaton.
pub fn quiescent_fixed_points(ca: &CaSpec) -> Vec<u32> {
    let w = ca.code.window.len();
    (0..ca.alphabet().len() as u32)
        .filter(|&s| ca.code.eval(&vec![s; w]) == s)
        .collect()
}

/// Window-word counts of `code(src)` versus `src` used when comparing growth
/// rates: returns the distinct images of admissible patterns on the box
/// `[0; n + 2k - 1]^d`.
pub fn image_patterns(
    src: &SftSpec,
    code: &BlockCode,
    n: usize,
    budget: &mut Budget,
) -> Result<BTreeMap<Vec<u32>, usize>> {
    let k = code.radius();
    let bx = SiteBox::new(
        Site::new(vec![-k; src.dim()]),
        Site::new(vec![n as i64 - 1 + k; src.dim()]),
    )?;
    let window = SiteBox::corner(src.dim(), n as i64);
    let mut out = BTreeMap::new();
    for vals in src.box_csp(&bx)?.solutions(budget) {
        let vals = vals?;
        let (ob, img) = code.apply_box(&bx, &vals)?;
        let w: Vec<u32> = window.sites().map(|u| img[ob.index_of(&u).expect("inside")]).collect();
        *out.entry(w).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(n: usize) -> impl Iterator<Item = Vec<u32>> {
        (0..1u32 << n).map(move |m| (0..n).map(|i| (m >> (n - 1 - i)) & 1).collect())
    }

    #[test]
    fn window_off_the_origin() {
        let a = Alphabet::numbered(2);
        let code = BlockCode::new(1, a.clone(), a, vec![Site::new(vec![-1]), Site::new(vec![1])], vec![0, 1, 1, 0]).unwrap();
        let b = SiteBox::new(Site::new(vec![0]), Site::new(vec![3])).unwrap();
        let (out, ys) = code.apply_box(&b, &[0, 1, 1, 1]).unwrap();
        assert_eq!(out, SiteBox::new(Site::new(vec![1]), Site::new(vec![2])).unwrap());
        assert_eq!(ys, vec![1, 0]);
        let right = BlockCode::shift(Alphabet::numbered(2), Site::new(vec![2]));
        let (out, ys) = right.apply_box(&b, &[0, 0, 1, 0]).unwrap();
        assert_eq!(out, SiteBox::new(Site::new(vec![-2]), Site::new(vec![1])).unwrap());
        assert_eq!(ys, vec![0, 0, 1, 0]);
    }

    #[test]
    fn apply_examples() {
        let a = Pattern::word(&[0, 1, 1, 0]);
        let id = BlockCode::identity(Alphabet::numbered(2), 1);
        assert_eq!(apply_to_pattern(&id, &a).unwrap(), a);
        assert_eq!(
            apply_to_pattern(&BlockCode::xor(), &a).unwrap(),
            Pattern::word(&[1, 0, 1])
        );
        let c = BlockCode::constant(Alphabet::numbered(2), Alphabet::numbered(3), 1, 2).unwrap();
        assert_eq!(apply_to_pattern(&c, &a).unwrap(), Pattern::word(&[2, 2, 2, 2]));
        assert_eq!(
            apply_to_pattern(&BlockCode::xor(), &Pattern::word(&[1])),
            Err(Error::EmptyOutputSupport)
        );
    }

    #[test]
    fn compose_examples() {
        let xor = BlockCode::xor();
        let xx = compose(&xor, &xor).unwrap();
        assert_eq!(
            xx.window(),
            &[Site::new(vec![0]), Site::new(vec![1]), Site::new(vec![2])]
        );
        for w in words(3) {
            assert_eq!(xx.eval(&w), w[0] ^ w[2]);
        }
        let id = BlockCode::identity(Alphabet::numbered(2), 1);
        assert_eq!(compose(&id, &xor).unwrap(), xor);
        let s1 = BlockCode::shift(Alphabet::numbered(2), Site::new(vec![1]));
        let s2 = BlockCode::shift(Alphabet::numbered(2), Site::new(vec![2]));
        assert_eq!(compose(&s1, &s1).unwrap(), s2);
        let c3 = BlockCode::constant(Alphabet::numbered(2), Alphabet::numbered(3), 1, 0).unwrap();
        assert!(matches!(compose(&xor, &c3), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn verify_factor_examples() {
        let gm = SftSpec::golden_mean(1);
        let id = BlockCode::identity(Alphabet::numbered(2), 1);
        let mut b = Budget::unlimited();
        assert!(verify_factor_step(&gm, &gm, &id, 3, &mut b).unwrap());
        let one = BlockCode::constant(Alphabet::numbered(2), Alphabet::numbered(2), 1, 1).unwrap();
        assert!(!verify_factor_step(&gm, &gm, &one, 3, &mut b).unwrap());
        let full = SftSpec::full_shift(2, 1);
        let xor = BlockCode::xor();
        assert!(verify_factor_step(&full, &full, &xor, 3, &mut b).unwrap());
        assert!(matches!(
            verify_factor_step(&gm, &gm, &id, 2, &mut b),
            Err(Error::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn search_examples() {
        let full = SftSpec::full_shift(2, 1);
        let found = search_factor(&full, &full, SearchBounds::default()).unwrap().unwrap();
        assert_eq!(found.k, 0);
        assert_eq!(found.r, 2);
        assert_eq!(found.code, BlockCode::identity(Alphabet::numbered(2), 1));

        let gm = SftSpec::golden_mean(1);
        let point = SftSpec::full_shift(1, 1);
        let found = search_factor(&gm, &point, SearchBounds::default()).unwrap().unwrap();
        assert_eq!(found.code.rule(), &[0, 0]);

        let found = search_factor(&full, &gm, SearchBounds::default()).unwrap().unwrap();
        assert!(verify_factor_step(&full, &gm, &found.code, found.r, &mut Budget::unlimited()).unwrap());
        assert_eq!(found.code.rule(), &[0, 0]);
    }

    #[test]
    fn ca_language_examples() {
        let a = Alphabet::numbered(2);
        let id = CaSpec::new(BlockCode::identity(a.clone(), 1)).unwrap();
        let mut b = Budget::unlimited();
        assert_eq!(ca_image_language(&id, 3, 3, &mut b).unwrap().len(), 8);
        let zero = CaSpec::new(BlockCode::constant(a.clone(), a.clone(), 1, 0).unwrap()).unwrap();
        let lang = ca_image_language(&zero, 1, 4, &mut b).unwrap();
        assert_eq!(lang.into_iter().collect::<Vec<_>>(), vec![Pattern::word(&[0; 4])]);
        let xor = CaSpec::new(BlockCode::xor()).unwrap();
        assert_eq!(ca_image_language(&xor, 3, 4, &mut b).unwrap().len(), 16);
    }

    #[test]
    fn fixed_points() {
        let a = Alphabet::numbered(2);
        assert_eq!(quiescent_fixed_points(&CaSpec::new(BlockCode::xor()).unwrap()), vec![0]);
        assert_eq!(
            quiescent_fixed_points(&CaSpec::new(BlockCode::identity(a.clone(), 1)).unwrap()),
            vec![0, 1]
        );
        let one = CaSpec::new(BlockCode::constant(a.clone(), a, 1, 1).unwrap()).unwrap();
        assert_eq!(quiescent_fixed_points(&one), vec![1]);
    }
}
