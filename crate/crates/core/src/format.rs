//! Line-oriented text formats. `#` starts a comment; blank lines are ignored.
//! Every writer emits the canonical form, and parsing it back yields an
//! equal value.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::attractor::{Affine, MapExpr, TrapRegion};
use crate::blockcode::BlockCode;
use crate::dyadic::{Dyadic, DyadicCell, Interval};
use crate::eds::{ClopenPartition, CylinderPattern, GenCylinder, ScriptedEnumerator, StageSet};
use crate::error::{Error, Result};
use crate::multidim::{TorusPattern, WangTile};
use crate::patterns::{Alphabet, Pattern, SftSpec, Site};

/// Non-blank lines with comments removed, paired with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Attaches a line number to errors raised by constructors.
fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    })
}

fn keyword<'a>(line: usize, l: &'a str, kw: &str) -> Result<&'a str> {
    match l.split_once(char::is_whitespace) {
        Some((k, rest)) if k == kw => Ok(rest.trim()),
        None if l == kw => Ok(""),
        _ => Err(perr(line, format!("expected `{kw}`"))),
    }
}

fn int<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| perr(line, format!("bad number {s:?}")))
}

pub fn parse_site(line: usize, s: &str) -> Result<Site> {
    let coords = s
        .split(',')
        .map(|c| int::<i64>(line, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Site::new(coords))
}

fn write_site(s: &Site) -> String {
    s.to_string()
}

fn expect_dim(line: usize, s: &Site, dim: usize) -> Result<()> {
    if s.dim() != dim {
        return Err(perr(line, format!("site {s} is not {dim}-dimensional")));
    }
    Ok(())
}

/// Reads the `dim <d>` header.
fn header_dim(it: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(usize, usize)> {
    let (ln, l) = it.next().ok_or_else(|| perr(0, "missing `dim` header"))?;
    let d: usize = int(ln, keyword(ln, l, "dim")?)?;
    if d == 0 {
        return Err(perr(ln, "dimension must be positive"));
    }
    Ok((ln, d))
}

fn parse_alphabet(line: usize, rest: &str) -> Result<Alphabet> {
    at(line, Alphabet::new(rest.split_whitespace()))
}

/// SFT: `dim`, `alphabet`, then `forbid` blocks of `site x1,...,xd = symbol`.
pub fn parse_sft(text: &str) -> Result<SftSpec> {
    let mut it = lines(text);
    let (_, dim) = header_dim(&mut it)?;
    let (ln, l) = it.next().ok_or_else(|| perr(0, "missing `alphabet`"))?;
    let alphabet = parse_alphabet(ln, keyword(ln, l, "alphabet")?)?;
    let mut blocks: Vec<(usize, BTreeMap<Site, u32>)> = Vec::new();
    for (ln, l) in it {
        if l == "forbid" {
            blocks.push((ln, BTreeMap::new()));
            continue;
        }
        let rest = keyword(ln, l, "site")?;
        let (site, sym) = rest
            .split_once('=')
            .ok_or_else(|| perr(ln, "expected `site <coords> = <symbol>`"))?;
        let site = parse_site(ln, site)?;
        expect_dim(ln, &site, dim)?;
        let sym = alphabet
            .index_of(sym.trim())
            .ok_or_else(|| perr(ln, format!("unknown symbol {:?}", sym.trim())))?;
        let (_, cells) = blocks
            .last_mut()
            .ok_or_else(|| perr(ln, "`site` outside a `forbid` block"))?;
        if cells.insert(site, sym).is_some() {
            return Err(perr(ln, "site repeated within a pattern"));
        }
    }
    let mut pats = Vec::new();
    for (ln, cells) in blocks {
        if cells.is_empty() {
            return Err(perr(ln, "empty `forbid` block"));
        }
        pats.push(at(ln, Pattern::new(dim, cells))?);
    }
    at(0, SftSpec::new(alphabet, dim, pats))
}

pub fn write_sft(spec: &SftSpec) -> String {
    let mut out = format!(
        "dim {}\nalphabet {}\n",
        spec.dim(),
        spec.alphabet().symbols().join(" ")
    );
    for p in spec.forbidden() {
        out.push_str("forbid\n");
        for (s, v) in p.cells() {
            let _ = writeln!(out, "site {} = {}", write_site(s), spec.alphabet().name(v));
        }
    }
    out
}

/// Wang tiles: `tile <name> n=<c> e=<c> s=<c> w=<c>`.
pub fn parse_wang(text: &str) -> Result<Vec<WangTile>> {
    lines(text)
        .map(|(ln, l)| {
            let rest = keyword(ln, l, "tile")?;
            let mut parts = rest.split_whitespace();
            let name = parts.next().ok_or_else(|| perr(ln, "missing tile name"))?;
            let mut sides: BTreeMap<&str, String> = BTreeMap::new();
            for p in parts {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| perr(ln, format!("expected side=color, got {p:?}")))?;
                if !matches!(k, "n" | "e" | "s" | "w") || v.is_empty() {
                    return Err(perr(ln, format!("bad side {p:?}")));
                }
                if sides.insert(k, v.to_string()).is_some() {
                    return Err(perr(ln, format!("side {k} repeated")));
                }
            }
            let mut side = |k: &str| {
                sides
                    .remove(k)
                    .ok_or_else(|| perr(ln, format!("missing side {k}")))
            };
            Ok(WangTile {
                name: name.to_string(),
                n: side("n")?,
                e: side("e")?,
                s: side("s")?,
                w: side("w")?,
            })
        })
        .collect()
}

pub fn write_wang(tiles: &[WangTile]) -> String {
    tiles
        .iter()
        .map(|t| format!("tile {} n={} e={} s={} w={}\n", t.name, t.n, t.e, t.s, t.w))
        .collect()
}

/// Block code: `dim`, `src`, `dst`, `window <site> <site> ...`, then one
/// `map <word> -> <symbol>` line per window word, the word listing source
/// symbols in window order.
pub fn parse_block_code(text: &str) -> Result<BlockCode> {
    let mut it = lines(text);
    let (_, dim) = header_dim(&mut it)?;
    let mut next = |kw: &str| -> Result<(usize, String)> {
        let (ln, l) = it
            .next()
            .ok_or_else(|| perr(0, format!("missing `{kw}`")))?;
        Ok((ln, keyword(ln, l, kw)?.to_string()))
    };
    let (ln, s) = next("src")?;
    let src = parse_alphabet(ln, &s)?;
    let (ln, s) = next("dst")?;
    let dst = parse_alphabet(ln, &s)?;
    let (wln, s) = next("window")?;
    let window = s
        .split_whitespace()
        .map(|w| {
            let site = parse_site(wln, w)?;
            expect_dim(wln, &site, dim)?;
            Ok(site)
        })
        .collect::<Result<Vec<_>>>()?;
    let w = window.len() as u32;
    let size = (src.len() as u64)
        .checked_pow(w)
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| perr(wln, "rule table is too large"))? as usize;
    let mut rule: Vec<Option<u32>> = vec![None; size];
    for (ln, l) in it {
        let rest = keyword(ln, l, "map")?;
        let (word, out) = rest
            .split_once("->")
            .ok_or_else(|| perr(ln, "expected `map <word> -> <symbol>`"))?;
        let word: Vec<&str> = word.split_whitespace().collect();
        if word.len() != window.len() {
            return Err(perr(ln, format!("word has {} symbols, window has {w}", word.len())));
        }
        let mut idx = 0usize;
        for s in word {
            let v = src
                .index_of(s)
                .ok_or_else(|| perr(ln, format!("unknown source symbol {s:?}")))?;
            idx = idx * src.len() + v as usize;
        }
        let out = dst
            .index_of(out.trim())
            .ok_or_else(|| perr(ln, format!("unknown target symbol {:?}", out.trim())))?;
        if rule[idx].replace(out).is_some() {
            return Err(perr(ln, "word mapped twice"));
        }
    }
    let rule = rule
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| perr(0, "rule table is incomplete"))?;
    at(wln, BlockCode::new(dim, src, dst, window, rule))
}

pub fn write_block_code(code: &BlockCode) -> String {
    let window: Vec<String> = code.window().iter().map(write_site).collect();
    let mut out = format!(
        "dim {}\nsrc {}\ndst {}\nwindow {}\n",
        code.dim(),
        code.src().symbols().join(" "),
        code.dst().symbols().join(" "),
        window.join(" ")
    );
    let k = code.src().len();
    let w = code.window().len();
    for (idx, &v) in code.rule().iter().enumerate() {
        let mut word = vec![0usize; w];
        let mut r = idx;
        for slot in word.iter_mut().rev() {
            *slot = r % k;
            r /= k;
        }
        let word: Vec<&str> = word.iter().map(|&s| code.src().name(s as u32)).collect();
        let _ = writeln!(out, "map {} -> {}", word.join(" "), code.dst().name(v));
    }
    out
}

/// Torus certificate: `torus <p1>x<p2>... [c c ...]` with cells in
/// lexicographic order of the fundamental domain.
pub fn parse_torus(text: &str) -> Result<TorusPattern> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| perr(0, "missing `torus` line"))?;
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "trailing content after certificate"));
    }
    let rest = keyword(ln, l, "torus")?;
    let (periods, cells) = rest
        .split_once('[')
        .ok_or_else(|| perr(ln, "expected `[cells]`"))?;
    let cells = cells
        .trim()
        .strip_suffix(']')
        .ok_or_else(|| perr(ln, "missing `]`"))?;
    let periods = periods
        .trim()
        .split('x')
        .map(|p| int::<usize>(ln, p))
        .collect::<Result<Vec<_>>>()?;
    let cells = cells
        .split_whitespace()
        .map(|c| int::<u32>(ln, c))
        .collect::<Result<Vec<_>>>()?;
    at(ln, TorusPattern::new(periods, cells))
}

pub fn write_torus(t: &TorusPattern) -> String {
    format!("{t}\n")
}

/// `site x1,...,xd : bit i = v, bit j = w` (the pattern may be empty).
fn parse_site_line(ln: usize, l: &str, dim: usize) -> Result<(Site, CylinderPattern)> {
    let rest = keyword(ln, l, "site")?;
    let (site, bits) = rest
        .split_once(':')
        .ok_or_else(|| perr(ln, "expected `site <coords> : <bits>`"))?;
    let site = parse_site(ln, site)?;
    expect_dim(ln, &site, dim)?;
    let mut pat = BTreeMap::new();
    for b in bits.split(',').map(str::trim).filter(|b| !b.is_empty()) {
        let b = keyword(ln, b, "bit")?;
        let (i, v) = b
            .split_once('=')
            .ok_or_else(|| perr(ln, "expected `bit <i> = <v>`"))?;
        let i: u64 = int(ln, i)?;
        let v = match v.trim() {
            "0" => false,
            "1" => true,
            other => return Err(perr(ln, format!("bit value {other:?} is not 0 or 1"))),
        };
        if pat.insert(i, v).is_some() {
            return Err(perr(ln, format!("bit {i} repeated")));
        }
    }
    Ok((site, CylinderPattern::new(pat)))
}

fn write_site_line(out: &mut String, s: &Site, p: &CylinderPattern) {
    let _ = write!(out, "site {} :", write_site(s));
    for (k, (i, v)) in p.bits().enumerate() {
        let sep = if k == 0 { " " } else { ", " };
        let _ = write!(out, "{sep}bit {i} = {}", u8::from(v));
    }
    out.push('\n');
}

fn push_cell(
    ln: usize,
    cur: &mut Option<(usize, BTreeMap<Site, CylinderPattern>)>,
    site: Site,
    pat: CylinderPattern,
) -> Result<()> {
    let (_, cells) = cur
        .as_mut()
        .ok_or_else(|| perr(ln, "`site` outside a block"))?;
    if cells.insert(site, pat).is_some() {
        return Err(perr(ln, "site repeated within a cylinder"));
    }
    Ok(())
}

fn finish(dim: usize, cur: Option<(usize, BTreeMap<Site, CylinderPattern>)>) -> Result<Option<GenCylinder>> {
    match cur {
        None => Ok(None),
        Some((ln, cells)) if cells.is_empty() => Err(perr(ln, "block has no sites")),
        Some((ln, cells)) => at(ln, GenCylinder::new(dim, cells)).map(Some),
    }
}

/// A list of generalized cylinders: `dim`, then `cylinder` blocks of site
/// lines.
pub fn parse_cylinders(text: &str) -> Result<(usize, Vec<GenCylinder>)> {
    let mut it = lines(text);
    let (_, dim) = header_dim(&mut it)?;
    let mut out = Vec::new();
    let mut cur = None;
    for (ln, l) in it {
        if l == "cylinder" {
            out.extend(finish(dim, cur.take())?);
            cur = Some((ln, BTreeMap::new()));
        } else {
            let (s, p) = parse_site_line(ln, l, dim)?;
            push_cell(ln, &mut cur, s, p)?;
        }
    }
    out.extend(finish(dim, cur)?);
    Ok((dim, out))
}

pub fn write_cylinders(dim: usize, cyls: &[GenCylinder]) -> String {
    let mut out = format!("dim {dim}\n");
    for g in cyls {
        out.push_str("cylinder\n");
        for (s, p) in g.cells() {
            write_site_line(&mut out, s, p);
        }
    }
    out
}

pub fn parse_stage(text: &str) -> Result<StageSet> {
    let (dim, cyls) = parse_cylinders(text)?;
    at(0, StageSet::new(dim, cyls))
}

pub fn write_stage(s: &StageSet) -> String {
    write_cylinders(s.dim(), s.excluded())
}

/// Enumerator script: `dim`, then `emit <stamp>` blocks of site lines.
pub fn parse_script(text: &str) -> Result<ScriptedEnumerator> {
    let mut it = lines(text);
    let (_, dim) = header_dim(&mut it)?;
    let mut out = Vec::new();
    let mut cur = None;
    let mut stamp = 0u64;
    for (ln, l) in it {
        if let Ok(rest) = keyword(ln, l, "emit") {
            if let Some(g) = finish(dim, cur.take())? {
                out.push((stamp, g));
            }
            stamp = int(ln, rest)?;
            if stamp == 0 {
                return Err(perr(ln, "emission stamps start at 1"));
            }
            cur = Some((ln, BTreeMap::new()));
        } else {
            let (s, p) = parse_site_line(ln, l, dim)?;
            push_cell(ln, &mut cur, s, p)?;
        }
    }
    if let Some(g) = finish(dim, cur)? {
        out.push((stamp, g));
    }
    at(0, ScriptedEnumerator::new(dim, out))
}

pub fn write_script(e: &ScriptedEnumerator) -> String {
    use crate::eds::Enumerator;
    let mut out = format!("dim {}\n", e.dim());
    for (stamp, g) in e.emissions() {
        let _ = writeln!(out, "emit {stamp}");
        for (s, p) in g.cells() {
            write_site_line(&mut out, s, p);
        }
    }
    out
}

/// Clopen partition: `dim`, then `part <symbol>` blocks, each one
/// generalized cylinder; repeated symbols take the union.
pub fn parse_partition(text: &str) -> Result<ClopenPartition> {
    let mut it = lines(text);
    let (_, dim) = header_dim(&mut it)?;
    let mut parts: BTreeMap<u32, Vec<GenCylinder>> = BTreeMap::new();
    let mut cur = None;
    let mut sym = 0u32;
    for (ln, l) in it {
        if let Ok(rest) = keyword(ln, l, "part") {
            if let Some(g) = finish(dim, cur.take())? {
                parts.entry(sym).or_default().push(g);
            }
            sym = int(ln, rest)?;
            cur = Some((ln, BTreeMap::new()));
        } else {
            let (s, p) = parse_site_line(ln, l, dim)?;
            push_cell(ln, &mut cur, s, p)?;
        }
    }
    if let Some(g) = finish(dim, cur)? {
        parts.entry(sym).or_default().push(g);
    }
    at(0, ClopenPartition::new(dim, parts))
}

pub fn write_partition(p: &ClopenPartition) -> String {
    let mut out = format!("dim {}\n", p.dim());
    for (sym, gs) in p.parts() {
        for g in gs {
            let _ = writeln!(out, "part {sym}");
            for (s, c) in g.cells() {
                write_site_line(&mut out, s, c);
            }
        }
    }
    out
}

/// `cell <level> <k1>,...,<kd>`.
pub fn parse_cell_line(ln: usize, l: &str) -> Result<DyadicCell> {
    let rest = keyword(ln, l, "cell")?;
    let (level, corner) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| perr(ln, "expected `cell <level> <corner>`"))?;
    let level: u32 = int(ln, level)?;
    if level > 60 {
        return Err(perr(ln, "cell level above 60"));
    }
    let corner = parse_site(ln, corner)?;
    Ok(DyadicCell::new(level, corner.coords().to_vec()))
}

pub fn parse_cell(text: &str) -> Result<DyadicCell> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| perr(0, "missing `cell` line"))?;
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "expected a single cell"));
    }
    parse_cell_line(ln, l)
}

pub fn write_cell(c: &DyadicCell) -> String {
    format!("{c}\n")
}

/// Trap region: one `cell` line per cell.
pub fn parse_trap(text: &str) -> Result<TrapRegion> {
    let cells = lines(text)
        .map(|(ln, l)| parse_cell_line(ln, l))
        .collect::<Result<Vec<_>>>()?;
    at(0, TrapRegion::new(cells))
}

pub fn write_trap(t: &TrapRegion) -> String {
    t.cells().iter().map(write_cell).collect()
}

fn parse_dyadics(ln: usize, s: &str) -> Result<Vec<Dyadic>> {
    s.split_whitespace()
        .map(|t| at(ln, t.parse::<Dyadic>()))
        .collect()
}

/// Map description: a sequence of blocks joined by `then` lines, applied in
/// order. Blocks are `spiral`, `unit-spiral`, or
///
/// ```text
/// affine
/// dim <d>
/// row <a11> ... <a1d>        (d rows)
/// offset <c1> ... <cd>
/// domain <lo> <hi>           (d lines)
/// ```
pub fn parse_map(text: &str) -> Result<MapExpr> {
    let all: Vec<(usize, &str)> = lines(text).collect();
    let mut parts = Vec::new();
    for chunk in all.split(|(_, l)| *l == "then") {
        let Some(&(ln, head)) = chunk.first() else {
            return Err(perr(0, "empty map block"));
        };
        let part = match head {
            "spiral" | "unit-spiral" => {
                if let Some((ln, _)) = chunk.get(1) {
                    return Err(perr(*ln, format!("`{head}` takes no parameters")));
                }
                if head == "spiral" { MapExpr::Spiral } else { MapExpr::UnitSpiral }
            }
            "affine" => parse_affine(&chunk[1..], ln)?,
            other => return Err(perr(ln, format!("unknown map {other:?}"))),
        };
        parts.push(part);
    }
    if let Some(d) = parts.first().map(crate::attractor::IntervalMap::dim) {
        use crate::attractor::IntervalMap;
        if let Some(p) = parts.iter().find(|p| p.dim() != d) {
            return Err(perr(0, format!("map dimensions differ: {d} and {}", p.dim())));
        }
    }
    Ok(match parts.len() {
        0 => return Err(perr(0, "no map given")),
        1 => parts.pop().expect("one part"),
        _ => MapExpr::Compose(parts),
    })
}

fn parse_affine(body: &[(usize, &str)], head: usize) -> Result<MapExpr> {
    let mut it = body.iter().copied();
    let (_, d) = header_dim(&mut it)?;
    let mut take = |kw: &str| -> Result<(usize, Vec<Dyadic>)> {
        let (ln, l) = it.next().ok_or_else(|| perr(head, format!("missing `{kw}`")))?;
        let v = parse_dyadics(ln, keyword(ln, l, kw)?)?;
        if kw != "domain" && v.len() != d {
            return Err(perr(ln, format!("`{kw}` needs {d} entries")));
        }
        Ok((ln, v))
    };
    let mut matrix = Vec::new();
    for _ in 0..d {
        matrix.push(take("row")?.1);
    }
    let offset = take("offset")?.1;
    let mut domain = Vec::new();
    for _ in 0..d {
        let (ln, v) = take("domain")?;
        match v.as_slice() {
            [lo, hi] if lo <= hi => domain.push(Interval::new(lo.clone(), hi.clone())),
            _ => return Err(perr(ln, "`domain` needs `lo hi` with lo ≤ hi")),
        }
    }
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "unexpected line in affine block"));
    }
    Ok(MapExpr::Affine(at(head, Affine::new(matrix, offset, domain))?))
}

pub fn write_map(m: &MapExpr) -> String {
    match m {
        MapExpr::Spiral => "spiral\n".into(),
        MapExpr::UnitSpiral => "unit-spiral\n".into(),
        MapExpr::Compose(parts) => parts
            .iter()
            .map(write_map)
            .collect::<Vec<_>>()
            .join("then\n"),
        MapExpr::Affine(a) => {
            let join = |v: &[Dyadic]| v.iter().map(Dyadic::to_string).collect::<Vec<_>>().join(" ");
            let mut out = format!("affine\ndim {}\n", a.offset.len());
            for row in &a.matrix {
                let _ = writeln!(out, "row {}", join(row));
            }
            let _ = writeln!(out, "offset {}", join(&a.offset));
            for iv in &a.domain {
                let _ = writeln!(out, "domain {} {}", iv.lo, iv.hi);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sft_round_trip_and_errors() {
        let gm = SftSpec::golden_mean(2);
        assert_eq!(parse_sft(&write_sft(&gm)).unwrap(), gm);
        let text = "# golden mean\ndim 1\nalphabet a b\nforbid\nsite 0 = b\nsite 1 = b\n";
        let s = parse_sft(text).unwrap();
        assert_eq!(s.forbidden().len(), 1);
        assert!(matches!(
            parse_sft("dim 1\nalphabet a\nforbid\nsite 0 = z\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_sft("dim 1\nalphabet a\nsite 0 = a\n").is_err());
    }

    #[test]
    fn block_code_round_trip() {
        let code = BlockCode::xor();
        assert_eq!(parse_block_code(&write_block_code(&code)).unwrap(), code);
        let partial = "dim 1\nsrc 0 1\ndst 0 1\nwindow 0\nmap 0 -> 1\n";
        assert!(parse_block_code(partial).is_err());
    }

    #[test]
    fn cylinders_and_scripts() {
        let text = "dim 1\nemit 1\nsite 0 : bit 0 = 0\nemit 2\nsite 0 : bit 0 = 1\nsite 1 :\n";
        let e = parse_script(text).unwrap();
        assert_eq!(e.emissions().len(), 2);
        assert_eq!(parse_script(&write_script(&e)).unwrap(), e);
        let stage = StageSet::new(1, e.emissions().iter().map(|(_, g)| g.clone())).unwrap();
        assert_eq!(parse_stage(&write_stage(&stage)).unwrap(), stage);
    }

    #[test]
    fn partition_round_trip() {
        let p = ClopenPartition::by_bit(2, 3);
        assert_eq!(parse_partition(&write_partition(&p)).unwrap(), p);
    }

    #[test]
    fn maps_and_cells() {
        let text = "affine\ndim 1\nrow 1/2\noffset 0\ndomain -2 2\nthen\naffine\ndim 1\nrow 1\noffset 1/4\ndomain -2 2\n";
        let m = parse_map(text).unwrap();
        assert!(matches!(&m, MapExpr::Compose(p) if p.len() == 2));
        assert_eq!(parse_map(&write_map(&m)).unwrap(), m);
        assert_eq!(parse_map("spiral\n").unwrap(), MapExpr::Spiral);
        assert!(parse_map("spiral\nthen\naffine\ndim 1\nrow 1\noffset 0\ndomain 0 1\n").is_err());
        let c = DyadicCell::new(3, vec![-2, 5]);
        assert_eq!(parse_cell(&write_cell(&c)).unwrap(), c);
        let t = parse_trap("cell 1 -1\ncell 1 0\n").unwrap();
        assert_eq!(parse_trap(&write_trap(&t)).unwrap(), t);
    }
}
