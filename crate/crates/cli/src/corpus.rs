//! Corpus files: named command lines with expected exit codes and report
//! fields.
//!
//! ```text
//! case golden-count
//! run count --n 5 golden-mean.sft
//! expect exit=0 count=13
//! why Fibonacci numbers by direct enumeration
//! ```
//!
//! Every case needs all four lines. Values containing spaces are written in
//! double quotes. Paths resolve against the corpus file's directory.

use std::path::Path;

use clap::Parser;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::Cli;
use crate::commands::{execute, Failure};
use crate::report::{exit, Report};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub name: String,
    pub argv: Vec<String>,
    pub exit: u8,
    pub fields: Vec<(String, String)>,
    pub why: String,
}

/// Splits on whitespace, keeping double-quoted runs together.
pub fn split_words(s: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut started = false;
    for ch in s.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                started = true;
            }
            c if c.is_whitespace() && !quoted => {
                if started {
                    out.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            c => {
                cur.push(c);
                started = true;
            }
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if started {
        out.push(cur);
    }
    Ok(out)
}

fn bad(line: usize, msg: impl Into<String>) -> Failure {
    Failure::Core(sftlab_core::Error::Parse {
        line,
        msg: msg.into(),
    })
}

pub fn parse(text: &str) -> Result<Vec<Case>, Failure> {
    #[derive(Default)]
    struct Partial {
        line: usize,
        name: String,
        argv: Option<Vec<String>>,
        expect: Option<(u8, Vec<(String, String)>)>,
        why: Option<String>,
    }
    fn close(p: Partial) -> Result<Case, Failure> {
        let missing = |what: &str| bad(p.line, format!("case {} has no `{what}` line", p.name));
        let (exit, fields) = p.expect.clone().ok_or_else(|| missing("expect"))?;
        Ok(Case {
            argv: p.argv.clone().ok_or_else(|| missing("run"))?,
            exit,
            fields,
            why: p.why.clone().ok_or_else(|| missing("why"))?,
            name: p.name,
        })
    }
    let mut cases = Vec::new();
    let mut cur: Option<Partial> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        if kw == "case" {
            if let Some(p) = cur.take() {
                cases.push(close(p)?);
            }
            if rest.is_empty() {
                return Err(bad(ln, "case needs a name"));
            }
            cur = Some(Partial {
                line: ln,
                name: rest.to_string(),
                ..Partial::default()
            });
            continue;
        }
        let p = cur.as_mut().ok_or_else(|| bad(ln, "line outside a case"))?;
        match kw {
            "run" => p.argv = Some(split_words(rest).map_err(|m| bad(ln, m))?),
            "why" if !rest.is_empty() => p.why = Some(rest.to_string()),
            "expect" => {
                let mut code = None;
                let mut fields = Vec::new();
                for w in split_words(rest).map_err(|m| bad(ln, m))? {
                    let (k, v) = w
                        .split_once('=')
                        .ok_or_else(|| bad(ln, format!("expected key=value, got {w:?}")))?;
                    if k == "exit" {
                        code = Some(v.parse().map_err(|_| bad(ln, "bad exit code"))?);
                    } else {
                        fields.push((k.to_string(), v.to_string()));
                    }
                }
                p.expect = Some((code.ok_or_else(|| bad(ln, "expect needs exit=<code>"))?, fields));
            }
            _ => return Err(bad(ln, format!("unknown directive {kw:?}"))),
        }
    }
    if let Some(p) = cur {
        cases.push(close(p)?);
    }
    Ok(cases)
}

/// Runs one case and returns the mismatches.
pub fn check(case: &Case, dir: &Path) -> Vec<String> {
    if case.argv.first().map(String::as_str) == Some("corpus") {
        return vec!["nested corpus runs are not allowed".into()];
    }
    let argv = std::iter::once("sftlab".to_string()).chain(case.argv.iter().cloned());
    let (code, report) = match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli, dir),
        Err(e) => {
            let mut r = Report::new("usage");
            r.push("message", e.to_string().lines().next().unwrap_or(""));
            (exit::USAGE, r)
        }
    };
    let mut errs = Vec::new();
    if code != case.exit {
        errs.push(format!("exit {code}, expected {}", case.exit));
    }
    for (k, v) in &case.fields {
        if !report.get_all(k).any(|got| got == v) {
            let got = report.get(k).unwrap_or("<missing>");
            errs.push(format!("{k}={got}, expected {v}"));
        }
    }
    errs
}

/// Executes all cases (in a seeded shuffled order when `SFTLAB_SEED` is set)
/// and reports them in file order.
pub fn run(text: &str, dir: &Path, mut r: Report) -> Result<(u8, Report), Failure> {
    let cases = parse(text)?;
    let mut order: Vec<usize> = (0..cases.len()).collect();
    if let Some(seed) = std::env::var("SFTLAB_SEED").ok().and_then(|s| s.parse::<u64>().ok()) {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut results = vec![Vec::new(); cases.len()];
    for i in order {
        results[i] = check(&cases[i], dir);
    }
    let failed = results.iter().filter(|e| !e.is_empty()).count();
    r.push("cases", cases.len())
        .push("passed", cases.len() - failed)
        .push("failed", failed);
    for (case, errs) in cases.iter().zip(&results) {
        if errs.is_empty() {
            r.push("case", format!("{} pass", case.name));
        } else {
            r.push("case", format!("{} FAIL {}", case.name, errs.join(", ")));
        }
    }
    Ok((if failed == 0 { exit::POSITIVE } else { exit::NEGATIVE }, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_quoted_words() {
        assert_eq!(
            split_words(r#"code apply x.code --pattern "0 1 1""#).unwrap(),
            vec!["code", "apply", "x.code", "--pattern", "0 1 1"]
        );
        assert_eq!(split_words(r#"a """#).unwrap(), vec!["a", ""]);
        assert!(split_words(r#"a "b"#).is_err());
    }

    #[test]
    fn parses_cases() {
        let text = "case a\nrun count --n 1 g.sft\nexpect exit=0 count=2\nwhy two letters\n";
        let cases = parse(text).unwrap();
        assert_eq!(cases[0].fields, vec![("count".to_string(), "2".to_string())]);
        assert!(parse("case a\nrun count\nexpect exit=0\n").is_err());
        assert!(parse("").unwrap().is_empty());
    }
}
