use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use sftlab_core::attractor::{
    approx_image, enumerate_forbidden_cylinders, semidecide_cell_avoids_attractor, Disjointness,
    IntervalOracle,
};
use sftlab_core::blockcode::{
    ca_image_language, search_factor, verify_factor_step, CaSpec, SearchBounds,
};
use sftlab_core::eds::{guarded_stage, product_stage, universal_stage, verify_partition_factor, Enumerator, StageSet};
use sftlab_core::format;
use sftlab_core::multidim::{semidecide_empty, verify_torus, wang_to_sft, Fuel, Verdict};
use sftlab_core::onedim::{emptiness_report, periodic_point_1d, DEFAULT_BIT_CAP};
use sftlab_core::patterns::{count_admissible, entropy_upper, Alphabet, SftSpec, Site, SiteBox};
use sftlab_core::{Budget, Error};

use crate::args::{AttractorCommand, CaCommand, Cli, CodeCommand, Command, CorpusCommand, EdsCommand};
use crate::report::{digest, exit, Report};

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io { path: PathBuf, msg: String },
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(u8, Report), Failure>;

/// Per-run state: where relative paths resolve and which bytes were read.
pub struct Ctx {
    base: PathBuf,
    inputs: Vec<Vec<u8>>,
    pub nodes: u64,
}

impl Ctx {
    pub fn new(base: &Path, nodes: u64) -> Self {
        Ctx {
            base: base.to_path_buf(),
            inputs: Vec::new(),
            nodes,
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn read(&mut self, p: &Path) -> Result<String, Failure> {
        let path = self.resolve(p);
        let bytes = fs::read(&path).map_err(|e| Failure::Io {
            path: p.to_path_buf(),
            msg: e.to_string(),
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Io {
            path: p.to_path_buf(),
            msg: "not valid UTF-8".into(),
        })?;
        self.inputs.push(bytes);
        Ok(text)
    }

    fn budget(&self) -> Budget {
        Budget::new(self.nodes)
    }
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CheckEmpty1d { .. } => "check-empty-1d",
        Command::CheckEmpty { .. } => "check-empty",
        Command::VerifyCert { .. } => "verify-cert",
        Command::Count { .. } => "count",
        Command::Code(CodeCommand::Apply { .. }) => "code apply",
        Command::Code(CodeCommand::Verify { .. }) => "code verify",
        Command::Code(CodeCommand::Search { .. }) => "code search",
        Command::Ca(CaCommand::Limit { .. }) => "ca limit",
        Command::Eds(EdsCommand::Stage { .. }) => "eds stage",
        Command::Eds(EdsCommand::Product { .. }) => "eds product",
        Command::Eds(EdsCommand::Universal { .. }) => "eds universal",
        Command::Eds(EdsCommand::VerifyPartition { .. }) => "eds verify-partition",
        Command::Attractor(AttractorCommand::Image { .. }) => "attractor image",
        Command::Attractor(AttractorCommand::TestCell { .. }) => "attractor test-cell",
        Command::Attractor(AttractorCommand::Encode { .. }) => "attractor encode",
        Command::Corpus(CorpusCommand::Run { .. }) => "corpus run",
    }
}

/// Runs a parsed command line; paths resolve against `base`.
pub fn execute(cli: &Cli, base: &Path) -> (u8, Report) {
    let name = command_name(&cli.command);
    let mut ctx = Ctx::new(base, cli.nodes);
    let (code, mut report) = match dispatch(&cli.command, &mut ctx, name) {
        Ok(r) => r,
        Err(f) => failure_report(name, f),
    };
    report.push("inputs", digest(&ctx.inputs));
    (code, report)
}

pub fn failure_report(name: &str, f: Failure) -> (u8, Report) {
    let mut r = Report::new(name);
    let code = match f {
        Failure::Io { path, msg } => {
            r.push("error", "io").push("path", path.display()).push("message", msg);
            exit::DATA
        }
        Failure::Usage(msg) => {
            r.push("error", "usage").push("message", msg);
            exit::USAGE
        }
        Failure::Core(e) => {
            let (kind, code) = classify(&e);
            r.push("error", kind);
            if let Error::Parse { line, msg } = &e {
                r.push("line", line).push("message", msg);
            } else {
                r.push("message", &e);
            }
            code
        }
    };
    (code, r)
}

fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::BudgetExhausted { .. } | Error::SupportCapExceeded { .. } => ("budget", exit::UNKNOWN),
        Error::RadiusTooSmall { .. } | Error::DimensionMismatch { .. } => ("usage", exit::USAGE),
        Error::Parse { .. } => ("format", exit::DATA),
        _ => ("input", exit::DATA),
    }
}

fn words(alphabet: &Alphabet, values: &[u32]) -> String {
    values
        .iter()
        .map(|&v| alphabet.name(v))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses either a Wang tile list or an SFT description.
fn load_shift(text: &str) -> Result<(SftSpec, bool), Failure> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("tile ") {
        Ok((wang_to_sft(&format::parse_wang(text)?)?, true))
    } else {
        Ok((format::parse_sft(text)?, false))
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx, name: &str) -> Outcome {
    let mut r = Report::new(name);
    match cmd {
        Command::CheckEmpty1d { file } => {
            let spec = format::parse_sft(&ctx.read(file)?)?;
            if spec.dim() != 1 {
                return Err(Failure::Usage(format!("input is {}-dimensional", spec.dim())));
            }
            let rep = emptiness_report(&spec);
            r.push("empty", rep.empty)
                .push("vertices", rep.vertices)
                .push("edges", rep.edges)
                .push("essential", rep.essential);
            if rep.empty {
                r.push("trace_length", rep.prune_rounds);
                return Ok((exit::NEGATIVE, r));
            }
            let w = periodic_point_1d(&spec)?.expect("nonempty shift has a periodic point");
            r.push("period", w.period)
                .push("word", words(spec.alphabet(), &w.word));
            Ok((exit::POSITIVE, r))
        }
        Command::CheckEmpty { dim, fuel, file } => {
            let (spec, wang) = load_shift(&ctx.read(file)?)?;
            if let Some(d) = dim {
                if *d != spec.dim() {
                    return Err(Failure::Usage(format!(
                        "--dim {d} but the input is {}-dimensional",
                        spec.dim()
                    )));
                }
            }
            r.push("input_kind", if wang { "wang" } else { "sft" });
            let verdict = semidecide_empty(
                &spec,
                Fuel {
                    max_radius: *fuel,
                    nodes: ctx.nodes,
                },
            );
            Ok(match verdict {
                Verdict::ProvedEmpty { n } => {
                    r.push("verdict", format!("ProvedEmpty{{n={n}}}"));
                    (exit::NEGATIVE, r)
                }
                Verdict::ProvedNonempty { cert } => {
                    r.push("verdict", "ProvedNonempty").push("cert", &cert);
                    (exit::POSITIVE, r)
                }
                Verdict::Unknown { fuel_spent } => {
                    r.push("verdict", format!("Unknown{{fuel_spent={fuel_spent}}}"));
                    (exit::UNKNOWN, r)
                }
            })
        }
        Command::VerifyCert { sft, cert } => {
            let (spec, _) = load_shift(&ctx.read(sft)?)?;
            let cert = format::parse_torus(&ctx.read(cert)?)?;
            let ok = verify_torus(&spec, &cert)?;
            r.push("valid", ok);
            Ok((if ok { exit::POSITIVE } else { exit::NEGATIVE }, r))
        }
        Command::Count { n, entropy, file } => {
            let (spec, _) = load_shift(&ctx.read(file)?)?;
            let mut b = ctx.budget();
            r.push("n", n).push("count", count_admissible(&spec, *n, &mut b)?);
            if *entropy {
                r.push("entropy_upper", format!("{:.6}", entropy_upper(&spec, *n, &mut b)?));
            }
            r.push("nodes", b.spent());
            Ok((exit::POSITIVE, r))
        }
        Command::Code(c) => code(c, ctx, r),
        Command::Ca(CaCommand::Limit {
            code,
            steps,
            window,
        }) => {
            let ca = CaSpec::new(format::parse_block_code(&ctx.read(code)?)?)?;
            let mut b = ctx.budget();
            let mut prev: Option<BTreeSet<_>> = None;
            let mut nested = true;
            for t in 0..=*steps {
                let lang = ca_image_language(&ca, t, *window, &mut b)?;
                r.push(&format!("size_t{t}"), lang.len());
                if let Some(p) = &prev {
                    nested &= lang.is_subset(p);
                }
                prev = Some(lang);
            }
            r.push("nested", nested);
            for p in prev.expect("at least one step") {
                let vals: Vec<u32> = p.cells().map(|(_, v)| v).collect();
                r.push("word", words(ca.alphabet(), &vals));
            }
            r.push("nodes", b.spent());
            Ok((exit::POSITIVE, r))
        }
        Command::Eds(c) => eds(c, ctx, r),
        Command::Attractor(c) => attractor(c, ctx, r),
        Command::Corpus(CorpusCommand::Run { file }) => {
            let text = ctx.read(file)?;
            let dir = ctx
                .resolve(file)
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default();
            crate::corpus::run(&text, &dir, r)
        }
    }
}

fn parse_shape(s: &str) -> Result<Vec<usize>, Failure> {
    s.split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Failure::Usage(format!("bad shape {s:?}")))
        })
        .collect()
}

fn code(c: &CodeCommand, ctx: &mut Ctx, mut r: Report) -> Outcome {
    match c {
        CodeCommand::Apply {
            code,
            pattern,
            shape,
        } => {
            let code = format::parse_block_code(&ctx.read(code)?)?;
            let values = pattern
                .split_whitespace()
                .map(|s| {
                    code.src()
                        .index_of(s)
                        .ok_or_else(|| Failure::Usage(format!("unknown symbol {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let shape = match shape {
                Some(s) => parse_shape(s)?,
                None => vec![values.len()],
            };
            if shape.len() != code.dim() || shape.iter().product::<usize>() != values.len() {
                return Err(Failure::Usage("pattern does not fill the given shape".into()));
            }
            let hi = Site::new(shape.iter().map(|&s| s as i64 - 1).collect());
            let b = SiteBox::new(Site::origin(code.dim()), hi)?;
            let (out, vals) = code.apply_box(&b, &values)?;
            r.push("image_box", &out).push("image", words(code.dst(), &vals));
            Ok((exit::POSITIVE, r))
        }
        CodeCommand::Verify { code, pair, r: rad } => {
            let code = format::parse_block_code(&ctx.read(code)?)?;
            let src = format::parse_sft(&ctx.read(&pair.src)?)?;
            let dst = format::parse_sft(&ctx.read(&pair.dst)?)?;
            let big_r = src.max_diameter().max(dst.max_diameter());
            let rad = rad.unwrap_or(big_r + code.radius() + 2);
            let mut b = ctx.budget();
            let ok = verify_factor_step(&src, &dst, &code, rad, &mut b)?;
            r.push("r", rad).push("verified", ok).push("nodes", b.spent());
            Ok((if ok { exit::POSITIVE } else { exit::NEGATIVE }, r))
        }
        CodeCommand::Search {
            pair,
            max_k,
            max_r,
            max_rules,
        } => {
            let src = format::parse_sft(&ctx.read(&pair.src)?)?;
            let dst = format::parse_sft(&ctx.read(&pair.dst)?)?;
            let bounds = SearchBounds {
                max_k: *max_k,
                max_r: *max_r,
                max_rules: *max_rules,
                nodes: ctx.nodes,
            };
            match search_factor(&src, &dst, bounds)? {
                Some(found) => {
                    r.push("found", true).push("k", found.k).push("r", found.r);
                    for line in format::write_block_code(&found.code).lines() {
                        r.push("code", line);
                    }
                    Ok((exit::POSITIVE, r))
                }
                None => {
                    r.push("found", false);
                    Ok((exit::UNKNOWN, r))
                }
            }
        }
    }
}

fn load_scripts(ctx: &mut Ctx, paths: &[PathBuf]) -> Result<Vec<sftlab_core::eds::ScriptedEnumerator>, Failure> {
    paths
        .iter()
        .map(|p| Ok(format::parse_script(&ctx.read(p)?)?))
        .collect()
}

fn push_stage(r: &mut Report, s: &StageSet) {
    r.push("excluded", s.len());
    for g in s.excluded() {
        r.push("cylinder", g);
    }
}

fn eds(c: &EdsCommand, ctx: &mut Ctx, mut r: Report) -> Outcome {
    match c {
        EdsCommand::Stage { script, k, guard } => {
            let e = format::parse_script(&ctx.read(script)?)?;
            let stage = if *guard {
                let g = guarded_stage(&e, *k, DEFAULT_BIT_CAP)?;
                r.push("used", g.used).push(
                    "guard_fired",
                    g.fired_at.map_or("none".to_string(), |j| j.to_string()),
                );
                g.stage
            } else {
                StageSet::new(e.dim(), e.step(*k)?)?
            };
            push_stage(&mut r, &stage);
            if stage.dim() == 1 {
                let empty = stage.defines_empty_1d(DEFAULT_BIT_CAP)?;
                r.push("empty", empty);
                if empty {
                    return Ok((exit::NEGATIVE, r));
                }
            }
            Ok((exit::POSITIVE, r))
        }
        EdsCommand::Product { scripts, k } => {
            let lanes = load_scripts(ctx, scripts)?;
            let refs: Vec<&dyn Enumerator> = lanes.iter().map(|e| e as &dyn Enumerator).collect();
            push_stage(&mut r, &product_stage(&refs, *k)?);
            Ok((exit::POSITIVE, r))
        }
        EdsCommand::Universal { scripts, k, cap } => {
            let lanes = load_scripts(ctx, scripts)?;
            let refs: Vec<&dyn Enumerator> = lanes.iter().map(|e| e as &dyn Enumerator).collect();
            let u = universal_stage(*k, &refs, *cap)?;
            for (n, g) in u.lanes.iter().enumerate() {
                let fired = g.fired_at.map_or("none".to_string(), |j| j.to_string());
                r.push(
                    "lane",
                    format!("{n} used={} guard_fired={fired} excluded={}", g.used, g.stage.len()),
                );
            }
            push_stage(&mut r, &u.product);
            Ok((exit::POSITIVE, r))
        }
        EdsCommand::VerifyPartition {
            stage,
            partition,
            dst,
            n,
            r: rad,
        } => {
            let stage = format::parse_stage(&ctx.read(stage)?)?;
            let part = format::parse_partition(&ctx.read(partition)?)?;
            let dst = format::parse_sft(&ctx.read(dst)?)?;
            let mut b = ctx.budget();
            let ok = verify_partition_factor(&stage, &part, &dst, *n, *rad, &mut b)?;
            r.push("verified", ok).push("nodes", b.spent());
            Ok((if ok { exit::POSITIVE } else { exit::NEGATIVE }, r))
        }
    }
}

fn attractor(c: &AttractorCommand, ctx: &mut Ctx, mut r: Report) -> Outcome {
    match c {
        AttractorCommand::Image { map, cell, n } => {
            let oracle = IntervalOracle::new(format::parse_map(&ctx.read(map)?)?);
            let cell = format::parse_cell(&ctx.read(cell)?)?;
            let mut b = ctx.budget();
            let pts = approx_image(&oracle, &cell, *n, &mut b)?;
            r.push("points", pts.len());
            for p in &pts {
                let c: Vec<String> = p.iter().map(ToString::to_string).collect();
                r.push("point", format!("({})", c.join(", ")));
            }
            r.push("nodes", b.spent());
            Ok((exit::POSITIVE, r))
        }
        AttractorCommand::TestCell {
            map,
            trap,
            cell,
            fuel,
            validate,
        } => {
            let oracle = IntervalOracle::new(format::parse_map(&ctx.read(map)?)?);
            let trap = format::parse_trap(&ctx.read(trap)?)?;
            let cell = format::parse_cell(&ctx.read(cell)?)?;
            let mut b = ctx.budget();
            trap.validate(&oracle, *validate, &mut b)?;
            let v = semidecide_cell_avoids_attractor(&oracle, &trap, &cell, *fuel, &mut b)?;
            let code = match v {
                Disjointness::ProvedDisjoint { n } => {
                    r.push("verdict", format!("ProvedDisjoint{{n={n}}}"));
                    exit::POSITIVE
                }
                Disjointness::Unknown { fuel } => {
                    r.push("verdict", format!("Unknown{{fuel={fuel}}}"));
                    exit::UNKNOWN
                }
            };
            r.push("nodes", b.spent());
            Ok((code, r))
        }
        AttractorCommand::Encode {
            map,
            trap,
            fuel,
            depth_cap,
            validate,
            out,
        } => {
            let oracle = IntervalOracle::new(format::parse_map(&ctx.read(map)?)?);
            let trap = format::parse_trap(&ctx.read(trap)?)?;
            let mut b = ctx.budget();
            trap.validate(&oracle, *validate, &mut b)?;
            let cyls = enumerate_forbidden_cylinders(&oracle, &trap, *fuel, *depth_cap, &mut b)?;
            r.push("emitted", cyls.len());
            for g in &cyls {
                r.push("cylinder", g);
            }
            if let Some(path) = out {
                let path = ctx.resolve(path);
                fs::write(&path, format::write_cylinders(1, &cyls)).map_err(|e| Failure::Io {
                    path: path.clone(),
                    msg: e.to_string(),
                })?;
            }
            r.push("nodes", b.spent());
            Ok((exit::POSITIVE, r))
        }
    }
}
