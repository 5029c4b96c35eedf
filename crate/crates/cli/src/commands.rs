use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use trilab::borel::{rat, BorelSet, Rational};
use trilab::nestlab::{
    cell_profile, cell_values, is_larson_member, liminal, membership, member, nonclosure, nonsimple,
    product_inequality_cells, random_upper_triangular, rinf_seminorm, rinf_witness, Axis, BlockOperator, BlockSet,
    LinkOperator, MembershipReport, ModelSpace, ProductInequality, SeminormProfile,
};
use trilab::tsys::{
    build_example, check_extended, check_triangular, complete_to_maximal, cuts, is_maximal, parse_system,
    upper_triangular_empty_cut, AnySystem, AxiomReport, CheckMode, Cut, CutCase, ExampleKind, ExampleSpec,
    ExtTriSystem, MaximalityMode, SystemDoc,
};

use crate::args::{DemoKind, Format, GlobalOpts, Mode, Side, Witness};
use crate::report::{RunConfig, Sink, DEFAULT_C};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("read {}", path.display()))
}

fn load_system(path: &Path) -> Result<AnySystem> {
    parse_system(&read(path)?).with_context(|| format!("parse {}", path.display()))
}

fn load_extended(path: &Path) -> Result<ExtTriSystem> {
    Ok(match load_system(path)? {
        AnySystem::Extended(sys) => sys,
        AnySystem::Triangular(base) => ExtTriSystem::with_empty_cut(base),
    })
}

fn load_op(space: &ModelSpace, path: &Path) -> Result<BlockOperator> {
    let links = LinkOperator::from_json(space, &read(path)?).with_context(|| format!("parse {}", path.display()))?;
    Ok(links.to_operator())
}

fn space(cfg: &RunConfig) -> Result<ModelSpace> {
    Ok(ModelSpace::new(cfg.m, cfg.k, cfg.c)?)
}

fn json_only(cfg: &RunConfig) -> Result<()> {
    if cfg.format == Format::Csv {
        bail!("`{}` reports are JSON only; csv is available for `lab seminorm`", cfg.command);
    }
    Ok(())
}

fn links_value(links: &LinkOperator) -> Value {
    serde_json::from_str(&links.to_json()).expect("link JSON round-trips")
}

#[derive(Serialize)]
struct CheckResult {
    kind: &'static str,
    mode: CheckMode,
    size: usize,
    report: AxiomReport,
}

pub fn check(opts: &GlobalOpts, path: &Path, mode: Option<Mode>, sink: &Sink) -> Result<bool> {
    let mut cfg = RunConfig::new("check", opts)?;
    json_only(&cfg)?;
    cfg.input(path);
    let (kind, mode, size, report) = match (load_system(path)?, mode) {
        (AnySystem::Triangular(t), None | Some(Mode::Triangular)) => {
            ("triangular", CheckMode::Triangular, t.size(), check_triangular(&t))
        }
        (AnySystem::Triangular(_), Some(_)) => bail!("{} has no R/C sets to check", path.display()),
        (AnySystem::Extended(e), m) => {
            let mode = match m {
                Some(Mode::Triangular) => CheckMode::Triangular,
                Some(Mode::Nearly) => CheckMode::Nearly,
                None | Some(Mode::Extended) => CheckMode::Extended,
            };
            ("extended", mode, e.size(), check_extended(&e, mode))
        }
    };
    cfg.k = size;
    let passed = report.passed;
    sink.json(&cfg, passed, &CheckResult { kind, mode, size, report })?;
    Ok(passed)
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum CompleteResult {
    /// Nearly triangular but failing `R_i ∩ C_j ⊆ S_ij`.
    NotExtended { violations: AxiomReport },
    Completed { passes: usize, changed: bool, mode: MaximalityMode, maximality: AxiomReport, system: SystemDoc },
}

pub fn complete(opts: &GlobalOpts, path: &Path, sink: &Sink) -> Result<bool> {
    let mut cfg = RunConfig::new("complete", opts)?;
    json_only(&cfg)?;
    cfg.input(path);
    let sys = load_extended(path)?;
    cfg.k = sys.size();
    let nearly = check_extended(&sys, CheckMode::Nearly);
    if let Some(v) = nearly.violations.first() {
        bail!("input is not nearly triangular: axiom {} fails for {:?} on {}", v.axiom, v.indices, v.cell);
    }
    let ext = check_extended(&sys, CheckMode::Extended);
    if !ext.passed {
        sink.json(&cfg, false, &CompleteResult::NotExtended { violations: ext })?;
        return Ok(false);
    }
    let done = complete_to_maximal(&sys)?;
    let mode = MaximalityMode::for_kind(sys.template().kind);
    let maximality = is_maximal(&done.system, mode)?;
    let mut text = done.system.to_json();
    text.push('\n');
    sink.file("completed.json", &text)?;
    let passed = maximality.passed;
    let result = CompleteResult::Completed {
        passes: done.passes,
        changed: done.system != sys,
        mode,
        maximality,
        system: SystemDoc::from(&done.system),
    };
    sink.json(&cfg, passed, &result)?;
    Ok(passed)
}

pub fn seminorm(
    opts: &GlobalOpts,
    op: &Path,
    rows: &[usize],
    cols: &[usize],
    limit: Option<(Side, usize)>,
    sink: &Sink,
) -> Result<bool> {
    let mut cfg = RunConfig::new("lab seminorm", opts)?;
    cfg.input(op);
    let sp = space(&cfg)?;
    let x = load_op(&sp, op)?;
    let profile = match limit {
        Some((side, index)) => {
            let axis = match side {
                Side::Row => Axis::Row,
                Side::Col => Axis::Col,
            };
            let mut all = SeminormProfile { w_floor: cfg.w_floor, rows: Vec::new() };
            for q in 0..sp.m {
                all.append(liminal(&x, axis, index, q, cfg.w_floor)?);
            }
            all
        }
        None => {
            let pick = |v: &[usize]| if v.is_empty() { sp.all_blocks() } else { v.to_vec() };
            cell_profile(&x, &BlockSet { rows: pick(rows), cols: pick(cols) }, cfg.w_floor)?
        }
    };
    match cfg.format {
        Format::Csv => sink.csv(&cfg, &profile.to_csv())?,
        Format::Json => sink.json(&cfg, true, &profile)?,
    }
    Ok(true)
}

pub fn lab_membership(opts: &GlobalOpts, system: &Path, op: &Path, sink: &Sink) -> Result<bool> {
    let mut cfg = RunConfig::new("lab membership", opts)?;
    json_only(&cfg)?;
    cfg.input(system);
    cfg.input(op);
    let sys = load_extended(system)?;
    cfg.k = opts.k.unwrap_or(sys.size());
    let sp = space(&cfg)?.with_template(sys.template().clone())?;
    let x = load_op(&sp, op)?;
    let report = membership(&x, &sys, cfg.tol, cfg.eta(), cfg.w_floor)?;
    sink.json(&cfg, report.member, &report)?;
    Ok(report.member)
}

#[derive(Serialize)]
struct NonclosureResult {
    i: usize,
    j: usize,
    /// Links of X and Y with both ends in one cell (none means every
    /// single-cell compression vanishes).
    within_cell_links: [usize; 2],
    max_cell_seminorm: [f64; 2],
    min_product_seminorm: f64,
    profile: SeminormProfile,
    x: Value,
    y: Value,
}

#[derive(Serialize)]
struct RinfRow {
    s_min: usize,
    cell: usize,
    value: f64,
}

#[derive(Serialize)]
struct RinfResult {
    set: BorelSet,
    j: usize,
    depth: usize,
    w_floor: usize,
    /// Links landing in each block.
    links_per_block: Vec<usize>,
    values: Vec<RinfRow>,
    t: Value,
}

#[derive(Serialize)]
struct NonsimpleResult {
    /// `M_n^⊥ X M_n` is in the Larson ideal, for `n = 1..k−1`.
    corners_larson: Vec<bool>,
    membership: MembershipReport,
    x: Value,
}

/// Rounds away float noise below `1e-12` for human-facing lines.
fn tidy(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

pub fn witness(opts: &GlobalOpts, which: &Witness, sink: &Sink) -> Result<bool> {
    match which {
        Witness::Nonclosure { i, j } => {
            let mut cfg = RunConfig::new("lab witness nonclosure", opts)?;
            json_only(&cfg)?;
            if opts.c.is_none() {
                cfg.c = DEFAULT_C.max(cfg.m.saturating_sub(2));
            }
            let sp = space(&cfg)?;
            let (x, y) = nonclosure(&sp, *i, *j)?;
            let within = |l: &LinkOperator| l.links().iter().filter(|l| l.cell_span() == 1).count();
            let all = BlockSet::all(&sp);
            let peak = |l: &LinkOperator| -> Result<f64> {
                Ok(cell_values(&l.to_operator(), &all, 1)?.into_iter().fold(0.0, f64::max))
            };
            let product = x.compose(&y)?.to_operator();
            let profile = cell_profile(&product, &BlockSet::entry(*i, *j), 3)?;
            let min = profile.values().into_iter().fold(f64::INFINITY, f64::min);
            let result = NonclosureResult {
                i: *i,
                j: *j,
                within_cell_links: [within(&x), within(&y)],
                max_cell_seminorm: [peak(&x)?, peak(&y)?],
                min_product_seminorm: min,
                profile,
                x: links_value(&x),
                y: links_value(&y),
            };
            let passed = result.within_cell_links == [0, 0] && min >= 1.0 - 1e-9;
            eprintln!("min over cells of i(E{i} XY E{j}, w=3) = {:?}", tidy(min));
            sink.file("x.json", &(x.to_json() + "\n"))?;
            sink.file("y.json", &(y.to_json() + "\n"))?;
            sink.file("profile.csv", &result.profile.to_csv())?;
            sink.json(&cfg, passed, &result)?;
            Ok(passed)
        }
        Witness::Rinf { set, j, depth } => {
            let mut cfg = RunConfig::new("lab witness rinf", opts)?;
            json_only(&cfg)?;
            let depth = depth.unwrap_or(cfg.k);
            if opts.c.is_none() {
                cfg.c = DEFAULT_C.max(depth);
            }
            let sp = space(&cfg)?;
            let j = j.unwrap_or(cfg.k.saturating_sub(1));
            let set = parse_interval(set)?;
            let t = rinf_witness(&sp, &set, j, depth)?;
            let op = t.to_operator();
            let mut values = Vec::new();
            for s_min in 1..=cfg.k / 2 {
                for q in sp.cells_of(&set)? {
                    values.push(RinfRow { s_min, cell: q, value: rinf_seminorm(&op, Axis::Col, j, q, s_min, 2)? });
                }
            }
            let mut links_per_block = vec![0; sp.k];
            for l in t.links() {
                links_per_block[l.to.block] += 1;
            }
            let passed = values.iter().all(|r| r.value >= 1.0 - 1e-9);
            let min = values.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
            eprintln!("min over cells of K and s_min <= {} of rinf(T E{j}, w=2) = {:?}", cfg.k / 2, tidy(min));
            sink.file("t.json", &(t.to_json() + "\n"))?;
            let result = RinfResult { set, j, depth, w_floor: 2, links_per_block, values, t: links_value(&t) };
            sink.json(&cfg, passed, &result)?;
            Ok(passed)
        }
        Witness::Nonsimple => {
            let cfg = RunConfig::new("lab witness nonsimple", opts)?;
            json_only(&cfg)?;
            let sys = upper_triangular_empty_cut(cfg.k)?;
            let sp = space(&cfg)?.with_template(sys.template().clone())?;
            let x = nonsimple(&sp)?;
            let op = x.to_operator();
            let corners_larson = (1..sp.k)
                .map(|n| {
                    let rows: Vec<usize> = (n..sp.k).collect();
                    let cols: Vec<usize> = (0..n).collect();
                    is_larson_member(&op.compress(&rows, &cols), cfg.tol, cfg.eta())
                })
                .collect::<trilab::Result<Vec<bool>>>()?;
            let report = membership(&op, &sys, cfg.tol, cfg.eta(), cfg.w_floor)?;
            let passed = corners_larson.iter().all(|&b| b) && !report.member;
            eprintln!(
                "corners Larson: {}; member of the upper-triangular algebra: {}",
                corners_larson.iter().all(|&b| b),
                report.member
            );
            sink.file("x.json", &(x.to_json() + "\n"))?;
            sink.json(&cfg, passed, &NonsimpleResult { corners_larson, membership: report, x: links_value(&x) })?;
            Ok(passed)
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    text.trim().parse().map_err(|_| anyhow::anyhow!("expected a rational such as 3/8, got {text:?}"))
}

fn parse_interval(text: &str) -> Result<BorelSet> {
    let Some((lo, hi)) = text.split_once(',') else { bail!("expected lo,hi, got {text:?}") };
    Ok(BorelSet::interval(parse_rational(lo)?, parse_rational(hi)?)?)
}

#[derive(Serialize)]
struct InequalityResult {
    r: usize,
    samples: usize,
    density: f64,
    checks: usize,
    /// Largest `left − right` seen.
    worst_margin: f64,
    failures: Vec<Failure>,
}

#[derive(Serialize)]
struct Failure {
    sample: usize,
    i: usize,
    j: usize,
    record: ProductInequality,
}

pub fn inequality(opts: &GlobalOpts, r: usize, samples: usize, density: f64, sink: &Sink) -> Result<bool> {
    let cfg = RunConfig::new("lab inequality", opts)?;
    json_only(&cfg)?;
    if !(0.0..=1.0).contains(&density) {
        bail!("--density must lie in [0, 1] (got {density})");
    }
    let sp = space(&cfg)?;
    if r >= sp.k {
        bail!("--r must be below k = {} (got {r})", sp.k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut result = InequalityResult { r, samples, density, checks: 0, worst_margin: f64::NEG_INFINITY, failures: Vec::new() };
    for sample in 0..samples {
        let x = random_upper_triangular(&sp, density, &mut rng);
        let y = random_upper_triangular(&sp, density, &mut rng);
        for i in 0..sp.k {
            for j in 0..sp.k {
                for record in product_inequality_cells(&x, &y, i, j, r, cfg.w_floor)? {
                    result.checks += 1;
                    result.worst_margin = result.worst_margin.max(record.left - record.right);
                    if !record.holds {
                        result.failures.push(Failure { sample, i, j, record });
                    }
                }
            }
        }
    }
    let passed = result.failures.is_empty();
    eprintln!("{} checks, {} failures, worst left - right = {:e}", result.checks, result.failures.len(), result.worst_margin);
    sink.json(&cfg, passed, &result)?;
    Ok(passed)
}

#[derive(Serialize)]
struct DemoResult {
    example: ExampleSpec,
    check: AxiomReport,
    maximality: AxiomReport,
    cuts: Vec<Cut>,
    /// Membership of the fixture carrying every permitted within-cell entry;
    /// absent when the system's sets do not sit on the model grid.
    member_fixture: Option<MembershipReport>,
    system: SystemDoc,
}

fn parse_cut(text: &str) -> Result<CutCase> {
    Ok(match text {
        "a-empty" => CutCase::AEmpty,
        "b-empty" => CutCase::BEmpty,
        _ => match text.split_once(':') {
            Some(("at", v)) => CutCase::At(parse_rational(v)?),
            Some(("gap", v)) => CutCase::Gap(parse_rational(v)?),
            _ => bail!("cut must be a-empty, b-empty, at:<label> or gap:<rational> (got {text:?})"),
        },
    })
}

pub fn demo(opts: &GlobalOpts, kind: DemoKind, cut: Option<&str>, sink: &Sink) -> Result<bool> {
    let name = format!("{kind:?}").to_lowercase();
    let cfg = RunConfig::new(&format!("demo {name}"), opts)?;
    json_only(&cfg)?;
    let n = cfg.k;
    let spec = match kind {
        DemoKind::Mixed => ExampleSpec::mixed(n, (cfg.m / 4).max(1)),
        _ => {
            let (kind, default) = match kind {
                DemoKind::Nat => (ExampleKind::Nat, CutCase::AEmpty),
                DemoKind::Int => (ExampleKind::Int, CutCase::BEmpty),
                DemoKind::Wo => (ExampleKind::WellOrdered, CutCase::AEmpty),
                // Halfway between the two middle labels p/(n+1): a gap with no label.
                _ => (ExampleKind::Cantor, CutCase::Gap(rat(2 * (n as i64 / 2) + 1, 2 * (n as i64 + 1)))),
            };
            let cut = cut.map(parse_cut).transpose()?.unwrap_or(default);
            ExampleSpec::new(kind, n, cut)
        }
    };
    let sys = build_example(&spec)?;
    let check = check_extended(&sys, CheckMode::Extended);
    let maximality = is_maximal(&sys, MaximalityMode::Truncated)?;
    let sp = space(&cfg)?.with_template(sys.template().clone())?;
    let member_fixture = match member(&sp, &sys) {
        Ok(links) => {
            sink.file("member.json", &(links.to_json() + "\n"))?;
            Some(membership(&links.to_operator(), &sys, cfg.tol, cfg.eta(), cfg.w_floor)?)
        }
        Err(trilab::Error::Alignment(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let passed = check.passed && maximality.passed && member_fixture.as_ref().is_none_or(|r| r.member);
    sink.file("system.json", &(sys.to_json() + "\n"))?;
    let result = DemoResult { example: spec, check, maximality, cuts: cuts(&sys), member_fixture, system: SystemDoc::from(&sys) };
    sink.json(&cfg, passed, &result)?;
    Ok(passed)
}
