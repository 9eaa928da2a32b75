//! Mode dispatch, reports and exit codes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cuntzq_core::basis::BasisSpec;
use cuntzq_core::ccr::{build_ccr, verify_adjoint_relation, verify_ccr_starred, verify_quantize_via_ccr, verify_relations};
use cuntzq_core::cuntz::{bound_check, lift, CuntzRep, LiftedOperator};
use cuntzq_core::graded::count_up_to;
use cuntzq_core::quantizer::{
    build_q, build_qhat, build_r, check_ccr_analogue, check_identity, check_lie_bracket, check_von_neumann,
    verify_lemma, verify_theorem, Arithmetic,
};
use cuntzq_core::report::all_pass;
use cuntzq_core::scalar::to_f64;
use cuntzq_core::white_noise::{estimate_check, wn_bracket, wn_quantize, ChaosPoly, WhiteNoiseConfig, WhiteNoiseSpace};
use cuntzq_core::{Check, CoeffMatrix, Error, PhaseSpace, Polynomial, QuantizationSetting, Weight};
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Mode, Settings, WeightArg};
use crate::mtx::{self, MtxMatrix};
use crate::parse::{parse_chaos, parse_polynomial, parse_rational_list};
use crate::random;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY_WINDOW: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Sizes of the seeded suites run when observables are not supplied.
const LEMMA_PAIRS: usize = 50;
const THEOREM_PAIRS: usize = 20;
const CCR_MONOMIALS: usize = 30;
const BOUND_PAIRS: usize = 20;
const BOUND_SAMPLES: usize = 8;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    EmptyWindow(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::EmptyWindow(_) => EXIT_EMPTY_WINDOW,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::EmptyWindow(m) => m,
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Input(m)
    }
}

type Run<T> = Result<T, Failure>;

#[derive(Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub asserted: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: Option<&'static str>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub parameters: BTreeMap<&'static str, Value>,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub details: Value,
    pub artifacts: Vec<String>,
}

pub struct Outcome {
    pub exit_code: i32,
    pub report: Report,
    pub out_dir: PathBuf,
}

/// Resolved parameters shared by the modes.
struct Ctx {
    mode: Mode,
    settings: Settings,
    params: BTreeMap<&'static str, Value>,
    arith: Arithmetic,
    seed: u64,
    artifacts: Vec<(String, String)>,
}

impl Ctx {
    fn positive<T: Copy + PartialOrd + Default + Serialize>(&mut self, key: &'static str, v: Option<T>, default: T) -> Run<T> {
        let v = v.unwrap_or(default);
        if v <= T::default() {
            return Err(Failure::Input(format!("--{key} must be positive")));
        }
        self.params.insert(key, json!(v));
        Ok(v)
    }

    fn n(&mut self) -> Run<usize> {
        let n = self.settings.n;
        self.positive("n", n, 1)
    }

    fn weight(&mut self, default: WeightArg) -> Weight {
        let w = self.settings.weight.unwrap_or(default);
        self.params.insert("weight", json!(w));
        match w {
            WeightArg::Unnormalized => Weight::Unnormalized,
            WeightArg::StandardGaussian => Weight::StandardGaussian,
        }
    }

    /// Basis of `N` elements, or complete up to `default_level` when `--N`
    /// is absent. Inputs of degree above the truncation are input errors; a truncation
    /// that holds the inputs but not the derived observables leaves an empty
    /// window.
    fn space(&mut self, n: usize, default_level: u32, level: u32, input_degree: u32, weight: Weight) -> Run<PhaseSpace> {
        let size = self.settings.size;
        let size = self.positive("N", size, count_up_to(2 * n, default_level.max(level)))?;
        let s = PhaseSpace::new(BasisSpec::new(n, size).weight(weight)).map_err(|e| core_failure(e, n, 0))?;
        require_level(level_of(&s), n, level, input_degree)?;
        Ok(s)
    }

    fn polynomial(&mut self, key: &'static str, n: usize) -> Run<Option<Polynomial>> {
        let text = match key {
            "f" => self.settings.f.clone(),
            "g" => self.settings.g.clone(),
            _ => self.settings.h.clone(),
        };
        let Some(text) = text else { return Ok(None) };
        let p = parse_polynomial(&text, n).map_err(|e| Failure::Input(format!("--{key}: {e}")))?;
        self.params.insert(key, json!(p.to_string()));
        Ok(Some(p))
    }

    fn chaos(&mut self, key: &'static str, modes: usize) -> Run<Option<ChaosPoly>> {
        let text = match key {
            "f" => self.settings.f.clone(),
            "g" => self.settings.g.clone(),
            _ => self.settings.h.clone(),
        };
        let Some(text) = text else { return Ok(None) };
        let p = parse_chaos(&text, modes).map_err(|e| Failure::Input(format!("--{key}: {e}")))?;
        self.params.insert(key, json!(p.to_string()));
        Ok(Some(p))
    }

    fn rng(&mut self) -> rand_chacha::ChaCha8Rng {
        self.params.insert("seed", json!(self.seed));
        random::rng(self.seed)
    }

    fn matrix(&mut self, name: &str, c: &CoeffMatrix, what: String) {
        let comments = vec![what, format!("window {} of {}", c.window_len(), c.size())];
        let m = MtxMatrix::from_coeff(c, comments);
        self.artifacts.push((format!("{name}.mtx"), mtx::to_string(&m)));
    }

    fn lifted(&mut self, name: &str, op: &LiftedOperator, what: String) {
        let m = MtxMatrix {
            rows: op.dim(),
            cols: op.dim(),
            entries: op.entries(),
            comments: vec![what, format!("fiber {}", op.fiber())],
        };
        self.artifacts.push((format!("{name}.mtx"), mtx::to_string(&m)));
    }

    fn wn_config(&mut self) -> Run<WhiteNoiseConfig> {
        let (k, c) = (self.settings.modes, self.settings.cap);
        let k = self.positive("K", k, 4)?;
        let c = self.positive("C", c, 3)?;
        let text = self.settings.lambda.clone().unwrap_or_else(|| "1".into());
        let mut lambda = parse_rational_list(&text).map_err(|e| Failure::Input(format!("--lambda: {e}")))?;
        if lambda.len() == 1 {
            lambda = vec![lambda[0].clone(); k];
        }
        self.params.insert("lambda", json!(lambda.iter().map(ToString::to_string).collect::<Vec<_>>()));
        WhiteNoiseConfig::new(k, c, lambda, None).map_err(|e| Failure::Input(e.to_string()))
    }
}

/// Maps core errors to exit classes, naming the parameter to raise.
fn core_failure(e: Error, n: usize, level: u32) -> Failure {
    match e {
        Error::EmptyWindow { shortfall } => Failure::EmptyWindow(format!(
            "validity window is empty: the checks need completeness up to degree {}, the basis reaches degree {level}; raise --N to at least {}",
            level + shortfall,
            count_up_to(2 * n, level + shortfall)
        )),
        Error::TruncationOverflow { degree, .. } => {
            Failure::Input(format!("{e}; raise --N to at least {}", count_up_to(2 * n, degree)))
        }
        _ => Failure::Input(e.to_string()),
    }
}

fn require_level(have: u32, vars_half: usize, level: u32, input_degree: u32) -> Run<()> {
    if have < input_degree {
        return Err(core_failure(
            Error::TruncationOverflow {
                degree: input_degree,
                cap: have,
            },
            vars_half,
            have,
        ));
    }
    if have < level {
        return Err(core_failure(Error::EmptyWindow { shortfall: level - have }, vars_half, have));
    }
    Ok(())
}

fn level_of<T: QuantizationSetting>(s: &T) -> u32 {
    s.graded().full_level().unwrap_or(0)
}

fn wrap<T, S: QuantizationSetting>(s: &S, r: cuntzq_core::Result<T>) -> Run<T> {
    r.map_err(|e| core_failure(e, s.graded().vars() / 2, level_of(s)))
}

fn summarize(checks: &[Check]) -> Summary {
    let asserted: Vec<&Check> = checks.iter().filter(|c| c.asserted).collect();
    let passed = asserted.iter().filter(|c| c.pass).count();
    Summary {
        checks: checks.len(),
        asserted: asserted.len(),
        passed,
        failed: asserted.len() - passed,
        informational: checks.len() - asserted.len(),
    }
}

fn quantize(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let n = ctx.n()?;
    let weight = ctx.weight(WeightArg::Unnormalized);
    let h = ctx
        .polynomial("h", n)?
        .ok_or_else(|| Failure::Input("--h is required".into()))?;
    let s = ctx.space(n, 2, h.degree(), h.degree(), weight)?;
    let q = wrap(&s, build_q(&s, &h))?;
    let r = wrap(&s, build_r(&s, &h))?;
    let qh = wrap(&s, build_qhat(&s, &h))?;
    let mut details = serde_json::Map::new();
    for (name, m) in [("Q", &q), ("R", &r), ("Qhat", &qh)] {
        details.insert(
            name.into(),
            json!({"window": m.window_len(), "band": m.band(), "nnz": m.nnz()}),
        );
    }
    if ctx.mode == Mode::Export {
        let dim = ctx.settings.dim;
        let dim = ctx.positive("M", dim, 10_000)?;
        let d = ctx.settings.d;
        let d = ctx.positive("d", d, 64)?;
        let rep = CuntzRep::new(d, dim).map_err(|e| Failure::Input(e.to_string()))?;
        for (name, m) in [("Q", &q), ("R", &r), ("Qhat", &qh)] {
            let op = lift(m, &rep).map_err(|e| Failure::Input(e.to_string()))?;
            ctx.lifted(&format!("{name}_lifted"), &op, format!("{name}({h}) on l^2 truncated at M = {dim}"));
        }
    }
    for (name, m) in [("Q", &q), ("R", &r), ("Qhat", &qh)] {
        ctx.matrix(name, m, format!("{name}({h}), orthonormal Hermite frame"));
    }
    Ok((Vec::new(), Value::Object(details)))
}

fn lemma(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let n = ctx.n()?;
    let weight = ctx.weight(WeightArg::Unnormalized);
    let pairs = match (ctx.polynomial("f", n)?, ctx.polynomial("g", n)?) {
        (Some(f), Some(g)) => vec![(f, g)],
        (None, None) => {
            let mut rng = ctx.rng();
            (0..LEMMA_PAIRS)
                .map(|_| {
                    let df = rand::Rng::gen_range(&mut rng, 1..=3);
                    let dg = rand::Rng::gen_range(&mut rng, 1..=3);
                    (random::polynomial(&mut rng, n, df), random::polynomial(&mut rng, n, dg))
                })
                .collect()
        }
        _ => return Err(Failure::Input("give both --f and --g, or neither for the seeded suite".into())),
    };
    let level = pairs.iter().map(|(f, g)| f.degree() + g.degree()).max().unwrap_or(0).max(1);
    let s = ctx.space(n, level, level, max_degree(&pairs), weight)?;
    let mut checks = Vec::new();
    for (f, g) in &pairs {
        checks.extend(wrap(&s, verify_lemma(&s, f, g, ctx.arith))?);
    }
    Ok((checks, json!({"pairs": pairs.len()})))
}

fn theorem(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let n = ctx.n()?;
    let weight = ctx.weight(WeightArg::Unnormalized);
    let pd = ctx.settings.phi_degree;
    let m = ctx.positive("phi-degree", pd, 2)?;
    let (pairs, seeded) = match (ctx.polynomial("f", n)?, ctx.polynomial("g", n)?) {
        (Some(f), Some(g)) => (vec![(f, g)], false),
        (None, None) => {
            let mut rng = ctx.rng();
            let pairs = (0..THEOREM_PAIRS)
                .map(|_| {
                    let df = rand::Rng::gen_range(&mut rng, 1..=2);
                    let dg = rand::Rng::gen_range(&mut rng, 1..=2);
                    (random::polynomial(&mut rng, n, df), random::polynomial(&mut rng, n, dg))
                })
                .collect();
            (pairs, true)
        }
        _ => return Err(Failure::Input("give both --f and --g, or neither for the seeded suite".into())),
    };
    let level = pairs
        .iter()
        .map(|(f, g)| (f.degree() + g.degree()).max(f.degree() * m))
        .max()
        .unwrap_or(0)
        .max(2);
    let s = ctx.space(n, level, level, max_degree(&pairs), weight)?;
    let mut checks = Vec::new();
    if seeded {
        checks.push(wrap(&s, check_identity(&s, ctx.arith))?);
        checks.extend(wrap(&s, check_ccr_analogue(&s, ctx.arith))?);
        for (f, g) in &pairs {
            checks.extend(wrap(&s, check_lie_bracket(&s, f, g, ctx.arith))?);
            checks.extend(wrap(&s, check_von_neumann(&s, f, m, ctx.arith))?);
        }
    } else {
        let (f, g) = &pairs[0];
        checks = wrap(&s, verify_theorem(&s, f, g, m, ctx.arith))?;
    }
    Ok((checks, json!({"pairs": pairs.len()})))
}

fn max_degree(pairs: &[(Polynomial, Polynomial)]) -> u32 {
    pairs.iter().map(|(f, g)| f.degree().max(g.degree())).max().unwrap_or(0)
}

fn ccr(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let n = ctx.n()?;
    let weight = ctx.weight(WeightArg::StandardGaussian);
    let user = ctx.polynomial("f", n)?;
    let monomials = match user {
        Some(f) => vec![f],
        None => {
            let mut rng = ctx.rng();
            (0..CCR_MONOMIALS).map(|_| random::monomial(&mut rng, n, 4)).collect()
        }
    };
    let top = monomials.iter().map(Polynomial::degree).max().unwrap_or(0);
    let s = ctx.space(n, (top + 2).max(4), top, top, weight)?;
    let fam = wrap(&s, build_ccr(&s))?;
    let mut checks = wrap(&s, verify_relations(&fam))?;
    checks.extend(wrap(&s, verify_adjoint_relation(&fam))?);
    checks.extend(wrap(&s, verify_ccr_starred(&fam))?);
    for f in &monomials {
        checks.extend(wrap(&s, verify_quantize_via_ccr(f, &fam))?);
    }
    Ok((checks, json!({"kappa": fam.kappa().to_string(), "monomials": monomials.len()})))
}

fn cuntz_check(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let dim = ctx.settings.dim;
    let dim = ctx.positive("M", dim, 10_000)?;
    let d = ctx.settings.d;
    let d = ctx.positive("d", d, 64)?;
    let rep = CuntzRep::new(d, dim).map_err(|e| Failure::Input(e.to_string()))?;
    let dec = rep.decomposition();
    let ranges: Vec<usize> = dec.ranges.iter().map(Vec::len).collect();
    Ok((rep.verify_cuntz(), json!({"range_sizes": ranges, "residual": dec.residual.len()})))
}

fn bound(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let n = ctx.n()?;
    let weight = ctx.weight(WeightArg::Unnormalized);
    let dim = ctx.settings.dim;
    let dim = ctx.positive("M", dim, 10_000)?;
    let d = ctx.settings.d;
    let d = ctx.positive("d", d, 64)?;
    let rep = CuntzRep::new(d, dim).map_err(|e| Failure::Input(e.to_string()))?;
    let user_h = ctx.polynomial("h", n)?;
    let level = user_h.as_ref().map_or(6, |h| h.degree() + 3);
    let input = user_h.as_ref().map_or(3, Polynomial::degree);
    let s = ctx.space(n, level, level, input, weight)?;
    let top = level_of(&s);
    let mut rng = ctx.rng();
    let pairs: Vec<(Polynomial, usize)> = match user_h {
        Some(h) => {
            let k = ctx.settings.k.unwrap_or(0);
            ctx.params.insert("k", json!(k));
            vec![(h, k)]
        }
        None => (0..BOUND_PAIRS)
            .map(|_| {
                let dh = rand::Rng::gen_range(&mut rng, 1..=3);
                let h = random::polynomial(&mut rng, n, dh);
                let room = top - h.degree();
                let k = rand::Rng::gen_range(&mut rng, 0..count_up_to(2 * n, room));
                (h, k)
            })
            .collect(),
    };
    let mut checks = Vec::new();
    let mut bounds = Vec::new();
    for (h, k) in &pairs {
        let q = wrap(&s, build_q(&s, h))?;
        let rep_out = bound_check(&q, h.degree(), *k, n, &rep, BOUND_SAMPLES, &mut rng).map_err(|e| match e {
            Error::ColumnOutsideWindow { .. } => Failure::Input(format!(
                "{e}; need deg(e_k) + deg(h) <= {top}, or raise --N to at least {}",
                count_up_to(2 * n, s.graded().degree(*k) + h.degree())
            )),
            e => core_failure(e, n, top),
        })?;
        bounds.push(json!({"h": h.to_string(), "k": k, "bound": rep_out.bound.to_string(), "bound_f64": to_f64(&rep_out.bound)}));
        checks.extend(rep_out.checks);
    }
    Ok((checks, json!({"pairs": bounds})))
}

fn chaos_zero_check(identity: &str, modes: usize, x: &ChaosPoly) -> Check {
    let max = x.terms().values().map(|c| to_f64(&c.abs())).fold(0.0, f64::max);
    Check {
        identity: identity.into(),
        n: modes,
        size: 0,
        window: 0,
        max_abs_deviation: max,
        exact: true,
        pass: x.is_zero(),
        asserted: true,
    }
}

fn wn_pair(ctx: &mut Ctx, cfg: &WhiteNoiseConfig) -> Run<(ChaosPoly, ChaosPoly)> {
    let k = cfg.modes();
    match (ctx.chaos("f", k)?, ctx.chaos("g", k)?) {
        (Some(f), Some(g)) => Ok((f, g)),
        (None, None) => {
            let mut rng = ctx.rng();
            Ok((random::chaos(&mut rng, k, 2), random::chaos(&mut rng, k, 2)))
        }
        _ => Err(Failure::Input("give both --f and --g, or neither for a seeded pair".into())),
    }
}

fn wn_error(e: Error) -> Failure {
    match e {
        Error::OrderOverflow { .. } => Failure::Input(format!("{e}; raise --C")),
        e => Failure::Input(e.to_string()),
    }
}

fn wn_bracket_mode(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let cfg = ctx.wn_config()?;
    let (f, g) = wn_pair(ctx, &cfg)?;
    for (name, x) in [("f", &f), ("g", &g)] {
        if x.order() > cfg.cap() {
            return Err(Failure::Input(format!("--{name} has chaos order {} above --C = {}", x.order(), cfg.cap())));
        }
    }
    let fg = wn_bracket(&f, &g, &cfg).map_err(wn_error)?;
    let gf = wn_bracket(&g, &f, &cfg).map_err(wn_error)?;
    let mut checks = vec![chaos_zero_check("PoissonBracket.antisymmetry", cfg.modes(), &fg.checked_add(&gf).map_err(wn_error)?)];
    let est = estimate_check(&f, &g, 0.0, 1.0, &cfg).map_err(wn_error)?;
    checks.push(est.check.clone());
    let details = json!({
        "f": f.to_string(),
        "g": g.to_string(),
        "bracket": fg.to_string(),
        "order": fg.order(),
        "rho": cfg.rho(),
        "delta": cfg.delta(),
        "estimate": {"lhs": est.lhs, "rhs": est.rhs, "ratio": est.ratio},
    });
    Ok((checks, details))
}

fn wn_quantize_mode(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    let cfg = ctx.wn_config()?;
    let k = cfg.modes();
    let h = ctx
        .chaos("h", k)?
        .ok_or_else(|| Failure::Input("--h is required".into()))?;
    let pair = match (ctx.chaos("f", k)?, ctx.chaos("g", k)?) {
        (Some(f), Some(g)) => Some((f, g)),
        (None, None) => None,
        _ => return Err(Failure::Input("give both --f and --g, or neither".into())),
    };
    let inputs = pair.as_ref().map_or(0, |(f, g)| f.order().max(g.order())).max(h.order());
    let level = pair.as_ref().map_or(0, |(f, g)| f.order() + g.order()).max(h.order());
    let size = ctx.settings.size;
    let size = ctx.positive("N", size, count_up_to(2 * k, level.max(cfg.cap())))?;
    let space = WhiteNoiseSpace::new(cfg.clone(), size).map_err(wn_error)?;
    require_level(level_of(&space), k, level, inputs)?;
    let (q, r, qh) = wn_quantize(&h, &cfg, size).map_err(|e| match e {
        Error::TruncationOverflow { .. } | Error::EmptyWindow { .. } => core_failure(e, k, level_of(&space)),
        e => wn_error(e),
    })?;
    let mut checks = vec![wrap(&space, check_identity(&space, ctx.arith))?];
    if let Some((f, g)) = &pair {
        checks.extend(wrap(&space, verify_lemma(&space, f, g, ctx.arith))?);
        checks.extend(wrap(&space, check_lie_bracket(&space, f, g, ctx.arith))?);
    }
    for (name, m) in [("Q", &q), ("R", &r), ("Qhat", &qh)] {
        ctx.matrix(name, m, format!("{name}({h}), normalized Wick basis"));
    }
    Ok((checks, json!({"window": qh.window_len(), "band": qh.band()})))
}

fn dispatch(ctx: &mut Ctx) -> Run<(Vec<Check>, Value)> {
    match ctx.mode {
        Mode::Quantize | Mode::Export => quantize(ctx),
        Mode::VerifyLemma => lemma(ctx),
        Mode::VerifyTheorem => theorem(ctx),
        Mode::Ccr => ccr(ctx),
        Mode::CuntzCheck => cuntz_check(ctx),
        Mode::BoundCheck => bound(ctx),
        Mode::WnBracket => wn_bracket_mode(ctx),
        Mode::WnQuantize => wn_quantize_mode(ctx),
    }
}

fn write_artifacts(out: &Path, report: &Report, files: &[(String, String)]) -> Result<(), String> {
    fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    for (name, body) in files {
        let p = out.join(name);
        fs::write(&p, body).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    let p = out.join("report.json");
    let mut text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))
}

/// Runs one configuration, writing `report.json` and any matrices into the
/// output directory.
pub fn run(settings: Settings) -> Outcome {
    let out_dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut report = Report {
        tool: "cuntzq",
        version: env!("CARGO_PKG_VERSION"),
        mode: settings.mode.map(Mode::name),
        status: "input-error",
        error: None,
        parameters: BTreeMap::new(),
        summary: summarize(&[]),
        checks: Vec::new(),
        details: Value::Null,
        artifacts: Vec::new(),
    };
    let Some(mode) = settings.mode else {
        report.error = Some("--mode is required".into());
        return finish(report, &[], out_dir, EXIT_INPUT);
    };
    let mut ctx = Ctx {
        mode,
        arith: if settings.float { Arithmetic::Float } else { Arithmetic::Exact },
        seed: settings.seed.unwrap_or(0),
        settings,
        params: BTreeMap::new(),
        artifacts: Vec::new(),
    };
    if ctx.settings.float {
        ctx.params.insert("arithmetic", json!("float"));
    } else {
        ctx.params.insert("arithmetic", json!("exact"));
    }
    let result = dispatch(&mut ctx);
    report.parameters = std::mem::take(&mut ctx.params);
    let code = match result {
        Ok((checks, details)) => {
            report.summary = summarize(&checks);
            let pass = all_pass(&checks);
            report.status = if pass { "pass" } else { "fail" };
            report.checks = checks;
            report.details = details;
            if pass {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(f) => {
            report.status = if f.code() == EXIT_EMPTY_WINDOW { "empty-window" } else { "input-error" };
            report.error = Some(f.message().to_string());
            ctx.artifacts.clear();
            f.code()
        }
    };
    report.artifacts = ctx.artifacts.iter().map(|(n, _)| n.clone()).collect();
    finish(report, &ctx.artifacts, out_dir, code)
}

fn finish(mut report: Report, files: &[(String, String)], out_dir: PathBuf, code: i32) -> Outcome {
    if let Err(e) = write_artifacts(&out_dir, &report, files) {
        report.status = "input-error";
        report.error = Some(e);
        return Outcome {
            exit_code: EXIT_INPUT,
            report,
            out_dir,
        };
    }
    Outcome {
        exit_code: code,
        report,
        out_dir,
    }
}

