//! One function per subcommand. Each fills a [`Report`]; library errors become
//! an `error` status rather than a panic.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use starframe::linalg;
use starframe::sampling;
use starframe::stability::check_criterion;
use starframe::{
    BoundSide, CMatrix, CertificateStatus, CoefficientField, FrameBounds, FrameCertificate, FrameStatus, MeasureSpace,
    OperatorFamily, PerturbationReport, SamplingConfig, ScalarBounds, StabilityConstants, Verdict,
};

use crate::report::{Check, Report, Status};
use crate::scenario::{self, matrix_to_literal, FamilySpec, MeasureSpec, Scenario};
use crate::selftest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Bounds,
    Analyze,
    Dual,
    Reconstruct,
    Transform,
    Perturb,
    Sweep,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Analyze => "analyze",
            Command::Dual => "dual",
            Command::Reconstruct => "reconstruct",
            Command::Transform => "transform",
            Command::Perturb => "perturb",
            Command::Sweep => "sweep",
            Command::Selftest => "selftest",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::Perturb => 1000,
            Command::Selftest => 50,
            _ => SamplingConfig::default().samples,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub m: Option<f64>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub levels: Option<Vec<usize>>,
    /// Use the larger of the two stability constants when `m` is not given.
    pub guaranteed_m: bool,
}

/// Relative tolerance for the round-trip checks of `reconstruct`.
pub const RECONSTRUCT_RTOL: f64 = 1e-8;
/// Entrywise relative tolerance for operator identities (`T G T*`, adjoint identity).
pub const IDENTITY_RTOL: f64 = 1e-10;
/// Relative tolerance for `G_dual = G^-1`.
pub const DUAL_RTOL: f64 = 1e-9;
/// Mass drift allowed between refinement levels of a sweep.
pub const MASS_ATOL: f64 = 1e-12;

struct Ctx<'a> {
    scenario: &'a Scenario,
    flags: &'a Flags,
    sampling: SamplingConfig,
    tol: Option<f64>,
}

type Outcome = Result<(), String>;

pub fn run(command: Command, scenario: Option<&Scenario>, digest: Option<String>, flags: &Flags) -> Report {
    let seed = flags.seed.or(scenario.and_then(|s| s.seed)).unwrap_or(0);
    let samples = flags.samples.or(scenario.and_then(|s| s.samples)).unwrap_or(command.default_samples());
    let mut report = Report::new(command.name(), digest, seed, samples);
    let sampling = SamplingConfig::new(samples, seed);

    if command == Command::Selftest {
        for c in selftest::run_suite(sampling) {
            report.check(c);
        }
        return report;
    }
    let Some(scenario) = scenario else {
        report.fail(format!("`{}` needs a scenario file", command.name()));
        return report;
    };
    let ctx = Ctx { scenario, flags, sampling, tol: flags.tol.or(scenario.tol) };
    let outcome = match command {
        Command::Bounds => bounds(&ctx, &mut report),
        Command::Analyze => analyze(&ctx, &mut report),
        Command::Dual => dual(&ctx, &mut report),
        Command::Reconstruct => reconstruct(&ctx, &mut report),
        Command::Transform => transform(&ctx, &mut report),
        Command::Perturb => perturb(&ctx, &mut report),
        Command::Sweep => sweep(&ctx, &mut report),
        Command::Selftest => unreachable!(),
    };
    if let Err(e) = outcome {
        report.fail(e);
    }
    report
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn frame_scalar_bounds(family: &OperatorFamily, tol: Option<f64>, what: &str) -> Result<ScalarBounds, String> {
    match family.optimal_scalar_bounds(tol) {
        FrameStatus::Frame(b) => Ok(b),
        FrameStatus::NotFrame { lambda_min, lambda_max } => Err(format!(
            "{what} is not a frame: lambda_min(G) = {lambda_min:e}, lambda_max(G) = {lambda_max:e}"
        )),
    }
}

fn bounds_json(b: &FrameBounds) -> Value {
    match b.scalar_moduli() {
        Some((a, bb)) => json!({ "kind": "scalar", "a": a, "b": bb }),
        None => json!({
            "kind": "matrix",
            "lower": matrix_to_literal(b.lower.entries()),
            "upper": matrix_to_literal(b.upper.entries()),
        }),
    }
}

fn certificate_json(cert: &FrameCertificate) -> Value {
    let mut v = json!({
        "status": match &cert.status {
            CertificateStatus::VerifiedExact => "VERIFIED_EXACT",
            CertificateStatus::VerifiedSampled { .. } => "VERIFIED_SAMPLED",
            CertificateStatus::Refuted { .. } => "REFUTED",
            CertificateStatus::NotFrame => "NOT_FRAME",
        },
        "lambda_min": cert.lambda_min,
        "lambda_max": cert.lambda_max,
        "lower_margin": cert.lower_margin,
        "upper_margin": cert.upper_margin,
    });
    match &cert.status {
        CertificateStatus::VerifiedSampled { samples } => v["probes"] = json!(samples),
        CertificateStatus::Refuted { witness, side } => {
            v["side"] = json!(match side {
                BoundSide::Lower => "lower",
                BoundSide::Upper => "upper",
            });
            v["witness"] = json!(matrix_to_literal(witness.flat()));
        }
        _ => {}
    }
    v
}

fn escalate_certificate(report: &mut Report, cert: &FrameCertificate) {
    match cert.status {
        CertificateStatus::Refuted { .. } => report.escalate(Status::Refuted),
        CertificateStatus::NotFrame => report.escalate(Status::NotFrame),
        _ => {}
    }
}

fn rel_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    let scale = linalg::max_abs_entry(a).max(linalg::max_abs_entry(b)).max(1.0);
    linalg::max_abs_entry(&(a - b)) / scale
}

fn bounds(ctx: &Ctx, report: &mut Report) -> Outcome {
    let built = ctx.scenario.build().map_err(err)?;
    let family = &built.family;
    let op = family.frame_operator();
    report.put("lambda_min", op.lambda_min());
    report.put("lambda_max", op.lambda_max());
    let claimed = match family.optimal_scalar_bounds(ctx.tol) {
        FrameStatus::Frame(sb) => {
            report.put("frame", true);
            report.put("optimal_a", sb.lower);
            report.put("optimal_b", sb.upper);
            match built.bounds {
                Some(b) => b,
                None => sb.promote(built.shape.k).map_err(err)?,
            }
        }
        FrameStatus::NotFrame { .. } => {
            report.put("frame", false);
            match built.bounds {
                Some(b) => b,
                None => {
                    report.escalate(Status::NotFrame);
                    return Ok(());
                }
            }
        }
    };
    report.put("bounds_source", if ctx.scenario.bounds.is_some() { "scenario" } else { "optimal" });
    report.put("bounds", bounds_json(&claimed));
    let cert = family.verify_star_bounds(&claimed, ctx.sampling).map_err(err)?;
    report.put("certificate", certificate_json(&cert));
    escalate_certificate(report, &cert);
    if cert.is_verified() {
        let nc = family.frame_operator_norm_check(&claimed);
        report.check(Check::new(
            "norm sandwich ||A^-1||^-2 <= ||S|| <= ||B||^2",
            nc.holds,
            format!("{:e} <= {:e} <= {:e}", nc.lower, nc.s_norm, nc.upper),
        ));
    }
    Ok(())
}

fn analyze(ctx: &Ctx, report: &mut Report) -> Outcome {
    let built = ctx.scenario.build().map_err(err)?;
    let family = &built.family;
    let op = family.frame_operator();
    let eig = op.eigenvalues();
    let (lmin, lmax) = (op.lambda_min(), op.lambda_max());
    let tnorm = family.frame_transform_norm();
    report.put("measure", family.space().kind().name());
    report.put("nodes", family.len());
    report.put("total_mass", family.space().total_mass());
    report.put("module", built.shape.to_string());
    report.put("eigenvalues", eig.clone());
    report.put("lambda_min", lmin);
    report.put("lambda_max", lmax);
    report.put("frame_transform_norm", tnorm);
    let tol = ctx.tol.unwrap_or_else(|| op.default_frame_tol());
    let frame = family.is_frame(ctx.tol);
    report.put("frame", frame);
    report.put("tight", frame && lmax - lmin <= tol);
    let id = linalg::identity::<f64>(built.shape.flat_width());
    report.put("parseval", linalg::max_abs_entry(&(op.gram() - &id)) <= tol);
    if frame {
        report.put("optimal_a", lmin.sqrt());
        report.put("optimal_b", lmax.sqrt());
    }

    let g = op.gram();
    report.check(Check::new(
        "gram is Hermitian",
        linalg::hermitian_deviation(g) <= IDENTITY_RTOL * lmax.abs().max(1.0),
        format!("deviation {:e}", linalg::hermitian_deviation(g)),
    ));
    report.check(Check::new(
        "gram is positive semidefinite",
        lmin >= -IDENTITY_RTOL * lmax.abs().max(1.0),
        format!("lambda_min {lmin:e}"),
    ));
    let b = lmax.max(0.0).sqrt();
    report.check(Check::new(
        "||T|| equals the optimal upper bound",
        (tnorm - b).abs() <= IDENTITY_RTOL * b.max(1.0),
        format!("||T|| = {tnorm:e}, sqrt(lambda_max) = {b:e}"),
    ));

    let mut rng = sampling::rng(ctx.sampling.seed);
    let x = sampling::random_vector::<f64>(built.shape, &mut rng);
    let blocks = family.maps().iter().map(|m| sampling::random_vector(m.codomain(), &mut rng)).collect();
    let c = CoefficientField::new(family.space().clone(), blocks).map_err(err)?;
    let lhs = family.analysis(&x).map_err(err)?.inner_product(&c).map_err(err)?;
    let rhs = x.inner_product(&family.synthesis(&c).map_err(err)?).map_err(err)?;
    let d = rel_diff(lhs.entries(), rhs.entries());
    report.check(Check::new(
        "<Tx, c> = <x, T*c>",
        d <= IDENTITY_RTOL,
        format!("relative deviation {d:e}"),
    ));
    if frame {
        let injective = family.analysis_map().is_injective(family.analysis_map().default_rank_tol());
        report.check(Check::new("frame transform is injective", injective, ""));
        report.check(Check::new(
            "synthesis is surjective",
            family.synthesis_map().is_surjective(family.synthesis_map().default_rank_tol()),
            "",
        ));
    }
    Ok(())
}

fn dual(ctx: &Ctx, report: &mut Report) -> Outcome {
    let out = ctx.flags.output.as_ref().ok_or("`dual` needs an output path (-o)")?;
    let built = ctx.scenario.build().map_err(err)?;
    let family = &built.family;
    let dual = family.canonical_dual(ctx.tol).map_err(err)?;
    let g = family.frame_operator();
    let gd = dual.frame_operator();
    let ginv = g.inverse(ctx.tol).map_err(err)?;
    report.put("output", out.display().to_string());
    report.put("dual_lambda_min", gd.lambda_min());
    report.put("dual_lambda_max", gd.lambda_max());
    let d = rel_diff(gd.gram(), &ginv);
    report.check(Check::new("dual gram equals G^-1", d <= DUAL_RTOL, format!("relative deviation {d:e}")));
    let dd = dual.canonical_dual(ctx.tol).map_err(err)?;
    let d2 = rel_diff(dd.frame_operator().gram(), g.gram());
    report.check(Check::new(
        "dual of dual recovers G",
        d2 <= 100.0 * DUAL_RTOL,
        format!("relative deviation {d2:e}"),
    ));
    let mut written = ctx.scenario.with_explicit_family(&dual);
    written.bounds = None;
    scenario::save_scenario(&written, out).map_err(err)?;
    Ok(())
}

fn reconstruct(ctx: &Ctx, report: &mut Report) -> Outcome {
    let built = ctx.scenario.build().map_err(err)?;
    let family = &built.family;
    let (x, source) = match built.vector {
        Some(v) => (v, "scenario"),
        None => (sampling::random_vector::<f64>(built.shape, &mut sampling::rng(ctx.sampling.seed)), "random"),
    };
    report.put("vector_source", source);
    let norm = x.norm().max(f64::MIN_POSITIVE);
    let c = family.analysis(&x).map_err(err)?;
    let xr = family.reconstruct(&c, ctx.tol).map_err(err)?;
    let e1 = xr.sub(&x).map_err(err)?.norm() / norm;
    report.put("relative_error", e1);
    report.check(Check::new(
        "S^-1 T* T x = x",
        e1 <= RECONSTRUCT_RTOL,
        format!("relative error {e1:e}"),
    ));
    let dual = family.canonical_dual(ctx.tol).map_err(err)?;
    let xd = dual.synthesis(&c).map_err(err)?;
    let e2 = xd.sub(&x).map_err(err)?.norm() / norm;
    report.put("relative_error_via_dual", e2);
    report.check(Check::new(
        "dual synthesis of T x = x",
        e2 <= RECONSTRUCT_RTOL,
        format!("relative error {e2:e}"),
    ));
    Ok(())
}

fn transform(ctx: &Ctx, report: &mut Report) -> Outcome {
    let built = ctx.scenario.build().map_err(err)?;
    let t = built.transform.as_ref().ok_or("`transform` needs a `transform` block in the scenario")?;
    let family = &built.family;
    let sb = frame_scalar_bounds(family, ctx.tol, "family")?;
    let claimed = match built.bounds {
        Some(b) => b,
        None => sb.promote(built.shape.k).map_err(err)?,
    };
    let tf = family.transform_family(t, ctx.tol).map_err(err)?;
    let g = family.frame_operator();
    let expected = t.action() * g.gram() * t.action().adjoint();
    let d = rel_diff(tf.frame_operator().gram(), &expected);
    report.check(Check::new("gram of transformed family is T G T*", d <= IDENTITY_RTOL, format!("relative deviation {d:e}")));
    report.put("transform_norm", t.norm());
    report.put("transform_sigma_min", linalg::singular_values(t.action()).last().copied().unwrap_or(0.0));
    let top = tf.frame_operator();
    report.put("transformed_lambda_min", top.lambda_min());
    report.put("transformed_lambda_max", top.lambda_max());
    let tb = claimed.transformed(t, ctx.tol).map_err(err)?;
    report.put("transformed_bounds", bounds_json(&tb));
    let cert = tf.verify_star_bounds(&tb, ctx.sampling).map_err(err)?;
    report.put("certificate", certificate_json(&cert));
    escalate_certificate(report, &cert);
    Ok(())
}

fn perturb(ctx: &Ctx, report: &mut Report) -> Outcome {
    let built = ctx.scenario.build().map_err(err)?;
    let f1 = &built.family;
    let f2 = built.perturbed.as_ref().ok_or("`perturb` needs a `perturbed` family in the scenario")?;
    let k = built.shape.k;
    let b1 = match built.bounds {
        Some(b) => b,
        None => frame_scalar_bounds(f1, ctx.tol, "family")?.promote(k).map_err(err)?,
    };
    let b2 = match built.perturbed_bounds {
        Some(b) => b,
        None => frame_scalar_bounds(f2, ctx.tol, "perturbed family")?.promote(k).map_err(err)?,
    };
    let constants = StabilityConstants::new(&b1, &b2).map_err(err)?;
    report.put("m_min", constants.min());
    report.put("m_guaranteed", constants.max());
    let (m, source) = match ctx.flags.m.or(ctx.scenario.m) {
        Some(m) => (m, if ctx.flags.m.is_some() { "flag" } else { "scenario" }),
        None if ctx.flags.guaranteed_m => (constants.max(), "bounds_max"),
        None => (constants.min(), "bounds_min"),
    };
    let pr: PerturbationReport = check_criterion(f1, f2, m, ctx.sampling)
        .and_then(|r| r.with_derived_bounds(&b1))
        .map_err(err)?;
    report.put("gap_lambda_min", pr.gap_lambda_min);
    report.put("gap_lambda_max", pr.gap_lambda_max);
    report.put("m", pr.m_used);
    report.put("m_source", source);
    report.put("max_ratio", pr.max_ratio);
    report.put("probes", pr.samples);
    let verdict = match &pr.verdict {
        Verdict::HoldsSufficient => json!({ "kind": "HOLDS_SUFFICIENT" }),
        Verdict::HoldsSampled { samples } => json!({ "kind": "HOLDS_SAMPLED", "probes": samples }),
        Verdict::Violated { witness, ratio } => {
            json!({ "kind": "VIOLATED", "ratio": ratio, "witness": matrix_to_literal(witness.flat()) })
        }
    };
    report.put("verdict", verdict);
    if pr.is_violated() {
        report.escalate(Status::Violated);
    }
    if let Some(db) = pr.derived_bounds {
        report.put("derived_c", db.lower);
        report.put("derived_d", db.upper);
        let g2 = f2.frame_operator();
        let (lo, hi) = (db.lower * db.lower, db.upper * db.upper);
        let slack = 1e-9 * hi.max(1.0);
        report.check(Check::new(
            "c^2 I <= G_perturbed <= d^2 I",
            g2.lambda_min() >= lo - slack && g2.lambda_max() <= hi + slack,
            format!("{lo:e} <= [{:e}, {:e}] <= {hi:e}", g2.lambda_min(), g2.lambda_max()),
        ));
    }
    Ok(())
}

fn sweep(ctx: &Ctx, report: &mut Report) -> Outcome {
    let (a, b, n0) = match ctx.scenario.measure {
        MeasureSpec::Grid { a, b, n } => (a, b, n),
        _ => return Err("`sweep` needs a grid measure".into()),
    };
    if !matches!(ctx.scenario.family, FamilySpec::Polynomial { .. }) {
        return Err("`sweep` needs a polynomial family so it can be re-evaluated on finer grids".into());
    }
    let levels = ctx.flags.levels.clone().unwrap_or_else(|| vec![n0, 10 * n0, 100 * n0]);
    let shape = ctx.scenario.shape().map_err(err)?;
    let mut rows = Vec::new();
    for &n in &levels {
        let space = MeasureSpace::uniform_grid(a, b, n).map_err(err)?;
        let mass = space.total_mass();
        let family = ctx.scenario.family.build(shape, space, "family").map_err(err)?;
        let op = family.frame_operator();
        rows.push(SweepRow { n, a_sq: op.lambda_min(), b_sq: op.lambda_max(), mass });
    }
    report.put(
        "table",
        rows.iter()
            .map(|r| json!({ "n": r.n, "a": r.a_sq.max(0.0).sqrt(), "b": r.b_sq.max(0.0).sqrt(), "a_sq": r.a_sq, "b_sq": r.b_sq, "total_mass": r.mass }))
            .collect::<Vec<_>>(),
    );
    let drift = rows.iter().map(|r| (r.mass - rows[0].mass).abs()).fold(0.0, f64::max);
    report.check(Check::new("total mass constant across levels", drift <= MASS_ATOL, format!("max drift {drift:e}")));
    if let Some(est) = order_estimate(&rows, |r| r.b_sq) {
        report.put("b_sq_observed_order", est.order);
        report.put("b_sq_extrapolated", est.limit);
    }
    if let Some(est) = order_estimate(&rows, |r| r.a_sq) {
        report.put("a_sq_observed_order", est.order);
        report.put("a_sq_extrapolated", est.limit);
    }
    if let Some(path) = &ctx.flags.csv {
        let mut csv = String::from("n,a,b,a_sq,b_sq,total_mass\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.a_sq.max(0.0).sqrt(),
                r.b_sq.max(0.0).sqrt(),
                r.a_sq,
                r.b_sq,
                r.mass
            ));
        }
        fs::write(path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        report.put("csv", path.display().to_string());
    }
    Ok(())
}

struct SweepRow {
    n: usize,
    a_sq: f64,
    b_sq: f64,
    mass: f64,
}

pub struct OrderEstimate {
    pub order: f64,
    pub limit: f64,
}

/// Observed order and Richardson limit from the last three levels, which must
/// be in a constant ratio. `None` when the differences are too small to carry
/// information (for instance when the quantity is exact on every grid).
fn order_estimate(rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> Option<OrderEstimate> {
    let [r1, r2, r3] = rows.get(rows.len().checked_sub(3)?..)? else { return None };
    let ratio = r2.n as f64 / r1.n as f64;
    if (r3.n as f64 / r2.n as f64 - ratio).abs() > 1e-12 || ratio <= 1.0 {
        return None;
    }
    let (d1, d2) = (f(r2) - f(r1), f(r3) - f(r2));
    let floor = 1e-13 * f(r3).abs().max(1.0);
    if d1.abs() <= floor || d2.abs() <= floor {
        return None;
    }
    let order = (d1 / d2).abs().ln() / ratio.ln();
    let limit = f(r3) + d2 / (ratio.powf(order) - 1.0);
    Some(OrderEstimate { order, limit })
}
