//! Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//! Library results are compared with the naive oracle crate wherever a second
//! computation route exists. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;

use starframe::sampling::{self, SampleRng};
use starframe::stability::{check_criterion, stability_constant, StabilityConstants};
use starframe::{
    AlgebraElement, CMatrix, CoefficientField, Complex64, FrameBounds, MeasureSpace, ModuleMap, ModuleShape,
    ModuleVector, OperatorFamily, QuadratureNode, SamplingConfig, Verdict,
};
use starframe_oracle as oracle;

const SEED: u64 = 20_240_601;

const INVOLUTION_ATOL: f64 = 1e-12;
const CSTAR_RTOL: f64 = 1e-10;
const LOEWNER_RTOL: f64 = 1e-9;
const BOUNDED_BELOW_SHRINK: f64 = 1e-6;
const SANDWICH_SLACK: f64 = 1e-9;
const ADJOINT_RTOL: f64 = 1e-10;
const NORM_RTOL: f64 = 1e-10;
const GRAM_RTOL: f64 = 1e-10;
const RECONSTRUCT_RTOL: f64 = 1e-8;
const RECONSTRUCT_MIN_LAMBDA: f64 = 0.1;
const TRANSFORM_RTOL: f64 = 1e-10;
const TRANSFORM_SAMPLES: usize = 500;
const DUAL_RTOL: f64 = 1e-9;
const DUAL_DUAL_RTOL: f64 = 1e-8;
const CRITERION_SAMPLES: usize = 1000;
const RATIO_SLACK: f64 = 1e-9;
const DERIVED_SLACK: f64 = 1e-9;
const HALVING_RATIO: (f64, f64) = (3.5, 4.5);
const ORDER_TOL: f64 = 0.05;
const QUADRATURE_ATOL: f64 = 1e-5;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("C*-algebra axioms", c01_cstar_axioms),
        ("module inner product and <Tx,Tx> <= ||T||^2 <x,x>", c02_module_loewner),
        ("surjective iff adjoint bounded below", c03_surjective_iff_bounded_below),
        ("gram sandwich for injective maps", c04_gram_sandwich),
        ("frame transform injective, adjoint, norm, surjective synthesis", c05_frame_transform),
        ("frame operator Hermitian, positive, norm sandwich", c06_frame_operator),
        ("reconstruction round trip", c07_reconstruction),
        ("transformed family gram and bounds", c08_transform),
        ("canonical dual", c09_dual),
        ("frames satisfy the perturbation criterion with the stability constant", c10_frames_satisfy_criterion),
        ("criterion with M implies derived bounds", c11_derived_bounds),
        ("midpoint quadrature convergence", c12_quadrature),
        ("counting measure is exact", c13_counting),
        ("CLI determinism and exit codes", c14_cli),
    ];
    let (mut failed, mut unexpected) = (0, Vec::new());
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let o = f();
        if !o.passed {
            failed += 1;
        }
        if o.passed == KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
        println!("criterion {n:>2} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let sup = c10_supplementary_max_constant();
    println!("supplementary {} criterion 10 with the larger stability constant: {}", if sup.passed { "PASS" } else { "FAIL" }, sup.detail);
    println!("{} of {} criteria passed; expected failures: {KNOWN_FAILURES:?}", criteria.len() - failed, criteria.len());
    if !unexpected.is_empty() || !sup.passed {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

/// Criterion 10 with the min constant is refuted by counterexample
/// (Lambda = 1, Gamma = 3 on A = C: M = 16/9, ratio 4). It still prints FAIL;
/// the run errors if it ever passes, or if any other criterion fails.
const KNOWN_FAILURES: [usize; 1] = [10];

fn to_mat(m: &CMatrix<f64>) -> oracle::Mat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn rel(a: &oracle::Mat, b: &oracle::Mat) -> f64 {
    oracle::max_abs_diff(a, b) / oracle::max_abs(a).max(oracle::max_abs(b)).max(1.0)
}

fn oracle_gram(f: &OperatorFamily) -> oracle::Mat {
    let n = f.domain().flat_width();
    let mut g = oracle::zeros(n, n);
    for (node, map) in f.space().nodes().iter().zip(f.maps()) {
        let m = to_mat(map.action());
        g = oracle::add(&g, &oracle::scale(&oracle::matmul(&m, &oracle::adjoint(&m)), oracle::c(node.weight, 0.0)));
    }
    g
}

fn shape(k: usize, d: usize) -> ModuleShape {
    ModuleShape::new(k, d).unwrap()
}

fn random_shape(rng: &mut SampleRng) -> ModuleShape {
    use rand::Rng;
    shape(rng.random_range(1..=3), rng.random_range(1..=2))
}

/// Gaussian family on counting(3) or on a 4-point midpoint grid, alternating.
fn random_frame(i: usize, rng: &mut SampleRng) -> OperatorFamily {
    let s = random_shape(rng);
    let space = if i % 2 == 0 { MeasureSpace::counting(3).unwrap() } else { MeasureSpace::uniform_grid(0.0, 1.0, 4).unwrap() };
    sampling::random_family(space, s, s.d, rng)
}

fn c01_cstar_axioms() -> Outcome {
    let mut rng = sampling::rng(SEED + 1);
    let (mut inv_dev, mut cstar_dev, mut norm_dev) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..200 {
        let k = 1 + i % 6;
        let a: AlgebraElement = sampling::random_element(k, &mut rng);
        let b: AlgebraElement = sampling::random_element(k, &mut rng);
        let lam = sampling::complex_normal::<f64>(&mut rng);
        let (am, bm) = (to_mat(a.entries()), to_mat(b.entries()));
        inv_dev = inv_dev
            .max(oracle::max_abs_diff(&to_mat(a.involution().entries()), &oracle::adjoint(&am)))
            .max(oracle::max_abs_diff(&to_mat(a.involution().involution().entries()), &am))
            .max(oracle::max_abs_diff(
                &to_mat((&a + &b).involution().entries()),
                &to_mat((&a.involution() + &b.involution()).entries()),
            ))
            .max(oracle::max_abs_diff(
                &to_mat(a.scale(lam).involution().entries()),
                &to_mat(a.involution().scale(lam.conj()).entries()),
            ))
            .max(oracle::max_abs_diff(
                &to_mat((&a * &b).involution().entries()),
                &oracle::matmul(&oracle::adjoint(&bm), &oracle::adjoint(&am)),
            ));
        let n = a.norm();
        let scale = (n * n).max(1.0);
        cstar_dev = cstar_dev.max(((&a.involution() * &a).norm() - n * n).abs() / scale);
        norm_dev = norm_dev.max((n - oracle::spectral_norm(&am)).abs() / n.max(1.0));
    }
    outcome(
        inv_dev <= INVOLUTION_ATOL && cstar_dev <= CSTAR_RTOL && norm_dev <= CSTAR_RTOL,
        format!("200 elements, k in 1..6: involution dev {inv_dev:.2e}, C*-identity rel dev {cstar_dev:.2e}, norm vs oracle {norm_dev:.2e}"),
    )
}

fn c02_module_loewner() -> Outcome {
    use rand::Rng;
    let mut rng = sampling::rng(SEED + 2);
    let mut violations = 0;
    let mut axiom_dev = 0.0f64;
    for _ in 0..200 {
        let s = random_shape(&mut rng);
        let s2 = shape(s.k, rng.random_range(1..=3));
        let t: ModuleMap = sampling::random_map(s, s2, &mut rng);
        let x: ModuleVector = sampling::random_vector(s, &mut rng);
        let y: ModuleVector = sampling::random_vector(s, &mut rng);
        let a: AlgebraElement = sampling::random_element(s.k, &mut rng);
        // <ax + y, z> = a<x,z> + <y,z> and <x,y>* = <y,x>
        let lhs = x.module_action(&a).unwrap().add(&y).unwrap().inner_product(&x).unwrap();
        let rhs = &(&a * &x.inner_product(&x).unwrap()) + &y.inner_product(&x).unwrap();
        axiom_dev = axiom_dev.max(rel(&to_mat(lhs.entries()), &to_mat(rhs.entries())));
        axiom_dev = axiom_dev.max(rel(
            &to_mat(x.inner_product(&y).unwrap().involution().entries()),
            &to_mat(y.inner_product(&x).unwrap().entries()),
        ));

        let xm = to_mat(x.flat());
        let txm = oracle::matmul(&xm, &to_mat(t.action()));
        let q = oracle::matmul(&txm, &oracle::adjoint(&txm));
        let tn = oracle::spectral_norm(&to_mat(t.action()));
        let p = oracle::scale(&oracle::matmul(&xm, &oracle::adjoint(&xm)), oracle::c(tn * tn, 0.0));
        let tol = LOEWNER_RTOL * oracle::spectral_norm(&p).max(1.0);
        let tx = t.apply(&x).unwrap();
        let lib = tx.inner_product(&tx).unwrap().loewner_leq(&x.inner_product(&x).unwrap().scale_real(t.norm() * t.norm()), tol).unwrap();
        if !oracle::loewner_leq(&q, &p, tol) || !lib {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && axiom_dev <= 1e-12,
        format!("200 (T, x): {violations} Loewner violations; inner-product axiom dev {axiom_dev:.2e}"),
    )
}

fn c03_surjective_iff_bounded_below() -> Outcome {
    use rand::Rng;
    let mut rng = sampling::rng(SEED + 3);
    let (mut agree, mut surjective) = (0, 0);
    for _ in 0..100 {
        let s1 = random_shape(&mut rng);
        let s2 = shape(s1.k, rng.random_range(1..=3));
        let inner = rng.random_range(1..=s1.flat_width().max(s2.flat_width()));
        let action =
            sampling::random_matrix(s1.flat_width(), inner, &mut rng) * sampling::random_matrix(inner, s2.flat_width(), &mut rng);
        let t = ModuleMap::from_action(s1, s2, action).unwrap();
        let adj = t.adjoint();
        // sigma_min of the adjoint from the oracle: the (d'k)-th singular value of M*.
        let sv = oracle::singular_values(&to_mat(adj.action()));
        let sigma = sv.get(s2.flat_width() - 1).copied().unwrap_or(0.0);
        let m = sigma * (1.0 - BOUNDED_BELOW_SHRINK);
        let s = t.is_surjective(t.default_rank_tol());
        if s {
            surjective += 1;
        }
        if s == adj.is_bounded_below(m) {
            agree += 1;
        }
    }
    outcome(agree == 100 && surjective > 0 && surjective < 100, format!("{agree}/100 agree ({surjective} surjective)"))
}

fn c04_gram_sandwich() -> Outcome {
    use rand::Rng;
    let mut rng = sampling::rng(SEED + 4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let s = random_shape(&mut rng);
        let t: ModuleMap = sampling::random_map(s, shape(s.k, s.d + rng.random_range(0..=1)), &mut rng);
        let g = to_mat(&t.gram());
        let ev = oracle::hermitian_eigenvalues(&g);
        let lo = 1.0 / oracle::spectral_norm(&oracle::inverse(&g).unwrap());
        let hi = t.norm() * t.norm();
        worst = worst.max((lo - ev[0]).max(ev[ev.len() - 1] - hi) / hi.max(1.0));
    }
    outcome(worst <= SANDWICH_SLACK, format!("100 full-rank maps: worst eigenvalue excess {worst:.2e}"))
}

fn c05_frame_transform() -> Outcome {
    let mut rng = sampling::rng(SEED + 5);
    let (mut adj_dev, mut norm_dev, mut rank_fail) = (0.0f64, 0.0f64, 0);
    for i in 0..100 {
        let f = random_frame(i, &mut rng);
        let ev = oracle::hermitian_eigenvalues(&oracle_gram(&f));
        let an = f.analysis_map();
        let syn = f.synthesis_map();
        if !(ev[0] > 0.0 && an.is_injective(an.default_rank_tol()) && syn.is_surjective(syn.default_rank_tol())) {
            rank_fail += 1;
        }
        let b = ev[ev.len() - 1].sqrt();
        norm_dev = norm_dev.max((f.frame_transform_norm() - b).abs() / b);
        let x = sampling::random_vector(f.domain(), &mut rng);
        let blocks = f.maps().iter().map(|m| sampling::random_vector(m.codomain(), &mut rng)).collect();
        let c = CoefficientField::new(f.space().clone(), blocks).unwrap();
        let lhs = f.analysis(&x).unwrap().inner_product(&c).unwrap();
        let rhs = x.inner_product(&f.synthesis(&c).unwrap()).unwrap();
        adj_dev = adj_dev.max(rel(&to_mat(lhs.entries()), &to_mat(rhs.entries())));
    }
    outcome(
        rank_fail == 0 && adj_dev <= ADJOINT_RTOL && norm_dev <= NORM_RTOL,
        format!("100 frames: {rank_fail} rank failures, adjoint identity dev {adj_dev:.2e}, | ||T|| - b | rel {norm_dev:.2e}"),
    )
}

fn c06_frame_operator() -> Outcome {
    let mut rng = sampling::rng(SEED + 6);
    let (mut herm, mut neg, mut tight, mut sandwich_fail) = (0.0f64, 0.0f64, 0.0f64, 0);
    for i in 0..100 {
        let f = random_frame(i, &mut rng);
        let op = f.frame_operator();
        let g = to_mat(op.gram());
        let gn = oracle::spectral_norm(&g);
        herm = herm.max(oracle::max_abs_diff(&g, &oracle::adjoint(&g)) / gn);
        let ev = oracle::hermitian_eigenvalues(&g);
        neg = neg.max(-ev[0] / gn);
        let b = f.optimal_scalar_bounds(None).bounds().unwrap().promote(f.domain().k).unwrap();
        let nc = f.frame_operator_norm_check(&b);
        if !(nc.lower <= nc.s_norm * (1.0 + NORM_RTOL) && nc.s_norm <= nc.upper * (1.0 + NORM_RTOL)) {
            sandwich_fail += 1;
        }
        tight = tight.max((nc.upper - gn).abs() / gn);
    }
    outcome(
        herm <= GRAM_RTOL && neg <= GRAM_RTOL && sandwich_fail == 0 && tight <= NORM_RTOL,
        format!("100 frames: hermitian dev {herm:.2e}, -lambda_min/||G|| {neg:.2e}, {sandwich_fail} sandwich failures, upper tightness {tight:.2e}"),
    )
}

fn c07_reconstruction() -> Outcome {
    let mut rng = sampling::rng(SEED + 7);
    let (mut worst, mut done, mut drawn) = (0.0f64, 0, 0);
    while done < 100 {
        drawn += 1;
        let f = random_frame(drawn, &mut rng);
        if oracle::hermitian_eigenvalues(&oracle_gram(&f))[0] < RECONSTRUCT_MIN_LAMBDA {
            continue;
        }
        let x = sampling::random_vector(f.domain(), &mut rng);
        let xr = f.reconstruct(&f.analysis(&x).unwrap(), None).unwrap();
        worst = worst.max(xr.sub(&x).unwrap().norm() / x.norm());
        done += 1;
    }
    outcome(worst <= RECONSTRUCT_RTOL, format!("100 frames (of {drawn} drawn) with lambda_min >= 0.1: worst rel error {worst:.2e}"))
}

fn c08_transform() -> Outcome {
    let mut rng = sampling::rng(SEED + 8);
    let (mut dev, mut refuted, mut exact) = (0.0f64, 0, 0);
    for i in 0..100 {
        let f = random_frame(i, &mut rng);
        let t = sampling::random_invertible_map(f.domain(), &mut rng);
        let tf = f.transform_family(&t, None).unwrap();
        let tm = to_mat(t.action());
        let expected = oracle::matmul(&oracle::matmul(&tm, &oracle_gram(&f)), &oracle::adjoint(&tm));
        dev = dev.max(rel(&to_mat(tf.frame_operator().gram()), &expected));
        let b = f.optimal_scalar_bounds(None).bounds().unwrap().promote(f.domain().k).unwrap();
        let tb = b.transformed(&t, None).unwrap();
        let cert = tf.verify_star_bounds(&tb, SamplingConfig::new(TRANSFORM_SAMPLES, SEED + i as u64)).unwrap();
        if cert.is_refuted() {
            refuted += 1;
        }
        if matches!(cert.status, starframe::CertificateStatus::VerifiedExact) {
            exact += 1;
        }
    }
    outcome(
        dev <= TRANSFORM_RTOL && refuted == 0,
        format!("100 (frame, T): T G T* rel dev {dev:.2e}; {refuted} refuted ({exact} decided exactly, {TRANSFORM_SAMPLES} probes otherwise)"),
    )
}

fn c09_dual() -> Outcome {
    let mut rng = sampling::rng(SEED + 9);
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let f = random_frame(i, &mut rng);
        let g = oracle_gram(&f);
        let dual = f.canonical_dual(None).unwrap();
        d1 = d1.max(rel(&to_mat(dual.frame_operator().gram()), &oracle::inverse(&g).unwrap()));
        let dd = dual.canonical_dual(None).unwrap();
        d2 = d2.max(rel(&to_mat(dd.frame_operator().gram()), &g));
    }
    let s = shape(2, 2);
    let halves = MeasureSpace::custom(vec![QuadratureNode { tag: 0.0, weight: 0.5 }, QuadratureNode { tag: 1.0, weight: 0.5 }]).unwrap();
    let parseval = OperatorFamily::from_fn(halves, s, |_| ModuleMap::identity(s)).unwrap();
    let self_dual = parseval.canonical_dual(None).unwrap().maps() == parseval.maps();
    outcome(
        d1 <= DUAL_RTOL && d2 <= DUAL_DUAL_RTOL && self_dual,
        format!("100 frames: dual gram vs G^-1 {d1:.2e}, dual of dual {d2:.2e}; Parseval self-dual exactly: {self_dual}"),
    )
}

/// Fifty pairs of independent random frames with their optimal bounds.
fn frame_pairs() -> Vec<(OperatorFamily, OperatorFamily, FrameBounds, FrameBounds)> {
    let mut rng = sampling::rng(SEED + 10);
    (0..50)
        .map(|i| {
            let f1 = random_frame(i, &mut rng);
            let f2 = sampling::random_family(f1.space().clone(), f1.domain(), f1.domain().d, &mut rng);
            let k = f1.domain().k;
            let b1 = f1.optimal_scalar_bounds(None).bounds().unwrap().promote(k).unwrap();
            let b2 = f2.optimal_scalar_bounds(None).bounds().unwrap().promote(k).unwrap();
            (f1, f2, b1, b2)
        })
        .collect()
}

fn criterion_run(use_max: bool) -> (usize, f64, Vec<String>) {
    let (mut violated, mut worst_excess, mut examples) = (0, f64::NEG_INFINITY, Vec::new());
    for (i, (f1, f2, b1, b2)) in frame_pairs().iter().enumerate() {
        let m = if use_max { StabilityConstants::new(b1, b2).unwrap().max() } else { stability_constant(b1, b2).unwrap() };
        let r = check_criterion(f1, f2, m, SamplingConfig::new(CRITERION_SAMPLES, SEED + i as u64)).unwrap();
        worst_excess = worst_excess.max(r.max_ratio - m);
        if r.is_violated() || r.max_ratio > m + RATIO_SLACK * m.max(1.0) {
            violated += 1;
            if examples.len() < 3 {
                examples.push(format!("pair {i}: M {m:.4}, ratio {:.4}", r.max_ratio));
            }
        }
    }
    (violated, worst_excess, examples)
}

fn c10_frames_satisfy_criterion() -> Outcome {
    let (violated, worst, examples) = criterion_run(false);
    let mut detail = format!(
        "50 independent frame pairs, M = min constant, {CRITERION_SAMPLES} draws each: {violated} VIOLATED, max(ratio - M) {worst:.3e}"
    );
    if !examples.is_empty() {
        detail.push_str(&format!(" [{}]", examples.join("; ")));
    }
    outcome(violated == 0, detail)
}

fn c10_supplementary_max_constant() -> Outcome {
    let (violated, worst, _) = criterion_run(true);
    outcome(violated == 0, format!("same pairs, M = max constant: {violated} VIOLATED, max(ratio - M) {worst:.3e}"))
}

fn c11_derived_bounds() -> Outcome {
    let (mut checked, mut failed, mut worst) = (0, 0, f64::NEG_INFINITY);
    let mut rng = sampling::rng(SEED + 11);
    let mut pairs = frame_pairs();
    // Small perturbations reach the exact tier more often than independent pairs.
    for i in 0..50 {
        let f1 = random_frame(i, &mut rng);
        let maps = f1
            .maps()
            .iter()
            .map(|m| {
                let noise = sampling::random_matrix(m.action().nrows(), m.action().ncols(), &mut rng) * Complex64::new(0.1, 0.0);
                ModuleMap::from_action(m.domain(), m.codomain(), m.action() + noise).unwrap()
            })
            .collect();
        let f2 = OperatorFamily::new(f1.space().clone(), f1.domain(), maps).unwrap();
        let k = f1.domain().k;
        let b1 = f1.optimal_scalar_bounds(None).bounds().unwrap().promote(k).unwrap();
        let b2 = f2.optimal_scalar_bounds(None).bounds().unwrap().promote(k).unwrap();
        pairs.push((f1, f2, b1, b2));
    }
    for (i, (f1, f2, b1, b2)) in pairs.iter().enumerate() {
        let c = StabilityConstants::new(b1, b2).unwrap();
        for m in [c.min(), c.max()] {
            let r = check_criterion(f1, f2, m, SamplingConfig::new(100, SEED + i as u64)).unwrap().with_derived_bounds(b1).unwrap();
            if let (Verdict::HoldsSufficient, Some(db)) = (&r.verdict, r.derived_bounds) {
                checked += 1;
                let ev = oracle::hermitian_eigenvalues(&oracle_gram(f2));
                let (lo, hi) = (db.lower * db.lower, db.upper * db.upper);
                let excess = (lo - ev[0]).max(ev[ev.len() - 1] - hi) / hi.max(1.0);
                worst = worst.max(excess);
                if excess > DERIVED_SLACK {
                    failed += 1;
                }
            }
        }
    }
    outcome(
        failed == 0 && checked > 0,
        format!("{checked} HOLDS_SUFFICIENT cases: {failed} failures, worst excess {worst:.2e}"),
    )
}

fn midpoint_b_squared(n: usize) -> f64 {
    let s = shape(1, 1);
    let space = MeasureSpace::uniform_grid(0.0, 1.0, n).unwrap();
    let f = OperatorFamily::from_fn(space, s, |w| ModuleMap::identity(s).scale_real(w)).unwrap();
    let status = f.optimal_scalar_bounds(None).bounds().unwrap();
    status.upper * status.upper
}

fn c12_quadrature() -> Outcome {
    let err = |n: usize| (midpoint_b_squared(n) - 1.0 / 3.0).abs();
    let levels = [10usize, 100, 1000];
    let halving: Vec<f64> = levels.iter().map(|&n| err(n) / err(2 * n)).collect();
    let orders: Vec<f64> = levels.windows(2).map(|w| (err(w[0]) / err(w[1])).log10()).collect();
    let ok = halving.iter().all(|r| (HALVING_RATIO.0..=HALVING_RATIO.1).contains(r))
        && orders.iter().all(|p| (p - 2.0).abs() <= ORDER_TOL)
        && err(1000) <= QUADRATURE_ATOL;
    outcome(
        ok,
        format!(
            "err(n)/err(2n) = {:.4}, {:.4}, {:.4}; order over 10x = {:.4}, {:.4}; |b(1000)^2 - 1/3| = {:.3e}",
            halving[0], halving[1], halving[2], orders[0], orders[1], err(1000)
        ),
    )
}

fn c13_counting() -> Outcome {
    use rand::Rng;
    let mut rng = sampling::rng(SEED + 13);
    let mut mismatches = 0;
    for _ in 0..20 {
        let s = random_shape(&mut rng);
        let n = rng.random_range(1..=6);
        let w = s.flat_width();
        let mut int = |r: usize, c: usize| {
            CMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-9..=9) as f64, rng.random_range(-9..=9) as f64))
        };
        let actions: Vec<CMatrix<f64>> = (0..n).map(|_| int(w, w)).collect();
        let x = int(s.k, w);
        let maps = actions.iter().map(|a| ModuleMap::from_action(s, s, a.clone()).unwrap()).collect();
        let f = OperatorFamily::new(MeasureSpace::counting(n).unwrap(), s, maps).unwrap();

        let mut g = vec![vec![Complex64::new(0.0, 0.0); w]; w];
        let mut frame_sum = vec![vec![Complex64::new(0.0, 0.0); s.k]; s.k];
        for a in &actions {
            for i in 0..w {
                for j in 0..w {
                    for l in 0..w {
                        g[i][j] += a[(i, l)] * a[(j, l)].conj();
                    }
                }
            }
            let y: Vec<Vec<Complex64>> =
                (0..s.k).map(|r| (0..w).map(|c| (0..w).map(|l| x[(r, l)] * a[(l, c)]).sum()).collect()).collect();
            for r in 0..s.k {
                for c in 0..s.k {
                    for l in 0..w {
                        frame_sum[r][c] += y[r][l] * y[c][l].conj();
                    }
                }
            }
        }
        let xv = ModuleVector::from_flat(s, x).unwrap();
        let lib = f.analysis(&xv).unwrap();
        let lib_sum = lib.inner_product(&lib).unwrap();
        if to_mat(f.frame_operator().gram()) != g || to_mat(lib_sum.entries()) != frame_sum {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("20 integer families: {mismatches} bitwise mismatches (frame operator and frame sum)"))
}

fn c14_cli() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let cases = [
        ("bounds", "parseval.json", 0, "ok"),
        ("bounds", "non_scalar_bounds.json", 1, "refuted"),
        ("perturb", "perturb_noisy.json", 0, "ok"),
        ("perturb", "perturb_identical.json", 0, "ok"),
        ("perturb", "min_constant_counterexample.json", 1, "violated"),
    ];
    let mut problems = Vec::new();
    for (cmd, file, want_code, want_status) in cases {
        let p = dir.join(file);
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_starframe"))
                .args([cmd, p.to_str().unwrap(), "--json", "--seed", "42"])
                .output()
                .unwrap()
        };
        let (a, b) = (run(), run());
        if a.stdout != b.stdout {
            problems.push(format!("{cmd} {file}: reports differ"));
        }
        let code = a.status.code().unwrap();
        let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        if code != want_code || code != b.status.code().unwrap() || report["status"] != want_status {
            problems.push(format!("{cmd} {file}: exit {code}, status {}", report["status"]));
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("{} commands run twice: byte-identical reports, exit codes match status", cases.len())
        } else {
            problems.join("; ")
        },
    )
}
