//! Invariant suite behind `starframe selftest`. Every check draws its random
//! inputs from one seeded stream, so a run is reproducible from `(seed, trials)`.
//! The number of random trials per check is `SamplingConfig::samples`.

use starframe::linalg;
use starframe::sampling::{self, SampleRng};
use starframe::stability::check_criterion;
use starframe::{
    AlgebraElement, CMatrix, Complex64, FrameBounds, MeasureSpace, ModuleMap, ModuleShape, OperatorFamily,
    SamplingConfig, StabilityConstants, Verdict,
};

use crate::report::Check;

pub fn run_suite(cfg: SamplingConfig) -> Vec<Check> {
    let mut rng = sampling::rng(cfg.seed);
    let trials = cfg.samples.max(1);
    vec![
        cstar_axioms(trials, &mut rng),
        module_loewner(trials, &mut rng),
        surjective_iff_adjoint_bounded_below(trials, &mut rng),
        gram_sandwich(trials, &mut rng),
        frame_transform(trials, &mut rng),
        frame_operator(trials, &mut rng),
        reconstruction(trials, &mut rng),
        transformed_family(trials, &mut rng),
        canonical_dual(trials, &mut rng),
        perturbation(trials, &mut rng),
        quadrature(),
        counting_exact(&mut rng),
    ]
}

fn shape(k: usize, d: usize) -> ModuleShape {
    ModuleShape::new(k, d).expect("positive dims")
}

fn random_shape(rng: &mut SampleRng) -> ModuleShape {
    use rand::Rng;
    shape(rng.random_range(1..=3), rng.random_range(1..=2))
}

fn frame(rng: &mut SampleRng) -> OperatorFamily {
    let s = random_shape(rng);
    sampling::random_family(MeasureSpace::counting(3).expect("n > 0"), s, s.d, rng)
}

fn worst(name: &str, worst: f64, limit: f64) -> Check {
    Check::new(name, worst <= limit, format!("worst {worst:.3e} (limit {limit:.0e})"))
}

fn rel(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    let scale = linalg::max_abs_entry(a).max(linalg::max_abs_entry(b)).max(1.0);
    linalg::max_abs_entry(&(a - b)) / scale
}

fn cstar_axioms(trials: usize, rng: &mut SampleRng) -> Check {
    use rand::Rng;
    let mut w: f64 = 0.0;
    for _ in 0..trials {
        let k = rng.random_range(1..=6);
        let a: AlgebraElement = sampling::random_element(k, rng);
        let b: AlgebraElement = sampling::random_element(k, rng);
        w = w.max(rel(a.involution().involution().entries(), a.entries()));
        w = w.max(rel((&a * &b).involution().entries(), (&b.involution() * &a.involution()).entries()));
        let n = a.norm();
        w = w.max(((&a.involution() * &a).norm() - n * n).abs() / (n * n).max(1.0));
    }
    worst("involution axioms and C*-identity", w, 1e-10)
}

fn module_loewner(trials: usize, rng: &mut SampleRng) -> Check {
    let mut bad = 0;
    for _ in 0..trials {
        let s = random_shape(rng);
        let t: ModuleMap = sampling::random_map(s, random_shape_with_k(s.k, rng), rng);
        let x = sampling::random_vector(s, rng);
        let tx = t.apply(&x).expect("shape");
        let lhs = tx.inner_product(&tx).expect("shape");
        let rhs = x.inner_product(&x).expect("shape").scale_real(t.norm() * t.norm());
        let tol = 1e-9 * rhs.norm().max(1.0);
        if !lhs.loewner_leq(&rhs, tol).unwrap_or(false) {
            bad += 1;
        }
    }
    Check::new("<Tx,Tx> <= ||T||^2 <x,x>", bad == 0, format!("{bad} violations in {trials}"))
}

fn random_shape_with_k(k: usize, rng: &mut SampleRng) -> ModuleShape {
    use rand::Rng;
    shape(k, rng.random_range(1..=3))
}

fn surjective_iff_adjoint_bounded_below(trials: usize, rng: &mut SampleRng) -> Check {
    use rand::Rng;
    let mut disagree = 0;
    for _ in 0..trials {
        let s1 = random_shape(rng);
        let s2 = random_shape_with_k(s1.k, rng);
        // Low-rank factorizations make a good share of the maps non-surjective.
        let inner = rng.random_range(1..=s1.flat_width().max(s2.flat_width()));
        let action = sampling::random_matrix(s1.flat_width(), inner, rng) * sampling::random_matrix(inner, s2.flat_width(), rng);
        let t = ModuleMap::from_action(s1, s2, action).expect("shape");
        let adj = t.adjoint();
        let m = adj.lower_bound_constant() * (1.0 - 1e-6);
        if t.is_surjective(t.default_rank_tol()) != adj.is_bounded_below(m) {
            disagree += 1;
        }
    }
    Check::new("surjective iff adjoint bounded below", disagree == 0, format!("{disagree} disagreements in {trials}"))
}

fn gram_sandwich(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    for _ in 0..trials {
        let s = random_shape(rng);
        let t: ModuleMap = sampling::random_map(s, shape(s.k, s.d + 1), rng);
        let g = t.gram();
        let ev = linalg::hermitian_eigenvalues(&g, 1e-9 * linalg::spectral_norm(&g)).expect("hermitian");
        let inv = linalg::hpd_inverse(&g).expect("injective");
        let lo = 1.0 / linalg::spectral_norm(&inv);
        let hi = t.norm() * t.norm();
        w = w.max((lo - ev[0]).max(ev[ev.len() - 1] - hi) / hi.max(1.0));
    }
    worst("||(T*T)^-1||^-1 <= T*T <= ||T||^2", w, 1e-9)
}

fn frame_transform(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    let mut structural = 0;
    for _ in 0..trials {
        let f = frame(rng);
        let op = f.frame_operator();
        let an = f.analysis_map();
        if !an.is_injective(an.default_rank_tol()) || !f.synthesis_map().is_surjective(an.default_rank_tol()) {
            structural += 1;
        }
        let b = op.lambda_max().sqrt();
        w = w.max((f.frame_transform_norm() - b).abs() / b.max(1.0));
        w = w.max(rel(f.synthesis_map().action(), an.adjoint().action()));
    }
    let mut c = worst("frame transform norm and adjoint", w, 1e-10);
    if structural > 0 {
        c.passed = false;
        c.detail.push_str(&format!("; {structural} rank failures"));
    }
    c
}

fn frame_operator(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    for _ in 0..trials {
        let f = frame(rng);
        let op = f.frame_operator();
        let g = op.gram();
        let scale = op.lambda_max().max(1.0);
        w = w.max(linalg::hermitian_deviation(g) / scale);
        w = w.max(-op.lambda_min() / scale);
        let sb = f.optimal_scalar_bounds(None).bounds().expect("frame");
        let nc = f.frame_operator_norm_check(&sb.promote(f.domain().k).expect("bounds"));
        w = w.max((nc.upper - nc.s_norm).abs() / scale);
        if !nc.holds {
            w = f64::INFINITY;
        }
    }
    worst("frame operator Hermitian, positive, norm-tight", w, 1e-10)
}

fn reconstruction(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    for _ in 0..trials {
        let f = frame(rng);
        let x = sampling::random_vector(f.domain(), rng);
        let c = f.analysis(&x).expect("shape");
        let xr = f.reconstruct(&c, None).expect("frame");
        w = w.max(xr.sub(&x).expect("shape").norm() / x.norm());
    }
    worst("reconstruction round trip", w, 1e-8)
}

fn transformed_family(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    let mut refuted = 0;
    for _ in 0..trials {
        let f = frame(rng);
        let t = sampling::random_invertible_map(f.domain(), rng);
        let tf = f.transform_family(&t, None).expect("invertible");
        let expected = t.action() * f.frame_operator().gram() * t.action().adjoint();
        w = w.max(rel(tf.frame_operator().gram(), &expected));
        let sb = f.optimal_scalar_bounds(None).bounds().expect("frame");
        let tb = sb.promote(f.domain().k).and_then(|b| b.transformed(&t, None)).expect("bounds");
        if tf.verify_star_bounds(&tb, SamplingConfig::new(20, 0)).expect("dims").is_refuted() {
            refuted += 1;
        }
    }
    let mut c = worst("transformed gram T G T* and bounds", w, 1e-10);
    if refuted > 0 {
        c.passed = false;
        c.detail.push_str(&format!("; {refuted} refuted"));
    }
    c
}

fn canonical_dual(trials: usize, rng: &mut SampleRng) -> Check {
    let mut w: f64 = 0.0;
    for _ in 0..trials {
        let f = frame(rng);
        let g = f.frame_operator();
        let dual = f.canonical_dual(None).expect("frame");
        w = w.max(rel(dual.frame_operator().gram(), &g.inverse(None).expect("frame")) / 10.0);
        let dd = dual.canonical_dual(None).expect("frame");
        w = w.max(rel(dd.frame_operator().gram(), g.gram()) / 100.0);
    }
    let s = shape(2, 1);
    let halves = MeasureSpace::custom(vec![
        starframe::QuadratureNode { tag: 0.0, weight: 0.5 },
        starframe::QuadratureNode { tag: 1.0, weight: 0.5 },
    ])
    .expect("weights");
    let parseval = OperatorFamily::from_fn(halves, s, |_| ModuleMap::identity(s)).expect("shape");
    let self_dual = parseval.canonical_dual(None).expect("frame").maps() == parseval.maps();
    let mut c = worst("canonical dual gram and involutivity", w, 1e-10);
    if !self_dual {
        c.passed = false;
        c.detail.push_str("; Parseval family not self-dual");
    }
    c
}

/// Pairs are alternately small perturbations and independent frames. The
/// larger stability constant must never be violated; violations of the
/// smaller one are counted and reported but do not fail the check.
fn perturbation(trials: usize, rng: &mut SampleRng) -> Check {
    let mut violated = 0;
    let mut violated_min = 0;
    let mut derived_fail = 0;
    let mut sufficient = 0;
    for i in 0..trials {
        let f1 = frame(rng);
        let f2 = if i % 2 == 0 {
            let s = f1.domain();
            let maps = f1
                .maps()
                .iter()
                .map(|m| {
                    let noise = sampling::random_matrix(m.action().nrows(), m.action().ncols(), rng) * Complex64::new(0.05, 0.0);
                    ModuleMap::from_action(s, m.codomain(), m.action() + noise).expect("shape")
                })
                .collect();
            OperatorFamily::new(f1.space().clone(), s, maps).expect("shape")
        } else {
            sampling::random_family(f1.space().clone(), f1.domain(), f1.domain().d, rng)
        };
        let k = f1.domain().k;
        let b1: FrameBounds = f1.optimal_scalar_bounds(None).bounds().expect("frame").promote(k).expect("bounds");
        let b2 = match f2.optimal_scalar_bounds(None).bounds() {
            Some(b) => b.promote(k).expect("bounds"),
            None => continue,
        };
        let constants = StabilityConstants::new(&b1, &b2).expect("invertible bounds");
        let cfg = SamplingConfig::new(50, i as u64);
        if check_criterion(&f1, &f2, constants.min(), cfg).expect("criterion").is_violated() {
            violated_min += 1;
        }
        let r = check_criterion(&f1, &f2, constants.max(), cfg)
            .and_then(|r| r.with_derived_bounds(&b1))
            .expect("criterion");
        if r.is_violated() {
            violated += 1;
        }
        if let (Verdict::HoldsSufficient, Some(db)) = (&r.verdict, r.derived_bounds) {
            sufficient += 1;
            let g2 = f2.frame_operator();
            let slack = 1e-9 * (db.upper * db.upper).max(1.0);
            if g2.lambda_min() < db.lower * db.lower - slack || g2.lambda_max() > db.upper * db.upper + slack {
                derived_fail += 1;
            }
        }
    }
    Check::new(
        "perturbation criterion and derived bounds",
        violated == 0 && derived_fail == 0,
        format!(
            "{violated} violated at max M ({violated_min} at min M), {derived_fail} derived-bound failures over {sufficient} sufficient pairs"
        ),
    )
}

/// `b(n)^2` for `Lambda_w = w I` on the midpoint grid of `[0, 1]`.
pub fn midpoint_b_squared(n: usize) -> f64 {
    let s = shape(1, 1);
    let space = MeasureSpace::uniform_grid(0.0, 1.0, n).expect("n > 0");
    let f = OperatorFamily::from_fn(space, s, |w| ModuleMap::identity(s).scale_real(w)).expect("shape");
    f.frame_operator().lambda_max()
}

fn quadrature() -> Check {
    let err = |n| (midpoint_b_squared(n) - 1.0 / 3.0).abs();
    let ratios: Vec<f64> = [10, 100, 1000].iter().map(|&n| err(n) / err(2 * n)).collect();
    let ok = ratios.iter().all(|r| (3.5..=4.5).contains(r)) && err(1000) <= 1e-5;
    Check::new(
        "midpoint b(n)^2 -> 1/3 at second order",
        ok,
        format!("halving ratios {:.4} {:.4} {:.4}, err(1000) {:.3e}", ratios[0], ratios[1], ratios[2], err(1000)),
    )
}

fn counting_exact(rng: &mut SampleRng) -> Check {
    use rand::Rng;
    let s = shape(2, 2);
    let n = 7;
    let actions: Vec<CMatrix<f64>> = (0..n)
        .map(|_| {
            CMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64))
        })
        .collect();
    let maps = actions.iter().map(|a| ModuleMap::from_action(s, s, a.clone()).expect("shape")).collect();
    let f = OperatorFamily::new(MeasureSpace::counting(n).expect("n > 0"), s, maps).expect("shape");
    let mut by_hand = CMatrix::zeros(4, 4);
    for a in &actions {
        for i in 0..4 {
            for j in 0..4 {
                for l in 0..4 {
                    by_hand[(i, j)] += a[(i, l)] * a[(j, l)].conj();
                }
            }
        }
    }
    Check::new("counting measure sums are exact", f.frame_operator().gram() == &by_hand, "bitwise comparison")
}
