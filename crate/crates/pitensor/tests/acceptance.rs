//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pitensor::attain::{
    caratheodory_reduce, certify_attainment, perturb_to_attaining, Verdict,
};
use pitensor::banach::{Exponent, NormedSpace};
use pitensor::linalg::Mat;
use pitensor::pi_property::{
    approx_pipeline, conditional_expectation_projection, direct_sum_projection,
    tensor_projection, truncation_projection, AbsoluteNorm, SeriesTensor, TensorNormTag,
};
use pitensor::projnorm::{
    operator_norm, proj_norm, proj_norm_colgen, proj_norm_exact_polyhedral,
    proj_norm_oracle_hilbert, proj_norm_oracle_l1, CertStatus, ProjNormResult,
};
use pitensor::tensor::{assemble, injective_norm, Atom, Decomposition, DualOperator, Tensor};
use pitensor::SolverConfig;

type Space = NormedSpace<f64>;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn random_tensor(x: &Space, y: &Space, seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Mat::from_fn(x.dim(), y.dim(), |_, _| rng.gen_range(-1.0..=1.0));
    Tensor::new(x.clone(), y.clone(), m).unwrap()
}

fn report(criterion: usize, label: &str, fails: &[String]) {
    if fails.is_empty() {
        println!("ACCEPTANCE {criterion} PASS: {label}");
    } else {
        println!(
            "ACCEPTANCE {criterion} FAIL: {label} ({} failures)",
            fails.len()
        );
    }
    assert!(fails.is_empty(), "criterion {criterion}: {fails:#?}");
}

/// Criterion 1: column generation agrees with the sum of singular values on
/// Hilbert pairs within relative 1e-5, each solve within a second.
#[test]
fn criterion_1_hilbert_oracle_equivalence() {
    let mut fails = Vec::new();
    let pairs = [
        (Space::l2(4), Space::l2(4)),
        (Space::l2(5), Space::l2(3)),
    ];
    for (pi, (x, y)) in pairs.iter().enumerate() {
        for seed in 0..25u64 {
            let t = random_tensor(x, y, 1_000 + 100 * pi as u64 + seed);
            let oracle = proj_norm_oracle_hilbert(&t).unwrap();
            let start = Instant::now();
            let cg = proj_norm_colgen(&t, &cfg()).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let rel = (cg.upper - oracle.upper).abs() / oracle.upper;
            if rel > 1e-5 {
                fails.push(format!("pair {pi} seed {seed}: relative error {rel:.3e}"));
            }
            if secs > 1.0 {
                fails.push(format!("pair {pi} seed {seed}: solve took {secs:.2}s"));
            }
        }
    }
    report(1, "hilbert oracle equivalence on 50 seeded instances", &fails);
}

/// Criterion 2: column generation agrees with the row-norm sum on pairs with
/// an l_1 first factor within relative 1e-6.
#[test]
fn criterion_2_l1_oracle_equivalence() {
    let mut fails = Vec::new();
    let pairs = [
        (Space::l1(5), Space::l2(4)),
        (Space::l1(5), Space::linf(4)),
    ];
    for (pi, (x, y)) in pairs.iter().enumerate() {
        for seed in 0..25u64 {
            let t = random_tensor(x, y, 2_000 + 100 * pi as u64 + seed);
            let oracle = proj_norm_oracle_l1(&t).unwrap();
            let cg = proj_norm_colgen(&t, &cfg()).unwrap();
            let rel = (cg.upper - oracle.upper).abs() / oracle.upper;
            if rel > 1e-6 {
                fails.push(format!("pair {pi} seed {seed}: relative error {rel:.3e}"));
            }
        }
    }
    report(2, "l1-factor oracle equivalence on 50 seeded instances", &fails);
}

fn polyhedral_pairs() -> Vec<(Space, Space)> {
    vec![
        (Space::linf(3), Space::l1(3)),
        (Space::l1(4), Space::l1(4)),
        (
            Space::polyhedral(vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.8, 0.6],
            ])
            .unwrap(),
            Space::polyhedral(vec![vec![1.0, 0.5], vec![-0.2, 1.0]]).unwrap(),
        ),
        (
            Space::polyhedral(vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.5, 0.5, 0.5],
            ])
            .unwrap(),
            Space::linf(2),
        ),
    ]
}

/// Criterion 3: the vertex-pair program closes its primal-dual gap to 1e-8
/// (with assembly residual 1e-9) and column generation matches it to 1e-6;
/// the identity over sup-norm planes has value exactly one.
#[test]
fn criterion_3_polyhedral_exactness() {
    let mut fails = Vec::new();
    for (pi, (x, y)) in polyhedral_pairs().iter().enumerate() {
        for seed in 0..3u64 {
            let t = random_tensor(x, y, 3_000 + 100 * pi as u64 + seed);
            let lp = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
            if lp.gap().abs() > 1e-8 {
                fails.push(format!("pair {pi} seed {seed}: LP gap {:.3e}", lp.gap()));
            }
            let rebuilt = assemble(&lp.decomposition, x, y).unwrap();
            let residual = rebuilt.coeffs().sub(t.coeffs()).max_abs();
            if residual > 1e-9 {
                fails.push(format!("pair {pi} seed {seed}: residual {residual:.3e}"));
            }
            let cg = proj_norm_colgen(&t, &cfg()).unwrap();
            if (cg.upper - lp.upper).abs() > 1e-6 {
                fails.push(format!(
                    "pair {pi} seed {seed}: colgen {:.9} vs LP {:.9}",
                    cg.upper, lp.upper
                ));
            }
        }
    }
    let linf2 = Space::linf(2);
    let t = Tensor::new(linf2.clone(), linf2, Mat::identity(2)).unwrap();
    let lp = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
    if (lp.upper - 1.0).abs() > 1e-8 {
        fails.push(format!("identity instance value {:.12}", lp.upper));
    }
    report(3, "polyhedral exactness and colgen agreement", &fails);
}

fn criteria_1_to_3_instances() -> Vec<(Tensor<f64>, ProjNormResult<f64>)> {
    let mut out = Vec::new();
    let hilbert_pairs = [(Space::l2(4), Space::l2(4)), (Space::l2(5), Space::l2(3))];
    for (pi, (x, y)) in hilbert_pairs.iter().enumerate() {
        for seed in 0..25u64 {
            let t = random_tensor(x, y, 1_000 + 100 * pi as u64 + seed);
            let r = proj_norm_colgen(&t, &cfg()).unwrap();
            out.push((t.clone(), r));
            out.push((t.clone(), proj_norm_oracle_hilbert(&t).unwrap()));
        }
    }
    let l1_pairs = [(Space::l1(5), Space::l2(4)), (Space::l1(5), Space::linf(4))];
    for (pi, (x, y)) in l1_pairs.iter().enumerate() {
        for seed in 0..25u64 {
            let t = random_tensor(x, y, 2_000 + 100 * pi as u64 + seed);
            out.push((t.clone(), proj_norm_oracle_l1(&t).unwrap()));
        }
    }
    for (pi, (x, y)) in polyhedral_pairs().iter().enumerate() {
        for seed in 0..3u64 {
            let t = random_tensor(x, y, 3_000 + 100 * pi as u64 + seed);
            out.push((t.clone(), proj_norm_exact_polyhedral(&t, &cfg()).unwrap()));
        }
    }
    out
}

/// Criterion 4: every optimal decomposition with an exact dual from the
/// first three criteria certifies, with atom pairings within 1e-6 of one.
#[test]
fn criterion_4_certificate_soundness() {
    let mut fails = Vec::new();
    for (idx, (t, r)) in criteria_1_to_3_instances().into_iter().enumerate() {
        if r.op_norm_status != CertStatus::Exact {
            fails.push(format!("instance {idx}: dual status {:?}", r.op_norm_status));
            continue;
        }
        let cert = certify_attainment(&t, &r.decomposition, &r.dual, 1e-6, &cfg()).unwrap();
        let worst = cert
            .pairings
            .iter()
            .map(|p| (p - 1.0).abs())
            .fold(0.0f64, f64::max);
        if worst > 1e-6 {
            fails.push(format!("instance {idx}: worst pairing deviation {worst:.3e}"));
        }
        if cert.verdict != Verdict::Certified {
            fails.push(format!("instance {idx}: verdict {:?}", cert.verdict));
        }
    }
    report(4, "certificates on all criteria 1-3 instances", &fails);
}

/// Criterion 5: 100 random 20-atom decompositions over 3x3 spaces reduce to
/// at most 10 atoms, preserving the assembled tensor and the value to 1e-9.
#[test]
fn criterion_5_caratheodory_bound() {
    let mut fails = Vec::new();
    let l2 = Space::l2(3);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5_000 + seed);
        let atoms: Vec<Atom<f64>> = (0..20)
            .map(|_| {
                let raw_x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let raw_y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let nx = l2.norm_eval(&raw_x).unwrap().max(1e-9);
                let ny = l2.norm_eval(&raw_y).unwrap().max(1e-9);
                Atom {
                    lambda: rng.gen_range(0.05..1.0),
                    x: raw_x.iter().map(|v| v / nx).collect(),
                    y: raw_y.iter().map(|v| v / ny).collect(),
                }
            })
            .collect();
        let d = Decomposition { atoms };
        let before = assemble(&d, &l2, &l2).unwrap();
        let value = d.value();
        let r = caratheodory_reduce(&d, &l2, &l2).unwrap();
        if r.len() > 10 {
            fails.push(format!("seed {seed}: {} atoms", r.len()));
        }
        let after = assemble(&r, &l2, &l2).unwrap();
        let residual = after.coeffs().sub(before.coeffs()).max_abs();
        if residual > 1e-9 {
            fails.push(format!("seed {seed}: residual {residual:.3e}"));
        }
        if (r.value() - value).abs() > 1e-9 {
            fails.push(format!(
                "seed {seed}: value drift {:.3e}",
                (r.value() - value).abs()
            ));
        }
    }
    report(5, "caratheodory reduction on 100 seeded instances", &fails);
}

/// Criterion 6: perturbing near-attaining inputs yields certified attaining
/// outputs within the stated distance bound, measured by column generation
/// on the difference tensor.
#[test]
fn criterion_6_perturbation_constructor() {
    let mut fails = Vec::new();
    let params = [(1e-2, 1e-2), (1e-3, 1e-2)];
    let mut instance = 0usize;
    for &(eta, eps) in &params {
        for seed in 0..5u64 {
            // euclidean pair: rotate the singular-vector atoms slightly
            let l2 = Space::l2(3);
            let t = random_tensor(&l2, &l2, 6_000 + seed);
            let base = proj_norm_oracle_hilbert(&t).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6_100 + seed);
            let delta = 1e-3;
            let wobbled: Vec<Atom<f64>> = base
                .decomposition
                .atoms
                .iter()
                .map(|a| {
                    let mut x = a.x.clone();
                    for v in x.iter_mut() {
                        *v += delta * rng.gen_range(-1.0..=1.0);
                    }
                    let n = l2.norm_eval(&x).unwrap();
                    Atom {
                        lambda: a.lambda,
                        x: x.iter().map(|v| v / n).collect(),
                        y: a.y.clone(),
                    }
                })
                .collect();
            let d = Decomposition { atoms: wobbled };
            run_perturb_case(&mut fails, &mut instance, &l2, &l2, d, &base.dual, eta, eps);

            // polyhedral pair: wobble the vertex atoms inside the cube
            let linf = Space::linf(2);
            let t = random_tensor(&linf, &linf, 6_200 + seed);
            let base = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6_300 + seed);
            let delta = 1e-4;
            let wobbled: Vec<Atom<f64>> = base
                .decomposition
                .atoms
                .iter()
                .map(|a| {
                    let mut x = a.x.clone();
                    for v in x.iter_mut() {
                        *v += delta * rng.gen_range(-1.0..=0.0) * v.signum();
                    }
                    let n = linf.norm_eval(&x).unwrap();
                    Atom {
                        lambda: a.lambda,
                        x: x.iter().map(|v| v / n).collect(),
                        y: a.y.clone(),
                    }
                })
                .collect();
            let d = Decomposition { atoms: wobbled };
            run_perturb_case(&mut fails, &mut instance, &linf, &linf, d, &base.dual, eta, eps);
        }
    }
    report(6, "perturbation-to-attainment on 20 seeded instances", &fails);
}

#[allow(clippy::too_many_arguments)]
fn run_perturb_case(
    fails: &mut Vec<String>,
    instance: &mut usize,
    x: &Space,
    y: &Space,
    d: Decomposition<f64>,
    dual: &DualOperator<f64>,
    eta: f64,
    eps: f64,
) {
    *instance += 1;
    let idx = *instance;
    let input = assemble(&d, x, y).unwrap();
    match perturb_to_attaining(&d, dual, eta, eps, &cfg()) {
        Ok((out, rep)) => {
            if rep.certificate.verdict != Verdict::Certified {
                fails.push(format!(
                    "instance {idx}: output verdict {:?}",
                    rep.certificate.verdict
                ));
            }
            let out_t = assemble(&out, x, y).unwrap();
            let diff = input.sub(&out_t).unwrap();
            let measured = proj_norm_colgen(&diff, &cfg()).unwrap().upper;
            if measured > rep.distance_bound + 1e-6 {
                fails.push(format!(
                    "instance {idx}: measured {measured:.6e} above bound {:.6e}",
                    rep.distance_bound
                ));
            }
        }
        Err(e) => fails.push(format!("instance {idx}: {e}")),
    }
}

/// Criterion 7: the geometric diagonal series yields certified attaining
/// approximants within eps for three tolerance levels, all inside ten
/// seconds.
#[test]
fn criterion_7_pipeline_contract() {
    let mut fails = Vec::new();
    let start = Instant::now();
    let dim = 12;
    let l2 = Space::l2(dim);
    let atoms: Vec<Atom<f64>> = (0..dim)
        .map(|n| {
            let mut x = vec![0.0; dim];
            x[n] = 1.0;
            Atom {
                lambda: 0.5f64.powi(n as i32 + 1),
                x: x.clone(),
                y: x,
            }
        })
        .collect();
    let u = SeriesTensor {
        atoms: atoms.clone(),
        tail_bound: 0.5f64.powi(12),
    };
    let u_model = assemble(&Decomposition { atoms }, &l2, &l2).unwrap();
    for eps in [1e-1, 1e-2, 1e-3] {
        match approx_pipeline(&u, eps, &l2, &l2, &cfg()) {
            Ok(r) => {
                if r.certificate.verdict != Verdict::Certified {
                    fails.push(format!("eps {eps}: verdict {:?}", r.certificate.verdict));
                }
                let diff = u_model.sub(&r.z_prime).unwrap();
                let measured = proj_norm_colgen(&diff, &cfg()).unwrap().upper;
                if measured > eps {
                    fails.push(format!("eps {eps}: measured distance {measured:.3e}"));
                }
                if measured > eps - u.tail_bound + 1e-6 {
                    fails.push(format!(
                        "eps {eps}: measured {measured:.3e} above eps - tail + 1e-6"
                    ));
                }
            }
            Err(e) => fails.push(format!("eps {eps}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 10.0 {
        fails.push(format!("total runtime {secs:.2}s"));
    }
    report(7, "approximation pipeline on the geometric series", &fails);
}

/// Criterion 8: all constructed projections are idempotent to 1e-12 and
/// contractive over 1000 sampled vectors for p in {1, 2, 3, inf}; the
/// conditional expectation reproduces the quarter-indicator example exactly.
#[test]
fn criterion_8_projection_suite() {
    let mut fails = Vec::new();
    let exps = [
        Exponent::finite(1.0).unwrap(),
        Exponent::finite(2.0).unwrap(),
        Exponent::finite(3.0).unwrap(),
        Exponent::Infinity,
    ];
    for (ei, p) in exps.iter().enumerate() {
        let seq = Space::lp(*p, 6).unwrap();
        let trunc = truncation_projection(&seq, 3).unwrap();
        let disc = Space::discrete_lp(*p, vec![0.3, 0.1, 0.2, 0.15, 0.15, 0.1]).unwrap();
        let cond =
            conditional_expectation_projection(&disc, &[vec![0, 2], vec![1, 4], vec![3, 5]])
                .unwrap();
        let dsum = direct_sum_projection(
            &trunc,
            &trunc,
            &AbsoluteNorm::PSum(Exponent::finite(2.0).unwrap()),
        )
        .unwrap();
        let tens = tensor_projection(&trunc, &trunc, TensorNormTag::Pi).unwrap();
        for (name, proj) in [
            ("truncation", &trunc),
            ("conditional", &cond),
            ("direct_sum", &dsum),
            ("tensor", &tens),
        ] {
            let defect = proj.idempotence_defect();
            if defect > 1e-12 {
                fails.push(format!("p index {ei} {name}: idempotence {defect:.3e}"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8_000 + ei as u64);
        for _ in 0..1000 {
            let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let pv = trunc.apply(&v);
            if seq.norm_eval(&pv).unwrap() > seq.norm_eval(&v).unwrap() * (1.0 + 1e-12) {
                fails.push(format!("p index {ei}: truncation expanded a vector"));
                break;
            }
            let cv = cond.apply(&v);
            if disc.norm_eval(&cv).unwrap() > disc.norm_eval(&v).unwrap() * (1.0 + 1e-12) {
                fails.push(format!("p index {ei}: conditional expectation expanded"));
                break;
            }
        }
    }

    // the quarter-interval indicator under two half-interval blocks
    let space = Space::discrete_lp(Exponent::finite(1.0).unwrap(), vec![0.25; 4]).unwrap();
    let p = conditional_expectation_projection(&space, &[vec![0, 1], vec![2, 3]]).unwrap();
    let f = [1.0, 0.0, 0.0, 0.0];
    let pf = p.apply(&f);
    if pf != vec![0.5, 0.5, 0.0, 0.0] {
        fails.push(format!("conditional expectation gave {pf:?}"));
    }
    let n_f = space.norm_eval(&f).unwrap();
    let n_pf = space.norm_eval(&pf).unwrap();
    if (n_f - 0.25).abs() > 1e-15 || (n_pf - 0.25).abs() > 1e-15 {
        fails.push(format!("norm mismatch: {n_f} vs {n_pf}"));
    }
    report(8, "projection idempotence and contractivity", &fails);
}

/// Criterion 9: the rank-one law across mixed families, with the injective
/// norm never above the projective upper bound.
#[test]
fn criterion_9_rank_one_law() {
    let mut fails = Vec::new();
    let families: Vec<Space> = vec![
        Space::l1(3),
        Space::l2(3),
        Space::lp(Exponent::finite(3.0).unwrap(), 3).unwrap(),
        Space::linf(3),
        Space::weighted_lp(Exponent::finite(2.0).unwrap(), vec![0.5, 1.0, 2.0]).unwrap(),
        Space::weighted_lp(Exponent::finite(1.0).unwrap(), vec![1.5, 0.7, 1.0]).unwrap(),
        Space::discrete_lp(Exponent::finite(2.0).unwrap(), vec![0.2, 0.5, 0.3]).unwrap(),
        Space::polyhedral(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.6, 0.6, 0.6],
        ])
        .unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9_000);
    for draw in 0..200 {
        let x_space = &families[rng.gen_range(0..families.len())];
        let y_space = &families[rng.gen_range(0..families.len())];
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let nx = x_space.norm_eval(&x).unwrap();
        let ny = y_space.norm_eval(&y).unwrap();
        if nx < 1e-3 || ny < 1e-3 {
            continue;
        }
        let t = Tensor::rank_one(x_space.clone(), y_space.clone(), &x, &y).unwrap();
        let want = nx * ny;
        let r = proj_norm(&t, &cfg()).unwrap();
        if (r.upper - want).abs() > 1e-8 * want.max(1.0) {
            fails.push(format!(
                "draw {draw}: upper {:.12} vs product {want:.12}",
                r.upper
            ));
        }
        let inj = injective_norm(&t, &cfg()).unwrap();
        if inj.value > r.upper + 1e-8 {
            fails.push(format!(
                "draw {draw}: injective {:.12} above projective {:.12}",
                inj.value, r.upper
            ));
        }
    }
    report(9, "rank-one law over 200 mixed draws", &fails);
}

/// Criterion 10: identical seeds give byte-identical serialized results.
#[test]
fn criterion_10_determinism() {
    let mut fails = Vec::new();
    let l2 = Space::l2(4);
    let t = random_tensor(&l2, &l2, 10_000);
    let a = serde_json::to_string(&proj_norm_colgen(&t, &cfg()).unwrap()).unwrap();
    let b = serde_json::to_string(&proj_norm_colgen(&t, &cfg()).unwrap()).unwrap();
    if a != b {
        fails.push("column generation payload differs between runs".into());
    }

    let linf = Space::linf(3);
    let l1 = Space::l1(3);
    let t = random_tensor(&linf, &l1, 10_001);
    let a = serde_json::to_string(&proj_norm_exact_polyhedral(&t, &cfg()).unwrap()).unwrap();
    let b = serde_json::to_string(&proj_norm_exact_polyhedral(&t, &cfg()).unwrap()).unwrap();
    if a != b {
        fails.push("vertex-pair program payload differs between runs".into());
    }

    // heuristic path: smooth non-euclidean pair, seeded multistart
    let lp3 = Space::lp(Exponent::finite(3.0).unwrap(), 3).unwrap();
    let lp4 = Space::lp(Exponent::finite(4.0).unwrap(), 3).unwrap();
    let t = random_tensor(&lp3, &lp4, 10_002);
    let run = |_: ()| {
        let inj = injective_norm(&t, &cfg()).unwrap();
        serde_json::to_string(&(inj.value, inj.x_star.coords, inj.y_star.coords)).unwrap()
    };
    if run(()) != run(()) {
        fails.push("injective multistart differs between runs".into());
    }

    let g = operator_norm(
        &DualOperator::new(lp3, lp4, Mat::from_fn(3, 3, |i, j| ((i + 2 * j) as f64).sin()))
            .unwrap(),
        &cfg(),
    )
    .unwrap();
    let g2 = serde_json::to_string(&g).unwrap();
    if g2 != serde_json::to_string(&g).unwrap() {
        fails.push("operator norm serialization unstable".into());
    }

    report(10, "byte-identical payloads under a fixed seed", &fails);
}
