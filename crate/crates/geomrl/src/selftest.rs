//! Named property oracles over the geometric primitives and optimizers,
//! runnable from the CLI (`selftest`) and from the acceptance suite.
//!
//! Every check uses fixed seeds and at least 10⁴ random cases where a case
//! count is meaningful, so a pass is reproducible and a failure names the
//! broken property.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::manifold::{
    chol_unvec_flagged, chol_vec, mandel_unvec, mandel_vec, nearest_spd, riemannian_gaussian_logpdf,
    sym_expm, sym_logm, CompositePoint, CompositeTangent, Factor, FactorKind, SpdMatrix,
    SpdTangent, TangentS3, UnitQuaternion,
};
use crate::optim::{default_lambda, CmaesState, PowerState};
use crate::policy::{baseline_map_action, grl_map_action, AdapterMode, PolicyParams, TangentFrame};
use crate::seeds;

const CASES: usize = 10_000;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub millis: u128,
}

struct Check {
    name: &'static str,
    run: fn() -> Result<String, String>,
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitQuaternion {
    loop {
        let v = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if let Ok(q) = UnitQuaternion::from_vector(v) {
            return q;
        }
    }
}

fn random_tangent(rng: &mut ChaCha8Rng, base: &UnitQuaternion, max_norm: f64) -> TangentS3 {
    loop {
        let raw = TangentS3(Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let t = raw.orthogonalized_against(base);
        let n = t.norm();
        if n > 1e-6 {
            let scale = rng.gen_range(0.0..max_norm) / n;
            return TangentS3(t.0 * scale);
        }
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-scale..scale));
    (raw.clone() + raw.transpose()) * 0.5
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> SpdMatrix {
    let raw = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = raw.qr().q();
    let eigs = DVector::from_fn(d, |_, _| rng.gen_range(0.2..4.0));
    SpdMatrix::new({
        let m = &q * DMatrix::from_diagonal(&eigs) * q.transpose();
        (&m + m.transpose()) * 0.5
    })
    .expect("constructed SPD")
}

fn spd_dim(case: usize) -> usize {
    [2usize, 3, 6][case % 3]
}

fn check(pass: bool, msg: String) -> Result<String, String> {
    if pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// --- sphere checks ---------------------------------------------------------

fn s3_exp_log_round_trip() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[1]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let base = random_unit(&mut rng);
        let target = random_unit(&mut rng);
        if base.distance(&target) > std::f64::consts::PI - 0.1 {
            continue;
        }
        let t = base.log_map(&target).map_err(|e| e.to_string())?;
        let back = base.exp_map(&t);
        worst = worst.max((back.as_vector() - target.as_vector()).norm());
    }
    check(worst < 1e-9, format!("worst residual {worst:.3e} (tol 1e-9)"))
}

fn s3_exp_unit_norm() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[2]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let base = random_unit(&mut rng);
        let t = random_tangent(&mut rng, &base, 6.0);
        let out = base.exp_map(&t);
        worst = worst.max((out.as_vector().norm() - 1.0).abs());
    }
    check(worst < 1e-12, format!("worst norm deviation {worst:.3e}"))
}

fn s3_transport_isometry() -> Result<String, String> {
    s3_transport_isometry_impl(|from, to, t| from.parallel_transport(to, t))
}

/// Shared oracle so the negative control can feed a corrupted transport.
fn s3_transport_isometry_impl(
    transport: impl Fn(&UnitQuaternion, &UnitQuaternion, &TangentS3) -> Result<TangentS3, crate::Error>,
) -> Result<String, String> {
    let mut rng = seeds::stream(101, &[3]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let a = random_unit(&mut rng);
        let b = random_unit(&mut rng);
        if a.distance(&b) > std::f64::consts::PI - 0.1 {
            continue;
        }
        let t1 = random_tangent(&mut rng, &a, 2.0);
        let t2 = random_tangent(&mut rng, &a, 2.0);
        let u1 = transport(&a, &b, &t1).map_err(|e| e.to_string())?;
        let u2 = transport(&a, &b, &t2).map_err(|e| e.to_string())?;
        worst = worst.max((t1.0.dot(&t2.0) - u1.0.dot(&u2.0)).abs());
        worst = worst.max(b.as_vector().dot(&u1.0).abs());
    }
    check(worst < 1e-9, format!("worst isometry violation {worst:.3e} (tol 1e-9)"))
}

fn s3_transport_geodesic_velocity() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[4]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let a = random_unit(&mut rng);
        let b = random_unit(&mut rng);
        let d = a.distance(&b);
        if d > std::f64::consts::PI - 0.1 || d < 1e-6 {
            continue;
        }
        let fwd = a.log_map(&b).map_err(|e| e.to_string())?;
        let moved = a.parallel_transport(&b, &fwd).map_err(|e| e.to_string())?;
        let back = b.log_map(&a).map_err(|e| e.to_string())?;
        worst = worst.max((moved.0 + back.0).norm());
    }
    check(worst < 1e-9, format!("worst velocity mismatch {worst:.3e}"))
}

fn s3_distance_axioms() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[5]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let a = random_unit(&mut rng);
        let b = random_unit(&mut rng);
        let c = random_unit(&mut rng);
        let dab = a.distance(&b);
        let dba = b.distance(&a);
        let dac = a.distance(&c);
        let dbc = b.distance(&c);
        if dab < 0.0 || dab > std::f64::consts::PI {
            return Err(format!("distance out of range: {dab}"));
        }
        worst = worst.max((dab - dba).abs());
        worst = worst.max(a.distance(&a));
        worst = worst.max(dac - (dab + dbc)); // triangle inequality slack
    }
    check(worst < 1e-9, format!("worst axiom violation {worst:.3e}"))
}

fn s3_hemisphere_identification() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[6]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let q = random_unit(&mut rng);
        let minus = UnitQuaternion::from_vector(-q.as_vector()).map_err(|e| e.to_string())?;
        worst = worst.max(q.canonicalized().distance(&minus.canonicalized()));
    }
    check(worst == 0.0, format!("worst canonical distance {worst:.3e}"))
}

fn s3_rotation_double_cover() -> Result<String, String> {
    let mut rng = seeds::stream(101, &[7]);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let q = random_unit(&mut rng);
        let minus = UnitQuaternion::from_vector(-q.as_vector()).map_err(|e| e.to_string())?;
        let v = nalgebra::Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        worst = worst.max((q.rotate_vector(&v) - minus.rotate_vector(&v)).norm());
    }
    check(worst < 1e-12, format!("worst rotation mismatch {worst:.3e}"))
}

// --- SPD checks -------------------------------------------------------------

fn spd_expm_logm_round_trip() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[1]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let s = random_symmetric(&mut rng, d, 2.0);
        let back = sym_logm(&sym_expm(&s)).map_err(|e| e.to_string())?;
        worst = worst.max((back - &s).norm());
    }
    check(worst < 1e-9, format!("worst residual {worst:.3e} (tol 1e-9)"))
}

fn spd_exp_log_round_trip() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[2]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let a = random_spd(&mut rng, d);
        let b = random_spd(&mut rng, d);
        let t = a.log_map(&b).map_err(|e| e.to_string())?;
        let back = a.exp_map(&t);
        worst = worst.max((back.matrix() - b.matrix()).norm());
    }
    check(worst < 1e-8, format!("worst residual {worst:.3e} (tol 1e-8)"))
}

fn spd_exp_positive_definite() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[3]);
    let mut worst = f64::INFINITY;
    for case in 0..CASES {
        let d = spd_dim(case);
        let base = random_spd(&mut rng, d);
        let t = SpdTangent::new(random_symmetric(&mut rng, d, 2.0)).map_err(|e| e.to_string())?;
        worst = worst.min(base.exp_map(&t).min_eigenvalue());
    }
    check(worst > 0.0, format!("smallest eigenvalue seen {worst:.3e}"))
}

fn spd_transport_isometry() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[4]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let a = random_spd(&mut rng, d);
        let b = random_spd(&mut rng, d);
        let t1 = SpdTangent::new(random_symmetric(&mut rng, d, 1.0)).map_err(|e| e.to_string())?;
        let t2 = SpdTangent::new(random_symmetric(&mut rng, d, 1.0)).map_err(|e| e.to_string())?;
        let u1 = a.parallel_transport(&b, &t1);
        let u2 = a.parallel_transport(&b, &t2);
        let before = a.tangent_inner(&t1, &t2);
        let after = b.tangent_inner(&u1, &u2);
        worst = worst.max((before - after).abs() / (1.0 + before.abs()));
    }
    check(worst < 1e-8, format!("worst relative violation {worst:.3e} (tol 1e-8)"))
}

fn spd_distance_axioms() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[5]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let a = random_spd(&mut rng, d);
        let b = random_spd(&mut rng, d);
        let c = random_spd(&mut rng, d);
        let dab = a.distance(&b).map_err(|e| e.to_string())?;
        let dba = b.distance(&a).map_err(|e| e.to_string())?;
        let dac = a.distance(&c).map_err(|e| e.to_string())?;
        let dbc = b.distance(&c).map_err(|e| e.to_string())?;
        if dab < 0.0 {
            return Err(format!("negative distance {dab}"));
        }
        worst = worst.max((dab - dba).abs());
        worst = worst.max(a.distance(&a).map_err(|e| e.to_string())?);
        worst = worst.max(dac - (dab + dbc));
    }
    check(worst < 1e-8, format!("worst axiom violation {worst:.3e}"))
}

fn spd_affine_invariance() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[6]);
    let mut worst = 0.0f64;
    let mut used = 0usize;
    for case in 0..2 * CASES {
        if used >= CASES {
            break;
        }
        let d = spd_dim(case);
        let a = random_spd(&mut rng, d);
        let b = random_spd(&mut rng, d);
        let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0f64..1.0));
        if g.determinant().abs() < 0.1 {
            continue;
        }
        used += 1;
        let sym = |m: DMatrix<f64>| (m.clone() + m.transpose()) * 0.5;
        let ga = SpdMatrix::new(sym(&g * a.matrix() * g.transpose())).map_err(|e| e.to_string())?;
        let gb = SpdMatrix::new(sym(&g * b.matrix() * g.transpose())).map_err(|e| e.to_string())?;
        let before = a.distance(&b).map_err(|e| e.to_string())?;
        let after = ga.distance(&gb).map_err(|e| e.to_string())?;
        worst = worst.max((before - after).abs() / (1.0 + before));
    }
    check(
        worst < 1e-8,
        format!("worst relative violation {worst:.3e} over {used} congruences"),
    )
}

fn mandel_isometry_round_trip() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[7]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let s = random_symmetric(&mut rng, d, 3.0);
        let v = mandel_vec(&s);
        worst = worst.max((v.norm() - s.norm()).abs());
        let back = mandel_unvec(&v).map_err(|e| e.to_string())?;
        worst = worst.max((back - s).norm());
    }
    check(worst < 1e-12, format!("worst deviation {worst:.3e} (tol 1e-12)"))
}

fn chol_round_trip() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[8]);
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let d = spd_dim(case);
        let p = random_spd(&mut rng, d);
        let (back, floored) = chol_unvec_flagged(&chol_vec(&p)).map_err(|e| e.to_string())?;
        if floored {
            return Err("floor applied on a positive-definite round trip".into());
        }
        worst = worst.max((back.matrix() - p.matrix()).norm());
    }
    check(worst < 1e-9, format!("worst residual {worst:.3e} (tol 1e-9)"))
}

fn nearest_spd_projection() -> Result<String, String> {
    let mut rng = seeds::stream(102, &[9]);
    for case in 0..CASES / 10 {
        let d = spd_dim(case);
        let s = random_symmetric(&mut rng, d, 2.0);
        let (proj, _) = nearest_spd(&s);
        let best = (proj.matrix() - &s).norm();
        let eig = s.clone().symmetric_eigen();
        for _ in 0..10 {
            let cand = DVector::from_fn(d, |i, _| {
                (eig.eigenvalues[i] + rng.gen_range(-1.0..1.0)).max(crate::manifold::REPAIR_FLOOR)
            });
            let m = &eig.eigenvectors * DMatrix::from_diagonal(&cand) * eig.eigenvectors.transpose();
            if (m - &s).norm() + 1e-12 < best {
                return Err(format!("found a closer eigenvalue clamp than the projection"));
            }
        }
    }
    Ok("projection optimal among eigenvalue clamps".into())
}

// --- composite / gaussian ----------------------------------------------------

fn composite_matches_scalar_ops() -> Result<String, String> {
    let mut rng = seeds::stream(103, &[1]);
    let mut worst = 0.0f64;
    for _ in 0..CASES / 10 {
        let a = random_unit(&mut rng);
        let b = random_unit(&mut rng);
        if a.distance(&b) > 3.0 {
            continue;
        }
        let pa = CompositePoint::new(vec![Factor::S3(a)]);
        let pb = CompositePoint::new(vec![Factor::S3(b)]);
        let t = pa.log(&pb).map_err(|e| e.to_string())?;
        let scalar = a.log_map(&b).map_err(|e| e.to_string())?;
        worst = worst.max((t.s3_segment(0).0 - scalar.0).norm());

        let sa = random_spd(&mut rng, 3);
        let sb = random_spd(&mut rng, 3);
        let qa = CompositePoint::new(vec![Factor::Spd(sa.clone())]);
        let qb = CompositePoint::new(vec![Factor::Spd(sb.clone())]);
        let t = qa.log(&qb).map_err(|e| e.to_string())?;
        let scalar = sa.log_map(&sb).map_err(|e| e.to_string())?;
        worst = worst.max((t.spd_segment(0).map_err(|e| e.to_string())?.matrix()
            - scalar.matrix())
        .norm());
    }
    check(worst < 1e-10, format!("worst scalar mismatch {worst:.3e}"))
}

fn gaussian_logpdf_properties() -> Result<String, String> {
    let mean = CompositePoint::new(vec![Factor::S3(UnitQuaternion::identity())]);
    let cov = DMatrix::identity(4, 4);
    let at_mean = riemannian_gaussian_logpdf(&mean, &cov, &mean).map_err(|e| e.to_string())?;
    let expected = -0.5 * (4.0 * (2.0 * std::f64::consts::PI).ln());
    if (at_mean - expected).abs() > 1e-12 {
        return Err(format!("normalizer {at_mean} vs {expected}"));
    }
    let mut rng = seeds::stream(103, &[2]);
    for _ in 0..CASES / 10 {
        let q = CompositePoint::new(vec![Factor::S3(random_unit(&mut rng))]);
        let lp = riemannian_gaussian_logpdf(&mean, &cov, &q).map_err(|e| e.to_string())?;
        if lp > at_mean + 1e-12 {
            return Err(format!("density above the mean value: {lp} > {at_mean}"));
        }
    }
    Ok("maximal at the mean; normalizer exact".into())
}

// --- adapters ----------------------------------------------------------------

fn grl_actions_need_no_repair() -> Result<String, String> {
    let mut rng = seeds::stream(104, &[1]);
    let kinds = vec![FactorKind::S3, FactorKind::Spd(3)];
    let base = CompositePoint::default_bases(&kinds);
    let frame = TangentFrame::at(base.clone());
    let mut worst_norm = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    for _ in 0..CASES {
        let flat = DVector::from_fn(base.tangent_dim(), |_, _| rng.gen_range(-1.5..1.5));
        let a_p = CompositeTangent::from_flat(kinds.clone(), flat).map_err(|e| e.to_string())?;
        let (action, _) = grl_map_action(&frame, &a_p).map_err(|e| e.to_string())?;
        for f in action.factors() {
            match f {
                Factor::S3(q) => worst_norm = worst_norm.max((q.as_vector().norm() - 1.0).abs()),
                Factor::Spd(m) => worst_eig = worst_eig.min(m.min_eigenvalue()),
                Factor::Euclid(_) => {}
            }
        }
    }
    check(
        worst_norm < 1e-12 && worst_eig > 0.0,
        format!("worst unit-norm deviation {worst_norm:.3e}, min eigenvalue {worst_eig:.3e}"),
    )
}

fn baseline_outputs_satisfy_invariants() -> Result<String, String> {
    let mut rng = seeds::stream(104, &[2]);
    let mut repaired = 0u64;
    let mut total = 0u64;
    for _ in 0..CASES {
        let raw = CompositeTangent::from_flat(
            vec![FactorKind::S3],
            DVector::from_fn(4, |_, _| rng.gen_range(-2.0..2.0)),
        )
        .map_err(|e| e.to_string())?;
        if raw.norm() < 1e-9 {
            continue;
        }
        let (action, stats) = baseline_map_action(AdapterMode::Normalize, &raw)
            .map_err(|e| e.to_string())?;
        match &action.factors()[0] {
            Factor::S3(q) => {
                if (q.as_vector().norm() - 1.0).abs() > 1e-12 || !q.is_canonical() {
                    return Err("normalize output violates invariants".into());
                }
            }
            _ => unreachable!(),
        }
        total += 1;
        if stats.repair_calls > 0 {
            repaired += 1;
        }

        let raw = CompositeTangent::from_flat(
            vec![FactorKind::Spd(3)],
            DVector::from_fn(6, |_, _| rng.gen_range(-2.0..2.0)),
        )
        .map_err(|e| e.to_string())?;
        for mode in [AdapterMode::Cholesky, AdapterMode::Mandel] {
            let (action, _) = baseline_map_action(mode, &raw).map_err(|e| e.to_string())?;
            match &action.factors()[0] {
                Factor::Spd(m) => {
                    let floor = -1e-12 * (1.0 + m.matrix().norm());
                    if m.min_eigenvalue() <= floor {
                        return Err(format!("{} output not positive", mode.name()));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    check(
        repaired == total,
        format!("normalization invoked on {repaired}/{total} raw actions"),
    )
}

// --- optimizers ----------------------------------------------------------------

fn power_quadratic_convergence() -> Result<String, String> {
    let mut worst = 0.0f64;
    for seed in 1..=5u64 {
        let params = PolicyParams::zeros(1, 1, 0.3);
        let mut state = PowerState::new(params, 10, 0.98);
        let mut rng = seeds::stream(105, &[seed]);
        for _ in 0..200 {
            let eps = state.params().sample_noise(&mut rng);
            let candidate = state.params().theta() + &eps;
            let ret = -(candidate[(0, 0)] - 1.0).powi(2);
            state.update(candidate, ret);
        }
        worst = worst.max((state.params().theta()[(0, 0)] - 1.0).abs());
    }
    check(worst < 1e-2, format!("worst |θ - θ*| = {worst:.3e} over 5 seeds (tol 1e-2)"))
}

fn cmaes_sphere_5d() -> Result<String, String> {
    let mut max_evals = 0usize;
    for seed in 1..=5u64 {
        let mut es = CmaesState::new(DVector::from_element(5, 3.0), 1.0, None);
        let mut rng = seeds::stream(106, &[seed]);
        let mut evals = 0;
        let mut best = f64::NEG_INFINITY;
        while evals < 2000 && best < -1e-8 {
            let xs = es.ask(&mut rng);
            let scored: Vec<(DVector<f64>, f64)> = xs
                .into_iter()
                .map(|x| {
                    let f = -x.iter().map(|v| v * v).sum::<f64>();
                    (x, f)
                })
                .collect();
            evals += scored.len();
            for (_, f) in &scored {
                best = best.max(*f);
            }
            es.tell(&scored).map_err(|e| e.to_string())?;
        }
        if best < -1e-8 {
            return Err(format!("seed {seed}: best {best:.3e} after {evals} evaluations"));
        }
        max_evals = max_evals.max(evals);
    }
    Ok(format!("reached 1e-8 within {max_evals} evaluations (budget 2000), 5/5 seeds"))
}

fn cmaes_covariance_stays_spd() -> Result<String, String> {
    let mut es = CmaesState::new(DVector::zeros(8), 0.5, None);
    let mut rng = seeds::stream(106, &[99]);
    let mut min_seen = f64::INFINITY;
    for _ in 0..500 {
        let xs = es.ask(&mut rng);
        let scored: Vec<(DVector<f64>, f64)> = xs
            .into_iter()
            .map(|x| {
                let f = (x[0] * 3.0).sin() - x.norm() + rng.gen_range(-0.1..0.1);
                (x, f)
            })
            .collect();
        es.tell(&scored).map_err(|e| e.to_string())?;
        let sym = (es.covariance() + es.covariance().transpose()) * 0.5;
        let min_eig = sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        min_seen = min_seen.min(min_eig);
        if min_eig <= 0.0 || es.sigma() <= 0.0 {
            return Err(format!("covariance degenerated: min eigenvalue {min_eig:.3e}"));
        }
    }
    Ok(format!("min eigenvalue across 500 generations: {min_seen:.3e}"))
}

fn cmaes_default_population() -> Result<String, String> {
    let ok = default_lambda(5) == 8 && default_lambda(40) == 15 && default_lambda(72) == 16;
    check(ok, "λ = 4 + ⌊3 ln n⌋ spot checks".into())
}

fn negative_control_broken_transport() -> Result<String, String> {
    // A transport that scales by 1.01 must fail the isometry oracle; if it
    // does not, the oracle itself is broken.
    let corrupted = |from: &UnitQuaternion, to: &UnitQuaternion, t: &TangentS3| {
        from.parallel_transport(to, t).map(|u| TangentS3(u.0 * 1.01))
    };
    match s3_transport_isometry_impl(corrupted) {
        Err(_) => Ok("corrupted transport correctly rejected".into()),
        Ok(_) => Err("isometry oracle accepted a corrupted transport".into()),
    }
}

// -----------------------------------------------------------------------------

fn all_checks() -> Vec<Check> {
    vec![
        Check { name: "s3_exp_log_round_trip", run: s3_exp_log_round_trip },
        Check { name: "s3_exp_unit_norm", run: s3_exp_unit_norm },
        Check { name: "s3_transport_isometry", run: s3_transport_isometry },
        Check { name: "s3_transport_geodesic_velocity", run: s3_transport_geodesic_velocity },
        Check { name: "s3_distance_axioms", run: s3_distance_axioms },
        Check { name: "s3_hemisphere_identification", run: s3_hemisphere_identification },
        Check { name: "s3_rotation_double_cover", run: s3_rotation_double_cover },
        Check { name: "spd_expm_logm_round_trip", run: spd_expm_logm_round_trip },
        Check { name: "spd_exp_log_round_trip", run: spd_exp_log_round_trip },
        Check { name: "spd_exp_positive_definite", run: spd_exp_positive_definite },
        Check { name: "spd_transport_isometry", run: spd_transport_isometry },
        Check { name: "spd_distance_axioms", run: spd_distance_axioms },
        Check { name: "spd_affine_invariance", run: spd_affine_invariance },
        Check { name: "mandel_isometry_round_trip", run: mandel_isometry_round_trip },
        Check { name: "chol_round_trip", run: chol_round_trip },
        Check { name: "nearest_spd_projection", run: nearest_spd_projection },
        Check { name: "composite_matches_scalar_ops", run: composite_matches_scalar_ops },
        Check { name: "gaussian_logpdf_properties", run: gaussian_logpdf_properties },
        Check { name: "grl_actions_need_no_repair", run: grl_actions_need_no_repair },
        Check { name: "baseline_outputs_satisfy_invariants", run: baseline_outputs_satisfy_invariants },
        Check { name: "power_quadratic_convergence", run: power_quadratic_convergence },
        Check { name: "cmaes_sphere_5d", run: cmaes_sphere_5d },
        Check { name: "cmaes_covariance_stays_spd", run: cmaes_covariance_stays_spd },
        Check { name: "cmaes_default_population", run: cmaes_default_population },
        Check { name: "negative_control_broken_transport", run: negative_control_broken_transport },
    ]
}

/// Runs every check whose name contains `filter` (all when `None`).
pub fn run_all(filter: Option<&str>) -> Vec<CheckOutcome> {
    all_checks()
        .into_iter()
        .filter(|c| filter.map_or(true, |f| c.name.contains(f)))
        .map(|c| {
            let start = Instant::now();
            let result = (c.run)();
            let millis = start.elapsed().as_millis();
            match result {
                Ok(details) => CheckOutcome { name: c.name, passed: true, details, millis },
                Err(details) => CheckOutcome { name: c.name, passed: false, details, millis },
            }
        })
        .collect()
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_selftest_passes() {
        let outcomes = run_all(None);
        assert_eq!(outcomes.len(), 25);
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.name, o.details);
        }
    }

    #[test]
    fn filter_selects_by_substring() {
        let outcomes = run_all(Some("mandel"));
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].name, "mandel_isometry_round_trip");
        assert!(!all_passed(&[]));
    }
}
