use geomrl::config::{parse_config, resolve};
use geomrl::optim::train;
use geomrl::policy::AdapterMode;

fn arm(cfg_json: &str, adapter: AdapterMode) -> (Vec<f64>, Vec<Option<f64>>, u64, u64) {
    let cfg = parse_config(cfg_json).unwrap();
    let plan = resolve(cfg, false, None).unwrap();
    let setup = plan.setup(adapter);
    let build = plan.env_build.clone();
    let outcome = train(&setup, &move || build.build(), &plan.echo.seeds).unwrap();
    let finals = outcome.final_evals();
    let errs = outcome.seeds.iter().map(|s| s.tracking_error).collect();
    let rep = outcome.repair();
    (finals, errs, rep.actions, rep.actions_repaired)
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();

    if which.is_empty() || which == "c3" {
        println!("=== C3: PoWER quat wahba sizes 10/12/14/16, budget 300 ===");
        for size in [10, 12, 14, 16] {
            let cfg = format!(
                r#"{{"env": {{"kind": "quat_wahba", "size": {size}, "seed": 7}},
                    "algorithm": {{"kind": "power"}},
                    "budget": 300, "seeds": [1,2,3,4,5]}}"#
            );
            let (grl, _, _, _) = arm(&cfg, AdapterMode::Grl);
            let (norm, _, _, _) = arm(&cfg, AdapterMode::Normalize);
            let wins = grl.iter().zip(&norm).filter(|(g, n)| g > n).count();
            let gap = grl.iter().sum::<f64>() / 5.0 - norm.iter().sum::<f64>() / 5.0;
            println!("size {size:>2}: grl [{}] norm [{}] wins {wins}/5 gap {gap:.4}", fmt(&grl), fmt(&norm));
        }
    }

    if which.is_empty() || which == "c4" {
        println!("=== C4: CMA-ES spd wahba sizes 9/12, budget 1500 ===");
        for size in [9, 12] {
            let cfg = format!(
                r#"{{"env": {{"kind": "spd_wahba", "size": {size}, "seed": 7}},
                    "algorithm": {{"kind": "cmaes"}},
                    "budget": 1500, "seeds": [1,2,3,4,5]}}"#
            );
            let (grl, _, _, _) = arm(&cfg, AdapterMode::Grl);
            let (chol, _, _, _) = arm(&cfg, AdapterMode::Cholesky);
            let (mandel, _, a, r) = arm(&cfg, AdapterMode::Mandel);
            let wins_c = grl.iter().zip(&chol).filter(|(g, n)| g > n).count();
            let wins_m = grl.iter().zip(&mandel).filter(|(g, n)| g > n).count();
            println!("size {size:>2}: grl [{}]", fmt(&grl));
            println!("          chol [{}] wins {wins_c}/5", fmt(&chol));
            println!("          mandel [{}] wins {wins_m}/5 (repair {r}/{a})", fmt(&mandel));
        }
    }

    if which.is_empty() || which == "c5" {
        println!("=== C5: trajectories T=50 ===");
        for algo in ["power", "cmaes"] {
            let budget = if algo == "power" { 600 } else { 1000 };
            let cfg = format!(
                r#"{{"env": {{"kind": "quat_traj", "horizon": 50, "seed": 7}},
                    "algorithm": {{"kind": "{algo}"}},
                    "budget": {budget}, "seeds": [1,2,3,4,5]}}"#
            );
            let (gf, ge, _, _) = arm(&cfg, AdapterMode::Grl);
            let (nf, ne, _, _) = arm(&cfg, AdapterMode::Normalize);
            let ge: Vec<f64> = ge.into_iter().map(|e| e.unwrap()).collect();
            let ne: Vec<f64> = ne.into_iter().map(|e| e.unwrap()).collect();
            let wins = ge.iter().zip(&ne).filter(|(g, n)| g < n).count();
            println!("quat {algo}: grl err [{}] final [{}]", fmt(&ge), fmt(&gf));
            println!("   norm err [{}] final [{}] err-wins {wins}/5", fmt(&ne), fmt(&nf));

            let cfg = format!(
                r#"{{"env": {{"kind": "spd_traj", "horizon": 50, "seed": 7}},
                    "algorithm": {{"kind": "{algo}"}},
                    "budget": {budget}, "seeds": [1,2,3,4,5]}}"#
            );
            let (_, ge, _, _) = arm(&cfg, AdapterMode::Grl);
            let (_, ce, _, _) = arm(&cfg, AdapterMode::Cholesky);
            let (_, me, _, _) = arm(&cfg, AdapterMode::Mandel);
            let ge: Vec<f64> = ge.into_iter().map(|e| e.unwrap()).collect();
            let ce: Vec<f64> = ce.into_iter().map(|e| e.unwrap()).collect();
            let me: Vec<f64> = me.into_iter().map(|e| e.unwrap()).collect();
            let wins_c = ge.iter().zip(&ce).filter(|(g, n)| g < n).count();
            let wins_m = ge.iter().zip(&me).filter(|(g, n)| g < n).count();
            println!("spd {algo}: grl err [{}]", fmt(&ge));
            println!("   chol err [{}] wins {wins_c}/5", fmt(&ce));
            println!("   mandel err [{}] wins {wins_m}/5", fmt(&me));
        }
    }
}
