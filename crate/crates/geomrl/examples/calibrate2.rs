use geomrl::config::{parse_config, resolve};
use geomrl::optim::train;
use geomrl::policy::AdapterMode;

fn arm(cfg_json: &str, adapter: AdapterMode) -> (Vec<f64>, Vec<f64>) {
    let cfg = parse_config(cfg_json).unwrap();
    let plan = resolve(cfg, false, None).unwrap();
    let setup = plan.setup(adapter);
    let build = plan.env_build.clone();
    let out = train(&setup, &move || build.build(), &plan.echo.seeds).unwrap();
    let errs = out.seeds.iter().map(|s| s.tracking_error.unwrap_or(f64::NAN)).collect();
    (out.final_evals(), errs)
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ")
}

fn main() {
    for algo_spec in [
        r#"{"kind": "power", "init_std": 0.03, "std_decay": 0.997}"#,
        r#"{"kind": "cmaes", "sigma0": 0.03}"#,
    ] {
        let algo = if algo_spec.contains("power") { "power" } else { "cmaes" };
        let budget = if algo == "power" { 1000 } else { 1000 };
        println!("=== {algo} traj budget {budget} ===");
        let cfg = format!(
            r#"{{"env": {{"kind": "quat_traj", "horizon": 50, "seed": 7}},
                "algorithm": {algo_spec},
                "budget": {budget}, "seeds": [1,2,3,4,5]}}"#
        );
        let (gf, ge) = arm(&cfg, AdapterMode::Grl);
        let (nf, ne) = arm(&cfg, AdapterMode::Normalize);
        let wins = ge.iter().zip(&ne).filter(|(g, n)| g < n).count();
        println!("quat: grl err [{}] fin [{}]", fmt(&ge), fmt(&gf));
        println!("      nrm err [{}] fin [{}] err-wins {wins}/5", fmt(&ne), fmt(&nf));

        let cfg = format!(
            r#"{{"env": {{"kind": "spd_traj", "horizon": 50, "seed": 7}},
                "algorithm": {algo_spec},
                "budget": {budget}, "seeds": [1,2,3,4,5]}}"#
        );
        let (_, ge) = arm(&cfg, AdapterMode::Grl);
        let (_, ce) = arm(&cfg, AdapterMode::Cholesky);
        let (_, me) = arm(&cfg, AdapterMode::Mandel);
        let wc = ge.iter().zip(&ce).filter(|(g, n)| g < n).count();
        let wm = ge.iter().zip(&me).filter(|(g, n)| g < n).count();
        println!("spd:  grl err [{}]", fmt(&ge));
        println!("      chl err [{}] wins {wc}/5", fmt(&ce));
        println!("      mdl err [{}] wins {wm}/5", fmt(&me));
    }
}
