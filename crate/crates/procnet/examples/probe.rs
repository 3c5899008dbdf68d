use procnet::model::*;
use procnet::simulate::*;
use std::time::Instant;
fn main() {
    let cfg = NetworkConfig::single_sensor(
        ScalarSystem::new(-1.0, 1.0),
        PreprocessingModel::InverseLinear { b: 1.0 },
    );
    let plan = SimPlan::new(1e-3, 200.0, 64, 20260809);
    let t0 = Instant::now();
    let r = monte_carlo_variance(&cfg, 0.5, 1, &plan).unwrap();
    println!("benchmark: {:?}  ({:.2?})", r, t0.elapsed());
    println!("rel err: {}", ((r.empirical_variance - r.analytic_variance) / r.analytic_variance).abs());

    // S=4 vs folded single sensor
    let mut cfg4 = cfg;
    cfg4.sensors = 4;
    let r4 = monte_carlo_variance(&cfg4, 0.5, 4, &plan).unwrap();
    let folded = NetworkConfig::single_sensor(
        ScalarSystem::new(-1.0, 1.0),
        PreprocessingModel::InverseLinear { b: 0.25 },
    );
    let rf = monte_carlo_variance(&folded, 0.5, 1, &plan).unwrap();
    println!("S=4:    emp={} z={}", r4.empirical_variance, r4.z_score);
    println!("folded: emp={} z={}", rf.empirical_variance, rf.z_score);

    // constant comm delay tracking the affine law
    let mut cfgd = cfg;
    cfgd.delays.comm = CommDelay::Constant { tau_c: 0.1 };
    let rd = monte_carlo_variance(&cfgd, 0.5, 1, &plan).unwrap();
    println!("delayed: emp={} analytic={} z={}", rd.empirical_variance, rd.analytic_variance, rd.z_score);

    // large tau open-loop regime
    let plan_l = SimPlan::new(1e-3, 20.0 * 50.0, 16, 5);
    let rl = monte_carlo_variance(&cfg, 50.0, 1, &plan_l).unwrap();
    println!("large tau: emp={} (limit 0.5) z={}", rl.empirical_variance, rl.z_score);

    // h-halving benchmark
    let plan_h = SimPlan::new(5e-4, 200.0, 64, 20260809);
    let rh = monte_carlo_variance(&cfg, 0.5, 1, &plan_h).unwrap();
    println!("h/2: emp={} diff={} vs stderr {}", rh.empirical_variance,
        (rh.empirical_variance - r.empirical_variance).abs(), r.stderr);
}
