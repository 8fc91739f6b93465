use ascent_nav_core::dynamics::{jacobian, LinearModel, SystemModel};
use ascent_nav_core::estimators::order::sigma_point_errors;
use ascent_nav_core::estimators::{
    ekf_predict, espukf_predict, generate_sigma_points, kalman_update, position_error, predict, run_filter,
    sigma_point_update, spukf_predict, ukf_predict, FilterKind, GaussianBelief, MeasurementConfig, MeasurementMode,
    NoClock, UtParams,
};
use ascent_nav_core::gnss::{ErrorBudget, MeasurementEpoch};
use ascent_nav_core::scenario::{
    build_crs5, generate_observations, generate_truth, initial_estimate, measurement_stream, ScenarioConfig, TruthLog,
};
use ascent_nav_core::state::{idx, Matrix8, StateVector, Vector8};
use ascent_nav_core::vehicle::ProcessNoise;
use proptest::prelude::*;
use std::sync::OnceLock;

fn scenario() -> &'static (ScenarioConfig, TruthLog) {
    static CELL: OnceLock<(ScenarioConfig, TruthLog)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = build_crs5();
        let truth = generate_truth(&cfg).unwrap();
        (cfg, truth)
    })
}

fn spd(entries: &[f64], scales: &[f64]) -> Matrix8 {
    let a = Matrix8::from_iterator(entries.iter().copied());
    let d = Matrix8::from_diagonal(&Vector8::from_iterator(scales.iter().copied()));
    d * (a * a.transpose() + Matrix8::identity() * 0.1) * d
}

fn ut_params() -> impl Strategy<Value = UtParams> {
    prop_oneof![
        Just(UtParams::default()),
        Just(UtParams { alpha: 0.5, beta: 2.0, kappa: 0.0 }),
        Just(UtParams { alpha: 1.0, beta: 2.0, kappa: 0.0 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_points_reproduce_moments(
        entries in prop::collection::vec(-1.0..1.0f64, 64),
        scales in prop::collection::vec(prop_oneof![Just(1e-3), Just(1.0), Just(300.0)], 8),
        mean in prop::collection::vec(-1e6..1e6f64, 8),
        ut in ut_params(),
    ) {
        let cov = spd(&entries, &scales);
        let belief = GaussianBelief::new(StateVector(Vector8::from_iterator(mean)), cov);
        let pts = generate_sigma_points(&belief, &ut).unwrap();
        prop_assert_eq!(pts.offsets.len(), 17);
        prop_assert!((pts.wm.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let m = pts.mean();
        for i in 0..8 {
            let tol = 1e-10 * belief.mean.0[i].abs().max(cov[(i, i)].sqrt());
            prop_assert!((m[i] - belief.mean.0[i]).abs() <= tol, "mean {}", i);
        }
        let p = pts.covariance();
        for i in 0..8 {
            for j in 0..8 {
                let tol = 1e-8 * (cov[(i, i)] * cov[(j, j)]).sqrt();
                prop_assert!((p[(i, j)] - cov[(i, j)]).abs() <= tol, "cov {} {}", i, j);
            }
        }
    }

    #[test]
    fn all_predicts_agree_on_linear_systems(
        a in prop::collection::vec(-0.5..0.5f64, 64),
        entries in prop::collection::vec(-1.0..1.0f64, 64),
        mean in prop::collection::vec(-100.0..100.0f64, 8),
        dt in 0.1..2.0f64,
        ut in ut_params(),
    ) {
        let model = LinearModel { a: Matrix8::from_iterator(a), process_noise: ProcessNoise::isotropic(1e-6) };
        let belief = GaussianBelief::new(StateVector(Vector8::from_iterator(mean)), spd(&entries, &[1.0; 8]));
        let reference = ekf_predict(&belief, 0.0, dt, &model).unwrap().belief;
        for kind in [FilterKind::Ukf, FilterKind::Spukf, FilterKind::Espukf] {
            let p = predict(kind, &belief, 0.0, dt, &model, &ut).unwrap().belief;
            let scale = reference.mean.0.amax().max(1.0);
            prop_assert!((p.mean.0 - reference.mean.0).amax() <= 1e-9 * scale, "{} mean", kind);
            let cscale = reference.cov.amax();
            prop_assert!((p.cov - reference.cov).amax() <= 1e-9 * cscale, "{} cov", kind);
        }
    }
}

#[test]
fn linear_ekf_predict_is_exact_lyapunov_step() {
    let mut a = Matrix8::zeros();
    a[(0, 2)] = 1.0;
    a[(6, 7)] = 1.0;
    let model = LinearModel { a, process_noise: ProcessNoise::isotropic(0.0) };
    let belief = GaussianBelief::new(StateVector(Vector8::repeat(1.0)), Matrix8::identity());
    let p = ekf_predict(&belief, 0.0, 2.0, &model).unwrap().belief;
    // exp(A dt) is I + A dt for this nilpotent A
    let phi = Matrix8::identity() + a * 2.0;
    assert!((p.cov - phi * phi.transpose()).amax() < 1e-14);
    assert_eq!(p.mean.0[0], 3.0);
    let static_model = LinearModel { a: Matrix8::zeros(), process_noise: ProcessNoise::isotropic(0.0) };
    assert_eq!(ekf_predict(&belief, 0.0, 1.0, &static_model).unwrap().belief.cov, belief.cov);
}

#[test]
fn zero_covariance_limit_predicts_q() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let q = 1e-9;
    let model = ascent_nav_core::dynamics::AscentModel::new(model.vehicle, model.env, ProcessNoise::isotropic(q), 0.1);
    let belief = GaussianBelief::new(truth.states[50], Matrix8::identity() * 1e-300);
    let p = ukf_predict(&belief, 50.0, 1.0, &model, &cfg.ut).unwrap().belief;
    assert!((p.cov - Matrix8::identity() * q).amax() < 1e-15);
}

#[test]
fn propagation_and_jacobian_counts() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let belief = GaussianBelief::new(truth.states[40], cfg.init.cov);
    let expected =
        [(FilterKind::Ekf, 1, 1), (FilterKind::Ukf, 17, 0), (FilterKind::Spukf, 1, 1), (FilterKind::Espukf, 1, 2)];
    for (kind, props, jacs) in expected {
        model.reset_counts();
        predict(kind, &belief, 40.0, 1.0, &model, &cfg.ut).unwrap();
        let c = model.counts();
        assert_eq!((c.propagations, c.jacobians), (props, jacs), "{kind}");
    }
}

#[test]
fn ukf_mean_close_to_single_propagation() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let belief = GaussianBelief::new(truth.states[50], cfg.init.cov);
    let ukf = ukf_predict(&belief, 50.0, 1.0, &model, &cfg.ut).unwrap().belief;
    let single = model.propagate(&truth.states[50], 50.0, 1.0).unwrap();
    assert!(position_error(&(ukf.mean.0 - single.0)) < 0.5);
}

#[test]
fn espukf_points_beat_spukf_points() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let e = sigma_point_errors(&model, &truth.states[50], &cfg.init.cov, 50.0, 1.0, 1.0).unwrap();
    assert!(e.espukf_error < e.spukf_error, "{e:?}");
}

#[test]
fn spukf_predicted_covariance_is_the_linearized_one() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let belief = GaussianBelief::new(truth.states[120], cfg.init.cov);
    let ekf = ekf_predict(&belief, 120.0, 1.0, &model).unwrap().belief;
    let sp = spukf_predict(&belief, 120.0, 1.0, &model, &UtParams { alpha: 1.0, beta: 2.0, kappa: 0.0 }).unwrap();
    assert_eq!(sp.belief.mean, ekf.mean);
    for i in 0..8 {
        for j in 0..8 {
            let tol = 1e-8 * (ekf.cov[(i, i)] * ekf.cov[(j, j)]).sqrt();
            assert!((sp.belief.cov[(i, j)] - ekf.cov[(i, j)]).abs() <= tol);
        }
    }
    let esp = espukf_predict(&belief, 120.0, 1.0, &model, &cfg.ut).unwrap();
    assert_eq!(esp.belief.mean, ekf.mean);
}

#[test]
fn covariance_grows_in_powered_flight() {
    let (cfg, truth) = scenario();
    let model = cfg.model();
    let (t, dt) = (60.0, 1e-3);
    let s = truth.states[60];
    let mut cov = Matrix8::zeros();
    cov[(idx::V, idx::V)] = 4.0;
    cov[(idx::GAMMA, idx::GAMMA)] = 1e-4;
    let belief = GaussianBelief::new(s, cov);
    let p = ekf_predict(&belief, t, dt, &model).unwrap().belief.cov;
    // hand linearization of the (v, gamma) rows: v' ~ -g cos(gamma) dgamma,
    // gamma' ~ (g/v^2 + 1/r) cos(gamma) dv + (g/v - v/r) sin(gamma) dgamma
    let env = &cfg.environment;
    let r = env.earth_radius + s.h();
    let g = env.g0 * (env.earth_radius / r).powi(2);
    let (sg, cg) = s.gamma().sin_cos();
    let j_vg = -g * cg;
    let j_gv = (g / (s.v() * s.v()) + 1.0 / r) * cg;
    let expected_vg = dt * (j_vg * 1e-4 + j_gv * 4.0);
    assert!((p[(idx::V, idx::GAMMA)] - expected_vg).abs() < 1e-3 * expected_vg.abs());
    let j_gg = (g / s.v() - s.v() / r) * sg;
    let expected_gg = 1e-4 * (1.0 + 2.0 * dt * j_gg);
    assert!((p[(idx::GAMMA, idx::GAMMA)] - expected_gg).abs() < 1e-6 * expected_gg);
    let analytic = jacobian(&s, &cfg.vehicle, env, t).unwrap();
    assert_eq!(analytic[(idx::V, idx::GAMMA)], j_vg);
    let full = GaussianBelief::new(s, cfg.init.cov);
    let grown = ekf_predict(&full, t, 1.0, &model).unwrap().belief.cov;
    assert!(grown.trace() > cfg.init.cov.trace());
}

fn noiseless_epochs(cfg: &ScenarioConfig, truth: &TruthLog) -> Vec<MeasurementEpoch> {
    let obs = generate_observations(truth, cfg, 1);
    measurement_stream(&obs, cfg)
}

#[test]
fn zero_innovation_keeps_mean_and_shrinks_covariance() {
    let (cfg, truth) = scenario();
    let cfg = ScenarioConfig { budget: ErrorBudget::noiseless(), ..cfg.clone() };
    let epochs = noiseless_epochs(&cfg, truth);
    let mm = cfg.measurement_config();
    let k = 80;
    let belief = GaussianBelief::new(truth.states[k], cfg.init.cov);
    let (post, innov) = kalman_update(&belief, &epochs[k], &mm).unwrap();
    assert!(innov.rms() < 1e-6);
    assert!((post.mean.0 - belief.mean.0).amax() < 1e-6);
    assert!(post.cov.trace() < belief.cov.trace());
    let pred = ukf_predict(&belief, truth.times[k], 0.0, &cfg.model(), &cfg.ut).unwrap();
    let (post, _) = sigma_point_update(&pred.belief, pred.points.as_ref().unwrap(), &epochs[k], &mm).unwrap();
    // the unscented predicted measurement carries the second-order range
    // curvature term, so the mean moves by a fraction of a millimetre
    assert!((post.mean.0 - belief.mean.0).amax() < 1e-3);
    assert!(post.cov.trace() < belief.cov.trace());
}

#[test]
fn four_noiseless_ranges_converge_like_a_point_fix() {
    let (base, truth) = scenario();
    let mut cfg = base.clone();
    cfg.budget = ErrorBudget::noiseless();
    cfg.channels = 4;
    cfg.mode = MeasurementMode::Range;
    let epochs = noiseless_epochs(&cfg, truth);
    let mut init = cfg.init;
    init.mean.0[idx::X] += 1.0;
    init.mean.0[idx::H] -= 1.0;
    init.cov[(idx::B_DOT, idx::B_DOT)] = 1e-12;
    let mm = MeasurementConfig { sigma_range: 0.01, ..cfg.measurement_config() };
    let run =
        run_filter(FilterKind::Ekf, &init, 0.0, &epochs[..20], &truth.states, &cfg.model(), &mm, &cfg.ut, &mut NoClock);
    let last = run.records.last().unwrap();
    assert!(last.error[idx::X].abs() < 1.0 && last.error[idx::H].abs() < 1.0, "{:?}", last.error);
}

#[test]
fn campaign_run_is_deterministic_symmetric_and_bounded() {
    let (cfg, truth) = scenario();
    let seed = 77;
    let epochs = measurement_stream(&generate_observations(truth, cfg, seed), cfg);
    let init = initial_estimate(cfg, seed);
    let model = cfg.model();
    let mm = cfg.measurement_config();
    for kind in FilterKind::ALL {
        let a = run_filter(kind, &init, 0.0, &epochs, &truth.states, &model, &mm, &cfg.ut, &mut NoClock);
        let b = run_filter(kind, &init, 0.0, &epochs, &truth.states, &model, &mm, &cfg.ut, &mut NoClock);
        assert_eq!(a, b, "{kind}");
        assert!(!a.is_diverged(), "{kind}: {:?}", a.diverged);
        assert_eq!(a.records.len(), truth.len());
        assert!(a.mean_position_error() < 20.0, "{kind}: {}", a.mean_position_error());
        let empty = run_filter(kind, &init, 0.0, &[], &truth.states, &model, &mm, &cfg.ut, &mut NoClock);
        assert!(empty.records.is_empty() && empty.initial == init);
    }
}

#[test]
fn covariance_stays_symmetric_every_step() {
    let (cfg, truth) = scenario();
    let epochs = measurement_stream(&generate_observations(truth, cfg, 3), cfg);
    let model = cfg.model();
    let mm = cfg.measurement_config();
    for kind in FilterKind::ALL {
        let mut belief = initial_estimate(cfg, 3);
        let mut t = 0.0;
        for e in epochs.iter().take(200) {
            let pred = predict(kind, &belief, t, e.t - t, &model, &cfg.ut).unwrap();
            let (post, _) = match &pred.points {
                Some(p) => sigma_point_update(&pred.belief, p, e, &mm).unwrap(),
                None => kalman_update(&pred.belief, e, &mm).unwrap(),
            };
            let asym = (post.cov - post.cov.transpose()).amax();
            assert!(asym <= 1e-9 * post.cov.amax(), "{kind} at {}", e.t);
            belief = post;
            t = e.t;
        }
    }
}
