//! Point-mass ascent dynamics over a spherical, non-rotating Earth.
//!
//! The right-hand side is the planar gravity-turn model: down-range and
//! altitude kinematics, thrust/drag/gravity along the velocity, gravity
//! bending of the flight path, constant mass flow per stage, a constant
//! aerodynamic coefficient and a constant-drift receiver clock.

use core::f64::consts::FRAC_PI_2;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::NavError;
use crate::expm::state_transition_matrix;
use crate::state::{idx, Matrix8, StateVector, Vector8};
use crate::vehicle::{Environment, Event, ProcessNoise, StageParams, VehicleConfig};
#[allow(unused_imports)]
use num_traits::Float;

/// Lowest altitude accepted by the dynamics (m).
pub const MIN_ALTITUDE: f64 = -1000.0;

/// Default RK4 substep (s).
pub const DEFAULT_SUBSTEP: f64 = 0.1;

/// `g0 (R_E / (R_E + h))^2`.
pub fn gravity(h: f64, env: &Environment) -> f64 {
    let ratio = env.earth_radius / (env.earth_radius + h);
    env.g0 * ratio * ratio
}

/// Exhaust mass flow `T / (Isp g0)`.
pub fn mass_flow_rate(stage: &StageParams, env: &Environment) -> f64 {
    stage.thrust / (stage.isp * env.g0)
}

/// Exponential-atmosphere density.
pub fn density(h: f64, env: &Environment) -> f64 {
    env.rho0 * (-h / env.scale_height).exp()
}

/// Drag `1/2 rho(h) v^2 C A`, with C taken from the state.
pub fn drag(s: &StateVector, cfg: &VehicleConfig, env: &Environment) -> f64 {
    0.5 * density(s.h(), env) * s.v() * s.v() * s.c() * cfg.frontal_area
}

/// Thrust and exhaust mass flow in effect over some interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Propulsion {
    pub thrust: f64,
    pub mass_flow: f64,
}

impl Propulsion {
    pub const COAST: Propulsion = Propulsion { thrust: 0.0, mass_flow: 0.0 };

    /// Propulsion at time `t` (burnout instants belong to the next stage).
    pub fn at(t: f64, cfg: &VehicleConfig, env: &Environment) -> Self {
        match cfg.active_stage(t) {
            Some(i) => {
                let stage = &cfg.stages[i];
                Propulsion { thrust: stage.thrust, mass_flow: mass_flow_rate(stage, env) }
            }
            None => Propulsion::COAST,
        }
    }
}

fn check_domain(s: &StateVector, t: f64) -> Result<(), NavError> {
    if !s.is_finite() {
        return Err(NavError::NonFinite { what: "state vector" });
    }
    if s.v() <= 0.0 {
        return Err(NavError::Singularity { t });
    }
    if s.m() <= 0.0 {
        return Err(NavError::InvalidState { t, reason: "mass is not positive" });
    }
    if s.h() <= MIN_ALTITUDE {
        return Err(NavError::InvalidState { t, reason: "altitude below -1000 m" });
    }
    Ok(())
}

/// Right-hand side with an explicit propulsion phase. `t` is only used to
/// label errors.
pub fn derivative_with(
    s: &StateVector,
    prop: Propulsion,
    cfg: &VehicleConfig,
    env: &Environment,
    t: f64,
) -> Result<Vector8, NavError> {
    check_domain(s, t)?;
    let (h, v, gamma, m) = (s.h(), s.v(), s.gamma(), s.m());
    let r = env.earth_radius + h;
    let g = gravity(h, env);
    let (sin_g, cos_g) = gamma.sin_cos();
    let d = drag(s, cfg, env);
    Ok(Vector8::from([
        env.earth_radius / r * v * cos_g,
        v * sin_g,
        prop.thrust / m - d / m - g * sin_g,
        -(g - v * v / r) * cos_g / v,
        -prop.mass_flow,
        0.0,
        s.b_dot(),
        0.0,
    ]))
}

/// Time derivative of the state at time `t`.
pub fn derivative(s: &StateVector, cfg: &VehicleConfig, env: &Environment, t: f64) -> Result<Vector8, NavError> {
    derivative_with(s, Propulsion::at(t, cfg, env), cfg, env, t)
}

/// Analytic Jacobian of [`derivative_with`] with respect to the state.
pub fn jacobian_with(
    s: &StateVector,
    prop: Propulsion,
    cfg: &VehicleConfig,
    env: &Environment,
    t: f64,
) -> Result<Matrix8, NavError> {
    use idx::*;
    check_domain(s, t)?;
    let (h, v, gamma, m, c) = (s.h(), s.v(), s.gamma(), s.m(), s.c());
    let re = env.earth_radius;
    let r = re + h;
    let g = gravity(h, env);
    let dg_dh = -2.0 * g / r;
    let (sin_g, cos_g) = gamma.sin_cos();
    let rho = density(h, env);
    let area = cfg.frontal_area;
    let d = 0.5 * rho * v * v * c * area;

    let mut jac = Matrix8::zeros();
    jac[(X, H)] = -re / (r * r) * v * cos_g;
    jac[(X, V)] = re / r * cos_g;
    jac[(X, GAMMA)] = -re / r * v * sin_g;

    jac[(H, V)] = sin_g;
    jac[(H, GAMMA)] = v * cos_g;

    jac[(V, H)] = d / (env.scale_height * m) - dg_dh * sin_g;
    jac[(V, V)] = -rho * v * c * area / m;
    jac[(V, GAMMA)] = -g * cos_g;
    jac[(V, M)] = -(prop.thrust - d) / (m * m);
    jac[(V, C)] = -0.5 * rho * v * v * area / m;

    jac[(GAMMA, H)] = (-dg_dh / v - v / (r * r)) * cos_g;
    jac[(GAMMA, V)] = (g / (v * v) + 1.0 / r) * cos_g;
    jac[(GAMMA, GAMMA)] = (g / v - v / r) * sin_g;

    jac[(B, B_DOT)] = 1.0;
    Ok(jac)
}

/// Jacobian of the dynamics at time `t`.
pub fn jacobian(s: &StateVector, cfg: &VehicleConfig, env: &Environment, t: f64) -> Result<Matrix8, NavError> {
    jacobian_with(s, Propulsion::at(t, cfg, env), cfg, env, t)
}

fn rk4_step(
    s: &StateVector,
    h: f64,
    prop: Propulsion,
    cfg: &VehicleConfig,
    env: &Environment,
    t: f64,
) -> Result<StateVector, NavError> {
    let y = s.0;
    let k1 = derivative_with(s, prop, cfg, env, t)?;
    let k2 = derivative_with(&StateVector(y + k1 * (0.5 * h)), prop, cfg, env, t + 0.5 * h)?;
    let k3 = derivative_with(&StateVector(y + k2 * (0.5 * h)), prop, cfg, env, t + 0.5 * h)?;
    let k4 = derivative_with(&StateVector(y + k3 * h), prop, cfg, env, t + h)?;
    Ok(StateVector(y + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)))
}

/// Integrates `[a, b]` in `n` equal RK4 steps with fixed propulsion.
fn integrate_segment(
    mut s: StateVector,
    a: f64,
    b: f64,
    n: usize,
    cfg: &VehicleConfig,
    env: &Environment,
) -> Result<StateVector, NavError> {
    let prop = Propulsion::at(0.5 * (a + b), cfg, env);
    let h = (b - a) / n as f64;
    for k in 0..n {
        s = rk4_step(&s, h, prop, cfg, env, a + k as f64 * h)?;
    }
    Ok(s)
}

fn apply_event(s: &mut StateVector, event: Event, t: f64) -> Result<(), NavError> {
    match event {
        Event::PitchKick { angle } => s.0[idx::GAMMA] = FRAC_PI_2 - angle,
        Event::Burnout { inert_mass, .. } => {
            s.0[idx::M] -= inert_mass;
            if s.m() <= 0.0 {
                return Err(NavError::InvalidState { t, reason: "mass is not positive after staging" });
            }
        }
    }
    Ok(())
}

/// Classical RK4 over `[t0, t0 + dt]` with `substeps` equal steps.
///
/// Pitch kick and burnout events inside the window split it: each piece is
/// integrated with its own constant propulsion, using as many steps of the
/// nominal length `dt / substeps` as fit (at least one). Events that fall
/// within 1e-9 s of a step boundary are snapped onto it. Events at `t0` are
/// assumed to have been applied already.
pub fn propagate(
    s: &StateVector,
    dt: f64,
    substeps: usize,
    cfg: &VehicleConfig,
    env: &Environment,
    t0: f64,
) -> Result<StateVector, NavError> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(NavError::InvalidArgument("dt must be finite and nonnegative"));
    }
    if substeps == 0 {
        return Err(NavError::InvalidArgument("substeps must be at least 1"));
    }
    s.check_finite()?;
    if dt == 0.0 {
        return Ok(*s);
    }
    let nominal = dt / substeps as f64;
    let t1 = t0 + dt;

    let mut state = *s;
    let mut cursor = t0;
    let mut pending: Option<NavError> = None;
    let mut events: [(f64, Option<Event>); 8] = [(0.0, None); 8];
    let mut count = 0;
    cfg.for_each_event(t0, t1, |te, ev| {
        if count < events.len() {
            events[count] = (te, Some(ev));
            count += 1;
        }
    });

    for &(te, ev) in &events[..count] {
        let ev = ev.expect("filled above");
        let steps_before = (te - cursor) / nominal;
        let snapped = steps_before.round();
        let n = if (steps_before - snapped).abs() * nominal < 1e-9 {
            snapped as usize
        } else {
            steps_before.ceil() as usize
        };
        if te > cursor {
            state = integrate_segment(state, cursor, te, n.max(1), cfg, env)?;
            cursor = te;
        }
        if let Err(e) = apply_event(&mut state, ev, te) {
            pending = Some(e);
            break;
        }
    }
    if let Some(e) = pending {
        return Err(e);
    }
    if t1 > cursor {
        let remaining = (t1 - cursor) / nominal;
        let n =
            if (remaining - remaining.round()).abs() * nominal < 1e-9 { remaining.round() } else { remaining.ceil() };
        state = integrate_segment(state, cursor, t1, (n as usize).max(1), cfg, env)?;
    }
    Ok(state)
}

/// What the filters need from a system model.
pub trait SystemModel {
    /// One trajectory propagation from `t0` over `dt`.
    fn propagate(&self, s: &StateVector, t0: f64, dt: f64) -> Result<StateVector, NavError>;

    /// One trajectory propagation that also reports the state at `t0 + dt/2`.
    fn propagate_with_midpoint(
        &self,
        s: &StateVector,
        t0: f64,
        dt: f64,
    ) -> Result<(StateVector, StateVector), NavError>;

    /// Jacobian of the continuous-time dynamics at `(s, t)`.
    fn jacobian(&self, s: &StateVector, t: f64) -> Result<Matrix8, NavError>;

    /// Additive process noise per step.
    fn process_noise(&self) -> &Matrix8;

    /// `exp(J dt)` for the Jacobian at `(s, t)`.
    fn transition(&self, s: &StateVector, t: f64, dt: f64) -> Result<Matrix8, NavError> {
        state_transition_matrix(&self.jacobian(s, t)?, dt)
    }
}

/// Linear time-invariant system `dx/dt = A x`, propagated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a: Matrix8,
    pub process_noise: ProcessNoise,
}

impl SystemModel for LinearModel {
    fn propagate(&self, s: &StateVector, _t0: f64, dt: f64) -> Result<StateVector, NavError> {
        s.check_finite()?;
        Ok(StateVector(state_transition_matrix(&self.a, dt)? * s.0))
    }

    fn propagate_with_midpoint(
        &self,
        s: &StateVector,
        t0: f64,
        dt: f64,
    ) -> Result<(StateVector, StateVector), NavError> {
        let mid = self.propagate(s, t0, 0.5 * dt)?;
        let end = self.propagate(&mid, t0 + 0.5 * dt, 0.5 * dt)?;
        Ok((mid, end))
    }

    fn jacobian(&self, _s: &StateVector, _t: f64) -> Result<Matrix8, NavError> {
        Ok(self.a)
    }

    fn process_noise(&self) -> &Matrix8 {
        &self.process_noise.0
    }
}

/// Dynamics bundle used by the filters, with call counters for
/// instrumentation.
#[derive(Debug)]
pub struct AscentModel {
    pub vehicle: VehicleConfig,
    pub env: Environment,
    pub process_noise: ProcessNoise,
    /// Nominal RK4 substep (s).
    pub substep: f64,
    propagations: AtomicUsize,
    jacobians: AtomicUsize,
}

impl Clone for AscentModel {
    fn clone(&self) -> Self {
        AscentModel::new(self.vehicle.clone(), self.env, self.process_noise, self.substep)
    }
}

/// Snapshot of the instrumentation counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CallCounts {
    pub propagations: usize,
    pub jacobians: usize,
}

impl AscentModel {
    pub fn new(vehicle: VehicleConfig, env: Environment, process_noise: ProcessNoise, substep: f64) -> Self {
        AscentModel {
            vehicle,
            env,
            process_noise,
            substep,
            propagations: AtomicUsize::new(0),
            jacobians: AtomicUsize::new(0),
        }
    }

    /// Substeps used for an interval of length `dt`.
    pub fn substeps_for(&self, dt: f64) -> usize {
        let n = (dt / self.substep - 1e-9).ceil();
        if n < 1.0 {
            1
        } else {
            n as usize
        }
    }

    pub fn counts(&self) -> CallCounts {
        CallCounts {
            propagations: self.propagations.load(Ordering::Relaxed),
            jacobians: self.jacobians.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counts(&self) {
        self.propagations.store(0, Ordering::Relaxed);
        self.jacobians.store(0, Ordering::Relaxed);
    }
}

impl SystemModel for AscentModel {
    /// One counted trajectory propagation.
    fn propagate(&self, s: &StateVector, t0: f64, dt: f64) -> Result<StateVector, NavError> {
        self.propagations.fetch_add(1, Ordering::Relaxed);
        propagate(s, dt, self.substeps_for(dt), &self.vehicle, &self.env, t0)
    }

    /// One counted trajectory propagation that also reports the state at the
    /// half-way time `t0 + dt / 2`.
    fn propagate_with_midpoint(
        &self,
        s: &StateVector,
        t0: f64,
        dt: f64,
    ) -> Result<(StateVector, StateVector), NavError> {
        self.propagations.fetch_add(1, Ordering::Relaxed);
        let half = 0.5 * dt;
        let n = self.substeps_for(half);
        let mid = propagate(s, half, n, &self.vehicle, &self.env, t0)?;
        let end = propagate(&mid, half, n, &self.vehicle, &self.env, t0 + half)?;
        Ok((mid, end))
    }

    /// One counted Jacobian evaluation.
    fn jacobian(&self, s: &StateVector, t: f64) -> Result<Matrix8, NavError> {
        self.jacobians.fetch_add(1, Ordering::Relaxed);
        jacobian(s, &self.vehicle, &self.env, t)
    }

    fn process_noise(&self) -> &Matrix8 {
        &self.process_noise.0
    }
}
