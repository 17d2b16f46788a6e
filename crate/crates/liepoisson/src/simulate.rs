//! Fixed-step explicit integration with monitors.

use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::observable::Observable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "euler" => Ok(Method::Euler),
            _ => Err(Error::Schema(format!("unknown integration method {s:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Euler => "euler",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    /// States with `step % stride == 0` are recorded.
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, steps: usize) -> Self {
        IntegratorConfig { method, dt, steps, stride: 1 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Schema(format!("dt must be positive and finite, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(Error::Schema("stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Monitor series in declaration order.
    pub monitors: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn monitor(&self, name: &str) -> Result<&[f64]> {
        self.monitors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::UnknownMonitor(name.to_string()))
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Header `t,<labels>,<monitors>`; values as 17 significant digits.
    pub fn write_csv<W: Write>(&self, labels: &[String], mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(labels.iter().cloned());
        header.extend(self.monitors.iter().map(|(n, _)| n.clone()));
        writeln!(w, "{}", header.join(","))?;
        for (r, (t, z)) in self.times.iter().zip(&self.states).enumerate() {
            let mut row = vec![fmt_f64(*t)];
            row.extend(z.iter().map(|x| fmt_f64(*x)));
            row.extend(self.monitors.iter().map(|(_, v)| fmt_f64(v[r])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn axpy(z: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    z.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn step<F>(field: &F, z: &[f64], dt: f64, method: Method) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    match method {
        Method::Euler => Ok(axpy(z, dt, &field(z)?)),
        Method::Rk4 => {
            let k1 = field(z)?;
            let k2 = field(&axpy(z, dt / 2.0, &k1))?;
            let k3 = field(&axpy(z, dt / 2.0, &k2))?;
            let k4 = field(&axpy(z, dt, &k3))?;
            Ok(z.iter()
                .enumerate()
                .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        }
    }
}

pub fn integrate<F>(
    field: F,
    z0: &[f64],
    cfg: &IntegratorConfig,
    monitors: &[(String, Observable)],
) -> Result<Trajectory>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    cfg.check()?;
    let mut traj = Trajectory {
        monitors: monitors.iter().map(|(n, _)| (n.clone(), Vec::new())).collect(),
        ..Default::default()
    };
    let record = |traj: &mut Trajectory, k: usize, z: &[f64]| -> Result<()> {
        traj.times.push(k as f64 * cfg.dt);
        traj.states.push(z.to_vec());
        for ((_, obs), (_, series)) in monitors.iter().zip(traj.monitors.iter_mut()) {
            series.push(obs.eval::<f64>(z)?);
        }
        Ok(())
    };
    if z0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState { step: 0 });
    }
    let mut z = z0.to_vec();
    record(&mut traj, 0, &z)?;
    for k in 1..=cfg.steps {
        z = step(&field, &z, cfg.dt, cfg.method)?;
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step: k });
        }
        if k % cfg.stride == 0 {
            record(&mut traj, k, &z)?;
        }
    }
    Ok(traj)
}

/// `max |m(t) − m(0)|` over recorded points.
pub fn monitor_drift(traj: &Trajectory, name: &str) -> Result<f64> {
    let m = traj.monitor(name)?;
    let Some(first) = m.first() else {
        return Ok(0.0);
    };
    Ok(m.iter().map(|v| (v - first).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrderEstimate {
    Order(f64),
    /// Every step size reproduced the reference exactly.
    Exact,
}

impl OrderEstimate {
    pub fn value(self) -> Option<f64> {
        match self {
            OrderEstimate::Order(p) => Some(p),
            OrderEstimate::Exact => None,
        }
    }
}

fn final_state<F>(field: &F, z0: &[f64], t: f64, dt: f64, method: Method) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let steps = (t / dt).round() as usize;
    let mut z = z0.to_vec();
    for k in 1..=steps {
        z = step(field, &z, dt, method)?;
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step: k });
        }
    }
    Ok(z)
}

/// Least-squares slope of `log err(T)` against `log dt`. The reference is an
/// rk4 solution at `min(dts)/32` improved by one Richardson extrapolation.
pub fn convergence_order_estimate<F>(
    field: F,
    z0: &[f64],
    t_end: f64,
    dts: &[f64],
    method: Method,
) -> Result<OrderEstimate>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if dts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 step sizes, got {}",
            dts.len()
        )));
    }
    if !(t_end.is_finite() && t_end > 0.0) || dts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InsufficientData("step sizes and end time must be positive".into()));
    }
    let h = dts.iter().cloned().fold(f64::INFINITY, f64::min) / 32.0;
    let coarse = final_state(&field, z0, t_end, h, Method::Rk4)?;
    let fine = final_state(&field, z0, t_end, h / 2.0, Method::Rk4)?;
    let reference: Vec<f64> = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| f + (f - c) / 15.0)
        .collect();
    let mut pts = Vec::with_capacity(dts.len());
    for &dt in dts {
        let z = final_state(&field, z0, t_end, dt, method)?;
        let err = z
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pts.push((dt.ln(), err));
    }
    if pts.iter().all(|(_, e)| *e == 0.0) {
        return Ok(OrderEstimate::Exact);
    }
    if pts.iter().any(|(_, e)| *e == 0.0) {
        return Err(Error::InsufficientData(
            "error vanished for some but not all step sizes".into(),
        ));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, e)| (a + x, b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, e) in &pts {
        num += (x - mx) * (e.ln() - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::InsufficientData("step sizes must differ".into()));
    }
    Ok(OrderEstimate::Order(num / den))
}
