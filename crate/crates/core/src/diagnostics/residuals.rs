use alloc::vec::Vec;

use num_traits::Float;

use crate::constitutive::CapillarityModel;
use crate::{Error, FlowState, Result, ScalarField, Spectral, VectorField};

use super::time::cumulative_integral;
use super::{DiagnosticsSeries, TestFunctionSpec};

/// `ρB′(ρ) − (B(ρ) + offset)`, the coefficient of `φ div u` in the
/// renormalized equation for `B + offset`.
pub fn renormalized_coefficient(model: &CapillarityModel, rho: f64, offset: f64) -> Result<f64> {
    Ok(rho * model.b_prime(rho)? - model.b(rho)? - offset)
}

fn uniform_step(t: &[f64]) -> Option<f64> {
    let h = t.get(1)? - t.first()?;
    t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h).then_some(h)
}

/// Relative L² residual of
/// `∂_t(φB̃) + div(φB̃u) + φ(ρB̃′ − B̃) div u − B̃ u·∇φ`, `B̃ = B(ρ) + offset`,
/// at every sample with two neighbours on each side. The time derivative is
/// a fourth-order centered difference of the recorded states, so samples
/// must be uniformly spaced.
pub fn renormalized_residual(series: &DiagnosticsSeries, phi: &TestFunctionSpec, offset: f64) -> Result<Vec<(f64, f64)>> {
    let t = series.times();
    if t.len() < 5 {
        return Err(Error::InvalidArgument("renormalized residual needs at least five samples"));
    }
    let h = uniform_step(&t).ok_or(Error::InvalidArgument("samples must be uniformly spaced"))?;
    let grid = *series.grid();
    let sp = Spectral::new(grid);
    let model = &series.laws().capillarity;
    let w = phi.field(&grid);
    let gw = phi.gradient_field(&grid);
    let states = series.states();
    let b_of = |s: &FlowState| s.rho().try_map(|r| model.b(r).map(|b| b + offset));
    let phib: Vec<ScalarField> = states.iter().map(|s| Ok(&b_of(s)? * &w)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 2..states.len() - 2 {
        let s = &states[k];
        let mut dt = ScalarField::zeros(grid);
        for (j, c) in [(k - 2, 1.0), (k - 1, -8.0), (k + 1, 8.0), (k + 2, -1.0)] {
            dt.axpy(c / (12.0 * h), &phib[j]);
        }
        let u = s.velocity();
        let b = b_of(s)?;
        let transport = sp.divergence(&u.scale_by(&phib[k]));
        let div_u = sp.divergence(&u);
        let coef = s.rho().try_map(|r| renormalized_coefficient(model, r, offset))?;
        let compress = &(&coef * &w) * &div_u;
        let source = &b * &u.dot(&gw);
        let mut res = dt.clone();
        res.axpy(1.0, &transport);
        res.axpy(1.0, &compress);
        res.axpy(-1.0, &source);
        let scale = dt.l2_norm() + transport.l2_norm() + compress.l2_norm() + source.l2_norm();
        out.push((t[k], if scale > 0.0 { res.l2_norm() / scale } else { res.l2_norm() }));
    }
    Ok(out)
}

/// Weak-form residuals for a battery of spatial tests `φ`, each paired with
/// the time profile `θ(t) = (1 − t/T)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFormReport {
    /// Mass residual per test, relative to the sum of term magnitudes.
    pub mass: Vec<f64>,
    /// Momentum residual per test and component, relative likewise.
    pub momentum: Vec<Vec<f64>>,
    /// `|∫ρ(t₁)φ − ∫ρ₀φ|` at the first output time.
    pub initial_trace: Vec<f64>,
}

impl WeakFormReport {
    pub fn max_relative(&self) -> f64 {
        self.mass.iter().chain(self.momentum.iter().flatten()).cloned().fold(0.0, f64::max)
    }
}

/// `|Σ terms|` relative to `Σ|terms| + extra`.
fn relative(terms: &[f64], extra: f64) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>() + extra;
    if scale > 0.0 {
        sum.abs() / scale
    } else {
        0.0
    }
}

/// `(∫ f g, ∫ |f g|)`.
fn pair(f: &ScalarField, g: &ScalarField) -> (f64, f64) {
    let dv = f.grid().cell_volume();
    f.values().iter().zip(g.values()).fold((0.0, 0.0), |(s, a), (x, y)| (s + x * y * dv, a + (x * y).abs() * dv))
}

/// `∫ F_ij ∂_jφ` for the momentum flux without capillarity, plus the
/// capillary pairing `∫ (div K)_i φ` with every derivative of `ΔB` moved onto
/// the test: `−∫ B Δ∂_iφ + ∫ ½(κ+ρκ′)|∇ρ|² ∂_iφ + ∫ ∂_iA ∇A·∇φ`.
fn momentum_pairing(sp: &Spectral, s: &FlowState, series: &DiagnosticsSeries, gw: &VectorField, lap_gw: &VectorField) -> Result<Vec<(f64, f64)>> {
    let laws = series.laws();
    let d = s.grid().dim();
    let rho = s.rho();
    let u = s.velocity();
    let m = s.momentum();
    let grads: Vec<VectorField> = u.components().iter().map(|c| sp.gradient(c)).collect();
    let div_u = sp.divergence(&u);
    let a = rho.try_map(|r| laws.capillarity.a(r))?;
    let b = rho.try_map(|r| laws.capillarity.b(r))?;
    let ga = sp.gradient(&a);
    let g2 = sp.gradient(rho).norm_sq();
    let iso = rho.zip_map(&g2, |r, g| {
        let (k, kp) = laws.capillarity.kappa_pair(r);
        0.5 * (k + r * kp) * g
    });
    let ga_dot = ga.dot(gw);
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let (mut acc, mut mag) = (0.0, 0.0);
        let mut add = |(v, a): (f64, f64), sign: f64| {
            acc += sign * v;
            mag += a;
        };
        for j in 0..d {
            let mut f = (m.component(i) * u.component(j)).scale(-1.0);
            for p in 0..f.len() {
                let (mu, lambda) = laws.viscosity.eval_unchecked(rho[p]);
                let dij = 0.5 * (grads[i].component(j)[p] + grads[j].component(i)[p]);
                f[p] += 2.0 * mu * dij;
                if i == j {
                    f[p] += lambda * div_u[p] - laws.pressure.pressure(rho[p]);
                }
            }
            add(pair(&f, gw.component(j)), -1.0);
        }
        add(pair(&b, lap_gw.component(i)), -1.0);
        add(pair(&iso, gw.component(i)), 1.0);
        add(pair(ga.component(i), &ga_dot), 1.0);
        out.push((acc, mag));
    }
    Ok(out)
}

pub fn weak_form_residual(series: &DiagnosticsSeries, battery: &[TestFunctionSpec]) -> Result<WeakFormReport> {
    let t = series.times();
    if t.len() < 2 {
        return Err(Error::InvalidArgument("weak form needs at least two samples"));
    }
    let grid = *series.grid();
    let d = grid.dim();
    let sp = Spectral::new(grid);
    let (t0, t_end) = (t[0], *t.last().unwrap());
    let span = t_end - t0;
    let theta = |s: f64| (1.0 - (s - t0) / span).powi(2);
    let dtheta = |s: f64| -2.0 * (1.0 - (s - t0) / span) / span;
    let states = series.states();
    let mut report = WeakFormReport { mass: Vec::new(), momentum: Vec::new(), initial_trace: Vec::new() };
    for phi in battery {
        // Spectral derivatives of the sampled test keep discrete integration
        // by parts exact.
        let w = phi.field(&grid);
        let gw = sp.gradient(&w);
        let lap_gw = gw.map_components(|c| sp.laplacian(c));
        let first = states[0].rho().inner(&w);
        let last = states.last().unwrap().rho().inner(&w);
        report.initial_trace.push((states[1].rho().inner(&w) - first).abs());

        let mass_density: Vec<f64> = states.iter().map(|s| s.rho().inner(&w) * dtheta(s.time())).collect();
        let mass_flux: Vec<f64> = states.iter().map(|s| s.momentum().dot(&gw).integral() * theta(s.time())).collect();
        let i1 = *cumulative_integral(&t, &mass_density).last().unwrap();
        let i2 = *cumulative_integral(&t, &mass_flux).last().unwrap();
        report.mass.push(relative(&[last * theta(t_end), -first * theta(t0), -i1, -i2], 0.0));

        let pairings: Vec<Vec<(f64, f64)>> = states.iter().map(|s| momentum_pairing(&sp, s, series, &gw, &lap_gw)).collect::<Result<_>>()?;
        let mut per_comp = Vec::with_capacity(d);
        for i in 0..d {
            let dens: Vec<f64> = states.iter().map(|s| s.momentum().component(i).inner(&w) * dtheta(s.time())).collect();
            let work: Vec<f64> = states.iter().zip(&pairings).map(|(s, p)| p[i].0 * theta(s.time())).collect();
            let mags: Vec<f64> = states.iter().zip(&pairings).map(|(s, p)| p[i].1 * theta(s.time())).collect();
            let j1 = *cumulative_integral(&t, &dens).last().unwrap();
            let j2 = *cumulative_integral(&t, &work).last().unwrap();
            let scale = *cumulative_integral(&t, &mags).last().unwrap();
            let m_end = states.last().unwrap().momentum().component(i).inner(&w) * theta(t_end);
            let m_0 = states[0].momentum().component(i).inner(&w) * theta(t0);
            per_comp.push(relative(&[m_end, -m_0, -j1, -j2], scale));
        }
        report.momentum.push(per_comp);
    }
    Ok(report)
}
