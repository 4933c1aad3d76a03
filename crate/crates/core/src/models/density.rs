//! Joint and marginal densities of a [`GenModel`].

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, QuadratureSpec};

use super::family::{clean_breakpoints, GenModel, PdfFamily};

const INITIAL_INTERVALS: usize = 2048;
const MAX_INTERVALS: usize = 1 << 17;
/// Pointwise agreement required between the interpolant and direct marginalization.
const CACHE_REL_TOL: f64 = 1e-6;
const CACHE_ABS_TOL: f64 = 1e-9;
const LN_FLOOR: f64 = -690.0;

/// Densities `f_x`, `f_y`, `f_xy` of a generating model together with their
/// truncation boxes.
#[derive(Debug, Clone)]
pub struct DensityModel {
    model: GenModel,
    noise: f64,
    x_box: (f64, f64),
    u_box: (f64, f64),
    y_box: (f64, f64),
    marginal: Marginal,
}

#[derive(Debug, Clone)]
enum Marginal {
    /// `ρ = 0`: `Y = U`.
    Noise,
    Cached(LogGrid),
}

/// `ln f_y` tabulated on `y = center + a·sinh(t)` with `t` uniform, so the grid
/// is dense in the bulk and sparse in the heavy tails.
#[derive(Debug, Clone)]
struct LogGrid {
    center: f64,
    a: f64,
    t0: f64,
    dt: f64,
    ln_f: Vec<f64>,
}

impl LogGrid {
    fn t_of(&self, y: f64) -> f64 {
        ((y - self.center) / self.a).asinh()
    }

    fn y_of(&self, t: f64) -> f64 {
        self.center + self.a * t.sinh()
    }

    fn nodes(&self) -> usize {
        self.ln_f.len()
    }

    /// Catmull-Rom interpolation of `ln f` in `t`; ends use the one-sided neighbour.
    fn ln_eval(&self, y: f64) -> f64 {
        let s = (self.t_of(y) - self.t0) / self.dt;
        let last = self.ln_f.len() - 1;
        if !(s >= 0.0 && s <= last as f64) {
            return f64::NEG_INFINITY;
        }
        let k = (s.floor() as usize).min(last - 1);
        let u = s - k as f64;
        let p1 = self.ln_f[k];
        let p2 = self.ln_f[k + 1];
        let p0 = if k > 0 { self.ln_f[k - 1] } else { 2.0 * p1 - p2 };
        let p3 = if k + 2 <= last { self.ln_f[k + 2] } else { 2.0 * p2 - p1 };
        let u2 = u * u;
        let u3 = u2 * u;
        0.5 * (2.0 * p1 + (p2 - p0) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 + (3.0 * p1 - p0 - 3.0 * p2 + p3) * u3)
    }
}

fn ln_floor(v: f64) -> f64 {
    if v > 0.0 {
        v.ln().max(LN_FLOOR)
    } else {
        LN_FLOOR
    }
}

impl DensityModel {
    pub fn model(&self) -> &GenModel {
        &self.model
    }

    pub fn family(&self) -> PdfFamily {
        self.model.family
    }

    /// Noise weight `s = √(1−ρ²)`.
    pub fn noise_scale(&self) -> f64 {
        self.noise
    }

    pub fn x_support(&self) -> (f64, f64) {
        self.x_box
    }

    pub fn y_support(&self) -> (f64, f64) {
        self.y_box
    }

    /// Support of the noise draw `U`.
    pub fn u_support(&self) -> (f64, f64) {
        self.u_box
    }

    pub fn f_x(&self, x: f64) -> f64 {
        self.model.family.pdf(x)
    }

    pub fn f_xy(&self, x: f64, y: f64) -> f64 {
        let u = (y - self.model.rho * self.model.nonlinearity.apply(x)) / self.noise;
        self.model.family.pdf(x) * self.model.family.pdf(u) / self.noise
    }

    pub fn f_y(&self, y: f64) -> f64 {
        match &self.marginal {
            Marginal::Noise => self.model.family.pdf(y),
            Marginal::Cached(grid) => {
                let l = grid.ln_eval(y);
                if l <= LN_FLOOR {
                    0.0
                } else {
                    l.exp()
                }
            }
        }
    }

    /// `ln f_y`, floored at about `−690` where the marginal underflows.
    pub fn ln_f_y(&self, y: f64) -> f64 {
        match &self.marginal {
            Marginal::Noise => self.model.family.ln_pdf(y).max(LN_FLOOR),
            Marginal::Cached(grid) => grid.ln_eval(y).max(LN_FLOOR),
        }
    }

    /// Number of grid nodes behind the `f_y` interpolant (0 when exact).
    pub fn marginal_nodes(&self) -> usize {
        match &self.marginal {
            Marginal::Noise => 0,
            Marginal::Cached(grid) => grid.nodes(),
        }
    }

    /// `f_y(y)` by direct quadrature over `x`, bypassing the cache.
    pub fn f_y_direct(&self, y: f64) -> Result<f64> {
        marginalize(&self.model, self.noise, self.x_box, self.u_box, y)
    }
}

/// Builds the densities of `model`, tabulating `f_y` by marginalization.
pub fn joint_density(model: &GenModel) -> Result<DensityModel> {
    model.validate()?;
    let fam = model.family;
    let noise = model.noise_scale();
    let x_box = fam.support();
    let u_box = fam.support();
    let (glo, ghi) = model.nonlinearity.range_on(x_box.0, x_box.1);
    let y_box = (model.rho * glo + noise * u_box.0, model.rho * ghi + noise * u_box.1);
    let marginal = if model.rho == 0.0 {
        Marginal::Noise
    } else {
        Marginal::Cached(build_grid(model, noise, x_box, u_box, y_box)?)
    };
    let dm = DensityModel { model: *model, noise, x_box, u_box, y_box, marginal };
    dm.check_normalization()?;
    Ok(dm)
}

fn build_grid(model: &GenModel, noise: f64, x_box: (f64, f64), u_box: (f64, f64), y_box: (f64, f64)) -> Result<LogGrid> {
    let fam = model.family;
    let center = model.rho * model.nonlinearity.apply(fam.center()) + noise * fam.center();
    let a = noise * fam.scale();
    let t0 = ((y_box.0 - center) / a).asinh();
    let t1 = ((y_box.1 - center) / a).asinh();
    let direct = |t: f64| -> Result<f64> { marginalize(model, noise, x_box, u_box, center + a * t.sinh()) };

    let mut grid = LogGrid { center, a, t0, dt: (t1 - t0) / INITIAL_INTERVALS as f64, ln_f: Vec::new() };
    let mut values: Vec<f64> = (0..=INITIAL_INTERVALS).map(|k| direct(t0 + k as f64 * grid.dt)).collect::<Result<_>>()?;
    grid.ln_f = values.iter().map(|&v| ln_floor(v)).collect();
    loop {
        let fmax = values.iter().cloned().fold(0.0, f64::max);
        let mids: Vec<f64> = (0..grid.nodes() - 1).map(|k| direct(t0 + (k as f64 + 0.5) * grid.dt)).collect::<Result<_>>()?;
        let converged = mids.iter().enumerate().all(|(k, &d)| {
            let e = grid.ln_eval(grid.y_of(t0 + (k as f64 + 0.5) * grid.dt));
            let e = if e <= LN_FLOOR { 0.0 } else { e.exp() };
            (e - d).abs() <= CACHE_REL_TOL * d + CACHE_ABS_TOL * fmax
        });
        // Midpoints become nodes either way.
        let mut merged = Vec::with_capacity(values.len() + mids.len());
        for (k, &v) in values.iter().enumerate() {
            merged.push(v);
            if k < mids.len() {
                merged.push(mids[k]);
            }
        }
        values = merged;
        grid.dt *= 0.5;
        grid.ln_f = values.iter().map(|&v| ln_floor(v)).collect();
        if converged {
            return Ok(grid);
        }
        if grid.nodes() > MAX_INTERVALS {
            return Err(Error::NonConvergence { iterations: (MAX_INTERVALS / INITIAL_INTERVALS).ilog2() as usize, residual_norm: f64::NAN });
        }
    }
}

/// Offsets (in units of the noise scale) whose preimages split the
/// marginalization integral where the integrand changes shape.
const NOISE_OFFSETS: [f64; 16] = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0, 64.0, 128.0, 256.0];

fn marginalize(model: &GenModel, noise: f64, x_box: (f64, f64), u_box: (f64, f64), y: f64) -> Result<f64> {
    let fam = model.family;
    let rho = model.rho;
    let g = model.nonlinearity;
    let mut bps = fam.breakpoints();
    if rho > 0.0 {
        let c = fam.center();
        let sc = fam.scale();
        for off in NOISE_OFFSETS {
            for sign in [-1.0, 1.0] {
                let u = c + sign * off * sc;
                if u < u_box.0 || u > u_box.1 {
                    continue;
                }
                bps.extend(g.preimages((y - noise * u) / rho));
            }
        }
    }
    let bps = clean_breakpoints(bps, x_box.0, x_box.1);
    let spec = QuadratureSpec::new(vec![bps]).with_tolerances(1e-15, 1e-9).with_max_refinements(50);
    let integrand = |x: f64| {
        let fv = fam.pdf(x);
        if fv == 0.0 {
            return 0.0;
        }
        fv * fam.pdf((y - rho * g.apply(x)) / noise)
    };
    let r = integrate_1d(integrand, &spec)?;
    Ok(r.value.max(0.0) / noise)
}

impl DensityModel {
    fn check_normalization(&self) -> Result<()> {
        let fam = self.model.family;
        let spec = QuadratureSpec::new(vec![fam.breakpoints()]).with_tolerances(1e-12, 1e-10);
        let mx = integrate_1d(|x| fam.pdf(x), &spec)?.value;
        let my = match &self.marginal {
            Marginal::Noise => mx,
            Marginal::Cached(grid) => {
                // Integrate in t, where the tabulated marginal is smooth.
                let t1 = grid.t0 + grid.dt * (grid.nodes() - 1) as f64;
                let panels = 256;
                let bps: Vec<f64> = (0..=panels).map(|k| grid.t0 + (t1 - grid.t0) * k as f64 / panels as f64).collect();
                let spec = QuadratureSpec::new(vec![bps]).with_tolerances(1e-12, 1e-10);
                integrate_1d(|t| self.f_y(grid.y_of(t)) * grid.a * t.cosh(), &spec)?.value
            }
        };
        for mass in [mx, my] {
            if (mass - 1.0).abs() > 1e-6 {
                return Err(Error::Quadrature { estimate: mass, error_bound: 1e-6 });
            }
        }
        Ok(())
    }
}
