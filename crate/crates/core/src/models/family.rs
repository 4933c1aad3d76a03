//! Generating pdf families, the nonlinearity map and the generative model
//! `X = V`, `Y = ρ·g(X) + √(1−ρ²)·U` with `U`, `V` i.i.d. from the family.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sinc_unit;
use crate::numerics::RandomStream;

/// Mass of `sinc⁴(0.2x − 0.1) + sinc⁴(0.2x + 0.1)` over the real line: each
/// term contributes `(1/0.2)·∫sinc⁴ = 5·(2/3)`.
pub const BANDLIMITED_NORMALIZER: f64 = 20.0 / 3.0;

/// Bound on the probability mass discarded by any truncation box.
pub const TAIL_MASS: f64 = 1e-8;

/// Band-limited generating density `Z⁻¹·[sinc⁴(0.2x − 0.1) + sinc⁴(0.2x + 0.1)]`.
pub fn bandlimited_pdf(x: f64) -> f64 {
    let a = sinc_unit(0.2 * x - 0.1);
    let b = sinc_unit(0.2 * x + 0.1);
    (a.powi(4) + b.powi(4)) / BANDLIMITED_NORMALIZER
}

/// Half-width `L` of the band-limited truncation box.
///
/// Scans `L` upward until the `1/x⁴` envelope of both tails bounds the mass
/// outside `[−L, L]` below [`TAIL_MASS`].
pub fn bandlimited_half_width() -> f64 {
    static L: OnceLock<f64> = OnceLock::new();
    *L.get_or_init(|| {
        // For |x| > 0.5 each term is at most (π(0.2|x| − 0.1))⁻⁴, so the mass
        // beyond L on both sides is at most 4/(Z·π⁴·0.6·(0.2L − 0.1)³).
        let tail = |l: f64| 4.0 / (BANDLIMITED_NORMALIZER * PI.powi(4) * 0.6 * (0.2 * l - 0.1).powi(3));
        let mut l = 10.0;
        while tail(l) >= TAIL_MASS {
            l += 1.0;
        }
        l
    })
}

/// Tabulated inverse CDF of the band-limited density on the truncation box.
struct InverseCdf {
    lo: f64,
    h: f64,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn bandlimited() -> &'static InverseCdf {
        static TABLE: OnceLock<InverseCdf> = OnceLock::new();
        TABLE.get_or_init(|| {
            let l = bandlimited_half_width();
            // Fine relative to the kernel scale 1/0.2: 64 nodes per quarter unit of 0.2x.
            let h = 1.0 / (64.0 * 0.2 * 4.0);
            let cells = (2.0 * l / h).ceil() as usize;
            let lo = -0.5 * cells as f64 * h;
            let mut cdf = Vec::with_capacity(cells + 1);
            cdf.push(0.0);
            let mut acc = 0.0;
            let mut fa = bandlimited_pdf(lo);
            for k in 0..cells {
                let a = lo + k as f64 * h;
                let fm = bandlimited_pdf(a + 0.5 * h);
                let fb = bandlimited_pdf(a + h);
                acc += h / 6.0 * (fa + 4.0 * fm + fb);
                cdf.push(acc);
                fa = fb;
            }
            let total = acc;
            for c in &mut cdf {
                *c /= total;
            }
            InverseCdf { lo, h, cdf }
        })
    }

    fn sample(&self, u: f64) -> f64 {
        // First node with cdf > u; the cell is [k−1, k].
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.lo + (k as f64 - 1.0 + frac) * self.h
    }
}

/// Distribution shared by the independent draws `U` and `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PdfFamily {
    BandLimited,
    Normal { mu: f64, sigma: f64 },
}

impl PdfFamily {
    pub const STANDARD_NORMAL: PdfFamily = PdfFamily::Normal { mu: 0.0, sigma: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            PdfFamily::BandLimited => Ok(()),
            PdfFamily::Normal { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
                    Err(Error::invalid(format!("normal family needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            PdfFamily::BandLimited => bandlimited_pdf(x),
            PdfFamily::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            PdfFamily::BandLimited => bandlimited_pdf(x).ln(),
            PdfFamily::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * PI).ln()
            }
        }
    }

    /// Normalizer applied to the unnormalized family shape.
    pub fn normalizer(&self) -> f64 {
        match *self {
            PdfFamily::BandLimited => BANDLIMITED_NORMALIZER,
            PdfFamily::Normal { .. } => 1.0,
        }
    }

    /// Truncation box holding all but [`TAIL_MASS`] of the mass.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            PdfFamily::BandLimited => {
                let l = bandlimited_half_width();
                (-l, l)
            }
            PdfFamily::Normal { mu, sigma } => (mu - 8.0 * sigma, mu + 8.0 * sigma),
        }
    }

    pub fn center(&self) -> f64 {
        match *self {
            PdfFamily::BandLimited => 0.0,
            PdfFamily::Normal { mu, .. } => mu,
        }
    }

    /// Width of the bulk of the density.
    pub fn scale(&self) -> f64 {
        match *self {
            PdfFamily::BandLimited => 2.5,
            PdfFamily::Normal { sigma, .. } => sigma,
        }
    }

    /// Quadrature breakpoints resolving the shape of the density inside its support.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let c = self.center();
        let offsets: Vec<f64> = match *self {
            PdfFamily::BandLimited => {
                // Half-period spacing in the bulk, then geometric panels whose
                // bisection nodes do not fall in step with the period-5 oscillation.
                let mut v: Vec<f64> = (0..=10).map(|k| 2.5 * k as f64).collect();
                let mut b = 25.0 * 1.07;
                while b < hi - c {
                    v.push(b);
                    b *= 1.07;
                }
                v
            }
            PdfFamily::Normal { sigma, .. } => {
                [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0].iter().map(|k| k * sigma).collect()
            }
        };
        let mut bps: Vec<f64> = offsets.iter().flat_map(|&o| [c - o, c + o]).collect();
        bps.push(lo);
        bps.push(hi);
        clean_breakpoints(bps, lo, hi)
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            PdfFamily::BandLimited => InverseCdf::bandlimited().sample(stream.uniform()),
            PdfFamily::Normal { mu, sigma } => mu + sigma * stream.standard_normal(),
        }
    }

    pub fn is_standard_normal(&self) -> bool {
        *self == Self::STANDARD_NORMAL
    }
}

impl fmt::Display for PdfFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PdfFamily::BandLimited => f.write_str("bandlimited"),
            p if p.is_standard_normal() => f.write_str("normal"),
            PdfFamily::Normal { mu, sigma } => write!(f, "normal(mu={mu};sigma={sigma})"),
        }
    }
}

impl FromStr for PdfFamily {
    type Err = Error;

    /// Accepts `normal`, `bandlimited` and `normal(mu=..;sigma=..)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "normal" | "gaussian" => return Ok(Self::STANDARD_NORMAL),
            "bandlimited" | "band-limited" | "bl" => return Ok(PdfFamily::BandLimited),
            _ => {}
        }
        let inner = s
            .strip_prefix("normal(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown pdf family '{s}' (expected normal or bandlimited)")))?;
        let (mut mu, mut sigma) = (0.0, 1.0);
        for kv in inner.split([';', ',']) {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad family parameter '{kv}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
            match k.trim() {
                "mu" => mu = v,
                "sigma" => sigma = v,
                other => return Err(Error::Parse(format!("unknown family parameter '{other}'"))),
            }
        }
        let fam = PdfFamily::Normal { mu, sigma };
        fam.validate()?;
        Ok(fam)
    }
}

/// The dependence shape `g` in `Y = ρ·g(X) + √(1−ρ²)·U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nonlinearity {
    Linear,
    Quadratic,
    Cubic,
    Sine,
}

impl Nonlinearity {
    pub const ALL: [Nonlinearity; 4] = [Nonlinearity::Linear, Nonlinearity::Quadratic, Nonlinearity::Cubic, Nonlinearity::Sine];

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Linear => x,
            Nonlinearity::Quadratic => x * x,
            Nonlinearity::Cubic => x * x * x,
            Nonlinearity::Sine => x.sin(),
        }
    }

    /// Real solutions of `g(x) = v` for the invertible branches (none for sine).
    pub fn preimages(&self, v: f64) -> Vec<f64> {
        match self {
            Nonlinearity::Linear => vec![v],
            Nonlinearity::Quadratic if v >= 0.0 => {
                let r = v.sqrt();
                vec![-r, r]
            }
            Nonlinearity::Quadratic => vec![],
            Nonlinearity::Cubic => vec![v.cbrt()],
            Nonlinearity::Sine => vec![],
        }
    }

    /// Range of `g` over `[lo, hi]`.
    pub fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        match self {
            Nonlinearity::Linear => (lo, hi),
            Nonlinearity::Cubic => (lo.powi(3), hi.powi(3)),
            Nonlinearity::Quadratic => {
                let m = (lo * lo).max(hi * hi);
                if lo <= 0.0 && hi >= 0.0 {
                    (0.0, m)
                } else {
                    ((lo * lo).min(hi * hi), m)
                }
            }
            Nonlinearity::Sine => {
                let (mut mn, mut mx) = (lo.sin().min(hi.sin()), lo.sin().max(hi.sin()));
                // Interior extrema at π/2 + kπ.
                let mut k = ((lo - PI / 2.0) / PI).ceil();
                while PI / 2.0 + k * PI <= hi {
                    let v = (PI / 2.0 + k * PI).sin();
                    mn = mn.min(v);
                    mx = mx.max(v);
                    if mn <= -1.0 + 1e-15 && mx >= 1.0 - 1e-15 {
                        break;
                    }
                    k += 1.0;
                }
                (mn, mx)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Nonlinearity::Linear => "linear",
            Nonlinearity::Quadratic => "quadratic",
            Nonlinearity::Cubic => "cubic",
            Nonlinearity::Sine => "sine",
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "x" => Ok(Nonlinearity::Linear),
            "quadratic" | "x2" | "x^2" => Ok(Nonlinearity::Quadratic),
            "cubic" | "x3" | "x^3" => Ok(Nonlinearity::Cubic),
            "sine" | "sin" => Ok(Nonlinearity::Sine),
            other => Err(Error::Parse(format!("unknown nonlinearity '{other}' (expected linear, quadratic, cubic or sine)"))),
        }
    }
}

/// A generating configuration: family, nonlinearity and spread `ρ ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenModel {
    pub family: PdfFamily,
    pub nonlinearity: Nonlinearity,
    pub rho: f64,
}

impl GenModel {
    pub fn new(family: PdfFamily, nonlinearity: Nonlinearity, rho: f64) -> Result<Self> {
        let m = GenModel { family, nonlinearity, rho };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.rho.is_finite() && (0.0..1.0).contains(&self.rho)) {
            return Err(Error::invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        Ok(())
    }

    /// Weight `√(1 − ρ²)` of the noise term.
    pub fn noise_scale(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt()
    }

    /// Cut-off frequency `1/(1 − ρ²)` used throughout the experiments.
    pub fn rho_cutoff(&self) -> f64 {
        1.0 / (1.0 - self.rho * self.rho)
    }

    pub fn y_of(&self, x: f64, u: f64) -> f64 {
        self.rho * self.nonlinearity.apply(x) + self.noise_scale() * u
    }
}

/// Paired observations `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
    pub seed: u64,
    pub model: Option<GenModel>,
}

impl SampleSet {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid(format!("xs and ys differ in length: {} vs {}", xs.len(), ys.len())));
        }
        if xs.is_empty() {
            return Err(Error::invalid("a sample needs at least one pair"));
        }
        if let Some(i) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at position {}", i % xs.len())));
        }
        Ok(SampleSet { xs, ys, seed: 0, model: None })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn with_provenance(mut self, seed: u64, model: Option<GenModel>) -> Self {
        self.seed = seed;
        self.model = model;
        self
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// The same pairs with the roles of X and Y exchanged.
    pub fn swapped(&self) -> SampleSet {
        SampleSet { xs: self.ys.clone(), ys: self.xs.clone(), seed: self.seed, model: None }
    }

    /// Applies separate maps to each coordinate.
    pub fn map(&self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> Result<SampleSet> {
        SampleSet::new(self.xs.iter().map(|&x| fx(x)).collect(), self.ys.iter().map(|&y| fy(y)).collect())
    }
}

/// Draws `n` pairs: for each pair `v` then `u` from the family, `x = v`,
/// `y = ρ·g(v) + √(1−ρ²)·u`.
pub fn sample_model(model: &GenModel, n: usize, stream: &mut RandomStream) -> Result<SampleSet> {
    model.validate()?;
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let v = model.family.sample(stream);
        let u = model.family.sample(stream);
        xs.push(v);
        ys.push(model.y_of(v, u));
    }
    Ok(SampleSet::new(xs, ys)?.with_provenance(stream.master_seed(), Some(*model)))
}

pub(crate) fn clean_breakpoints(mut bps: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    bps.retain(|b| b.is_finite() && *b >= lo && *b <= hi);
    bps.push(lo);
    bps.push(hi);
    bps.sort_by(|a, b| a.total_cmp(b));
    // Drop near-duplicates that would create degenerate panels.
    let tiny = 1e-12 * (hi - lo);
    let mut out: Vec<f64> = Vec::with_capacity(bps.len());
    for b in bps {
        if out.last().map_or(true, |&l| b - l > tiny) {
            out.push(b);
        }
    }
    if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}
