//! Direct evaluation of the Lifshitz free energy.
//!
//! With x = 2 kappa a and x_l = 2 zeta_l a / c the free energy per area is
//!
//!   F = k_B T / (8 pi a^2) sum'_m G(theta m),
//!   G(x_l) = int_{x_l}^inf x ln(1 - r^2 e^{-x}) dx,
//!
//! where theta = 4 pi a k_B T / (hbar c) and the prime halves m = 0. The
//! temperature correction Delta F is the same prefactor times
//! sum'_m g(m) - int_0^inf g(m) dm with g(m) = G(theta m). Both pieces share
//! one kernel so that the cancellation between them is exact up to rounding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dielectric::{reflection_squared, DielectricModel, Mode, PermittivityModel, ReducedDielectric};
use crate::error::{domain, Error, Result};
use crate::qd::Qd;
use crate::quad::GaussLegendre;
use crate::real::{Precision, Real};
use crate::special::{polylog, zeta_int};
use crate::units::{matsubara_step, C, HBAR, K_B};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    TM,
    TE,
    Both,
}

impl Polarization {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            Polarization::TM => &[Mode::TM],
            Polarization::TE => &[Mode::TE],
            Polarization::Both => &[Mode::TM, Mode::TE],
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tm" => Ok(Polarization::TM),
            "te" => Ok(Polarization::TE),
            "both" => Ok(Polarization::Both),
            other => Err(domain(format!("unknown polarization '{other}' (tm, te, both)"))),
        }
    }
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Polarization::TM => "TM",
            Polarization::TE => "TE",
            Polarization::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateSystem {
    /// Plate separation, m.
    pub separation_a: f64,
    /// Temperature, K.
    pub temperature_t: f64,
    pub material: DielectricModel,
    pub polarization: Polarization,
}

impl PlateSystem {
    pub fn new(separation_a: f64, temperature_t: f64, material: DielectricModel, polarization: Polarization) -> Result<Self> {
        let s = PlateSystem { separation_a, temperature_t, material, polarization };
        s.validate()?;
        Ok(s)
    }

    /// Silicon plates 1 um apart.
    pub fn silicon(temperature_t: f64, polarization: Polarization) -> Self {
        PlateSystem { separation_a: 1e-6, temperature_t, material: DielectricModel::silicon(), polarization }
    }

    pub fn at_temperature(&self, t: f64) -> Self {
        PlateSystem { temperature_t: t, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.separation_a > 0.0) || !self.separation_a.is_finite() {
            return Err(domain(format!("separation must be > 0, got {}", self.separation_a)));
        }
        if !(self.temperature_t >= 0.0) || !self.temperature_t.is_finite() {
            return Err(domain(format!("temperature must be >= 0, got {}", self.temperature_t)));
        }
        self.material.validate()
    }

    /// k_B T / (8 pi a^2), J/m^2.
    pub fn prefactor(&self) -> f64 {
        K_B * self.temperature_t / (8.0 * std::f64::consts::PI * self.separation_a * self.separation_a)
    }

    /// Step theta in x_l between Matsubara frequencies.
    pub fn theta(&self) -> f64 {
        matsubara_step(self.separation_a, self.temperature_t)
    }
}

/// Requested working precision in decimal digits. Up to 15 runs in f64,
/// above that in quad-double; quadrature rules are sized to the request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Numerics {
    digits: u32,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { digits: Precision::DEFAULT_DIGITS }
    }
}

impl Numerics {
    pub fn new(digits: u32) -> Result<Self> {
        Precision::from_digits(digits)
            .map(|_| Numerics { digits })
            .ok_or_else(|| domain(format!("precision must be 1..={} digits, got {digits}", Precision::MAX_DIGITS)))
    }

    pub fn double() -> Self {
        Numerics { digits: 15 }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn precision(self) -> Precision {
        Precision::from_digits(self.digits).expect("validated")
    }

    /// Accuracy the quadratures aim for, in digits.
    fn target(self) -> f64 {
        match self.precision() {
            Precision::Double => 16.0,
            Precision::QuadDouble => self.digits as f64,
        }
    }
}

/// Split point between explicit summation and the Gregory tail.
pub const GREGORY_SPLIT: usize = 64;
const MAX_PANEL: f64 = 4.0;
const MAX_GREGORY_ORDER: usize = 30;
const DIRECT_SUM_CAP: usize = 2048;

/// The per-mode integrand machinery at one separation.
#[derive(Debug, Clone)]
pub struct Kernel<R> {
    mode: Mode,
    medium: ReducedDielectric<R>,
    g0: R,
    gl_x: GaussLegendre<R>,
    gl_m: GaussLegendre<R>,
    log_panel: LogPanel<R>,
    x_span: R,
    m_min: R,
    tol: R,
}

impl<R: Real> Kernel<R> {
    pub fn new(material: &DielectricModel, a_m: f64, mode: Mode, numerics: Numerics) -> Result<Self> {
        material.validate()?;
        let d = numerics.target();
        let g0 = g_at_zero::<R>(material, mode)?;
        Ok(Kernel {
            mode,
            medium: material.reduced(a_m),
            g0,
            // Linear panels keep the nearest singularity at least two
            // half-lengths away (Bernstein parameter >= 3 + sqrt 8); log panels
            // span a factor 16 inside a strip of half-width pi/2 (parameter
            // about 2.6). Node counts follow for an error of 10^-d.
            gl_x: GaussLegendre::new((0.62 * d).ceil() as usize + 2),
            gl_m: GaussLegendre::new((0.62 * d).ceil() as usize + 3),
            log_panel: LogPanel::new((1.2 * d).ceil() as usize + 2),
            x_span: R::from_f64(d * std::f64::consts::LN_10 + 6.0),
            m_min: R::from_f64(10f64.powf(-(d + 2.0) / 3.0)),
            tol: R::from_f64(10f64.powf(-d)),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// G(0), from the zeta -> 0 limit of r^2.
    pub fn g_zero(&self) -> R {
        self.g0
    }

    /// G(x_l) = int_{x_l}^inf x ln(1 - r^2 e^{-x}) dx.
    pub fn g(&self, xl: R) -> R {
        if xl <= R::zero() {
            return self.g0;
        }
        let eps = self.medium.eps(xl);
        let f = |x: R| {
            let q = (xl / x) * (xl / x);
            let (r2, om) = reflection_squared(self.mode, eps, q);
            x * log_one_minus(r2, om, x)
        };
        let two = R::from_f64(2.0);
        let mut acc = R::zero();
        let mut start = xl;
        if xl < two {
            // Geometric region near the x = 0 singularity in the log variable.
            let (nodes, hi) = self.log_panel.nodes(xl, two);
            for (x, w) in nodes {
                acc += w * f(x);
            }
            start = hi;
        }
        let breaks = panels_from(start, xl + self.x_span, start.ldexp(-1).min(R::from_f64(MAX_PANEL)));
        acc + self.gl_x.integrate_panels(&breaks, f)
    }

    /// G(x_l) with a rough error estimate from a rule four nodes shorter.
    pub fn g_with_error(&self, xl: R) -> (R, R) {
        let full = self.g(xl);
        if xl <= R::zero() {
            return (full, R::zero());
        }
        let coarse = Kernel { gl_x: GaussLegendre::new(self.gl_x.len().saturating_sub(4).max(2)), ..self.clone() };
        (full, (full - coarse.g(xl)).abs())
    }

    fn g_many(&self, xs: &[R]) -> Vec<R> {
        xs.par_iter().map(|&x| self.g(x)).collect()
    }

    /// int_0^upper g(m) dm with g(m) = G(theta m). Log panels resolve the
    /// m^{3/2} and m^2 ln m behaviour at 0 down to m_min; the remaining
    /// sliver is a trapezoid.
    fn m_integral(&self, theta: R, upper: R) -> R {
        let mut lo = upper;
        while lo > self.m_min {
            lo = lo.ldexp(-LOG_PANEL_BITS);
        }
        let (nodes, _) = self.log_panel.nodes(lo, upper);
        let xs: Vec<R> = nodes.iter().map(|&(m, _)| theta * m).collect();
        let vals = self.g_many(&xs);
        let mut acc = R::zero();
        for (v, (_, w)) in vals.iter().zip(&nodes) {
            acc += *v * *w;
        }
        acc + lo.ldexp(-1) * (self.g0 + self.g(theta * lo))
    }

    /// int_{x_start}^inf G(x_l) dx_l for x_start > 0.
    fn x_integral_from(&self, x_start: R) -> R {
        let breaks = panels_from(x_start, x_start + self.x_span, x_start.ldexp(-1).min(R::from_f64(MAX_PANEL)));
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            collect_nodes(&self.gl_m, w[0], w[1], &mut nodes, &mut weights);
        }
        let vals = self.g_many(&nodes);
        vals.iter().zip(&weights).fold(R::zero(), |acc, (v, w)| acc + *v * *w)
    }

    /// int_0^inf G(x_l) dx_l.
    pub fn frequency_integral(&self) -> R {
        let one = R::one();
        let head = self.m_integral(one, one);
        head + self.x_integral_from(one)
    }

    /// Gregory's end correction sum_{k>=1} c_{k+1} Delta^k g(n): equals
    /// sum_{m>=n} g(m) - g(n)/2 - int_n^inf g(m) dm for smooth g.
    fn gregory_tail(&self, theta: R, n: usize, scale: R) -> (R, R) {
        let coeffs = gregory_coefficients::<R>(MAX_GREGORY_ORDER + 2);
        let xs: Vec<R> = (0..=MAX_GREGORY_ORDER).map(|k| theta * R::from_f64((n + k) as f64)).collect();
        let mut diffs = self.g_many(&xs);
        let mut tail = R::zero();
        let mut last = R::from_f64(f64::INFINITY);
        for k in 1..=MAX_GREGORY_ORDER {
            for j in 0..diffs.len() - k {
                diffs[j] = diffs[j + 1] - diffs[j];
            }
            let term = coeffs[k + 1] * diffs[0];
            // Asymptotic series: stop at the smallest term.
            if term.abs() > last && k > 2 {
                break;
            }
            tail += term;
            last = term.abs();
            if last <= self.tol * scale {
                break;
            }
        }
        (tail, last)
    }

    /// sum'_{m>=0} g(m) - int_0^inf g(m) dm for step theta.
    pub fn sum_minus_integral(&self, theta: R) -> SumMinusIntegral<R> {
        let n = GREGORY_SPLIT;
        let xs: Vec<R> = (1..=n).map(|m| theta * R::from_f64(m as f64)).collect();
        let vals = self.g_many(&xs);
        let mut sum = self.g0.ldexp(-1);
        for v in &vals[..n - 1] {
            sum += *v;
        }
        sum += vals[n - 1].ldexp(-1);
        let integral = self.m_integral(theta, R::from_f64(n as f64));
        let scale = sum.abs().max(integral.abs());
        let (tail, last) = self.gregory_tail(theta, n, scale);
        SumMinusIntegral { value: sum - integral + tail, sum, integral, tail, tail_error: last }
    }

    /// sum'_{m>=0} g(m): direct terms until a geometric tail estimate is
    /// negligible, or up to a cap past which the remainder is
    /// int_N^inf g + g(N)/2 + Gregory correction.
    pub fn matsubara_sum(&self, theta: R, rel_tol: f64) -> (R, usize, R) {
        let tol = R::from_f64(rel_tol);
        let mut sum = self.g0.ldexp(-1);
        let mut prev = self.g0;
        let chunk = 64;
        let mut m = 1usize;
        while m <= DIRECT_SUM_CAP {
            let xs: Vec<R> = (m..m + chunk).map(|k| theta * R::from_f64(k as f64)).collect();
            let vals = self.g_many(&xs);
            for v in vals {
                sum += v;
                if v == R::zero() {
                    return (sum, m, R::zero());
                }
                let ratio = v / prev;
                prev = v;
                if ratio > R::zero() && ratio < R::one() {
                    let tail = v * ratio / (R::one() - ratio);
                    if tail.abs() <= tol * sum.abs() {
                        return (sum + tail, m, tail.abs());
                    }
                }
                m += 1;
            }
        }
        // Remainder past the cap.
        let n = m;
        let gn = self.g(theta * R::from_f64(n as f64));
        let rest = self.x_integral_from(theta * R::from_f64(n as f64)) / theta;
        let (tail, err) = self.gregory_tail(theta, n, sum.abs());
        (sum + gn.ldexp(-1) + rest + tail, n, err)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SumMinusIntegral<R> {
    pub value: R,
    pub sum: R,
    pub integral: R,
    pub tail: R,
    pub tail_error: R,
}

/// Panel ratio 2^LOG_PANEL_BITS for the log-variable rule.
const LOG_PANEL_BITS: i32 = 4;

/// Gauss-Legendre in s = ln(x / lo) on one panel s in [0, ln 16], stored as
/// (e^s, w e^s) so every panel is an exact power-of-two rescaling.
#[derive(Debug, Clone)]
struct LogPanel<R> {
    scaled: Vec<(R, R)>,
}

impl<R: Real> LogPanel<R> {
    fn new(n: usize) -> Self {
        let gl = GaussLegendre::<R>::new(n);
        let width = R::ln2() * R::from_f64(LOG_PANEL_BITS as f64);
        let scaled = gl
            .mapped(R::zero(), width)
            .map(|(s, w)| {
                let e = s.exp();
                (e, w * e)
            })
            .collect();
        LogPanel { scaled }
    }

    /// Nodes and weights on [lo, hi) with hi = lo 16^k the first such point
    /// at or above `at_least`.
    fn nodes(&self, lo: R, at_least: R) -> (Vec<(R, R)>, R) {
        let mut out = Vec::new();
        let mut base = lo;
        while base < at_least {
            for &(e, w) in &self.scaled {
                out.push((base * e, base * w));
            }
            base = base.ldexp(LOG_PANEL_BITS);
        }
        (out, base)
    }
}

/// Breakpoints from `start` to at least `end`: first panel `h0`, doubling up
/// to `MAX_PANEL`.
fn panels_from<R: Real>(start: R, end: R, h0: R) -> Vec<R> {
    let hmax = R::from_f64(MAX_PANEL);
    let mut out = vec![start];
    let mut b = start;
    let mut h = h0;
    while b < end {
        b += h;
        out.push(b);
        h = (h.ldexp(1)).min(hmax);
    }
    out
}

fn collect_nodes<R: Real>(gl: &GaussLegendre<R>, a: R, b: R, nodes: &mut Vec<R>, weights: &mut Vec<R>) {
    for (x, w) in gl.mapped(a, b) {
        nodes.push(x);
        weights.push(w);
    }
}

/// ln(1 - r^2 e^{-x}) given r^2 and om = 1 - r^2, without cancellation.
#[inline]
fn log_one_minus<R: Real>(r2: R, om: R, x: R) -> R {
    let y = r2 * (-x).exp();
    if y < R::from_f64(0.5) {
        ln_1m_small(y)
    } else {
        (om + r2 * -(-x).exp_m1()).ln()
    }
}

/// ln(1 - y) for 0 <= y < 1/2, with a short series for tiny y.
#[inline]
fn ln_1m_small<R: Real>(y: R) -> R {
    let cut = R::epsilon().sqrt().sqrt();
    if y < cut {
        let y2 = y * y;
        return -(y + y2.ldexp(-1) + y2 * y / R::from_f64(3.0) + y2 * y2.ldexp(-2));
    }
    (-y).ln_1p()
}

/// Coefficients of x / ln(1 + x) = sum c_k x^k: 1, 1/2, -1/12, 1/24, -19/720, ...
pub fn gregory_coefficients<R: Real>(count: usize) -> Vec<R> {
    // Invert L(x) = ln(1+x)/x = sum (-1)^n x^n/(n+1).
    let l: Vec<R> = (0..count)
        .map(|n| {
            let v = R::one() / R::from_f64((n + 1) as f64);
            if n % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    let mut c = vec![R::one()];
    for n in 1..count {
        let mut acc = R::zero();
        for j in 1..=n {
            acc += l[j] * c[n - j];
        }
        c.push(-acc);
    }
    c
}

fn g_at_zero<R: Real>(material: &DielectricModel, mode: Mode) -> Result<R> {
    let zeta3 = zeta_int::<R>(3)?;
    Ok(match (material.model, mode) {
        (PermittivityModel::IdealConductor, _) => -zeta3,
        (_, Mode::TE) => R::zero(),
        (_, Mode::TM) if material.is_conducting() => -zeta3,
        (_, Mode::TM) => {
            let eb = R::from_f64(material.eps_bar);
            let r = (eb - R::one()) / (eb + R::one());
            -polylog(3, r * r)?
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSummand {
    pub m_index: usize,
    /// G(theta m), dimensionless.
    pub g_value: f64,
    pub quadrature_error: f64,
}

/// The m-th Matsubara term (before the 1/2 weight at m = 0).
pub fn mode_integral(system: &PlateSystem, m: usize, mode: Mode, numerics: Numerics) -> Result<ModeSummand> {
    system.validate()?;
    if m > 0 && system.temperature_t == 0.0 {
        return Err(domain("Matsubara index m > 0 needs T > 0"));
    }
    fn run<R: Real>(system: &PlateSystem, m: usize, mode: Mode, numerics: Numerics) -> Result<ModeSummand> {
        let k = Kernel::<R>::new(&system.material, system.separation_a, mode, numerics)?;
        let xl = R::from_f64(system.theta()) * R::from_f64(m as f64);
        let (g, err) = k.g_with_error(xl);
        if !g.is_finite() {
            return Err(Error::Numerical { message: "non-finite mode integral".into(), partial: g.to_f64(), bound: f64::INFINITY });
        }
        Ok(ModeSummand { m_index: m, g_value: g.to_f64(), quadrature_error: err.to_f64() })
    }
    match numerics.precision() {
        Precision::Double => run::<f64>(system, m, mode, numerics),
        Precision::QuadDouble => run::<Qd>(system, m, mode, numerics),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeEnergyResult {
    /// J/m^2.
    pub total: f64,
    pub tm: Option<f64>,
    pub te: Option<f64>,
    /// Last Matsubara index summed explicitly.
    pub m_truncation: usize,
    pub est_error: f64,
}

/// F(T) by Matsubara summation.
pub fn free_energy(system: &PlateSystem, numerics: Numerics) -> Result<FreeEnergyResult> {
    system.validate()?;
    if !(system.temperature_t > 0.0) {
        return Err(domain("free_energy needs T > 0; use zero_temperature_energy"));
    }
    fn run<R: Real>(system: &PlateSystem, numerics: Numerics) -> Result<FreeEnergyResult> {
        let theta = R::from_f64(system.theta());
        let pref = system.prefactor();
        let rel_tol = 10f64.powf(-numerics.target());
        let mut out = FreeEnergyResult { total: 0.0, tm: None, te: None, m_truncation: 0, est_error: 0.0 };
        for &mode in system.polarization.modes() {
            let k = Kernel::<R>::new(&system.material, system.separation_a, mode, numerics)?;
            let (s, m, err) = k.matsubara_sum(theta, rel_tol);
            let f = pref * s.to_f64();
            if !f.is_finite() {
                return Err(Error::Numerical { message: "non-finite Matsubara sum".into(), partial: f, bound: f64::INFINITY });
            }
            out.total += f;
            out.m_truncation = out.m_truncation.max(m);
            out.est_error += pref * err.to_f64() + f.abs() * rel_tol;
            match mode {
                Mode::TM => out.tm = Some(f),
                Mode::TE => out.te = Some(f),
            }
        }
        Ok(out)
    }
    match numerics.precision() {
        Precision::Double => run::<f64>(system, numerics),
        Precision::QuadDouble => run::<Qd>(system, numerics),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroTemperatureEnergy {
    pub total: f64,
    pub tm: Option<f64>,
    pub te: Option<f64>,
}

/// F(0) = hbar c / (32 pi^2 a^3) int_0^inf G(x_l) dx_l per mode, J/m^2.
pub fn zero_temperature_energy(system: &PlateSystem, numerics: Numerics) -> Result<ZeroTemperatureEnergy> {
    system.validate()?;
    fn run<R: Real>(system: &PlateSystem, numerics: Numerics) -> Result<ZeroTemperatureEnergy> {
        let a = system.separation_a;
        let pref = HBAR * C / (32.0 * std::f64::consts::PI.powi(2) * a * a * a);
        let mut out = ZeroTemperatureEnergy { total: 0.0, tm: None, te: None };
        for &mode in system.polarization.modes() {
            let k = Kernel::<R>::new(&system.material, a, mode, numerics)?;
            let f = pref * k.frequency_integral().to_f64();
            out.total += f;
            match mode {
                Mode::TM => out.tm = Some(f),
                Mode::TE => out.te = Some(f),
            }
        }
        Ok(out)
    }
    match numerics.precision() {
        Precision::Double => run::<f64>(system, numerics),
        Precision::QuadDouble => run::<Qd>(system, numerics),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaF {
    pub mode: Mode,
    pub temperature_t: f64,
    /// Dimensionless sum minus integral.
    pub gamma: f64,
    /// J/m^2.
    pub value: f64,
    pub est_error: f64,
    /// |sum| / |sum - integral|: digits lost to cancellation.
    pub cancellation: f64,
}

/// Delta F = F(T) - F(0) per selected mode, from the sum-minus-integral.
pub fn delta_f_direct(system: &PlateSystem, numerics: Numerics) -> Result<Vec<DeltaF>> {
    system.validate()?;
    if !(system.temperature_t > 0.0) {
        return Err(domain("delta_f_direct needs T > 0"));
    }
    match numerics.precision() {
        Precision::Double => delta_f_generic::<f64>(system, numerics),
        Precision::QuadDouble => delta_f_generic::<Qd>(system, numerics),
    }
}

fn delta_f_generic<R: Real>(system: &PlateSystem, numerics: Numerics) -> Result<Vec<DeltaF>> {
    let theta = R::from_f64(system.theta());
    let pref = system.prefactor();
    let mut out = Vec::new();
    for &mode in system.polarization.modes() {
        let k = Kernel::<R>::new(&system.material, system.separation_a, mode, numerics)?;
        out.push(finish_delta_f(system, mode, pref, &k.sum_minus_integral(theta), numerics)?);
    }
    Ok(out)
}

fn finish_delta_f<R: Real>(system: &PlateSystem, mode: Mode, pref: f64, smi: &SumMinusIntegral<R>, numerics: Numerics) -> Result<DeltaF> {
    let gamma = smi.value.to_f64();
    let scale = smi.sum.abs().max(smi.integral.abs()).to_f64();
    let rounding = scale * (R::epsilon().to_f64() * 64.0 + 10f64.powf(-numerics.target()));
    let err = rounding + smi.tail_error.to_f64();
    if gamma == 0.0 {
        return Ok(DeltaF { mode, temperature_t: system.temperature_t, gamma, value: 0.0, est_error: pref * err, cancellation: 1.0 });
    }
    let loss = err / gamma.abs();
    if loss > 1e-3 {
        return Err(Error::Precision { loss });
    }
    Ok(DeltaF {
        mode,
        temperature_t: system.temperature_t,
        gamma,
        value: pref * gamma,
        est_error: pref * err,
        cancellation: scale / gamma.abs(),
    })
}

/// Delta F for many temperatures at once, in grid order.
pub fn delta_f_sweep(system: &PlateSystem, temps: &[f64], numerics: Numerics) -> Result<Vec<Vec<DeltaF>>> {
    system.validate()?;
    if let Some(t) = temps.iter().find(|t| !(**t > 0.0)) {
        return Err(domain(format!("sweep temperatures must be > 0, got {t}")));
    }
    fn run<R: Real>(system: &PlateSystem, temps: &[f64], numerics: Numerics) -> Result<Vec<Vec<DeltaF>>> {
        let kernels: Vec<Kernel<R>> = system
            .polarization
            .modes()
            .iter()
            .map(|&m| Kernel::new(&system.material, system.separation_a, m, numerics))
            .collect::<Result<_>>()?;
        temps
            .iter()
            .map(|&t| {
                let s = system.at_temperature(t);
                let theta = R::from_f64(s.theta());
                kernels.iter().map(|k| finish_delta_f(&s, k.mode(), s.prefactor(), &k.sum_minus_integral(theta), numerics)).collect()
            })
            .collect()
    }
    match numerics.precision() {
        Precision::Double => run::<f64>(system, temps, numerics),
        Precision::QuadDouble => run::<Qd>(system, temps, numerics),
    }
}
