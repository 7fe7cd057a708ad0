//! Coverage probability and ASE by numerical integration.
//!
//! The serving base station is the one with the smallest path loss. For a
//! user at the origin the engine integrates, piece by piece and per link
//! state, the chain
//!
//! ```text
//! p_cov(lambda, gamma) = sum_n integral  exp(-gamma N0 / (P zeta_n(w)))
//!                                      * laplace(gamma / (P zeta_n(w)), r)
//!                                      * f_n(r) dr
//! ```
//!
//! where `f_n` is the 2D serving-distance density restricted to piece `n`,
//! `laplace` is the Laplace transform of the aggregate interference under
//! Rayleigh fading, and `w = sqrt(r^2 + L^2)` converts the 2D integration
//! variable to the 3D propagation distance with antenna height difference
//! `L`. ASE follows from the coverage curve by integration by parts:
//!
//! ```text
//! ase(lambda, g0) = lambda * (log2(1+g0) p_cov(g0)
//!                   + (1/ln 2) integral_{g0}^inf p_cov(g)/(1+g) dg)
//! ```
//!
//! Both exclusion radii (`r1`, `r2`: the distance at which the other link
//! state reaches the serving path loss) invert the piecewise power laws in
//! closed form on the 3D distance and clamp to 0 when the required 3D
//! distance falls below `L`.

use std::cell::RefCell;

use thiserror::Error;

use crate::channel::{FadingKind, LinkType, ModelError, PathLossModel};
use crate::quadrature::{
    integrate, integrate_to_infinity, integrate_to_infinity_mapped, QuadratureError, QuadratureSpec,
};

/// Deployment-wide parameters of the downlink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Base station density in BSs per square kilometre.
    pub density_per_km2: f64,
    /// Transmit power per BS in milliwatts.
    pub tx_power_mw: f64,
    /// Additive noise power at the user in milliwatts.
    pub noise_mw: f64,
    /// Antenna height difference between BS and user in kilometres.
    pub height_diff_km: f64,
    /// Multi-path fading on every link.
    pub fading: FadingKind,
}

impl NetworkParams {
    fn validate(&self) -> Result<(), AnalyticError> {
        let ok = self.density_per_km2 > 0.0
            && self.density_per_km2.is_finite()
            && self.tx_power_mw > 0.0
            && self.tx_power_mw.is_finite()
            && self.noise_mw >= 0.0
            && self.noise_mw.is_finite()
            && self.height_diff_km >= 0.0
            && self.height_diff_km.is_finite();
        if ok {
            Ok(())
        } else {
            Err(AnalyticError::Domain(format!(
                "network parameters out of range: density {}, power {} mW, noise {} mW, height difference {} km",
                self.density_per_km2, self.tx_power_mw, self.noise_mw, self.height_diff_km
            )))
        }
    }
}

/// Which evaluation route produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

/// One coverage-probability evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRecord {
    pub lambda_per_km2: f64,
    /// SINR threshold, linear.
    pub gamma_linear: f64,
    pub p_cov: f64,
    pub method: Method,
    /// Half-width of the 95% confidence interval; 0 for analytic values.
    pub ci_half_width: f64,
}

/// One area-spectral-efficiency evaluation, in bps/Hz/km^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AseRecord {
    pub lambda_per_km2: f64,
    /// Minimum working SINR, linear.
    pub gamma0_linear: f64,
    pub ase_bps_hz_km2: f64,
    pub method: Method,
    /// Half-width of the 95% confidence interval; 0 for analytic values.
    pub ci_half_width: f64,
}

/// Failures of the analytic engine.
#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("{0}")]
    Domain(String),
    #[error("analytic coverage and ASE require Rayleigh fading")]
    UnsupportedFading,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("CCDF rose from {previous} to {current} at gamma = {gamma}: integration tolerances too loose")]
    NonMonotoneCcdf {
        gamma: f64,
        previous: f64,
        current: f64,
    },
}

/// Neglected probability mass when truncating a radial integral:
/// `exp(-37)` is below 1e-16.
const TAIL_EXPONENT: f64 = 37.0;

struct Engine<'a> {
    model: &'a PathLossModel,
    params: &'a NetworkParams,
    quad: QuadratureSpec,
    /// Upper 2D edge per piece: `sqrt(max(d_n^2 - L^2, 0))`, infinite last.
    breaks_2d: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(
        model: &'a PathLossModel,
        params: &'a NetworkParams,
        quad: &QuadratureSpec,
    ) -> Result<Self, AnalyticError> {
        params.validate()?;
        let l = params.height_diff_km;
        let breaks_2d = (0..model.piece_count())
            .map(|n| to_2d(model.upper_break(n), l))
            .collect();
        Ok(Self {
            model,
            params,
            quad: *quad,
            breaks_2d,
        })
    }

    /// Checks that interference from the unbounded outermost piece has a
    /// finite Laplace exponent (power-law decay faster than `u^-2`).
    fn validate_tail_decay(&self) -> Result<(), AnalyticError> {
        let last = self.model.piece_count() - 1;
        let form = self.model.los_form(last);
        let piece = self.model.piece(last);
        if !form.is_always_zero() && piece.los_exponent <= 2.0 {
            return Err(AnalyticError::Domain(format!(
                "LoS exponent {} on the unbounded outermost piece keeps aggregate interference infinite (needs > 2)",
                piece.los_exponent
            )));
        }
        if !form.is_always_one() && piece.nlos_exponent <= 2.0 {
            return Err(AnalyticError::Domain(format!(
                "NLoS exponent {} on the unbounded outermost piece keeps aggregate interference infinite (needs > 2)",
                piece.nlos_exponent
            )));
        }
        Ok(())
    }

    fn lambda(&self) -> f64 {
        self.params.density_per_km2
    }

    fn height(&self) -> f64 {
        self.params.height_diff_km
    }

    /// Lower 2D edge of piece `n`.
    fn lower_2d(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.breaks_2d[n - 1]
        }
    }

    /// Mean number of LoS base stations within 2D radius `x`:
    /// `2 pi lambda int_0^x Pr_L(w(u)) u du`, evaluated on the 3D distance
    /// via `u du = w dw` and split at model breakpoints.
    fn los_intensity(&self, x: f64) -> Result<f64, AnalyticError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let l = self.height();
        let w_hi_total = x.hypot(l);
        let mut lo = l.max(f64::MIN_POSITIVE);
        let mut sum = 0.0;
        for n in 0..self.model.piece_count() {
            let hi = self.model.upper_break(n).min(w_hi_total);
            if hi <= lo {
                if self.model.upper_break(n) >= w_hi_total {
                    break;
                }
                continue;
            }
            let form = *self.model.los_form(n);
            if !form.is_always_zero() {
                sum += integrate(|w| form.eval(w) * w, lo, hi, &self.quad)?;
            }
            lo = hi;
            if self.model.upper_break(n) >= w_hi_total {
                break;
            }
        }
        Ok(2.0 * std::f64::consts::PI * self.lambda() * sum)
    }

    /// Mean number of NLoS base stations within 2D radius `x`; complement of
    /// [`Self::los_intensity`] against the total `pi lambda x^2`.
    fn nlos_intensity(&self, x: f64) -> Result<f64, AnalyticError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let total = std::f64::consts::PI * self.lambda() * x * x;
        Ok((total - self.los_intensity(x)?).max(0.0))
    }

    /// 2D distance beyond which interferers of state `path` cannot beat the
    /// serving path loss `target`.
    fn equivalent_radius(&self, target: f64, path: LinkType) -> Result<f64, AnalyticError> {
        equivalent_radius_impl(self.model, target, path, self.height())
    }

    /// Serving-distance density of piece `n` and state `path` at 2D radius
    /// `r`, together with the exclusion radius it shares with the Laplace
    /// transform. Returns `(pdf, same_state_from, other_state_from)`.
    fn pdf_parts(
        &self,
        path: LinkType,
        n: usize,
        r: f64,
        w: f64,
    ) -> Result<(f64, f64, f64), AnalyticError> {
        let form = self.model.los_form(n);
        let piece = self.model.piece(n);
        let (point, los_from, nlos_from) = match path {
            LinkType::Los => {
                let target = piece.loss(LinkType::Los, w);
                let r1 = self.equivalent_radius(target, LinkType::Nlos)?;
                (form.eval(w), r, r1)
            }
            LinkType::Nlos => {
                let target = piece.loss(LinkType::Nlos, w);
                let r2 = self.equivalent_radius(target, LinkType::Los)?;
                (1.0 - form.eval(w), r2, r)
            }
        };
        let exponent = self.los_intensity(los_from)? + self.nlos_intensity(nlos_from)?;
        let pdf =
            (-exponent).exp() * point.max(0.0) * 2.0 * std::f64::consts::PI * self.lambda() * r;
        Ok((pdf, los_from, nlos_from))
    }

    /// Laplace exponent of one interference component: `2 pi lambda`
    /// times the integral over 2D radius `u >= from` of
    /// `prob(w) * u / (1 + 1/(s P zeta_path(w)))`, split at breakpoints.
    fn interference_exponent(
        &self,
        path: LinkType,
        from: f64,
        s: f64,
    ) -> Result<f64, AnalyticError> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let l = self.height();
        let p_tx = self.params.tx_power_mw;
        let count = self.model.piece_count();
        let mut sum = 0.0;
        for n in 0..count {
            let form = *self.model.los_form(n);
            let skip = match path {
                LinkType::Los => form.is_always_zero(),
                LinkType::Nlos => form.is_always_one(),
            };
            if skip {
                continue;
            }
            let seg_lo = self.lower_2d(n).max(from);
            let seg_hi = self.breaks_2d[n];
            if seg_hi <= seg_lo && n < count - 1 {
                continue;
            }
            let (amp, expn) = self.model.piece(n).law(path);
            let integrand = move |u: f64| {
                let w = u.hypot(l);
                let prob = match path {
                    LinkType::Los => form.eval(w),
                    LinkType::Nlos => 1.0 - form.eval(w),
                };
                if prob <= 0.0 {
                    return 0.0;
                }
                let x = s * p_tx * amp * w.powf(-expn);
                // 1/(1 + 1/x) handles both x overflow (-> 1) and x = 0 (-> 0).
                prob * u / (1.0 + 1.0 / x)
            };
            sum += if n == count - 1 {
                integrate_to_infinity_mapped(integrand, seg_lo, &self.quad)?
            } else {
                integrate(integrand, seg_lo, seg_hi, &self.quad)?
            };
        }
        Ok(2.0 * std::f64::consts::PI * self.lambda() * sum)
    }

    /// Laplace transform of the aggregate interference at argument `s`,
    /// conditioned on a serving BS of state `path` in piece `n` at 2D
    /// distance `r`.
    fn laplace(&self, path: LinkType, n: usize, r: f64, s: f64) -> Result<f64, AnalyticError> {
        if s == 0.0 {
            return Ok(1.0);
        }
        let w = r.hypot(self.height());
        let piece = self.model.piece(n);
        let (los_from, nlos_from) = match path {
            LinkType::Los => {
                let r1 = self.equivalent_radius(piece.loss(LinkType::Los, w), LinkType::Nlos)?;
                (r, r1)
            }
            LinkType::Nlos => {
                let r2 = self.equivalent_radius(piece.loss(LinkType::Nlos, w), LinkType::Los)?;
                (r2, r)
            }
        };
        let exponent = self.interference_exponent(LinkType::Los, los_from, s)?
            + self.interference_exponent(LinkType::Nlos, nlos_from, s)?;
        Ok((-exponent).exp())
    }

    /// Integrand of one coverage term: noise factor x Laplace transform x
    /// serving-distance density, everything sharing one pair of exclusion
    /// radii.
    fn coverage_integrand(
        &self,
        path: LinkType,
        n: usize,
        gamma: f64,
        r: f64,
    ) -> Result<f64, AnalyticError> {
        let w = r.hypot(self.height());
        let zeta = self.model.piece(n).loss(path, w);
        let signal = self.params.tx_power_mw * zeta;
        let (pdf, los_from, nlos_from) = self.pdf_parts(path, n, r, w)?;
        if pdf == 0.0 {
            return Ok(0.0);
        }
        let noise_factor = (-gamma * self.params.noise_mw / signal).exp();
        if noise_factor == 0.0 {
            return Ok(0.0);
        }
        let s = gamma / signal;
        let exponent = self.interference_exponent(LinkType::Los, los_from, s)?
            + self.interference_exponent(LinkType::Nlos, nlos_from, s)?;
        Ok(noise_factor * (-exponent).exp() * pdf)
    }

    /// 2D radius beyond which the serving probability mass of `path` is
    /// below `exp(-TAIL_EXPONENT)`; used to truncate the last piece.
    fn serving_cutoff(&self, path: LinkType, lo: f64) -> Result<f64, AnalyticError> {
        let intensity = |x: f64| -> Result<f64, AnalyticError> {
            match path {
                LinkType::Los => self.los_intensity(x),
                LinkType::Nlos => self.nlos_intensity(x),
            }
        };
        if intensity(lo)? >= TAIL_EXPONENT {
            return Ok(lo);
        }
        let scale = 1.0 / (std::f64::consts::PI * self.lambda()).sqrt();
        let mut hi = (lo + scale).max(scale);
        for _ in 0..200 {
            if intensity(hi)? >= TAIL_EXPONENT {
                return Ok(hi);
            }
            hi *= 2.0;
        }
        Err(AnalyticError::Domain(format!(
            "serving mass of {path:?} does not vanish within any finite radius"
        )))
    }

    /// Geometric subdivision of `[lo, hi]` on the serving-distance scale
    /// `1/sqrt(pi lambda)`, so the density spike near the lower edge is
    /// always resolved regardless of the interval width.
    fn ladder(&self, lo: f64, hi: f64) -> Vec<f64> {
        let scale = 1.0 / (std::f64::consts::PI * self.lambda()).sqrt();
        let mut cuts = vec![lo];
        let mut step = scale / 8.0;
        while lo + step < hi && cuts.len() < 80 {
            cuts.push(lo + step);
            step *= 2.0;
        }
        cuts.push(hi);
        cuts
    }

    /// One coverage term `T_n^path`: the outer radial integral over the 2D
    /// span of piece `n`.
    fn coverage_term(&self, path: LinkType, n: usize, gamma: f64) -> Result<f64, AnalyticError> {
        let form = self.model.los_form(n);
        let vanishes = match path {
            LinkType::Los => form.is_always_zero(),
            LinkType::Nlos => form.is_always_one(),
        };
        if vanishes {
            return Ok(0.0);
        }
        let lo = self.lower_2d(n);
        let last = n == self.model.piece_count() - 1;
        let hi = if last {
            self.serving_cutoff(path, lo)?
        } else {
            self.breaks_2d[n]
        };
        if hi <= lo {
            return Ok(0.0);
        }
        let poison: RefCell<Option<AnalyticError>> = RefCell::new(None);
        let integrand = |r: f64| match self.coverage_integrand(path, n, gamma, r) {
            Ok(v) => v,
            Err(e) => {
                poison.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let mut total = 0.0;
        let cuts = self.ladder(lo, hi);
        for pair in cuts.windows(2) {
            let chunk = integrate(integrand, pair[0], pair[1], &self.quad);
            if let Some(e) = poison.borrow_mut().take() {
                return Err(e);
            }
            total += chunk?;
        }
        Ok(total)
    }

    fn coverage(&self, gamma: f64) -> Result<f64, AnalyticError> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(AnalyticError::Domain(format!(
                "SINR threshold must be positive and finite, got {gamma}"
            )));
        }
        if self.params.fading != FadingKind::Rayleigh {
            return Err(AnalyticError::UnsupportedFading);
        }
        self.validate_tail_decay()?;
        let mut p = 0.0;
        for n in 0..self.model.piece_count() {
            // A piece entirely below the antenna height difference has no
            // 2D footprint and cannot serve.
            if self.model.upper_break(n) <= self.height() {
                continue;
            }
            p += self.coverage_term(LinkType::Los, n, gamma)?;
            p += self.coverage_term(LinkType::Nlos, n, gamma)?;
        }
        Ok(p.clamp(0.0, 1.0))
    }

    fn ase(&self, gamma0: f64) -> Result<f64, AnalyticError> {
        if gamma0 <= 0.0 || !gamma0.is_finite() {
            return Err(AnalyticError::Domain(format!(
                "minimum working SINR must be positive and finite, got {gamma0}"
            )));
        }
        let head = (1.0 + gamma0).log2() * self.coverage(gamma0)?;
        let poison: RefCell<Option<AnalyticError>> = RefCell::new(None);
        let integrand = |g: f64| match self.coverage(g) {
            Ok(p) => p / (1.0 + g),
            Err(e) => {
                poison.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let tail = integrate_to_infinity(integrand, gamma0, &self.quad);
        if let Some(e) = poison.borrow_mut().take() {
            return Err(e);
        }
        let tail = tail?;
        Ok(self.lambda() * (head + tail / std::f64::consts::LN_2))
    }
}

/// Converts a 3D distance to its 2D ground projection, clamping to 0 when
/// the 3D distance cannot be realized (below the height difference).
fn to_2d(w: f64, l: f64) -> f64 {
    if w <= l {
        0.0
    } else if w.is_infinite() {
        f64::INFINITY
    } else {
        (w * w - l * l).sqrt()
    }
}

/// Smallest 2D radius at which the stacked `path` power law drops to
/// `target`; pieces are scanned in distance order and breakpoint jumps
/// resolve to the breakpoint itself.
fn equivalent_radius_impl(
    model: &PathLossModel,
    target: f64,
    path: LinkType,
    l: f64,
) -> Result<f64, AnalyticError> {
    if target <= 0.0 || !target.is_finite() {
        return Err(AnalyticError::Domain(format!(
            "equivalent-distance target path loss must be positive and finite, got {target:e}"
        )));
    }
    let count = model.piece_count();
    const SLACK: f64 = 1.0 + 1e-12;
    for n in 0..count {
        let (amp, expn) = model.piece(n).law(path);
        let w = (amp / target).powf(1.0 / expn);
        let lo = model.lower_break(n);
        let hi = model.upper_break(n);
        if w > lo / SLACK && w <= hi * SLACK {
            return Ok(to_2d(w.min(hi), l));
        }
    }
    // The target falls inside a discontinuity at a breakpoint: the exact
    // equality has no solution and the breakpoint is the exclusion boundary.
    for n in 0..count - 1 {
        let d = model.upper_break(n);
        let here = model.piece(n).loss(path, d);
        let next = model.piece(n + 1).loss(path, d);
        if target <= here.max(next) && target >= here.min(next) {
            return Ok(to_2d(d, l));
        }
    }
    Err(AnalyticError::Domain(format!(
        "no distance reaches path loss {target:e} for {path:?}: model is not monotone"
    )))
}

/// 2D distance at which an NLoS interferer matches the path loss of a LoS
/// serving link in piece `piece` at 2D distance `r_2d_km`; 0 when every NLoS
/// distance is weaker.
pub fn equivalent_distance_r1(
    model: &PathLossModel,
    piece: usize,
    r_2d_km: f64,
    l_km: f64,
) -> Result<f64, AnalyticError> {
    let w = serving_w(model, piece, r_2d_km, l_km)?;
    let target = model.piece(piece).loss(LinkType::Los, w);
    equivalent_radius_impl(model, target, LinkType::Nlos, l_km)
}

/// 2D distance at which a LoS interferer matches the path loss of an NLoS
/// serving link in piece `piece` at 2D distance `r_2d_km`.
pub fn equivalent_distance_r2(
    model: &PathLossModel,
    piece: usize,
    r_2d_km: f64,
    l_km: f64,
) -> Result<f64, AnalyticError> {
    let w = serving_w(model, piece, r_2d_km, l_km)?;
    let target = model.piece(piece).loss(LinkType::Nlos, w);
    equivalent_radius_impl(model, target, LinkType::Los, l_km)
}

fn serving_w(
    model: &PathLossModel,
    piece: usize,
    r_2d_km: f64,
    l_km: f64,
) -> Result<f64, AnalyticError> {
    if piece >= model.piece_count() {
        return Err(AnalyticError::Domain(format!(
            "piece index {piece} out of range for a {}-piece model",
            model.piece_count()
        )));
    }
    if r_2d_km < 0.0 || !r_2d_km.is_finite() || l_km < 0.0 || !l_km.is_finite() {
        return Err(AnalyticError::Domain(format!(
            "serving geometry out of range: r = {r_2d_km}, L = {l_km}"
        )));
    }
    let w = r_2d_km.hypot(l_km);
    if w == 0.0 {
        return Err(AnalyticError::Domain(
            "serving distance must be positive (r and L both zero)".into(),
        ));
    }
    Ok(w)
}

/// Serving-distance density for LoS service from piece `piece` at 2D
/// distance `r_2d_km` (per km).
pub fn distance_pdf_los(
    model: &PathLossModel,
    params: &NetworkParams,
    piece: usize,
    r_2d_km: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    distance_pdf(model, params, LinkType::Los, piece, r_2d_km, quad)
}

/// Serving-distance density for NLoS service from piece `piece` at 2D
/// distance `r_2d_km` (per km).
pub fn distance_pdf_nlos(
    model: &PathLossModel,
    params: &NetworkParams,
    piece: usize,
    r_2d_km: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    distance_pdf(model, params, LinkType::Nlos, piece, r_2d_km, quad)
}

fn distance_pdf(
    model: &PathLossModel,
    params: &NetworkParams,
    path: LinkType,
    piece: usize,
    r_2d_km: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let engine = Engine::new(model, params, quad)?;
    if piece >= model.piece_count() {
        return Err(AnalyticError::Domain(format!(
            "piece index {piece} out of range for a {}-piece model",
            model.piece_count()
        )));
    }
    let lo = engine.lower_2d(piece);
    let hi = engine.breaks_2d[piece];
    if !(r_2d_km > lo && r_2d_km <= hi) {
        return Err(AnalyticError::Domain(format!(
            "r = {r_2d_km} km outside the 2D span ({lo}, {hi}] of piece {piece}"
        )));
    }
    let w = r_2d_km.hypot(params.height_diff_km);
    let (pdf, _, _) = engine.pdf_parts(path, piece, r_2d_km, w)?;
    Ok(pdf)
}

/// Laplace transform of the aggregate interference at `s`, conditioned on
/// LoS service at 2D distance `r_2d_km`.
pub fn laplace_los(
    model: &PathLossModel,
    params: &NetworkParams,
    r_2d_km: f64,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    laplace(model, params, LinkType::Los, r_2d_km, s, quad)
}

/// Laplace transform of the aggregate interference at `s`, conditioned on
/// NLoS service at 2D distance `r_2d_km`.
pub fn laplace_nlos(
    model: &PathLossModel,
    params: &NetworkParams,
    r_2d_km: f64,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    laplace(model, params, LinkType::Nlos, r_2d_km, s, quad)
}

fn laplace(
    model: &PathLossModel,
    params: &NetworkParams,
    path: LinkType,
    r_2d_km: f64,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let engine = Engine::new(model, params, quad)?;
    engine.validate_tail_decay()?;
    if r_2d_km <= 0.0 || !r_2d_km.is_finite() {
        return Err(AnalyticError::Domain(format!(
            "serving 2D distance must be positive and finite, got {r_2d_km}"
        )));
    }
    if s < 0.0 || !s.is_finite() {
        return Err(AnalyticError::Domain(format!(
            "Laplace argument must be non-negative and finite, got {s}"
        )));
    }
    let w = r_2d_km.hypot(params.height_diff_km);
    let n = model.piece_index(w)?;
    engine.laplace(path, n, r_2d_km, s)
}

/// Downlink coverage probability `Pr[SINR > gamma_linear]`.
pub fn coverage_probability(
    model: &PathLossModel,
    params: &NetworkParams,
    gamma_linear: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    Engine::new(model, params, quad)?.coverage(gamma_linear)
}

/// Coverage probability on an increasing grid of SINR thresholds, with a
/// monotonicity post-check on the resulting CCDF.
pub fn sinr_ccdf_curve(
    model: &PathLossModel,
    params: &NetworkParams,
    gammas_linear: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<CoverageRecord>, AnalyticError> {
    for pair in gammas_linear.windows(2) {
        if pair[0].is_nan() || pair[1].is_nan() || pair[0] >= pair[1] {
            return Err(AnalyticError::Domain(format!(
                "SINR grid must be strictly increasing: {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let engine = Engine::new(model, params, quad)?;
    let mut records = Vec::with_capacity(gammas_linear.len());
    let mut prev: Option<(f64, f64)> = None;
    for &gamma in gammas_linear {
        let p = engine.coverage(gamma)?;
        if let Some((g_prev, p_prev)) = prev {
            let slack = 10.0 * (quad.rel_tol * p_prev.max(p) + quad.abs_tol);
            if p > p_prev + slack {
                return Err(AnalyticError::NonMonotoneCcdf {
                    gamma,
                    previous: p_prev,
                    current: p,
                });
            }
            let _ = g_prev;
        }
        prev = Some((gamma, p));
        records.push(CoverageRecord {
            lambda_per_km2: params.density_per_km2,
            gamma_linear: gamma,
            p_cov: p,
            method: Method::Analytic,
            ci_half_width: 0.0,
        });
    }
    Ok(records)
}

/// Area spectral efficiency in bps/Hz/km^2 for minimum working SINR
/// `gamma0_linear`.
pub fn ase(
    model: &PathLossModel,
    params: &NetworkParams,
    gamma0_linear: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    Engine::new(model, params, quad)?.ase(gamma0_linear)
}

/// SIR of a two-BS toy deployment: serving BS at 2D distance `r`, one
/// interferer at `tau * r`, both at height difference `l`, single power law
/// with exponent `alpha`, no fading and no noise:
/// `((r^2 + l^2) / (tau^2 r^2 + l^2))^(-alpha/2)`.
///
/// With `l > 0` the SIR tends to 1 as `r -> 0` (both links collapse onto the
/// height difference); with `l = 0` it is the constant `tau^alpha`.
pub fn toy_sir(r_2d_km: f64, l_km: f64, tau: f64, alpha: f64) -> Result<f64, AnalyticError> {
    let ok = r_2d_km >= 0.0
        && r_2d_km.is_finite()
        && l_km >= 0.0
        && l_km.is_finite()
        && tau > 1.0
        && tau.is_finite()
        && alpha > 0.0
        && alpha.is_finite();
    if !ok {
        return Err(AnalyticError::Domain(format!(
            "toy SIR arguments out of range: r = {r_2d_km}, L = {l_km}, tau = {tau}, alpha = {alpha}"
        )));
    }
    if r_2d_km == 0.0 && l_km == 0.0 {
        return Err(AnalyticError::Domain(
            "toy SIR undefined at r = 0 with L = 0".into(),
        ));
    }
    if l_km == 0.0 {
        return Ok(tau.powf(alpha));
    }
    if r_2d_km == 0.0 {
        return Ok(1.0);
    }
    let num = r_2d_km * r_2d_km + l_km * l_km;
    let den = tau * tau * r_2d_km * r_2d_km + l_km * l_km;
    Ok((num / den).powf(-alpha / 2.0))
}
