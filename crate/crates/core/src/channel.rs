//! Piecewise LoS/NLoS path loss, LoS probability, and multi-path fading.
//!
//! A [`PathLossModel`] stacks `N` distance pieces `(d_{n-1}, d_n]` over the
//! 3D link distance `w` (kilometres). Each piece carries one power law per
//! link state, `A * w^-alpha`, and one functional form for the probability
//! that a link of length `w` is line-of-sight. The last piece always extends
//! to infinity so every distance is covered.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

/// Propagation state of a single BS-UE link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkType {
    Los,
    Nlos,
}

/// One distance piece of the path loss model: a LoS and an NLoS power law
/// valid on `(lower, upper_break_km]` of 3D distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossPiece {
    /// Upper 3D-distance edge `d_n` in km; `f64::INFINITY` on the last piece.
    pub upper_break_km: f64,
    /// LoS path loss at 1 km (linear).
    pub los_amplitude: f64,
    /// LoS path loss exponent.
    pub los_exponent: f64,
    /// NLoS path loss at 1 km (linear).
    pub nlos_amplitude: f64,
    /// NLoS path loss exponent.
    pub nlos_exponent: f64,
}

impl PathLossPiece {
    /// Power law of this piece for the given link state, evaluated at `w` km.
    pub fn loss(&self, link: LinkType, w_km: f64) -> f64 {
        match link {
            LinkType::Los => self.los_amplitude * w_km.powf(-self.los_exponent),
            LinkType::Nlos => self.nlos_amplitude * w_km.powf(-self.nlos_exponent),
        }
    }

    /// Amplitude and exponent of this piece for one link state.
    pub fn law(&self, link: LinkType) -> (f64, f64) {
        match link {
            LinkType::Los => (self.los_amplitude, self.los_exponent),
            LinkType::Nlos => (self.nlos_amplitude, self.nlos_exponent),
        }
    }
}

/// Functional form of the LoS probability on one piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosProbForm {
    /// `intercept + slope_per_km * w`, clamped nowhere: the constructor
    /// rejects forms that leave `[0, 1]` inside their piece.
    Linear { intercept: f64, slope_per_km: f64 },
    /// Distance-independent probability.
    Constant(f64),
    /// Identically zero (all links NLoS); lets the engine skip whole terms.
    Zero,
}

impl LosProbForm {
    /// LoS probability at 3D distance `w` km.
    pub fn eval(&self, w_km: f64) -> f64 {
        match *self {
            LosProbForm::Linear {
                intercept,
                slope_per_km,
            } => intercept + slope_per_km * w_km,
            LosProbForm::Constant(c) => c,
            LosProbForm::Zero => 0.0,
        }
    }

    /// True when the form is 0 everywhere (the LoS term vanishes).
    pub fn is_always_zero(&self) -> bool {
        matches!(self, LosProbForm::Zero | LosProbForm::Constant(0.0))
    }

    /// True when the form is 1 everywhere (the NLoS term vanishes).
    pub fn is_always_one(&self) -> bool {
        matches!(self, LosProbForm::Constant(c) if *c == 1.0)
    }
}

/// LoS probability on one distance piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosProbPiece {
    /// Upper 3D-distance edge in km; must match the path-loss piece.
    pub upper_break_km: f64,
    pub form: LosProbForm,
}

/// Validation failures when assembling a [`PathLossModel`].
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model must have at least one piece")]
    Empty,
    #[error("piece {0}: breakpoints must be positive, finite before the last piece, and strictly increasing")]
    BreakOrder(usize),
    #[error("last piece must extend to infinity")]
    FiniteLastPiece,
    #[error("{path_loss} path-loss pieces but {los_prob} LoS-probability pieces")]
    PieceCountMismatch { path_loss: usize, los_prob: usize },
    #[error("piece {0}: path-loss and LoS-probability breakpoints differ")]
    BreakMismatch(usize),
    #[error("piece {0}: amplitudes and exponents must be positive and finite")]
    BadPowerLaw(usize),
    #[error("piece {0}: LoS probability leaves [0, 1] inside the piece")]
    ProbOutOfRange(usize),
    #[error("piece {0}: a sloped LoS probability needs a finite upper break")]
    UnboundedLinear(usize),
    #[error("3D distance must be positive and finite, got {0}")]
    BadDistance(f64),
}

/// Stacked piecewise path loss and LoS probability over 3D distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLossModel {
    pieces: Vec<PathLossPiece>,
    los_prob: Vec<LosProbPiece>,
}

impl PathLossModel {
    /// Builds a model from matching piece lists, validating breakpoint order,
    /// power-law positivity, and LoS probability bounds.
    pub fn new(
        pieces: Vec<PathLossPiece>,
        los_prob: Vec<LosProbPiece>,
    ) -> Result<Self, ModelError> {
        if pieces.is_empty() {
            return Err(ModelError::Empty);
        }
        if pieces.len() != los_prob.len() {
            return Err(ModelError::PieceCountMismatch {
                path_loss: pieces.len(),
                los_prob: los_prob.len(),
            });
        }
        let mut lower = 0.0f64;
        for (i, (pl, lp)) in pieces.iter().zip(&los_prob).enumerate() {
            let last = i == pieces.len() - 1;
            let d = pl.upper_break_km;
            if d.is_nan() || d <= lower || (!last && !d.is_finite()) {
                return Err(ModelError::BreakOrder(i));
            }
            if last && !d.is_infinite() {
                return Err(ModelError::FiniteLastPiece);
            }
            if pl.upper_break_km != lp.upper_break_km {
                return Err(ModelError::BreakMismatch(i));
            }
            for v in [
                pl.los_amplitude,
                pl.los_exponent,
                pl.nlos_amplitude,
                pl.nlos_exponent,
            ] {
                if v <= 0.0 || !v.is_finite() {
                    return Err(ModelError::BadPowerLaw(i));
                }
            }
            // A linear form is monotone, so checking the piece edges bounds
            // it on the whole piece; an unbounded piece cannot stay in [0,1]
            // with nonzero slope.
            match lp.form {
                LosProbForm::Linear {
                    intercept,
                    slope_per_km,
                } => {
                    if !intercept.is_finite() || !slope_per_km.is_finite() {
                        return Err(ModelError::ProbOutOfRange(i));
                    }
                    if slope_per_km != 0.0 && !d.is_finite() {
                        return Err(ModelError::UnboundedLinear(i));
                    }
                    let at_lower = intercept + slope_per_km * lower;
                    let at_upper = if d.is_finite() {
                        intercept + slope_per_km * d
                    } else {
                        intercept
                    };
                    if !(0.0..=1.0).contains(&at_lower) || !(0.0..=1.0).contains(&at_upper) {
                        return Err(ModelError::ProbOutOfRange(i));
                    }
                }
                LosProbForm::Constant(c) => {
                    if !(0.0..=1.0).contains(&c) {
                        return Err(ModelError::ProbOutOfRange(i));
                    }
                }
                LosProbForm::Zero => {}
            }
            lower = d;
        }
        Ok(Self { pieces, los_prob })
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[PathLossPiece] {
        &self.pieces
    }

    /// Path-loss piece by zero-based index.
    pub fn piece(&self, n: usize) -> &PathLossPiece {
        &self.pieces[n]
    }

    /// LoS probability form on piece `n` (zero-based).
    pub fn los_form(&self, n: usize) -> &LosProbForm {
        &self.los_prob[n].form
    }

    /// Upper 3D edge `d_n` of piece `n` (zero-based); infinity on the last.
    pub fn upper_break(&self, n: usize) -> f64 {
        self.pieces[n].upper_break_km
    }

    /// Lower 3D edge `d_{n-1}` of piece `n` (zero-based); 0 for the first.
    pub fn lower_break(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.pieces[n - 1].upper_break_km
        }
    }

    /// Index of the piece whose half-open interval `(d_{n-1}, d_n]` contains `w`.
    pub fn piece_index(&self, w_km: f64) -> Result<usize, ModelError> {
        if w_km <= 0.0 || !w_km.is_finite() {
            return Err(ModelError::BadDistance(w_km));
        }
        let n = self
            .pieces
            .iter()
            .position(|p| w_km <= p.upper_break_km)
            .expect("last piece extends to infinity");
        Ok(n)
    }

    /// Stacked path loss for one link state at 3D distance `w` km.
    pub fn path_loss(&self, link: LinkType, w_km: f64) -> Result<f64, ModelError> {
        let n = self.piece_index(w_km)?;
        Ok(self.pieces[n].loss(link, w_km))
    }

    /// Stacked LoS probability at 3D distance `w` km.
    pub fn los_probability(&self, w_km: f64) -> Result<f64, ModelError> {
        let n = self.piece_index(w_km)?;
        Ok(self.los_prob[n].form.eval(w_km))
    }
}

/// Two-piece urban micro model: LoS probability falls linearly from 1 to 0
/// over the first 300 m and is zero beyond. The LoS amplitude exceeds the
/// NLoS amplitude so short LoS links see less attenuation, while the steeper
/// NLoS exponent (3.75 vs 2.09) makes long NLoS links far weaker.
pub fn preset_3gpp_case1() -> PathLossModel {
    case1_model(0.3, 10f64.powf(-10.38), 2.09, 10f64.powf(-14.54), 3.75)
        .expect("preset parameters are valid")
}

/// The two-piece urban micro shape with caller-chosen constants: LoS
/// probability falls linearly from 1 at zero distance to 0 at `d1_km` and
/// stays zero beyond, with one LoS and one NLoS power law throughout.
pub fn case1_model(
    d1_km: f64,
    los_amplitude: f64,
    los_exponent: f64,
    nlos_amplitude: f64,
    nlos_exponent: f64,
) -> Result<PathLossModel, ModelError> {
    let piece = |upper| PathLossPiece {
        upper_break_km: upper,
        los_amplitude,
        los_exponent,
        nlos_amplitude,
        nlos_exponent,
    };
    PathLossModel::new(
        vec![piece(d1_km), piece(f64::INFINITY)],
        vec![
            LosProbPiece {
                upper_break_km: d1_km,
                form: LosProbForm::Linear {
                    intercept: 1.0,
                    slope_per_km: -1.0 / d1_km,
                },
            },
            LosProbPiece {
                upper_break_km: f64::INFINITY,
                form: LosProbForm::Zero,
            },
        ],
    )
}

/// Single power law with no LoS state: every link is NLoS with the given
/// amplitude (path loss at 1 km, linear) and exponent.
pub fn preset_single_slope(amplitude: f64, exponent: f64) -> PathLossModel {
    assert!(
        amplitude > 0.0 && amplitude.is_finite() && exponent > 0.0 && exponent.is_finite(),
        "single-slope amplitude and exponent must be positive and finite"
    );
    PathLossModel::new(
        vec![PathLossPiece {
            upper_break_km: f64::INFINITY,
            los_amplitude: amplitude,
            los_exponent: exponent,
            nlos_amplitude: amplitude,
            nlos_exponent: exponent,
        }],
        vec![LosProbPiece {
            upper_break_km: f64::INFINITY,
            form: LosProbForm::Zero,
        }],
    )
    .expect("single-slope parameters are valid")
}

/// Small-scale fading of the channel power gain; every variant has unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingKind {
    /// Exponentially distributed power gain (Rayleigh amplitude).
    Rayleigh,
    /// Rician power gain with a distance-dependent K factor in dB:
    /// `K_dB(w) = k_intercept_db + k_slope_db_per_m * (w in metres)`.
    Rician {
        k_intercept_db: f64,
        k_slope_db_per_m: f64,
    },
}

impl FadingKind {
    /// Rician fading with the urban-micro K factor `K_dB = 13 - 0.03 w`,
    /// `w` in metres.
    pub fn rician_3gpp() -> Self {
        FadingKind::Rician {
            k_intercept_db: 13.0,
            k_slope_db_per_m: -0.03,
        }
    }

    /// Linear K factor at 3D distance `w` km for Rician variants. The dB
    /// value may go negative at long range; the linear value is floored at 0
    /// (pure scatter), which the power of ten already guarantees.
    pub fn rician_k_linear(&self, w_km: f64) -> Option<f64> {
        match *self {
            FadingKind::Rayleigh => None,
            FadingKind::Rician {
                k_intercept_db,
                k_slope_db_per_m,
            } => {
                let k_db = k_intercept_db + k_slope_db_per_m * (w_km * 1000.0);
                Some(10f64.powf(k_db / 10.0).max(0.0))
            }
        }
    }
}

/// Draws one channel power gain for a link of 3D length `w` km.
///
/// Rayleigh ignores the distance. Rician composes a fixed specular component
/// of power `K/(K+1)` with complex Gaussian scatter of power `1/(K+1)`, so
/// the mean gain is 1 for every distance and the gain tends to the constant 1
/// as `K` grows.
pub fn sample_fading<R: Rng + ?Sized>(kind: &FadingKind, w_km: f64, rng: &mut R) -> f64 {
    match kind.rician_k_linear(w_km) {
        None => Exp1.sample(rng),
        Some(k) => {
            let direct = (k / (k + 1.0)).sqrt();
            let scatter_sd = (1.0 / (2.0 * (k + 1.0))).sqrt();
            let z1: f64 = StandardNormal.sample(rng);
            let z2: f64 = StandardNormal.sample(rng);
            let re = direct + scatter_sd * z1;
            let im = scatter_sd * z2;
            re * re + im * im
        }
    }
}
