//! Stimulus combination and dynamic adjustment of the motivation degree.
//!
//! Everything here is pure scalar math over value types. The activation of a
//! congruence behaviour mixes the internal signal with the weighted external
//! signals through the motivation degree `alpha`:
//!
//! ```text
//! A = Fa_E * O_E * (alpha + sum_j Fa_Sj * O_Sj) + Fa_D * O_D
//! ```
//!
//! `alpha` itself drifts along two hyperbolic curves. Reinforcement moves it a
//! fixed distance `rho` along the rising curve `g`, relaxation along the
//! falling curve `h`; both are clipped at the bounds.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, check_unit, CoreError, Result};

/// The learnable motivation degree of one behavioural column and its
/// learning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaState {
    pub alpha: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Divergence length, in curve-coordinate units.
    pub delta: f64,
    /// Distance advanced along the curve per update.
    pub rho: f64,
    /// Internal-signal threshold separating "strong" from "irrelevant" needs.
    pub theta: f64,
    /// External sums at or below this count as absent.
    pub epsilon_ext: f64,
}

impl Default for AlphaState {
    fn default() -> Self {
        AlphaState {
            alpha: 0.7,
            alpha_min: 0.0,
            alpha_max: 1.0,
            delta: 100.0,
            rho: 1.0,
            theta: 0.5,
            epsilon_ext: 1e-6,
        }
    }
}

/// Which branch of the update rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaBranch {
    /// Strong need, no usable external signal: alpha grows.
    Reinforce,
    /// Weak need, external signal present: alpha shrinks.
    Relax,
    Hold,
}

impl AlphaState {
    pub fn with_alpha(self, alpha: f64) -> Self {
        AlphaState { alpha, ..self }
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        let name = |f: &str| {
            if prefix.is_empty() {
                f.to_string()
            } else {
                format!("{prefix}.{f}")
            }
        };
        for (f, v) in [
            ("alpha", self.alpha),
            ("alpha_min", self.alpha_min),
            ("alpha_max", self.alpha_max),
            ("delta", self.delta),
            ("rho", self.rho),
            ("epsilon_ext", self.epsilon_ext),
        ] {
            if !v.is_finite() {
                return Err(CoreError::out_of_range(name(f), v, "expected a finite value"));
            }
        }
        if self.alpha_min >= self.alpha_max {
            return Err(CoreError::invalid(name("alpha_min"), "must be below alpha_max"));
        }
        check_range(
            &name("delta"),
            self.delta,
            f64::MIN_POSITIVE,
            f64::MAX,
            "expected delta > 0",
        )?;
        check_range(&name("rho"), self.rho, f64::MIN_POSITIVE, f64::MAX, "expected rho > 0")?;
        if self.rho >= self.delta {
            return Err(CoreError::invalid(name("rho"), "must be below delta"));
        }
        check_unit(&name("theta"), self.theta)?;
        check_range(
            &name("epsilon_ext"),
            self.epsilon_ext,
            0.0,
            f64::MAX,
            "expected epsilon_ext >= 0",
        )?;
        check_range(
            &name("alpha"),
            self.alpha,
            self.alpha_min,
            self.alpha_max,
            "expected alpha within [alpha_min, alpha_max]",
        )
    }

    /// Rising curve `g(x) = -1/(x - delta) + alpha_min - 1/delta`; `g(0) = alpha_min`.
    pub fn rising_curve(&self, x: f64) -> f64 {
        -1.0 / (x - self.delta) + self.alpha_min - 1.0 / self.delta
    }

    /// Position on the rising curve for `alpha`, i.e. `g^-1(alpha)`.
    pub fn rising_position(&self, alpha: f64) -> f64 {
        self.delta - 1.0 / (alpha - self.alpha_min + 1.0 / self.delta)
    }

    /// Falling curve `h(x) = 1/(x - delta) + alpha_max + 1/delta`; `h(0) = alpha_max`.
    pub fn falling_curve(&self, x: f64) -> f64 {
        1.0 / (x - self.delta) + self.alpha_max + 1.0 / self.delta
    }

    /// Position on the falling curve for `alpha`, i.e. `h^-1(alpha)`.
    pub fn falling_position(&self, alpha: f64) -> f64 {
        self.delta + 1.0 / (alpha - self.alpha_max - 1.0 / self.delta)
    }

    /// Number of reinforcing updates needed to go from the current alpha to
    /// `alpha_max`, from the closed form of the rising curve.
    pub fn steps_to_max(&self) -> u64 {
        if self.alpha >= self.alpha_max {
            return 0;
        }
        let span = self.rising_position(self.alpha_max) - self.rising_position(self.alpha);
        (span / self.rho).ceil() as u64
    }

    pub fn steps_to_min(&self) -> u64 {
        if self.alpha <= self.alpha_min {
            return 0;
        }
        let span = self.falling_position(self.alpha_min) - self.falling_position(self.alpha);
        (span / self.rho).ceil() as u64
    }
}

/// Reinforced alpha: one `rho` step along the rising curve, clipped to `alpha_max`.
pub fn increment_alpha(state: &AlphaState) -> f64 {
    let alpha = state.alpha.max(state.alpha_min);
    if alpha >= state.alpha_max {
        return state.alpha_max;
    }
    let x = state.rising_position(alpha) + state.rho;
    // past the asymptote the curve value is unbounded
    if x >= state.delta {
        return state.alpha_max;
    }
    state.rising_curve(x).clamp(alpha, state.alpha_max)
}

/// Relaxed alpha: one `rho` step along the falling curve, clipped to `alpha_min`.
pub fn decrement_alpha(state: &AlphaState) -> f64 {
    let alpha = state.alpha.min(state.alpha_max);
    if alpha <= state.alpha_min {
        return state.alpha_min;
    }
    let x = state.falling_position(alpha) + state.rho;
    if x >= state.delta {
        return state.alpha_min;
    }
    state.falling_curve(x).clamp(state.alpha_min, alpha)
}

/// Classifies an update without applying it.
pub fn alpha_branch(state: &AlphaState, o_internal: f64, ext_sum: f64) -> AlphaBranch {
    let strong = o_internal > state.theta;
    let external = ext_sum > state.epsilon_ext;
    match (strong, external) {
        (true, false) => AlphaBranch::Reinforce,
        (false, true) => AlphaBranch::Relax,
        _ => AlphaBranch::Hold,
    }
}

/// Applies the threshold rule: reinforce when a strong need finds no
/// external signal, relax when a weak need meets one, otherwise keep alpha.
pub fn alpha_update(state: AlphaState, o_internal: f64, ext_sum: f64) -> AlphaState {
    match alpha_branch(&state, o_internal, ext_sum) {
        AlphaBranch::Reinforce => state.with_alpha(increment_alpha(&state)),
        AlphaBranch::Relax => state.with_alpha(decrement_alpha(&state)),
        AlphaBranch::Hold => state,
    }
}

/// Weighted sum of the external signals associated with one column.
pub fn external_sum(fa_external: &[f64], o_external: &[f64]) -> Result<f64> {
    if fa_external.len() != o_external.len() {
        return Err(CoreError::LengthMismatch {
            left: fa_external.len(),
            right: o_external.len(),
        });
    }
    Ok(fa_external.iter().zip(o_external).map(|(fa, o)| fa * o).sum())
}

/// All signals and coupling strengths feeding one congruence behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationInputs {
    pub o_internal: f64,
    pub fa_internal: f64,
    pub o_external: Vec<f64>,
    pub fa_external: Vec<f64>,
    pub o_drive: f64,
    pub fa_drive: f64,
    pub alpha: f64,
}

impl CombinationInputs {
    pub fn validate(&self) -> Result<()> {
        if self.o_external.len() != self.fa_external.len() {
            return Err(CoreError::LengthMismatch {
                left: self.fa_external.len(),
                right: self.o_external.len(),
            });
        }
        check_unit("o_internal", self.o_internal)?;
        check_unit("fa_internal", self.fa_internal)?;
        check_unit("o_drive", self.o_drive)?;
        check_unit("fa_drive", self.fa_drive)?;
        for (j, (o, fa)) in self.o_external.iter().zip(&self.fa_external).enumerate() {
            check_unit(&format!("o_external[{j}]"), *o)?;
            check_unit(&format!("fa_external[{j}]"), *fa)?;
        }
        if !self.alpha.is_finite() {
            return Err(CoreError::out_of_range("alpha", self.alpha, "expected a finite value"));
        }
        Ok(())
    }
}

/// Result of combining internal and external stimuli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation {
    /// Unbounded combination value, kept for diagnostics and competition.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]` for use as a blackboard certainty.
    pub certainty: f64,
}

pub fn combine_activation(inputs: &CombinationInputs) -> Result<Activation> {
    inputs.validate()?;
    let ext = external_sum(&inputs.fa_external, &inputs.o_external)?;
    let raw = inputs.fa_internal * inputs.o_internal * (inputs.alpha + ext) + inputs.fa_drive * inputs.o_drive;
    Ok(Activation {
        raw,
        certainty: raw.clamp(0.0, 1.0),
    })
}
