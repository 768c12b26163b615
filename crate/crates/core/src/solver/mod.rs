//! Forward-backward primal-dual segmentation with a pluggable reconnector.
//!
//! The energy is `<u, w> + lambda * TV(u)` over `u` in `[0, 1]^N`, where `w`
//! is the two-means data weight. The primal step takes a gradient step on the
//! data term and the dual correction, then projects onto the box; from
//! iteration `alpha` on, the box projection is followed by the reconnector.
//! The dual step is a projected ascent onto per-cell `lambda`-balls.

mod ops;

pub use ops::{
    chan_weight, check_step_sizes, estimate_means, primal_energy, project_unit_interval, prox_dual_tv,
    total_variation,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient, BinaryMask, ScalarField, Shape, VectorField};
use crate::reconnect::{check_contract, Reconnector};

/// Point the dual gradient is evaluated at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualExtrapolation {
    /// `2 p - u_i`, with `p` the pre-projection primal point.
    #[default]
    P,
    /// `2 u_{i+1} - u_i`.
    U,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub lambda: f64,
    pub tau: f64,
    pub sigma: f64,
    /// Iteration from which the reconnector is applied; `None` means
    /// `max_iter / 2`.
    pub alpha: Option<usize>,
    pub max_iter: usize,
    pub tol: f64,
    /// Background mean; estimated from the image when absent.
    pub c1: Option<f64>,
    /// Foreground mean; estimated from the image when absent.
    pub c2: Option<f64>,
    pub threshold: f64,
    pub dual_extrapolation: DualExtrapolation,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            tau: 1.587,
            sigma: 1e-3,
            alpha: None,
            max_iter: 1000,
            tol: 1e-6,
            c1: None,
            c2: None,
            threshold: 0.5,
            dual_extrapolation: DualExtrapolation::P,
        }
    }
}

impl SolverConfig {
    /// Step sizes from the literature for 3D volumes.
    pub fn default_3d() -> Self {
        Self {
            tau: 1.493,
            ..Self::default()
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha.unwrap_or(self.max_iter / 2)
    }

    /// Checks the scalar invariants and the step-size condition on `shape`.
    pub fn validate(&self, shape: &Shape) -> Result<()> {
        let checks = [
            (self.lambda >= 0.0 && self.lambda.is_finite(), "lambda must be >= 0"),
            (self.tau > 0.0 && self.tau.is_finite(), "tau must be > 0"),
            (self.sigma > 0.0 && self.sigma.is_finite(), "sigma must be > 0"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.tol >= 0.0, "tol must be >= 0"),
            ((0.0..=1.0).contains(&self.threshold), "threshold must be in [0, 1]"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(Error::invalid(*msg));
        }
        let margin = ops::step_margin(self.tau, self.sigma, shape);
        if margin < 0.0 {
            return Err(Error::StepSizes { margin });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub u: ScalarField,
    pub v: VectorField,
    pub iter: usize,
    /// Max-norm of the last primal change.
    pub last_delta: f64,
}

impl SolverState {
    pub fn new(u: ScalarField) -> Self {
        let v = VectorField::zeros(u.shape().clone());
        Self {
            u,
            v,
            iter: 0,
            last_delta: f64::INFINITY,
        }
    }
}

/// One primal-dual iteration. `data_weight` is the gradient of the data term.
/// Step sizes are not re-checked here.
pub fn fbpd_step(
    state: &mut SolverState,
    config: &SolverConfig,
    data_weight: &ScalarField,
    reconnector: &dyn Reconnector,
) -> Result<()> {
    let div_v = divergence(&state.v);
    let tau = config.tau;
    let p_values: Vec<f64> = state
        .u
        .values()
        .iter()
        .zip(data_weight.values())
        .zip(div_v.values())
        .map(|((&u, &w), &d)| u - tau * (w - d))
        .collect();
    let p = ScalarField::from_vec(state.u.shape().clone(), p_values)?;
    let projected = project_unit_interval(&p);
    let next = if state.iter < config.alpha() {
        projected
    } else {
        let out = reconnector.apply(&projected)?;
        check_contract(&projected, &out)?;
        out
    };
    if !next.all_finite() {
        return Err(Error::Divergence(state.iter));
    }

    let anchor = match config.dual_extrapolation {
        DualExtrapolation::P => &p,
        DualExtrapolation::U => &next,
    };
    let extrapolated = ScalarField::from_vec(
        p.shape().clone(),
        anchor
            .values()
            .iter()
            .zip(state.u.values())
            .map(|(&a, &u)| 2.0 * a - u)
            .collect(),
    )?;
    let g = gradient(&extrapolated);
    let sigma = config.sigma;
    state
        .v
        .raw_mut()
        .iter_mut()
        .zip(g.raw())
        .for_each(|(v, &d)| *v += sigma * d);
    ops::project_ball_in_place(&mut state.v, config.lambda);

    state.last_delta = next.max_abs_diff(&state.u);
    state.u = next;
    state.iter += 1;
    Ok(())
}

/// A configured solver for images of one shape.
#[derive(Clone, Debug)]
pub struct Solver {
    config: SolverConfig,
}

impl Solver {
    /// Refuses configurations that break the step-size condition on `shape`.
    pub fn new(config: SolverConfig, shape: &Shape) -> Result<Self> {
        config.validate(shape)?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Background and foreground means used for `f`.
    pub fn means(&self, f: &ScalarField) -> Result<(f64, f64)> {
        match (self.config.c1, self.config.c2) {
            (Some(c1), Some(c2)) => Ok((c1, c2)),
            (c1, c2) => {
                let (lo, hi) = estimate_means(f)?;
                Ok((c1.unwrap_or(lo), c2.unwrap_or(hi)))
            }
        }
    }

    /// Data-term gradient: negative where `f` is closer to the foreground
    /// mean, so minimisation drives those cells to 1.
    pub fn data_weight(&self, f: &ScalarField) -> Result<ScalarField> {
        let (c1, c2) = self.means(f)?;
        Ok(chan_weight(f, c2, c1))
    }

    /// Runs from the min-max normalised image until `max_iter` or until the
    /// primal change drops below `tol`. The tolerance stop is only honoured
    /// once the reconnector has been applied (or if it never will be).
    pub fn run(
        &self,
        f: &ScalarField,
        reconnector: &dyn Reconnector,
        mut observe: impl FnMut(&SolverState),
    ) -> Result<SolverState> {
        self.config.validate(f.shape())?;
        let weight = self.data_weight(f)?;
        let mut state = SolverState::new(f.normalized());
        let alpha = self.config.alpha();
        while state.iter < self.config.max_iter {
            fbpd_step(&mut state, &self.config, &weight, reconnector)?;
            observe(&state);
            let reconnected = state.iter > alpha || alpha >= self.config.max_iter;
            if reconnected && state.last_delta < self.config.tol {
                break;
            }
        }
        Ok(state)
    }

    pub fn segment(&self, f: &ScalarField, reconnector: &dyn Reconnector) -> Result<(BinaryMask, SolverState)> {
        let state = self.run(f, reconnector, |_| {})?;
        Ok((state.u.threshold(self.config.threshold), state))
    }
}

/// Segments `f`, returning the thresholded primal iterate and the final state.
pub fn segment(
    f: &ScalarField,
    config: &SolverConfig,
    reconnector: &dyn Reconnector,
) -> Result<(BinaryMask, SolverState)> {
    Solver::new(config.clone(), f.shape())?.segment(f, reconnector)
}
