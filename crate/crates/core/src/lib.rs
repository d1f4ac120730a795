//! Estimation of the location of a spectral pole and of the memory parameter
//! for covariance-stationary long-memory processes.
//!
//! The spectral density is assumed to behave like `C |λ - λ⁰|^{-α}` near an
//! unknown frequency `λ⁰ ∈ [0, π]`. The crate provides
//!
//! * periodogram and averaged-periodogram machinery on the Fourier grid ([`spectral`]),
//! * the weight functions and their integral constants ([`weights`]),
//! * the pole search, the two-step memory estimator and the log-periodogram
//!   comparators ([`estimators`]),
//! * asymptotic confidence intervals for `λ⁰` and `α` ([`inference`]),
//! * exact Gaussian simulation of FARIMA and Gegenbauer test models by
//!   circulant embedding ([`simulate`]),
//! * a reproducible, parallel Monte Carlo harness ([`montecarlo`]).
//!
//! ```
//! use polefinder::prelude::*;
//!
//! let model = SimModel::new(SimFamily::GegenbauerHalfPi, 0.6, 1024, 7).unwrap();
//! let x = simulate(&model).unwrap();
//! let cfg = EstimatorConfig::defaults(x.len()).unwrap();
//! let out = estimate_pipeline(&x, &cfg).unwrap();
//! assert!((out.pole.q_hat as i64 - 256).abs() < 40);
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod montecarlo;
pub mod simulate;
pub mod spectral;
pub mod weights;

mod rng;
mod spline;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        bandwidth_defaults, estimate_pipeline, log_periodogram_alpha, log_periodogram_pole,
        pole_search, two_step_alpha, AlphaProfile, BandWeights, BoundaryRegime, EstimatorConfig,
        MemoryEstimate, MemoryVariant, PipelineEstimate, PoleEstimate,
    };
    pub use crate::inference::{alpha_ci, pole_ci, AlphaCI, BiasInputs, PoleCI};
    pub use crate::montecarlo::{run_mc, EstimatorKind, MCConfig, MCReport};
    pub use crate::simulate::{simulate, AutocovSeq, SimFamily, SimModel};
    pub use crate::spectral::{
        averaged_periodogram, fold_index, fourier_frequency, periodogram, PeriodogramGrid,
        SmoothedSpectrum, TimeSeries,
    };
    pub use crate::weights::{WeightConstants, WeightKind, WeightSpec};
}
