//! Exact distribution and Poisson-approximation bounds for the random
//! diagonal sum `S_n = X_{1,π(1)} + … + X_{n,π(n)}` of an `n × n` matrix of
//! independent Bernoulli variables, where `π` is a uniform random permutation.
//!
//! The crate is organised around a handful of modules:
//!
//! | module | contents |
//! |--------|----------|
//! | [`matrix`] | [`BernoulliMatrix`], file formats, generators, index selections |
//! | [`exact`] | exact PMFs via Ryser's permanent formula, concentrations, real-rootedness |
//! | [`measures`] | finitely supported signed measures, Poisson laws, `Q₂`, norms |
//! | [`moments`] | λ, Var S_n (two routes), the γ family |
//! | [`bounds`] | every explicit total-variation / Wasserstein / local bound |
//! | [`stein`] | Stein-equation solutions and the identities behind the bounds |
//! | [`montecarlo`] | sampling estimates for sizes beyond the exact engine |
//! | [`verify`] | the invariant battery run by `diagpoisson verify` |
//!
//! ```
//! use diagpoisson::{BernoulliMatrix, exact, moments};
//!
//! let m = BernoulliMatrix::constant(4, 0.5).unwrap();
//! let pmf = exact::pmf_full(&m).unwrap();
//! assert!((pmf.coeffs()[2] - 6.0 / 16.0).abs() < 1e-12);
//! let rep = moments::compute_moments(&m);
//! assert!((rep.var_gamma - 1.0).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod check;
pub mod error;
pub mod exact;
pub mod matrix;
pub mod measures;
pub mod moments;
pub mod montecarlo;
pub mod numeric;
pub mod stein;
pub mod verify;

pub use check::Check;
pub use error::{Error, Result};
pub use matrix::{BernoulliMatrix, GeneratorSpec, IndexSelection};
pub use measures::SignedPmf;
