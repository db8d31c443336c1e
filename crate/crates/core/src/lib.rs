//! Radial nodal solutions of `-Δu = |x|^α f(u)` on planar balls and annuli,
//! the spectra of their linearizations, and numerical checks of the Morse
//! index lower bounds that hold for them.
//!
//! The pipeline is: shoot a radial solution ([`radial`]), decompose the
//! linearized operator into angular modes and count negative eigenvalues
//! ([`spectral`]), then compare against the bounds and transform identities
//! ([`transform`], [`verify`]). [`report`] serializes everything.
//!
//! ```
//! use henon_morse::{radial, spectral, Domain, Nonlinearity, RadialGrid, ShootingConfig};
//!
//! let f = Nonlinearity::henon(3.0)?;
//! let grid = RadialGrid::midpoint(Domain::unit_ball(), 800)?;
//! let u = radial::shoot_nodal_solution(&f, 2.0, &grid, 2, &ShootingConfig::default())?;
//! let report = spectral::morse_index(&u, &f, &Default::default())?;
//! assert!(report.total >= report.bound);
//! # Ok::<(), henon_morse::Error>(())
//! ```

pub mod config;
pub mod domain;
mod error;
pub mod ode;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod spectral;
pub mod transform;
pub mod verify;

pub use config::{Quadrature, ShootingConfig, SpectralConfig, Tolerances};
pub use domain::{
    make_grid, AngularFourierFunction, Domain, FourierTerm, InitialData, Nonlinearity, Parity,
    RadialFunction, RadialGrid, RadialProfile,
};
pub use error::{Error, Result};
pub use quadrature::integrate_radial;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/radial.md")]
    struct Radial;
    #[doc = include_str!("../../../book/src/transforms.md")]
    struct Transforms;
    #[doc = include_str!("../../../book/src/spectra.md")]
    struct Spectra;
    #[doc = include_str!("../../../book/src/morse.md")]
    struct Morse;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
