//! Numerical toolkit for sub-Riemannian geometry of the Heisenberg group
//! `H^m`: exact group arithmetic, closed-form Carnot-Caratheodory geodesics,
//! Jacobians of geodesic contractions, energies of maps `Omega -> H^m` and a
//! solver for the isotropically constrained Dirichlet problem.

mod dd;
pub mod contraction;
pub mod energy;
pub mod error;
pub mod geodesic;
pub mod group;
pub mod map;
pub mod quadrature;
pub mod trig;
pub mod variational;

pub use contraction::{
    chart_a, contract, jacobian_a, jacobian_contract, mcp_scan, McpConfig, McpRow,
    SphericalCoords,
};
pub use energy::{
    horizontal_energy, ks_density, ks_energy, pansu_energy, EnergyReport, PansuSettings,
    TargetMetric,
};
pub use error::{HeisError, Result};
pub use geodesic::{
    cc_distance, eval_geodesic, geodesic_between, geodesic_from_origin, solve_tau, GeodesicChart,
};
pub use group::{dilate, gauge_dist, gauge_norm, group_inv, group_mul, horizontal_frame, HPoint};
pub use map::{Grid, SampledMap};
pub use quadrature::QmcSettings;
pub use variational::{
    isotropy_residual, legendrian_residual, lift, minimize, BoundaryData, MinimizeConfig,
    Minimized,
};
