//! Weyl means, the `ψ(k)` discrepancy, grid sup-norms, Bernstein's bound and
//! summing-matrix regularity.

mod bernstein;
mod circle;
mod grid;
mod psi;
mod scan;
mod summing;
mod weyl;

pub use bernstein::{bernstein_bound, monte_carlo_bernstein, BernsteinDistribution, BernsteinReport, BernsteinRow};
pub use circle::{root_of_unity, root_table, CirclePoint, Phase};
pub use grid::{sup_norm_via_grid, sup_on_points, GridSup, SparsePolynomial, DEFAULT_GRID_CAP, GRID_FACTOR};
pub use psi::{psi, psi_polynomial, psi_series, PsiSeries, PsiValue};
pub use scan::{
    equidistribution_scan, log_spaced, power_mean_gap, power_mean_gap_bound, sample_points, ScanReport, ScanRow,
    ScanTrend, DEFAULT_SCAN_DENOMINATOR, DEFAULT_SCAN_SQRTS,
};
pub use summing::{summing_matrix_check, SummingMatrixReport};
pub use weyl::{
    weyl_mean, weyl_means, weyl_series, Exclusion, WeylReport, WeylValue, DEFAULT_EXCLUSION_DENOMINATOR,
    DEFAULT_EXCLUSION_RADIUS,
};
