//! Central tolerance constants.
//!
//! All residuals are measured in the operator norm. Two regimes appear
//! throughout: construction-time membership checks (tight, near machine
//! precision) and identity residuals that accumulate interpolation or
//! finite-difference error on an N = 512 grid.

/// Membership residual for group/algebra constraints at construction.
pub const CONSTRUCTION: f64 = 1e-12;

/// Residual for exact algebraic identities (exp/log roundtrip, Ad
/// homomorphism, interchange of exp and Ad).
pub const IDENTITY: f64 = 1e-10;

/// Compatibility residual for gauge-group and gauge-algebra tuples at
/// construction.
pub const COMPATIBILITY: f64 = 1e-9;

/// Overlap agreement threshold for gluing per-chart pieces.
pub const GLUE_AGREEMENT: f64 = 1e-9;

/// Chart-change consistency of equivariant values.
pub const EQUIVARIANT: f64 = 1e-9;

/// Cocycle residual of validated transition data.
pub const COCYCLE: f64 = 1e-10;

/// Interpolation budget for composing and inverting sampled diffeomorphisms.
pub const DIFFEO: f64 = 1e-8;

/// Partition-of-unity sum deviation on grid points.
pub const POU_SUM: f64 = 1e-12;

/// Recomposition error of a fragmentation, sup-norm over grid points.
pub const FRAGMENT: f64 = 1e-6;

/// Section property |Q(S(g)) - g|.
pub const SECTION: f64 = 1e-6;

/// Verticality of the cocycle omega: base displacement of the composite.
pub const VERTICALITY: f64 = 1e-8;

/// Factor-system identity residuals and automorphism associativity probes.
pub const FACTOR_SYSTEM: f64 = 1e-6;

/// Outer action evaluated two ways (local data vs. equivariant composition).
pub const OUTER_ACTION: f64 = 1e-8;

/// Endpoint error of the regularity ODE against the gauge exponential, and
/// compatibility drift along the evolved path.
pub const EVOLVE: f64 = 1e-7;

/// Connection compatibility across charts (left logarithmic derivative by
/// central differences).
pub const CONNECTION: f64 = 1e-7;

/// Holonomy residuals: closed forms, conjugation of eigenvalues, refinement
/// invariance.
pub const HOLONOMY: f64 = 1e-7;

/// Closed-form holonomy of a constant U(1) connection.
pub const HOLONOMY_U1: f64 = 1e-8;

/// Twisted-periodicity residual of unrolled gauge-algebra elements.
pub const TWIST: f64 = 1e-9;

/// Bijectivity bound on displacement derivatives; gives the Newton inversion
/// a global convergence guarantee.
pub const SUP_SLOPE: f64 = 0.5;

/// Default admissible neighbourhood for base diffeomorphisms entering the
/// extension construction: sup|u| and sup|u'|. Chosen so that all
/// fragmentation partial fields stay below [`SUP_SLOPE`] for the covers the
/// suites use (plateau-bump slopes reach ~20 on a 3-arc cover).
pub const ADMISSIBLE_SUP: f64 = 0.015;
pub const ADMISSIBLE_SLOPE: f64 = 0.15;

/// Default samples per circle.
pub const DEFAULT_GRID: usize = 512;

/// Default enlargement margin of cover arcs.
pub const DEFAULT_MARGIN: f64 = 0.02;

/// Default chart radius of the group logarithm (< pi, single branch with
/// margin).
pub const DEFAULT_CHART_RADIUS: f64 = 2.8;

/// Default step count for the regularity ODE.
pub const DEFAULT_EVOLVE_STEPS: usize = 256;

/// Default step count for the holonomy integrator.
pub const DEFAULT_HOLONOMY_STEPS: usize = 512;
