//! Error type shared by every module of the crate.

/// Failures raised by geometric constructions, classification and homotopies.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("stereographic projection of a point within {angle:.3e} rad of the pole")]
    DegenerateProjection { angle: f64 },
    #[error("target is not inside the convex hull of the points")]
    NotInHull,
    #[error("radius {rho} outside the admissible interval ({lo}, {hi})")]
    RadiusOutOfBounds { rho: f64, lo: f64, hi: f64 },
    #[error("lift parity is ambiguous: <z(1), z(0)> = {inner}")]
    AmbiguousParity { inner: f64 },
    #[error("translation angle {theta} outside [{lo}, {hi}]")]
    ThetaOutOfRange { theta: f64, lo: f64, hi: f64 },
    #[error("no lattice direction lies in the dual hemisphere set")]
    EmptyDual,
    #[error("centroid of the dual hemisphere set is too short ({norm:.3e})")]
    NearZeroCentroid { norm: f64 },
    #[error("tangent winding residual {residual} exceeds the rounding guard")]
    WindingResidual { residual: f64 },
    #[error("no gap between the regular and caustic parts of the sampled fibers")]
    NoGapFound,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("curvature bound {kappa1} does not exceed the required {required}")]
    CurvatureBoundTooTight { kappa1: f64, required: f64 },
    #[error("loop window [{lo}, {hi}] leaves the parameter interval")]
    ParameterOverlap { lo: f64, hi: f64 },
    #[error("curve is not condensed")]
    NotCondensed,
    #[error("stage {stage} failed its tolerance check: {detail}")]
    StageToleranceFailure { stage: String, detail: String },
    #[error("planar rotation number {0} is not positive")]
    NonpositiveRotation(i64),
    #[error("codomain length {left} differs from domain length {right}")]
    DomainMismatch { left: f64, right: f64 },
    #[error("curve is not diffuse")]
    NotDiffuse,
    #[error("best antipodal pair has chordal defect {defect:.3e}")]
    AntipodalDefect { defect: f64 },
    #[error("curve is condensed; the simplex graft needs the origin inside the caustic hull")]
    NotNonCondensed,
    #[error("Newton continuation diverged (residual {residual:.3e})")]
    ContinuationDiverged { residual: f64 },
    #[error("degenerate simplex (volume {volume:.3e})")]
    DegenerateSimplex { volume: f64 },
    #[error("graft budget {budget} exhausted")]
    BudgetExceeded { budget: f64 },
    #[error("total curvature {tot} exceeds the bound {bound}")]
    BoundViolation { tot: f64, bound: f64 },
    #[error("meridian {index} does not cross the lifted boundary")]
    MeridianMiss { index: usize },
    #[error("band retraction did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("tracks cross inside the band (clearance {clearance:.3e})")]
    TrackCrossing { clearance: f64 },
    #[error("curve is not closed (frame defect {defect:.3e})")]
    NotClosed { defect: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
