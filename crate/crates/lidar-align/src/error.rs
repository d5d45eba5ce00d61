//! Error type shared by every pipeline stage.
//!
//! Each variant names the stage that produced it, so an end-to-end failure
//! message always identifies where in the pipeline the scan was rejected.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between a raw scan and a pose estimate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input value violated a basic invariant (non-finite number,
    /// negative range, zero-size target, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// The simulated scene cannot produce a usable scan (e.g. the board is
    /// entirely outside the sensor's field of view).
    #[error("scene unusable: {0}")]
    UnusableScene(String),

    /// No cluster satisfied the ROI criteria.
    #[error("roi selection: no cluster qualifies out of {clusters} (board absent or out of range)")]
    RoiAbsent { clusters: usize },

    /// More than one cluster satisfied the ROI criteria; inspection must
    /// fail loudly instead of guessing.
    #[error("roi selection: ambiguous, {matching} clusters qualify")]
    RoiAmbiguous { matching: usize },

    /// RANSAC could not form a plane hypothesis (too few or collinear points).
    #[error("plane fit: {0}")]
    PlaneFitDegenerate(String),

    /// The best plane left too many points unexplained.
    #[error("plane fit: inlier ratio {inlier_ratio:.3} below required {required:.3}")]
    PlaneFitQuality { inlier_ratio: f64, required: f64 },

    /// The fitted plane is horizontal; a face-up board has no usable
    /// "up" direction for corner labeling.
    #[error("feature extraction: plane normal is parallel to vertical")]
    DegeneratePlaneBasis,

    /// Corner selection collapsed onto duplicate points (e.g. all points on
    /// a single ring).
    #[error("feature extraction: insufficient vertical coverage ({0})")]
    InsufficientVerticalCoverage(String),

    /// The damped normal matrix could not be factorized; the four features
    /// do not constrain all six pose parameters.
    #[error("solver: singular normal matrix (degenerate feature geometry)")]
    SingularNormalMatrix,

    /// A scan file did not match the expected CSV grammar.
    #[error("scan file line {line}: {message}")]
    ScanFormat { line: usize, message: String },

    /// The JSON run configuration could not be parsed or validated.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short name of the pipeline stage this error belongs to, for
    /// stage-attributed CLI messages.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::UnusableScene(_) => "simulation",
            Error::RoiAbsent { .. } | Error::RoiAmbiguous { .. } => "roi selection",
            Error::PlaneFitDegenerate(_) | Error::PlaneFitQuality { .. } => "plane fit",
            Error::DegeneratePlaneBasis | Error::InsufficientVerticalCoverage(_) => {
                "feature extraction"
            }
            Error::SingularNormalMatrix => "solver",
            Error::ScanFormat { .. } => "scan file",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
