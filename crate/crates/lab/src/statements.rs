//! Statement identifiers carried by every [`CheckReport`](hklab::CheckReport).

pub const ELEMENTARY_CONVEXITY: &str = "elementary-convexity";
pub const ELEMENTARY_CROSS: &str = "elementary-cross";
pub const ELEMENTARY_SUM: &str = "elementary-sum";
pub const CACCIOPPOLI: &str = "caccioppoli";
pub const POINTWISE_CLAIM: &str = "pointwise-claim";
pub const SUBSOLUTION_MAXIMAL: &str = "subsolution-maximal";
pub const PARABOLIC_STEP: &str = "parabolic-step";
pub const SPACETIME_ITERATION: &str = "spacetime-iteration";
pub const INTERPOLATION: &str = "interpolation";
pub const SUPERSOLUTION_MAXIMAL: &str = "supersolution-maximal";
pub const TIME_ITERATION_STEP: &str = "time-iteration-step";
pub const TIME_ITERATION: &str = "time-iteration";
pub const MEAN_VALUE: &str = "mean-value";
pub const MEAN_VALUE_PIVOT: &str = "mean-value-pivot";
pub const DAVIES_ABSTRACT: &str = "davies-abstract";
pub const INTEGRATED_MAX_PRINCIPLE: &str = "integrated-max-principle";
pub const DAVIES_GAUSSIAN: &str = "davies-gaussian";
pub const GAUSSIAN_BOUND: &str = "gaussian-bound";
pub const BALL_INTERIOR: &str = "ball-interior";
pub const INTRINSIC_INEQUALITY: &str = "intrinsic-inequality";

/// Every statement the suite runner knows, in execution order.
pub const ALL: &[&str] = &[
    ELEMENTARY_CONVEXITY,
    ELEMENTARY_CROSS,
    ELEMENTARY_SUM,
    BALL_INTERIOR,
    INTRINSIC_INEQUALITY,
    CACCIOPPOLI,
    POINTWISE_CLAIM,
    SUBSOLUTION_MAXIMAL,
    PARABOLIC_STEP,
    SPACETIME_ITERATION,
    INTERPOLATION,
    SUPERSOLUTION_MAXIMAL,
    TIME_ITERATION_STEP,
    TIME_ITERATION,
    MEAN_VALUE,
    MEAN_VALUE_PIVOT,
    INTEGRATED_MAX_PRINCIPLE,
    DAVIES_ABSTRACT,
    DAVIES_GAUSSIAN,
    GAUSSIAN_BOUND,
];

pub fn is_known(id: &str) -> bool {
    ALL.contains(&id)
}
