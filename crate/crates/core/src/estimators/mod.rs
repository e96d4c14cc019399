//! Asymptotic quantities of a random walk and the inequalities tying them
//! to the dimension of the harmonic measure.

pub mod checks;
pub mod dimension;
pub mod entropy;
pub mod escape;
pub mod harmonic;
pub mod radial;
pub mod ratio;
mod sequence;

pub use checks::{
    convexity_check, dim_bound_check, free_group_growth, gromov_bound_check, growth_bound_check, open_set_mass,
    BoundaryRegion, ConvexityReport, DimBoundReport, GromovBoundReport, GrowthBoundReport, MassEstimate,
};
pub use dimension::{
    ball_counts, correlation_dimension, pointwise_dimension, BallCounts, CorrelationDimension, DimensionConfig,
    EmpiricalBoundaryMeasure, PointwiseDimension, ScalingWindow,
};
pub use entropy::{
    entropy_rate_exact_tree, entropy_rate_exact_tree_capped, entropy_upper_bound, entropy_upper_bound_with,
    EntropyBound, EntropyBudget,
};
pub use harmonic::NearestNeighbourTree;
pub use escape::{escape_rate_busemann, escape_rate_exact_tree, escape_rate_exact_tree_capped, escape_rate_mc};
pub use radial::RadialTable;
pub use ratio::{ratio_experiment, RatioConfig, RatioRow, RatioTable};
pub use sequence::{RateSequence, Route};
