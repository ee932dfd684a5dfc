//! Concentration bounds for functions whose differences are bounded only on
//! a high-probability subset `Y` of a finite product space, together with
//! exhaustive and Monte Carlo oracles that check them.
//!
//! The central objects are the extension [`extension::extend`], which
//! replaces `f` off `Y` by `f̄(x) = min_{y ∈ Y} { f(y) + d_c(x, y) }`, and
//! the tail bound [`bounds::hp_bound`]
//!
//! ```text
//! P[f(X) - m ≥ ε] ≤ p + exp(-2 ((ε - p c̄)⁺)² / Σ c_i²)
//! ```
//!
//! where `p = P[X ∉ Y]` and `m = E[f(X) | X ∈ Y]`.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod examples;
pub mod extension;
pub mod function;
pub mod instance;
pub mod mc;
pub mod metric;
pub mod oracle;
pub mod space;
pub mod subset;
pub mod sum;

pub use bounds::{hp_bound, hp_bound_two_sided, mcdiarmid_bound, mean_gap_bound, BoundReport, Formula};
pub use certify::{check_bounded_differences, tightest_full_space_c, Certification, ViolationWitness};
pub use error::{Error, Result};
pub use examples::{counterexample1, random_certified_instance, toy_example, InstanceBundle};
pub use extension::{extend, lower_extend, ExtendOptions, ExtensionTable};
pub use function::{BuiltinFunction, FunctionSource, TabulatedFunction};
pub use instance::InstanceFile;
pub use mc::{mc_estimate, MCReport, TailEstimate};
pub use metric::{weighted_hamming, WeightedMetric};
pub use oracle::{dominance_check, exact_stats, exact_tail, DominanceReport, ExactReport, Side, TailPoint};
pub use space::{Limits, Point, ProductSpace};
pub use subset::{Membership, SubsetRule, SubsetY};

/// Slack allowed on every inequality check between computed reals.
pub const TOLERANCE: f64 = 1e-9;

/// Shortest round-trip decimal, switching to exponent notation for very
/// small or very large magnitudes.
pub fn format_real(value: f64) -> String {
    let magnitude = value.abs();
    if value == 0.0 || !value.is_finite() || (1e-5..1e16).contains(&magnitude) {
        format!("{value}")
    } else {
        format!("{value:e}")
    }
}
