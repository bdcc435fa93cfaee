//! Numeric types usable as utilities and scores.

use std::fmt::{Debug, Display};

use num_traits::Num;

/// A number type for utilities and evaluation scores.
pub trait Scalar: Num + PartialOrd + Clone + Display + Debug + Send + Sync + 'static {}

impl<T: Num + PartialOrd + Clone + Display + Debug + Send + Sync + 'static> Scalar for T {}

/// Exact rational numbers, the default scalar.
pub type Rational = num_rational::Ratio<i64>;
