//! Exact enumeration and asymptotics checks for rooted maps on orientable
//! surfaces.
//!
//! * [`exact`]: big integers, rationals, polynomials, truncated series and
//!   the formal logarithm.
//! * [`cubic`]: exact genus distributions of rooted cubic maps from the
//!   Goulden–Jackson recursion, with checkpointed table builds.
//! * [`rotation`]: counts of rooted maps disregarding genus, from rotation
//!   systems, plus a brute-force census for tiny sizes.
//! * [`asymptotics`]: the normalised face polynomials `h_n(y)`, the limit
//!   `K(y)`, and the asymptotic formulas built on them.
//! * [`stats`]: exact and jet-based moments of genus and face
//!   distributions, and normality diagnostics.

pub mod asymptotics;
pub mod checkpoint;
pub mod cubic;
pub mod error;
pub mod exact;
pub mod numeric;
pub mod rotation;
pub mod stats;

pub use error::{Error, Result};

pub(crate) fn serialize_decimal_vec<S: serde::Serializer>(
    values: &[num_bigint::BigUint],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(values.iter().map(ToString::to_string))
}

pub(crate) fn serialize_decimal<S: serde::Serializer>(
    value: &num_bigint::BigUint,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
