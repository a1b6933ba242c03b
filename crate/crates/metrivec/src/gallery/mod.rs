//! Concrete functions with known discontinuity structure, the
//! adversarial tagged-partition construction, and the coordinatewise
//! continuity probe.
//!
//! Gallery functions implement [`Integrand`] together with the witness
//! hooks that make sup-type estimates tight: a nearby-point separation
//! oracle, per-interval adversarial tag pairs, and analytic oscillation
//! values for their truncated structure. Function ids for the CLI:
//! `rationals:<Nmax>`, `digits:<K>`, `ratind`, `smooth:<name>`.

mod adversary;
mod coordinate;
mod digits;
mod indicator;
mod rationals;
mod smooth;

pub use adversary::{adversary_partitions, AdversaryConfig, AdversaryResult};
pub use coordinate::{coordinate_continuity_probe, CoordinateContinuityReport, CoordinateView};
pub use digits::BinaryDigitFn;
pub use indicator::RationalIndicator;
pub use rationals::RationalEnumeration;
pub use smooth::{ScalarCurve, SmoothFn};

use crate::error::{Error, Result};
use crate::integration::Integrand;
use crate::spaces::Space;

/// Resolves a gallery id against a codomain space.
pub fn by_id(id: &str, space: &Space) -> Result<Box<dyn Integrand>> {
    let parts: Vec<&str> = id.trim().split(':').collect();
    match parts.as_slice() {
        ["rationals", n] => {
            let n_max: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational count in '{id}'")))?;
            Ok(Box::new(RationalEnumeration::new(n_max, space.clone())?))
        }
        ["digits", k] => {
            let k: u32 = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad digit count in '{id}'")))?;
            Ok(Box::new(BinaryDigitFn::new(k, space.clone())?))
        }
        ["ratind"] => Ok(Box::new(RationalIndicator::new(space.clone()))),
        ["smooth", name] => Ok(Box::new(SmoothFn::named(name, space.clone())?)),
        _ => Err(Error::Parse(format!(
            "unknown function '{id}' (expected rationals:<Nmax>, digits:<K>, ratind, smooth:<name>)"
        ))),
    }
}

/// Continuous calibration functions with analytic integrals and
/// derivatives, one per smooth id that fits the space.
pub fn smooth_calibration_set(space: &Space) -> Vec<SmoothFn> {
    ["poly12", "trig", "linear", "const1"]
        .iter()
        .filter_map(|name| SmoothFn::named(name, space.clone()).ok())
        .collect()
}
