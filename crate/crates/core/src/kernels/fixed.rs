//! Scaled fixed-point codec for the integer update kernels.
//!
//! Reals are carried as `i32` values premultiplied by a constant scale
//! factor (10,000 by default). Conversion rounds to nearest-even once at
//! ingestion; products inside the kernels are descaled with truncating
//! integer division, mirroring what the in-memory cores would execute.

use thiserror::Error;

/// Scaled value escaped the signed 32-bit range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("fixed-point overflow: {value} * {scale_factor} does not fit in i32")]
pub struct RangeError {
    pub value: f64,
    pub scale_factor: u32,
}

/// Convert a real to its scaled integer form, rounding ties to even.
pub fn to_fixed(v: f32, scale_factor: u32) -> Result<i32, RangeError> {
    let scaled = (v as f64 * scale_factor as f64).round_ties_even();
    if scaled < i32::MIN as f64 || scaled > i32::MAX as f64 {
        return Err(RangeError {
            value: v as f64,
            scale_factor,
        });
    }
    Ok(scaled as i32)
}

/// Recover the real value from its scaled form.
pub fn from_fixed(i: i32, scale_factor: u32) -> f32 {
    (i as f64 / scale_factor as f64) as f32
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scales_learning_rate_and_discount() {
        assert_eq!(to_fixed(0.1, 10_000).unwrap(), 1_000);
        assert_eq!(to_fixed(0.95, 10_000).unwrap(), 9_500);
    }

    #[test]
    fn zero_round_trips() {
        assert_eq!(to_fixed(0.0, 10_000).unwrap(), 0);
        assert_eq!(from_fixed(0, 10_000), 0.0);
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(to_fixed(3.0e6, 10_000).is_err());
        assert!(to_fixed(-3.0e6, 10_000).is_err());
        // Just inside the range still converts.
        assert!(to_fixed(214_748.0, 10_000).is_ok());
    }

    #[test]
    fn ties_round_to_even() {
        // 3/16 and 5/16 are exact in binary; scaled by 8 they land on .5
        // ties, which round to the even neighbour in both cases.
        assert_eq!(to_fixed(0.1875, 8).unwrap(), 2);
        assert_eq!(to_fixed(0.3125, 8).unwrap(), 2);
        assert_eq!(to_fixed(-0.1875, 8).unwrap(), -2);
    }

    proptest! {
        #[test]
        fn round_trip_error_is_bounded(v in -200_000.0f32..200_000.0) {
            let scale = 10_000u32;
            let fixed = to_fixed(v, scale).unwrap();

            // The scaled integer is within half a quantization step of the
            // real value (exact ties land on the bound itself).
            let real_back = fixed as f64 / scale as f64;
            prop_assert!((real_back - v as f64).abs() <= 0.5 / scale as f64 + 1e-9);

            // Returning f32 adds at most half an ulp of the result on top.
            let back = from_fixed(fixed, scale);
            let half_ulp = v.abs() as f64 * 2.0f64.powi(-24);
            prop_assert!(
                ((back - v) as f64).abs() <= 0.5 / scale as f64 + half_ulp + 1e-12,
                "v={v} back={back}"
            );
        }
    }
}
