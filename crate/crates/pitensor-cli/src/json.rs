//! JSON writing with deterministic float formatting: every float is emitted
//! in scientific notation with 17 significant digits, enough to round-trip
//! `f64` exactly, so identical results serialize to identical bytes.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

#[derive(Default)]
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
}

/// Serializes with the 17-significant-digit float convention.
pub fn to_string_17<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_17_digits() {
        let xs = [1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, -0.1, 7.0];
        for x in xs {
            let s = to_string_17(&x).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(x.to_bits(), back.to_bits(), "{s}");
        }
    }

    #[test]
    fn deterministic_bytes() {
        let v = serde_json::json!({"a": 0.1 + 0.2, "b": [1.5, -2.25]});
        assert_eq!(to_string_17(&v).unwrap(), to_string_17(&v).unwrap());
    }
}
