//! On-disk configuration formats.
//!
//! Two JSON forms, chosen automatically on encode:
//!
//! * sparse: `{"L": 4, "d": 2, "black": [[0,0],[1,1]]}` with the black
//!   coordinate list sorted lexicographically; used when the black fraction
//!   is below 5%.
//! * dense: `{"L": 2, "d": 2, "bits": "f"}`: lowercase hex of the
//!   row-major bitmap read as a little-endian integer (bit 0 = node index
//!   0), zero-padded to exactly `ceil(L^d / 4)` digits.
//!
//! Round-trips are bit-exact in both directions.

use crate::error::{ConfigFormatError, Error, Result};
use crate::lattice::{Configuration, Coord, TorusShape};
use serde::{Deserialize, Serialize};

/// Black fraction below which the sparse form is emitted.
const SPARSE_CUTOFF: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Sparse {
        #[serde(rename = "L")]
        side: usize,
        d: usize,
        black: Vec<Vec<usize>>,
    },
    Dense {
        #[serde(rename = "L")]
        side: usize,
        d: usize,
        bits: String,
    },
}

/// Encode a configuration, picking the sparse form for black fractions
/// under 5%.
pub fn encode_config(c: &Configuration) -> ConfigFile {
    let shape = c.shape();
    let n = shape.nodes();
    let fraction = c.black_count() as f64 / n as f64;
    if fraction < SPARSE_CUTOFF {
        let mut black: Vec<Vec<usize>> = c
            .black_coords()
            .into_iter()
            .map(|v| v.components().to_vec())
            .collect();
        black.sort();
        ConfigFile::Sparse {
            side: shape.side(),
            d: shape.dim(),
            black,
        }
    } else {
        ConfigFile::Dense {
            side: shape.side(),
            d: shape.dim(),
            bits: bitmap_to_hex(c),
        }
    }
}

pub fn decode_config(f: &ConfigFile) -> Result<Configuration> {
    match f {
        ConfigFile::Sparse { side, d, black } => {
            let shape = TorusShape::new(*d, *side)
                .map_err(|e| ConfigFormatError::BadShape(e.to_string()))?;
            let mut c = Configuration::all_white(shape);
            for (index, comps) in black.iter().enumerate() {
                if comps.len() != *d {
                    return Err(ConfigFormatError::ArityMismatch {
                        index,
                        expected: *d,
                        got: comps.len(),
                    }
                    .into());
                }
                for &value in comps {
                    if value >= *side {
                        return Err(ConfigFormatError::CoordOutOfRange {
                            value,
                            side: *side,
                            index,
                        }
                        .into());
                    }
                }
                c.set_black(&Coord(comps.clone()), true)?;
            }
            Ok(c)
        }
        ConfigFile::Dense { side, d, bits } => {
            let shape = TorusShape::new(*d, *side)
                .map_err(|e| ConfigFormatError::BadShape(e.to_string()))?;
            hex_to_config(shape, bits)
        }
    }
}

fn expected_digits(nodes: usize) -> usize {
    nodes.div_ceil(4)
}

fn bitmap_to_hex(c: &Configuration) -> String {
    let n = c.shape().nodes();
    let digits = expected_digits(n);
    let mut out = String::with_capacity(digits);
    // Most significant nibble first; nibble k covers bits 4k..4k+4.
    for k in (0..digits).rev() {
        let mut nibble = 0u8;
        for b in 0..4 {
            let idx = 4 * k + b;
            if idx < n && c.is_black_idx(idx) {
                nibble |= 1 << b;
            }
        }
        out.push(char::from_digit(nibble as u32, 16).unwrap());
    }
    out
}

fn hex_to_config(shape: TorusShape, hex: &str) -> Result<Configuration> {
    let n = shape.nodes();
    let digits = expected_digits(n);
    if hex.len() != digits {
        return Err(ConfigFormatError::LengthMismatch {
            expected: digits,
            got: hex.len(),
            nodes: n,
        }
        .into());
    }
    let mut c = Configuration::all_white(shape);
    for (pos, ch) in hex.chars().enumerate() {
        let nibble = match ch {
            '0'..='9' => ch as u8 - b'0',
            'a'..='f' => ch as u8 - b'a' + 10,
            _ => return Err(ConfigFormatError::MalformedHex { pos, byte: ch }.into()),
        };
        let k = digits - 1 - pos;
        for b in 0..4 {
            if nibble >> b & 1 == 1 {
                let idx = 4 * k + b;
                if idx >= n {
                    // A set bit above the node count is a length violation in
                    // disguise (possible only for n % 4 != 0 in the top nibble).
                    return Err(ConfigFormatError::LengthMismatch {
                        expected: digits,
                        got: digits,
                        nodes: n,
                    }
                    .into());
                }
                c.bits_mut().set(idx, true);
            }
        }
    }
    Ok(c)
}

/// Parse a config file from a JSON string.
pub fn config_from_json(json: &str) -> Result<Configuration> {
    let file: ConfigFile = serde_json::from_str(json)
        .map_err(|e| Error::ConfigFormat(ConfigFormatError::BadShape(e.to_string())))?;
    decode_config(&file)
}

pub fn config_to_json(c: &Configuration) -> String {
    serde_json::to_string(&encode_config(c)).expect("config serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{mix2, uniform};
    use proptest::prelude::*;

    fn t(d: usize, side: usize) -> TorusShape {
        TorusShape::new(d, side).unwrap()
    }

    #[test]
    fn dense_hex_nibble_math() {
        // 4 set bits pack into one hex digit; a 9-node torus needs 3 digits
        // with a partial top nibble.
        let shape = t(1, 4);
        let c = Configuration::all_black(shape);
        assert_eq!(bitmap_to_hex(&c), "f");
        let shape9 = t(2, 3);
        let c = Configuration::all_black(shape9);
        assert_eq!(bitmap_to_hex(&c), "1ff");
        assert_eq!(bitmap_to_hex(&Configuration::all_white(shape9)), "000");
    }

    #[test]
    fn sparse_decodes_diagonal_pair() {
        let json = r#"{"L":4,"d":2,"black":[[0,0],[1,1]]}"#;
        let c = config_from_json(json).unwrap();
        assert_eq!(c.black_count(), 2);
        assert!(c.is_black(&Coord::from([0, 0])).unwrap());
        assert!(c.is_black(&Coord::from([1, 1])).unwrap());
    }

    #[test]
    fn sparse_chosen_under_cutoff() {
        let shape = t(2, 16);
        let mut c = Configuration::all_white(shape);
        c.set_black(&Coord::from([3, 3]), true).unwrap();
        assert!(matches!(encode_config(&c), ConfigFile::Sparse { .. }));
        let dense = Configuration::all_black(shape);
        assert!(matches!(encode_config(&dense), ConfigFile::Dense { .. }));
    }

    #[test]
    fn decode_errors_named() {
        let bad_hex = ConfigFile::Dense {
            side: 4,
            d: 1,
            bits: "fz".into(),
        };
        assert!(matches!(
            decode_config(&bad_hex),
            Err(Error::ConfigFormat(
                ConfigFormatError::LengthMismatch { .. }
            ))
        ));
        let bad_hex = ConfigFile::Dense {
            side: 4,
            d: 1,
            bits: "z".into(),
        };
        assert!(matches!(
            decode_config(&bad_hex),
            Err(Error::ConfigFormat(ConfigFormatError::MalformedHex { .. }))
        ));
        let bad_coord = ConfigFile::Sparse {
            side: 4,
            d: 2,
            black: vec![vec![0, 4]],
        };
        assert!(matches!(
            decode_config(&bad_coord),
            Err(Error::ConfigFormat(
                ConfigFormatError::CoordOutOfRange { .. }
            ))
        ));
        let bad_arity = ConfigFile::Sparse {
            side: 4,
            d: 2,
            black: vec![vec![0, 1, 2]],
        };
        assert!(matches!(
            decode_config(&bad_arity),
            Err(Error::ConfigFormat(ConfigFormatError::ArityMismatch { .. }))
        ));
        // Overlong top nibble: 9 nodes need 3 digits, "fff" sets bits 9..12.
        let overlong = ConfigFile::Dense {
            side: 3,
            d: 2,
            bits: "fff".into(),
        };
        assert!(matches!(
            decode_config(&overlong),
            Err(Error::ConfigFormat(
                ConfigFormatError::LengthMismatch { .. }
            ))
        ));
    }

    proptest! {
        #[test]
        fn roundtrip_encode_decode(seed in any::<u64>(), dense in any::<bool>()) {
            let shape = t(2, 8);
            let p = if dense { 0.5 } else { 0.02 };
            let thresh = crate::rng::bernoulli_threshold(p);
            let mut c = Configuration::all_white(shape);
            for i in 0..shape.nodes() {
                if thresh.fires(uniform(mix2(1, seed), i as u64)) {
                    c.bits_mut().set(i, true);
                }
            }
            let file = encode_config(&c);
            let back = decode_config(&file).unwrap();
            prop_assert!(back == c);
            // Canonical JSON also round-trips.
            let json = config_to_json(&c);
            let again = config_from_json(&json).unwrap();
            prop_assert!(again == c);
        }
    }
}
