use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::Transform;

/// Largest supported alphabet; pixels are stored as bytes.
pub const MAX_ALPHABET: usize = 256;

pub(crate) fn check_alphabet(r: usize) -> Result<()> {
    if !(2..=MAX_ALPHABET).contains(&r) {
        return Err(Error::InvalidAlphabet(format!("alphabet size {r} outside 2..={MAX_ALPHABET}")));
    }
    Ok(())
}

/// A length-`n` pixel sequence over the alphabet `0..r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawImage")]
pub struct Image {
    alphabet: usize,
    pixels: Vec<u8>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImage {
    alphabet: usize,
    pixels: Vec<u8>,
}

impl TryFrom<RawImage> for Image {
    type Error = Error;

    fn try_from(raw: RawImage) -> Result<Self> {
        Image::new(raw.alphabet, raw.pixels)
    }
}

impl Image {
    pub fn new(alphabet: usize, pixels: Vec<u8>) -> Result<Self> {
        check_alphabet(alphabet)?;
        if pixels.is_empty() {
            return Err(Error::InvalidDims("image needs at least one pixel".into()));
        }
        if let Some(&p) = pixels.iter().find(|&&p| p as usize >= alphabet) {
            return Err(Error::PixelOutOfRange { value: p as usize, alphabet });
        }
        Ok(Image { alphabet, pixels })
    }

    /// Parses a string of decimal digits, e.g. `"0011"`.
    pub fn from_digits(alphabet: usize, digits: &str) -> Result<Self> {
        let pixels = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::InvalidAlphabet(format!("not a digit: {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Image::new(alphabet, pixels)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn transformed(&self, t: &Transform) -> Result<Image> {
        Ok(Image { alphabet: self.alphabet, pixels: t.apply(&self.pixels)? })
    }
}

/// Checks that all images share one length and one alphabet; returns `(n, r)`.
pub(crate) fn common_shape(images: &[Image]) -> Result<(usize, usize)> {
    let first = images.first().ok_or_else(|| Error::InvalidDims("no images".into()))?;
    let (n, r) = (first.len(), first.alphabet());
    for im in images {
        if im.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: im.len() });
        }
        if im.alphabet() != r {
            return Err(Error::SizeMismatch(format!("alphabets {r} and {}", im.alphabet())));
        }
    }
    Ok((n, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Image::new(2, vec![0, 1, 2]).is_err());
        assert!(Image::new(1, vec![0]).is_err());
        assert!(Image::new(2, vec![]).is_err());
        assert_eq!(Image::from_digits(2, "0011").unwrap().pixels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn json_round_trip_rejects_bad_pixels() {
        let im = Image::from_digits(3, "0120").unwrap();
        let s = serde_json::to_string(&im).unwrap();
        assert_eq!(serde_json::from_str::<Image>(&s).unwrap(), im);
        assert!(serde_json::from_str::<Image>(r#"{"alphabet":2,"pixels":[0,5]}"#).is_err());
    }
}
