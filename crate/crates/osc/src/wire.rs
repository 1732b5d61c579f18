//! OSC 1.0 message encoding: zero-terminated strings padded to 4-byte
//! boundaries, big-endian numbers, `,`-prefixed type tags. Messages only,
//! no bundles.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WireError {
    #[error("address must start with '/'")]
    BadAddress,
    #[error("string contains an embedded NUL byte")]
    EmbeddedNul,
    #[error("type tag string must start with ','")]
    BadTypeTags,
    #[error("unsupported type tag '{0}'")]
    UnsupportedTag(char),
    #[error("packet truncated")]
    Truncated,
    #[error("packet length {0} is not a multiple of 4")]
    Unaligned(usize),
    #[error("string is not zero-terminated")]
    UnterminatedString,
    #[error("string is not valid UTF-8")]
    InvalidUtf8,
    #[error("{0} trailing byte(s) after the last argument")]
    TrailingBytes(usize),
}

/// Supported argument types: int32 `i`, float32 `f`, float64 `d`, string `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum OscArg {
    Int(i32),
    Float(f32),
    Double(f64),
    Str(String),
}

impl OscArg {
    fn tag(&self) -> char {
        match self {
            OscArg::Int(_) => 'i',
            OscArg::Float(_) => 'f',
            OscArg::Double(_) => 'd',
            OscArg::Str(_) => 's',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscMessage {
    pub address: String,
    pub args: Vec<OscArg>,
}

impl OscMessage {
    pub fn new(address: impl Into<String>, args: Vec<OscArg>) -> Self {
        OscMessage {
            address: address.into(),
            args,
        }
    }
}

fn push_padded_str(out: &mut Vec<u8>, s: &str) -> Result<(), WireError> {
    if s.bytes().any(|b| b == 0) {
        return Err(WireError::EmbeddedNul);
    }
    out.extend_from_slice(s.as_bytes());
    out.push(0);
    while !out.len().is_multiple_of(4) {
        out.push(0);
    }
    Ok(())
}

pub fn encode(message: &OscMessage) -> Result<Vec<u8>, WireError> {
    if !message.address.starts_with('/') {
        return Err(WireError::BadAddress);
    }
    let mut out = Vec::with_capacity(64);
    push_padded_str(&mut out, &message.address)?;
    let tags: String = std::iter::once(',')
        .chain(message.args.iter().map(OscArg::tag))
        .collect();
    push_padded_str(&mut out, &tags)?;
    for arg in &message.args {
        match arg {
            OscArg::Int(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Float(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Double(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Str(s) => push_padded_str(&mut out, s)?,
        }
    }
    debug_assert_eq!(out.len() % 4, 0);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn padded_str(&mut self) -> Result<&'a str, WireError> {
        let rest = &self.bytes[self.pos..];
        let nul = rest
            .iter()
            .position(|b| *b == 0)
            .ok_or(WireError::UnterminatedString)?;
        let s = std::str::from_utf8(&rest[..nul]).map_err(|_| WireError::InvalidUtf8)?;
        let consumed = (nul + 1).div_ceil(4) * 4;
        if consumed > rest.len() {
            return Err(WireError::Truncated);
        }
        self.pos += consumed;
        Ok(s)
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        if self.pos + N > self.bytes.len() {
            return Err(WireError::Truncated);
        }
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        Ok(buf)
    }
}

pub fn decode(bytes: &[u8]) -> Result<OscMessage, WireError> {
    if !bytes.len().is_multiple_of(4) {
        return Err(WireError::Unaligned(bytes.len()));
    }
    let mut reader = Reader { bytes, pos: 0 };
    let address = reader.padded_str()?.to_string();
    if !address.starts_with('/') {
        return Err(WireError::BadAddress);
    }
    let tags = reader.padded_str()?.to_string();
    let mut chars = tags.chars();
    if chars.next() != Some(',') {
        return Err(WireError::BadTypeTags);
    }
    let mut args = Vec::new();
    for tag in chars {
        args.push(match tag {
            'i' => OscArg::Int(i32::from_be_bytes(reader.take::<4>()?)),
            'f' => OscArg::Float(f32::from_be_bytes(reader.take::<4>()?)),
            'd' => OscArg::Double(f64::from_be_bytes(reader.take::<8>()?)),
            's' => OscArg::Str(reader.padded_str()?.to_string()),
            other => return Err(WireError::UnsupportedTag(other)),
        });
    }
    if reader.pos != bytes.len() {
        return Err(WireError::TrailingBytes(bytes.len() - reader.pos));
    }
    Ok(OscMessage { address, args })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_float_layout() {
        let m = OscMessage::new("/a", vec![OscArg::Float(1.0)]);
        let bytes = encode(&m).unwrap();
        // "/a\0\0" + ",f\0\0" + 4 big-endian bytes.
        assert_eq!(bytes.len(), 12);
        assert_eq!(&bytes[..4], b"/a\0\0");
        assert_eq!(&bytes[4..8], b",f\0\0");
        assert_eq!(&bytes[8..], 1.0f32.to_be_bytes());
        assert_eq!(decode(&bytes).unwrap(), m);
    }

    #[test]
    fn frame_message_round_trip() {
        let coords: Vec<OscArg> = (0..6).map(|i| OscArg::Float(i as f32 * 0.5)).collect();
        let mut args = vec![OscArg::Double(1.25)];
        args.extend(coords);
        let m = OscMessage::new("/moma/in/frame", args);
        let bytes = encode(&m).unwrap();
        assert_eq!(bytes.len() % 4, 0);
        assert_eq!(decode(&bytes).unwrap(), m);
    }

    #[test]
    fn truncation_detected() {
        let m = OscMessage::new(
            "/x",
            vec![OscArg::Int(7), OscArg::Double(3.5), OscArg::Str("abc".into())],
        );
        let bytes = encode(&m).unwrap();
        // Cut mid-argument at every 4-byte boundary.
        for cut in (4..bytes.len()).step_by(4) {
            assert!(decode(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        // Unaligned cut.
        assert_eq!(
            decode(&bytes[..bytes.len() - 1]).unwrap_err(),
            WireError::Unaligned(bytes.len() - 1)
        );
    }

    #[test]
    fn malformed_tags_and_addresses() {
        let mut bytes = encode(&OscMessage::new("/ok", vec![OscArg::Int(1)])).unwrap();
        // Corrupt the ',' of the tag string.
        bytes[4] = b'x';
        assert_eq!(decode(&bytes).unwrap_err(), WireError::BadTypeTags);

        assert_eq!(
            encode(&OscMessage::new("no-slash", vec![])).unwrap_err(),
            WireError::BadAddress
        );
        assert_eq!(
            encode(&OscMessage::new("/bad\0addr", vec![])).unwrap_err(),
            WireError::EmbeddedNul
        );

        // Unsupported tag: craft ",b" by hand.
        let mut crafted = Vec::new();
        crafted.extend_from_slice(b"/a\0\0");
        crafted.extend_from_slice(b",b\0\0");
        assert_eq!(decode(&crafted).unwrap_err(), WireError::UnsupportedTag('b'));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode(&OscMessage::new("/t", vec![OscArg::Int(1)])).unwrap();
        bytes.extend_from_slice(&[0, 0, 0, 0]);
        assert!(matches!(
            decode(&bytes).unwrap_err(),
            WireError::TrailingBytes(4)
        ));
    }

    #[test]
    fn string_padding_boundaries() {
        for len in 0..9 {
            let s: String = "x".repeat(len);
            let m = OscMessage::new("/s", vec![OscArg::Str(s)]);
            let bytes = encode(&m).unwrap();
            assert_eq!(bytes.len() % 4, 0);
            assert_eq!(decode(&bytes).unwrap(), m);
        }
    }
}
