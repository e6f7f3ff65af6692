use core::fmt;

/// Errors produced by the codec and its building blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A tree structure is not complete and proper, or a source is otherwise invalid.
    InvalidStructure(&'static str),
    /// An encoder configuration violates a precondition (depth, block count, ...).
    Config(ConfigError),
    /// A compressed stream ended before all required bits were read.
    Truncated,
    /// A compressed stream is structurally invalid.
    Malformed(&'static str),
    /// The container magic does not match.
    BadMagic,
    /// The container version is not supported by this decoder.
    UnsupportedVersion(u8),
    /// A decoded block did not match its stored checksum.
    ChecksumMismatch { block: usize },
    /// A counts tree does not satisfy the parent = sum of children rule.
    InconsistentCounts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    ZeroBlocks,
    /// `2^depth` exceeds the per-block length `floor(n / blocks)`.
    DepthTooLarge {
        depth: u32,
        n: u64,
        blocks: u32,
    },
    DepthMismatch {
        expected: u32,
        found: u32,
    },
    /// Depths beyond this cannot be indexed by a dense context table.
    DepthUnsupported(u32),
    ValueOutOfRange {
        value: u32,
        alphabet: u32,
    },
    TooManyBlocks,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidStructure(why) => write!(f, "invalid tree structure: {why}"),
            Error::Config(e) => write!(f, "configuration error: {e}"),
            Error::Truncated => f.write_str("compressed stream is truncated"),
            Error::Malformed(why) => write!(f, "malformed stream: {why}"),
            Error::BadMagic => f.write_str("not a PTPM container (bad magic)"),
            Error::UnsupportedVersion(v) => write!(f, "unsupported container version {v}"),
            Error::ChecksumMismatch { block } => write!(f, "checksum mismatch in block {block}"),
            Error::InconsistentCounts => f.write_str("counts tree violates the child-sum rule"),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::ZeroBlocks => f.write_str("block count must be at least 1"),
            ConfigError::DepthTooLarge { depth, n, blocks } => write!(
                f,
                "depth {depth} exceeds log2(floor({n} / {blocks})); reduce the depth or the block count"
            ),
            ConfigError::DepthMismatch { expected, found } => {
                write!(f, "depth mismatch: expected {expected}, found {found}")
            }
            ConfigError::DepthUnsupported(d) => write!(f, "depth {d} is not supported"),
            ConfigError::ValueOutOfRange { value, alphabet } => {
                write!(f, "value {value} outside alphabet of size {alphabet}")
            }
            ConfigError::TooManyBlocks => f.write_str("block count does not fit the container"),
        }
    }
}

impl core::error::Error for Error {}
impl core::error::Error for ConfigError {}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Self {
        Error::Config(e)
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
