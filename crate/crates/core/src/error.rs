use thiserror::Error;

/// Errors produced by the combinatorial core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different ground sets")]
    GroundMismatch,
    #[error("ground set has {0} elements, the limit is 64")]
    GroundTooLarge(usize),
    #[error("images do not form a bijection on the ground set")]
    NotABijection,
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("{0} is not an element of the ground set")]
    NotInGround(u32),
    #[error("blocks must be disjoint, non-empty and cover the ground set")]
    InvalidBlocks,
    #[error("partition is not a coarsening of the cycle partition")]
    NotAboveCycles,
    #[error("circle sizes must be positive")]
    EmptyCircle,
    #[error("size {needed} exceeds the enumeration cap {cap}")]
    CapExceeded { cap: u32, needed: u32 },
    #[error("not a member of PS_NC for this shape")]
    NotAMember,
    #[error("classification requires exactly 3 circles, got {0}")]
    CirclesNot3(usize),
    #[error("marker {0} lies outside its circle")]
    MarkerOutsideCircle(u32),
    #[error("grouped word must have 1 to 3 non-empty groups")]
    BadGroupCount,
    #[error("cumulant block spans {0} cycles, only 1-3 are defined")]
    BlockTooWide(usize),
    #[error("family id {0:?} declared twice")]
    FamilyCollision(String),
    #[error("letter {0:?} is declared by more than one family")]
    LetterCollision(String),
    #[error("letter {0:?} is not declared by any family")]
    UnknownLetter(String),
    #[error("determining data key is not alternating: {0}")]
    NotAlternating(String),
    #[error("sizes vector does not match the grouping")]
    SizesMismatch,
    #[error("letter count {got} does not match the sizes total {want}")]
    LettersMismatch { got: usize, want: usize },
    #[error("circle sizes must all be even for the half/double maps")]
    OddCircle,
    #[error("permutation is not parity reversing")]
    NotParityReversing,
    #[error("separation precondition fails at position {0}")]
    NotSeparated(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("distribution spec: {0}")]
    DistSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
