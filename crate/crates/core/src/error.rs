use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty range: a = {a} exceeds b = {b}")]
    EmptyRange { a: u64, b: u64 },
    #[error("scan exhausted after {scanned} candidates beyond {from}")]
    ScanExhausted { from: u64, scanned: u64 },
    #[error("no element of the reference set up to {0}")]
    EmptyReference(u64),
    #[error("budget exhausted while building {part} at stage {stage}: {detail}")]
    BudgetExhausted { part: &'static str, stage: usize, detail: String },
    #[error("window {window} holds {available} elements of range(g), need {needed}")]
    WindowTooSmall { window: u64, available: u64, needed: u64 },
    #[error("dip stage {stage} found f-mass {mass} within the scan bound")]
    DipStage { stage: usize, mass: f64 },
    #[error("witness {0} is not available in the family")]
    WitnessUnavailable(usize),
}
