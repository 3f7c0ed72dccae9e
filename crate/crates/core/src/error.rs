use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("system is not square: {supports} supports in dimension {dim}")]
    NonSquare { supports: usize, dim: usize },

    #[error("zero coefficient at support {block}, term {index}")]
    ZeroCoefficient { block: usize, index: usize },

    #[error("support {block} has fewer than two points")]
    EmptySupport { block: usize },

    #[error("exponent matrix is singular")]
    SingularExponentMatrix,

    #[error("lifting is not generic: tie at point {point} for candidate cell {edges:?} (margin {margin:e})")]
    TieDegenerate {
        edges: Vec<(usize, usize)>,
        point: usize,
        margin: f64,
    },

    #[error("no inequalities to certify against")]
    EmptyInequalities,

    #[error("configuration does not affinely span: homogenized rank {rank}, expected {expected}")]
    DegenerateConfiguration { rank: usize, expected: usize },

    #[error("direction is singular for Gale row {row}")]
    SingularDirection { row: usize },

    #[error("integer overflow converting exact value to machine integer")]
    Overflow,

    #[error("input error: {0}")]
    Input(String),
}
