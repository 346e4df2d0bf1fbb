use std::fmt;

/// Pipeline stage a verbalization failure originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Estimate,
    Segment,
    Features,
    Fit,
    Symbolize,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Estimate => "estimate",
            Stage::Segment => "segment",
            Stage::Features => "features",
            Stage::Fit => "fit",
            Stage::Symbolize => "symbolize",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integration fault: non-finite derivative at t = {time}")]
    IntegrationFault { time: f64 },

    #[error("player {player}: feedback family does not support ε-recovery (not affine)")]
    UnsupportedFamily { player: usize },

    #[error("player {player}: ε-gain matrix R is column-rank deficient")]
    RankDeficient { player: usize },

    #[error("underdetermined recursion fit: {epochs} epochs, at least {required} required")]
    Underdetermined { epochs: usize, required: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown scenario `{name}`; known scenarios: {}", known.join(", "))]
    UnknownScenario { name: String, known: Vec<String> },

    #[error("{stage} stage failed")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            got,
        }
    }

    pub(crate) fn at_stage(stage: Stage) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
