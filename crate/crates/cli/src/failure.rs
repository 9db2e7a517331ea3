use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    BadArguments,
    Solver,
    Io,
}

/// Anything that ends the process with a nonzero status.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn arguments(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::BadArguments,
            message: message.into(),
        }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Solver,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::BadArguments => 2,
            FailureKind::Solver => 3,
            FailureKind::Io => 4,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            error: &'a Failure,
            code: i32,
        }
        serde_json::to_string(&Envelope {
            error: self,
            code: self.exit_code(),
        })
        .expect("failure serializes")
    }
}

impl From<rabi_ring::Error> for Failure {
    fn from(e: rabi_ring::Error) -> Self {
        use rabi_ring::Error::*;
        match e {
            InvalidParameter { .. }
            | SiteCountMismatch { .. }
            | UnsupportedSiteCount { .. }
            | OutsideWindow { .. }
            | InsufficientPoints { .. }
            | NearFirstOrderBoundary { .. } => Failure::arguments(e.to_string()),
            _ => Failure::solver(e.to_string()),
        }
    }
}
