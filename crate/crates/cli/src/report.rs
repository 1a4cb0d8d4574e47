use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Infeasible,
    NotFound,
    Diverged,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Infeasible | Status::NotFound | Status::Diverged => 2,
            Status::Error => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub status: Status,
    pub payload: Value,
}

/// Status plus module payload, before the command echo is attached.
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
}

impl Outcome {
    pub fn ok(payload: Value) -> Self {
        Outcome { status: Status::Ok, payload }
    }

    pub fn negative(status: Status, payload: Value) -> Self {
        Outcome { status, payload }
    }
}
