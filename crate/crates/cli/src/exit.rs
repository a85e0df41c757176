use std::fmt;

use serde::Serialize;

/// Process exit codes. These numbers are part of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Ok,
    Invalid,
    Input,
    Network,
    Usage,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Ok => 0,
            Exit::Invalid => 1,
            Exit::Input => 2,
            Exit::Network => 3,
            Exit::Usage => 4,
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Exit::Ok => "ok",
            Exit::Invalid => "invalid",
            Exit::Input => "input",
            Exit::Network => "network",
            Exit::Usage => "usage",
        }
    }
}

/// A command that could not do its job.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn new(exit: Exit, message: impl fmt::Display) -> Failure {
        Failure {
            exit,
            message: message.to_string(),
        }
    }

    pub fn input(message: impl fmt::Display) -> Failure {
        Failure::new(Exit::Input, message)
    }

    pub fn network(message: impl fmt::Display) -> Failure {
        Failure::new(Exit::Network, message)
    }

    pub fn usage(message: impl fmt::Display) -> Failure {
        Failure::new(Exit::Usage, message)
    }

    pub fn code(&self) -> u8 {
        self.exit.code()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
