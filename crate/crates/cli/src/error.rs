use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] hardy_stein::Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hardy_stein::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Divergence { .. } | E::Aliasing { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}
