use spectral_lattice::Error;

/// Failures that end a command, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lattice(#[from] Error),
}

impl CliError {
    /// 2 usage/input/precondition, 3 numerical backend, 4 non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Lattice(e) => match e {
                Error::EigenFailure(_) | Error::InternalLattice(_) => 3,
                Error::NoConvergence { .. } => 4,
                _ => 2,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_lattice::HermitianMatrix;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::EigenFailure("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(Error::InternalLattice("x".into())).exit_code(), 3);
        let nc = Error::NoConvergence {
            exponent: 2,
            residual: 1.0,
            last_iterate: Box::new(HermitianMatrix::zeros(1)),
        };
        assert_eq!(CliError::from(nc).exit_code(), 4);
        assert_eq!(CliError::from(Error::EmptySet).exit_code(), 2);
    }
}
