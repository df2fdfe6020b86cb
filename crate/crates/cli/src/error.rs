//! Pipeline errors carry the process exit category: 1 usage, 2 validation,
//! 3 numerical.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Validation,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Validation => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct PipelineError {
    pub class: ErrorClass,
    pub message: String,
}

impl PipelineError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Usage,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Validation,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Numerical,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::validation(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for PipelineError {
    fn from(e: serde_json::Error) -> Self {
        PipelineError::validation(format!("json error: {e}"))
    }
}

impl From<datagen::DatagenError> for PipelineError {
    fn from(e: datagen::DatagenError) -> Self {
        use datagen::DatagenError as D;
        match &e {
            D::ResampleExhausted(_) => PipelineError::numerical(e.to_string()),
            D::Core(qcore::QcoreError::NoConvergence { .. }) => {
                PipelineError::numerical(e.to_string())
            }
            _ => PipelineError::validation(e.to_string()),
        }
    }
}

impl From<nn::NnError> for PipelineError {
    fn from(e: nn::NnError) -> Self {
        use nn::NnError as N;
        match &e {
            N::NonFiniteLoss { .. } => PipelineError::numerical(e.to_string()),
            N::UnknownArchitecture(_) => PipelineError::usage(e.to_string()),
            _ => PipelineError::validation(e.to_string()),
        }
    }
}

impl From<attribution::AttributionError> for PipelineError {
    fn from(e: attribution::AttributionError) -> Self {
        PipelineError::validation(e.to_string())
    }
}

impl From<reduction::ReductionError> for PipelineError {
    fn from(e: reduction::ReductionError) -> Self {
        use reduction::ReductionError as R;
        match &e {
            R::Nn(nn::NnError::NonFiniteLoss { .. }) => PipelineError::numerical(e.to_string()),
            _ => PipelineError::validation(e.to_string()),
        }
    }
}

impl From<tomography::TomographyError> for PipelineError {
    fn from(e: tomography::TomographyError) -> Self {
        PipelineError::validation(e.to_string())
    }
}
