use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::born::BornError;
use crate::model::{ConfigErrors, ModelError};
use crate::oracle::OracleError;
use crate::specfun::SpecFunError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Born(#[from] BornError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
