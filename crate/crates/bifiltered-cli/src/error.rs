use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("ring mismatch: document uses {document}, command line asks for {flag}")]
    RingMismatch { document: String, flag: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{context}: {source}")]
    Engine {
        context: String,
        #[source]
        source: bifiltered::Error,
    },
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Schema { path: path.into(), message: message.into() }
    }

    pub fn engine(context: impl Into<String>) -> impl FnOnce(bifiltered::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Engine { context, source }
    }
}
