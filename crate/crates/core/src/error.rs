use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("port {port} out of range for a {n_ports}-port model")]
    PortOutOfRange { port: usize, n_ports: usize },

    /// Both quantities entering a contrast ratio vanish.
    #[error("contrast ratio undefined: both probabilities vanish")]
    UndefinedContrast,

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("singular scattering system at delta = {delta} (condition estimate {condition:.3e})")]
    SingularSystem { delta: f64, condition: f64 },

    #[error("linear residual {residual:.3e} exceeds tolerance at delta = {delta}")]
    Residual { delta: f64, residual: f64 },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("unknown parameter `{name}` for {model} model")]
    UnknownParameter { name: String, model: &'static str },

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid grid: {0}")]
    Grid(String),
}
