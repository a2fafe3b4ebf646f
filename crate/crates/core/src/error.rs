use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: undeclared state `{name}`")]
    UndeclaredState { line: usize, name: String },

    #[error("line {line}: undeclared symbol `{name}`")]
    UndeclaredSymbol { line: usize, name: String },

    #[error("automaton has no initial state")]
    EmptyInitial,

    #[error("automaton has no final state")]
    EmptyFinal,

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("no successful path exists (trim result is empty)")]
    EmptyTrim,

    #[error("no successful path of length 1..={bound}")]
    EmptyLanguage { bound: usize },

    #[error("state `{state}` is not visited by any successful path of length <= {bound}")]
    UncoveredState { state: String, bound: usize },

    #[error("cannot draw paths visiting state `{state}`: none of length <= {bound}")]
    ConditioningImpossible { state: String, bound: usize },

    #[error("distribution puts mass on state `{state}` which no bounded path visits")]
    UnreachableMass { state: String },

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("probability floor {floor} is infeasible for {states} states")]
    FloorInfeasible { floor: f64, states: usize },

    #[error("linear program is infeasible")]
    InfeasibleLp,

    #[error("simplex did not converge within {iterations} pivots")]
    NumericInstability { iterations: usize },

    #[error("random generator produced an empty trim automaton {attempts} times")]
    GeneratorGaveUp { attempts: usize },

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("invalid strategy spec `{spec}`: {reason}")]
    InvalidStrategy { spec: String, reason: String },

    #[error("malformed alpha matrix: {0}")]
    MalformedAlpha(String),
}

impl Error {
    /// Stable machine-readable code for each error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UndeclaredState { .. } => "E_UNDECLARED_STATE",
            Error::UndeclaredSymbol { .. } => "E_UNDECLARED_SYMBOL",
            Error::EmptyInitial => "E_EMPTY_INITIAL",
            Error::EmptyFinal => "E_EMPTY_FINAL",
            Error::InvalidAutomaton(_) => "E_INVALID_AUTOMATON",
            Error::EmptyTrim => "E_EMPTY_TRIM",
            Error::EmptyLanguage { .. } => "E_EMPTY_LANGUAGE",
            Error::UncoveredState { .. } => "E_UNCOVERED_STATE",
            Error::ConditioningImpossible { .. } => "E_CONDITIONING_IMPOSSIBLE",
            Error::UnreachableMass { .. } => "E_UNREACHABLE_MASS",
            Error::Domain(_) => "E_DOMAIN",
            Error::FloorInfeasible { .. } => "E_FLOOR_INFEASIBLE",
            Error::InfeasibleLp => "E_INFEASIBLE_LP",
            Error::NumericInstability { .. } => "E_NUMERIC_INSTABILITY",
            Error::GeneratorGaveUp { .. } => "E_GENERATOR_GAVE_UP",
            Error::UnknownStrategy(_) => "E_UNKNOWN_STRATEGY",
            Error::InvalidStrategy { .. } => "E_INVALID_STRATEGY",
            Error::MalformedAlpha(_) => "E_MALFORMED_ALPHA",
        }
    }
}
