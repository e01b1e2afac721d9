use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidField {
    #[error("field `{0}` must not be empty")]
    Empty(&'static str),
    #[error("list `{0}` must not be empty")]
    EmptyList(&'static str),
    #[error("list `{0}` contains an empty item")]
    EmptyListItem(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected end of input at byte {0}")]
    Truncated(usize),
    #[error("unknown encoding tag")]
    BadTag,
    #[error("text field is not valid UTF-8")]
    Utf8,
    #[error("{0} trailing bytes after record")]
    Trailing(usize),
    #[error("decoded payload is invalid: {0}")]
    Invalid(#[from] InvalidField),
}
