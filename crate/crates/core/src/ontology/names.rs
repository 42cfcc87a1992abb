use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier `{0}`")]
pub struct InvalidName(pub String);

/// Returns true if `s` matches `[A-Za-z_][A-Za-z0-9_-]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// `true` and `false` lex as boolean literals in object position, so they
/// cannot name entities.
pub fn is_reserved(s: &str) -> bool {
    s == "true" || s == "false"
}

pub(crate) fn check_name(s: &str) -> Result<(), InvalidName> {
    if is_identifier(s) && !is_reserved(s) {
        Ok(())
    } else {
        Err(InvalidName(s.to_owned()))
    }
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
                let name = name.into();
                check_name(&name)?;
                Ok(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<&str> for $name {
            type Error = InvalidName;

            fn try_from(s: &str) -> Result<Self, InvalidName> {
                Self::new(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

name_type!(
    /// Name of a class in the taxonomy.
    ClassId
);
name_type!(
    /// Name of an individual (instance).
    IndividualId
);
name_type!(
    /// Name of an object, datatype or annotation property.
    PropertyId
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_grammar() {
        for ok in ["Middleware", "_x", "Call-Type", "a1_b-2", "MOM"] {
            assert!(is_identifier(ok), "{ok}");
        }
        for bad in ["", "1abc", "-a", "a b", "a.b", "é", "a\u{e9}"] {
            assert!(!is_identifier(bad), "{bad}");
        }
    }

    #[test]
    fn reserved_literals_rejected() {
        assert!(ClassId::new("true").is_err());
        assert!(IndividualId::new("false").is_err());
        assert!(PropertyId::new("truthy").is_ok());
    }
}
