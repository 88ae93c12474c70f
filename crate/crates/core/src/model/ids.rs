use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
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

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }
    };
}

string_id!(
    /// Slug of a pattern language, unique across the repository.
    LanguageId
);

string_id!(
    /// `<language>/<pattern-slug>`.
    PatternId
);

string_id!(RelationId);

string_id!(
    /// Slug of a pattern view.
    ViewId
);

impl PatternId {
    pub fn scoped(language: &LanguageId, slug: &str) -> Self {
        Self(format!("{language}/{slug}"))
    }

    /// Language prefix encoded in the id. The authoritative value is
    /// `Pattern::language_id`; this is only a fallback for dangling ids.
    pub fn language_prefix(&self) -> &str {
        self.0.split_once('/').map_or(self.0.as_str(), |(lang, _)| lang)
    }
}

/// Lowercase kebab-case slug: ASCII alphanumerics are kept, every other run of
/// characters collapses to a single `-`.
pub fn slugify(name: &str) -> String {
    let mut slug = String::with_capacity(name.len());
    let mut pending_dash = false;
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            if pending_dash && !slug.is_empty() {
                slug.push('-');
            }
            pending_dash = false;
            slug.push(ch.to_ascii_lowercase());
        } else {
            pending_dash = true;
        }
    }
    slug
}
