//! String-backed identifier newtypes.
//!
//! Tracks, assets, weapons, and library classes all carry string ids in
//! scenario files; the newtypes keep the maps keyed by the right kind of id.

use serde::{Deserialize, Serialize};
use std::borrow::Borrow;
use std::fmt;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

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

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of one tracked threat.
    TrackId
);
string_id!(
    /// Identifier of one defended asset.
    DaId
);
string_id!(
    /// Identifier of one weapon system.
    WsId
);
string_id!(
    /// Identifier of a threat class in the threat library.
    ThreatClassId
);
string_id!(
    /// Identifier of a weapon class in the weapon library.
    WeaponClassId
);

impl ThreatClassId {
    /// Reserved class id for the unknown-threat fallback row.
    pub const UNKNOWN: &'static str = "unknown";

    pub fn unknown() -> Self {
        Self(Self::UNKNOWN.to_owned())
    }

    pub fn is_unknown(&self) -> bool {
        self.0 == Self::UNKNOWN
    }
}
