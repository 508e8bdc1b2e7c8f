//! Pre-provisioned users, bearer tokens and blocking.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub String);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Admin,
    Editor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub name: String,
    pub role: Role,
    #[serde(default)]
    pub blocked: bool,
    /// Hex SHA-256 of the bearer token.
    pub token_hash: String,
}

impl User {
    pub fn is_admin(&self) -> bool {
        self.role == Role::Admin
    }
}

pub fn hash_token(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

/// User table, optionally backed by a JSON file rewritten on every change.
#[derive(Debug, Default)]
pub struct UserRegistry {
    path: Option<PathBuf>,
    users: BTreeMap<UserId, User>,
}

impl UserRegistry {
    pub fn in_memory(users: impl IntoIterator<Item = User>) -> Self {
        UserRegistry { path: None, users: users.into_iter().map(|u| (u.id.clone(), u)).collect() }
    }

    /// Loads `path`, seeding it with `seed` when the file does not exist.
    pub fn open(path: &Path, seed: impl IntoIterator<Item = User>) -> io::Result<Self> {
        let users: Vec<User> = if path.exists() {
            serde_json::from_slice(&fs::read(path)?).map_err(io::Error::other)?
        } else {
            seed.into_iter().collect()
        };
        let registry = UserRegistry {
            path: Some(path.to_owned()),
            users: users.into_iter().map(|u| (u.id.clone(), u)).collect(),
        };
        registry.persist()?;
        Ok(registry)
    }

    pub fn get(&self, id: &UserId) -> Option<&User> {
        self.users.get(id)
    }

    pub fn users(&self) -> impl Iterator<Item = &User> {
        self.users.values()
    }

    pub fn authenticate(&self, token: &str) -> Option<&User> {
        let digest = hash_token(token);
        self.users.values().find(|u| u.token_hash == digest)
    }

    /// Sets the blocked flag; `None` if the user does not exist.
    pub fn set_blocked(&mut self, id: &UserId, blocked: bool) -> io::Result<Option<User>> {
        let Some(user) = self.users.get_mut(id) else { return Ok(None) };
        user.blocked = blocked;
        let user = user.clone();
        self.persist()?;
        Ok(Some(user))
    }

    fn persist(&self) -> io::Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let users: Vec<&User> = self.users.values().collect();
        let json = serde_json::to_vec_pretty(&users).map_err(io::Error::other)?;
        crate::fsutil::write_atomic(path, &json)
    }
}
