use std::collections::BTreeSet;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::PlatformError;
use crate::article::DirectiveKind;
use crate::users::{hash_token, Role, User, UserId};

pub const ENV_LISTEN: &str = "MMLHUB_LISTEN";
pub const ENV_DATA_DIR: &str = "MMLHUB_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct UserSeed {
    pub id: String,
    pub name: Option<String>,
    pub role: Role,
    /// Plain bearer token; hashed on load.
    pub token: Option<String>,
    pub token_hash: Option<String>,
    #[serde(default)]
    pub blocked: bool,
}

impl UserSeed {
    pub fn to_user(&self) -> Result<User, PlatformError> {
        let token_hash = match (&self.token, &self.token_hash) {
            (_, Some(h)) => h.clone(),
            (Some(t), None) => hash_token(t),
            (None, None) => return Err(PlatformError::Config(format!("user {} has no token", self.id))),
        };
        Ok(User {
            id: UserId(self.id.clone()),
            name: self.name.clone().unwrap_or_else(|| self.id.clone()),
            role: self.role,
            blocked: self.blocked,
            token_hash,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    listen: Option<String>,
    data_dir: Option<PathBuf>,
    directive_kinds: Option<Vec<DirectiveKind>>,
    lsi_k: Option<usize>,
    #[serde(default)]
    users: Vec<UserSeed>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    pub directive_kinds: BTreeSet<DirectiveKind>,
    /// LSI rank; the default rank rule applies when `None`.
    pub lsi_k: Option<usize>,
    pub users: Vec<UserSeed>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: PathBuf::from("data"),
            directive_kinds: DirectiveKind::article_references().into_iter().collect(),
            lsi_k: None,
            users: Vec::new(),
        }
    }
}

impl Config {
    /// Parses TOML. A relative `data_dir` is resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, PlatformError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| PlatformError::Config(e.to_string()))?;
        let mut config = Config::default();
        if let Some(listen) = raw.listen {
            config.listen = parse_listen(&listen)?;
        }
        if let Some(dir) = raw.data_dir {
            config.data_dir = base.join(dir);
        }
        if let Some(kinds) = raw.directive_kinds {
            config.directive_kinds = kinds.into_iter().collect();
        }
        if raw.lsi_k == Some(0) {
            return Err(PlatformError::Config("lsi_k must be positive".into()));
        }
        config.lsi_k = raw.lsi_k;
        config.users = raw.users;
        for u in &config.users {
            u.to_user()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, PlatformError> {
        let text = fs::read_to_string(path).map_err(|e| PlatformError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Applies `MMLHUB_LISTEN` and `MMLHUB_DATA_DIR`.
    pub fn with_env_overrides(mut self) -> Result<Self, PlatformError> {
        self.apply_overrides(std::env::var(ENV_LISTEN).ok(), std::env::var(ENV_DATA_DIR).ok())?;
        Ok(self)
    }

    fn apply_overrides(&mut self, listen: Option<String>, data_dir: Option<String>) -> Result<(), PlatformError> {
        if let Some(l) = listen {
            self.listen = parse_listen(&l)?;
        }
        if let Some(d) = data_dir {
            self.data_dir = PathBuf::from(d);
        }
        Ok(())
    }

    pub fn seed_users(&self) -> Result<Vec<User>, PlatformError> {
        self.users.iter().map(UserSeed::to_user).collect()
    }
}

fn parse_listen(s: &str) -> Result<SocketAddr, PlatformError> {
    s.parse().map_err(|_| PlatformError::Config(format!("bad listen address {s:?}")))
}
