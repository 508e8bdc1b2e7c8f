//! Append-only log of "good" votes on search results.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::LsiError;
use crate::article::Anchor;
use crate::fsutil::append_line;
use crate::users::{User, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Good,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub query_text: String,
    pub anchor: Anchor,
    pub vote: Vote,
    pub user: UserId,
    pub timestamp: DateTime<Utc>,
}

/// JSON-lines feedback log, optionally file-backed.
#[derive(Debug, Default)]
pub struct FeedbackLog {
    path: Option<PathBuf>,
    records: Vec<FeedbackRecord>,
}

impl FeedbackLog {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(path: &Path) -> Result<Self, LsiError> {
        let mut records = Vec::new();
        if path.exists() {
            for line in fs::read_to_string(path)?.lines().filter(|l| !l.trim().is_empty()) {
                records.push(serde_json::from_str(line).map_err(std::io::Error::other)?);
            }
        }
        Ok(FeedbackLog { path: Some(path.to_owned()), records })
    }

    pub fn records(&self) -> &[FeedbackRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn record_feedback(
    query_text: &str,
    anchor: &Anchor,
    user: &User,
    log: &mut FeedbackLog,
) -> Result<FeedbackRecord, LsiError> {
    if user.blocked {
        return Err(LsiError::UserBlocked(user.id.to_string()));
    }
    let record = FeedbackRecord {
        query_text: query_text.to_owned(),
        anchor: anchor.clone(),
        vote: Vote::Good,
        user: user.id.clone(),
        timestamp: Utc::now(),
    };
    if let Some(path) = &log.path {
        append_line(path, &serde_json::to_string(&record).map_err(std::io::Error::other)?)?;
    }
    log.records.push(record.clone());
    Ok(record)
}
