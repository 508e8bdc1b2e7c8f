use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::Utc;
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::state::{plan_update, read_corpus_dir, report_for, BuildSettings, CorpusState, Sources, UpdateReport};
use super::PlatformError;
use crate::annotate::{CommentRevision, CommentStore};
use crate::article::{render_article, Anchor, ArticleName, DirectiveKind, ItemKind, Span};
use crate::fsutil::write_atomic;
use crate::lsi::{model_file, record_feedback, FeedbackLog, FeedbackRecord};
use crate::users::{User, UserId, UserRegistry};

/// File locations under the data directory.
#[derive(Debug, Clone)]
pub struct DataLayout {
    pub root: PathBuf,
}

impl DataLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataLayout { root: root.into() }
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus")
    }

    pub fn state_file(&self) -> PathBuf {
        self.root.join("state.json")
    }

    pub fn model(&self) -> PathBuf {
        self.root.join("lsi.bin")
    }

    pub fn comments(&self) -> PathBuf {
        self.root.join("comments")
    }

    pub fn feedback(&self) -> PathBuf {
        self.root.join("feedback.jsonl")
    }

    pub fn users(&self) -> PathBuf {
        self.root.join("users.json")
    }

    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }
}

/// Persisted description of the active corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StateFile {
    version_label: String,
    corpus_hash: String,
    directive_kinds: BTreeSet<DirectiveKind>,
    lsi_k: Option<usize>,
}

pub struct IngestOutcome {
    pub state: Arc<CorpusState>,
    /// Present when an earlier corpus was replaced.
    pub report: Option<UpdateReport>,
}

#[derive(Debug, Serialize)]
pub struct ItemView<'a> {
    pub anchor: &'a Anchor,
    pub kind: ItemKind,
    pub label: Option<&'a str>,
    pub span: Span,
    pub statement: &'a str,
}

#[derive(Debug, Serialize)]
pub struct CommentMeta<'a> {
    pub anchor: &'a Anchor,
    pub revision_id: u64,
    pub author: &'a UserId,
    pub timestamp: String,
    pub deleted: bool,
}

#[derive(Debug, Serialize)]
pub struct ArticleView<'a> {
    pub name: &'a ArticleName,
    pub version_label: &'a str,
    pub frozen: bool,
    pub html: String,
    pub items: Vec<ItemView<'a>>,
    pub comments: Vec<CommentMeta<'a>>,
}

/// Shared service state: the current corpus snapshot plus the writable
/// stores. Readers clone the snapshot `Arc`; writers replace it whole.
pub struct Platform {
    layout: DataLayout,
    settings: BuildSettings,
    state: RwLock<Option<Arc<CorpusState>>>,
    comments: RwLock<CommentStore>,
    feedback: Mutex<FeedbackLog>,
    users: RwLock<UserRegistry>,
    writer: Mutex<()>,
}

fn read<T>(lock: &RwLock<T>) -> std::sync::RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(|e| e.into_inner())
}

fn write<T>(lock: &RwLock<T>) -> std::sync::RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(|e| e.into_inner())
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl Platform {
    pub fn open(config: &Config) -> Result<Self, PlatformError> {
        let settings = BuildSettings { directive_kinds: config.directive_kinds.clone(), lsi_k: config.lsi_k };
        Self::open_dir(&config.data_dir, settings, config.seed_users()?)
    }

    /// Opens a data directory, restoring the persisted corpus if any.
    pub fn open_dir(root: &Path, settings: BuildSettings, seed_users: Vec<User>) -> Result<Self, PlatformError> {
        let layout = DataLayout::new(root);
        fs::create_dir_all(root).map_err(|e| PlatformError::io(root, e))?;
        let users = UserRegistry::open(&layout.users(), seed_users).map_err(|e| PlatformError::io(&layout.users(), e))?;
        let comments = CommentStore::open(&layout.comments())?;
        let feedback = FeedbackLog::open(&layout.feedback())?;
        let platform = Platform {
            layout,
            settings,
            state: RwLock::new(None),
            comments: RwLock::new(comments),
            feedback: Mutex::new(feedback),
            users: RwLock::new(users),
            writer: Mutex::new(()),
        };
        if let Some(file) = platform.read_state_file()? {
            let sources = read_corpus_dir(&platform.layout.corpus())?;
            let state = platform.build_state(&sources, &file.version_label, Some(&file))?;
            if state.corpus_hash != file.corpus_hash {
                log::warn!("stored corpus differs from its recorded hash; derived data rebuilt");
            }
            platform.persist_model(&state)?;
            platform.write_state_file(&state)?;
            *write(&platform.state) = Some(Arc::new(state));
        }
        Ok(platform)
    }

    pub fn layout(&self) -> &DataLayout {
        &self.layout
    }

    pub fn settings(&self) -> &BuildSettings {
        &self.settings
    }

    /// The current snapshot.
    pub fn snapshot(&self) -> Result<Arc<CorpusState>, PlatformError> {
        read(&self.state).clone().ok_or(PlatformError::NoCorpus)
    }

    fn read_state_file(&self) -> Result<Option<StateFile>, PlatformError> {
        let path = self.layout.state_file();
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path).map_err(|e| PlatformError::io(&path, e))?;
        serde_json::from_slice(&bytes).map(Some).map_err(|e| PlatformError::io(&path, e))
    }

    fn write_state_file(&self, state: &CorpusState) -> Result<(), PlatformError> {
        let file = StateFile {
            version_label: state.version_label.clone(),
            corpus_hash: state.corpus_hash.clone(),
            directive_kinds: self.settings.directive_kinds.clone(),
            lsi_k: self.settings.lsi_k,
        };
        let path = self.layout.state_file();
        let json = serde_json::to_vec_pretty(&file).expect("serializable");
        write_atomic(&path, &json).map_err(|e| PlatformError::io(&path, e))
    }

    /// Builds a state, reusing the stored model when the corpus hash and
    /// settings match the previous build.
    fn build_state(
        &self,
        sources: &Sources,
        label: &str,
        previous: Option<&StateFile>,
    ) -> Result<CorpusState, PlatformError> {
        let hash = super::state::corpus_hash(sources);
        let reusable = previous.is_some_and(|f| {
            f.corpus_hash == hash && f.lsi_k == self.settings.lsi_k && f.directive_kinds == self.settings.directive_kinds
        });
        let model = self.layout.model();
        let cached = (reusable && model.exists()).then_some(model.as_path());
        CorpusState::build(sources, label, &self.settings, cached)
    }

    fn persist_model(&self, state: &CorpusState) -> Result<(), PlatformError> {
        if let Some(index) = state.lsi.as_ref().filter(|_| state.lsi_rebuilt) {
            model_file::save(&self.layout.model(), &index.model, &index.matrix)?;
        }
        Ok(())
    }

    /// Replaces `<data>/corpus` with `sources`.
    fn persist_corpus(&self, sources: &Sources) -> Result<(), PlatformError> {
        let corpus = self.layout.corpus();
        let staging = self.layout.root.join("corpus.staging");
        let previous = self.layout.root.join("corpus.previous");
        let io = |p: &Path, e: std::io::Error| PlatformError::io(p, e);
        for dir in [&staging, &previous] {
            if dir.exists() {
                fs::remove_dir_all(dir).map_err(|e| io(dir, e))?;
            }
        }
        fs::create_dir_all(&staging).map_err(|e| io(&staging, e))?;
        for (name, text) in sources {
            let path = staging.join(format!("{}.miz", name.as_str().to_lowercase()));
            fs::write(&path, text).map_err(|e| io(&path, e))?;
        }
        if corpus.exists() {
            fs::rename(&corpus, &previous).map_err(|e| io(&corpus, e))?;
        }
        fs::rename(&staging, &corpus).map_err(|e| io(&staging, e))?;
        if previous.exists() {
            fs::remove_dir_all(&previous).map_err(|e| io(&previous, e))?;
        }
        Ok(())
    }

    /// Ingests `dir`. When a corpus is already active this is an update:
    /// comments are carried over and a report is produced.
    pub fn ingest(&self, dir: &Path, label: &str) -> Result<IngestOutcome, PlatformError> {
        let _guard = lock(&self.writer);
        let sources = read_corpus_dir(dir)?;
        let previous_file = self.read_state_file()?;
        let new_state = self.build_state(&sources, label, previous_file.as_ref())?;
        let old = read(&self.state).clone();

        let report = match &old {
            Some(old) => {
                let plans = plan_update(&old.corpus, &new_state.corpus, &read(&self.comments))?;
                let mut report = report_for(
                    &old.version_label,
                    &old.corpus_hash,
                    label,
                    &new_state.corpus_hash,
                    &new_state.corpus,
                    &plans,
                    &read(&self.comments),
                );
                self.persist_corpus(&sources)?;
                self.persist_model(&new_state)?;
                self.write_state_file(&new_state)?;
                let mut store = write(&self.comments);
                for plan in &plans {
                    if plan.is_clean() {
                        store.relabel(&plan.article, &plan.remap)?;
                    } else {
                        store.set_frozen(&plan.article, true)?;
                    }
                }
                report.comments_after = store.live_count();
                drop(store);
                self.write_report(&report)?;
                Some(report)
            }
            None => {
                self.persist_corpus(&sources)?;
                self.persist_model(&new_state)?;
                self.write_state_file(&new_state)?;
                None
            }
        };
        let state = Arc::new(new_state);
        *write(&self.state) = Some(state.clone());
        log::info!("serving {} ({})", state.version_label, &state.corpus_hash[..12]);
        Ok(IngestOutcome { state, report })
    }

    /// Replaces the active corpus, carrying comments across.
    pub fn update(&self, dir: &Path, label: &str) -> Result<UpdateReport, PlatformError> {
        self.snapshot()?;
        let outcome = self.ingest(dir, label)?;
        Ok(outcome.report.expect("an active corpus produces a report"))
    }

    /// Dry run of an update from `old_dir` to `new_dir` against this data
    /// directory's comments. Nothing is written.
    pub fn preview_update(&self, old_dir: &Path, new_dir: &Path) -> Result<UpdateReport, PlatformError> {
        let (old_sources, new_sources) = (read_corpus_dir(old_dir)?, read_corpus_dir(new_dir)?);
        let old = CorpusState::build(&old_sources, "old", &self.settings, None)?;
        let new = CorpusState::build(&new_sources, "new", &self.settings, None)?;
        let store = read(&self.comments);
        let plans = plan_update(&old.corpus, &new.corpus, &store)?;
        Ok(report_for("old", &old.corpus_hash, "new", &new.corpus_hash, &new.corpus, &plans, &store))
    }

    fn write_report(&self, report: &UpdateReport) -> Result<(), PlatformError> {
        let stamp = Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        let label: String =
            report.to_label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
        let path = self.layout.reports().join(format!("{stamp}-{label}.json"));
        let json = serde_json::to_vec_pretty(report).expect("serializable");
        write_atomic(&path, &json).map_err(|e| PlatformError::io(&path, e))
    }

    pub fn authenticate(&self, token: Option<&str>) -> Result<User, PlatformError> {
        let users = read(&self.users);
        let user = token.and_then(|t| users.authenticate(t)).cloned().ok_or(PlatformError::Unauthorized)?;
        if user.blocked {
            return Err(PlatformError::Forbidden(format!("user {} is blocked", user.id)));
        }
        Ok(user)
    }

    pub fn authenticate_admin(&self, token: Option<&str>) -> Result<User, PlatformError> {
        let user = self.authenticate(token)?;
        if !user.is_admin() {
            return Err(PlatformError::Forbidden(format!("user {} is not an administrator", user.id)));
        }
        Ok(user)
    }

    pub fn user(&self, id: &UserId) -> Option<User> {
        read(&self.users).get(id).cloned()
    }

    pub fn set_blocked(&self, admin: &User, id: &UserId, blocked: bool) -> Result<User, PlatformError> {
        if !admin.is_admin() || admin.blocked {
            return Err(PlatformError::Forbidden(format!("user {} may not block users", admin.id)));
        }
        write(&self.users)
            .set_blocked(id, blocked)
            .map_err(|e| PlatformError::io(&self.layout.users(), e))?
            .ok_or_else(|| PlatformError::NotFound(format!("user {id}")))
    }

    fn known_anchor(&self, anchor: &Anchor) -> Result<Arc<CorpusState>, PlatformError> {
        let state = self.snapshot()?;
        if !state.corpus.contains_anchor(anchor) {
            return Err(PlatformError::NotFound(anchor.to_string()));
        }
        Ok(state)
    }

    pub fn latest_comment(&self, anchor: &Anchor) -> Result<CommentRevision, PlatformError> {
        read(&self.comments).latest(anchor).cloned().ok_or_else(|| PlatformError::NotFound(format!("comment on {anchor}")))
    }

    pub fn comment_history(&self, anchor: &Anchor) -> Result<Vec<CommentRevision>, PlatformError> {
        let store = read(&self.comments);
        let history = store.history(anchor);
        if history.is_empty() && !self.snapshot()?.corpus.contains_anchor(anchor) {
            return Err(PlatformError::NotFound(anchor.to_string()));
        }
        Ok(history.to_vec())
    }

    pub fn save_comment(&self, user: &User, anchor: &Anchor, body: &str) -> Result<CommentRevision, PlatformError> {
        let state = self.snapshot()?;
        Ok(write(&self.comments).save_comment(&state.corpus, anchor, body, user)?)
    }

    pub fn rollback_comment(&self, user: &User, anchor: &Anchor, to: u64) -> Result<CommentRevision, PlatformError> {
        Ok(write(&self.comments).rollback(anchor, to, user)?)
    }

    pub fn delete_comment(&self, admin: &User, anchor: &Anchor) -> Result<CommentRevision, PlatformError> {
        if !admin.is_admin() {
            return Err(PlatformError::Forbidden(format!("user {} is not an administrator", admin.id)));
        }
        Ok(write(&self.comments).delete_comment(anchor, admin)?)
    }

    /// Re-attaches the frozen comments of `article` using an explicit old to
    /// new anchor mapping; unmapped histories are archived. Unfreezes.
    pub fn resolve(
        &self,
        admin: &User,
        article: &ArticleName,
        mapping: &BTreeMap<Anchor, Anchor>,
    ) -> Result<usize, PlatformError> {
        if !admin.is_admin() {
            return Err(PlatformError::Forbidden(format!("user {} is not an administrator", admin.id)));
        }
        let state = self.snapshot()?;
        let mut store = write(&self.comments);
        if !store.is_frozen(article) {
            return Err(PlatformError::BadRequest(format!("comments of {article} are not frozen")));
        }
        let targets: BTreeSet<&Anchor> = mapping.values().collect();
        if targets.len() != mapping.len() {
            return Err(PlatformError::BadRequest("two histories mapped to one anchor".into()));
        }
        for (from, to) in mapping {
            if &from.article != article || &to.article != article {
                return Err(PlatformError::BadRequest(format!("{from} -> {to} leaves article {article}")));
            }
            if !state.corpus.contains_anchor(to) {
                return Err(PlatformError::NotFound(to.to_string()));
            }
        }
        store.relabel(article, mapping)?;
        store.set_frozen(article, false)?;
        Ok(store.article_histories(article).count())
    }

    pub fn frozen_articles(&self) -> Vec<ArticleName> {
        read(&self.comments).frozen().iter().cloned().collect()
    }

    pub fn comment_counts(&self) -> (usize, usize) {
        let store = read(&self.comments);
        (store.live_count(), store.revision_count())
    }

    pub fn feedback(&self, user: &User, query: &str, anchor: &Anchor) -> Result<FeedbackRecord, PlatformError> {
        self.known_anchor(anchor)?;
        Ok(record_feedback(query, anchor, user, &mut lock(&self.feedback))?)
    }

    pub fn feedback_count(&self) -> usize {
        lock(&self.feedback).len()
    }

    /// Rendered article with item list and comment metadata, as JSON.
    pub fn article_json(&self, state: &CorpusState, name: &ArticleName) -> Result<String, PlatformError> {
        let article = state.corpus.get(name).ok_or_else(|| PlatformError::NotFound(format!("article {name}")))?;
        let store = read(&self.comments);
        let frozen = store.is_frozen(name);
        let live: BTreeMap<Anchor, String> = if frozen {
            BTreeMap::new()
        } else {
            store.live_comments(name).into_iter().filter(|(a, _)| article.item(a).is_some()).collect()
        };
        let names: BTreeSet<ArticleName> = state.corpus.names().cloned().collect();
        let html = render_article(article, &names, &live).map_err(|e| PlatformError::NotFound(e.to_string()))?;
        let comments = store
            .article_histories(name)
            .filter_map(|(anchor, h)| h.last().map(|r| (anchor, r)))
            .map(|(anchor, r)| CommentMeta {
                anchor,
                revision_id: r.revision_id,
                author: &r.author,
                timestamp: r.timestamp.to_rfc3339(),
                deleted: r.deleted,
            })
            .collect();
        let view = ArticleView {
            name: &article.name,
            version_label: &state.version_label,
            frozen,
            html,
            items: article
                .items
                .iter()
                .map(|i| ItemView {
                    anchor: &i.anchor,
                    kind: i.kind,
                    label: i.label.as_deref(),
                    span: i.span,
                    statement: &i.statement_text,
                })
                .collect(),
            comments,
        };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }

    /// Standalone HTML page for an article.
    pub fn article_page(&self, state: &CorpusState, name: &ArticleName) -> Result<String, PlatformError> {
        let article = state.corpus.get(name).ok_or_else(|| PlatformError::NotFound(format!("article {name}")))?;
        let store = read(&self.comments);
        let live: BTreeMap<Anchor, String> = if store.is_frozen(name) {
            BTreeMap::new()
        } else {
            store.live_comments(name).into_iter().filter(|(a, _)| article.item(a).is_some()).collect()
        };
        let names: BTreeSet<ArticleName> = state.corpus.names().cloned().collect();
        let body = render_article(article, &names, &live).map_err(|e| PlatformError::NotFound(e.to_string()))?;
        Ok(format!(
            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{name}</title></head>\n<body>\n{body}</body></html>\n"
        ))
    }
}
