//! Session registry, background solve jobs and on-disk persistence.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::Serialize;
use tokio::sync::RwLock;

use crate::session::{Mode, NodeId, ReportDoc, SessionError, SessionTree};

pub type SharedTree = Arc<RwLock<SessionTree>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done { report: ReportDoc },
    Failed { status: u16, error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Job {
    pub id: String,
    pub session: String,
    pub node: NodeId,
    #[serde(flatten)]
    pub state: JobState,
}

pub struct Store {
    sessions: RwLock<BTreeMap<String, SharedTree>>,
    jobs: Mutex<HashMap<String, Job>>,
    data_dir: Option<PathBuf>,
    /// How long a decompose request waits before handing back a job.
    pub budget: Duration,
}

impl Store {
    pub fn in_memory(budget: Duration) -> Self {
        Store {
            sessions: RwLock::new(BTreeMap::new()),
            jobs: Mutex::new(HashMap::new()),
            data_dir: None,
            budget,
        }
    }

    /// Opens a store backed by `dir`, loading every session saved there.
    pub fn open(dir: impl Into<PathBuf>, budget: Duration) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let mut sessions = BTreeMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let tree: SessionTree = serde_json::from_str(&text).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))
            })?;
            sessions.insert(tree.id.clone(), Arc::new(RwLock::new(tree)));
        }
        Ok(Store {
            sessions: RwLock::new(sessions),
            jobs: Mutex::new(HashMap::new()),
            data_dir: Some(dir),
            budget,
        })
    }

    pub async fn insert(&self, tree: SessionTree) -> Result<SharedTree, SessionError> {
        self.persist(&tree)?;
        let id = tree.id.clone();
        let shared = Arc::new(RwLock::new(tree));
        self.sessions.write().await.insert(id, shared.clone());
        Ok(shared)
    }

    pub async fn get(&self, id: &str) -> Result<SharedTree, SessionError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(format!("no session {id}")))
    }

    pub async fn ids(&self) -> Vec<String> {
        self.sessions.read().await.keys().cloned().collect()
    }

    pub async fn remove(&self, id: &str) -> Result<(), SessionError> {
        if self.sessions.write().await.remove(id).is_none() {
            return Err(SessionError::NotFound(format!("no session {id}")));
        }
        if let Some(dir) = &self.data_dir {
            let _ = std::fs::remove_file(session_path(dir, id));
        }
        Ok(())
    }

    /// Audits the tree and writes it atomically. Only the audit runs for
    /// in-memory stores.
    pub fn persist(&self, tree: &SessionTree) -> Result<(), SessionError> {
        tree.audit()
            .map_err(|e| SessionError::Conflict(format!("session {} failed its audit: {e}", tree.id)))?;
        let Some(dir) = &self.data_dir else {
            return Ok(());
        };
        let text = serde_json::to_string(tree).expect("sessions serialize");
        let path = session_path(dir, &tree.id);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, text)
            .and_then(|_| std::fs::rename(&tmp, &path))
            .map_err(|e| SessionError::Invalid(format!("cannot save session {}: {e}", tree.id)))
    }

    pub fn job(&self, id: &str) -> Option<Job> {
        self.jobs.lock().unwrap().get(id).cloned()
    }

    fn set_job(&self, job: Job) {
        self.jobs.lock().unwrap().insert(job.id.clone(), job);
    }

    /// Solves a node in the background. Resolves to the outcome if it lands
    /// within the budget, otherwise to the id of the job to poll.
    pub async fn decompose(
        self: &Arc<Self>,
        session: &str,
        node: NodeId,
        mode: Mode,
    ) -> Result<Result<ReportDoc, String>, SessionError> {
        let shared = self.get(session).await?;
        let (model, revision) = shared.read().await.solve_snapshot(node)?;
        let job_id = uuid::Uuid::new_v4().simple().to_string();
        self.set_job(Job {
            id: job_id.clone(),
            session: session.to_string(),
            node,
            state: JobState::Running,
        });

        let (tx, rx) = tokio::sync::oneshot::channel();
        let store = Arc::clone(self);
        let session_id = session.to_string();
        let job = job_id.clone();
        tokio::spawn(async move {
            let solved = tokio::task::spawn_blocking(move || crate::session::solve(&model, mode)).await;
            let outcome = match solved {
                Ok(Ok(report)) => {
                    let mut tree = shared.write().await;
                    tree.apply_report(node, revision, report.clone())
                        .and_then(|_| store.persist(&tree))
                        .map(|_| report)
                }
                Ok(Err(e)) => Err(e),
                Err(e) => Err(SessionError::Invalid(format!("solver crashed: {e}"))),
            };
            let state = match &outcome {
                Ok(report) => JobState::Done { report: report.clone() },
                Err(e) => JobState::Failed {
                    status: crate::http::status_of(e).as_u16(),
                    error: e.to_string(),
                },
            };
            store.set_job(Job {
                id: job,
                session: session_id,
                node,
                state,
            });
            let _ = tx.send(outcome);
        });

        if self.budget.is_zero() {
            return Ok(Err(job_id));
        }
        match tokio::time::timeout(self.budget, rx).await {
            Ok(Ok(outcome)) => outcome.map(Ok),
            Ok(Err(_)) => Err(SessionError::Invalid("solver task vanished".into())),
            Err(_) => Ok(Err(job_id)),
        }
    }
}

fn session_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}
