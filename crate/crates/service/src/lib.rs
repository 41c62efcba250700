//! Stateless HTTP front end: one optimizer run per request, nothing kept
//! between requests.

use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use valuesched_core::harness::representative_point;
use valuesched_core::model::Violation;
use valuesched_core::scheduler::Schedule;
use valuesched_core::{validate_scenario, Instance, MoeadConfig, ParetoArchive, Scenario, Variant, VERSION};

/// Per-request limits. Anything above them is answered with 413.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub max_body_bytes: usize,
    pub max_jobs: usize,
    pub max_population: usize,
    pub max_generations: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_body_bytes: 4 << 20,
            max_jobs: 500,
            max_population: 1000,
            max_generations: 2000,
        }
    }
}

fn default_population() -> usize {
    300
}

fn default_generations() -> usize {
    500
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeRequest {
    pub scenario: Scenario,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_variant() -> Variant {
    Variant::Standard
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ArchivePoint {
    pub makespan_s: f64,
    pub profit: f64,
    pub elements_produced: usize,
    pub genome: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Representative {
    #[serde(flatten)]
    pub point: ArchivePoint,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizeResponse {
    pub version: String,
    pub variant: Variant,
    /// Sorted by makespan ascending.
    pub archive: Vec<ArchivePoint>,
    pub representative: Representative,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

/// Status plus JSON body of a finished request.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    fn json<T: Serialize>(status: StatusCode, value: &T) -> Self {
        Self {
            status,
            body: serde_json::to_vec(value).expect("response types serialize"),
        }
    }

    fn error(status: StatusCode, error: impl Into<String>, violations: Vec<Violation>) -> Self {
        Self::json(
            status,
            &ErrorBody {
                error: error.into(),
                violations,
            },
        )
    }
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        (self.status, [(header::CONTENT_TYPE, "application/json")], self.body).into_response()
    }
}

fn point(e: &valuesched_core::ArchiveEntry) -> ArchivePoint {
    ArchivePoint {
        makespan_s: e.objectives.makespan_s,
        profit: e.objectives.total_profit,
        elements_produced: e.elements_produced,
        genome: e.chromosome.to_string(),
    }
}

fn response(inst: &Instance, variant: Variant, archive: &ParetoArchive) -> OptimizeResponse {
    let rep = representative_point(archive).expect("a finished run has a non-empty archive");
    OptimizeResponse {
        version: VERSION.to_string(),
        variant,
        archive: archive.sorted_by_makespan().into_iter().map(point).collect(),
        representative: Representative {
            point: point(rep),
            schedule: rep.chromosome.schedule(inst),
        },
    }
}

/// Handles one optimize request body synchronously.
pub fn optimize(cfg: &ServiceConfig, body: &[u8]) -> Reply {
    let req: OptimizeRequest = match serde_json::from_slice(body) {
        Ok(r) => r,
        Err(e) => return Reply::error(StatusCode::UNPROCESSABLE_ENTITY, format!("malformed request: {e}"), vec![]),
    };
    let report = validate_scenario(&req.scenario);
    if !report.is_valid() {
        return Reply::error(StatusCode::BAD_REQUEST, "invalid scenario", report.violations);
    }
    let jobs = req.scenario.job_count();
    if jobs > cfg.max_jobs {
        return Reply::error(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("scenario has {jobs} jobs, limit is {}", cfg.max_jobs),
            vec![],
        );
    }
    if req.population > cfg.max_population || req.generations > cfg.max_generations {
        return Reply::error(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!(
                "population {} x generations {} exceeds the limit of {} x {}",
                req.population, req.generations, cfg.max_population, cfg.max_generations
            ),
            vec![],
        );
    }
    let mcfg = MoeadConfig {
        generations: req.generations,
        seed: req.seed,
        ..MoeadConfig::default().with_population(req.population)
    };
    if let Err(e) = mcfg.validate() {
        let v = Violation {
            location: "population".into(),
            message: e.to_string(),
        };
        return Reply::error(StatusCode::BAD_REQUEST, "invalid optimizer settings", vec![v]);
    }
    let inst = Instance::new(&req.scenario).expect("scenario was validated");
    let archive = valuesched_core::run(&inst, &mcfg, req.variant).expect("config was validated");
    Reply::json(StatusCode::OK, &response(&inst, req.variant, &archive))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Health {
    pub status: String,
    pub version: String,
}

async fn health() -> Reply {
    Reply::json(
        StatusCode::OK,
        &Health {
            status: "ok".into(),
            version: VERSION.into(),
        },
    )
}

async fn optimize_handler(State(cfg): State<Arc<ServiceConfig>>, body: Bytes) -> Reply {
    match tokio::task::spawn_blocking(move || optimize(&cfg, &body)).await {
        Ok(r) => r,
        Err(e) => Reply::error(StatusCode::INTERNAL_SERVER_ERROR, format!("optimizer failed: {e}"), vec![]),
    }
}

pub fn router(cfg: ServiceConfig) -> Router {
    let limit = cfg.max_body_bytes;
    Router::new()
        .route("/health", get(health))
        .route("/optimize", post(optimize_handler))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(Arc::new(cfg))
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    cfg: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(cfg))
        .with_graceful_shutdown(shutdown)
        .await
}
