//! Single-query HTTP facade: POST /api/check runs per-statement analysis
//! (no dataset, context limited to the submitted statement) and returns the
//! same JSON report the CLI emits. Stateless across requests.

use anyhow::Result;
use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde::Deserialize;

use sqlsmell_core::pipeline::{analyze_sql, report_for, AnalysisOptions};
use sqlsmell_core::ranker::{InterQueryMode, RankingConfig};
use sqlsmell_core::rules::DetectOptions;

#[derive(clap::Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,

    #[arg(long, default_value_t = 8080)]
    port: u16,
}

#[derive(Debug, Deserialize)]
struct CheckRequest {
    query: String,
    #[serde(default)]
    config: Option<CheckConfig>,
}

#[derive(Debug, Deserialize, Default)]
struct CheckConfig {
    preset: Option<String>,
    inter_query: Option<String>,
}

pub fn run(args: ServeArgs) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let app = router();
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        axum::serve(listener, app).await?;
        Ok(())
    })
}

pub fn router() -> Router {
    Router::new().route("/api/check", post(check))
}

fn bad_request(message: String) -> Response {
    (
        StatusCode::BAD_REQUEST,
        Json(serde_json::json!({ "error": message })),
    )
        .into_response()
}

async fn check(body: Result<Json<CheckRequest>, JsonRejection>) -> Response {
    let Json(request) = match body {
        Ok(json) => json,
        Err(rejection) => {
            let message = if rejection.body_text().contains("missing field `query`") {
                "missing field: query".to_string()
            } else {
                rejection.body_text()
            };
            return bad_request(message);
        }
    };

    let mut opts = AnalysisOptions {
        // Single-statement scope: per-statement rules only, no dataset.
        detect: DetectOptions {
            inter: false,
            data: false,
        },
        ..AnalysisOptions::default()
    };
    if let Some(config) = &request.config {
        if let Some(preset) = &config.preset {
            match RankingConfig::preset(preset) {
                Some(cfg) => {
                    opts.ranking = cfg;
                    opts.preset_name = Some(preset.to_uppercase());
                }
                None => return bad_request(format!("unknown preset: {preset}")),
            }
        }
        if let Some(mode) = &config.inter_query {
            opts.ranking.inter_query_mode = match mode.as_str() {
                "count" => InterQueryMode::ByFindingCount,
                "score" => InterQueryMode::ByScore,
                other => return bad_request(format!("unknown inter_query mode: {other}")),
            };
        }
    }

    match analyze_sql(&request.query, "api", &opts) {
        Ok(analysis) => {
            let report = report_for(&analysis, &opts);
            (StatusCode::OK, Json(serde_json::to_value(&report).unwrap())).into_response()
        }
        Err(err) => bad_request(err.to_string()),
    }
}
