use std::path::Path;

use entroplab::graphlab::{
    bcc_color_bound, bcc_dual_entropy_bound, bcc_entropy_bound, bcc_exact, corollary_bound_check,
    extend_with_cover_index, load_graph, min_valid_matching_partition, verify_cover,
    verify_matching_partition, BicliqueCover, BoundReport, MatchingPartition, DEFAULT_BCC_LIMIT,
    DEFAULT_PARTITION_LIMIT,
};
use entroplab::{Graph, Rational};
use serde_json::{json, Value};

use crate::{
    oracle_limit, read_file, write_file, BccMethod, CmdResult, CommandOutcome, GraphCommand,
    UsageError, EXIT_FALSE, EXIT_OK,
};

fn load(path: &Path) -> Result<Graph, UsageError> {
    load_graph::<Rational>(&read_file(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, UsageError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn bound_value(r: entroplab::Result<BoundReport>) -> Result<Value, UsageError> {
    match r {
        Ok(b) => Ok(serde_json::to_value(b).expect("serializable")),
        Err(e @ entroplab::Error::PreconditionFailed(_)) => {
            Ok(json!({ "not_applicable": e.to_string() }))
        }
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn run(command: GraphCommand) -> CmdResult {
    match command {
        GraphCommand::VerifyPartition {
            graph,
            partition,
            strict,
        } => {
            let g = load(&graph)?;
            let p: MatchingPartition = load_json(&partition)?;
            let v = verify_matching_partition(&g, &p)?;
            let mut doc = json!({ "partition": v });
            if v.verdict.holds {
                doc["corollary"] =
                    serde_json::to_value(corollary_bound_check(&g, &p)?).expect("serializable");
            }
            let code = if strict && !v.verdict.holds {
                EXIT_FALSE
            } else {
                EXIT_OK
            };
            Ok(CommandOutcome::json(code, &doc))
        }
        GraphCommand::MinPartition { graph, limit } => {
            let g = load(&graph)?;
            let limit = oracle_limit(limit, DEFAULT_PARTITION_LIMIT)?;
            let (k, p) = min_valid_matching_partition(&g, limit)?;
            let v = verify_matching_partition(&g, &p)?;
            let doc = json!({
                "K": k,
                "L": v.l,
                "R": v.r,
                "partition": p,
            });
            Ok(CommandOutcome::json(EXIT_OK, &doc))
        }
        GraphCommand::VerifyCover {
            graph,
            cover,
            strict,
        } => {
            let g = load(&graph)?;
            let c: BicliqueCover = load_json(&cover)?;
            let v = verify_cover(&g, &c)?;
            let code = if strict && !v.holds {
                EXIT_FALSE
            } else {
                EXIT_OK
            };
            let doc = json!({ "t": c.len(), "verdict": v });
            Ok(CommandOutcome::json(code, &doc))
        }
        GraphCommand::Bcc {
            graph,
            method,
            limit,
        } => {
            let g = load(&graph)?;
            let mut doc = serde_json::Map::new();
            for m in method {
                let (name, value) = match m {
                    BccMethod::Entropy => ("entropy", bound_value(bcc_entropy_bound(&g))?),
                    BccMethod::Dual => ("dual", bound_value(bcc_dual_entropy_bound(&g))?),
                    BccMethod::Color => ("color", bound_value(bcc_color_bound(&g))?),
                    BccMethod::Exact => {
                        let limit = oracle_limit(limit, DEFAULT_BCC_LIMIT)?;
                        let sol = bcc_exact(&g, limit)?;
                        ("exact", serde_json::to_value(sol).expect("serializable"))
                    }
                };
                doc.insert(name.into(), value);
            }
            Ok(CommandOutcome::json(EXIT_OK, &Value::Object(doc)))
        }
        GraphCommand::ZExtend {
            graph,
            cover,
            limit,
            out,
        } => {
            let g = load(&graph)?;
            let c = match cover {
                Some(path) => load_json(&path)?,
                None => bcc_exact(&g, oracle_limit(limit, DEFAULT_BCC_LIMIT)?)?.cover,
            };
            let z = extend_with_cover_index(&g, &c)?;
            if let Some(path) = out {
                write_file(&path, &z.distribution.to_json())?;
            }
            let doc = json!({ "cover": c, "extension": z });
            Ok(CommandOutcome::json(EXIT_OK, &doc))
        }
    }
}
