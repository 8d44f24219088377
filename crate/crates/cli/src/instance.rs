//! Instance files: a JSON document describing a network, its latency
//! functions, traveler types and an optional information extension.
//!
//! Latencies are polynomial coefficient arrays, constant term first. Edges,
//! vertices and information sets are referenced by name. See
//! `docs/instance.schema.json` for the formal schema.

use std::collections::BTreeSet;

use ibp_core::equilibrium::{LatencyFunction, RoutingGame, TravelerType};
use ibp_core::graph::{EdgeSet, MultiGraph};
use ibp_core::paradox::IbpInstance;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    pub od_pairs: Vec<OdEntry>,
    pub types: Vec<TypeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub endpoints: [String; 2],
    pub latency: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdEntry {
    pub origin: String,
    pub destination: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeEntry {
    pub rate: f64,
    pub od_index: usize,
    pub info_set: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionEntry {
    pub added_edges: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("the instance has no `extension` block")]
    MissingExtension,
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// A parsed game with the edges of its extension, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub game: RoutingGame,
    pub extension: Option<EdgeSet>,
}

impl Model {
    pub fn ibp_instance(&self) -> Result<IbpInstance, InstanceError> {
        let added = self
            .extension
            .clone()
            .ok_or(InstanceError::MissingExtension)?;
        IbpInstance::new(self.game.clone(), added)
            .map_err(|e| field_error("extension.added_edges", e.to_string()))
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s
    }

    pub fn from_game(game: &RoutingGame, extension: Option<&EdgeSet>) -> Self {
        let g = game.graph();
        let names = |set: &EdgeSet| -> Vec<String> {
            set.iter().map(|&e| g.edge_name(e).to_string()).collect()
        };
        Self {
            schema_version: SCHEMA_VERSION,
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edge_ids()
                .map(|e| {
                    let edge = g.edge(e);
                    let coeffs = game.latency(e).coefficients();
                    EdgeEntry {
                        id: edge.name.clone(),
                        endpoints: [
                            g.vertex_name(edge.ends[0]).to_string(),
                            g.vertex_name(edge.ends[1]).to_string(),
                        ],
                        latency: if coeffs.is_empty() {
                            vec![0.0]
                        } else {
                            coeffs.to_vec()
                        },
                    }
                })
                .collect(),
            od_pairs: g
                .od_pairs()
                .iter()
                .map(|od| OdEntry {
                    origin: g.vertex_name(od.origin).to_string(),
                    destination: g.vertex_name(od.destination).to_string(),
                })
                .collect(),
            types: game
                .types()
                .iter()
                .map(|t| TypeEntry {
                    rate: t.rate,
                    od_index: t.od_index,
                    info_set: names(&t.info_set),
                })
                .collect(),
            extension: extension.map(|added| ExtensionEntry {
                added_edges: names(added),
            }),
        }
    }

    pub fn from_ibp_instance(instance: &IbpInstance) -> Self {
        Self::from_game(&instance.game, Some(&instance.extension.added_edges))
    }

    /// Checks every reference and builds the game.
    pub fn to_model(&self) -> Result<Model, InstanceError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_error(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        let mut seen = BTreeSet::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !seen.insert(v.as_str()) {
                return Err(field_error(
                    format!("vertices[{i}]"),
                    format!("duplicate vertex `{v}`"),
                ));
            }
        }
        let vertex_known = |field: String, name: &str| {
            if seen.contains(name) {
                Ok(())
            } else {
                Err(field_error(field, format!("unknown vertex `{name}`")))
            }
        };
        let mut edge_names = BTreeSet::new();
        let mut latencies = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if !edge_names.insert(e.id.as_str()) {
                return Err(field_error(
                    format!("edges[{i}].id"),
                    format!("duplicate edge `{}`", e.id),
                ));
            }
            for (k, end) in e.endpoints.iter().enumerate() {
                vertex_known(format!("edges[{i}].endpoints[{k}]"), end)?;
            }
            let latency = LatencyFunction::new(e.latency.clone())
                .map_err(|err| field_error(format!("edges[{i}].latency"), err.to_string()))?;
            latencies.push(latency);
        }
        for (i, od) in self.od_pairs.iter().enumerate() {
            vertex_known(format!("od_pairs[{i}].origin"), &od.origin)?;
            vertex_known(format!("od_pairs[{i}].destination"), &od.destination)?;
        }
        let g = MultiGraph::new(
            self.vertices.clone(),
            self.edges
                .iter()
                .map(|e| (e.id.clone(), e.endpoints[0].clone(), e.endpoints[1].clone()))
                .collect(),
            self.od_pairs
                .iter()
                .map(|od| (od.origin.clone(), od.destination.clone()))
                .collect(),
        )
        .map_err(|err| field_error("edges", err.to_string()))?;
        let edge_set = |field: String, names: &[String]| -> Result<EdgeSet, InstanceError> {
            names
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    g.edge_by_name(n).ok_or_else(|| {
                        field_error(format!("{field}[{k}]"), format!("unknown edge `{n}`"))
                    })
                })
                .collect()
        };
        let mut types = Vec::with_capacity(self.types.len());
        for (j, t) in self.types.iter().enumerate() {
            if t.od_index >= self.od_pairs.len() {
                return Err(field_error(
                    format!("types[{j}].od_index"),
                    format!(
                        "{} is out of range for {} OD pairs",
                        t.od_index,
                        self.od_pairs.len()
                    ),
                ));
            }
            if !(t.rate.is_finite() && t.rate >= 0.0) {
                return Err(field_error(
                    format!("types[{j}].rate"),
                    "must be finite and nonnegative",
                ));
            }
            let info = edge_set(format!("types[{j}].info_set"), &t.info_set)?;
            types.push(TravelerType::new(t.rate, t.od_index, info));
        }
        let extension = match &self.extension {
            Some(ext) => Some(edge_set("extension.added_edges".into(), &ext.added_edges)?),
            None => None,
        };
        let game = RoutingGame::new(g, latencies, types)
            .map_err(|err| field_error("types", err.to_string()))?;
        Ok(Model { game, extension })
    }
}

/// Parses and validates in one step.
pub fn load_model(text: &str) -> Result<Model, InstanceError> {
    InstanceFile::parse(text)?.to_model()
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ibp_core::fixtures::F1Variant;
    use ibp_core::paradox::f1_instance;

    #[test]
    fn round_trip_f1() {
        let inst = f1_instance(F1Variant::Origin2AtOrigin1);
        let file = InstanceFile::from_ibp_instance(&inst);
        let text = file.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back, file);
        let model = back.to_model().unwrap();
        assert_eq!(model.game, inst.game);
        assert_eq!(model.ibp_instance().unwrap(), inst);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = InstanceFile::parse("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        match err {
            InstanceError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let inst = f1_instance(F1Variant::Origin2AtOrigin1);
        let text = InstanceFile::from_ibp_instance(&inst).to_json().replacen(
            "\"schema_version\"",
            "\"colour\": 1, \"schema_version\"",
            1,
        );
        let err = InstanceFile::parse(&text).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn reference_errors_name_the_field() {
        let mut file = InstanceFile::from_ibp_instance(&f1_instance(F1Variant::Origin2AtOrigin1));
        file.types[1].info_set.push("e9".into());
        assert_eq!(
            file.to_model().unwrap_err(),
            field_error("types[1].info_set[3]", "unknown edge `e9`")
        );
        let mut file = InstanceFile::from_ibp_instance(&f1_instance(F1Variant::Origin2AtOrigin1));
        file.edges[0].endpoints[1] = "z".into();
        assert!(
            matches!(file.to_model(), Err(InstanceError::Field { field, .. }) if field == "edges[0].endpoints[1]")
        );
        let mut file = InstanceFile::from_ibp_instance(&f1_instance(F1Variant::Origin2AtOrigin1));
        file.schema_version = 2;
        assert!(file.to_model().is_err());
    }

    #[test]
    fn missing_extension() {
        let mut file = InstanceFile::from_ibp_instance(&f1_instance(F1Variant::Origin2AtOrigin1));
        file.extension = None;
        let model = file.to_model().unwrap();
        assert_eq!(model.ibp_instance(), Err(InstanceError::MissingExtension));
    }
}
