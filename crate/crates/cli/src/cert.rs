//! JSON certificates. Field order is fixed by the struct definitions and
//! maps are ordered, so identical runs serialize to identical bytes.

use std::collections::BTreeMap;

use pisigma_core::frontend::Frontend;
use pisigma_core::oracle::{Report, Side};
use pisigma_core::tower::Kind;
use pisigma_core::Elem;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub verb: String,
    pub input: Vec<String>,
    pub mode: String,
    pub tower: Option<TowerRecord>,
    pub identities: Vec<IdentityRecord>,
    pub telescoper: Option<TelescoperRecord>,
    pub recurrence: Option<RecurrenceRecord>,
    pub depth: Option<DepthRecord>,
    pub flags: Flags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerRecord {
    pub variable: String,
    pub params: Vec<String>,
    pub variable_depth: u32,
    pub generators: Vec<GeneratorRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub name: String,
    /// `"sigma"`: `sigma(t) = t + defining`; `"pi"`: `sigma(t) = defining * t`.
    pub kind: String,
    pub defining: String,
    pub depth: u32,
    /// The sequence the generator stands for.
    pub expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub kind: String,
    pub lhs: String,
    pub rhs: String,
    pub variable: String,
    pub oracle: OracleRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub range: [i64; 2],
    pub assignments: Vec<BTreeMap<String, String>>,
    pub checked: usize,
    pub pass: bool,
    pub failures: Vec<FailureRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub n: i64,
    pub assignment: usize,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescoperRecord {
    pub f: String,
    pub g: String,
    pub g_expr: String,
    pub depth_f: u32,
    pub depth_g: u32,
    /// `sigma(g) - g = f` holds as an identity in the tower.
    pub symbolic_check: bool,
    pub new_generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceRecord {
    pub param: String,
    pub order: usize,
    /// `c_0, ..., c_r` in `sum_i c_i S(param + i) = rhs`.
    pub coefficients: Vec<String>,
    pub rhs: String,
    pub closed_form: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub result: Option<u32>,
    pub naive_result: Option<u32>,
    /// Depths of the variable and the generators, in tower order.
    pub profile: Vec<u32>,
    pub naive_profile: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub m_max: u32,
    pub shortcuts: bool,
    pub degree_slack: u32,
    pub max_order: Option<usize>,
}

impl Certificate {
    pub fn new(verb: &str, input: Vec<String>, mode: &str, flags: Flags) -> Certificate {
        Certificate { schema: SCHEMA, verb: verb.into(), input, mode: mode.into(), tower: None, identities: Vec::new(), telescoper: None, recurrence: None, depth: None, flags }
    }

    pub fn pass(&self) -> bool {
        self.identities.iter().all(|i| i.oracle.pass)
    }
}

pub fn tower_record(fe: &mut Frontend) -> TowerRecord {
    let gens: Vec<_> = fe.tower.gens().to_vec();
    let generators = gens
        .iter()
        .map(|g| GeneratorRecord {
            name: g.name.clone(),
            kind: match g.kind {
                Kind::Sigma => "sigma".into(),
                Kind::Pi => "pi".into(),
            },
            defining: fe.tower.fmt_elem(&g.defining),
            depth: g.depth,
            expr: fe.gen_expr(g.var).to_string(),
        })
        .collect();
    TowerRecord { variable: fe.var.clone(), params: fe.tower.params.clone(), variable_depth: fe.tower.k_depth, generators }
}

pub fn oracle_record(r: &Report) -> OracleRecord {
    OracleRecord {
        range: [r.range.0, r.range.1],
        assignments: r.assignments.iter().map(|a| a.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()).collect(),
        checked: r.checked,
        pass: r.pass(),
        failures: r
            .failures
            .iter()
            .map(|f| FailureRecord { n: f.n, assignment: f.assignment, lhs: f.lhs.as_ref().map(|x| x.to_string()), rhs: f.rhs.as_ref().map(|x| x.to_string()), error: f.error.clone() })
            .collect(),
    }
}

/// Text of one side, for the record.
pub fn side_text(s: &Side<'_>) -> String {
    match s {
        Side::Expr(e, _) => e.to_string(),
        Side::Elem(e, t) => t.fmt_elem(e),
    }
}

pub fn elem_text(fe: &Frontend, e: &Elem) -> String {
    fe.tower.fmt_elem(e)
}
