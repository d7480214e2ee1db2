//! Cichoń's diagram as a constraint checker over a small chain of symbolic
//! cardinals, plus the rules for what adding one random real preserves.
//!
//! Labels are symbols, not cardinals: an accepted assignment is only "not
//! refuted by these rules".

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `ℵ_n` for `n ≥ 1`, or `c`, which sits above every `ℵ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardinalLabel(u8);

impl CardinalLabel {
    pub const ALEPH_1: CardinalLabel = CardinalLabel(1);
    pub const ALEPH_2: CardinalLabel = CardinalLabel(2);
    pub const CONTINUUM: CardinalLabel = CardinalLabel(u8::MAX);

    /// `ℵ_n`; `n` must be between 1 and 254.
    pub fn aleph(n: u8) -> Option<Self> {
        (1..u8::MAX).contains(&n).then_some(CardinalLabel(n))
    }
}

impl fmt::Display for CardinalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == CardinalLabel::CONTINUUM {
            f.write_str("c")
        } else {
            write!(f, "aleph_{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("unknown cardinal label {0:?}, expected aleph_N or c")]
    BadLabel(String),
    #[error("unknown node {0:?}")]
    BadNode(String),
    #[error("assignment is missing {0}")]
    MissingNode(Node),
    #[error("ground assignment violates the diagram: {0}")]
    InvalidGround(String),
}

impl FromStr for CardinalLabel {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "c" {
            return Ok(CardinalLabel::CONTINUUM);
        }
        s.strip_prefix("aleph_")
            .and_then(|n| n.parse::<u8>().ok())
            .and_then(CardinalLabel::aleph)
            .ok_or_else(|| DiagramError::BadLabel(s.to_string()))
    }
}

impl Serialize for CardinalLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CardinalLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    AddN,
    CovN,
    NonN,
    CofN,
    AddM,
    CovM,
    NonM,
    CofM,
    B,
    D,
    CovStarN,
    NonStarN,
}

impl Node {
    pub const ALL: [Node; 12] = [
        Node::AddN,
        Node::CovN,
        Node::NonN,
        Node::CofN,
        Node::AddM,
        Node::CovM,
        Node::NonM,
        Node::CofM,
        Node::B,
        Node::D,
        Node::CovStarN,
        Node::NonStarN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Node::AddN => "add(N)",
            Node::CovN => "cov(N)",
            Node::NonN => "non(N)",
            Node::CofN => "cof(N)",
            Node::AddM => "add(M)",
            Node::CovM => "cov(M)",
            Node::NonM => "non(M)",
            Node::CofM => "cof(M)",
            Node::B => "b",
            Node::D => "d",
            Node::CovStarN => "cov*(N)",
            Node::NonStarN => "non*(N)",
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Node {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Node::ALL.into_iter().find(|n| n.name() == s).ok_or_else(|| DiagramError::BadNode(s.to_string()))
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The ≤-arrows of the diagram, smaller node first.
pub const EDGES: [(Node, Node); 13] = [
    (Node::AddN, Node::AddM),
    (Node::AddM, Node::CovM),
    (Node::CovM, Node::D),
    (Node::D, Node::CofM),
    (Node::CofM, Node::CofN),
    (Node::AddM, Node::B),
    (Node::B, Node::D),
    (Node::AddN, Node::CovN),
    (Node::CovN, Node::NonM),
    (Node::NonM, Node::CofM),
    (Node::B, Node::NonM),
    (Node::CovM, Node::NonN),
    (Node::NonN, Node::CofN),
];

/// A value for each of the twelve nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramAssignment {
    values: BTreeMap<Node, CardinalLabel>,
}

impl DiagramAssignment {
    pub fn new(values: BTreeMap<Node, CardinalLabel>) -> Result<Self, DiagramError> {
        if let Some(n) = Node::ALL.into_iter().find(|n| !values.contains_key(n)) {
            return Err(DiagramError::MissingNode(n));
        }
        Ok(DiagramAssignment { values })
    }

    pub fn constant(label: CardinalLabel) -> Self {
        DiagramAssignment { values: Node::ALL.into_iter().map(|n| (n, label)).collect() }
    }

    pub fn get(&self, node: Node) -> CardinalLabel {
        self.values[&node]
    }

    pub fn set(&mut self, node: Node, label: CardinalLabel) {
        self.values.insert(node, label);
    }

    pub fn with(mut self, node: Node, label: CardinalLabel) -> Self {
        self.set(node, label);
        self
    }
}

impl Serialize for DiagramAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiagramAssignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = BTreeMap::<Node, CardinalLabel>::deserialize(deserializer)?;
        DiagramAssignment::new(values).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagramViolation {
    Edge { lower: Node, upper: Node, lower_value: CardinalLabel, upper_value: CardinalLabel },
    Identity { identity: &'static str, lhs: CardinalLabel, rhs: CardinalLabel },
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramViolation::Edge { lower, upper, lower_value, upper_value } => {
                write!(f, "{lower} <= {upper} fails: {lower_value} > {upper_value}")
            }
            DiagramViolation::Identity { identity, lhs, rhs } => write!(f, "{identity} fails: {lhs} vs {rhs}"),
        }
    }
}

pub const ADD_M_IDENTITY: &str = "add(M) = min(b, cov(M))";
pub const COF_M_IDENTITY: &str = "cof(M) = max(d, non(M))";

/// Every failed arrow and identity, in a fixed order.
pub fn check_assignment(a: &DiagramAssignment) -> Vec<DiagramViolation> {
    let mut out: Vec<DiagramViolation> = EDGES
        .iter()
        .filter(|(lo, hi)| a.get(*lo) > a.get(*hi))
        .map(|&(lower, upper)| DiagramViolation::Edge {
            lower,
            upper,
            lower_value: a.get(lower),
            upper_value: a.get(upper),
        })
        .collect();
    let add_m = a.get(Node::B).min(a.get(Node::CovM));
    if a.get(Node::AddM) != add_m {
        out.push(DiagramViolation::Identity { identity: ADD_M_IDENTITY, lhs: a.get(Node::AddM), rhs: add_m });
    }
    let cof_m = a.get(Node::D).max(a.get(Node::NonM));
    if a.get(Node::CofM) != cof_m {
        out.push(DiagramViolation::Identity { identity: COF_M_IDENTITY, lhs: a.get(Node::CofM), rhs: cof_m });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

impl Relation {
    pub fn holds(self, value: CardinalLabel, bound: CardinalLabel) -> bool {
        match self {
            Relation::Eq => value == bound,
            Relation::Ge => value >= bound,
            Relation::Le => value <= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

/// `node^{ext} (relation) bound`, where the bound comes from ground values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub node: Node,
    pub relation: Relation,
    pub bound: CardinalLabel,
    pub reason: &'static str,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} ({})", self.node, self.relation.symbol(), self.bound, self.reason)
    }
}

/// Constraints on the diagram after adding one random real to a ground
/// model with the given values.
pub fn random_extension_constraints(ground: &DiagramAssignment) -> Result<Vec<Constraint>, DiagramError> {
    let violations = check_assignment(ground);
    if let Some(v) = violations.first() {
        return Err(DiagramError::InvalidGround(v.to_string()));
    }
    let g = |n| ground.get(n);
    let mut out: Vec<Constraint> =
        [Node::AddN, Node::CofN, Node::B, Node::D, Node::CovM, Node::NonM, Node::AddM, Node::CofM]
            .into_iter()
            .map(|node| Constraint { node, relation: Relation::Eq, bound: g(node), reason: "preserved" })
            .collect();
    out.push(Constraint {
        node: Node::CovN,
        relation: Relation::Ge,
        bound: g(Node::CovN).max(g(Node::B)),
        reason: "max(cov(N), b) of the ground",
    });
    out.push(Constraint {
        node: Node::NonN,
        relation: Relation::Le,
        bound: g(Node::NonN).min(g(Node::D)),
        reason: "min(non(N), d) of the ground",
    });
    out.push(Constraint {
        node: Node::CovN,
        relation: Relation::Eq,
        bound: g(Node::CovStarN),
        reason: "cov*(N) of the ground",
    });
    out.push(Constraint {
        node: Node::NonN,
        relation: Relation::Eq,
        bound: g(Node::NonStarN),
        reason: "non*(N) of the ground",
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionVerdict {
    pub ground: Vec<DiagramViolation>,
    pub ext: Vec<DiagramViolation>,
    /// Transfer constraints the extension breaks, with its actual value.
    pub failed: Vec<(Constraint, CardinalLabel)>,
}

impl ExtensionVerdict {
    pub fn accepted(&self) -> bool {
        self.ground.is_empty() && self.ext.is_empty() && self.failed.is_empty()
    }
}

/// Whether `ext` could be the diagram of a random extension of `ground`.
pub fn check_extension_pair(ground: &DiagramAssignment, ext: &DiagramAssignment) -> ExtensionVerdict {
    let ground_v = check_assignment(ground);
    let ext_v = check_assignment(ext);
    let failed = match random_extension_constraints(ground) {
        Ok(cs) => cs
            .into_iter()
            .filter(|c| !c.relation.holds(ext.get(c.node), c.bound))
            .map(|c| {
                let actual = ext.get(c.node);
                (c, actual)
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    ExtensionVerdict { ground: ground_v, ext: ext_v, failed }
}

/// Plain-text table of violations, one per line.
pub fn render_violations(violations: &[DiagramViolation]) -> String {
    let mut out = format!("{:<28} {:<10} {:<10}\n", "rule", "lhs", "rhs");
    for v in violations {
        let (rule, lhs, rhs) = match v {
            DiagramViolation::Edge { lower, upper, lower_value, upper_value } => {
                (format!("{lower} <= {upper}"), lower_value, upper_value)
            }
            DiagramViolation::Identity { identity, lhs, rhs } => (identity.to_string(), lhs, rhs),
        };
        out.push_str(&format!("{rule:<28} {:<10} {:<10}\n", lhs.to_string(), rhs.to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const A1: CardinalLabel = CardinalLabel::ALEPH_1;
    const A2: CardinalLabel = CardinalLabel::ALEPH_2;

    #[test]
    fn labels_parse_and_order() {
        assert_eq!("aleph_1".parse::<CardinalLabel>().unwrap(), A1);
        assert!(A1 < A2 && A2 < CardinalLabel::CONTINUUM);
        assert!("aleph_0".parse::<CardinalLabel>().is_err());
        assert_eq!("c".parse::<CardinalLabel>().unwrap().to_string(), "c");
    }

    #[test]
    fn constant_is_fine() {
        assert!(check_assignment(&DiagramAssignment::constant(A1)).is_empty());
    }

    #[test]
    fn single_edge_violation() {
        let a = DiagramAssignment::constant(A2).with(Node::CovN, A1);
        let v = check_assignment(&a);
        assert!(v.contains(&DiagramViolation::Edge {
            lower: Node::AddN,
            upper: Node::CovN,
            lower_value: A2,
            upper_value: A1
        }));
    }

    #[test]
    fn min_identity() {
        let a = DiagramAssignment::constant(A2).with(Node::B, A1);
        let v = check_assignment(&a);
        assert!(v
            .iter()
            .any(|v| matches!(v, DiagramViolation::Identity { identity, .. } if *identity == ADD_M_IDENTITY)));
    }

    #[test]
    fn json_needs_all_nodes() {
        let text = serde_json::to_string(&DiagramAssignment::constant(A1)).unwrap();
        assert!(text.contains("\"cov*(N)\":\"aleph_1\""));
        assert!(serde_json::from_str::<DiagramAssignment>("{\"b\":\"aleph_1\"}").is_err());
    }

    #[test]
    fn invalid_ground_is_refused() {
        let a = DiagramAssignment::constant(A2).with(Node::CovN, A1);
        assert!(matches!(random_extension_constraints(&a), Err(DiagramError::InvalidGround(_))));
    }
}
