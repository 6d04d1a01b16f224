use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    BhLower,
    BUncondLower,
    BLower,
    DLower,
    DUpper,
    BhUpper,
    QKw,
    /// Closed-form value for the ball.
    BhBall,
    SteklovEigenvalue,
    GapLower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Lower,
    Upper,
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub direction: BoundDirection,
    pub value: f64,
    pub inputs: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below_one: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn new(quantity: Quantity, direction: BoundDirection, value: f64) -> Self {
        BoundReport { quantity, direction, value, inputs: BTreeMap::new(), witness: None, below_one: None, note: None }
    }

    pub fn input(&mut self, name: &str, v: f64) -> &mut Self {
        self.inputs.insert(name.to_string(), v);
        self
    }
}
