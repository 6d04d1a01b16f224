use super::grid::SphereGrid;

/// `(P z)(θ) = (z(θ) + z(−θ))/2`.
#[derive(Clone, Debug)]
pub struct EvenProjector {
    antipode: Vec<usize>,
}

impl EvenProjector {
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.antipode.iter().enumerate().map(|(i, &j)| 0.5 * (z[i] + z[j])).collect()
    }
}

pub fn even_projector(grid: &SphereGrid) -> EvenProjector {
    EvenProjector { antipode: grid.antipode().to_vec() }
}

/// Quotient of the node set by θ ~ −θ. Class ids follow the smaller node index.
#[derive(Clone, Debug)]
pub struct EvenQuotient {
    pub class_of: Vec<usize>,
    pub representative: Vec<usize>,
}

impl EvenQuotient {
    pub fn new(grid: &SphereGrid) -> Self {
        let anti = grid.antipode();
        let mut class_of = vec![usize::MAX; grid.len()];
        let mut representative = Vec::with_capacity(grid.len() / 2);
        for i in 0..grid.len() {
            if class_of[i] == usize::MAX {
                class_of[i] = representative.len();
                class_of[anti[i]] = representative.len();
                representative.push(i);
            }
        }
        EvenQuotient { class_of, representative }
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    /// Lift class values back to nodes.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        self.class_of.iter().map(|&c| y[c]).collect()
    }

    /// Sum node values over each class.
    pub fn sum(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c] += x[i];
        }
        out
    }
}
