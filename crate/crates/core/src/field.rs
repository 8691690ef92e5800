/// A scalar grid function stored over the active cells of a [`crate::geometry::Grid`],
/// in compact (active-cell) indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Field { values: vec![value; n] }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Field { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// self + a * other, elementwise.
    pub fn axpy(&self, a: f64, other: &Field) -> Field {
        debug_assert_eq!(self.len(), other.len());
        Field {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field { values: self.values.iter().map(|x| a * x).collect() }
    }
}

impl std::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl std::ops::IndexMut<usize> for Field {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

/// Compensated (Kahan) sum; keeps bilinear identities sharp on large grids.
pub fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for x in it {
        let y = x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_and_norms() {
        let a = Field::from_vec(vec![1.0, -2.0, 3.0]);
        let b = Field::from_vec(vec![0.5, 0.5, 0.5]);
        let c = a.axpy(2.0, &b);
        assert_eq!(c.values(), &[2.0, -1.0, 4.0]);
        assert_eq!(a.norm_inf(), 3.0);
        assert_eq!(a.min(), -2.0);
        assert_eq!(a.max(), 3.0);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        // 1 + 1e-16 repeated: naive summation drops the small terms.
        let xs: Vec<f64> = std::iter::once(1.0)
            .chain(std::iter::repeat(1e-16).take(10_000))
            .collect();
        let s = kahan_sum(xs.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
