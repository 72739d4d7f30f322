//! Piecewise-linear tables with end clamping.

use crate::scalar::Real;

/// Knot table `(x, y)` with strictly increasing `x`, evaluated by linear
/// interpolation and clamped to the end values outside the knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<T> {
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Real> Table<T> {
    /// Builds a table; fails when fewer than two knots are given, a value is
    /// non-finite, or `x` is not strictly increasing.
    pub fn new(knots: &[(T, T)]) -> Result<Self, String> {
        if knots.len() < 2 {
            return Err(format!("table needs at least 2 knots, got {}", knots.len()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err("table contains non-finite values".into());
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err("table abscissae must be strictly increasing".into());
        }
        Ok(Table {
            xs: knots.iter().map(|k| k.0).collect(),
            ys: knots.iter().map(|k| k.1).collect(),
        })
    }

    pub fn knots(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn first_x(&self) -> T {
        self.xs[0]
    }

    pub fn last_x(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    /// Interpolated value, clamped to the end values outside the knots.
    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // first knot strictly greater than x
        let hi = self.xs.partition_point(|&k| k <= x);
        let lo = hi - 1;
        if x == self.xs[lo] {
            return self.ys[lo];
        }
        let w = (x - self.xs[lo]) / (self.xs[hi] - self.xs[lo]);
        self.ys[lo] + w * (self.ys[hi] - self.ys[lo])
    }

    /// Interpolated value inside the knot range, `None` outside it.
    pub fn eval_inside(&self, x: T) -> Option<T> {
        if x < self.xs[0] || x > self.last_x() {
            None
        } else {
            Some(self.eval(x))
        }
    }

    /// Exact integral of the clamped interpolant over `[a, b]`, `a <= b`.
    pub fn integral(&self, a: T, b: T) -> T {
        if b <= a {
            return T::zero();
        }
        let half = T::lit(0.5);
        let mut total = T::zero();
        // clamped head
        if a < self.xs[0] {
            total += self.ys[0] * (b.min(self.xs[0]) - a);
        }
        for i in 0..self.xs.len() - 1 {
            let lo = self.xs[i].max(a);
            let hi = self.xs[i + 1].min(b);
            if hi > lo {
                total += half * (self.eval(lo) + self.eval(hi)) * (hi - lo);
            }
        }
        // clamped tail
        let last = self.last_x();
        if b > last {
            total += self.ys[self.ys.len() - 1] * (b - a.max(last));
        }
        total
    }

    /// Applies `f` to every ordinate.
    pub fn map_y(&self, f: impl Fn(T) -> T) -> Self {
        Table {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|&y| f(y)).collect(),
        }
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tables() {
        assert!(Table::<f64>::new(&[(0.0, 1.0)]).is_err());
        assert!(Table::new(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Table::new(&[(1.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Table::new(&[(0.0, f64::NAN), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn knots_are_reproduced_exactly() {
        let t = Table::<f64>::new(&[(0.0, 0.1), (0.3, 0.7), (1.1, 0.2), (2.0, 0.9)]).unwrap();
        for (x, y) in t.clone().knots() {
            assert_eq!(t.eval(x), y);
        }
        assert_eq!(t.eval(-5.0), 0.1);
        assert_eq!(t.eval(9.0), 0.9);
        assert!((t.eval(0.15) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn integral_matches_trapezoid_and_clamping() {
        let t = Table::<f64>::new(&[(1.0, 2.0), (3.0, 4.0)]).unwrap();
        // head [0,1] at 2, ramp [1,3] mean 3, tail [3,5] at 4
        assert!((t.integral(0.0, 5.0) - (2.0 + 6.0 + 8.0)).abs() < 1e-12);
        assert!((t.integral(2.0, 2.5) - 0.5 * 3.25).abs() < 1e-12);
        assert_eq!(t.integral(2.0, 1.0), 0.0);
    }
}
