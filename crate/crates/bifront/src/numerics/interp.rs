//! Monotone cubic (Fritsch-Carlson) interpolation plus cubic-Hermite helpers.
//!
//! Tabulated model inputs are interpolated with shape-preserving slopes so
//! that sign and monotonicity conditions of the input data survive
//! interpolation. Segment integrals of the cubic are exact, which makes the
//! antiderivative of a tabulated reaction cheap and quadrature-free.

/// Cubic Hermite value on `[x0, x1]` from endpoint values and slopes.
pub fn hermite_eval(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + h * d0 * (t3 - 2.0 * t2 + t)
        + h * d1 * (t3 - t2)
}

/// Derivative of the cubic Hermite on `[x0, x1]`.
pub fn hermite_deriv(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    (y0 * (6.0 * t2 - 6.0 * t) + y1 * (-6.0 * t2 + 6.0 * t)) / h
        + d0 * (3.0 * t2 - 4.0 * t + 1.0)
        + d1 * (3.0 * t2 - 2.0 * t)
}

/// Shape-preserving piecewise-cubic interpolant on strictly increasing knots.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    /// exact integral of the interpolant from `xs[0]` to each knot
    prefix: Vec<f64>,
}

impl Pchip {
    /// Build the interpolant. Knots must be strictly increasing and at least
    /// two points long.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len());
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "knots must be strictly increasing"
        );
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slopes[0] = Self::endpoint_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        let (h_last, d_last) = (h[n - 2], delta[n - 2]);
        let (h_prev, d_prev) = if n >= 3 {
            (Some(h[n - 3]), Some(delta[n - 3]))
        } else {
            (None, None)
        };
        slopes[n - 1] = Self::endpoint_slope(h_last, h_prev, d_last, d_prev);

        let mut prefix = vec![0.0; n];
        for i in 0..n - 1 {
            prefix[i + 1] = prefix[i]
                + h[i] * (0.5 * (ys[i] + ys[i + 1]) + h[i] * (slopes[i] - slopes[i + 1]) / 12.0);
        }
        Pchip { xs, ys, slopes, prefix }
    }

    /// Non-centered three-point endpoint slope with the usual monotone clamps.
    fn endpoint_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
        let (h1, d1) = match (h1, d1) {
            (Some(h1), Some(d1)) => (h1, d1),
            _ => return d0,
        };
        let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d * d0 <= 0.0 {
            d = 0.0;
        } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
            d = 3.0 * d0;
        }
        d
    }

    fn segment_of(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Interpolated value; `x` is clamped to the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.xs[0], *self.xs.last().unwrap());
        let i = self.segment_of(x);
        hermite_eval(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }

    /// Derivative of the interpolant; `x` clamped to the knot range.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let x = x.clamp(self.xs[0], *self.xs.last().unwrap());
        let i = self.segment_of(x);
        hermite_deriv(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }

    /// Exact integral of the interpolant from the first knot to `x`.
    pub fn integral_from_start(&self, x: f64) -> f64 {
        let x = x.clamp(self.xs[0], *self.xs.last().unwrap());
        let i = self.segment_of(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let part = h
            * (self.ys[i] * (0.5 * t4 - t3 + t)
                + self.ys[i + 1] * (-0.5 * t4 + t3)
                + h * self.slopes[i] * (0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2)
                + h * self.slopes[i + 1] * (0.25 * t4 - t3 / 3.0));
        self.prefix[i] + part
    }
}
